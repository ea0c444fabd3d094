// Copyright 2026 The bichromatic-heterodyne Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Difference-signal variances for balanced heterodyne detection of a two-mode
// squeezed state, with a monochromatic or a bichromatic local oscillator.
// All variances are in units of E0^2 and scale with the LO photon number.

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "blo/gaussian.hpp"

namespace blo {

enum class ImageBandCase { NoImageBands, SharedImageBand, TwoImageBands };

std::string_view to_string(ImageBandCase c);
std::optional<ImageBandCase> parse_image_band_case(std::string_view name);

/// Number of distinct vacuum image modes that reach the detector.
int vacuum_image_count(ImageBandCase c);

/// Coherent LO tone <b> = amplitude * e^{i phase}. Its optical frequency lives
/// in FrequencyPlan.
class LoTone {
 public:
  LoTone(double amplitude, double phase);

  double amplitude() const { return amplitude_; }
  double phase() const { return phase_; }
  std::complex<double> beta() const { return std::polar(amplitude_, phase_); }

 private:
  double amplitude_;
  double phase_;
};

/// Optical frequencies (rad/s) of the signal modes and the LO tone(s).
///
/// Bichromatic plans are stored as (omega_minus, Delta, Delta1, Delta2) so that
/// detuning sums such as Delta1 + Delta2 are exact even at optical carriers.
class FrequencyPlan {
 public:
  /// Single LO at the midpoint (omega_plus + omega_minus) / 2.
  static FrequencyPlan standard(double omega_minus, double omega_plus);
  /// omega_L1 = omega_minus + delta1, omega_L2 = omega_minus + delta + delta2.
  static FrequencyPlan bichromatic(double omega_minus, double delta, double delta1,
                                   double delta2);

  bool is_bichromatic() const { return bichromatic_; }

  double omega_minus() const { return omega_minus_; }
  double omega_plus() const { return omega_minus_ + delta_; }
  double delta() const { return delta_; }
  double delta_beat() const { return 0.5 * delta_; }

  /// Requires a bichromatic plan.
  double delta1() const;
  double delta2() const;
  double lo1() const;
  double lo2() const;
  double image_minus() const;  // 2 omega_L1 - omega_minus
  double image_plus() const;   // 2 omega_L2 - omega_plus

  /// Requires a standard plan.
  double lo() const;

 private:
  FrequencyPlan(double omega_minus, double delta, double delta1, double delta2, bool bichromatic);
  void require_bichromatic() const;

  double omega_minus_;
  double delta_;
  double delta1_;
  double delta2_;
  bool bichromatic_;
};

struct VarianceReport {
  double variance = 0.0;
  /// Declared shot-noise reference: 2|b|^2 for a monochromatic LO, the
  /// two-image-band vacuum level 8|b|^2 for a bichromatic LO.
  double baseline = 0.0;
  double relative_db = 0.0;
  /// The same configuration evaluated at s = 0.
  double own_baseline = 0.0;
  double own_relative_db = 0.0;
  /// nullopt for the monochromatic LO.
  std::optional<ImageBandCase> image_case;
  /// (<n+> + <n->) / (2|b|^2): size of the neglected LO-quantization term.
  double lo_quantization_ratio = 0.0;
};

VarianceReport make_report(double variance, double baseline, double own_baseline,
                           std::optional<ImageBandCase> image_case, double lo_quantization_ratio);

/// 2|b|^2 [e^{2s} cos^2(chi - theta/2) + e^{-2s} sin^2(chi - theta/2)].
VarianceReport standard_heterodyne_variance(const SqueezeParams& p, const LoTone& lo);

/// Default classification tolerance, 1e-9 * Delta.
double default_case_tolerance(const FrequencyPlan& fp);

ImageBandCase classify_image_band_case(const FrequencyPlan& fp, double tol);
ImageBandCase classify_image_band_case(const FrequencyPlan& fp);

/// Time-dependent difference-signal variance of a bichromatic LO after the
/// terms oscillating at ~Delta are dropped:
///   (|b1|^2 + |b2|^2)(4 sinh^2 s + 2 + n_img)
///     + 8 |b1||b2| sinh s cosh s cos(chi1 + chi2 - theta - (Delta1 + Delta2) t).
double blo_variance_general(const SqueezeParams& p, const LoTone& lo1, const LoTone& lo2,
                            const FrequencyPlan& fp, double t);

/// Balanced bichromatic LO (|b1| = |b2|), Delta1 = -Delta2:
///   4|b|^2 [e^{2s} cos^2 ((chi1+chi2-theta)/2) + e^{-2s} sin^2 (...) + n_img / 2].
VarianceReport blo_variance(const SqueezeParams& p, const LoTone& lo1, const LoTone& lo2,
                            ImageBandCase image_case);

/// Amplitude-mismatched bichromatic LO, |b1| = beta_mag, |b2| = beta_mag + delta_beta.
VarianceReport blo_variance_unbalanced(const SqueezeParams& p, double beta_mag,
                                       double delta_beta, double chi1, double chi2,
                                       ImageBandCase image_case);

/// Phase-independent noise from LO vacuum fluctuations beating with the signal,
/// (<n+> + <n->) per LO tone. Absent from the strong-LO formulas above.
double lo_quantization_noise(const SqueezeParams& p, int tone_count);

/// Phase sum chi1 + chi2 that minimises the bichromatic variance: theta + pi.
double optimal_phase_sum(const SqueezeParams& p);

struct LoConfig {
  enum class Kind { Standard, Bichromatic };
  Kind kind = Kind::Bichromatic;
  double amplitude = 1.0;
  double delta_beta = 0.0;  // bichromatic only
};

struct ScanPoint {
  double phase;  // chi (standard) or chi1 + chi2 (bichromatic)
  VarianceReport report;
};

/// Sweeps the LO phase over n_points equally spaced values in [0, 2*pi).
/// Bichromatic scans set chi1 = phase, chi2 = 0. `image_case` is ignored for a
/// standard LO.
std::vector<ScanPoint> phase_scan(const SqueezeParams& p, const LoConfig& lo,
                                  ImageBandCase image_case, int n_points);

}  // namespace blo

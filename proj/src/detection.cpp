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

#include "blo/detection.hpp"

#include <cmath>
#include <numbers>

namespace blo {

std::string_view to_string(ImageBandCase c) {
  switch (c) {
    case ImageBandCase::NoImageBands:
      return "NoImageBands";
    case ImageBandCase::SharedImageBand:
      return "SharedImageBand";
    case ImageBandCase::TwoImageBands:
      return "TwoImageBands";
  }
  return "?";
}

std::optional<ImageBandCase> parse_image_band_case(std::string_view name) {
  for (auto c : {ImageBandCase::NoImageBands, ImageBandCase::SharedImageBand,
                 ImageBandCase::TwoImageBands}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

int vacuum_image_count(ImageBandCase c) {
  switch (c) {
    case ImageBandCase::NoImageBands:
      return 0;
    case ImageBandCase::SharedImageBand:
      return 1;
    case ImageBandCase::TwoImageBands:
      return 2;
  }
  return 2;
}

LoTone::LoTone(double amplitude, double phase) : amplitude_(amplitude), phase_(wrap_angle(phase)) {
  if (!std::isfinite(amplitude) || amplitude < 0.0) {
    throw InvariantError(fmt::format("LO amplitude must be finite and >= 0, got {}", amplitude));
  }
  if (!std::isfinite(phase)) {
    throw InvariantError("LO phase must be finite");
  }
}

// ---------------------------------------------------------------------------
// FrequencyPlan

FrequencyPlan::FrequencyPlan(double omega_minus, double delta, double delta1, double delta2,
                             bool bichromatic)
    : omega_minus_(omega_minus),
      delta_(delta),
      delta1_(delta1),
      delta2_(delta2),
      bichromatic_(bichromatic) {
  for (double v : {omega_minus, delta, delta1, delta2}) {
    if (!std::isfinite(v)) throw InvariantError("frequency plan entries must be finite");
  }
  if (!(omega_minus > 0.0)) {
    throw InvariantError(fmt::format("omega_minus must be positive, got {}", omega_minus));
  }
  if (!(delta > 0.0)) {
    throw InvariantError(fmt::format("omega_plus must exceed omega_minus (Delta = {})", delta));
  }
  if (bichromatic) {
    if (!(std::abs(delta1) < 0.5 * delta) || !(std::abs(delta2) < 0.5 * delta)) {
      throw InvariantError(fmt::format(
          "LO detunings must satisfy |Delta_i| < Delta/2 (Delta1 = {}, Delta2 = {}, Delta = {})",
          delta1, delta2, delta));
    }
    if (!(image_minus() > 0.0) || !(lo1() > 0.0)) {
      throw InvariantError("LO and image frequencies must be positive");
    }
  }
}

FrequencyPlan FrequencyPlan::standard(double omega_minus, double omega_plus) {
  return FrequencyPlan(omega_minus, omega_plus - omega_minus, 0.0, 0.0, false);
}

FrequencyPlan FrequencyPlan::bichromatic(double omega_minus, double delta, double delta1,
                                         double delta2) {
  return FrequencyPlan(omega_minus, delta, delta1, delta2, true);
}

void FrequencyPlan::require_bichromatic() const {
  if (!bichromatic_) throw InvariantError("frequency plan has a single LO tone");
}

double FrequencyPlan::delta1() const {
  require_bichromatic();
  return delta1_;
}
double FrequencyPlan::delta2() const {
  require_bichromatic();
  return delta2_;
}
double FrequencyPlan::lo1() const { return omega_minus_ + delta1(); }
double FrequencyPlan::lo2() const { return omega_plus() + delta2(); }
double FrequencyPlan::image_minus() const { return lo1() + delta1(); }
double FrequencyPlan::image_plus() const { return lo2() + delta2(); }

double FrequencyPlan::lo() const {
  if (bichromatic_) throw InvariantError("frequency plan has two LO tones");
  return omega_minus_ + 0.5 * delta_;
}

// ---------------------------------------------------------------------------
// Variances

VarianceReport make_report(double variance, double baseline, double own_baseline,
                           std::optional<ImageBandCase> image_case, double lo_quantization_ratio) {
  if (!(variance >= 0.0)) {
    throw InvariantError(fmt::format("negative difference-signal variance {}", variance));
  }
  VarianceReport r;
  r.variance = variance;
  r.baseline = baseline;
  r.relative_db = to_db(variance / baseline);
  r.own_baseline = own_baseline;
  r.own_relative_db = to_db(variance / own_baseline);
  r.image_case = image_case;
  r.lo_quantization_ratio = lo_quantization_ratio;
  return r;
}

namespace {

// e^{2s} cos^2(x) + e^{-2s} sin^2(x)
double quadrature_weight(double s, double x) {
  const double c = std::cos(x), sn = std::sin(x);
  return std::exp(2.0 * s) * c * c + std::exp(-2.0 * s) * sn * sn;
}

double quantization_ratio(const SqueezeParams& p, double beta_mag) {
  const double sh = std::sinh(p.s());
  return sh * sh / (beta_mag * beta_mag);
}

void require_positive_amplitude(double amplitude) {
  if (!(amplitude > 0.0)) {
    throw InvariantError(
        "LO amplitude must be positive: the strong-LO approximation needs a non-zero LO");
  }
}

// Mismatched-amplitude variance; the balanced case is the delta_beta = 0 point.
double unbalanced_core(double s, double beta_mag, double ratio, double phase_sum, double theta,
                       int images) {
  const double c = 0.5 * images;
  const double q = quadrature_weight(s, 0.5 * (phase_sum - theta));
  return 4.0 * beta_mag * beta_mag *
         ((1.0 + ratio) * (q + c) + 0.5 * ratio * ratio * (std::cosh(2.0 * s) + c));
}

}  // namespace

VarianceReport standard_heterodyne_variance(const SqueezeParams& p, const LoTone& lo) {
  require_positive_amplitude(lo.amplitude());
  const double b2 = lo.amplitude() * lo.amplitude();
  const double v = 2.0 * b2 * quadrature_weight(p.s(), lo.phase() - 0.5 * p.theta());
  return make_report(v, 2.0 * b2, 2.0 * b2, std::nullopt, quantization_ratio(p, lo.amplitude()));
}

double default_case_tolerance(const FrequencyPlan& fp) { return 1e-9 * fp.delta(); }

ImageBandCase classify_image_band_case(const FrequencyPlan& fp, double tol) {
  if (!(tol > 0.0)) throw InvariantError("classification tolerance must be positive");
  const double d1 = fp.delta1(), d2 = fp.delta2(), quarter = 0.25 * fp.delta();
  if (std::abs(d1) <= tol && std::abs(d2) <= tol) return ImageBandCase::NoImageBands;
  if (std::abs(d1 - quarter) <= tol && std::abs(d2 + quarter) <= tol) {
    return ImageBandCase::SharedImageBand;
  }
  return ImageBandCase::TwoImageBands;
}

ImageBandCase classify_image_band_case(const FrequencyPlan& fp) {
  return classify_image_band_case(fp, default_case_tolerance(fp));
}

double blo_variance_general(const SqueezeParams& p, const LoTone& lo1, const LoTone& lo2,
                            const FrequencyPlan& fp, double t) {
  require_positive_amplitude(lo1.amplitude());
  require_positive_amplitude(lo2.amplitude());
  const int images = vacuum_image_count(classify_image_band_case(fp));
  const double b1 = lo1.amplitude(), b2 = lo2.amplitude();
  const double sh = std::sinh(p.s()), ch = std::cosh(p.s());
  const double phase = lo1.phase() + lo2.phase() - p.theta() - (fp.delta1() + fp.delta2()) * t;
  return (b1 * b1 + b2 * b2) * (4.0 * sh * sh + 2.0 + images) +
         8.0 * b1 * b2 * sh * ch * std::cos(phase);
}

VarianceReport blo_variance_unbalanced(const SqueezeParams& p, double beta_mag,
                                       double delta_beta, double chi1, double chi2,
                                       ImageBandCase image_case) {
  require_positive_amplitude(beta_mag);
  if (!std::isfinite(delta_beta) || delta_beta <= -beta_mag) {
    throw InvariantError(fmt::format(
        "amplitude mismatch {} makes the second LO amplitude non-positive", delta_beta));
  }
  const double ratio = delta_beta / beta_mag;
  const int images = vacuum_image_count(image_case);
  const double phase_sum = wrap_angle(chi1) + wrap_angle(chi2);
  const double v = unbalanced_core(p.s(), beta_mag, ratio, phase_sum, p.theta(), images);
  const double own = unbalanced_core(0.0, beta_mag, ratio, phase_sum, p.theta(), images);
  return make_report(v, 8.0 * beta_mag * beta_mag, own, image_case,
                     quantization_ratio(p, beta_mag));
}

VarianceReport blo_variance(const SqueezeParams& p, const LoTone& lo1, const LoTone& lo2,
                            ImageBandCase image_case) {
  const double b1 = lo1.amplitude(), b2 = lo2.amplitude();
  if (std::abs(b1 - b2) > 1e-12 * std::max(b1, b2)) {
    throw InvariantError(fmt::format(
        "bichromatic LO amplitudes differ ({} vs {}); use blo_variance_unbalanced", b1, b2));
  }
  return blo_variance_unbalanced(p, b1, 0.0, lo1.phase(), lo2.phase(), image_case);
}

double lo_quantization_noise(const SqueezeParams& p, int tone_count) {
  const double sh = std::sinh(p.s());
  return tone_count * 2.0 * sh * sh;
}

double optimal_phase_sum(const SqueezeParams& p) {
  return wrap_angle(p.theta() + std::numbers::pi);
}

std::vector<ScanPoint> phase_scan(const SqueezeParams& p, const LoConfig& lo,
                                  ImageBandCase image_case, int n_points) {
  if (n_points < 2) throw InvariantError("a phase scan needs at least two points");
  std::vector<ScanPoint> out;
  out.reserve(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    const double phase = kTwoPi * k / n_points;
    if (lo.kind == LoConfig::Kind::Standard) {
      out.push_back({phase, standard_heterodyne_variance(p, LoTone(lo.amplitude, phase))});
    } else {
      out.push_back(
          {phase, blo_variance_unbalanced(p, lo.amplitude, lo.delta_beta, phase, 0.0, image_case)});
    }
  }
  return out;
}

}  // namespace blo

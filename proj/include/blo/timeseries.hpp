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

// Classical photocurrent records with a prescribed noise spectrum, and a
// Welch spectrum analyser to find where the squeezing feature ends up.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "blo/detection.hpp"

namespace blo {

enum class Profile { Lorentzian, FlatTop };

std::string_view to_string(Profile p);
std::optional<Profile> parse_profile(std::string_view name);

/// One-sided noise spectrum of the difference current:
///   S(f) = floor + (level - floor) g(f - center),
/// g(x) = 1 / (1 + (x/B)^2) (Lorentzian, B = HWHM) or [|x| <= B] (flat top).
struct SpectralModel {
  double center_frequency = 0.0;     // Hz
  double squeezing_bandwidth = 5e4;  // Hz
  double noise_floor = 1.0;
  double feature_level = 1.0;
  Profile profile = Profile::Lorentzian;

  void validate() const;
  double shape(double f) const;
  double psd(double f) const;
};

/// Feature at the beat note delta / 2pi, floor 2|b|^2.
SpectralModel standard_spectral_model(const SqueezeParams& p, const LoTone& lo,
                                      const FrequencyPlan& fp, double bandwidth_hz,
                                      Profile profile = Profile::Lorentzian);

/// Feature at |Delta1| / 2pi. The floor is the same configuration at s = 0.
/// Requires Delta1 = -Delta2, otherwise the variance is not stationary.
SpectralModel blo_spectral_model(const SqueezeParams& p, const LoTone& lo1, const LoTone& lo2,
                                 const FrequencyPlan& fp, double bandwidth_hz,
                                 Profile profile = Profile::Lorentzian);

inline constexpr std::size_t kMaxRecordLength = std::size_t{1} << 26;

struct PhotocurrentRecord {
  std::vector<double> samples;
  double sample_rate = 0.0;  // Hz
  std::uint64_t seed = 0;
  SpectralModel model;
};

/// Colours white Gaussian noise in the frequency domain. The record length
/// round(duration * sample_rate) must be a power of two.
PhotocurrentRecord synthesize_difference_current(const SpectralModel& model, double duration,
                                                 double sample_rate, std::uint64_t seed);

struct SpectrumEstimate {
  std::vector<double> frequencies;  // Hz
  std::vector<double> psd;          // variance per Hz, one-sided
  double resolution = 0.0;          // Hz
  int n_averages = 0;
};

/// Welch estimate: periodic Hann window, one-sided density normalisation
/// (DC and Nyquist bins are not doubled, so sum(psd) * resolution is the
/// mean-square of the record).
SpectrumEstimate estimate_psd(const PhotocurrentRecord& rec, int segment_length,
                              double overlap_fraction);

struct SqueezingFeature {
  double center;      // Hz
  double depth_db;    // negative for a dip
  double half_width;  // Hz, half maximum of the smoothed deviation
};

/// Median PSD level, DC and Nyquist bins excluded.
double estimate_floor(const SpectrumEstimate& spec);

/// Median PSD level outside +-16 half-widths of `feature`. Falls back to the
/// plain median when fewer than 64 bins remain.
double estimate_floor(const SpectrumEstimate& spec, const SqueezingFeature& feature);

/// nullopt when no smoothed bin leaves the floor by more than three
/// per-bin standard deviations (floor / sqrt(n_averages)).
std::optional<SqueezingFeature> locate_squeezing_feature(const SpectrumEstimate& spec,
                                                         double floor_estimate);

struct SpectrumAnalysis {
  double floor;
  std::optional<SqueezingFeature> feature;
};

/// Locates the feature against the plain median, then again against a floor
/// re-estimated away from the feature's tails.
SpectrumAnalysis analyze_spectrum(const SpectrumEstimate& spec);

inline constexpr std::string_view kFormatVersion = "blo-heterodyne/1";

/// CSV with '#' header lines (format version, then each of `header`), a
/// column row with units and 17-significant-digit values.
void write_spectrum_csv(std::ostream& os, const SpectrumEstimate& spec,
                        const std::vector<std::string>& header);
void write_record_csv(std::ostream& os, const PhotocurrentRecord& rec,
                      const std::vector<std::string>& header);

nlohmann::ordered_json to_json(const SpectralModel& m);
nlohmann::ordered_json to_json(const SpectrumEstimate& spec);

}  // namespace blo

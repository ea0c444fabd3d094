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

// Experiment configuration: a strict JSON document. Every key is optional
// and defaulted, unknown keys are rejected, and frequencies are in Hz.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "blo/detection.hpp"
#include "blo/timeseries.hpp"

namespace blo {

enum class LoKind { Standard, Bichromatic };
enum class SpectrumPhase { Optimal, Configured };
enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  // frequencies
  double signal_minus_hz = 2.8e14;
  double separation_hz = 2e7;
  std::array<double, 2> blo_detunings_hz{1e5, -1e5};

  // squeezing
  double s = 0.5;
  double theta = 0.0;

  // lo
  double lo_amplitude = 1.0;
  double lo_standard_phase = 0.0;
  std::array<double, 2> lo_phases{0.0, 0.0};
  double lo_delta_beta = 0.0;

  std::optional<ImageBandCase> image_case;  // nullopt: classify from detunings

  // scan
  LoKind scan_lo = LoKind::Bichromatic;
  int scan_points = 64;

  // imbalance
  std::vector<double> imbalance_ratios{0.01, 0.02, 0.05, 0.1};
  int imbalance_phase_points = 64;

  // spectrum
  LoKind spectrum_lo = LoKind::Bichromatic;
  SpectrumPhase spectrum_phase = SpectrumPhase::Optimal;
  double spectrum_bandwidth_hz = 5e4;
  Profile spectrum_profile = Profile::Lorentzian;
  double spectrum_sample_rate_hz = 8.192e6;
  std::int64_t spectrum_record_length = std::int64_t{1} << 19;
  int spectrum_segment_length = 2048;
  double spectrum_overlap = 0.0;

  // oracle
  double oracle_amplitude_cap = 20.0;
  int oracle_phase_points = 4;
  double oracle_tolerance = 0.01;
  double oracle_tmss_leakage = 1e-12;

  // output
  std::string output_path;  // empty: stdout
  OutputFormat output_format = OutputFormat::Csv;

  std::uint64_t seed = 1;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  SqueezeParams squeeze() const { return SqueezeParams(s, theta); }
  /// Single LO at the midpoint of the signal modes.
  FrequencyPlan standard_plan() const;
  FrequencyPlan blo_plan() const;
  /// Override if given, else the case implied by the detunings.
  ImageBandCase resolved_image_case() const;

  /// Re-runs every invariant check; throws ConfigError naming the field.
  void validate() const;
};

/// Parses and validates. Syntax errors report line and column, schema errors
/// the JSON pointer of the offending field.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Fully resolved configuration, every key present.
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

std::string_view to_string(LoKind k);
std::string_view to_string(SpectrumPhase p);
std::string_view to_string(OutputFormat f);

}  // namespace blo

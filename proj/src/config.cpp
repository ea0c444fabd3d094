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

#include "blo/config.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>

#include <fmt/format.h>

namespace blo {

using json = nlohmann::json;

std::string_view to_string(LoKind k) { return k == LoKind::Standard ? "standard" : "bichromatic"; }
std::string_view to_string(SpectrumPhase p) {
  return p == SpectrumPhase::Optimal ? "optimal" : "configured";
}
std::string_view to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

FrequencyPlan ExperimentConfig::standard_plan() const {
  return FrequencyPlan::standard(kTwoPi * signal_minus_hz,
                                 kTwoPi * signal_minus_hz + kTwoPi * separation_hz);
}

FrequencyPlan ExperimentConfig::blo_plan() const {
  return FrequencyPlan::bichromatic(kTwoPi * signal_minus_hz, kTwoPi * separation_hz,
                                    kTwoPi * blo_detunings_hz[0], kTwoPi * blo_detunings_hz[1]);
}

ImageBandCase ExperimentConfig::resolved_image_case() const {
  return image_case ? *image_case : classify_image_band_case(blo_plan());
}

namespace {

// Walks the document, tracking the JSON pointer of the current node.
class Reader {
 public:
  Reader(const json& node, std::string pointer) : node_(node), pointer_(std::move(pointer)) {}

  [[noreturn]] void fail(std::string_view what) const {
    throw ConfigError(fmt::format("{}: {}", pointer_.empty() ? "/" : pointer_, what));
  }

  Reader object(std::initializer_list<std::string_view> allowed) const {
    if (!node_.is_object()) fail("expected an object");
    for (const auto& [key, _] : node_.items()) {
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) {
        throw ConfigError(fmt::format("{}/{}: unknown key", pointer_, key));
      }
    }
    return *this;
  }

  bool has(std::string_view key) const { return node_.contains(std::string(key)); }
  Reader at(std::string_view key) const {
    return Reader(node_.at(std::string(key)), fmt::format("{}/{}", pointer_, key));
  }

  void read(std::string_view key, double& out) const {
    if (has(key)) out = at(key).number();
  }
  void read(std::string_view key, int& out) const {
    if (has(key)) out = static_cast<int>(at(key).integer(std::numeric_limits<int>::min(),
                                                         std::numeric_limits<int>::max()));
  }
  void read(std::string_view key, std::int64_t& out) const {
    if (has(key)) out = at(key).integer(std::numeric_limits<std::int64_t>::min(),
                                        std::numeric_limits<std::int64_t>::max());
  }
  void read(std::string_view key, std::string& out) const {
    if (has(key)) out = at(key).string();
  }
  void read(std::string_view key, std::array<double, 2>& out) const {
    if (!has(key)) return;
    const Reader r = at(key);
    if (!r.node_.is_array() || r.node_.size() != 2) r.fail("expected an array of two numbers");
    for (std::size_t i = 0; i < 2; ++i) out[i] = r.element(i).number();
  }
  void read(std::string_view key, std::vector<double>& out) const {
    if (!has(key)) return;
    const Reader r = at(key);
    if (!r.node_.is_array()) r.fail("expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < r.node_.size(); ++i) out.push_back(r.element(i).number());
  }
  template <typename Enum>
  void read_enum(std::string_view key, Enum& out,
                 const std::function<std::optional<Enum>(std::string_view)>& parse,
                 std::string_view choices) const {
    if (!has(key)) return;
    const Reader r = at(key);
    const auto v = parse(r.string());
    if (!v) r.fail(fmt::format("expected one of {}", choices));
    out = *v;
  }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    const double v = node_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) const {
    if (!node_.is_number_integer()) fail("expected an integer");
    if (node_.is_number_unsigned() &&
        node_.get<std::uint64_t>() > static_cast<std::uint64_t>(hi)) {
      fail("integer out of range");
    }
    const auto v = node_.get<std::int64_t>();
    if (v < lo || v > hi) fail("integer out of range");
    return v;
  }
  std::uint64_t unsigned_integer() const {
    if (!node_.is_number_unsigned()) fail("expected a non-negative integer");
    return node_.get<std::uint64_t>();
  }
  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }
  Reader element(std::size_t i) const {
    return Reader(node_.at(i), fmt::format("{}/{}", pointer_, i));
  }

 private:
  const json& node_;
  std::string pointer_;
};

std::optional<LoKind> parse_lo_kind(std::string_view s) {
  if (s == "standard") return LoKind::Standard;
  if (s == "bichromatic") return LoKind::Bichromatic;
  return std::nullopt;
}

std::optional<SpectrumPhase> parse_spectrum_phase(std::string_view s) {
  if (s == "optimal") return SpectrumPhase::Optimal;
  if (s == "configured") return SpectrumPhase::Configured;
  return std::nullopt;
}

std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  return std::nullopt;
}

void require(bool ok, std::string_view field, std::string_view what) {
  if (!ok) throw ConfigError(fmt::format("{}: {}", field, what));
}

// Re-raises a physics-invariant violation with the config field it came from.
template <typename F>
void check_invariant(std::string_view field, F&& f) {
  try {
    f();
  } catch (const InvariantError& e) {
    throw InvariantError(fmt::format("{}: {}", field, e.what()));
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  require(signal_minus_hz > 0.0, "/frequencies/signal_minus_hz", "must be positive");
  require(separation_hz > 0.0, "/frequencies/separation_hz", "must be positive");
  check_invariant("/frequencies", [&] {
    standard_plan();
    blo_plan();
  });
  check_invariant("/squeezing", [&] { squeeze(); });
  check_invariant("/lo", [&] {
    LoTone(lo_amplitude, lo_standard_phase);
    LoTone(lo_amplitude, lo_phases[0]);
    LoTone(lo_amplitude + lo_delta_beta, lo_phases[1]);
  });
  require(lo_amplitude > 0.0, "/lo/amplitude", "must be positive (strong-LO formulas)");
  require(lo_delta_beta > -lo_amplitude, "/lo/delta_beta",
          "must exceed -amplitude (second LO amplitude would be non-positive)");
  require(scan_points >= 2, "/scan/points", "must be at least 2");
  require(!imbalance_ratios.empty(), "/imbalance/ratios", "must not be empty");
  for (std::size_t i = 0; i < imbalance_ratios.size(); ++i) {
    require(imbalance_ratios[i] > -1.0, fmt::format("/imbalance/ratios/{}", i),
            "must exceed -1");
  }
  require(imbalance_phase_points >= 2, "/imbalance/phase_points", "must be at least 2");

  require(spectrum_bandwidth_hz > 0.0, "/spectrum/bandwidth_hz", "must be positive");
  require(spectrum_sample_rate_hz > 0.0, "/spectrum/sample_rate_hz", "must be positive");
  require(spectrum_record_length >= 2 &&
              static_cast<std::uint64_t>(spectrum_record_length) <= kMaxRecordLength &&
              std::has_single_bit(static_cast<std::uint64_t>(spectrum_record_length)),
          "/spectrum/record_length", fmt::format("must be a power of two <= {}", kMaxRecordLength));
  require(spectrum_segment_length >= 2 &&
              std::has_single_bit(static_cast<unsigned>(spectrum_segment_length)) &&
              spectrum_segment_length <= spectrum_record_length,
          "/spectrum/segment_length", "must be a power of two <= record_length");
  require(spectrum_overlap >= 0.0 && spectrum_overlap <= 0.9, "/spectrum/overlap",
          "must lie in [0, 0.9]");
  check_invariant("/spectrum", [&] {
    const double center = spectrum_lo == LoKind::Standard ? 0.5 * separation_hz
                                                          : std::abs(blo_detunings_hz[0]);
    const double needed = 2.0 * (center + 5.0 * spectrum_bandwidth_hz);
    if (!(spectrum_sample_rate_hz > needed)) {
      throw InvariantError(fmt::format(
          "sample_rate_hz {} aliases the feature; it must exceed 2 (center + 5 B) = {}",
          spectrum_sample_rate_hz, needed));
    }
    if (spectrum_lo == LoKind::Bichromatic && blo_detunings_hz[0] + blo_detunings_hz[1] != 0.0) {
      throw InvariantError("a bichromatic spectrum needs Delta1 = -Delta2 (stationary variance)");
    }
  });

  require(oracle_amplitude_cap > 0.0 && oracle_amplitude_cap <= 40.0, "/oracle/amplitude_cap",
          "must lie in (0, 40]");
  require(oracle_phase_points >= 1, "/oracle/phase_points", "must be at least 1");
  require(oracle_tolerance > 0.0, "/oracle/tolerance", "must be positive");
  require(oracle_tmss_leakage > 0.0 && oracle_tmss_leakage <= 1e-6, "/oracle/tmss_leakage",
          "must lie in (0, 1e-6]");
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(fmt::format("{}:{}:{}: JSON syntax error: {}", source, line, column,
                                  e.what()));
  }

  ExperimentConfig cfg;
  const Reader root = Reader(doc, "").object({"frequencies", "squeezing", "lo", "image_case",
                                              "scan", "imbalance", "spectrum", "oracle",
                                              "output", "seed"});
  if (root.has("frequencies")) {
    const Reader r =
        root.at("frequencies").object({"signal_minus_hz", "separation_hz", "blo_detunings_hz"});
    r.read("signal_minus_hz", cfg.signal_minus_hz);
    r.read("separation_hz", cfg.separation_hz);
    r.read("blo_detunings_hz", cfg.blo_detunings_hz);
  }
  if (root.has("squeezing")) {
    const Reader r = root.at("squeezing").object({"s", "theta"});
    r.read("s", cfg.s);
    r.read("theta", cfg.theta);
  }
  if (root.has("lo")) {
    const Reader r =
        root.at("lo").object({"amplitude", "standard_phase", "phases", "delta_beta"});
    r.read("amplitude", cfg.lo_amplitude);
    r.read("standard_phase", cfg.lo_standard_phase);
    r.read("phases", cfg.lo_phases);
    r.read("delta_beta", cfg.lo_delta_beta);
  }
  if (root.has("image_case")) {
    const Reader r = root.at("image_case");
    const std::string name = r.string();
    if (name == "auto") {
      cfg.image_case.reset();
    } else if (auto c = parse_image_band_case(name)) {
      cfg.image_case = *c;
    } else {
      r.fail("expected auto, NoImageBands, SharedImageBand or TwoImageBands");
    }
  }
  if (root.has("scan")) {
    const Reader r = root.at("scan").object({"lo", "points"});
    r.read_enum<LoKind>("lo", cfg.scan_lo, parse_lo_kind, "standard, bichromatic");
    r.read("points", cfg.scan_points);
  }
  if (root.has("imbalance")) {
    const Reader r = root.at("imbalance").object({"ratios", "phase_points"});
    r.read("ratios", cfg.imbalance_ratios);
    r.read("phase_points", cfg.imbalance_phase_points);
  }
  if (root.has("spectrum")) {
    const Reader r = root.at("spectrum").object({"lo", "phase", "bandwidth_hz", "profile",
                                                 "sample_rate_hz", "record_length",
                                                 "segment_length", "overlap"});
    r.read_enum<LoKind>("lo", cfg.spectrum_lo, parse_lo_kind, "standard, bichromatic");
    r.read_enum<SpectrumPhase>("phase", cfg.spectrum_phase, parse_spectrum_phase,
                               "optimal, configured");
    r.read("bandwidth_hz", cfg.spectrum_bandwidth_hz);
    r.read_enum<Profile>("profile", cfg.spectrum_profile, parse_profile, "lorentzian, flat_top");
    r.read("sample_rate_hz", cfg.spectrum_sample_rate_hz);
    r.read("record_length", cfg.spectrum_record_length);
    r.read("segment_length", cfg.spectrum_segment_length);
    r.read("overlap", cfg.spectrum_overlap);
  }
  if (root.has("oracle")) {
    const Reader r =
        root.at("oracle").object({"amplitude_cap", "phase_points", "tolerance", "tmss_leakage"});
    r.read("amplitude_cap", cfg.oracle_amplitude_cap);
    r.read("phase_points", cfg.oracle_phase_points);
    r.read("tolerance", cfg.oracle_tolerance);
    r.read("tmss_leakage", cfg.oracle_tmss_leakage);
  }
  if (root.has("output")) {
    const Reader r = root.at("output").object({"path", "format"});
    r.read("path", cfg.output_path);
    r.read_enum<OutputFormat>("format", cfg.output_format, parse_output_format, "csv, json");
  }
  if (root.has("seed")) cfg.seed = root.at("seed").unsigned_integer();

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["frequencies"] = oj{{"signal_minus_hz", c.signal_minus_hz},
                        {"separation_hz", c.separation_hz},
                        {"blo_detunings_hz", c.blo_detunings_hz}};
  j["squeezing"] = oj{{"s", c.s}, {"theta", c.theta}};
  j["lo"] = oj{{"amplitude", c.lo_amplitude},
               {"standard_phase", c.lo_standard_phase},
               {"phases", c.lo_phases},
               {"delta_beta", c.lo_delta_beta}};
  j["image_case"] = c.image_case ? std::string(to_string(*c.image_case)) : "auto";
  j["scan"] = oj{{"lo", std::string(to_string(c.scan_lo))}, {"points", c.scan_points}};
  j["imbalance"] =
      oj{{"ratios", c.imbalance_ratios}, {"phase_points", c.imbalance_phase_points}};
  j["spectrum"] = oj{{"lo", std::string(to_string(c.spectrum_lo))},
                     {"phase", std::string(to_string(c.spectrum_phase))},
                     {"bandwidth_hz", c.spectrum_bandwidth_hz},
                     {"profile", std::string(to_string(c.spectrum_profile))},
                     {"sample_rate_hz", c.spectrum_sample_rate_hz},
                     {"record_length", c.spectrum_record_length},
                     {"segment_length", c.spectrum_segment_length},
                     {"overlap", c.spectrum_overlap}};
  j["oracle"] = oj{{"amplitude_cap", c.oracle_amplitude_cap},
                   {"phase_points", c.oracle_phase_points},
                   {"tolerance", c.oracle_tolerance},
                   {"tmss_leakage", c.oracle_tmss_leakage}};
  j["output"] = oj{{"path", c.output_path}, {"format", std::string(to_string(c.output_format))}};
  j["seed"] = c.seed;
  return j;
}

}  // namespace blo

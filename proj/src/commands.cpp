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

#include "blo/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "blo/fock.hpp"

namespace blo {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string case_name(std::optional<ImageBandCase> c) {
  return c ? std::string(to_string(*c)) : "none";
}

std::vector<Cell> report_cells(std::string lo, const VarianceReport& r) {
  return {std::move(lo),  case_name(r.image_case), r.variance,         r.baseline,
          r.relative_db,  r.own_baseline,          r.own_relative_db,  r.lo_quantization_ratio};
}

const std::vector<std::string> kReportColumns = {
    "lo",          "image_case", "variance_e0sq",  "declared_baseline_e0sq", "declared_db",
    "own_baseline_e0sq", "own_db", "lo_quantization_ratio"};

// Phase of a monochromatic LO that selects the squeezed quadrature.
double squeezed_standard_phase(const SqueezeParams& p) {
  return wrap_angle(0.5 * p.theta() + 0.5 * std::numbers::pi);
}

FrequencyPlan plan_for_case(const ExperimentConfig& cfg, ImageBandCase c) {
  const double fm = kTwoPi * cfg.signal_minus_hz, d = kTwoPi * cfg.separation_hz;
  switch (c) {
    case ImageBandCase::NoImageBands:
      return FrequencyPlan::bichromatic(fm, d, 0.0, 0.0);
    case ImageBandCase::SharedImageBand:
      return FrequencyPlan::bichromatic(fm, d, 0.25 * d, -0.25 * d);
    case ImageBandCase::TwoImageBands:
      break;
  }
  const FrequencyPlan configured = cfg.blo_plan();
  if (classify_image_band_case(configured) == ImageBandCase::TwoImageBands &&
      configured.delta1() + configured.delta2() == 0.0) {
    return configured;
  }
  return FrequencyPlan::bichromatic(fm, d, 0.125 * d, -0.125 * d);
}

}  // namespace

Table run_variance(const ExperimentConfig& cfg) {
  const SqueezeParams p = cfg.squeeze();
  Table t{"variance", kReportColumns, {}, {}, {}};
  t.rows.push_back(report_cells(
      "standard", standard_heterodyne_variance(p, LoTone(cfg.lo_amplitude, cfg.lo_standard_phase))));
  t.rows.push_back(report_cells(
      "bichromatic", blo_variance_unbalanced(p, cfg.lo_amplitude, cfg.lo_delta_beta,
                                             cfg.lo_phases[0], cfg.lo_phases[1],
                                             cfg.resolved_image_case())));
  const FrequencyPlan fp = cfg.blo_plan();
  t.meta.emplace_back("image_case_source", cfg.image_case ? "override" : "auto");
  t.meta.emplace_back("detuning_sum_hz", num(cfg.blo_detunings_hz[0] + cfg.blo_detunings_hz[1]));
  t.meta.emplace_back("time_independent",
                      fp.delta1() + fp.delta2() == 0.0 || p.s() == 0.0 ? "true" : "false");
  t.meta.emplace_back("declared_baseline", "standard: 2|b|^2; bichromatic: 8|b|^2");
  return t;
}

Table run_scan(const ExperimentConfig& cfg) {
  const SqueezeParams p = cfg.squeeze();
  LoConfig lo;
  lo.kind = cfg.scan_lo == LoKind::Standard ? LoConfig::Kind::Standard : LoConfig::Kind::Bichromatic;
  lo.amplitude = cfg.lo_amplitude;
  lo.delta_beta = cfg.lo_delta_beta;
  Table t{"scan", {"phase_rad", "variance_e0sq", "declared_db", "own_db"}, {}, {}, {}};
  for (const auto& pt : phase_scan(p, lo, cfg.resolved_image_case(), cfg.scan_points)) {
    t.rows.push_back({pt.phase, pt.report.variance, pt.report.relative_db,
                      pt.report.own_relative_db});
  }
  t.meta.emplace_back("lo", std::string(to_string(cfg.scan_lo)));
  t.meta.emplace_back("phase", cfg.scan_lo == LoKind::Standard ? "chi" : "chi1 + chi2 (chi2 = 0)");
  if (cfg.scan_lo == LoKind::Bichromatic) {
    t.meta.emplace_back("image_case", std::string(to_string(cfg.resolved_image_case())));
  }
  return t;
}

Table run_cases(const ExperimentConfig& cfg) {
  const SqueezeParams p = cfg.squeeze();
  Table t{"cases",
          {"image_case", "floor_e0sq", "declared_baseline_e0sq", "declared_db", "own_baseline_e0sq",
           "own_db", "lo_quantization_ratio"},
          {},
          {},
          {}};
  for (auto c : {ImageBandCase::NoImageBands, ImageBandCase::SharedImageBand,
                 ImageBandCase::TwoImageBands}) {
    const VarianceReport r = blo_variance_unbalanced(p, cfg.lo_amplitude, 0.0,
                                                     optimal_phase_sum(p), 0.0, c);
    t.rows.push_back({std::string(to_string(c)), r.variance, r.baseline, r.relative_db,
                      r.own_baseline, r.own_relative_db, r.lo_quantization_ratio});
  }
  t.meta.emplace_back("phase_sum_rad", num(optimal_phase_sum(p)));
  t.meta.emplace_back("declared_baseline", "8|b|^2 (TwoImageBands at s = 0)");
  t.meta.emplace_back("own_baseline", "same case at s = 0");
  return t;
}

Table run_imbalance(const ExperimentConfig& cfg) {
  const SqueezeParams p = cfg.squeeze();
  const ImageBandCase c = cfg.resolved_image_case();
  const double b = cfg.lo_amplitude;
  const double cc = 0.5 * vacuum_image_count(c);
  Table t{"imbalance",
          {"delta_beta_ratio", "excess_mean_e0sq", "excess_spread_rel", "excess_over_ratio_sq",
           "predicted_excess_e0sq"},
          {},
          {},
          {}};
  for (double r : cfg.imbalance_ratios) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (int k = 0; k < cfg.imbalance_phase_points; ++k) {
      const double phase = kTwoPi * k / cfg.imbalance_phase_points;
      const double v = blo_variance_unbalanced(p, b, r * b, phase, 0.0, c).variance;
      const double v0 = blo_variance_unbalanced(p, b, 0.0, phase, 0.0, c).variance;
      const double excess = v - (1.0 + r) * v0;
      lo = std::min(lo, excess);
      hi = std::max(hi, excess);
      sum += excess;
    }
    const double mean = sum / cfg.imbalance_phase_points;
    const double scale = std::max(std::abs(mean), std::numeric_limits<double>::min());
    t.rows.push_back({r, mean, (hi - lo) / scale, r == 0.0 ? 0.0 : mean / (r * r),
                      2.0 * b * b * r * r * (std::cosh(2.0 * p.s()) + cc)});
  }
  t.meta.emplace_back("image_case", std::string(to_string(c)));
  t.meta.emplace_back("excess", "Var(delta_beta) - (1 + delta_beta/|b|) Var(0)");
  return t;
}

Table run_spectrum(const ExperimentConfig& cfg) {
  const SqueezeParams p = cfg.squeeze();
  const bool optimal = cfg.spectrum_phase == SpectrumPhase::Optimal;
  SpectralModel model;
  if (cfg.spectrum_lo == LoKind::Standard) {
    const double chi = optimal ? squeezed_standard_phase(p) : cfg.lo_standard_phase;
    model = standard_spectral_model(p, LoTone(cfg.lo_amplitude, chi), cfg.standard_plan(),
                                    cfg.spectrum_bandwidth_hz, cfg.spectrum_profile);
  } else {
    const double chi1 = optimal ? optimal_phase_sum(p) : cfg.lo_phases[0];
    const double chi2 = optimal ? 0.0 : cfg.lo_phases[1];
    model = blo_spectral_model(p, LoTone(cfg.lo_amplitude, chi1), LoTone(cfg.lo_amplitude, chi2),
                               cfg.blo_plan(), cfg.spectrum_bandwidth_hz, cfg.spectrum_profile);
  }
  const double duration =
      static_cast<double>(cfg.spectrum_record_length) / cfg.spectrum_sample_rate_hz;
  const PhotocurrentRecord rec =
      synthesize_difference_current(model, duration, cfg.spectrum_sample_rate_hz, cfg.seed);
  const SpectrumEstimate spec =
      estimate_psd(rec, cfg.spectrum_segment_length, cfg.spectrum_overlap);
  const SpectrumAnalysis analysis = analyze_spectrum(spec);
  const double floor = analysis.floor;
  const auto& feature = analysis.feature;

  Table t{"spectrum", {"frequency_hz", "psd_per_hz", "model_psd_per_hz"}, {}, {}, {}};
  for (std::size_t k = 0; k < spec.psd.size(); ++k) {
    t.rows.push_back({spec.frequencies[k], spec.psd[k], model.psd(spec.frequencies[k])});
  }
  t.meta.emplace_back("lo", std::string(to_string(cfg.spectrum_lo)));
  t.meta.emplace_back("model_center_hz", num(model.center_frequency));
  t.meta.emplace_back("model_floor", num(model.noise_floor));
  t.meta.emplace_back("model_level", num(model.feature_level));
  t.meta.emplace_back("predicted_depth_db", num(to_db(model.feature_level / model.noise_floor)));
  t.meta.emplace_back("resolution_hz", num(spec.resolution));
  t.meta.emplace_back("n_averages", fmt::format("{}", spec.n_averages));
  t.meta.emplace_back("floor_estimate", num(floor));
  if (feature) {
    t.meta.emplace_back("feature_center_hz", num(feature->center));
    t.meta.emplace_back("feature_depth_db", num(feature->depth_db));
  } else {
    t.meta.emplace_back("feature", "none");
  }
  t.extra["model"] = to_json(model);
  return t;
}

Table run_verify(const ExperimentConfig& cfg) {
  const SqueezeParams p = cfg.squeeze();
  const double b = std::min(cfg.lo_amplitude, cfg.oracle_amplitude_cap);
  Table t{"verify",
          {"lo", "image_case", "phase_rad", "oracle_e0sq", "analytic_e0sq",
           "lo_quantization_e0sq", "rel_error", "strong_lo_rel_error"},
          {},
          {},
          {}};
  double worst = 0.0;
  auto add = [&](std::string lo, std::string c, double phase, double oracle, double analytic,
                 double quant) {
    const double rel = std::abs(oracle - (analytic + quant)) / (analytic + quant);
    worst = std::max(worst, rel);
    t.rows.push_back({std::move(lo), std::move(c), phase, oracle, analytic, quant, rel,
                      std::abs(oracle - analytic) / analytic});
  };

  const int n = cfg.oracle_phase_points;
  const FrequencyPlan standard = cfg.standard_plan();
  for (int k = 0; k < n; ++k) {
    const double chi = wrap_angle(squeezed_standard_phase(p) + std::numbers::pi * k / n);
    const LoTone lo(b, chi);
    const auto setup = fock::standard_setup(p, lo, standard, cfg.oracle_tmss_leakage);
    const double v = fock::oracle_difference_variance(setup.signal, setup.lo, setup.map, standard)
                         .variance;
    add("standard", "none", chi, v, standard_heterodyne_variance(p, lo).variance,
        lo_quantization_noise(p, 1));
  }
  const double b2 = b + cfg.lo_delta_beta * (b / cfg.lo_amplitude);
  for (auto c : {ImageBandCase::NoImageBands, ImageBandCase::SharedImageBand,
                 ImageBandCase::TwoImageBands}) {
    const FrequencyPlan fp = plan_for_case(cfg, c);
    for (int k = 0; k < n; ++k) {
      const double chi1 = wrap_angle(optimal_phase_sum(p) + kTwoPi * k / n);
      const auto setup = fock::bichromatic_setup(p, LoTone(b, chi1), LoTone(b2, 0.0), fp,
                                                 cfg.oracle_tmss_leakage);
      const double v =
          fock::oracle_difference_variance(setup.signal, setup.lo, setup.map, fp).variance;
      add("bichromatic", std::string(to_string(c)), chi1, v,
          blo_variance_unbalanced(p, b, b2 - b, chi1, 0.0, c).variance,
          lo_quantization_noise(p, 2));
    }
  }
  t.meta.emplace_back("lo_amplitude", num(b));
  if (b < cfg.lo_amplitude) t.meta.emplace_back("amplitude_capped_from", num(cfg.lo_amplitude));
  t.meta.emplace_back("reference", "analytic + LO-quantization term");
  t.meta.emplace_back("max_rel_error", num(worst));
  t.meta.emplace_back("tolerance", num(cfg.oracle_tolerance));
  const bool ok = worst <= cfg.oracle_tolerance;
  t.meta.emplace_back("status", ok ? "PASS" : "FAIL");
  if (!ok) t.exit_code = kExitOracle;
  return t;
}

const std::vector<std::string_view>& command_names() {
  static const std::vector<std::string_view> names = {"variance",  "scan",     "cases",
                                                      "imbalance", "spectrum", "verify"};
  return names;
}

Table run_command(std::string_view name, const ExperimentConfig& cfg) {
  if (name == "variance") return run_variance(cfg);
  if (name == "scan") return run_scan(cfg);
  if (name == "cases") return run_cases(cfg);
  if (name == "imbalance") return run_imbalance(cfg);
  if (name == "spectrum") return run_spectrum(cfg);
  if (name == "verify") return run_verify(cfg);
  throw ConfigError(fmt::format("unknown command '{}'", name));
}

namespace {

struct CsvCell {
  std::string operator()(const std::string& s) const { return s; }
  std::string operator()(double v) const { return num(v); }
  std::string operator()(std::int64_t v) const { return fmt::format("{}", v); }
};

nlohmann::ordered_json json_cell(const Cell& c) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, c);
}

}  // namespace

void write_table(std::ostream& os, const Table& t, const ExperimentConfig& cfg) {
  if (cfg.output_format == OutputFormat::Json) {
    nlohmann::ordered_json j;
    j["format"] = std::string(kFormatVersion);
    j["command"] = t.command;
    j["config"] = to_json(cfg);
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.meta) meta[k] = v;
    j["meta"] = meta;
    j["columns"] = t.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json r = nlohmann::ordered_json::array();
      for (const auto& c : row) r.push_back(json_cell(c));
      rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    if (!t.extra.is_null()) {
      for (const auto& [k, v] : t.extra.items()) j[k] = v;
    }
    os << j.dump(2) << '\n';
    return;
  }
  os << "# format: " << kFormatVersion << '\n';
  os << "# command: " << t.command << '\n';
  os << "# config: " << to_json(cfg).dump() << '\n';
  for (const auto& [k, v] : t.meta) os << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << std::visit(CsvCell{}, row[i]);
    }
    os << '\n';
  }
}

int run_cli(std::string_view command, const std::string& config_path,
            const std::string& output_override, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (config_path.empty()) cfg.validate();
    if (!output_override.empty()) cfg.output_path = output_override;
    const Table t = run_command(command, cfg);
    if (cfg.output_path.empty() || cfg.output_path == "-") {
      write_table(out, t, cfg);
    } else {
      std::ofstream file(cfg.output_path, std::ios::binary);
      if (!file) throw ConfigError(fmt::format("cannot write '{}'", cfg.output_path));
      write_table(file, t, cfg);
    }
    if (t.exit_code == kExitOracle) {
      err << "oracle disagreement: max relative error exceeds the configured tolerance\n";
    }
    return t.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const OracleDisagreement& e) {
    err << "oracle disagreement: " << e.what() << '\n';
    return kExitOracle;
  }
}

}  // namespace blo

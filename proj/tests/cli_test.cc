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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "blo/commands.hpp"
#include "blo/config.hpp"
#include "blo/errors.hpp"

using namespace blo;

namespace {

class TempConfig {
 public:
  explicit TempConfig(const std::string& text) {
    path_ = (std::filesystem::temp_directory_path() /
             ("blo_test_" + std::to_string(counter_++) + "_" +
              std::to_string(reinterpret_cast<std::uintptr_t>(this)) + ".json"))
                .string();
    std::ofstream(path_) << text;
  }
  ~TempConfig() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::string path_;
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::string_view command, const std::string& config_text) {
  TempConfig cfg(config_text);
  std::ostringstream out, err;
  const int code = run_cli(command, cfg.path(), "", out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST(Config, defaults_are_valid) {
  EXPECT_NO_THROW(ExperimentConfig{}.validate());
  EXPECT_EQ(parse_config("{}"), ExperimentConfig{});
}

TEST(Config, round_trip) {
  ExperimentConfig c;
  c.s = 0.8125;
  c.theta = 1.25;
  c.lo_phases = {0.1, 2.9};
  c.image_case = ImageBandCase::SharedImageBand;
  c.imbalance_ratios = {0.03, 0.3};
  c.spectrum_profile = Profile::FlatTop;
  c.output_format = OutputFormat::Json;
  c.seed = 123456789012345ULL;
  EXPECT_EQ(parse_config(to_json(c).dump()), c);
  EXPECT_EQ(parse_config(to_json(ExperimentConfig{}).dump(2)), ExperimentConfig{});
}

TEST(Config, unknown_key_is_rejected) {
  try {
    parse_config(R"({"squeezing": {"s": 1, "bogus": 2}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/squeezing/bogus"), std::string::npos);
  }
}

TEST(Config, syntax_error_reports_position) {
  try {
    parse_config("{\n  \"seed\": ,\n}", "cfg.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("cfg.json:2:", 0), 0u) << e.what();
  }
}

TEST(Config, type_and_physics_errors) {
  EXPECT_THROW(parse_config(R"({"squeezing": {"s": "big"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"squeezing": {"s": -1}})"), InvariantError);
  EXPECT_THROW(parse_config(R"({"frequencies": {"blo_detunings_hz": [1e7, 0]}})"), InvariantError);
  EXPECT_THROW(parse_config(R"({"image_case": "FourBands"})"), ConfigError);
}

TEST(Config, image_case_resolution) {
  EXPECT_EQ(parse_config("{}").resolved_image_case(), ImageBandCase::TwoImageBands);
  EXPECT_EQ(parse_config(R"({"frequencies": {"blo_detunings_hz": [5e6, -5e6]},
                             "spectrum": {"sample_rate_hz": 16.384e6}})").resolved_image_case(),
            ImageBandCase::SharedImageBand);
  EXPECT_EQ(parse_config(R"({"image_case": "NoImageBands"})").resolved_image_case(),
            ImageBandCase::NoImageBands);
}

TEST(Cli, cases_table) {
  const auto r = run("cases", R"({"squeezing": {"s": 10}, "lo": {"amplitude": 1}})");
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[2].rfind("SharedImageBand,2.0000000082446143,8,-6.02", 0), 0u) << lines[2];
}

TEST(Cli, scan_without_squeezing_is_flat) {
  const auto r = run("scan", R"({"squeezing": {"s": 0}, "scan": {"points": 16}})");
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 17u);
  auto tail = [](const std::string& l) { return l.substr(l.find(',')); };
  for (std::size_t i = 2; i < lines.size(); ++i) EXPECT_EQ(tail(lines[i]), tail(lines[1]));
}

TEST(Cli, output_is_byte_identical) {
  const std::string cfg = R"({"spectrum": {"record_length": 65536, "segment_length": 512}, "seed": 42})";
  for (const auto& command : command_names()) {
    const auto a = run(command, cfg);
    const auto b = run(command, cfg);
    EXPECT_EQ(a.code, b.code) << command;
    EXPECT_EQ(a.out, b.out) << command;
  }
}

TEST(Cli, header_echo_reparses) {
  const std::string cfg = R"({"squeezing": {"s": 0.25, "theta": 0.5}, "seed": 9})";
  const auto r = run("variance", cfg);
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.rfind("# format: blo-heterodyne/1\n", 0), 0u);
  const auto pos = r.out.find("# config: ");
  ASSERT_NE(pos, std::string::npos);
  const auto end = r.out.find('\n', pos);
  const std::string echoed = r.out.substr(pos + 10, end - pos - 10);
  EXPECT_EQ(parse_config(echoed), parse_config(cfg));
}

TEST(Cli, json_output_parses) {
  const auto r = run("imbalance", R"({"output": {"format": "json"}})");
  ASSERT_EQ(r.code, kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["format"], "blo-heterodyne/1");
  EXPECT_EQ(j["rows"].size(), 4u);
}

TEST(Cli, exit_codes) {
  EXPECT_EQ(run("variance", R"({"squeezing": {"bogus": 1}})").code, kExitConfig);
  EXPECT_EQ(run("variance", "{ nope").code, kExitConfig);
  EXPECT_EQ(run("variance", R"({"squeezing": {"s": -1}})").code, kExitInvariant);
  std::ostringstream out, err;
  EXPECT_EQ(run_cli("variance", "/nonexistent/blo.json", "", out, err), kExitConfig);
  EXPECT_EQ(run_cli("frobnicate", "", "", out, err), kExitConfig);
}

TEST(Cli, verify_within_tolerance) {
  const auto r = run("verify", R"({"squeezing": {"s": 0.4}, "lo": {"amplitude": 10}})");
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("# status: PASS"), std::string::npos);
}

TEST(Cli, verify_reports_disagreement) {
  const auto r = run("verify", R"({"squeezing": {"s": 0.4}, "oracle": {"tolerance": 1e-15}})");
  EXPECT_EQ(r.code, kExitOracle);
  EXPECT_NE(r.err.find("oracle disagreement"), std::string::npos);
}

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

#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "blo/config.hpp"

namespace blo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInvariant = 3;
inline constexpr int kExitOracle = 4;

using Cell = std::variant<std::string, double, std::int64_t>;

/// Command output: named columns, rows, and "key: value" metadata that goes
/// into the CSV header (or the JSON object).
struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> meta;
  /// Extra JSON payload (spectrum arrays); ignored by the CSV writer.
  nlohmann::ordered_json extra;
  int exit_code = kExitOk;
};

Table run_variance(const ExperimentConfig& cfg);
Table run_scan(const ExperimentConfig& cfg);
Table run_cases(const ExperimentConfig& cfg);
Table run_imbalance(const ExperimentConfig& cfg);
Table run_spectrum(const ExperimentConfig& cfg);
/// Sets exit_code to kExitOracle when the largest relative error exceeds the
/// configured tolerance.
Table run_verify(const ExperimentConfig& cfg);

const std::vector<std::string_view>& command_names();
Table run_command(std::string_view name, const ExperimentConfig& cfg);

/// Writes the table with a header that echoes the format version and the
/// fully resolved configuration.
void write_table(std::ostream& os, const Table& t, const ExperimentConfig& cfg);

/// Maps exceptions to exit codes and writes diagnostics to `err`.
int run_cli(std::string_view command, const std::string& config_path,
            const std::string& output_override, std::ostream& out, std::ostream& err);

}  // namespace blo

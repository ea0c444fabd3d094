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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "blo/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Balanced heterodyne detection of two-mode squeezed light"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  struct Entry {
    std::string_view name;
    const char* help;
  };
  const Entry entries[] = {
      {"variance", "variance reports for the standard and the bichromatic LO"},
      {"scan", "LO phase scan"},
      {"cases", "image-band case table at the optimal phase"},
      {"imbalance", "excess noise from mismatched bichromatic LO amplitudes"},
      {"spectrum", "synthesised difference-current PSD and located squeezing feature"},
      {"verify", "Fock-space oracle cross-check of the analytic variances"},
  };
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(std::string(e.name), e.help);
    sub->add_option("-c,--config", config_path, "JSON experiment configuration");
    sub->add_option("-o,--output", output, "output path (overrides output.path; '-' for stdout)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : blo::kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return blo::run_cli(command, config_path, output, std::cout, std::cerr);
}

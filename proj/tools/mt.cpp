// Copyright 2026 The mt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "mt/runner.hpp"

int main(int argc, char **argv) {
  CLI::App app{"mt: measurement-theory experiments"};
  app.set_version_flag("--version", std::string(mt::cli::kVersion));
  app.require_subcommand(1);

  mt::cli::RunManifest manifest;
  std::size_t samples = 0;
  std::string format = "csv";
  const std::map<std::string, mt::cli::Format> formats{{"csv", mt::cli::Format::csv},
                                                        {"json", mt::cli::Format::json}};

  const auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", manifest.config, "config file or builtin:NAME")->required();
    sub->add_option("--seed", manifest.seed, "master seed (u64)");
    sub->add_option("--out", manifest.out, "output path (default: stdout)");
    sub->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto *unc = app.add_subcommand("uncertainty", "certify uncertainty bounds over random states");
  add_common(unc);
  unc->add_option("--samples", samples, "number of states")->check(CLI::PositiveNumber);
  auto *zeno = app.add_subcommand("zeno", "survival probability scan over N");
  add_common(zeno);
  auto *causal = app.add_subcommand("causal", "realize a causal tree and print its distribution");
  add_common(causal);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  manifest.subcommand = app.get_subcommands().front()->get_name();
  manifest.format = formats.at(format);
  if (unc->count("--samples") > 0) {
    manifest.samples = samples;
  }
  manifest.default_hbar = mt::cli::hbar_from_env();

  const auto result = mt::cli::run(manifest);
  std::cerr << result.diagnostics;
  if (result.exit_code == 0 || result.exit_code == 1) {
    if (manifest.out.empty() || manifest.out == "-") {
      std::cout << result.output;
    } else {
      std::ofstream out(manifest.out, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot write '" << manifest.out << "'\n";
        return 2;
      }
      out << result.output;
    }
  }
  return result.exit_code;
}

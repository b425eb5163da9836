// Copyright 2026 The qfcsim Authors
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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qfc/cli.hpp"

namespace {

int run(const std::string& command, const std::optional<std::string>& config_path,
        const std::optional<std::uint64_t>& seed, const std::optional<std::string>& out,
        bool noiseless) {
  using namespace qfc::cli;
  RunConfig cfg = config_path ? load_config(*config_path) : RunConfig{};
  if (seed) cfg.scan.seed = *seed;
  if (out) cfg.output_dir = *out;
  if (noiseless) cfg.scan.noiseless = true;

  qfc::KeyValues summary;
  if (command == "spectra") {
    summary = cmd_spectra(cfg);
  } else if (command == "hom") {
    summary = cmd_hom(cfg);
  } else if (command == "bunching") {
    summary = cmd_bunching(cfg);
  } else if (command == "fringe") {
    summary = cmd_fringe(cfg);
  } else {
    summary = cmd_budget(cfg);
  }
  qfc::write_key_values(std::cout, summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-photon interferometry with quantum frequency conversion"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool noiseless = false;
  app.add_option("--config", config_path, "Run configuration (INI)")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_option("--out", out, "Output directory");
  app.add_flag("--noiseless", noiseless, "Write exact expectations instead of Poisson samples");

  app.add_subcommand("spectra", "Emission, acceptance and filtered spectra with bandwidths");
  app.add_subcommand("hom", "HOM dips of the source and after up-conversion");
  app.add_subcommand("bunching", "Coincidences behind a second splitter");
  app.add_subcommand("fringe", "One- and two-photon fringes, visibility fits, SQL verdict");
  app.add_subcommand("budget", "Detection-efficiency budget");

  CLI11_PARSE(app, argc, argv);

  try {
    return run(app.get_subcommands().front()->get_name(), config_path, seed, out, noiseless);
  } catch (const std::exception& e) {
    std::cerr << "qfcsim: error: " << e.what() << "\n";
    return 1;
  }
}

// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "shorsim/io/commands.hpp"

namespace {

// Command line values that, when present, override the loaded config.
struct Overrides {
  std::string config_path;
  std::uint64_t seed = 0;
  double lambda = 0;
  std::string components;
  int samples = 0;
  std::string backend;
  std::string out;
  bool svg = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* components_opt = nullptr;
  CLI::Option* samples_opt = nullptr;
  CLI::Option* backend_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* svg_opt = nullptr;
};

void add_common_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "Run configuration file");
  o.seed_opt = sub->add_option("--seed", o.seed, "Ensemble seed");
  o.lambda_opt = sub->add_option("--lambda", o.lambda, "Coupling strength");
  o.components_opt = sub->add_option("--components", o.components,
                                     "Noise components, a subset of xyz");
  o.samples_opt = sub->add_option("--samples", o.samples,
                                  "Noise realizations per ensemble");
  o.backend_opt =
      sub->add_option("--backend", o.backend, "State backend")
          ->check(CLI::IsMember({"dense", "structured"}));
  o.out_opt = sub->add_option("--out", o.out, "Output directory");
  o.svg_opt = sub->add_flag("--svg", o.svg, "Also write figures");
}

shorsim::io::RunConfig resolve_config(const std::string& name,
                                      const Overrides& o) {
  shorsim::io::RunConfig config;
  if (!o.config_path.empty())
    config = shorsim::io::load_config(o.config_path);
  if (o.seed_opt->count() > 0) config.seed = o.seed;
  if (o.lambda_opt->count() > 0) {
    if (o.lambda < 0)
      throw shorsim::ConfigError("--lambda must be nonnegative");
    config.lambda = o.lambda;
  }
  if (o.components_opt->count() > 0)
    config.components = shorsim::io::parse_components(o.components);
  if (o.samples_opt->count() > 0) {
    if (o.samples < 1)
      throw shorsim::ConfigError("--samples must be at least 1");
    if (name == "state-noise")
      config.sweep_samples = o.samples;
    else
      config.samples = o.samples;
  }
  if (o.backend_opt->count() > 0)
    config.backend = o.backend == "dense"
                         ? shorsim::io::BackendChoice::dense
                         : shorsim::io::BackendChoice::structured;
  if (o.out_opt->count() > 0) {
    if (o.out.empty())
      throw shorsim::ConfigError("--out must not be empty");
    config.out = o.out;
  }
  if (o.svg_opt->count() > 0) config.svg = true;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shor run simulator with step-resolved fluctuation and "
               "low-frequency noise diagnostics"};
  app.require_subcommand(1);

  static constexpr const char* kCommands[5] = {"trace", "spectrum",
                                               "noise-scan", "state-noise",
                                               "scaling"};
  static constexpr const char* kHelp[5] = {
      "Clean-run fluctuation trace over every computational step",
      "Final measurement spectrum and classical post-processing",
      "Noisy-step ensemble across interruption positions",
      "Coupling sweep per noise component at fixed positions",
      "Fluctuation scaling across problem sizes"};

  std::vector<Overrides> overrides(5);
  std::vector<CLI::App*> subs(5);
  for (int i = 0; i < 5; ++i) {
    subs[i] = app.add_subcommand(kCommands[i], kHelp[i]);
    add_common_options(subs[i], overrides[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (int i = 0; i < 5; ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      const auto config = resolve_config(kCommands[i], overrides[i]);
      shorsim::io::run_command(kCommands[i], config);
      return 0;
    } catch (const shorsim::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const shorsim::MemoryCapError& e) {
      std::cerr << "memory cap exceeded: " << e.what() << "\n";
      return 3;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}

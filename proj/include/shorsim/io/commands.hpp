// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "shorsim/io/config.hpp"

namespace shorsim::io {

// Each command runs the experiment its config describes and writes its
// tables (and optional figure) under config.out. All emitted bytes are a
// pure function of the config, independent of worker count.

// Clean-run fluctuation trace of all nine operator series per captured step:
// trace.csv, optional trace.svg.
void cmd_trace(const RunConfig& config);

// Final measurement distribution over the inferred frequency index, with
// the qualifying fractions and success probability: spectrum.csv,
// spectrum_summary.json, optional spectrum.svg.
void cmd_spectrum(const RunConfig& config);

// Noisy-step ensemble scan across interruption positions: noise_scan.csv,
// noise_scan_summary.json, optional noise_scan.svg.
void cmd_noise_scan(const RunConfig& config);

// Coupling sweep per component at fixed positions: state_noise.csv,
// state_noise_summary.json, optional state_noise.svg.
void cmd_state_noise(const RunConfig& config);

// Size comparison across the configured problems at phase boundaries:
// scaling_fluct.csv, scaling_fits.csv, scaling_summary.json.
void cmd_scaling(const RunConfig& config);

// Dispatches one of trace, spectrum, noise-scan, state-noise, scaling.
// Unknown names are ConfigError.
void run_command(std::string_view name, const RunConfig& config);

}  // namespace shorsim::io

// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shorsim/errors.hpp"
#include "shorsim/layout.hpp"
#include "shorsim/noise.hpp"
#include "shorsim/state.hpp"

namespace shorsim::io {

enum class BackendChoice { automatic, dense, structured };
enum class CapturePolicy { automatic, all, boundaries };

// Everything a run needs, grouped the way the config file sections group it.
// A default-constructed value describes the reference problem: N = 21, x = 2
// on the derived 10 + 5 qubit layout. The struct round-trips through
// serialize_config and parse_config bit for bit.
struct RunConfig {
  // [problem] A register size of zero derives the default for n.
  std::int64_t n = 21;
  std::int64_t x = 2;
  int l1 = 0;
  int l2 = 0;

  // [run]
  BackendChoice backend = BackendChoice::automatic;
  CapturePolicy capture = CapturePolicy::automatic;
  std::int64_t mem_cap = std::int64_t(core::kDefaultAmplitudeCap);
  std::string out = "out";
  bool svg = false;

  // [noise]
  double lambda = 0.0015;
  std::array<bool, 3> components{true, false, false};
  int samples = 40;
  std::uint64_t seed = noise::kDefaultSeed;
  double omega_high_factor = 4.1;
  int substeps = 4096;

  // [scan] Empty means every step of the run.
  std::vector<int> scan_steps;

  // [sweep] Empty steps mean the two phase boundaries l1 and 2 l1.
  std::vector<int> sweep_steps;
  std::vector<double> sweep_lambdas{0.00075, 0.0015, 0.003, 0.006};
  int sweep_samples = 200;

  // [scaling]
  std::vector<std::pair<std::int64_t, std::int64_t>> scaling_runs{
      {21, 2}, {513, 26}};

  bool operator==(const RunConfig&) const = default;
};

// Parses the sectioned key = value format. Unknown sections, unknown keys,
// repeated keys, and malformed values are all ConfigError.
RunConfig parse_config(std::string_view text);

// Reads and parses a config file; missing or unreadable files are
// ConfigError.
RunConfig load_config(const std::filesystem::path& path);

// Canonical text form: every section and key in a fixed order, floating
// point values with full round-trip precision.
std::string serialize_config(const RunConfig& config);

// Component subset as a compact label, e.g. "xz".
std::string components_label(const std::array<bool, 3>& components);

// Parses a label like "xz" into component flags. Empty labels, repeats, and
// letters outside xyz are ConfigError.
std::array<bool, 3> parse_components(std::string_view label);

// The layout a config describes, deriving register sizes when not pinned.
core::RegisterLayout config_layout(const RunConfig& config);

// The noise ensemble a config describes.
noise::NoiseConfig config_noise(const RunConfig& config);

}  // namespace shorsim::io

// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "shorsim/io/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "shorsim/io/csv.hpp"

namespace shorsim::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view value, int line, const char* what) {
  T parsed{};
  const auto* end = value.data() + value.size();
  const auto result = std::from_chars(value.data(), end, parsed);
  if (result.ec != std::errc{} || result.ptr != end)
    fail(line, std::string("expected ") + what + ", got '" +
                   std::string(value) + "'");
  return parsed;
}

bool parse_bool(std::string_view value, int line) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(line, "expected true or false, got '" + std::string(value) + "'");
}

std::vector<std::string_view> split_list(std::string_view value, char sep) {
  std::vector<std::string_view> items;
  while (!value.empty()) {
    const std::size_t pos = value.find(sep);
    items.push_back(trim(value.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    value.remove_prefix(pos + 1);
  }
  return items;
}

std::vector<int> parse_steps(std::string_view value, int line) {
  std::vector<int> steps;
  for (const auto item : split_list(value, ',')) {
    const int step = parse_number<int>(item, line, "a step index");
    if (step < 0) fail(line, "step indices must not be negative");
    steps.push_back(step);
  }
  return steps;
}

std::vector<double> parse_lambdas(std::string_view value, int line) {
  std::vector<double> lambdas;
  for (const auto item : split_list(value, ',')) {
    const double lambda = parse_number<double>(item, line, "a coupling");
    if (lambda < 0) fail(line, "couplings must not be negative");
    lambdas.push_back(lambda);
  }
  return lambdas;
}

std::vector<std::pair<std::int64_t, std::int64_t>> parse_runs(
    std::string_view value, int line) {
  std::vector<std::pair<std::int64_t, std::int64_t>> runs;
  for (const auto item : split_list(value, ',')) {
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos)
      fail(line, "runs are n:x pairs, got '" + std::string(item) + "'");
    const auto n = parse_number<std::int64_t>(trim(item.substr(0, colon)),
                                              line, "a modulus");
    const auto x = parse_number<std::int64_t>(trim(item.substr(colon + 1)),
                                              line, "a base");
    runs.emplace_back(n, x);
  }
  return runs;
}

BackendChoice parse_backend(std::string_view value, int line) {
  if (value == "auto") return BackendChoice::automatic;
  if (value == "dense") return BackendChoice::dense;
  if (value == "structured") return BackendChoice::structured;
  fail(line, "backend must be auto, dense, or structured");
}

CapturePolicy parse_capture(std::string_view value, int line) {
  if (value == "auto") return CapturePolicy::automatic;
  if (value == "all") return CapturePolicy::all;
  if (value == "boundaries") return CapturePolicy::boundaries;
  fail(line, "capture must be auto, all, or boundaries");
}

const char* backend_label(BackendChoice choice) {
  switch (choice) {
    case BackendChoice::dense: return "dense";
    case BackendChoice::structured: return "structured";
    default: return "auto";
  }
}

const char* capture_label(CapturePolicy policy) {
  switch (policy) {
    case CapturePolicy::all: return "all";
    case CapturePolicy::boundaries: return "boundaries";
    default: return "auto";
  }
}

// One handler per (section, key). The parse loop below owns section
// tracking, duplicate detection, and error positions.
void apply_entry(RunConfig& config, const std::string& section,
                 const std::string& key, std::string_view value, int line) {
  if (section == "problem") {
    if (key == "n") {
      config.n = parse_number<std::int64_t>(value, line, "an integer");
    } else if (key == "x") {
      config.x = parse_number<std::int64_t>(value, line, "an integer");
    } else if (key == "l1") {
      config.l1 = parse_number<int>(value, line, "a register size");
      if (config.l1 < 0) fail(line, "l1 must not be negative");
    } else if (key == "l2") {
      config.l2 = parse_number<int>(value, line, "a register size");
      if (config.l2 < 0) fail(line, "l2 must not be negative");
    } else {
      fail(line, "unknown key '" + key + "' in [problem]");
    }
    return;
  }
  if (section == "run") {
    if (key == "backend") {
      config.backend = parse_backend(value, line);
    } else if (key == "capture") {
      config.capture = parse_capture(value, line);
    } else if (key == "mem_cap") {
      config.mem_cap = parse_number<std::int64_t>(value, line, "an integer");
      if (config.mem_cap < 2) fail(line, "mem_cap must be at least 2");
    } else if (key == "out") {
      if (value.empty()) fail(line, "out must not be empty");
      config.out = std::string(value);
    } else if (key == "svg") {
      config.svg = parse_bool(value, line);
    } else {
      fail(line, "unknown key '" + key + "' in [run]");
    }
    return;
  }
  if (section == "noise") {
    if (key == "lambda") {
      config.lambda = parse_number<double>(value, line, "a coupling");
      if (config.lambda < 0) fail(line, "lambda must not be negative");
    } else if (key == "components") {
      try {
        config.components = parse_components(value);
      } catch (const ConfigError& e) {
        fail(line, e.what());
      }
    } else if (key == "samples") {
      config.samples = parse_number<int>(value, line, "a sample count");
      if (config.samples < 1) fail(line, "samples must be positive");
    } else if (key == "seed") {
      config.seed = parse_number<std::uint64_t>(value, line, "a seed");
    } else if (key == "omega_high_factor") {
      config.omega_high_factor =
          parse_number<double>(value, line, "a cutoff factor");
      if (config.omega_high_factor <= 0)
        fail(line, "omega_high_factor must be positive");
    } else if (key == "substeps") {
      config.substeps = parse_number<int>(value, line, "a substep count");
      if (config.substeps < 1) fail(line, "substeps must be positive");
    } else {
      fail(line, "unknown key '" + key + "' in [noise]");
    }
    return;
  }
  if (section == "scan") {
    if (key == "steps") {
      config.scan_steps = parse_steps(value, line);
    } else {
      fail(line, "unknown key '" + key + "' in [scan]");
    }
    return;
  }
  if (section == "sweep") {
    if (key == "steps") {
      config.sweep_steps = parse_steps(value, line);
    } else if (key == "lambdas") {
      config.sweep_lambdas = parse_lambdas(value, line);
      if (config.sweep_lambdas.empty())
        fail(line, "sweep needs at least one coupling");
    } else if (key == "samples") {
      config.sweep_samples = parse_number<int>(value, line, "a sample count");
      if (config.sweep_samples < 1) fail(line, "samples must be positive");
    } else {
      fail(line, "unknown key '" + key + "' in [sweep]");
    }
    return;
  }
  if (section == "scaling") {
    if (key == "runs") {
      config.scaling_runs = parse_runs(value, line);
      if (config.scaling_runs.empty())
        fail(line, "scaling needs at least one run");
    } else {
      fail(line, "unknown key '" + key + "' in [scaling]");
    }
    return;
  }
  fail(line, "unknown section [" + section + "]");
}

}  // namespace

std::array<bool, 3> parse_components(std::string_view label) {
  std::array<bool, 3> components{false, false, false};
  if (trim(label).empty())
    throw ConfigError("components must name at least one of x, y, z");
  for (const char c : trim(label)) {
    const int axis = c == 'x' ? 0 : c == 'y' ? 1 : c == 'z' ? 2 : -1;
    if (axis < 0)
      throw ConfigError(std::string("component '") + c +
                        "' is not one of x, y, z");
    if (components[axis])
      throw ConfigError(std::string("component '") + c + "' repeats");
    components[axis] = true;
  }
  return components;
}

std::string components_label(const std::array<bool, 3>& components) {
  std::string label;
  for (int axis = 0; axis < 3; ++axis)
    if (components[axis]) label += noise::kAxisLabel[axis];
  return label;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::string section;
  std::set<std::string> seen;
  int line_number = 0;
  while (!text.empty()) {
    ++line_number;
    const std::size_t newline = text.find('\n');
    std::string_view line = trim(text.substr(0, newline));
    text.remove_prefix(newline == std::string_view::npos ? text.size()
                                                         : newline + 1);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(line_number, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(line_number, "expected key = value");
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty())
      fail(line_number, "key '" + key + "' appears before any section");
    if (key.empty()) fail(line_number, "empty key");
    if (!seen.insert(section + "." + key).second)
      fail(line_number, "key '" + key + "' repeats in [" + section + "]");
    apply_entry(config, section, key, value, line_number);
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  out << "[problem]\n";
  out << "n = " << config.n << "\n";
  out << "x = " << config.x << "\n";
  out << "l1 = " << config.l1 << "\n";
  out << "l2 = " << config.l2 << "\n";
  out << "\n[run]\n";
  out << "backend = " << backend_label(config.backend) << "\n";
  out << "capture = " << capture_label(config.capture) << "\n";
  out << "mem_cap = " << config.mem_cap << "\n";
  out << "out = " << config.out << "\n";
  out << "svg = " << (config.svg ? "true" : "false") << "\n";
  out << "\n[noise]\n";
  out << "lambda = " << format_double_exact(config.lambda) << "\n";
  out << "components = " << components_label(config.components) << "\n";
  out << "samples = " << config.samples << "\n";
  out << "seed = " << config.seed << "\n";
  out << "omega_high_factor = "
      << format_double_exact(config.omega_high_factor) << "\n";
  out << "substeps = " << config.substeps << "\n";
  out << "\n[scan]\n";
  out << "steps =";
  for (std::size_t i = 0; i < config.scan_steps.size(); ++i)
    out << (i == 0 ? " " : ",") << config.scan_steps[i];
  out << "\n";
  out << "\n[sweep]\n";
  out << "steps =";
  for (std::size_t i = 0; i < config.sweep_steps.size(); ++i)
    out << (i == 0 ? " " : ",") << config.sweep_steps[i];
  out << "\n";
  out << "lambdas =";
  for (std::size_t i = 0; i < config.sweep_lambdas.size(); ++i)
    out << (i == 0 ? " " : ",") << format_double_exact(config.sweep_lambdas[i]);
  out << "\n";
  out << "samples = " << config.sweep_samples << "\n";
  out << "\n[scaling]\n";
  out << "runs =";
  for (std::size_t i = 0; i < config.scaling_runs.size(); ++i)
    out << (i == 0 ? " " : ",") << config.scaling_runs[i].first << ":"
        << config.scaling_runs[i].second;
  out << "\n";
  return out.str();
}

core::RegisterLayout config_layout(const RunConfig& config) {
  try {
    if (config.l1 > 0 || config.l2 > 0) {
      if (config.l1 == 0 || config.l2 == 0)
        throw ConfigError("pin both l1 and l2 or neither");
      return core::make_layout(config.n, config.x, config.l1, config.l2);
    }
    return core::make_layout(config.n, config.x);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid problem: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(std::string("invalid problem: ") + e.what());
  }
}

noise::NoiseConfig config_noise(const RunConfig& config) {
  noise::NoiseConfig out;
  out.lambda = config.lambda;
  out.components = config.components;
  out.omega_high_factor = config.omega_high_factor;
  out.n_nu = config.samples;
  out.seed = config.seed;
  out.substeps = config.substeps;
  return out;
}

}  // namespace shorsim::io

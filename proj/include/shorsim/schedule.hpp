// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "shorsim/gates.hpp"
#include "shorsim/number_theory.hpp"
#include "shorsim/state.hpp"

namespace shorsim::shor {

// Full gate list of one factoring run, split into three phases:
//   1..l1            Hadamard on every register-1 site
//   l1+1..2*l1       controlled multiplication by x^(2^(l-1)) mod n
//   2*l1+1..q        final transform, one mixing step at a time
// Positions m = 0..q() refer to the state after m steps, with m = 0 the
// prepared initial state.
struct Schedule {
  int l1 = 0;
  std::vector<core::GateStep> steps;

  int q() const { return static_cast<int>(steps.size()); }
  int hadamard_end() const { return l1; }
  int modexp_end() const { return 2 * l1; }
};

// Phase label of position m, used in trace output.
inline const char* phase_name(const Schedule& schedule, int m) {
  if (m <= 0) return "init";
  if (m <= schedule.hadamard_end()) return "hadamard";
  if (m <= schedule.modexp_end()) return "modexp";
  return "dft";
}

// The final transform interleaves one Hadamard per site with conditional
// phases pi / 2^(j - j') between still-pending lower sites and the site just
// mixed, walking from the top site down. Output labels come out bit
// reversed; the measurement post-processing undoes that.
inline Schedule build_schedule(const core::RegisterLayout& layout) {
  Schedule schedule;
  schedule.l1 = layout.l1;
  for (int l = 1; l <= layout.l1; ++l)
    schedule.steps.push_back(core::GateStep::hadamard(l));
  for (int l = 1; l <= layout.l1; ++l) {
    const std::int64_t u =
        pow_mod(layout.x, std::int64_t{1} << (l - 1), layout.n);
    schedule.steps.push_back(core::GateStep::controlled_mod_mul(l, u));
  }
  for (int j = layout.l1; j >= 1; --j) {
    schedule.steps.push_back(core::GateStep::qft_hadamard(j));
    for (int jp = j - 1; jp >= 1; --jp) {
      const double angle = std::numbers::pi / double(std::int64_t{1} << (j - jp));
      schedule.steps.push_back(core::GateStep::controlled_phase(jp, j, angle));
    }
  }
  return schedule;
}

// Which positions of a run to hand to the observer.
struct CaptureSet {
  bool all = false;
  std::vector<int> indices;

  static CaptureSet everything() { return {true, {}}; }
  static CaptureSet at(std::vector<int> positions) {
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()),
                    positions.end());
    return {false, std::move(positions)};
  }
  static CaptureSet boundaries(const Schedule& schedule) {
    return at({0, schedule.hadamard_end(), schedule.modexp_end(),
               schedule.q()});
  }

  bool contains(int m) const {
    return all || std::binary_search(indices.begin(), indices.end(), m);
  }
};

// Runs the schedule from the initial state, invoking visit(m, state) at
// every position 0..q. The state argument is the live working state; the
// visitor must copy it to keep it.
template <typename Real = double, typename Visitor>
void scan_run(const core::RegisterLayout& layout, core::Backend backend,
              const Schedule& schedule, Visitor&& visit,
              std::size_t amplitude_cap = core::kDefaultAmplitudeCap) {
  core::PureState<Real> state =
      core::init_state<Real>(layout, backend, amplitude_cap);
  visit(0, state);
  for (int m = 1; m <= schedule.q(); ++m) {
    core::apply_step(state, schedule.steps[m - 1]);
    visit(m, state);
  }
}

// Runs the schedule and keeps copies of the captured positions.
template <typename Real = double>
std::map<int, core::PureState<Real>> run_clean(
    const core::RegisterLayout& layout, core::Backend backend,
    const CaptureSet& capture,
    std::size_t amplitude_cap = core::kDefaultAmplitudeCap) {
  const Schedule schedule = build_schedule(layout);
  std::map<int, core::PureState<Real>> captured;
  scan_run<Real>(
      layout, backend, schedule,
      [&](int m, const core::PureState<Real>& state) {
        if (capture.contains(m)) captured.emplace(m, state);
      },
      amplitude_cap);
  return captured;
}

}  // namespace shorsim::shor

// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

#include "shorsim/state.hpp"

namespace shorsim::core {

// One elementary computational step. All gates address register-1 qubits by
// their 1-based site index; the modular multiplication acts on register 2
// under a register-1 control.
struct GateStep {
  enum class Kind { hadamard, controlled_mod_mul, qft_hadamard,
                    controlled_phase };

  Kind kind = Kind::hadamard;
  int target = 0;
  int control = 0;
  std::int64_t multiplier = 0;
  double angle = 0.0;

  static GateStep hadamard(int target) {
    return {Kind::hadamard, target, 0, 0, 0.0};
  }
  static GateStep controlled_mod_mul(int control, std::int64_t multiplier) {
    return {Kind::controlled_mod_mul, 0, control, multiplier, 0.0};
  }
  static GateStep qft_hadamard(int target) {
    return {Kind::qft_hadamard, target, 0, 0, 0.0};
  }
  static GateStep controlled_phase(int control, int target, double angle) {
    return {Kind::controlled_phase, target, control, 0, angle};
  }
};

namespace detail {

// Hadamard butterfly over a contiguous buffer. `half` is the weight of the
// target bit within the buffer's index space.
template <typename Complex>
void hadamard_in_place(Complex* v, std::int64_t dim, std::int64_t half) {
  using Real = typename Complex::value_type;
  const Real inv_sqrt2 = Real{1} / std::sqrt(Real{2});
  for (std::int64_t base = 0; base < dim; base += 2 * half) {
    for (std::int64_t i = base; i < base + half; ++i) {
      const Complex lo = v[i];
      const Complex hi = v[i + half];
      v[i] = inv_sqrt2 * (lo + hi);
      v[i + half] = inv_sqrt2 * (lo - hi);
    }
  }
}

// Multiplies entries whose index has all bits of `mask` set.
template <typename Complex>
void masked_scale_in_place(Complex* v, std::int64_t dim, std::int64_t mask,
                           Complex factor) {
  for (std::int64_t i = 0; i < dim; ++i)
    if ((i & mask) == mask) v[i] *= factor;
}

inline void check_r1_site(const RegisterLayout& layout, int site) {
  if (site < 1 || site > layout.l1)
    throw std::invalid_argument("gate site outside register 1");
}

template <typename Real>
std::int64_t orbit_index_of(const PureState<Real>& state,
                            std::int64_t value) {
  for (std::size_t j = 0; j < state.group.size(); ++j)
    if (state.group[j] == value) return static_cast<std::int64_t>(j);
  throw std::invalid_argument(
      "structured backend requires multipliers inside the orbit of the base");
}

template <typename Real>
void apply_controlled_mod_mul(PureState<Real>& state, int control,
                              std::int64_t u) {
  const RegisterLayout& lay = state.layout;
  check_r1_site(lay, control);
  if (u < 1 || u >= lay.n)
    throw std::invalid_argument("multiplier must satisfy 1 <= u < n");
  const std::int64_t ctl = std::int64_t{1} << (control - 1);
  const std::int64_t rows = lay.r1_dim();
  if (state.backend == Backend::dense) {
    typename PureState<Real>::DenseVector out(state.amps.size());
    for (std::int64_t s = 0; s < lay.r2_dim(); ++s) {
      std::int64_t t = s;
      if (s < lay.n) t = (u * s) % lay.n;
      if (t >= lay.r2_dim())
        throw std::domain_error("multiplication leaves register 2's range");
      const auto* src = state.amps.data() + lay.pack(0, s);
      auto* same = out.data() + lay.pack(0, s);
      auto* moved = out.data() + lay.pack(0, t);
      for (std::int64_t a = 0; a < rows; ++a)
        ((a & ctl) ? moved : same)[a] = src[a];
    }
    state.amps.swap(out);
  } else {
    // Multiplying register 2 by u = x^d rotates the orbit columns by d.
    const std::int64_t r = static_cast<std::int64_t>(state.group.size());
    const std::int64_t shift = orbit_index_of(state, u);
    typename PureState<Real>::ColumnTable out(rows, r);
    for (std::int64_t j = 0; j < r; ++j) {
      const auto src = state.table.col(j);
      auto same = out.col(j);
      auto moved = out.col((j + shift) % r);
      for (std::int64_t a = 0; a < rows; ++a)
        ((a & ctl) ? moved : same)(a) = src(a);
    }
    state.table.swap(out);
  }
}

}  // namespace detail

// Applies one step in place. The four kinds are exactly norm-preserving, so
// repeated application never renormalizes.
template <typename Real>
void apply_step(PureState<Real>& state, const GateStep& step) {
  using Complex = typename PureState<Real>::Complex;
  const RegisterLayout& lay = state.layout;
  switch (step.kind) {
    case GateStep::Kind::hadamard:
    case GateStep::Kind::qft_hadamard: {
      detail::check_r1_site(lay, step.target);
      const std::int64_t half = std::int64_t{1} << (step.target - 1);
      if (state.backend == Backend::dense) {
        detail::hadamard_in_place(state.amps.data(), state.amps.size(), half);
      } else {
        for (std::int64_t j = 0; j < state.table.cols(); ++j)
          detail::hadamard_in_place(state.table.col(j).data(), lay.r1_dim(),
                                    half);
      }
      return;
    }
    case GateStep::Kind::controlled_phase: {
      detail::check_r1_site(lay, step.control);
      detail::check_r1_site(lay, step.target);
      if (step.control == step.target)
        throw std::invalid_argument("controlled phase needs distinct sites");
      const std::int64_t mask = (std::int64_t{1} << (step.control - 1)) |
                                (std::int64_t{1} << (step.target - 1));
      const Complex factor = std::polar(Real{1}, Real(step.angle));
      if (state.backend == Backend::dense) {
        detail::masked_scale_in_place(state.amps.data(), state.amps.size(),
                                      mask, factor);
      } else {
        for (std::int64_t j = 0; j < state.table.cols(); ++j)
          detail::masked_scale_in_place(state.table.col(j).data(),
                                        lay.r1_dim(), mask, factor);
      }
      return;
    }
    case GateStep::Kind::controlled_mod_mul:
      detail::apply_controlled_mod_mul(state, step.control, step.multiplier);
      return;
  }
  throw std::logic_error("unhandled gate kind");
}

}  // namespace shorsim::core

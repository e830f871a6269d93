// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "shorsim/errors.hpp"
#include "shorsim/layout.hpp"

namespace shorsim::core {

enum class Backend { dense, structured };

// Default ceiling on dense amplitudes (2^26 doubles-pairs, about 1 GiB).
inline constexpr std::size_t kDefaultAmplitudeCap = std::size_t{1} << 26;

// Pure state of the two-register machine in one of two representations.
//
// dense: `amps` holds all 2^(l1+l2) amplitudes, indexed by pack(a, s).
//
// structured: register 2 never leaves the orbit {x^j mod n} of the base, so
// the state is stored as a 2^l1 by r column table. Column j holds the
// register-1 amplitudes attached to register-2 value group[j]. The group
// values are distinct residues, which keeps the columns orthogonal slices of
// the dense vector.
template <typename Real = double>
struct PureState {
  using Complex = std::complex<Real>;
  using DenseVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
  using ColumnTable = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  RegisterLayout layout;
  Backend backend = Backend::dense;
  DenseVector amps;
  ColumnTable table;
  std::vector<std::int64_t> group;

  Real squared_norm() const {
    return backend == Backend::dense ? amps.squaredNorm()
                                     : table.squaredNorm();
  }
};

namespace detail {

inline std::vector<std::int64_t> base_orbit(std::int64_t x, std::int64_t n) {
  std::vector<std::int64_t> orbit{1};
  for (std::int64_t v = x % n; v != 1; v = (v * x) % n) {
    orbit.push_back(v);
    if (orbit.size() > static_cast<std::size_t>(n))
      throw std::logic_error("orbit of the base failed to close");
  }
  return orbit;
}

inline void check_same_problem(const RegisterLayout& a,
                               const RegisterLayout& b) {
  if (!(a == b))
    throw std::invalid_argument("states live on different register layouts");
}

}  // namespace detail

// Product state |0..0> |0..01>: register 1 cleared, register 2 holding the
// multiplicative unit. Dense construction enforces the amplitude cap.
template <typename Real = double>
PureState<Real> init_state(const RegisterLayout& layout, Backend backend,
                           std::size_t amplitude_cap = kDefaultAmplitudeCap) {
  PureState<Real> state;
  state.layout = layout;
  state.backend = backend;
  if (backend == Backend::dense) {
    const auto dim = static_cast<std::size_t>(layout.dense_dim());
    if (dim > amplitude_cap) throw MemoryCapError(dim, amplitude_cap);
    state.amps = PureState<Real>::DenseVector::Zero(layout.dense_dim());
    state.amps[layout.pack(0, 1)] = Real{1};
  } else {
    state.group = detail::base_orbit(layout.x, layout.n);
    state.table = PureState<Real>::ColumnTable::Zero(
        layout.r1_dim(), static_cast<std::int64_t>(state.group.size()));
    state.table(0, 0) = Real{1};
  }
  return state;
}

// Expands a structured state into the dense representation. Dense input is
// returned unchanged (modulo the cap check).
template <typename Real>
PureState<Real> densify(const PureState<Real>& state,
                        std::size_t amplitude_cap = kDefaultAmplitudeCap) {
  const auto dim = static_cast<std::size_t>(state.layout.dense_dim());
  if (dim > amplitude_cap) throw MemoryCapError(dim, amplitude_cap);
  if (state.backend == Backend::dense) return state;
  PureState<Real> out;
  out.layout = state.layout;
  out.backend = Backend::dense;
  out.amps = PureState<Real>::DenseVector::Zero(state.layout.dense_dim());
  const std::int64_t rows = state.layout.r1_dim();
  for (std::int64_t j = 0; j < state.table.cols(); ++j) {
    if (state.group[j] >= state.layout.r2_dim())
      throw std::domain_error("group value does not fit in register 2");
    out.amps.segment(state.layout.pack(0, state.group[j]), rows) =
        state.table.col(j);
  }
  return out;
}

// <s1|s2>, conjugate-linear in the first argument. Mixed representations are
// compared through the structured side's dense embedding without allocating
// it.
template <typename Real>
std::complex<Real> inner_product(const PureState<Real>& s1,
                                 const PureState<Real>& s2) {
  detail::check_same_problem(s1.layout, s2.layout);
  using Complex = std::complex<Real>;
  if (s1.backend == Backend::dense && s2.backend == Backend::dense)
    return s1.amps.dot(s2.amps);
  if (s1.backend == Backend::structured &&
      s2.backend == Backend::structured) {
    return s1.table.conjugate().cwiseProduct(s2.table).sum();
  }
  const PureState<Real>& st =
      s1.backend == Backend::structured ? s1 : s2;
  const PureState<Real>& dn = s1.backend == Backend::dense ? s1 : s2;
  const std::int64_t rows = st.layout.r1_dim();
  Complex acc{};
  for (std::int64_t j = 0; j < st.table.cols(); ++j) {
    const auto dense_slice =
        dn.amps.segment(st.layout.pack(0, st.group[j]), rows);
    if (&st == &s1)
      acc += st.table.col(j).dot(dense_slice);
    else
      acc += dense_slice.dot(st.table.col(j));
  }
  return acc;
}

// Probability of each register-1 value c (raw bit order, not reversed),
// marginalized over register 2.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> register1_distribution(
    const PureState<Real>& state) {
  Eigen::Matrix<Real, Eigen::Dynamic, 1> p =
      Eigen::Matrix<Real, Eigen::Dynamic, 1>::Zero(state.layout.r1_dim());
  const std::int64_t rows = state.layout.r1_dim();
  if (state.backend == Backend::dense) {
    for (std::int64_t s = 0; s < state.layout.r2_dim(); ++s)
      p += state.amps.segment(s << state.layout.l1, rows).cwiseAbs2();
  } else {
    for (std::int64_t j = 0; j < state.table.cols(); ++j)
      p += state.table.col(j).cwiseAbs2();
  }
  return p;
}

}  // namespace shorsim::core

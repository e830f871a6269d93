// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "shorsim/state.hpp"

namespace shorsim::obs {

enum class Pauli { x, y, z };
enum class Scope { all, r1, r2 };

inline char pauli_label(Pauli alpha) {
  switch (alpha) {
    case Pauli::x: return 'x';
    case Pauli::y: return 'y';
    case Pauli::z: return 'z';
  }
  return '?';
}

inline const char* scope_label(Scope scope) {
  switch (scope) {
    case Scope::all: return "all";
    case Scope::r1: return "r1";
    case Scope::r2: return "r2";
  }
  return "?";
}

// Normalized additive operator A = (1/Lsc) sum_l e^(-i k l) sigma_alpha(l)
// over the sites of one scope. Sites keep their global 1-based index; Lsc is
// the scope's site count and k = 2 pi k_index / Lsc with the integer
// k_index restricted to (-Lsc/2, Lsc/2]. k_index = 0 is the plain
// magnetization; k_index = Lsc/2 alternates sign site by site.
struct AdditiveOperatorSpec {
  Pauli alpha = Pauli::z;
  Scope scope = Scope::all;
  int k_index = 0;

  friend bool operator==(const AdditiveOperatorSpec&,
                         const AdditiveOperatorSpec&) = default;
};

inline int scope_length(const core::RegisterLayout& layout, Scope scope) {
  switch (scope) {
    case Scope::all: return layout.total_qubits();
    case Scope::r1: return layout.l1;
    case Scope::r2: return layout.l2;
  }
  return 0;
}

// Global 1-based site interval [first, last] covered by a scope.
inline std::pair<int, int> scope_sites(const core::RegisterLayout& layout,
                                       Scope scope) {
  switch (scope) {
    case Scope::all: return {1, layout.total_qubits()};
    case Scope::r1: return {1, layout.l1};
    case Scope::r2: return {layout.l1 + 1, layout.total_qubits()};
  }
  return {1, 0};
}

inline void check_k_index(const core::RegisterLayout& layout,
                          const AdditiveOperatorSpec& spec) {
  const int lsc = scope_length(layout, spec.scope);
  if (2 * spec.k_index <= -lsc || 2 * spec.k_index > lsc)
    throw std::invalid_argument("wave number index outside (-Lsc/2, Lsc/2]");
}

// Squared fluctuation of A on one state position, tagged for trace output.
struct FluctuationRecord {
  int m = 0;
  AdditiveOperatorSpec spec;
  double value = 0.0;
};

namespace detail {

inline std::complex<double> site_weight(int site, int k_index, int lsc) {
  if (k_index == 0) return {1.0, 0.0};
  const double k = 2.0 * std::numbers::pi * k_index / lsc;
  return std::polar(1.0, -k * site);
}

// Rounding can push an exact zero variance a hair negative; anything beyond
// the clamp window indicates a real defect and is left visible.
inline double clamp_variance(double v) {
  return (v < 0.0 && v > -1e-12) ? 0.0 : v;
}

}  // namespace detail

// Evaluates fluctuations of several operator specs against one state,
// sharing the expensive intermediates between specs. The state must outlive
// the evaluator.
//
// Dense states are handled by accumulating A|psi> directly. Structured
// states never materialize the dense vector: register-1 terms act on the
// column table row-wise, register-2 terms are expanded in the orbit basis
// and contracted through the column Gram matrix.
template <typename Real = double>
class StateMoments {
  using Complex = std::complex<Real>;
  using DenseVector = typename core::PureState<Real>::DenseVector;
  using ColumnTable = typename core::PureState<Real>::ColumnTable;

 public:
  explicit StateMoments(const core::PureState<Real>& state) : state_(state) {
    if (state_.backend == core::Backend::structured) {
      for (std::size_t j = 0; j < state_.group.size(); ++j)
        orbit_index_[state_.group[j]] = static_cast<std::int64_t>(j);
    }
  }

  Real fluct(const AdditiveOperatorSpec& spec) {
    check_k_index(state_.layout, spec);
    return state_.backend == core::Backend::dense ? fluct_dense(spec)
                                                  : fluct_structured(spec);
  }

 private:
  // ---- dense path ----

  Real fluct_dense(const AdditiveOperatorSpec& spec) {
    const auto& lay = state_.layout;
    const auto [first, last] = scope_sites(lay, spec.scope);
    const int lsc = scope_length(lay, spec.scope);
    const std::int64_t dim = state_.amps.size();
    DenseVector aux = DenseVector::Zero(dim);
    for (int site = first; site <= last; ++site) {
      const Complex w = Complex(detail::site_weight(site, spec.k_index, lsc));
      const std::int64_t mask = std::int64_t{1} << (site - 1);
      switch (spec.alpha) {
        case Pauli::x:
          for (std::int64_t i = 0; i < dim; ++i)
            aux[i ^ mask] += w * state_.amps[i];
          break;
        case Pauli::y:
          for (std::int64_t i = 0; i < dim; ++i) {
            const Complex c = (i & mask) ? Complex(0, -1) : Complex(0, 1);
            aux[i ^ mask] += w * c * state_.amps[i];
          }
          break;
        case Pauli::z:
          for (std::int64_t i = 0; i < dim; ++i)
            aux[i] += ((i & mask) ? -w : w) * state_.amps[i];
          break;
      }
    }
    const Real h2 = aux.squaredNorm();
    const Real h1 = state_.amps.dot(aux).real();
    return detail::clamp_variance(h2 / Real(lsc) / Real(lsc) -
                                  (h1 / Real(lsc)) * (h1 / Real(lsc)));
  }

  // ---- structured path ----

  // Register-1 contribution: the column table with A's register-1 terms
  // applied, plus the moments derivable from it alone.
  struct R1Part {
    ColumnTable aux;
    Real norm2 = 0;       // <aux1|aux1>
    Complex overlap{};    // <psi|aux1>
    ColumnTable cross;    // aux1^dagger table, for mixing with register 2
  };

  // Register-2 contribution in the orbit basis: for each reachable
  // register-2 value, the coefficients attaching each source column to it.
  struct R2Part {
    std::map<std::int64_t, std::vector<std::pair<std::int64_t, Complex>>>
        columns;
    Real norm2 = 0;     // <aux2|aux2>
    Complex overlap{};  // <psi|aux2>
  };

  // Cache keys carry (alpha, k_index, scope length); at k = 0 the weights
  // are 1 for every scope, so the scope length is dropped from the key.
  using Key = std::tuple<int, int, int>;
  static Key part_key(const AdditiveOperatorSpec& spec, int lsc) {
    return {static_cast<int>(spec.alpha), spec.k_index,
            spec.k_index == 0 ? 0 : lsc};
  }

  const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>& gram() {
    if (gram_.size() == 0) gram_ = state_.table.adjoint() * state_.table;
    return gram_;
  }

  const R1Part& r1_part(const AdditiveOperatorSpec& spec, int lsc) {
    const Key key = part_key(spec, lsc);
    auto it = r1_cache_.find(key);
    if (it != r1_cache_.end()) return it->second;

    const auto& lay = state_.layout;
    const std::int64_t rows = lay.r1_dim();
    const std::int64_t cols = state_.table.cols();
    R1Part part;
    part.aux = ColumnTable::Zero(rows, cols);
    for (int site = 1; site <= lay.l1; ++site) {
      const Complex w = Complex(detail::site_weight(site, spec.k_index, lsc));
      const std::int64_t mask = std::int64_t{1} << (site - 1);
      for (std::int64_t j = 0; j < cols; ++j) {
        const auto src = state_.table.col(j);
        auto dst = part.aux.col(j);
        switch (spec.alpha) {
          case Pauli::x:
            for (std::int64_t a = 0; a < rows; ++a)
              dst(a ^ mask) += w * src(a);
            break;
          case Pauli::y:
            for (std::int64_t a = 0; a < rows; ++a) {
              const Complex c = (a & mask) ? Complex(0, -1) : Complex(0, 1);
              dst(a ^ mask) += w * c * src(a);
            }
            break;
          case Pauli::z:
            for (std::int64_t a = 0; a < rows; ++a)
              dst(a) += ((a & mask) ? -w : w) * src(a);
            break;
        }
      }
    }
    part.norm2 = part.aux.squaredNorm();
    part.overlap = state_.table.conjugate().cwiseProduct(part.aux).sum();
    part.cross = part.aux.adjoint() * state_.table;
    return r1_cache_.emplace(key, std::move(part)).first->second;
  }

  const R2Part& r2_part(const AdditiveOperatorSpec& spec, int lsc) {
    const Key key = part_key(spec, lsc);
    auto it = r2_cache_.find(key);
    if (it != r2_cache_.end()) return it->second;

    const auto& lay = state_.layout;
    R2Part part;
    for (int site = lay.l1 + 1; site <= lay.total_qubits(); ++site) {
      const Complex w = Complex(detail::site_weight(site, spec.k_index, lsc));
      const std::int64_t bit = std::int64_t{1} << (site - lay.l1 - 1);
      for (std::size_t j = 0; j < state_.group.size(); ++j) {
        const std::int64_t g = state_.group[j];
        std::int64_t v = g;
        Complex c = w;
        switch (spec.alpha) {
          case Pauli::x:
            v = g ^ bit;
            break;
          case Pauli::y:
            v = g ^ bit;
            c *= (g & bit) ? Complex(0, -1) : Complex(0, 1);
            break;
          case Pauli::z:
            c *= (g & bit) ? Real{-1} : Real{1};
            break;
        }
        part.columns[v].emplace_back(static_cast<std::int64_t>(j), c);
      }
    }

    const auto& G = gram();
    for (const auto& [v, terms] : part.columns) {
      for (const auto& [j1, c1] : terms)
        for (const auto& [j2, c2] : terms)
          part.norm2 += (std::conj(c1) * c2 * G(j1, j2)).real();
      const auto hit = orbit_index_.find(v);
      if (hit != orbit_index_.end())
        for (const auto& [j, c] : terms) part.overlap += c * G(hit->second, j);
    }
    return r2_cache_.emplace(key, std::move(part)).first->second;
  }

  Real fluct_structured(const AdditiveOperatorSpec& spec) {
    const int lsc = scope_length(state_.layout, spec.scope);
    Real h2 = 0;
    Complex h1{};
    const bool use_r1 = spec.scope != Scope::r2;
    const bool use_r2 = spec.scope != Scope::r1;
    if (use_r1) {
      const R1Part& p1 = r1_part(spec, lsc);
      h2 += p1.norm2;
      h1 += p1.overlap;
    }
    if (use_r2) {
      const R2Part& p2 = r2_part(spec, lsc);
      h2 += p2.norm2;
      h1 += p2.overlap;
    }
    if (use_r1 && use_r2) {
      const R1Part& p1 = r1_part(spec, lsc);
      const R2Part& p2 = r2_part(spec, lsc);
      Complex mixed{};
      for (const auto& [v, terms] : p2.columns) {
        const auto hit = orbit_index_.find(v);
        if (hit == orbit_index_.end()) continue;
        for (const auto& [j, c] : terms) mixed += c * p1.cross(hit->second, j);
      }
      h2 += 2 * mixed.real();
    }
    const Real m1 = h1.real() / Real(lsc);
    return detail::clamp_variance(h2 / Real(lsc) / Real(lsc) - m1 * m1);
  }

  const core::PureState<Real>& state_;
  std::unordered_map<std::int64_t, std::int64_t> orbit_index_;
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> gram_;
  std::map<Key, R1Part> r1_cache_;
  std::map<Key, R2Part> r2_cache_;
};

// Fluctuation of the k = 0 (magnetization) operator.
template <typename Real>
Real magnetization_fluct(const core::PureState<Real>& state, Pauli alpha,
                         Scope scope = Scope::all) {
  StateMoments<Real> moments(state);
  return moments.fluct({alpha, scope, 0});
}

// Fluctuation of a general wave-number operator.
template <typename Real>
Real fourier_fluct(const core::PureState<Real>& state,
                   const AdditiveOperatorSpec& spec) {
  StateMoments<Real> moments(state);
  return moments.fluct(spec);
}

// Share of the full-scope fluctuation carried by register 1. Undefined when
// the full fluctuation is consistent with zero.
template <typename Real>
std::optional<Real> w_ratio(const core::PureState<Real>& state, Pauli alpha) {
  StateMoments<Real> moments(state);
  const Real full = moments.fluct({alpha, Scope::all, 0});
  if (full <= Real{1e-14}) return std::nullopt;
  return moments.fluct({alpha, Scope::r1, 0}) / full;
}

// Evaluates every spec on every captured position of a run.
template <typename Real>
std::vector<FluctuationRecord> trace_fluctuations(
    const std::map<int, core::PureState<Real>>& run,
    std::span<const AdditiveOperatorSpec> specs) {
  std::vector<FluctuationRecord> records;
  records.reserve(run.size() * specs.size());
  for (const auto& [m, state] : run) {
    StateMoments<Real> moments(state);
    for (const auto& spec : specs)
      records.push_back({m, spec, double(moments.fluct(spec))});
  }
  return records;
}

// Size classification of a fluctuation across system sizes. `p` is the
// exponent in fluct ~ L^(p-2) fitted by least squares on the log-log points.
enum class Classification { nfs, afs, intermediate };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::nfs: return "nfs";
    case Classification::afs: return "afs";
    case Classification::intermediate: return "intermediate";
  }
  return "?";
}

struct PIndexEstimate {
  std::optional<double> p;
  Classification classification = Classification::nfs;
};

// Values below 1e-14 are treated as exact zeros: all zero, or zero at the
// largest size, classifies as NFS with no exponent (a vanished fluctuation
// cannot be anomalous, whose floor is 0.1 at the largest size). A zero at a
// smaller size with growth above it has no power law and is an error, as is
// any value meaningfully below zero.
inline PIndexEstimate estimate_p(
    std::span<const std::pair<double, double>> points) {
  if (points.size() < 2)
    throw std::invalid_argument("exponent fit needs at least two sizes");
  std::vector<std::pair<double, double>> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [l, f] : sorted) {
    if (l <= 0) throw std::invalid_argument("system size must be positive");
    if (f < -1e-12) throw std::invalid_argument("negative fluctuation value");
  }
  const bool largest_zero = sorted.back().second < 1e-14;
  bool any_zero = false;
  for (const auto& [l, f] : sorted) any_zero |= (f < 1e-14);
  if (largest_zero) return {std::nullopt, Classification::nfs};
  if (any_zero)
    throw std::invalid_argument(
        "fluctuation vanishes at a smaller size only; no power law fits");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [l, f] : sorted) {
    const double xi = std::log(l);
    const double yi = std::log(f);
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
  }
  const double n = double(sorted.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0)
    throw std::invalid_argument("exponent fit needs distinct sizes");
  const double slope = (n * sxy - sx * sy) / denom;
  const double p = 2.0 + slope;

  Classification cls = Classification::intermediate;
  if (p >= 1.5 && sorted.back().second >= 0.1)
    cls = Classification::afs;
  else if (p <= 1.2)
    cls = Classification::nfs;
  return {p, cls};
}

}  // namespace shorsim::obs

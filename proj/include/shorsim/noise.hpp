// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "shorsim/philox.hpp"
#include "shorsim/state.hpp"

namespace shorsim::noise {

// Default master seed for noise streams. Pinned by a golden acceptance run;
// every ensemble quantity is reproducible from it alone.
inline constexpr std::uint64_t kDefaultSeed = 1;

// Classical low-frequency field coupled to every qubit between steps. The
// three component slots follow the fixed axis order x, y, z. All times are
// in units of the step duration tau; couplings are per step.
struct NoiseConfig {
  double lambda = 0.0015;
  std::array<bool, 3> components{true, false, false};
  double omega_high_factor = 4.1;
  int n_nu = 40;
  std::uint64_t seed = kDefaultSeed;
  int substeps = 4096;

  int active_count() const {
    return int(components[0]) + int(components[1]) + int(components[2]);
  }
};

inline constexpr char kAxisLabel[3] = {'x', 'y', 'z'};

// Harmonics resolved on the run: spacing 2 pi / (q + 1) set by the total
// duration of a q-step run (one extra step of settling), cut off at
// omega_high_factor cycles per step.
inline Eigen::VectorXd frequency_grid(int q_steps,
                                      double omega_high_factor = 4.1) {
  if (q_steps < 1) throw std::invalid_argument("run must have steps");
  if (omega_high_factor <= 0)
    throw std::invalid_argument("cutoff factor must be positive");
  const double delta = 2.0 * std::numbers::pi / double(q_steps + 1);
  const int j_max = int(std::floor(omega_high_factor * (q_steps + 1)));
  Eigen::VectorXd omega(j_max);
  for (int j = 1; j <= j_max; ++j) omega[j - 1] = j * delta;
  return omega;
}

// E[Phi^2] over the phase ensemble, in closed form: each harmonic
// contributes (1 - cos omega tau) / (omega^3 tau).
inline double analytic_autocorrelation(const Eigen::VectorXd& omega,
                                       double tau = 1.0) {
  return ((1.0 - (omega * tau).array().cos()) /
          (omega.array().cube() * tau))
      .sum();
}

// Integral of the field over the window [t0, t1], given its harmonic
// phases: sum_j (omega_j tau)^(-1/2) (sin(omega_j t1 + theta_j) -
// sin(omega_j t0 + theta_j)) / omega_j.
inline double noise_integral_window(const Eigen::VectorXd& omega,
                                    const Eigen::VectorXd& theta, double t0,
                                    double t1, double tau = 1.0) {
  if (omega.size() != theta.size())
    throw std::invalid_argument("phase table does not match the grid");
  return (((omega.array() * t1 + theta.array()).sin() -
           (omega.array() * t0 + theta.array()).sin()) /
          (omega.array() * (omega.array() * tau).sqrt()))
      .sum();
}

// Integral of the field over one full step.
inline double noise_integral(const Eigen::VectorXd& omega,
                             const Eigen::VectorXd& theta, double tau = 1.0) {
  return noise_integral_window(omega, theta, 0.0, tau, tau);
}

namespace detail {

// One phase draw, addressed by (seed; harmonic, realization, axis, stream).
// Stream 0 feeds realizations, stream 1 the Monte Carlo estimator, so the
// two never overlap.
inline double phase_at(std::uint64_t seed, std::uint32_t harmonic,
                       std::uint32_t nu, std::uint32_t axis,
                       std::uint32_t stream) {
  const double u = uniform_at(seed, harmonic, nu, axis, stream);
  return (2.0 * u - 1.0) * std::numbers::pi;
}

inline Eigen::Matrix2cd pauli_axis(int axis) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd s;
  switch (axis) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, -1i, 1i, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

// exp(-i angle sigma_axis) in closed form.
inline Eigen::Matrix2cd axis_exponential(double angle, int axis) {
  return std::cos(angle) * Eigen::Matrix2cd::Identity() -
         std::complex<double>(0, std::sin(angle)) * pauli_axis(axis);
}

// exp(-i v . sigma) in closed form for a real coefficient vector v.
inline Eigen::Matrix2cd vector_exponential(const std::array<double, 3>& v) {
  const double a = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (a == 0.0) return Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd direction = Eigen::Matrix2cd::Zero();
  for (int axis = 0; axis < 3; ++axis)
    if (v[axis] != 0.0) direction += (v[axis] / a) * pauli_axis(axis);
  return std::cos(a) * Eigen::Matrix2cd::Identity() -
         std::complex<double>(0, std::sin(a)) * direction;
}

}  // namespace detail

// One ensemble member: the drawn phases, the per-axis field integrals over
// one step, and the derived per-qubit step propagator.
struct NoiseRealization {
  int nu = 0;
  std::array<Eigen::VectorXd, 3> theta;
  std::array<double, 3> phi{};
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
};

// Per-qubit propagator for one step. A single active component integrates
// exactly to exp(-i lambda Phi sigma). With several components the step is
// split into substeps, each applying the closed-form exponential of the
// combined generator with the exact field integrals over that window; the
// neglected time ordering is the only approximation and shrinks
// quadratically with the substep width.
inline Eigen::Matrix2cd step_unitary(const NoiseRealization& realization,
                                     const NoiseConfig& config,
                                     const Eigen::VectorXd& omega,
                                     int substeps_override = 0,
                                     double tau = 1.0) {
  std::vector<int> active;
  for (int axis = 0; axis < 3; ++axis)
    if (config.components[axis]) active.push_back(axis);
  if (active.empty()) return Eigen::Matrix2cd::Identity();
  if (active.size() == 1) {
    const int axis = active.front();
    return detail::axis_exponential(config.lambda * realization.phi[axis],
                                    axis);
  }
  const int n_sub = substeps_override > 0 ? substeps_override
                                          : config.substeps;
  if (n_sub < 1) throw std::invalid_argument("substep count must be positive");
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  for (int k = 0; k < n_sub; ++k) {
    const double t0 = tau * k / n_sub;
    const double t1 = tau * (k + 1) / n_sub;
    std::array<double, 3> v{};
    for (int axis : active)
      v[axis] = config.lambda * noise_integral_window(
                                    omega, realization.theta[axis], t0, t1,
                                    tau);
    u = detail::vector_exponential(v) * u;
  }
  return u;
}

// Draws realization nu of the configured ensemble on the given grid.
inline NoiseRealization sample_realization(const NoiseConfig& config,
                                           const Eigen::VectorXd& omega,
                                           int nu, double tau = 1.0) {
  NoiseRealization realization;
  realization.nu = nu;
  for (int axis = 0; axis < 3; ++axis) {
    if (!config.components[axis]) continue;
    Eigen::VectorXd theta(omega.size());
    for (std::int64_t j = 0; j < omega.size(); ++j)
      theta[j] = detail::phase_at(config.seed, std::uint32_t(j),
                                  std::uint32_t(nu), std::uint32_t(axis), 0);
    realization.phi[axis] = noise_integral(omega, theta, tau);
    realization.theta[axis] = std::move(theta);
  }
  realization.u = step_unitary(realization, config, omega, 0, tau);
  return realization;
}

// E[Phi^2] per active component, both in closed form and from a dedicated
// Monte Carlo phase stream.
struct AutocorrelationEstimate {
  double analytic = 0;
  double mc = 0;
  double mc_stderr = 0;
};

inline std::array<std::optional<AutocorrelationEstimate>, 3>
autocorrelation_C(const NoiseConfig& config, const Eigen::VectorXd& omega,
                  int n_mc = 10000, double tau = 1.0) {
  std::array<std::optional<AutocorrelationEstimate>, 3> out;
  const double analytic = analytic_autocorrelation(omega, tau);
  for (int axis = 0; axis < 3; ++axis) {
    if (!config.components[axis]) continue;
    double sum = 0, sum_sq = 0;
    Eigen::VectorXd theta(omega.size());
    for (int trial = 0; trial < n_mc; ++trial) {
      for (std::int64_t j = 0; j < omega.size(); ++j)
        theta[j] = detail::phase_at(config.seed, std::uint32_t(j),
                                    std::uint32_t(trial), std::uint32_t(axis),
                                    1);
      const double phi = noise_integral(omega, theta, tau);
      sum += phi * phi;
      sum_sq += phi * phi * phi * phi;
    }
    AutocorrelationEstimate est;
    est.analytic = analytic;
    est.mc = sum / n_mc;
    const double var = (sum_sq - sum * sum / n_mc) / (n_mc - 1);
    est.mc_stderr = std::sqrt(var / n_mc);
    out[axis] = est;
  }
  return out;
}

// Applies the per-qubit propagator to every qubit of both registers.
// The structured backend only admits diagonal propagators, which act as a
// phase keyed by the basis label's population count.
template <typename Real>
void apply_noise(core::PureState<Real>& state, const Eigen::Matrix2cd& u) {
  using Complex = typename core::PureState<Real>::Complex;
  const int total = state.layout.total_qubits();
  if (state.backend == core::Backend::dense) {
    const Complex u00(u(0, 0)), u01(u(0, 1)), u10(u(1, 0)), u11(u(1, 1));
    const std::int64_t dim = state.amps.size();
    for (int q = 0; q < total; ++q) {
      const std::int64_t mask = std::int64_t{1} << q;
      for (std::int64_t i = 0; i < dim; ++i) {
        if (i & mask) continue;
        const Complex a0 = state.amps[i];
        const Complex a1 = state.amps[i | mask];
        state.amps[i] = u00 * a0 + u01 * a1;
        state.amps[i | mask] = u10 * a0 + u11 * a1;
      }
    }
    return;
  }
  if (std::abs(u(0, 1)) > 1e-15 || std::abs(u(1, 0)) > 1e-15)
    throw std::invalid_argument(
        "structured states only support diagonal per-qubit noise");
  const Complex d0(u(0, 0)), d1(u(1, 1));
  std::vector<Complex> pow0(total + 1), pow1(total + 1);
  pow0[0] = pow1[0] = Complex{1};
  for (int p = 1; p <= total; ++p) {
    pow0[p] = pow0[p - 1] * d0;
    pow1[p] = pow1[p - 1] * d1;
  }
  const std::int64_t rows = state.layout.r1_dim();
  for (std::int64_t j = 0; j < state.table.cols(); ++j) {
    const int pop_s = std::popcount(std::uint64_t(state.group[j]));
    auto col = state.table.col(j);
    for (std::int64_t a = 0; a < rows; ++a) {
      const int pop = pop_s + std::popcount(std::uint64_t(a));
      col(a) *= pow0[total - pop] * pow1[pop];
    }
  }
}

}  // namespace shorsim::noise

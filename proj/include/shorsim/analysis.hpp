// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "shorsim/noise.hpp"
#include "shorsim/number_theory.hpp"
#include "shorsim/observables.hpp"
#include "shorsim/parallel.hpp"
#include "shorsim/schedule.hpp"
#include "shorsim/state.hpp"

namespace shorsim::analysis {

struct EnsembleStat {
  double mean = 0;
  double sem = 0;  // standard error of the mean
};

inline EnsembleStat mean_sem(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("empty sample");
  double sum = 0;
  for (double v : values) sum += v;
  const double mean = sum / double(n);
  if (n == 1) return {mean, 0.0};
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / double(n - 1) / double(n))};
}

// Mean squared overlap of the ensemble with the unperturbed state.
template <typename Real>
EnsembleStat fidelity_ensemble(
    const core::PureState<Real>& clean,
    std::span<const core::PureState<Real>> ensemble) {
  std::vector<double> f(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i)
    f[i] = std::norm(core::inner_product(clean, ensemble[i]));
  return mean_sem(f);
}

namespace detail {

// Entropy of the ensemble's average density matrix in the second Renyi
// sense: S = -ln[(1/n^2) sum_ij |<psi_i|psi_j>|^2], from the pairwise
// overlap Gram matrix. The jackknife drops one member at a time; dropping
// member i removes its row and column, whose shared diagonal entry is
// added back once.
struct EntropyFromGram {
  double s = 0;
  double sem = 0;
};

inline EntropyFromGram entropy_from_overlaps(const Eigen::MatrixXd& w) {
  const std::int64_t n = w.rows();
  EntropyFromGram out;
  const double total = w.sum();
  out.s = -std::log(total / double(n) / double(n));
  if (n < 2) return out;
  std::vector<double> loo(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double reduced = total - 2.0 * w.row(i).sum() + w(i, i);
    loo[i] = -std::log(reduced / double(n - 1) / double(n - 1));
  }
  double mean = 0;
  for (double v : loo) mean += v;
  mean /= double(n);
  double ss = 0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  out.sem = std::sqrt(ss * double(n - 1) / double(n));
  return out;
}

}  // namespace detail

template <typename Real>
EnsembleStat entropy_ensemble(
    std::span<const core::PureState<Real>> ensemble) {
  const std::int64_t n = static_cast<std::int64_t>(ensemble.size());
  if (n == 0) throw std::invalid_argument("empty ensemble");
  Eigen::MatrixXd w(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      w(i, j) = std::norm(core::inner_product(ensemble[i], ensemble[j]));
  const auto est = detail::entropy_from_overlaps(w);
  return {est.s, est.sem};
}

// Decoherence rate implied by an entropy accumulated over one step.
inline double gamma_from_entropy(double s, double tau = 1.0) {
  return s / (2.0 * tau);
}

// Success probability lost per unit of fidelity lost. Undefined when the
// fidelity never dropped.
inline std::optional<double> reduction_rate(double t_clean, double t_m,
                                            double f_m) {
  if (f_m >= 1.0 - 1e-12) return std::nullopt;
  return (t_clean - t_m) / (1.0 - f_m);
}

// Second-order prediction for one noisy step on a given state: the fidelity
// drop is lambda^2 L^2 C times the summed fluctuation of the active
// magnetization components, and the rate is that drop per step.
struct PerturbativePrediction {
  double fidelity = 1.0;
  double gamma = 0.0;
  double fluct_sum = 0.0;
};

template <typename Real>
PerturbativePrediction perturbative_fidelity(
    const core::PureState<Real>& state, const noise::NoiseConfig& config,
    double c_value, double tau = 1.0) {
  obs::StateMoments<Real> moments(state);
  double fluct_sum = 0;
  const obs::Pauli axes[3] = {obs::Pauli::x, obs::Pauli::y, obs::Pauli::z};
  for (int axis = 0; axis < 3; ++axis)
    if (config.components[axis])
      fluct_sum += double(moments.fluct({axes[axis], obs::Scope::all, 0}));
  const double l_total = state.layout.total_qubits();
  const double drop =
      config.lambda * config.lambda * l_total * l_total * c_value * fluct_sum;
  return {1.0 - drop, drop / tau, fluct_sum};
}

// Ensemble measurement at one interruption position.
struct StepNoiseReport {
  int m = 0;
  double f = 0, f_sem = 0;
  double s = 0, s_sem = 0;
  double gamma = 0;
  double t = 0, t_sem = 0;
  std::optional<double> r_m;
};

struct ScanResult {
  double t_clean = 0;
  double c_analytic = 0;
  std::int64_t order = 0;
  int q = 0;
  std::vector<StepNoiseReport> reports;
};

// Interrupts the clean run at each requested position (every position when
// none are given), applies one noisy step to each ensemble member, and
// measures fidelity, entropy, and the success probability of the clean
// continuation. Realizations are drawn once and reused at every position,
// and ensemble members are processed in fixed slots, so the result does not
// depend on the worker count.
inline ScanResult step_noise_scan(const core::RegisterLayout& layout,
                                  const noise::NoiseConfig& config,
                                  std::span<const int> positions = {},
                                  unsigned max_threads = 0,
                                  std::size_t amplitude_cap =
                                      core::kDefaultAmplitudeCap) {
  using State = core::PureState<double>;
  const shor::Schedule schedule = shor::build_schedule(layout);
  const int q = schedule.q();

  std::vector<int> wanted(positions.begin(), positions.end());
  if (wanted.empty()) {
    wanted.resize(q + 1);
    for (int m = 0; m <= q; ++m) wanted[m] = m;
  }
  for (int m : wanted)
    if (m < 0 || m > q)
      throw std::invalid_argument("scan position outside the run");

  std::vector<int> capture = wanted;
  capture.push_back(q);
  const auto clean = shor::run_clean<double>(
      layout, core::Backend::dense, shor::CaptureSet::at(capture),
      amplitude_cap);

  ScanResult result;
  result.q = q;
  result.order = shor::multiplicative_order(layout.x, layout.n);
  const shor::SuccessSet set = shor::success_set(layout, result.order);
  result.t_clean = shor::success_probability(clean.at(q), set);

  const Eigen::VectorXd omega =
      noise::frequency_grid(q, config.omega_high_factor);
  result.c_analytic = noise::analytic_autocorrelation(omega);

  const int n = config.n_nu;
  if (n < 1) throw std::invalid_argument("ensemble needs members");
  std::vector<noise::NoiseRealization> members(n);
  for (int nu = 0; nu < n; ++nu)
    members[nu] = noise::sample_realization(config, omega, nu);

  const std::int64_t dim = layout.dense_dim();
  Eigen::MatrixXcd ensemble(dim, n);
  std::vector<double> f_i(n), t_i(n);

  for (int m : wanted) {
    const State& base = clean.at(m);
    parallel_for_index(
        n,
        [&](std::int64_t i) {
          State noisy = base;
          noise::apply_noise(noisy, members[i].u);
          ensemble.col(i) = noisy.amps;
          f_i[i] = std::norm(core::inner_product(base, noisy));
          for (int step = m + 1; step <= q; ++step)
            core::apply_step(noisy, schedule.steps[step - 1]);
          t_i[i] = shor::success_probability(noisy, set);
        },
        max_threads);

    StepNoiseReport report;
    report.m = m;
    const EnsembleStat f = mean_sem(f_i);
    const EnsembleStat t = mean_sem(t_i);
    Eigen::MatrixXd w = (ensemble.adjoint() * ensemble).cwiseAbs2();
    const auto entropy = detail::entropy_from_overlaps(w);
    report.f = f.mean;
    report.f_sem = f.sem;
    report.s = entropy.s;
    report.s_sem = entropy.sem;
    report.gamma = gamma_from_entropy(entropy.s);
    report.t = t.mean;
    report.t_sem = t.sem;
    report.r_m = reduction_rate(result.t_clean, t.mean, f.mean);
    result.reports.push_back(report);
  }
  return result;
}

// Product of per-step survival factors over the interior positions
// m = 1..q, and the exponential form of the same estimate.
struct CombinedSuccessEstimate {
  double product = 0;
  double exponential = 0;
  int factors = 0;
};

inline CombinedSuccessEstimate combined_success_estimate(
    std::span<const StepNoiseReport> reports, double t_clean) {
  if (t_clean <= 0) throw std::invalid_argument("clean run never succeeds");
  CombinedSuccessEstimate est;
  est.product = t_clean;
  double exponent = 0;
  for (const auto& report : reports) {
    if (report.m < 1) continue;
    est.product *= report.t / t_clean;
    exponent += (t_clean - report.t) / t_clean;
    ++est.factors;
  }
  est.exponential = t_clean * std::exp(-exponent);
  return est;
}

// Least squares slope of ln gamma against ln L, reported as the excess over
// linear growth.
struct FragilityFit {
  double exponent = 0;  // d ln gamma / d ln L
  double delta = 0;     // exponent - 1
};

inline FragilityFit fragility_fit(
    std::span<const std::pair<double, double>> l_gamma_points) {
  if (l_gamma_points.size() < 2)
    throw std::invalid_argument("fragility fit needs at least two sizes");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [l, gamma] : l_gamma_points) {
    if (l <= 0 || gamma <= 0)
      throw std::invalid_argument("fragility fit needs positive points");
    const double xi = std::log(l);
    const double yi = std::log(gamma);
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
  }
  const double n = double(l_gamma_points.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0)
    throw std::invalid_argument("fragility fit needs distinct sizes");
  FragilityFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.delta = fit.exponent - 1.0;
  return fit;
}

// One row of a coupling sweep: a single component, position, and coupling.
struct SweepRow {
  int m = 0;
  int axis = 0;
  double lambda = 0;
  double f = 0, f_sem = 0;
  double t = 0, t_sem = 0;
  std::optional<double> r_m;
};

struct SweepResult {
  double t_clean = 0;
  double c_analytic = 0;
  int q = 0;
  std::vector<SweepRow> rows;
};

// Sweeps the coupling for each active component separately at the given
// positions. The phase draws are shared across couplings (the single-axis
// propagator is exact in Phi), so rows differing only in lambda use common
// random numbers. Entropy is not measured here; members are visited one at
// a time without storing the ensemble.
inline SweepResult state_noise_sweep(const core::RegisterLayout& layout,
                                     const noise::NoiseConfig& base,
                                     std::span<const int> positions,
                                     std::span<const double> lambdas,
                                     unsigned max_threads = 0,
                                     std::size_t amplitude_cap =
                                         core::kDefaultAmplitudeCap) {
  using State = core::PureState<double>;
  const shor::Schedule schedule = shor::build_schedule(layout);
  const int q = schedule.q();
  for (int m : positions)
    if (m < 0 || m > q)
      throw std::invalid_argument("sweep position outside the run");
  if (positions.empty() || lambdas.empty())
    throw std::invalid_argument("sweep needs positions and couplings");

  std::vector<int> capture(positions.begin(), positions.end());
  capture.push_back(q);
  const auto clean = shor::run_clean<double>(
      layout, core::Backend::dense, shor::CaptureSet::at(capture),
      amplitude_cap);

  SweepResult result;
  result.q = q;
  const std::int64_t order = shor::multiplicative_order(layout.x, layout.n);
  const shor::SuccessSet set = shor::success_set(layout, order);
  result.t_clean = shor::success_probability(clean.at(q), set);

  const Eigen::VectorXd omega =
      noise::frequency_grid(q, base.omega_high_factor);
  result.c_analytic = noise::analytic_autocorrelation(omega);

  const int n = base.n_nu;
  if (n < 1) throw std::invalid_argument("ensemble needs members");

  std::vector<double> f_i(n), t_i(n);
  for (int axis = 0; axis < 3; ++axis) {
    if (!base.components[axis]) continue;
    noise::NoiseConfig single = base;
    single.components = {axis == 0, axis == 1, axis == 2};

    // Phi determines the single-axis propagator exactly, so only the
    // integrals are kept per member.
    std::vector<double> phi(n);
    for (int nu = 0; nu < n; ++nu) {
      const auto realization =
          noise::sample_realization(single, omega, nu);
      phi[nu] = realization.phi[axis];
    }

    for (int m : positions) {
      const State& base_state = clean.at(m);
      for (double lambda : lambdas) {
        parallel_for_index(
            n,
            [&](std::int64_t i) {
              const Eigen::Matrix2cd u =
                  noise::detail::axis_exponential(lambda * phi[i], axis);
              State noisy = base_state;
              noise::apply_noise(noisy, u);
              f_i[i] = std::norm(core::inner_product(base_state, noisy));
              for (int step = m + 1; step <= q; ++step)
                core::apply_step(noisy, schedule.steps[step - 1]);
              t_i[i] = shor::success_probability(noisy, set);
            },
            max_threads);
        SweepRow row;
        row.m = m;
        row.axis = axis;
        row.lambda = lambda;
        const EnsembleStat f = mean_sem(f_i);
        const EnsembleStat t = mean_sem(t_i);
        row.f = f.mean;
        row.f_sem = f.sem;
        row.t = t.mean;
        row.t_sem = t.sem;
        row.r_m = reduction_rate(result.t_clean, t.mean, f.mean);
        result.rows.push_back(row);
      }
    }
  }
  return result;
}

}  // namespace shorsim::analysis

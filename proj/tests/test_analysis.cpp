// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracle_helpers.hpp"
#include "shorsim/analysis.hpp"

using namespace shorsim;
using core::Backend;

TEST_CASE("ensemble mean and its error") {
  const std::vector<double> flat{1.0, 1.0, 1.0};
  const auto a = analysis::mean_sem(flat);
  CHECK(a.mean == 1.0);
  CHECK(a.sem == 0.0);

  const std::vector<double> pair{1.0, 3.0};
  const auto b = analysis::mean_sem(pair);
  CHECK(b.mean == doctest::Approx(2.0));
  CHECK(b.sem == doctest::Approx(1.0));

  const std::vector<double> one{0.7};
  CHECK(analysis::mean_sem(one).sem == 0.0);
  CHECK_THROWS_AS(analysis::mean_sem(std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("fidelity of an unperturbed ensemble is one") {
  const auto lay = oracle::toy_layout(4, 3);
  std::mt19937_64 rng(17);
  const auto clean = oracle::random_state(lay, rng);
  const std::vector<core::PureState<double>> ensemble{clean, clean, clean};
  const auto f = analysis::fidelity_ensemble<double>(clean, ensemble);
  CHECK(f.mean == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(f.sem <= 1e-14);
}

TEST_CASE("ensemble entropy from pairwise overlaps") {
  const auto lay = oracle::toy_layout(3, 2);
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(lay.dense_dim());
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(lay.dense_dim());
  e0[0] = 1.0;
  e1[1] = 1.0;
  const auto s0 = oracle::wrap_dense(lay, e0);
  const auto s1 = oracle::wrap_dense(lay, e1);

  SUBCASE("identical members carry no entropy") {
    const std::vector<core::PureState<double>> ensemble{s0, s0, s0, s0};
    const auto s = analysis::entropy_ensemble<double>(ensemble);
    CHECK(std::abs(s.mean) <= 1e-13);
    CHECK(s.sem <= 1e-13);
  }

  SUBCASE("an even split over orthogonal members saturates at ln 2") {
    const std::vector<core::PureState<double>> ensemble{s0, s1};
    const auto s = analysis::entropy_ensemble<double>(ensemble);
    CHECK(s.mean == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }

  SUBCASE("a lopsided split lands in between with a spread") {
    const std::vector<core::PureState<double>> ensemble{s0, s0, s1};
    const auto s = analysis::entropy_ensemble<double>(ensemble);
    CHECK(s.mean == doctest::Approx(std::log(9.0 / 5.0)).epsilon(1e-12));
    CHECK(s.sem > 0.0);
  }

  SUBCASE("a single member is its own average") {
    const std::vector<core::PureState<double>> ensemble{s1};
    const auto s = analysis::entropy_ensemble<double>(ensemble);
    CHECK(std::abs(s.mean) <= 1e-13);
    CHECK(s.sem == 0.0);
  }
}

TEST_CASE("rate conversions") {
  CHECK(analysis::gamma_from_entropy(0.3) == doctest::Approx(0.15));
  CHECK(analysis::gamma_from_entropy(0.3, 2.0) == doctest::Approx(0.075));

  const auto r = analysis::reduction_rate(0.228, 0.114, 0.5);
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(0.228));
  const auto flatline = analysis::reduction_rate(0.2, 0.2, 0.9);
  REQUIRE(flatline.has_value());
  CHECK(*flatline == doctest::Approx(0.0));
  CHECK(!analysis::reduction_rate(0.2, 0.1, 1.0 - 1e-14).has_value());
}

TEST_CASE("combined success estimate over interior positions") {
  const double t_clean = 0.2;
  std::vector<analysis::StepNoiseReport> reports(4);
  for (int m = 0; m < 4; ++m) {
    reports[m].m = m;
    reports[m].t = (m == 0) ? 0.5 : 0.99 * t_clean;
  }
  const auto est = analysis::combined_success_estimate(reports, t_clean);
  CHECK(est.factors == 3);
  CHECK(est.product == doctest::Approx(0.2 * 0.99 * 0.99 * 0.99));
  CHECK(est.exponential == doctest::Approx(0.2 * std::exp(-0.03)));
  CHECK(std::abs(est.product - est.exponential) / est.product < 0.01);
  CHECK_THROWS_AS(analysis::combined_success_estimate(reports, 0.0),
                  std::invalid_argument);
}

TEST_CASE("fragility fit recovers exact power laws") {
  using points_t = std::vector<std::pair<double, double>>;
  const points_t points{{15.0, 2.0 * std::pow(15.0, 1.3)},
                        {30.0, 2.0 * std::pow(30.0, 1.3)}};
  const auto fit = analysis::fragility_fit(points);
  CHECK(fit.exponent == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(fit.delta == doctest::Approx(0.3).epsilon(1e-10));

  CHECK_THROWS_AS(analysis::fragility_fit(points_t{{15.0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analysis::fragility_fit(points_t{{15.0, 0.0}, {30.0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analysis::fragility_fit(points_t{{15.0, 1.0}, {15.0, 2.0}}),
                  std::invalid_argument);
}

TEST_CASE("second order prediction is additive over components") {
  const auto lay = core::make_layout(21, 2);
  const auto run =
      shor::run_clean(lay, Backend::dense, shor::CaptureSet::at({20}));
  const auto& state = run.at(20);
  const double c_value = 24.139176;

  noise::NoiseConfig x_only;
  x_only.components = {true, false, false};
  noise::NoiseConfig z_only;
  z_only.components = {false, false, true};
  noise::NoiseConfig both;
  both.components = {true, false, true};

  const auto px = analysis::perturbative_fidelity(state, x_only, c_value);
  const auto pz = analysis::perturbative_fidelity(state, z_only, c_value);
  const auto pxz = analysis::perturbative_fidelity(state, both, c_value);
  CHECK(pxz.fluct_sum ==
        doctest::Approx(px.fluct_sum + pz.fluct_sum).epsilon(1e-12));
  CHECK(1.0 - pxz.fidelity ==
        doctest::Approx((1.0 - px.fidelity) + (1.0 - pz.fidelity))
            .epsilon(1e-10));
  CHECK(pxz.gamma == doctest::Approx(1.0 - pxz.fidelity).epsilon(1e-12));

  const double fluct =
      obs::magnetization_fluct(state, obs::Pauli::x, obs::Scope::all);
  const double lambda = x_only.lambda;
  CHECK(1.0 - px.fidelity ==
        doctest::Approx(lambda * lambda * 225.0 * c_value * fluct)
            .epsilon(1e-12));
}

TEST_CASE("measured fidelity follows the second order prediction") {
  const auto lay = core::make_layout(15, 7);
  const auto schedule = shor::build_schedule(lay);
  const auto grid = noise::frequency_grid(schedule.q());
  const double c_value = noise::analytic_autocorrelation(grid);
  const auto run = shor::run_clean(lay, Backend::dense,
                                   shor::CaptureSet::at({16, 52}));

  noise::NoiseConfig config;
  config.components = {false, false, true};
  config.lambda = 0.004;
  const int n = 500;

  for (const int m : {16, 52}) {
    const auto& clean = run.at(m);
    std::vector<core::PureState<double>> ensemble;
    ensemble.reserve(n);
    for (int nu = 0; nu < n; ++nu) {
      const auto realization = noise::sample_realization(config, grid, nu);
      auto noisy = clean;
      noise::apply_noise(noisy, realization.u);
      ensemble.push_back(std::move(noisy));
    }
    const auto f = analysis::fidelity_ensemble<double>(clean, ensemble);
    const auto pred = analysis::perturbative_fidelity(clean, config, c_value);
    CHECK(std::abs(f.mean - pred.fidelity) <= 3.5 * f.sem + 1e-9);
    CHECK(f.sem > 0.0);
  }
}

TEST_CASE("step noise scan at one interruption") {
  const auto lay = core::make_layout(15, 7);
  noise::NoiseConfig config;
  config.components = {false, false, true};
  config.n_nu = 20;
  const std::vector<int> positions{16};
  const auto scan = analysis::step_noise_scan(lay, config, positions);

  CHECK(scan.q == 52);
  CHECK(scan.order == 4);
  CHECK(scan.c_analytic ==
        doctest::Approx(
            noise::analytic_autocorrelation(noise::frequency_grid(52)))
            .epsilon(1e-12));
  REQUIRE(scan.reports.size() == 1);
  const auto& report = scan.reports[0];
  CHECK(report.m == 16);
  CHECK(report.f < 1.0);
  CHECK(report.f > 0.99);
  CHECK(report.s >= 0.0);
  CHECK(report.gamma == doctest::Approx(report.s / 2.0).epsilon(1e-14));
  // At ensemble size the mixing entropy tracks twice the fidelity loss.
  CHECK(std::abs(report.s - 2.0 * (1.0 - report.f)) <= (1.0 - report.f));
  CHECK(report.t >= 0.0);
  CHECK(report.t <= 1.0);
  REQUIRE(report.r_m.has_value());

  CHECK_THROWS_AS(analysis::step_noise_scan(lay, config,
                                            std::vector<int>{53}),
                  std::invalid_argument);
  noise::NoiseConfig empty = config;
  empty.n_nu = 0;
  CHECK_THROWS_AS(analysis::step_noise_scan(lay, empty, positions),
                  std::invalid_argument);
}

TEST_CASE("longitudinal noise after the last step never hurts success") {
  const auto lay = core::make_layout(15, 7);
  noise::NoiseConfig config;
  config.components = {false, false, true};
  config.lambda = 0.01;
  config.n_nu = 10;
  const std::vector<int> positions{52};
  const auto scan = analysis::step_noise_scan(lay, config, positions);
  REQUIRE(scan.reports.size() == 1);
  CHECK(std::abs(scan.reports[0].t - scan.t_clean) <= 1e-12);
  CHECK(scan.reports[0].t_sem <= 1e-13);
  CHECK(scan.reports[0].f < 1.0);
}

TEST_CASE("scan results do not depend on the worker count") {
  const auto lay = core::make_layout(15, 7);
  noise::NoiseConfig config;
  config.components = {true, false, true};
  config.n_nu = 12;
  config.substeps = 64;
  const std::vector<int> positions{8, 16};
  const auto serial = analysis::step_noise_scan(lay, config, positions, 1);
  const auto threaded = analysis::step_noise_scan(lay, config, positions, 3);
  REQUIRE(serial.reports.size() == threaded.reports.size());
  for (std::size_t i = 0; i < serial.reports.size(); ++i) {
    CHECK(serial.reports[i].f == threaded.reports[i].f);
    CHECK(serial.reports[i].s == threaded.reports[i].s);
    CHECK(serial.reports[i].t == threaded.reports[i].t);
    CHECK(serial.reports[i].t_sem == threaded.reports[i].t_sem);
  }
}

TEST_CASE("full coverage scan feeds the combined estimate") {
  const auto lay = core::make_layout(15, 7);
  noise::NoiseConfig config;
  config.components = {false, false, true};
  config.n_nu = 6;
  const auto scan = analysis::step_noise_scan(lay, config);
  REQUIRE(scan.reports.size() == std::size_t(scan.q) + 1);
  for (int m = 0; m <= scan.q; ++m) CHECK(scan.reports[m].m == m);

  const auto est =
      analysis::combined_success_estimate(scan.reports, scan.t_clean);
  CHECK(est.factors == scan.q);
  CHECK(est.product > 0.0);
  CHECK(est.product <= 1.0);
  // Weak coupling keeps the two forms of the estimate together.
  CHECK(std::abs(est.product - est.exponential) / est.product < 0.05);
}

TEST_CASE("coupling sweep shares draws across couplings") {
  const auto lay = core::make_layout(15, 7);
  noise::NoiseConfig base;
  base.components = {true, false, true};
  base.n_nu = 40;
  const std::vector<int> positions{8, 16};
  const std::vector<double> lambdas{0.0015, 0.003, 0.006};
  const auto sweep =
      analysis::state_noise_sweep(lay, base, positions, lambdas);

  REQUIRE(sweep.rows.size() == 2 * 2 * 3);
  const auto clean = shor::run_clean(lay, Backend::dense,
                                     shor::CaptureSet::at({52}));
  const auto set =
      shor::success_set(lay, shor::multiplicative_order(lay.x, lay.n));
  CHECK(sweep.t_clean ==
        doctest::Approx(shor::success_probability(clean.at(52), set))
            .epsilon(1e-13));

  std::size_t row = 0;
  for (const int axis : {0, 2}) {
    for (const int m : positions) {
      double prev_loss = 0;
      for (const double lambda : lambdas) {
        const auto& r = sweep.rows[row++];
        CHECK(r.axis == axis);
        CHECK(r.m == m);
        CHECK(r.lambda == lambda);
        const double loss = 1.0 - r.f;
        CHECK(loss > 0.0);
        if (prev_loss > 0) {
          // Common draws make successive losses almost exactly quadratic.
          CHECK(loss / prev_loss == doctest::Approx(4.0).epsilon(0.05));
        }
        prev_loss = loss;
      }
    }
  }

  CHECK_THROWS_AS(analysis::state_noise_sweep(lay, base, {}, lambdas),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      analysis::state_noise_sweep(lay, base, positions,
                                  std::vector<double>{}),
      std::invalid_argument);
}

// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracle_helpers.hpp"
#include "shorsim/observables.hpp"
#include "shorsim/schedule.hpp"

using namespace shorsim;
using core::Backend;
using obs::AdditiveOperatorSpec;
using obs::Classification;
using obs::Pauli;
using obs::Scope;

TEST_CASE("cat state magnetization fluctuation saturates") {
  const auto lay = oracle::toy_layout(5, 5);
  const auto ghz = oracle::ghz_state(lay);
  CHECK(obs::magnetization_fluct(ghz, Pauli::z) == doctest::Approx(1.0));
  CHECK(obs::magnetization_fluct(ghz, Pauli::x) ==
        doctest::Approx(1.0 / 10));
}

TEST_CASE("polarized state has no longitudinal fluctuation") {
  const auto lay = oracle::toy_layout(4, 4);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(lay.dense_dim());
  amps[0] = 1.0;
  const auto state = oracle::wrap_dense(lay, std::move(amps));
  CHECK(obs::magnetization_fluct(state, Pauli::z) == 0.0);
  CHECK(obs::magnetization_fluct(state, Pauli::x) ==
        doctest::Approx(1.0 / 8));
  CHECK(obs::magnetization_fluct(state, Pauli::y) ==
        doctest::Approx(1.0 / 8));
}

TEST_CASE("single excitation states scale as normal fluctuations") {
  double f8 = 0, f12 = 0;
  for (const int l : {8, 12}) {
    const auto lay = oracle::toy_layout(l - 4, 4);
    const auto w = oracle::w_state(lay);
    CHECK(std::abs(obs::magnetization_fluct(w, Pauli::z)) <= 1e-14);
    const double fx = obs::magnetization_fluct(w, Pauli::x);
    CHECK(fx == doctest::Approx((3.0 * l - 2) / (l * l)).epsilon(1e-12));
    CHECK(fx == doctest::Approx(oracle::naive_fluct(
                    w.amps, lay, {Pauli::x, Scope::all, 0}))
                    .epsilon(1e-12));
    (l == 8 ? f8 : f12) = fx;
  }
  const std::vector<std::pair<double, double>> points{{8, f8}, {12, f12}};
  const auto fit = obs::estimate_p(points);
  REQUIRE(fit.p.has_value());
  CHECK(*fit.p == doctest::Approx(1.07).epsilon(0.01));
  CHECK(fit.classification == Classification::nfs);
}

TEST_CASE("alternating cat saturates the staggered operator") {
  const auto lay = oracle::toy_layout(5, 5);
  const auto cat = oracle::alternating_cat(lay);
  const AdditiveOperatorSpec staggered{Pauli::z, Scope::all, 5};
  CHECK(obs::fourier_fluct(cat, staggered) == doctest::Approx(1.0));
  CHECK(obs::magnetization_fluct(cat, Pauli::z) ==
        doctest::Approx(0.0).scale(1));
}

TEST_CASE("zero wave number reduces to the magnetization") {
  const auto lay = oracle::toy_layout(4, 3);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto state = oracle::random_state(lay, rng);
    for (const Pauli alpha : {Pauli::x, Pauli::y, Pauli::z})
      for (const Scope scope : {Scope::all, Scope::r1, Scope::r2})
        CHECK(obs::fourier_fluct(state, {alpha, scope, 0}) ==
              doctest::Approx(obs::magnetization_fluct(state, alpha, scope))
                  .epsilon(1e-13));
  }
}

TEST_CASE("product states stay under the uncorrelated ceiling") {
  std::mt19937_64 rng(7);
  for (const auto& lay : {oracle::toy_layout(6, 4), oracle::toy_layout(7, 5)}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto state = oracle::random_product_state(lay, rng);
      for (const Pauli alpha : {Pauli::x, Pauli::y, Pauli::z}) {
        for (const Scope scope : {Scope::all, Scope::r1, Scope::r2}) {
          const double bound =
              1.0 / obs::scope_length(lay, scope) + 1e-10;
          CHECK(obs::magnetization_fluct(state, alpha, scope) <= bound);
        }
      }
    }
  }
}

TEST_CASE("dense evaluation matches the double sum oracle") {
  const auto lay = core::make_layout(15, 7, 4, 4);
  std::mt19937_64 rng(23);
  const auto schedule = shor::build_schedule(lay);
  for (int trial = 0; trial < 8; ++trial) {
    auto state = oracle::random_product_state(lay, rng);
    // March a few scheduled steps to entangle the registers.
    for (int step = 0; step < trial; ++step)
      core::apply_step(state, schedule.steps[step]);
    obs::StateMoments<double> moments(state);
    for (const Pauli alpha : {Pauli::x, Pauli::y, Pauli::z}) {
      for (const Scope scope : {Scope::all, Scope::r1, Scope::r2}) {
        for (const int k : {0, 1, 2}) {
          const AdditiveOperatorSpec spec{alpha, scope, k};
          CHECK(moments.fluct(spec) ==
                doctest::Approx(oracle::naive_fluct(state.amps, lay, spec))
                    .epsilon(1e-10)
                    .scale(1));
        }
      }
    }
  }
}

TEST_CASE("structured evaluation matches dense on the real pipeline") {
  const auto lay = core::make_layout(21, 2);
  const auto schedule = shor::build_schedule(lay);
  const auto capture = shor::CaptureSet::boundaries(schedule);
  const auto dense_run = shor::run_clean(lay, Backend::dense, capture);
  const auto structured_run =
      shor::run_clean(lay, Backend::structured, capture);
  for (const int m : capture.indices) {
    obs::StateMoments<double> dense_moments(dense_run.at(m));
    obs::StateMoments<double> structured_moments(structured_run.at(m));
    for (const Pauli alpha : {Pauli::x, Pauli::y, Pauli::z}) {
      for (const Scope scope : {Scope::all, Scope::r1, Scope::r2}) {
        for (const int k : {0, 1}) {
          const AdditiveOperatorSpec spec{alpha, scope, k};
          CHECK(structured_moments.fluct(spec) ==
                doctest::Approx(dense_moments.fluct(spec))
                    .epsilon(1e-10)
                    .scale(1));
        }
      }
    }
  }
}

TEST_CASE("mixed register state analytics") {
  const auto lay = core::make_layout(21, 2);
  const auto run =
      shor::run_clean(lay, Backend::dense, shor::CaptureSet::at({10}));
  obs::StateMoments<double> moments(run.at(10));
  CHECK(moments.fluct({Pauli::x, Scope::all, 0}) ==
        doctest::Approx(5.0 / 225).epsilon(1e-12));
  CHECK(moments.fluct({Pauli::y, Scope::all, 0}) ==
        doctest::Approx(1.0 / 15).epsilon(1e-12));
  CHECK(moments.fluct({Pauli::z, Scope::all, 0}) ==
        doctest::Approx(10.0 / 225).epsilon(1e-12));
  CHECK(std::abs(moments.fluct({Pauli::x, Scope::r1, 0})) <= 1e-14);
  CHECK(moments.fluct({Pauli::y, Scope::r1, 0}) ==
        doctest::Approx(0.1).epsilon(1e-12));
  CHECK(moments.fluct({Pauli::z, Scope::r1, 0}) ==
        doctest::Approx(0.1).epsilon(1e-12));
  CHECK(moments.fluct({Pauli::x, Scope::r2, 0}) ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK(std::abs(moments.fluct({Pauli::z, Scope::r2, 0})) <= 1e-14);
}

TEST_CASE("frozen landmarks of the default problem") {
  const auto lay = core::make_layout(21, 2);
  const auto run =
      shor::run_clean(lay, Backend::dense, shor::CaptureSet::at({20, 75}));
  obs::StateMoments<double> mixed(run.at(20));
  CHECK(mixed.fluct({Pauli::x, Scope::all, 0}) ==
        doctest::Approx(0.22666666666666663).epsilon(1e-9));
  CHECK(mixed.fluct({Pauli::x, Scope::r1, 0}) ==
        doctest::Approx(0.46).epsilon(1e-9));
  obs::StateMoments<double> final_state(run.at(75));
  CHECK(final_state.fluct({Pauli::z, Scope::all, 0}) ==
        doctest::Approx(0.10923569005845364).epsilon(1e-9));
  CHECK(final_state.fluct({Pauli::z, Scope::r1, 0}) ==
        doctest::Approx(0.22347138797011173).epsilon(1e-9));

  const auto wx = obs::w_ratio(run.at(20), Pauli::x);
  REQUIRE(wx.has_value());
  CHECK(*wx == doctest::Approx(2.0294117647058822).epsilon(1e-9));
  const auto wz = obs::w_ratio(run.at(75), Pauli::z);
  REQUIRE(wz.has_value());
  CHECK(*wz == doctest::Approx(2.0457726577323663).epsilon(1e-9));
}

TEST_CASE("register share of a product state") {
  const auto lay = oracle::toy_layout(10, 5);
  std::mt19937_64 rng(5);
  // Register 2 pinned to its longitudinal eigenstate: the full fluctuation
  // is register 1's, diluted by the square of the site ratio.
  auto r1_part = oracle::random_product_state(oracle::toy_layout(5, 5), rng);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(lay.dense_dim());
  amps.segment(0, 1024) = r1_part.amps;
  const auto state = oracle::wrap_dense(lay, std::move(amps));
  const auto ratio = obs::w_ratio(state, Pauli::z);
  REQUIRE(ratio.has_value());
  CHECK(*ratio == doctest::Approx(2.25).epsilon(1e-9));

  Eigen::VectorXcd polarized = Eigen::VectorXcd::Zero(lay.dense_dim());
  polarized[0] = 1.0;
  CHECK(!obs::w_ratio(oracle::wrap_dense(lay, std::move(polarized)),
                      Pauli::z)
             .has_value());
}

TEST_CASE("wave number grid is validated") {
  const auto lay = oracle::toy_layout(5, 5);
  const auto ghz = oracle::ghz_state(lay);
  CHECK_NOTHROW(obs::fourier_fluct(ghz, {Pauli::z, Scope::all, 5}));
  CHECK_NOTHROW(obs::fourier_fluct(ghz, {Pauli::z, Scope::all, -4}));
  CHECK_THROWS_AS(obs::fourier_fluct(ghz, {Pauli::z, Scope::all, 6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(obs::fourier_fluct(ghz, {Pauli::z, Scope::all, -5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(obs::fourier_fluct(ghz, {Pauli::z, Scope::r1, 3}),
                  std::invalid_argument);
}

TEST_CASE("global phase invariance") {
  const auto lay = oracle::toy_layout(4, 4);
  std::mt19937_64 rng(3);
  auto state = oracle::random_state(lay, rng);
  const double before = obs::magnetization_fluct(state, Pauli::y);
  state.amps *= std::polar(1.0, 0.813);
  CHECK(obs::magnetization_fluct(state, Pauli::y) ==
        doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("trace evaluation covers every capture and spec in order") {
  const auto lay = core::make_layout(15, 7);
  const auto schedule = shor::build_schedule(lay);
  const auto run = shor::run_clean(lay, Backend::dense,
                                   shor::CaptureSet::boundaries(schedule));
  std::vector<AdditiveOperatorSpec> specs;
  for (const Pauli alpha : {Pauli::x, Pauli::y, Pauli::z})
    for (const Scope scope : {Scope::all, Scope::r1, Scope::r2})
      specs.push_back({alpha, scope, 0});
  const auto records = obs::trace_fluctuations<double>(run, specs);
  REQUIRE(records.size() == 4 * 9);
  CHECK(records[0].m == 0);
  CHECK(records[9].m == schedule.hadamard_end());
  CHECK(records[0].spec == specs[0]);
  CHECK(records[8].spec == specs[8]);
  CHECK(records[19].value ==
        doctest::Approx(
            obs::fourier_fluct(run.at(schedule.modexp_end()), specs[1]))
            .epsilon(1e-13));
}

TEST_CASE("exponent estimation policy") {
  using points_t = std::vector<std::pair<double, double>>;
  SUBCASE("anomalous plateau") {
    const points_t points{{15, 1.0}, {30, 1.0}};
    const auto fit = obs::estimate_p(points);
    CHECK(*fit.p == doctest::Approx(2.0));
    CHECK(fit.classification == Classification::afs);
  }
  SUBCASE("normal decay") {
    const points_t points{{10, 0.1}, {20, 0.05}};
    const auto fit = obs::estimate_p(points);
    CHECK(*fit.p == doctest::Approx(1.0));
    CHECK(fit.classification == Classification::nfs);
  }
  SUBCASE("frozen pipeline pair") {
    const points_t points{{15, 0.46}, {30, 0.4775}};
    const auto fit = obs::estimate_p(points);
    CHECK(*fit.p == doctest::Approx(2.0538656).epsilon(1e-6));
    CHECK(fit.classification == Classification::afs);
  }
  SUBCASE("anomalous slope needs a surviving level to qualify") {
    const points_t points{{15, 1e-3}, {30, 4e-3}};
    const auto fit = obs::estimate_p(points);
    CHECK(*fit.p == doctest::Approx(4.0));
    CHECK(fit.classification == Classification::intermediate);
  }
  SUBCASE("all zero") {
    const points_t points{{15, 0.0}, {30, 1e-16}};
    const auto fit = obs::estimate_p(points);
    CHECK(!fit.p.has_value());
    CHECK(fit.classification == Classification::nfs);
  }
  SUBCASE("vanishes at the largest size") {
    const points_t points{{15, 0.25}, {30, 0.0}};
    const auto fit = obs::estimate_p(points);
    CHECK(!fit.p.has_value());
    CHECK(fit.classification == Classification::nfs);
  }
  SUBCASE("vanishes below a growing tail") {
    const points_t points{{15, 0.0}, {30, 0.25}};
    CHECK_THROWS_AS(obs::estimate_p(points), std::invalid_argument);
  }
  SUBCASE("rejects bad inputs") {
    CHECK_THROWS_AS(obs::estimate_p(points_t{{15, 0.1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(obs::estimate_p(points_t{{15, -0.1}, {30, 0.1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(obs::estimate_p(points_t{{15, 0.1}, {15, 0.2}}),
                    std::invalid_argument);
  }
}

// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pvbs/error.hpp"
#include "pvbs/weights.hpp"

using namespace pvbs;

TEST_CASE("log-space helpers") {
  CHECK(log_sum_exp({}) == -std::numeric_limits<double>::infinity());
  CHECK(log_sum_exp({1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_diff_exp(std::log(5.0), std::log(3.0)) == doctest::Approx(std::log(2.0)));
  CHECK(log_diff_exp(1.0, 1.0) == -std::numeric_limits<double>::infinity());
  CHECK(log_geometric_sum(0.0, 7) == doctest::Approx(std::log(7.0)));
  CHECK(log_geometric_sum(std::log(2.0), 4) == doctest::Approx(std::log(15.0)));
  CHECK(log_geometric_sum(-std::log(2.0), 3) == doctest::Approx(std::log(1.75)));
  CHECK(log_geometric_sum(1.0, 0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("normalization matches direct summation") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const int d = 1 + t % 3;
    std::vector<double> lambda;
    for (int j = 0; j < d; ++j) lambda.push_back(oracle::log_uniform(rng, 0.2, 5.0));
    std::vector<double> m(static_cast<std::size_t>(d), 0.0);
    m[0] = 1.0;
    const auto p = ModelParams::make(lambda, m);
    const auto pts = oracle::random_animal(d, 12, rng);
    const Region r(d, pts, RegionSpec::explicit_points(d, pts));
    const double ref = static_cast<double>(std::log(oracle::weight_sum(pts, p)));
    CHECK(normalization(r, p) == doctest::Approx(ref).epsilon(1e-13));
  }
  CHECK(normalization(Region(1, {}, RegionSpec::explicit_points(1, {})), ModelParams::make({2.0}, {1.0})) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("normalization survives large exponents") {
  const auto p = ModelParams::make({1e3, 1e-3}, {1.0, 0.0});
  const Region r = build_region(RegionSpec::box({100, 100}, {3, 3}));
  // each row: 1e6^{x1} * sum 1e-6^{x2}
  const double row = 200.0 * std::log(1e3) + std::log1p(1e6 + 1e12);
  const double col = -200.0 * std::log(1e3) + std::log1p(1e-6 + 1e-12);
  CHECK(normalization(r, p) == doctest::Approx(row + col).epsilon(1e-12));
}

TEST_CASE("closed-form normalization is exact for boxes") {
  const auto p = ModelParams::make({1.7, 0.4}, {1.0, 0.0});
  const RegionSpec s = RegionSpec::box({-2, 3}, {4, 5});
  const auto br = normalization_closed_form(s, p);
  const double direct = normalization(build_region(s, p), p);
  CHECK(br.exact);
  CHECK(br.log_lower == doctest::Approx(direct).epsilon(1e-12));
  CHECK(br.log_upper == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("closed-form bracket contains parallelogram and trapezoid sums") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    const double l1 = oracle::log_uniform(rng, 1.05, 4.0);
    const double l2 = oracle::log_uniform(rng, 0.25, 4.0);
    const auto p = ModelParams::make_normalized({l1, l2}, {1.0, 0.1 + 2.0 * u(rng)});
    RegionSpec s;
    s.base = {u(rng) * 3.0 - 1.5, static_cast<double>(t % 3)};
    s.lengths = {3 + t % 4, 2 + t % 3};
    if (t % 2 == 0) {
      s.kind = RegionKind::Parallelogram;
    } else {
      s.kind = RegionKind::Trapezoid;
      s.slant = std::vector<double>{1.0, static_cast<double>(t % 3) - 1.0};
    }
    NormalizationBracket br;
    try {
      br = normalization_closed_form(s, p);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CaseMismatch);
      continue;
    }
    const double direct = normalization(build_region(s, p), p);
    CHECK(br.log_lower <= direct + 1e-12);
    CHECK(direct <= br.log_upper + 1e-12);
    ++checked;
  }
  CHECK(checked > 30);
}

TEST_CASE("closed-form rejects uncovered shapes") {
  const auto p = ModelParams::make({0.5, 2.0}, {1.0, 0.0});
  RegionSpec s;
  s.kind = RegionKind::Trapezoid;
  s.base = {0.0, 0.0};
  s.lengths = {3, 3};
  s.normal_frac = std::vector<double>{1.0, 0.5};
  try {
    normalization_closed_form(s, p);
    FAIL("expected CaseMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CaseMismatch);
  }
}

TEST_CASE("one-particle ground state is lambda^x normalized") {
  const auto p = ModelParams::make({2.0, 0.5}, {1.0, 0.0});
  const Region r = build_region(RegionSpec::box({0, 0}, {2, 2}));
  const auto gs = one_particle_ground_state(r, p);
  double s = 0.0;
  for (double a : gs.amplitudes) s += a * a;
  CHECK(s == doctest::Approx(1.0));
  const auto i00 = *r.index_of(LatticePoint{{0, 0}});
  const auto i10 = *r.index_of(LatticePoint{{1, 0}});
  const auto i01 = *r.index_of(LatticePoint{{0, 1}});
  CHECK(gs.amplitudes[i10] / gs.amplitudes[i00] == doctest::Approx(2.0));
  CHECK(gs.amplitudes[i01] / gs.amplitudes[i00] == doctest::Approx(0.5));
  // The state is annihilated by the Hamiltonian.
  const Eigen::MatrixXd h = oracle::particle_block(oracle::full_hamiltonian(r, p), r.size(), 1);
  // oracle basis order: bit N-1-i for site i, increasing numeric order, so site i at index N-1-i.
  Eigen::VectorXd v(static_cast<Eigen::Index>(r.size()));
  for (std::size_t i = 0; i < r.size(); ++i) v(static_cast<Eigen::Index>(r.size() - 1 - i)) = gs.amplitudes[i];
  CHECK((h * v).norm() < 1e-12);

  const auto z = zero_particle_ground_state(r);
  CHECK(z.particle_count == 0);
  std::ostringstream os;
  write_ground_state_csv(os, gs);
  CHECK(!os.str().empty());
}

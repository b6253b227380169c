// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pvbs/error.hpp"
#include "pvbs/operator.hpp"

using namespace pvbs;

TEST_CASE("interaction matrix is a rank-2 projection") {
  for (double l : {0.3, 1.0, 2.5}) {
    const Eigen::Matrix4d t = interaction_matrix(l);
    CHECK((t * t - t).norm() < 1e-14);
    CHECK(t.trace() == doctest::Approx(2.0));
    CHECK((t - oracle::local_term(l)).norm() < 1e-14);
  }
}

TEST_CASE("binomial and basis ranking") {
  CHECK(binomial(10, 3) == 120);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(200, 100) == SIZE_MAX);
  const OccupationBasis b(7, 3);
  CHECK(b.size() == 35);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(b.rank(b.state(i)) == i);
    if (i > 0) CHECK(b.state(i - 1) < b.state(i));
  }
}

TEST_CASE("basis limits") {
  try {
    OccupationBasis(30, 15, 1000);
    FAIL("expected SectorTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SectorTooLarge);
  }
  try {
    OccupationBasis(65, 1);
    FAIL("expected RegionTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RegionTooLarge);
  }
}

TEST_CASE("sector spectra agree with the full Hilbert-space oracle") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 12; ++t) {
    const int d = 1 + t % 3;
    std::vector<double> lambda;
    for (int j = 0; j < d; ++j) lambda.push_back(oracle::log_uniform(rng, 0.3, 3.0));
    std::vector<double> m(static_cast<std::size_t>(d), 0.0);
    m[0] = 1.0;
    const auto p = ModelParams::make(lambda, m);
    const auto pts = oracle::random_animal(d, 6 + t % 4, rng);
    const Region r(d, pts, RegionSpec::explicit_points(d, pts));
    const Eigen::MatrixXd h = oracle::full_hamiltonian(r, p);
    for (int n = 0; n <= static_cast<int>(r.size()); ++n) {
      const auto op = assemble_sector(r, p, n);
      const Eigen::MatrixXd a = Eigen::MatrixXd(op.matrix);
      CHECK((a - a.transpose()).norm() < 1e-14);
      const auto ev = oracle::eigenvalues(a);
      const auto ref = oracle::eigenvalues(oracle::particle_block(h, r.size(), n));
      REQUIRE(ev.size() == ref.size());
      for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i] == doctest::Approx(ref[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("explicit edge subsets and apply") {
  const auto p = ModelParams::make({2.0, 0.5}, {1.0, 0.0});
  const Region r = build_region(RegionSpec::box({0, 0}, {3, 2}));
  const auto all = edges_of(r);
  const std::vector<Edge> some(all.begin(), all.begin() + 2);
  const auto op = assemble_sector(r, p, 2, kDefaultMaxStates, &some);
  CHECK(op.assembled_edge_count == 2);
  std::vector<oracle::Bond> bs;
  for (const auto& e : some) bs.push_back({e.a, e.b, e.axis});
  const auto ref = oracle::eigenvalues(oracle::particle_block(oracle::full_hamiltonian(r, p, bs), r.size(), 2));
  const auto ev = oracle::eigenvalues(Eigen::MatrixXd(op.matrix));
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(op.dim()), 0.0, 1.0);
  CHECK((apply(op, v) - op.matrix * v).norm() < 1e-14);
}

TEST_CASE("matrix market output") {
  const auto p = ModelParams::make({2.0}, {1.0});
  const Region r = build_region(RegionSpec::box({0}, {3}));
  const auto op = assemble_sector(r, p, 1);
  std::ostringstream os;
  write_matrix_market(os, op);
  const std::string s = os.str();
  CHECK(s.rfind("%%MatrixMarket matrix coordinate real symmetric", 0) == 0);
  CHECK(s.find("\n3 3 ") != std::string::npos);
}

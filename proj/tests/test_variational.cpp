// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "pvbs/error.hpp"
#include "pvbs/variational.hpp"
#include "pvbs/weights.hpp"

using namespace pvbs;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;
}

// <v, H v>/<v, v> on the one-particle sector of (box around the slab) cut to
// the half-space m.x >= 0, with v = lambda^x on the slab and 0 elsewhere.
double slab_quotient_oracle(const ModelParams& p, int L) {
  const int d = p.d;
  const auto in_slab = [&](const LatticePoint& x) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += p.m[static_cast<std::size_t>(j)] / p.m[0] * static_cast<double>(x.coords[static_cast<std::size_t>(j)]);
    if (s < -1e-9 || s >= L - 1e-9) return false;
    for (int j = 1; j < d; ++j) {
      if (std::llabs(x.coords[static_cast<std::size_t>(j)]) > L) return false;
    }
    return true;
  };
  const auto in_half = [&](const LatticePoint& x) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += p.m[static_cast<std::size_t>(j)] * static_cast<double>(x.coords[static_cast<std::size_t>(j)]);
    return s >= -1e-9;
  };
  const long long R = 4 * L + 4;
  const auto box = oracle::points_in_box(d, -R, R, in_half);
  std::map<LatticePoint, std::size_t> index;
  for (std::size_t i = 0; i < box.size(); ++i) index[box[i]] = i;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!in_slab(box[i])) continue;
    double w = 0.0;
    for (int j = 0; j < d; ++j) w += static_cast<double>(box[i].coords[static_cast<std::size_t>(j)]) * std::log(p.lambda[static_cast<std::size_t>(j)]);
    v(static_cast<Eigen::Index>(i)) = std::exp(w);
  }
  double num = 0.0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      LatticePoint y = box[i];
      ++y.coords[static_cast<std::size_t>(j)];
      auto it = index.find(y);
      if (it == index.end()) continue;
      const double l = p.lambda[static_cast<std::size_t>(j)];
      // particle at x: amplitude -l, at x + e_j: 1, over sqrt(1 + l^2)
      const double a = -l * v(static_cast<Eigen::Index>(i)) + v(static_cast<Eigen::Index>(it->second));
      num += a * a / (1.0 + l * l);
    }
  }
  return num / v.squaredNorm();
}

}  // namespace

TEST_CASE("c of a vector") {
  CHECK(c_of({1.0, 0.0}) == 1.0);
  CHECK(c_of({0.5, -0.25, 0.0}) == 0.25);
  CHECK(c_of({2.0, 1.0 / 3.0}) == doctest::Approx(1.0 / 3.0));
  CHECK(code_of([] { c_of({0.0, 0.0}); }) == ErrorCode::AllZero);
}

TEST_CASE("angle examples") {
  const std::vector<double> lam{0.5, 3.0};
  const double n = std::hypot(std::log(0.5), std::log(3.0));
  const auto aligned = ModelParams::make({0.5, 3.0}, {-std::log(0.5) / n, -std::log(3.0) / n});
  CHECK(angle_theta(aligned) == doctest::Approx(0.0).epsilon(1e-12));
  const auto anti = ModelParams::make({0.5, 3.0}, {std::log(0.5) / n, std::log(3.0) / n});
  CHECK(angle_theta(anti) == doctest::Approx(M_PI));
  CHECK(angle_theta(ModelParams::make({0.5, 0.5}, {1.0, 0.0})) == doctest::Approx(M_PI / 4));
  CHECK(code_of([] { angle_theta(ModelParams::make({1.0, 1.0}, {1.0, 0.0})); }) == ErrorCode::UndefinedAngle);
}

TEST_CASE("closed-form upper bound") {
  CHECK(closed_form_upper_bound(ModelParams::make({0.5, 0.5}, {1.0, 0.0})) == doctest::Approx(8.0 * std::log(2.0)).epsilon(1e-14));
  const auto aligned = ModelParams::make_normalized({std::exp(-1.0), std::exp(-1.0)}, {1.0, 1.0});
  CHECK(closed_form_upper_bound(aligned) == 0.0);
  CHECK(code_of([] { closed_form_upper_bound(ModelParams::make({2.0, 2.0}, {1.0, 0.0})); }) == ErrorCode::HypothesisViolated);
  CHECK(code_of([] { closed_form_upper_bound(ModelParams::make({1.0, 1.0}, {1.0, 0.0})); }) == ErrorCode::UndefinedAngle);
}

TEST_CASE("closed-form bound against 50-digit arithmetic") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (int t = 0; t < 40; ++t) {
    const int d = 2 + t % 3;
    std::vector<double> lambda, m;
    for (int j = 0; j < d; ++j) lambda.push_back(oracle::log_uniform(rng, 0.2, 5.0));
    for (int j = 0; j < d; ++j) m.push_back(g(rng));
    double ml = 0.0;
    for (int j = 0; j < d; ++j) ml += m[static_cast<std::size_t>(j)] * std::log(lambda[static_cast<std::size_t>(j)]);
    if (ml > 0) {
      for (auto& x : m) x = -x;
    }
    const auto p = ModelParams::make_normalized(lambda, m);
    Big nl = 0, dotml = 0, mn = 0;
    for (int j = 0; j < d; ++j) {
      const Big l = boost::multiprecision::log(Big(p.lambda[static_cast<std::size_t>(j)]));
      const Big mj = Big(p.m[static_cast<std::size_t>(j)]);
      nl += l * l;
      dotml += l * mj;
      mn += mj * mj;
    }
    // ||log lambda|| |sin theta| = sqrt(|l|^2 - (m.l)^2/|m|^2)
    const Big perp = boost::multiprecision::sqrt(nl - dotml * dotml / mn);
    Big cm = 1e300, cl = 1e300;
    for (int j = 0; j < d; ++j) {
      cm = std::min(cm, Big(std::abs(p.m[static_cast<std::size_t>(j)])));
      cl = std::min(cl, Big(p.lambda[static_cast<std::size_t>(j)]));
    }
    const Big ref = Big(2 * (d - 1)) / (cm * cl * cl) * perp;
    const double got = closed_form_upper_bound(p);
    CHECK(std::abs(got - ref.convert_to<double>()) <= 1e-12 * ref.convert_to<double>());
  }
}

TEST_CASE("slab quotient matches the one-particle oracle") {
  const std::vector<ModelParams> ps{
      ModelParams::make_normalized({0.5, 0.5}, {1.0, 0.0}),
      ModelParams::make_normalized({0.6, 1.4}, {1.0, 0.5}),
      ModelParams::make_normalized({std::exp(-1.0), std::exp(-1.0)}, {1.0, 1.0}),
      ModelParams::make_normalized({0.7, 1.0}, {1.0, 1.3}),
  };
  for (const auto& p : ps) {
    for (int L = 1; L <= 6; ++L) {
      const SlabFrame f = slab_frame(p);
      const auto r = trial_state_energy(p, L);
      CHECK(r.rayleigh_quotient == doctest::Approx(slab_quotient_oracle(f.normalized, L)).epsilon(1e-10));
      const Region slab = build_region(trial_slab(f, L), f.normalized);
      CHECK(r.log_norm == doctest::Approx(normalization(slab, f.normalized)).epsilon(1e-12));
    }
  }
}

TEST_CASE("slab quotient under the finite-L majorant") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  int checked = 0;
  for (int t = 0; t < 30; ++t) {
    const int d = 2 + t % 2;
    std::vector<double> lambda, m;
    for (int j = 0; j < d; ++j) lambda.push_back(oracle::log_uniform(rng, 0.3, 3.0));
    for (int j = 0; j < d; ++j) m.push_back(g(rng));
    const auto p = ModelParams::make_normalized(lambda, m);
    const auto f = slab_frame(p);
    if (!f.hypothesis) continue;
    for (int L : {2, 4, 8, 16}) {
      const auto r = trial_state_energy(p, L);
      REQUIRE(r.finite_bound);
      CHECK(r.rayleigh_quotient <= *r.finite_bound + 1e-12);
      CHECK(r.rayleigh_quotient <= *r.closed_form_bound + *r.margin + 1e-12);
    }
    ++checked;
  }
  CHECK(checked > 5);
}

TEST_CASE("majorant limit") {
  const auto p = ModelParams::make_normalized({0.5, 0.8, 1.5}, {1.0, 0.4, 0.2});
  const auto f = slab_frame(p);
  REQUIRE(f.hypothesis);
  const double lim = finite_upper_bound_limit(f);
  CHECK(std::abs(finite_upper_bound(f, 1000) - lim) < 1e-6);
  double ref = 0.0;
  for (std::size_t j = 1; j < 3; ++j) {
    const double t = std::log(f.normalized.lambda[j]) - f.normalized.m[j] / f.normalized.m[0] * std::log(f.normalized.lambda[0]);
    const double q = std::exp(t);
    ref += 1.0 - std::pow(std::min(q, 1.0 / q), 2);
  }
  CHECK(lim == doctest::Approx(ref / (f.normalized.lambda[0] * f.normalized.lambda[0])).epsilon(1e-12));
}

TEST_CASE("aligned normal collapses the quotient") {
  const auto p = ModelParams::make_normalized({std::exp(-1.0), std::exp(-1.0)}, {1.0, 1.0});
  double prev = std::numeric_limits<double>::infinity();
  std::vector<UpperBoundResult> rows;
  for (int L : {4, 8, 16, 32, 64}) {
    rows.push_back(trial_state_energy(p, L));
    CHECK(rows.back().rayleigh_quotient < prev);
    prev = rows.back().rayleigh_quotient;
  }
  CHECK(prev < 0.5 / 64);
  CHECK(decay_exponent(rows) < -0.5);
  std::ostringstream os;
  write_sweep_csv(os, rows);
  CHECK(os.str().rfind("L,rayleigh_quotient,closed_form_bound,theta\n", 0) == 0);
  const nlohmann::json j = rows.front();
  CHECK(j.at("hypothesis").get<bool>());
}

TEST_CASE("hypothesis failure is reported, not thrown") {
  const auto p = ModelParams::make({2.0, 1.0}, {0.0, 1.0});
  const auto r = trial_state_energy(p, 2);
  CHECK_FALSE(r.hypothesis);
  CHECK_FALSE(r.closed_form_bound);
  CHECK(r.rayleigh_quotient > 0.0);
  CHECK(code_of([] { trial_state_energy(ModelParams::make({0.5, 0.5, 0.5, 0.5, 0.5, 0.5}, {1, 0, 0, 0, 0, 0}), 40); }) ==
        ErrorCode::RegionTooLarge);
}

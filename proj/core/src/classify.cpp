// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "pvbs/error.hpp"
#include "pvbs/geometry.hpp"

namespace pvbs {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kKeyTolerance = 1e-9;

// Lexicographic "a before b" on descending keys, with ties inside kKeyTolerance.
template <std::size_t N>
bool key_before(const std::array<double, N>& a, int ia, const std::array<double, N>& b, int ib) {
  for (std::size_t k = 0; k < N; ++k) {
    if (std::abs(a[k] - b[k]) > kKeyTolerance) return a[k] > b[k];
  }
  return ia < ib;
}

}  // namespace

std::string to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::Case1a: return "1a";
    case CaseLabel::Case1b: return "1b";
    case CaseLabel::Case2a: return "2a";
    case CaseLabel::Case2b: return "2b";
    case CaseLabel::Case3a: return "3a";
    case CaseLabel::Case3b: return "3b";
    case CaseLabel::Case4: return "4";
  }
  return "?";
}

CoordinateChange CoordinateChange::identity(int d) {
  CoordinateChange c;
  c.perm.resize(static_cast<std::size_t>(d));
  std::iota(c.perm.begin(), c.perm.end(), 0);
  c.reflect.assign(static_cast<std::size_t>(d), false);
  return c;
}

LatticePoint CoordinateChange::apply(const LatticePoint& x) const {
  LatticePoint y{std::vector<Coord>(perm.size())};
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const auto o = static_cast<std::size_t>(perm[i]);
    y.coords[i] = reflect[o] ? -x.coords[o] : x.coords[o];
  }
  return y;
}

ModelParams CoordinateChange::apply(const ModelParams& p) const {
  ModelParams q;
  q.d = p.d;
  q.lambda.resize(perm.size());
  q.m.resize(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const auto o = static_cast<std::size_t>(perm[i]);
    q.lambda[i] = reflect[o] ? 1.0 / p.lambda[o] : p.lambda[o];
    q.m[i] = reflect[o] ? -p.m[o] : p.m[o];
  }
  return q;
}

double angle_between_normal_and_log_lambda(const ModelParams& p) {
  const auto l = p.log_lambda();
  const double nl = norm2(l);
  if (!(nl > 0.0)) fail(ErrorCode::UndefinedAngle, "angle undefined for lambda = (1,...,1)");
  const double c = dot(p.m, l);
  std::vector<double> perp(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) perp[i] = l[i] - c * p.m[i];
  return std::atan2(norm2(perp), -c);
}

Classification classify_case(const ModelParams& params) {
  params.validate();
  const int d = params.d;
  if (d < 2) fail(ErrorCode::InvalidInput, "case classification needs d >= 2");
  if (params.is_isotropic(kUnityTolerance)) fail(ErrorCode::GaplessBulk, "lambda = (1,...,1) is gapless");

  Classification out;
  out.original = params;
  out.change = CoordinateChange::identity(d);

  // Reflections: m_j >= 0, and lambda_j >= 1 whenever m_j = 0.
  for (int j = 0; j < d; ++j) {
    const double mj = params.m[static_cast<std::size_t>(j)];
    const double lj = params.lambda[static_cast<std::size_t>(j)];
    if (mj < -kUnityTolerance || (std::abs(mj) <= kUnityTolerance && lj < 1.0)) out.change.reflect[static_cast<std::size_t>(j)] = true;
  }
  const ModelParams r = out.change.apply(params);
  const auto logl = r.log_lambda();
  out.theta = angle_between_normal_and_log_lambda(r);
  out.gapless_direction = out.theta < kThetaTolerance;
  const bool antiparallel = kPi - out.theta < kThetaTolerance;

  const auto mj = [&](int j) { return r.m[static_cast<std::size_t>(j)]; };
  const auto lj = [&](int j) { return logl[static_cast<std::size_t>(j)]; };
  const auto nonzero_m = [&](int j) { return mj(j) > kUnityTolerance; };
  const auto nonunit = [&](int j) { return std::abs(lj(j)) > kUnityTolerance; };
  const auto key = [&](int j) { return std::array<double, 2>{mj(j), r.lambda[static_cast<std::size_t>(j)]}; };
  const auto qual_key = [&](int j) { return std::array<double, 3>{mj(j), std::abs(lj(j)), r.lambda[static_cast<std::size_t>(j)]}; };
  const auto by_key = [&](int a, int b) { return key_before(key(a), a, key(b), b); };

  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), by_key);

  // Moves `lead` to the front, keeping the rest in key order.
  const auto lead_with = [&](int lead) {
    std::vector<int> p{lead};
    for (int j : order) {
      if (j != lead) p.push_back(j);
    }
    return p;
  };
  int best_qualifying = -1;
  for (int j = 0; j < d; ++j) {
    if (!(nonzero_m(j) && nonunit(j))) continue;
    if (best_qualifying < 0 || key_before(qual_key(j), j, qual_key(best_qualifying), best_qualifying)) best_qualifying = j;
  }

  std::vector<int> perm;
  if (d == 2) {
    if (antiparallel && !out.gapless_direction) {
      if (nonzero_m(0) && nonzero_m(1)) {
        out.label = CaseLabel::Case2a;
        perm = order;
      } else {
        out.label = CaseLabel::Case2b;
        perm = lead_with(nonzero_m(0) ? 0 : 1);
        out.slant = {1.0, -1.0};
      }
    } else if (best_qualifying >= 0) {
      out.label = CaseLabel::Case1a;
      perm = lead_with(best_qualifying);
    } else {
      out.label = CaseLabel::Case1b;
      perm = lead_with(nonunit(0) ? 0 : 1);
      out.slant = {1.0, 1.0};
    }
  } else if (antiparallel && !out.gapless_direction) {
    out.label = CaseLabel::Case4;
    perm = order;
    out.slant.assign(static_cast<std::size_t>(d), 0.0);
    out.slant[0] = 1.0;
    for (int i = 1; i < d; ++i) {
      if (!nonzero_m(perm[static_cast<std::size_t>(i)])) out.slant[static_cast<std::size_t>(i)] = -1.0;
    }
  } else if (best_qualifying >= 0) {
    out.label = CaseLabel::Case3a;
    const int j1 = best_qualifying;
    const auto tilde = [&](int j) { return lj(j) - mj(j) / mj(j1) * lj(j1); };
    int j2 = -1;
    for (int j : order) {
      if (j == j1) continue;
      const std::array<double, 1> kj{std::abs(tilde(j))};
      if (j2 < 0) { j2 = j; continue; }
      const std::array<double, 1> kb{std::abs(tilde(j2))};
      if (std::abs(kj[0] - kb[0]) > kKeyTolerance ? kj[0] > kb[0] : by_key(j, j2)) j2 = j;
    }
    perm = {j1, j2};
    for (int j : order) {
      if (j != j1 && j != j2) perm.push_back(j);
    }
    out.slant.assign(static_cast<std::size_t>(d), 0.0);
    out.slant[1] = 1.0;
    for (int i = 2; i < d; ++i) {
      if (std::abs(tilde(perm[static_cast<std::size_t>(i)])) <= kUnityTolerance) out.slant[static_cast<std::size_t>(i)] = -1.0;
    }
  } else {
    out.label = CaseLabel::Case3b;
    for (int j : order) {
      if (!nonunit(j)) perm.push_back(j);
    }
    out.j_prime = static_cast<int>(perm.size());
    for (int j : order) {
      if (nonunit(j)) perm.push_back(j);
    }
    out.slant.assign(static_cast<std::size_t>(d), 0.0);
    out.slant[0] = -1.0;
    for (int i = 1; i < out.j_prime; ++i) out.slant[static_cast<std::size_t>(i)] = -2.0;
    out.slant[static_cast<std::size_t>(d - 1)] = 1.0;
  }

  out.change.perm = perm;
  out.normalized = out.change.apply(params);
  return out;
}

void to_json(nlohmann::json& j, const CoordinateChange& c) {
  j = nlohmann::json{{"perm", c.perm}, {"reflect", c.reflect}};
}

void to_json(nlohmann::json& j, const Classification& c) {
  j = nlohmann::json{{"case", to_string(c.label)},
                     {"original", c.original},
                     {"normalized", c.normalized},
                     {"coordinate_change", c.change},
                     {"theta", c.theta},
                     {"gapless_direction", c.gapless_direction}};
  if (!c.slant.empty()) j["slant"] = c.slant;
  if (c.label == CaseLabel::Case3b) j["j_prime"] = c.j_prime;
}

}  // namespace pvbs

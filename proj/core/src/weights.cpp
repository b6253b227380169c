// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include "pvbs/weights.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "pvbs/error.hpp"

namespace pvbs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

bool is_unit(const std::vector<double>& a, int k) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != (static_cast<int>(i) == k ? 1.0 : 0.0)) return false;
  }
  return true;
}

// Integer range [first, first + count) admitted by lo <= x < hi with the membership slack.
void axis_range(double lo, double hi, double& first, long long& count) {
  first = std::ceil(lo - kGeomTolerance);
  count = static_cast<long long>(std::ceil(hi - kGeomTolerance) - first);
  if (count < 0) count = 0;
}

}  // namespace

double log_weight(const LatticePoint& x, const ModelParams& params) {
  double s = 0.0;
  for (int j = 0; j < params.d; ++j) {
    s += static_cast<double>(x.coords[static_cast<std::size_t>(j)]) * std::log(params.lambda[static_cast<std::size_t>(j)]);
  }
  return s;
}

double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) return kNegInf;
  const double mx = *std::max_element(v.begin(), v.end());
  if (mx == kNegInf) return kNegInf;
  // Neumaier summation of the anchored terms.
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double t = std::exp(x - mx);
    const double s = sum + t;
    comp += std::abs(sum) >= std::abs(t) ? (sum - s) + t : (t - s) + sum;
    sum = s;
  }
  return mx + std::log(sum + comp);
}

double log_diff_exp(double a, double b) {
  if (b == kNegInf) return a;
  if (b > a) fail(ErrorCode::InvalidInput, "log_diff_exp needs a >= b");
  if (a == b) return kNegInf;
  return a + std::log(-std::expm1(b - a));
}

double log_geometric_sum(double s, long long n) {
  if (n <= 0) return kNegInf;
  if (std::abs(s) < 1e-12) return std::log(static_cast<double>(n));
  const double nn = static_cast<double>(n);
  if (s > 0) return (nn - 1.0) * s + std::log(std::expm1(-nn * s) / std::expm1(-s));
  return std::log(std::expm1(nn * s) / std::expm1(s));
}

double normalization(const Region& region, const ModelParams& params) {
  std::vector<double> terms;
  terms.reserve(region.size());
  for (const auto& x : region.points()) terms.push_back(2.0 * log_weight(x, params));
  return log_sum_exp(terms);
}

NormalizationBracket normalization_closed_form(const RegionSpec& spec, const ModelParams& params) {
  if (spec.kind == RegionKind::Explicit || spec.kind == RegionKind::HalfSpaceSlab) {
    fail(ErrorCode::CaseMismatch, "closed form needs a parallelotope, parallelogram or trapezoid");
  }
  if (!spec.cuts.empty()) fail(ErrorCode::CaseMismatch, "closed form does not cover extra cuts");
  const auto cuts = constraints_of(spec, &params);
  const int d = params.d;
  const auto l = params.log_lambda();
  const double l1 = l[0];
  NormalizationBracket out;

  if (spec.kind == RegionKind::Trapezoid) {
    const LinearCut& nc = cuts[0];
    const LinearCut& uc = cuts[1];
    if (!(l1 > kUnityTolerance)) fail(ErrorCode::CaseMismatch, "trapezoid bracket needs lambda_1 > 1");
    if (nc.a[0] != 1.0 || uc.a[0] != 1.0) fail(ErrorCode::CaseMismatch, "trapezoid functionals need leading coefficient 1");
    for (int j = 1; j < d; ++j) {
      if (!is_integer(uc.a[static_cast<std::size_t>(j)])) fail(ErrorCode::CaseMismatch, "trapezoid slant must be integral");
    }
    // Row x' : x_1 from ceil(n.b - rho.x') to K0 - sigma.x' - 1.
    const double k0 = std::ceil(uc.hi - kGeomTolerance);
    std::vector<double> first(static_cast<std::size_t>(d), 0.0);
    std::vector<long long> count(static_cast<std::size_t>(d), 1);
    for (int j = 1; j < d; ++j) {
      const LinearCut& c = cuts[static_cast<std::size_t>(j + 1)];
      axis_range(c.lo, c.hi, first[static_cast<std::size_t>(j)], count[static_cast<std::size_t>(j)]);
      if (count[static_cast<std::size_t>(j)] == 0) fail(ErrorCode::EmptyRegion, "trapezoid has an empty axis range");
    }
    // Every fibre must be nonempty for the lower bracket.
    std::vector<long long> t(static_cast<std::size_t>(d), 0);
    while (true) {
      double rho_x = 0.0, sigma_x = 0.0;
      for (int j = 1; j < d; ++j) {
        const double xj = first[static_cast<std::size_t>(j)] + static_cast<double>(t[static_cast<std::size_t>(j)]);
        rho_x += nc.a[static_cast<std::size_t>(j)] * xj;
        sigma_x += uc.a[static_cast<std::size_t>(j)] * xj;
      }
      const double lo = std::ceil(nc.lo - rho_x - kGeomTolerance);
      const double hi = k0 - std::round(sigma_x) - 1.0;
      if (lo > hi) fail(ErrorCode::CaseMismatch, "trapezoid has an empty fibre; bracket does not apply");
      int j = 1;
      while (j < d && ++t[static_cast<std::size_t>(j)] >= count[static_cast<std::size_t>(j)]) t[static_cast<std::size_t>(j++)] = 0;
      if (j >= d) break;
    }
    double base = 2.0 * k0 * l1;
    for (int j = 1; j < d; ++j) {
      const double mu = l[static_cast<std::size_t>(j)] - uc.a[static_cast<std::size_t>(j)] * l1;
      base += 2.0 * first[static_cast<std::size_t>(j)] * mu + log_geometric_sum(2.0 * mu, count[static_cast<std::size_t>(j)]);
    }
    // C_max = 1/(lambda_1^2 - 1), C_min = (1 - lambda_1^{-2}) / (lambda_1^2 - 1)
    const double log_cmax = -std::log(std::expm1(2.0 * l1));
    const double log_cmin = std::log(-std::expm1(-2.0 * l1)) + log_cmax;
    out.log_lower = base + log_cmin;
    out.log_upper = base + log_cmax;
    return out;
  }

  // Parallelotope / Parallelogram: slot 0 = (1, rho), other slots axes.
  const LinearCut& c0 = cuts[0];
  if (c0.a[0] != 1.0) fail(ErrorCode::CaseMismatch, "slot 0 functional needs leading coefficient 1");
  for (int k = 1; k < d; ++k) {
    if (!is_unit(cuts[static_cast<std::size_t>(k)].a, k)) fail(ErrorCode::CaseMismatch, "closed form needs axis slots beyond slot 0");
  }
  bool exact = is_integer(c0.lo);
  double acc = 2.0 * c0.lo * l1 + log_geometric_sum(2.0 * l1, static_cast<long long>(std::llround(c0.hi - c0.lo)));
  for (int j = 1; j < d; ++j) {
    const double rho = c0.a[static_cast<std::size_t>(j)];
    if (!is_integer(rho)) exact = false;
    const double lt = l[static_cast<std::size_t>(j)] - rho * l1;  // log tilde-lambda_j
    double first = 0.0;
    long long count = 0;
    axis_range(cuts[static_cast<std::size_t>(j)].lo, cuts[static_cast<std::size_t>(j)].hi, first, count);
    acc += 2.0 * first * lt + log_geometric_sum(2.0 * lt, count);
  }
  if (exact) {
    out.log_lower = out.log_upper = acc;
    out.exact = true;
    return out;
  }
  // Remainder factor lambda_1^{2r}, r in [0, 1), widened by the membership slack.
  const double slack = 2.0 * kGeomTolerance * std::abs(l1);
  out.log_lower = acc + std::min(0.0, 2.0 * l1) - slack;
  out.log_upper = acc + std::max(0.0, 2.0 * l1) + slack;
  return out;
}

GroundStateVector zero_particle_ground_state(const Region& region) {
  GroundStateVector g;
  g.region = region;
  g.particle_count = 0;
  g.amplitudes = {1.0};
  g.norm_log = 0.0;
  return g;
}

GroundStateVector one_particle_ground_state(const Region& region, const ModelParams& params) {
  if (region.empty()) fail(ErrorCode::EmptyRegion, "ground state of an empty region");
  GroundStateVector g;
  g.region = region;
  g.particle_count = 1;
  g.norm_log = normalization(region, params);
  g.amplitudes.reserve(region.size());
  for (const auto& x : region.points()) g.amplitudes.push_back(std::exp(log_weight(x, params) - 0.5 * g.norm_log));
  return g;
}

void write_ground_state_csv(std::ostream& os, const GroundStateVector& gs) {
  const int d = gs.region.dim();
  for (int j = 0; j < d; ++j) os << 'x' << (j + 1) << ',';
  os << "amplitude\n";
  os << std::setprecision(17);
  if (gs.particle_count == 0) {
    os << std::string(static_cast<std::size_t>(d), ',') << gs.amplitudes.front() << '\n';
    return;
  }
  for (std::size_t i = 0; i < gs.region.size(); ++i) {
    for (int j = 0; j < d; ++j) os << gs.region[i].coords[static_cast<std::size_t>(j)] << ',';
    os << gs.amplitudes[i] << '\n';
  }
}

}  // namespace pvbs

// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include "pvbs/variational.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "pvbs/error.hpp"
#include "pvbs/weights.hpp"

namespace pvbs {

double c_of(const std::vector<double>& v) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  // Entries at rounding level relative to the largest one count as zero.
  double best = std::numeric_limits<double>::infinity();
  for (double x : v) {
    if (std::abs(x) > kUnityTolerance * scale) best = std::min(best, std::abs(x));
  }
  if (!std::isfinite(best)) fail(ErrorCode::AllZero, "c(v) needs a nonzero entry");
  return best;
}

double angle_theta(const ModelParams& params) {
  params.validate();
  return angle_between_normal_and_log_lambda(params);
}

double closed_form_upper_bound(const ModelParams& params) {
  params.validate();
  const auto l = params.log_lambda();
  const double nl = norm2(l);
  if (!(nl > 0.0)) fail(ErrorCode::UndefinedAngle, "angle undefined for lambda = (1,...,1)");
  const double ml = dot(params.m, l);
  if (!(-ml > 1e-12 * nl)) fail(ErrorCode::HypothesisViolated, "the bound needs m.log(lambda) < 0");
  if (angle_between_normal_and_log_lambda(params) < kThetaTolerance) return 0.0;
  // ||log lambda|| |sin theta| is the norm of the component orthogonal to m.
  std::vector<double> perp(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) perp[i] = l[i] - ml * params.m[i];
  const double cl = c_of(params.lambda);
  return 2.0 * (params.d - 1) / (c_of(params.m) * cl * cl) * norm2(perp);
}

SlabFrame slab_frame(const ModelParams& params) {
  params.validate();
  const int d = params.d;
  SlabFrame f;
  f.change = CoordinateChange::identity(d);
  for (int j = 0; j < d; ++j) {
    if (params.m[static_cast<std::size_t>(j)] < -kUnityTolerance) f.change.reflect[static_cast<std::size_t>(j)] = true;
  }
  const auto l = params.log_lambda();
  f.hypothesis = -dot(params.m, l) > 1e-12 * norm2(l);
  const ModelParams r = f.change.apply(params);
  const auto rl = r.log_lambda();
  int lead = -1;
  for (int pass = 0; pass < 2 && lead < 0; ++pass) {
    for (int j = 0; j < d; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      if (!(r.m[uj] > kUnityTolerance)) continue;
      if (pass == 0 && !(rl[uj] < -kUnityTolerance)) continue;
      if (lead < 0 || r.m[uj] > r.m[static_cast<std::size_t>(lead)] + 1e-12) lead = j;
    }
  }
  std::vector<int> perm{lead};
  for (int j = 0; j < d; ++j) {
    if (j != lead) perm.push_back(j);
  }
  f.change.perm = perm;
  f.normalized = f.change.apply(params);
  return f;
}

RegionSpec trial_slab(const SlabFrame& frame, int L) {
  if (L < 1) fail(ErrorCode::InvalidInput, "L must be >= 1");
  const ModelParams& p = frame.normalized;
  RegionSpec s;
  s.kind = RegionKind::Parallelotope;
  s.base.assign(static_cast<std::size_t>(p.d), -static_cast<double>(L));
  s.base[0] = 0.0;
  s.lengths.assign(static_cast<std::size_t>(p.d), 2 * static_cast<Coord>(L) + 1);
  s.lengths[0] = L;
  std::vector<double> n(p.m.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = p.m[i] / p.m[0];
  n[0] = 1.0;
  s.normal_frac = n;
  return s;
}

namespace {

class LogAccumulator {
 public:
  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x > max_) {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    } else {
      sum_ += std::exp(x - max_);
    }
  }
  double value() const { return max_ + std::log(sum_); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

long long ceil_tol(double x) { return static_cast<long long>(std::ceil(x - kGeomTolerance)); }

}  // namespace

UpperBoundResult trial_state_energy(const ModelParams& params, int L) {
  if (L < 1) fail(ErrorCode::InvalidInput, "L must be >= 1");
  const SlabFrame frame = slab_frame(params);
  const ModelParams& p = frame.normalized;
  const int d = p.d;
  const double fibers = std::pow(2.0 * L + 1.0, d - 1);
  if (fibers > kMaxTrialFibers) fail(ErrorCode::RegionTooLarge, "trial slab has too many fibers");

  const auto ll = p.log_lambda();
  std::vector<double> rho(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) rho[static_cast<std::size_t>(j)] = p.m[static_cast<std::size_t>(j)] / p.m[0];
  std::vector<double> up(static_cast<std::size_t>(d)), down(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const double lj = ll[static_cast<std::size_t>(j)];
    // log(l^2/(1+l^2)) and log(1/(1+l^2))
    up[static_cast<std::size_t>(j)] = -std::log1p(std::exp(-2.0 * lj));
    down[static_cast<std::size_t>(j)] = -std::log1p(std::exp(2.0 * lj));
  }

  LogAccumulator norm, num;
  std::vector<long long> y(static_cast<std::size_t>(d), -L);
  while (true) {
    double s = 0.0, wy = 0.0;
    for (int j = 1; j < d; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      s += rho[uj] * static_cast<double>(y[uj]);
      wy += 2.0 * static_cast<double>(y[uj]) * ll[uj];
    }
    const long long a = ceil_tol(-s);
    const long long b = ceil_tol(L - s) - 1;
    const auto run = [&](long long lo, long long hi) {
      if (hi < lo) return -std::numeric_limits<double>::infinity();
      return wy + 2.0 * static_cast<double>(lo) * ll[0] + log_geometric_sum(2.0 * ll[0], hi - lo + 1);
    };
    if (b >= a) {
      norm.add(run(a, b));
      num.add(run(b, b) + up[0]);
      for (int j = 1; j < d; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (y[uj] == L) {
          num.add(run(a, b) + up[uj]);
        } else {
          const long long b_next = ceil_tol(L - s - rho[uj]) - 1;
          num.add(run(std::max(a, b_next + 1), b) + up[uj]);
        }
        if (y[uj] == -L) num.add(run(std::max(a, ceil_tol(rho[uj] - s)), b) + down[uj]);
      }
    }
    int k = 1;
    while (k < d && y[static_cast<std::size_t>(k)] == L) y[static_cast<std::size_t>(k++)] = -L;
    if (k >= d) break;
    ++y[static_cast<std::size_t>(k)];
  }

  UpperBoundResult r;
  r.L = L;
  r.log_norm = norm.value();
  r.log_numerator = num.value();
  r.rayleigh_quotient = std::exp(r.log_numerator - r.log_norm);
  r.hypothesis = frame.hypothesis;
  r.c_m = c_of(params.m);
  r.c_lambda = c_of(params.lambda);
  if (!params.is_isotropic(kUnityTolerance)) r.theta = angle_between_normal_and_log_lambda(params);
  if (frame.hypothesis) {
    r.closed_form_bound = closed_form_upper_bound(params);
    r.finite_bound = finite_upper_bound(frame, L);
    r.margin = *r.finite_bound - finite_upper_bound_limit(frame);
  }
  return r;
}

namespace {

void check_frame(const SlabFrame& frame) {
  if (!(frame.normalized.lambda[0] < 1.0)) fail(ErrorCode::HypothesisViolated, "finite-L majorant needs lambda_0 < 1");
}

double tilde_log(const ModelParams& p, std::size_t j) {
  const auto ll = p.log_lambda();
  return ll[j] - p.m[j] / p.m[0] * ll[0];
}

}  // namespace

double finite_upper_bound(const SlabFrame& frame, int L) {
  check_frame(frame);
  const ModelParams& p = frame.normalized;
  const double s = 2.0 * std::log(p.lambda[0]);  // < 0
  // d l^{2(L-1)} (1 - l^2) / (1 - l^{2L})
  double total = p.d * std::exp((L - 1) * s) * std::expm1(s) / std::expm1(L * s);
  for (std::size_t j = 1; j < p.lambda.size(); ++j) {
    const double mu = std::abs(tilde_log(p, j));
    if (mu < kUnityTolerance) {
      total += 2.0 / (2.0 * L + 1.0);
    } else {
      const double lq = -2.0 * mu;  // log q
      total += (1.0 + std::exp(2.0 * L * lq)) * std::expm1(lq) / std::expm1((2.0 * L + 1.0) * lq);
    }
  }
  return total / (p.lambda[0] * p.lambda[0]);
}

double finite_upper_bound_limit(const SlabFrame& frame) {
  check_frame(frame);
  const ModelParams& p = frame.normalized;
  double total = 0.0;
  for (std::size_t j = 1; j < p.lambda.size(); ++j) total += -std::expm1(-2.0 * std::abs(tilde_log(p, j)));
  return total / (p.lambda[0] * p.lambda[0]);
}

double decay_exponent(const std::vector<UpperBoundResult>& rows) {
  if (rows.size() < 2) fail(ErrorCode::InvalidInput, "decay fit needs at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.L));
    const double y = std::log(r.rayleigh_quotient);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_sweep_csv(std::ostream& os, const std::vector<UpperBoundResult>& rows) {
  os << "L,rayleigh_quotient,closed_form_bound,theta\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.L << ',' << r.rayleigh_quotient << ',';
    if (r.closed_form_bound) {
      os << *r.closed_form_bound;
    } else {
      os << "NA";
    }
    os << ',' << r.theta << '\n';
  }
}

void to_json(nlohmann::json& j, const UpperBoundResult& r) {
  const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  j = nlohmann::json{{"L", r.L},
                     {"rayleigh_quotient", r.rayleigh_quotient},
                     {"closed_form_bound", opt(r.closed_form_bound)},
                     {"theta", r.theta},
                     {"c_m", r.c_m},
                     {"c_lambda", r.c_lambda},
                     {"hypothesis", r.hypothesis},
                     {"finite_bound", opt(r.finite_bound)},
                     {"margin", opt(r.margin)}};
}

}  // namespace pvbs

// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "pvbs/error.hpp"
#include "pvbs/martingale.hpp"
#include "pvbs/operator.hpp"
#include "pvbs/weights.hpp"

namespace pvbs {

namespace {

void check_stage(const Filtration& f, int n, int ell) {
  if (ell < 2) fail(ErrorCode::InvalidInput, "ell must be >= 2");
  if (n < 1 || n + 1 >= static_cast<int>(f.size())) {
    fail(ErrorCode::StageOutOfRange, "stage " + std::to_string(n) + " needs stages n and n+1 in a filtration of " +
                                         std::to_string(f.size()) + " stages");
  }
}

Eigen::MatrixXd kernel_projector(const SectorOperator& op, double zero_threshold) {
  const Eigen::MatrixXd h = Eigen::MatrixXd(op.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) fail(ErrorCode::SolverFailure, "dense eigensolve failed");
  Eigen::Index k = 0;
  while (k < es.eigenvalues().size() && es.eigenvalues()(k) < zero_threshold) ++k;
  const Eigen::MatrixXd v = es.eigenvectors().leftCols(k);
  return v * v.transpose();
}

}  // namespace

double epsilon_exact(const Filtration& filtration, int n, int ell, const ModelParams& params) {
  check_stage(filtration, n, ell);
  const Region& ln = filtration.stages[static_cast<std::size_t>(n)];
  const Region strip = filtration.difference(n + 1, n + 1 - ell);
  if (!is_connected(ln)) fail(ErrorCode::DisconnectedVolume, "stage " + std::to_string(n) + " is disconnected");
  if (!is_connected(strip)) fail(ErrorCode::DisconnectedVolume, "strip ending at stage " + std::to_string(n + 1) + " is disconnected");
  const int k = n + 1 - ell;
  if (k <= 0) return 0.0;
  const double log_eps2 = normalization(filtration.stages[static_cast<std::size_t>(k)], params) +
                          normalization(filtration.difference(n + 1, n), params) - normalization(ln, params) -
                          normalization(strip, params);
  return std::exp(0.5 * log_eps2);
}

double epsilon_bruteforce(const Filtration& filtration, int n, int ell, const ModelParams& params, double zero_threshold) {
  check_stage(filtration, n, ell);
  const Region& top = filtration.stages[static_cast<std::size_t>(n + 1)];
  if (top.size() > kBruteforceMaxSites) {
    fail(ErrorCode::RegionTooLarge, "brute-force overlap needs |L_{n+1}| <= " + std::to_string(kBruteforceMaxSites));
  }
  const auto e_n = edges_within(top, filtration.stages[static_cast<std::size_t>(n)]);
  const auto e_top = edges_of(top);
  const auto e_strip = edges_within(top, filtration.difference(n + 1, n + 1 - ell));

  const int max_n = top.size() <= kBruteforceAllSectorsSites ? static_cast<int>(top.size())
                                                              : std::min<int>(2, static_cast<int>(top.size()));
  double worst = 0.0;
  for (int p = 0; p <= max_n; ++p) {
    const auto g_n = kernel_projector(assemble_sector(top, params, p, kDefaultMaxStates, &e_n), zero_threshold);
    const auto g_top = kernel_projector(assemble_sector(top, params, p, kDefaultMaxStates, &e_top), zero_threshold);
    const auto g_strip = kernel_projector(assemble_sector(top, params, p, kDefaultMaxStates, &e_strip), zero_threshold);
    const Eigen::MatrixXd prod = g_strip * (g_n - g_top);
    if (prod.size() == 0) continue;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(prod);
    worst = std::max(worst, svd.singularValues()(0));
  }
  return worst;
}

namespace {

// Both functions are symmetric under lambda -> 1/lambda; ls = -2|log lambda| < 0.
double envelope_from_log(int ell, double ls) {
  return std::exp((ell - 1) * ls) * (std::expm1(ls) / std::expm1(ell * ls));
}

}  // namespace

double f_decay(int n, int ell, double lambda) {
  if (ell < 1 || n < ell) fail(ErrorCode::InvalidInput, "f_decay needs n >= ell >= 1");
  if (!(lambda > 0.0)) fail(ErrorCode::InvalidInput, "lambda must be positive");
  const int k = n + 1 - ell;
  if (k == 0) return 0.0;
  const double ls = -2.0 * std::abs(std::log(lambda));
  if (ls > -1e-14) return static_cast<double>(k) / (static_cast<double>(ell) * static_cast<double>(n));
  // f = E (1 - s^k)/(1 - s^n) = E (1 - D), D = s^k (1 - s^{l-1})/(1 - s^n) decreasing in n,
  // so the rounded values are monotone in n and never exceed E.
  const double d = std::exp(k * ls) * (std::expm1((ell - 1) * ls) / std::expm1(n * ls));
  return envelope_from_log(ell, ls) * (1.0 - d);
}

double f_envelope(int ell, double lambda) {
  if (ell < 1) fail(ErrorCode::InvalidInput, "ell must be >= 1");
  if (!(lambda > 0.0)) fail(ErrorCode::InvalidInput, "lambda must be positive");
  const double ls = -2.0 * std::abs(std::log(lambda));
  if (ls > -1e-14) return 1.0 / ell;
  return envelope_from_log(ell, ls);
}

// ---------------------------------------------------------------------------

std::string to_string(FormulaSource s) {
  switch (s) {
    case FormulaSource::ExactLemma: return "exact";
    case FormulaSource::Case1a: return "1a";
    case FormulaSource::Case1b: return "1b";
    case FormulaSource::Case2a: return "2a";
    case FormulaSource::Case2b: return "2b";
    case FormulaSource::Case3a: return "3a";
    case FormulaSource::Case3b: return "3b";
    case FormulaSource::Case4: return "4";
  }
  return "?";
}

FormulaSource formula_source(CaseLabel label) {
  switch (label) {
    case CaseLabel::Case1a: return FormulaSource::Case1a;
    case CaseLabel::Case1b: return FormulaSource::Case1b;
    case CaseLabel::Case2a: return FormulaSource::Case2a;
    case CaseLabel::Case2b: return FormulaSource::Case2b;
    case CaseLabel::Case3a: return FormulaSource::Case3a;
    case CaseLabel::Case3b: return FormulaSource::Case3b;
    case CaseLabel::Case4: return FormulaSource::Case4;
  }
  return FormulaSource::ExactLemma;
}

namespace {

struct Shape {
  double log_tilde = 0.0;  // log of the governing ratio
  double log_sqrt_c = 0.0;  // log of the prefactor multiplying the root
  enum { Common, Pure, Power } form = Common;
};

// sqrt(C) sqrt(q^{l-1}(1-q)/(1-q^l)) with q = min(t, 1/t)^2, in logs.
double log_common(double log_tilde, int ell) {
  const double mu = std::abs(log_tilde);
  return 0.5 * ((ell - 1) * (-2.0 * mu) + std::log(-std::expm1(-2.0 * mu)) - std::log(-std::expm1(-2.0 * mu * ell)));
}

double log_max_sq(double log_l) { return 2.0 * std::abs(log_l); }  // log max(l^2, l^-2)

void check_direction(const Classification& cls, int direction) {
  if (direction < 0 || direction >= cls.normalized.d) fail(ErrorCode::InvalidInput, "direction out of range");
}

// Case 2a / 4 constant K = l1^2/(l1^2 - 1) with l1 > 1.
double log_k(double log_l1) { return 2.0 * log_l1 - std::log(std::expm1(2.0 * log_l1)); }

Shape shape_of(const Classification& cls, int j) {
  check_direction(cls, j);
  const ModelParams& p = cls.normalized;
  const auto ll = p.log_lambda();
  const auto& m = p.m;
  const std::size_t uj = static_cast<std::size_t>(j);
  const double rho = [&] {
    if (cls.label == CaseLabel::Case1b) return 0.0;
    return m[uj] / m[0];
  }();
  Shape s;
  switch (cls.label) {
    case CaseLabel::Case1a:
      if (j == 0) {
        s.log_tilde = ll[0];
      } else {
        s.log_tilde = ll[1] - rho * ll[0];
        s.log_sqrt_c = log_max_sq(ll[0]);
      }
      break;
    case CaseLabel::Case1b:
      s.log_tilde = j == 0 ? ll[0] : ll[1] - ll[0];
      break;
    case CaseLabel::Case2a:
      if (j == 0) {
        s.log_tilde = ll[0];
        s.log_sqrt_c = 0.5 * log_k(ll[0]);
      } else {
        s.log_tilde = ll[1];
        s.log_sqrt_c = log_k(ll[0]);
      }
      break;
    case CaseLabel::Case2b:
      s.log_tilde = ll[0];
      if (j == 1) {
        s.form = Shape::Power;
        s.log_sqrt_c = 0.5 * (4.0 * ll[0] - std::log(std::expm1(2.0 * ll[0])));
      }
      break;
    case CaseLabel::Case3a: {
      s.log_sqrt_c = log_max_sq(ll[0]);
      const double t2 = ll[1] - (m[1] / m[0]) * ll[0];
      if (j == 0) {
        s.log_tilde = ll[0];
      } else if (j == 1) {
        s.log_tilde = t2;
      } else {
        s.log_tilde = (ll[uj] - rho * ll[0]) - cls.slant[uj] * t2;
      }
      break;
    }
    case CaseLabel::Case3b: {
      const int d = p.d;
      const double lld = ll[static_cast<std::size_t>(d - 1)];
      const int count = cls.j_prime;
      if (j < count) s.log_sqrt_c = log_max_sq(lld);
      if (j == 0) {
        s.log_tilde = lld;
      } else if (j < count) {
        s.log_tilde = (2.0 - rho) * lld;
      } else {
        s.log_tilde = ll[uj];
      }
      break;
    }
    case CaseLabel::Case4:
      if (j == 0) {
        s.log_tilde = ll[0];
        s.form = Shape::Pure;
        s.log_sqrt_c = std::abs(ll[0]);
      } else {
        s.log_tilde = (rho - cls.slant[uj]) * ll[0];
        s.log_sqrt_c = log_k(ll[0]);
      }
      break;
  }
  return s;
}

}  // namespace

double tilde_lambda(const Classification& cls, int direction) { return std::exp(shape_of(cls, direction).log_tilde); }

EpsilonRecord epsilon_closed_form(const Classification& cls, int ell, int direction) {
  if (ell < 1) fail(ErrorCode::InvalidInput, "ell must be >= 1");
  const Shape s = shape_of(cls, direction);
  if (std::abs(s.log_tilde) < kUnityTolerance) {
    fail(ErrorCode::TildeLambdaUnity, "governing ratio equals 1 in direction x" + std::to_string(direction + 1));
  }
  double log_eps = 0.0;
  switch (s.form) {
    case Shape::Common:
      log_eps = s.log_sqrt_c + log_common(s.log_tilde, ell);
      break;
    case Shape::Pure:
      log_eps = s.log_sqrt_c - (ell - 1) * std::abs(s.log_tilde);
      break;
    case Shape::Power:
      log_eps = s.log_sqrt_c - ell * std::abs(s.log_tilde);
      break;
  }
  EpsilonRecord r;
  r.ell = ell;
  r.epsilon = std::exp(log_eps);
  r.source = formula_source(cls.label);
  r.satisfies_condition = 2.0 * log_eps < -std::log(static_cast<double>(ell));
  return r;
}

int minimal_ell(const Classification& cls, int direction) {
  check_direction(cls, direction);
  if (direction == 0 && (cls.label == CaseLabel::Case1a || cls.label == CaseLabel::Case3a || cls.label == CaseLabel::Case3b)) {
    const double t = connectivity_threshold(cls.normalized, RegionKind::Parallelotope);
    return std::max(2, static_cast<int>(std::ceil(t - kGeomTolerance)));
  }
  return 2;
}

EpsilonRecord select_ell(const Classification& cls, int direction, int ell_min, int ell_max) {
  const int start = std::max({2, ell_min, minimal_ell(cls, direction)});
  for (int ell = start; ell <= ell_max; ++ell) {
    EpsilonRecord r = epsilon_closed_form(cls, ell, direction);
    if (r.satisfies_condition) return r;
  }
  fail(ErrorCode::NoFeasibleEll, "no ell <= " + std::to_string(ell_max) + " satisfies epsilon^2 < 1/ell in direction x" +
                                     std::to_string(direction + 1));
}

// ---------------------------------------------------------------------------

LemmaInstance random_lemma_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const auto coupling = [&] { return std::exp(std::log(3.0) * (2.0 * u01(rng) - 1.0)); };
  while (true) {
    LemmaInstance inst;
    const int d = pick(1, 2);
    std::vector<double> lambda(static_cast<std::size_t>(d));
    for (auto& l : lambda) l = coupling();
    std::vector<double> m(static_cast<std::size_t>(d), 0.0);
    m[0] = 1.0;
    inst.params = ModelParams::make(lambda, m);
    RegionSpec spec;
    Sweep sweep;
    if (d == 1) {
      const int len = pick(3, 14);
      spec = RegionSpec::box({0}, {len});
      sweep = Sweep::axis(0, 1);
      inst.description = "interval " + std::to_string(len);
    } else {
      const int shape = pick(0, 2);
      const double slopes[] = {0.0, 0.5, 1.0, 2.0, 2.0 * u01(rng)};
      const double rho = slopes[pick(0, 4)];
      if (shape == 0) {
        const int w = pick(2, 4);
        spec = RegionSpec::box({0, 0}, {w, pick(2, 14 / w)});
        inst.description = "box";
      } else {
        spec.kind = shape == 1 ? RegionKind::Parallelogram : RegionKind::Trapezoid;
        spec.base = {0.0, 0.0};
        spec.lengths = {pick(2, 4), pick(2, 3)};
        spec.normal_frac = std::vector<double>{1.0, rho};
        inst.description = to_string(spec.kind);
      }
      switch (pick(0, 4)) {
        case 0: sweep = Sweep::axis(0, 2); break;
        case 1: sweep = Sweep::axis(1, 2); break;
        case 2: sweep = Sweep::along({1.0, rho}, "n.x"); break;
        case 3: sweep = Sweep::along({1.0, 1.0}, "x1+x2"); break;
        default: sweep = Sweep::along({1.0, -1.0}, "x1-x2"); break;
      }
    }
    try {
      const Region target = build_region(spec, inst.params);
      if (target.size() > kBruteforceMaxSites) continue;
      inst.filtration = build_filtration(target, sweep);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::EmptyRegion || e.code() == ErrorCode::InvalidDirection) continue;
      throw;
    }
    const int stages = static_cast<int>(inst.filtration.size()) - 1;
    if (stages < 2) continue;
    inst.n = pick(1, stages - 1);
    inst.ell = pick(2, inst.n + 1);
    inst.description += " swept along " + sweep.label;
    return inst;
  }
}

LemmaInstance disconnected_lemma_instance() {
  LemmaInstance inst;
  inst.params = ModelParams::make({2.0, 0.5}, {1.0, 0.0});
  std::vector<LatticePoint> pts;
  for (Coord x = 0; x < 3; ++x) pts.push_back(LatticePoint{{x, 0}});
  for (Coord y = 1; y < 3; ++y) {
    pts.push_back(LatticePoint{{0, y}});
    pts.push_back(LatticePoint{{2, y}});
  }
  const Region target(2, pts, RegionSpec::explicit_points(2, pts));
  inst.filtration = build_filtration(target, Sweep::axis(1, 2));
  inst.n = 2;
  inst.ell = 2;
  inst.description = "U shape swept along x2";
  return inst;
}

}  // namespace pvbs

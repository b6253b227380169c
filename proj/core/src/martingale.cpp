// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include "pvbs/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "pvbs/error.hpp"

namespace pvbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kWarningCheckSites = 5000;

std::vector<double> unit(int j, int d) {
  std::vector<double> e(static_cast<std::size_t>(d), 0.0);
  e[static_cast<std::size_t>(j)] = 1.0;
  return e;
}

std::vector<double> normal_over_m1(const ModelParams& p) {
  std::vector<double> n(p.m.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = p.m[i] / p.m[0];
  n[0] = 1.0;
  return n;
}

bool same_functional(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  }
  return true;
}

std::string slant_label(const std::vector<double>& v) { return v.empty() ? "" : "v.x"; }

// Origin of the sweep at `step`, given the lower ends b[j] of earlier axis strips.
double step_origin(const CasePlan& plan, std::size_t step, const std::vector<double>& b) {
  const auto& st = plan.steps[step];
  const auto& cls = plan.cls;
  const bool last = step + 1 == plan.steps.size();
  if (last && cls.label == CaseLabel::Case2b) {
    const auto cuts = constraints_of(plan.target, &cls.normalized);
    return 1.0 - (cuts[1].hi + b[1]);
  }
  if (last && (cls.label == CaseLabel::Case2a || cls.label == CaseLabel::Case4)) {
    const auto n = normal_over_m1(cls.normalized);
    double o = 0.0;
    for (std::size_t j = 1; j < n.size(); ++j) o += (n[j] - st.functional[j]) * (-b[j]);
    return o;
  }
  for (const auto& c : constraints_of(plan.target, &cls.normalized)) {
    if (same_functional(c.a, st.functional) && std::isfinite(c.lo)) return c.lo;
  }
  fail(ErrorCode::InvalidInput, "no target constraint matches sweep " + st.label);
}

}  // namespace

CasePlan make_case_plan(const Classification& cls, int scale) {
  if (scale < 1) fail(ErrorCode::InvalidInput, "scale must be >= 1");
  const ModelParams& p = cls.normalized;
  const int d = p.d;
  const double L = scale;
  CasePlan plan;
  plan.cls = cls;
  plan.scale = scale;
  RegionSpec& t = plan.target;
  t.base.assign(static_cast<std::size_t>(d), -L);
  t.lengths.assign(static_cast<std::size_t>(d), 2 * scale);
  const auto axis_step = [&](int j) { plan.steps.push_back({j, "x" + std::to_string(j + 1), unit(j, d)}); };

  switch (cls.label) {
    case CaseLabel::Case1a:
    case CaseLabel::Case2a: {
      const auto n = normal_over_m1(p);
      t.kind = cls.label == CaseLabel::Case1a ? RegionKind::Parallelogram : RegionKind::Trapezoid;
      t.base = {n[1] * L, -L};
      t.normal_frac = n;
      axis_step(1);
      if (cls.label == CaseLabel::Case1a) {
        plan.steps.push_back({0, "m.x", n});
      } else {
        axis_step(0);
      }
      break;
    }
    case CaseLabel::Case1b:
      t.kind = RegionKind::Parallelogram;
      t.base = {-L, 0.0};
      t.slant = cls.slant;
      t.slant_axis = 0;
      axis_step(1);
      plan.steps.push_back({0, "v.x", cls.slant});
      break;
    case CaseLabel::Case2b:
      t.kind = RegionKind::Trapezoid;
      t.base = {0.0, -L};
      t.slant = cls.slant;
      t.normal_frac = std::vector<double>{1.0, 0.0};
      axis_step(1);
      plan.steps.push_back({0, "-x1", {-1.0, 0.0}});
      break;
    case CaseLabel::Case3a:
    case CaseLabel::Case3b: {
      const auto n = normal_over_m1(p);
      t.kind = RegionKind::Parallelotope;
      t.base[0] = 0.0;
      t.lengths[0] = scale;
      t.normal_frac = n;
      t.slant = cls.slant;
      t.slant_axis = cls.label == CaseLabel::Case3a ? 1 : d - 1;
      if (cls.label == CaseLabel::Case3a) {
        for (int j = d - 1; j >= 2; --j) axis_step(j);
        plan.steps.push_back({1, slant_label(cls.slant), cls.slant});
      } else {
        plan.steps.push_back({d - 1, slant_label(cls.slant), cls.slant});
        for (int j = d - 2; j >= 1; --j) axis_step(j);
      }
      plan.steps.push_back({0, "m.x", n});
      break;
    }
    case CaseLabel::Case4: {
      const auto n = normal_over_m1(p);
      t.kind = RegionKind::Trapezoid;
      double b1 = 0.0;
      for (int j = 1; j < d; ++j) b1 += n[static_cast<std::size_t>(j)] * L;
      t.base[0] = b1;
      t.lengths[0] = scale;
      t.normal_frac = n;
      t.slant = cls.slant;
      for (int j = d - 1; j >= 1; --j) axis_step(j);
      plan.steps.push_back({0, "v.x", cls.slant});
      break;
    }
  }
  return plan;
}

NestedVolume nested_volume(const CasePlan& plan, std::size_t step, const std::vector<int>& ells,
                           const std::vector<long long>& offsets) {
  if (step >= plan.steps.size()) fail(ErrorCode::InvalidInput, "step out of range");
  if (offsets.size() < step) fail(ErrorCode::InvalidInput, "need one offset per earlier step");
  if (ells.size() != static_cast<std::size_t>(plan.cls.normalized.d)) fail(ErrorCode::DimensionMismatch, "need one ell per direction");
  NestedVolume out;
  out.spec = plan.target;
  std::vector<double> b(ells.size(), 0.0);
  for (std::size_t s = 0; s < step; ++s) {
    const auto& st = plan.steps[s];
    const double lo = step_origin(plan, s, b) + static_cast<double>(offsets[s]);
    out.spec.cuts.push_back(LinearCut{st.functional, lo, lo + ells[static_cast<std::size_t>(st.direction)]});
    b[static_cast<std::size_t>(st.direction)] = lo;
  }
  out.sweep = Sweep::along(plan.steps[step].functional, plan.steps[step].label);
  out.sweep.origin = step_origin(plan, step, b);
  return out;
}

Filtration case_filtration(const CasePlan& plan, std::size_t step, const std::vector<int>& ells,
                           const std::vector<long long>& offsets) {
  const NestedVolume v = nested_volume(plan, step, ells, offsets);
  return build_filtration(v.spec, plan.cls.normalized, v.sweep);
}

// ---------------------------------------------------------------------------

namespace {

struct Template {
  std::string kind;
  RegionSpec spec;
  bool scan = false;  // slot-0 offset ranges over [0, 1)
  std::vector<double> scan_functional;
};

std::vector<Template> family_templates(const Classification& cls, const std::vector<int>& ells) {
  const ModelParams& p = cls.normalized;
  const int d = p.d;
  std::vector<Template> out;
  RegionSpec base;
  base.base.assign(static_cast<std::size_t>(d), 0.0);
  base.lengths.assign(ells.begin(), ells.end());
  const auto box = [&] {
    Template b{"B", base, false, {}};
    b.spec.kind = RegionKind::Parallelotope;
    return b;
  };

  switch (cls.label) {
    case CaseLabel::Case1a: {
      Template t{"P", base, true, normal_over_m1(p)};
      t.spec.kind = RegionKind::Parallelogram;
      t.spec.normal_frac = t.scan_functional;
      out.push_back(t);
      break;
    }
    case CaseLabel::Case1b: {
      Template t{"P", base, false, {}};
      t.spec.kind = RegionKind::Parallelogram;
      t.spec.slant = cls.slant;
      t.spec.slant_axis = 0;
      out.push_back(t);
      break;
    }
    case CaseLabel::Case2a: {
      Template t{"T", base, true, normal_over_m1(p)};
      t.spec.kind = RegionKind::Trapezoid;
      t.spec.normal_frac = t.scan_functional;
      out.push_back(t);
      out.push_back(box());
      break;
    }
    case CaseLabel::Case2b: {
      Template t{"T", base, false, {}};
      t.spec.kind = RegionKind::Trapezoid;
      t.spec.slant = cls.slant;
      t.spec.normal_frac = std::vector<double>{1.0, 0.0};
      out.push_back(t);
      out.push_back(box());
      break;
    }
    case CaseLabel::Case3a:
    case CaseLabel::Case3b: {
      Template t{"P", base, true, normal_over_m1(p)};
      t.spec.kind = RegionKind::Parallelotope;
      t.spec.normal_frac = t.scan_functional;
      t.spec.slant = cls.slant;
      t.spec.slant_axis = cls.label == CaseLabel::Case3a ? 1 : d - 1;
      out.push_back(t);
      break;
    }
    case CaseLabel::Case4: {
      Template pp{"P", base, false, {}};
      pp.spec.kind = RegionKind::Parallelotope;
      pp.spec.slant = cls.slant;
      pp.spec.slant_axis = 0;
      out.push_back(pp);
      Template t{"T", base, true, normal_over_m1(p)};
      t.spec.kind = RegionKind::Trapezoid;
      t.spec.normal_frac = t.scan_functional;
      t.spec.slant = cls.slant;
      out.push_back(t);
      break;
    }
  }
  return out;
}

double frac(double x) {
  double f = x - std::floor(x);
  if (f > 1.0 - kGeomTolerance) f = 0.0;
  return f;
}

// Slot-0 offsets in [0, 1) at which membership can change, plus midpoints.
std::vector<double> scan_offsets(const Template& t, const ModelParams& params) {
  RegionSpec wide = t.spec;
  wide.base[0] = -1.0;
  wide.lengths[0] += 2;
  const Region r = build_region(wide, params);
  std::vector<double> br{0.0};
  for (const auto& x : r.points()) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.coords.size(); ++i) s += t.scan_functional[i] * static_cast<double>(x.coords[i]);
    br.push_back(frac(s));
  }
  std::sort(br.begin(), br.end());
  std::vector<double> uniq;
  for (double v : br) {
    if (uniq.empty() || v - uniq.back() > kGeomTolerance) uniq.push_back(v);
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    out.push_back(uniq[i]);
    const double next = i + 1 < uniq.size() ? uniq[i + 1] : 1.0;
    out.push_back(0.5 * (uniq[i] + next));
  }
  return out;
}

}  // namespace

std::vector<FamilyMember> base_family(const Classification& cls, const std::vector<int>& ells) {
  if (ells.size() != static_cast<std::size_t>(cls.normalized.d)) fail(ErrorCode::DimensionMismatch, "need one ell per direction");
  std::vector<FamilyMember> out;
  std::set<std::vector<LatticePoint>> seen;
  for (const Template& t : family_templates(cls, ells)) {
    const std::vector<double> offsets = t.scan ? scan_offsets(t, cls.normalized) : std::vector<double>{0.0};
    for (double o : offsets) {
      RegionSpec s = t.spec;
      s.base[0] = o;
      Region r;
      try {
        r = build_region(s, cls.normalized);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::EmptyRegion) continue;
        throw;
      }
      Region c = region_canonical(r);
      if (!seen.insert(c.points()).second) continue;
      out.push_back(FamilyMember{t.kind, Region(c.dim(), c.points(), s), 0.0, 0});
    }
  }
  return out;
}

BaseGapResult base_gap(const Classification& cls, const std::vector<int>& ells, const SolverCaps& caps) {
  BaseGapResult out;
  out.members = base_family(cls, ells);
  if (out.members.empty()) fail(ErrorCode::EmptyRegion, "base family is empty");
  out.family_size = out.members.size();
  out.gap = kInf;
  for (auto& mem : out.members) {
    const GapResult g = spectral_gap(mem.region, cls.normalized, mem.region.size() <= kBruteforceMaxSites, caps);
    mem.gap = g.gap;
    mem.kernel_dim = g.kernel_dim;
    out.gap = std::min(out.gap, g.gap);
  }
  return out;
}

double compose_lower_bound(double base_gap, const std::vector<EpsilonRecord>& records) {
  double lower = base_gap;
  for (const auto& r : records) {
    const double ell = static_cast<double>(r.ell);
    const double f = 1.0 - r.epsilon * std::sqrt(ell);
    lower *= f * f / ell;
  }
  return lower;
}

std::vector<EpsilonRecord> BoundCertificate::records() const {
  std::vector<EpsilonRecord> out;
  for (const auto& d : per_direction) out.push_back(d.record);
  return out;
}

void attach_upper_bound(BoundCertificate& cert, double upper) {
  cert.upper_bound = upper;
  cert.consistent = cert.lower_bound <= upper + 1e-9;
}

namespace {

// Warn when a representative strip of some sweep is disconnected.
void strip_warnings(const CasePlan& plan, const std::vector<int>& ells, std::vector<std::string>& warnings) {
  const Region target = build_region(plan.target, plan.cls.normalized);
  if (target.size() > kWarningCheckSites) {
    warnings.push_back("strip connectivity not checked: target has " + std::to_string(target.size()) + " sites");
    return;
  }
  std::vector<long long> offsets;
  for (std::size_t s = 0; s < plan.steps.size(); ++s) {
    const auto& st = plan.steps[s];
    const int ell = ells[static_cast<std::size_t>(st.direction)];
    Filtration f;
    try {
      f = case_filtration(plan, s, ells, offsets);
    } catch (const Error& e) {
      warnings.push_back("sweep " + st.label + ": " + e.what());
      return;
    }
    const int n_stages = static_cast<int>(f.size()) - 1;
    if (n_stages < ell) {
      warnings.push_back("sweep " + st.label + " has " + std::to_string(n_stages) + " stages, fewer than ell = " + std::to_string(ell));
    }
    for (int n = 1; n <= n_stages; ++n) {
      const Region strip = f.difference(n, n - ell);
      if (!is_connected(strip)) {
        warnings.push_back("sweep " + st.label + ": strip ending at stage " + std::to_string(n) + " is disconnected");
        break;
      }
    }
    offsets.push_back(0);
  }
}

}  // namespace

BoundCertificate certify_lower_bound(const ModelParams& params, int scale, const CertifyOptions& options) {
  params.validate();
  if (params.d < 2) fail(ErrorCode::InvalidInput, "lower-bound certificates need d >= 2");
  BoundCertificate cert;
  cert.params = params;
  cert.classification = classify_case(params);
  if (cert.classification.gapless_direction) {
    fail(ErrorCode::GaplessDirection, "m is antiparallel to log lambda (theta = 0): the half-space gap vanishes");
  }
  cert.scale = scale;
  const CasePlan plan = make_case_plan(cert.classification, scale);
  cert.target = plan.target;

  std::vector<int> ells(static_cast<std::size_t>(params.d), 2);
  for (const auto& st : plan.steps) {
    DirectionRecord rec;
    rec.direction = st.direction;
    rec.label = st.label;
    rec.record = select_ell(cert.classification, st.direction, 2, options.ell_max);
    rec.d_ell = rec.record.ell;
    ells[static_cast<std::size_t>(st.direction)] = rec.record.ell;
    cert.per_direction.push_back(rec);
  }
  cert.base = base_gap(cert.classification, ells, options.caps);
  cert.lower_bound = compose_lower_bound(cert.base.gap, cert.records());
  strip_warnings(plan, ells, cert.warnings);
  return cert;
}

BoundCertificate certify_bulk(const std::vector<double>& lambda, const CertifyOptions& options) {
  const int d = static_cast<int>(lambda.size());
  if (d < 2) fail(ErrorCode::InvalidInput, "bulk certificates need d >= 2");
  std::vector<double> ll(lambda.size());
  for (std::size_t i = 0; i < ll.size(); ++i) {
    if (!(lambda[i] > 0.0) || !std::isfinite(lambda[i])) fail(ErrorCode::InvalidInput, "lambda entries must be positive and finite");
    ll[i] = std::log(lambda[i]);
  }
  std::size_t lead = 0;
  for (std::size_t i = 1; i < ll.size(); ++i) {
    if (std::abs(ll[i]) > std::abs(ll[lead]) + 1e-15) lead = i;
  }
  if (std::abs(ll[lead]) <= kUnityTolerance) fail(ErrorCode::GaplessBulk, "lambda = (1,...,1) is gapless");

  struct Best {
    std::vector<double> m;
    long long cost = std::numeric_limits<long long>::max();
    int weight = 0;
  };
  std::optional<Best> best;
  std::vector<int> s(static_cast<std::size_t>(d - 1), -3);
  while (true) {
    std::vector<double> m(static_cast<std::size_t>(d), 0.0);
    m[lead] = 1.0;
    int weight = 0;
    for (std::size_t k = 0, i = 0; i < m.size(); ++i) {
      if (i == lead) continue;
      m[i] = s[k];
      weight += std::abs(s[k]);
      ++k;
    }
    try {
      const ModelParams p = ModelParams::make_normalized(lambda, m);
      const Classification cls = classify_case(p);
      const bool ok = !cls.gapless_direction && (cls.label == CaseLabel::Case1a || cls.label == CaseLabel::Case3a);
      if (ok) {
        long long cost = 1;
        for (int j = 0; j < d; ++j) cost *= select_ell(cls, j, 2, options.ell_max).ell;
        if (!best || cost < best->cost || (cost == best->cost && weight < best->weight)) best = Best{m, cost, weight};
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoFeasibleEll && e.code() != ErrorCode::TildeLambdaUnity) throw;
    }
    std::size_t k = 0;
    while (k < s.size() && s[k] == 3) s[k++] = -3;
    if (k == s.size()) break;
    ++s[k];
  }
  if (!best) fail(ErrorCode::NoFeasibleEll, "no admissible normal yields feasible ell");
  const ModelParams chosen = ModelParams::make_normalized(lambda, best->m);
  const Classification cls = classify_case(chosen);
  int scale = 1;
  for (int j = 0; j < d; ++j) scale = std::max(scale, select_ell(cls, j, 2, options.ell_max).ell);
  return certify_lower_bound(chosen, scale, options);
}

BoundCertificate certify_bulk(const ModelParams& params, const CertifyOptions& options) {
  return certify_bulk(params.lambda, options);
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const EpsilonRecord& r) {
  j = nlohmann::json{{"ell", r.ell},
                     {"epsilon", r.epsilon},
                     {"formula_source", to_string(r.source)},
                     {"satisfies_condition", r.satisfies_condition}};
}

void to_json(nlohmann::json& j, const BoundCertificate& c) {
  nlohmann::json dirs = nlohmann::json::array();
  for (const auto& d : c.per_direction) {
    nlohmann::json e = d.record;
    e["direction"] = d.direction + 1;
    e["label"] = d.label;
    e["d_ell"] = d.d_ell;
    dirs.push_back(std::move(e));
  }
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : c.base.members) {
    members.push_back({{"kind", m.kind},
                       {"sites", m.region.size()},
                       {"gap", m.gap},
                       {"kernel_dim", m.kernel_dim},
                       {"points", m.region.points()}});
  }
  j = nlohmann::json{{"params", c.params},
                     {"classification", c.classification},
                     {"scale", c.scale},
                     {"target", c.target},
                     {"per_direction", dirs},
                     {"base_gap", {{"gap", c.base.gap}, {"family_size", c.base.family_size}, {"members", members}}},
                     {"lower_bound", c.lower_bound},
                     {"upper_bound", c.upper_bound ? nlohmann::json(*c.upper_bound) : nlohmann::json(nullptr)},
                     {"consistent", c.consistent},
                     {"warnings", c.warnings}};
}

}  // namespace pvbs

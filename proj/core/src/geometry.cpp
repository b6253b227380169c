// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include "pvbs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

#include <nlohmann/json.hpp>

#include "pvbs/error.hpp"

namespace pvbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> unit_vector(int k, int d) {
  std::vector<double> e(static_cast<std::size_t>(d), 0.0);
  e[static_cast<std::size_t>(k)] = 1.0;
  return e;
}

double apply(const std::vector<double>& a, const LatticePoint& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * static_cast<double>(x.coords[i]);
  return s;
}

std::vector<double> normal_fraction(const ModelParams* params) {
  if (params == nullptr) fail(ErrorCode::InvalidInput, "region spec needs model parameters for its slanted boundary");
  const double m1 = params->m[0];
  if (std::abs(m1) < kUnityTolerance) fail(ErrorCode::DegenerateNormal, "m_1 = 0 but a slanted boundary m/m_1 was requested");
  std::vector<double> out(params->m.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = params->m[i] / m1;
  return out;
}

void check_vector(const std::optional<std::vector<double>>& v, int d, const char* name) {
  if (v && static_cast<int>(v->size()) != d) {
    fail(ErrorCode::DimensionMismatch, std::string(name) + " must have d entries");
  }
}

struct Bounds {
  std::vector<double> lo, hi;  // inclusive integer bounds, possibly infinite
};

// Interval propagation over the constraint list until a fixed point.
Bounds bounding_box(const std::vector<LinearCut>& cuts, int d) {
  Bounds b{std::vector<double>(static_cast<std::size_t>(d), -kInf), std::vector<double>(static_cast<std::size_t>(d), kInf)};
  for (int sweep = 0; sweep < 64; ++sweep) {
    bool changed = false;
    for (const auto& c : cuts) {
      for (int j = 0; j < d; ++j) {
        const double aj = c.a[static_cast<std::size_t>(j)];
        if (aj == 0.0) continue;
        double rmin = 0.0, rmax = 0.0;
        for (int k = 0; k < d; ++k) {
          if (k == j) continue;
          const double ak = c.a[static_cast<std::size_t>(k)];
          if (ak == 0.0) continue;
          const double p = ak * b.lo[static_cast<std::size_t>(k)];
          const double q = ak * b.hi[static_cast<std::size_t>(k)];
          rmin += std::min(p, q);
          rmax += std::max(p, q);
        }
        // lo <= aj x_j + r < hi
        double xl = -kInf, xh = kInf;
        if (aj > 0) {
          if (std::isfinite(c.lo) && std::isfinite(rmax)) xl = (c.lo - rmax) / aj;
          if (std::isfinite(c.hi) && std::isfinite(rmin)) xh = (c.hi - rmin) / aj;
        } else {
          if (std::isfinite(c.hi) && std::isfinite(rmin)) xl = (c.hi - rmin) / aj;
          if (std::isfinite(c.lo) && std::isfinite(rmax)) xh = (c.lo - rmax) / aj;
        }
        if (std::isfinite(xl)) {
          const double v = std::floor(xl - kGeomTolerance);
          if (v > b.lo[static_cast<std::size_t>(j)]) { b.lo[static_cast<std::size_t>(j)] = v; changed = true; }
        }
        if (std::isfinite(xh)) {
          const double v = std::ceil(xh + kGeomTolerance);
          if (v < b.hi[static_cast<std::size_t>(j)]) { b.hi[static_cast<std::size_t>(j)] = v; changed = true; }
        }
      }
    }
    if (!changed) break;
  }
  for (int j = 0; j < d; ++j) {
    if (!std::isfinite(b.lo[static_cast<std::size_t>(j)]) || !std::isfinite(b.hi[static_cast<std::size_t>(j)])) {
      fail(ErrorCode::UnboundedRegion, "constraints do not bound coordinate x" + std::to_string(j + 1));
    }
  }
  return b;
}

bool admits_all(const std::vector<LinearCut>& cuts, const LatticePoint& x) {
  for (const auto& c : cuts) {
    if (!c.admits(x)) return false;
  }
  return true;
}

std::vector<LatticePoint> enumerate(const std::vector<LinearCut>& cuts, int d) {
  const Bounds box = bounding_box(cuts, d);
  std::vector<LatticePoint> out;
  LatticePoint x{std::vector<Coord>(static_cast<std::size_t>(d), 0)};
  std::vector<Coord> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    lo[static_cast<std::size_t>(j)] = static_cast<Coord>(box.lo[static_cast<std::size_t>(j)]);
    hi[static_cast<std::size_t>(j)] = static_cast<Coord>(box.hi[static_cast<std::size_t>(j)]);
    if (lo[static_cast<std::size_t>(j)] > hi[static_cast<std::size_t>(j)]) return out;
  }
  // Odometer over transverse coordinates x_2..x_d; x_1 fibre via ceiling arithmetic.
  for (int j = 1; j < d; ++j) x.coords[static_cast<std::size_t>(j)] = lo[static_cast<std::size_t>(j)];
  while (true) {
    double x1lo = static_cast<double>(lo[0]), x1hi = static_cast<double>(hi[0]);
    bool feasible = true;
    for (const auto& c : cuts) {
      double rest = 0.0;
      for (int k = 1; k < d; ++k) rest += c.a[static_cast<std::size_t>(k)] * static_cast<double>(x.coords[static_cast<std::size_t>(k)]);
      const double a0 = c.a[0];
      if (a0 == 0.0) {
        if (!(rest >= c.lo - kGeomTolerance && rest < c.hi - kGeomTolerance)) { feasible = false; break; }
        continue;
      }
      const double l = c.lo - kGeomTolerance - rest;
      const double h = c.hi - kGeomTolerance - rest;
      if (a0 > 0) {
        if (std::isfinite(l)) x1lo = std::max(x1lo, std::ceil(l / a0) - 1.0);
        if (std::isfinite(h)) x1hi = std::min(x1hi, std::ceil(h / a0));
      } else {
        if (std::isfinite(l)) x1hi = std::min(x1hi, std::floor(l / a0) + 1.0);
        if (std::isfinite(h)) x1lo = std::max(x1lo, std::floor(h / a0));
      }
    }
    if (feasible) {
      for (double v = x1lo; v <= x1hi; v += 1.0) {
        x.coords[0] = static_cast<Coord>(v);
        if (admits_all(cuts, x)) out.push_back(x);
      }
    }
    int j = 1;
    while (j < d) {
      if (++x.coords[static_cast<std::size_t>(j)] <= hi[static_cast<std::size_t>(j)]) break;
      x.coords[static_cast<std::size_t>(j)] = lo[static_cast<std::size_t>(j)];
      ++j;
    }
    if (j >= d) break;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::HalfSpaceSlab: return "HalfSpaceSlab";
    case RegionKind::Parallelogram: return "Parallelogram";
    case RegionKind::Trapezoid: return "Trapezoid";
    case RegionKind::Parallelotope: return "Parallelotope";
    case RegionKind::Explicit: return "Explicit";
  }
  return "Unknown";
}

RegionKind region_kind_from_string(const std::string& s) {
  for (RegionKind k : {RegionKind::HalfSpaceSlab, RegionKind::Parallelogram, RegionKind::Trapezoid,
                       RegionKind::Parallelotope, RegionKind::Explicit}) {
    if (to_string(k) == s) return k;
  }
  fail(ErrorCode::InvalidInput, "unknown region kind '" + s + "'");
}

bool LinearCut::admits(const LatticePoint& x) const {
  const double s = apply(a, x);
  return s >= lo - kGeomTolerance && s < hi - kGeomTolerance;
}

int RegionSpec::dim() const {
  if (kind == RegionKind::Explicit) {
    if (!points.empty()) return points.front().dim();
    if (!base.empty()) return static_cast<int>(base.size());
    for (const auto& c : cuts) return static_cast<int>(c.a.size());
    return 0;
  }
  return static_cast<int>(lengths.size());
}

RegionSpec RegionSpec::box(std::vector<Coord> lower, std::vector<Coord> lengths) {
  RegionSpec s;
  s.kind = RegionKind::Parallelotope;
  s.base.assign(lower.begin(), lower.end());
  s.lengths = std::move(lengths);
  return s;
}

RegionSpec RegionSpec::explicit_points(int dim, std::vector<LatticePoint> pts) {
  RegionSpec s;
  s.kind = RegionKind::Explicit;
  s.base.assign(static_cast<std::size_t>(dim), 0.0);
  s.points = std::move(pts);
  return s;
}

std::vector<LinearCut> constraints_of(const RegionSpec& spec, const ModelParams* params) {
  const int d = spec.dim();
  if (d < 1) fail(ErrorCode::InvalidInput, "region spec has no dimension");
  if (params != nullptr && params->d != d) fail(ErrorCode::DimensionMismatch, "region spec and model disagree on d");
  std::vector<LinearCut> out;
  if (spec.kind != RegionKind::Explicit) {
    if (static_cast<int>(spec.base.size()) != d) fail(ErrorCode::DimensionMismatch, "base must have d entries");
    for (Coord L : spec.lengths) {
      if (L < 1) fail(ErrorCode::InvalidInput, "lengths must be >= 1");
    }
    check_vector(spec.slant, d, "slant");
    check_vector(spec.normal_frac, d, "normal_frac");
  }
  const auto len = [&](int k) { return static_cast<double>(spec.lengths[static_cast<std::size_t>(k)]); };
  const auto b = [&](int k) { return spec.base[static_cast<std::size_t>(k)]; };

  switch (spec.kind) {
    case RegionKind::Parallelotope:
    case RegionKind::HalfSpaceSlab:
    case RegionKind::Parallelogram: {
      std::vector<std::vector<double>> f;
      for (int k = 0; k < d; ++k) f.push_back(unit_vector(k, d));
      int slant_slot = spec.slant_axis.value_or(spec.normal_frac ? 1 : 0);
      if (spec.kind == RegionKind::HalfSpaceSlab && !spec.slant_axis) slant_slot = 1;
      if (spec.slant && (slant_slot < 0 || slant_slot >= d)) fail(ErrorCode::InvalidInput, "slant_axis out of range");
      if (spec.normal_frac) {
        f[0] = *spec.normal_frac;
      } else if (spec.kind != RegionKind::Parallelotope && !(spec.slant && slant_slot == 0)) {
        f[0] = normal_fraction(params);
      }
      if (spec.slant) f[static_cast<std::size_t>(slant_slot)] = *spec.slant;
      for (int k = 0; k < d; ++k) {
        LinearCut c;
        c.a = f[static_cast<std::size_t>(k)];
        double offset = b(k);
        if (spec.kind == RegionKind::Parallelogram) {
          offset = 0.0;
          for (int i = 0; i < d; ++i) offset += c.a[static_cast<std::size_t>(i)] * b(i);
        }
        c.lo = offset;
        c.hi = offset + len(k);
        out.push_back(std::move(c));
      }
      break;
    }
    case RegionKind::Trapezoid: {
      if (spec.slant && spec.slant_axis.value_or(0) != 0) fail(ErrorCode::InvalidInput, "trapezoid slant must sit in slot 0");
      const std::vector<double> n = spec.normal_frac ? *spec.normal_frac : normal_fraction(params);
      const std::vector<double> u = spec.slant ? *spec.slant : unit_vector(0, d);
      double nb = 0.0, ub = 0.0;
      for (int i = 0; i < d; ++i) {
        nb += n[static_cast<std::size_t>(i)] * b(i);
        ub += u[static_cast<std::size_t>(i)] * b(i);
      }
      out.push_back(LinearCut{n, nb, kInf});
      out.push_back(LinearCut{u, -kInf, ub + len(0)});
      for (int k = 1; k < d; ++k) out.push_back(LinearCut{unit_vector(k, d), b(k), b(k) + len(k)});
      break;
    }
    case RegionKind::Explicit:
      break;
  }
  for (const auto& c : spec.cuts) {
    if (static_cast<int>(c.a.size()) != d) fail(ErrorCode::DimensionMismatch, "cut must have d coefficients");
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------

Region::Region(int dim, std::vector<LatticePoint> points, RegionSpec spec)
    : dim_(dim), points_(std::move(points)), spec_(std::move(spec)) {
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  for (const auto& p : points_) {
    if (p.dim() != dim_) fail(ErrorCode::DimensionMismatch, "point dimension differs from region dimension");
  }
}

bool Region::contains(const LatticePoint& p) const { return index_of(p).has_value(); }

std::optional<std::size_t> Region::index_of(const LatticePoint& p) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), p);
  if (it == points_.end() || *it != p) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

namespace {

Region build_impl(const RegionSpec& spec, const ModelParams* params) {
  const auto cuts = constraints_of(spec, params);
  const int d = spec.dim();
  std::vector<LatticePoint> pts;
  if (spec.kind == RegionKind::Explicit) {
    for (const auto& p : spec.points) {
      if (p.dim() != d) fail(ErrorCode::DimensionMismatch, "explicit point has wrong dimension");
      if (admits_all(cuts, p)) pts.push_back(p);
    }
  } else {
    pts = enumerate(cuts, d);
  }
  if (pts.empty()) fail(ErrorCode::EmptyRegion, "no lattice point satisfies the constraints");
  return Region(d, std::move(pts), spec);
}

}  // namespace

Region build_region(const RegionSpec& spec, const ModelParams& params) { return build_impl(spec, &params); }
Region build_region(const RegionSpec& spec) { return build_impl(spec, nullptr); }

std::vector<Edge> edges_of(const Region& region) {
  std::vector<Edge> out;
  const int d = region.dim();
  for (std::size_t i = 0; i < region.size(); ++i) {
    LatticePoint y = region[i];
    for (int j = 0; j < d; ++j) {
      ++y.coords[static_cast<std::size_t>(j)];
      if (auto k = region.index_of(y)) out.push_back(Edge{i, *k, j});
      --y.coords[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

std::vector<Edge> edges_within(const Region& region, const Region& sub) {
  std::vector<Edge> out;
  for (const auto& e : edges_of(region)) {
    if (sub.contains(region[e.a]) && sub.contains(region[e.b])) out.push_back(e);
  }
  return out;
}

bool is_connected(const Region& region) {
  if (region.empty()) return false;
  std::vector<std::vector<std::size_t>> adj(region.size());
  for (const auto& e : edges_of(region)) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::vector<bool> seen(region.size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        queue.push_back(w);
      }
    }
  }
  return count == region.size();
}

Region region_difference(const Region& a, const Region& b) {
  std::vector<LatticePoint> pts;
  std::set_difference(a.points().begin(), a.points().end(), b.points().begin(), b.points().end(), std::back_inserter(pts));
  return Region(a.dim(), std::move(pts), RegionSpec::explicit_points(a.dim(), {}));
}

Region region_intersection(const Region& a, const Region& b) {
  std::vector<LatticePoint> pts;
  std::set_intersection(a.points().begin(), a.points().end(), b.points().begin(), b.points().end(), std::back_inserter(pts));
  return Region(a.dim(), std::move(pts), RegionSpec::explicit_points(a.dim(), {}));
}

Region region_translate(const Region& r, const std::vector<Coord>& shift) {
  std::vector<LatticePoint> pts = r.points();
  for (auto& p : pts) {
    for (std::size_t j = 0; j < shift.size(); ++j) p.coords[j] += shift[j];
  }
  return Region(r.dim(), std::move(pts), RegionSpec::explicit_points(r.dim(), {}));
}

Region region_canonical(const Region& r) {
  if (r.empty()) return r;
  std::vector<Coord> shift(static_cast<std::size_t>(r.dim()), std::numeric_limits<Coord>::max());
  for (const auto& p : r.points()) {
    for (std::size_t j = 0; j < shift.size(); ++j) shift[j] = std::min(shift[j], p.coords[j]);
  }
  for (auto& s : shift) s = -s;
  return region_translate(r, shift);
}

double connectivity_threshold(const ModelParams& params, RegionKind /*kind*/) {
  const double m1 = params.m[0];
  if (!(m1 > kUnityTolerance)) fail(ErrorCode::DegenerateNormal, "connectivity threshold needs m_1 > 0");
  double worst = 0.0;
  for (int j = 1; j < params.d; ++j) worst = std::max(worst, std::abs(params.m[static_cast<std::size_t>(j)]) / m1);
  return worst + 1.0;
}

int minimal_scale(const ModelParams& params) {
  const double t = connectivity_threshold(params, RegionKind::Parallelogram);
  return std::max(1, static_cast<int>(std::ceil(t / 2.0 - kGeomTolerance)));
}

// ---------------------------------------------------------------------------

Sweep Sweep::axis(int j, int d) {
  Sweep s;
  s.functional = unit_vector(j, d);
  s.label = "x" + std::to_string(j + 1);
  return s;
}

Sweep Sweep::along(std::vector<double> v, std::string label) {
  Sweep s;
  s.functional = std::move(v);
  s.label = std::move(label);
  return s;
}

Region Filtration::difference(int n, int k) const {
  if (n < 0 || n >= static_cast<int>(stages.size())) fail(ErrorCode::StageOutOfRange, "stage index out of range");
  if (k <= 0) return stages[static_cast<std::size_t>(n)];
  if (k > n) fail(ErrorCode::StageOutOfRange, "difference with a larger stage");
  return region_difference(stages[static_cast<std::size_t>(n)], stages[static_cast<std::size_t>(k)]);
}

namespace {

Filtration sweep_region(const Region& target, const Sweep& sweep, const RegionSpec* target_spec) {
  const int d = target.dim();
  if (static_cast<int>(sweep.functional.size()) != d) fail(ErrorCode::DimensionMismatch, "sweep functional has wrong dimension");
  if (target.empty()) fail(ErrorCode::EmptyRegion, "cannot sweep an empty region");
  std::vector<double> phi(target.size());
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < target.size(); ++i) {
    phi[i] = apply(sweep.functional, target[i]);
    lo = std::min(lo, phi[i]);
    hi = std::max(hi, phi[i]);
  }
  if (hi - lo < kGeomTolerance) fail(ErrorCode::InvalidDirection, "functional is constant on the target");
  const double origin = sweep.origin.value_or(lo);
  Filtration f;
  f.direction_label = sweep.label;
  f.stages.push_back(Region(d, {}, RegionSpec::explicit_points(d, {})));
  f.thresholds.push_back(origin);
  std::size_t last = 0;
  const auto kmax = static_cast<long long>(std::ceil(hi - origin)) + 2;
  for (long long k = 1; k <= kmax && last < target.size(); ++k) {
    const double t = origin + static_cast<double>(k);
    std::vector<LatticePoint> pts;
    for (std::size_t i = 0; i < target.size(); ++i) {
      if (phi[i] < t - kGeomTolerance) pts.push_back(target[i]);
    }
    if (pts.size() == last) continue;
    last = pts.size();
    RegionSpec s = target_spec ? *target_spec : RegionSpec::explicit_points(d, target.points());
    s.cuts.push_back(LinearCut{sweep.functional, -kInf, t});
    f.stages.push_back(Region(d, std::move(pts), std::move(s)));
    f.thresholds.push_back(t);
  }
  return f;
}

}  // namespace

Filtration build_filtration(const RegionSpec& target, const ModelParams& params, const Sweep& sweep) {
  const Region r = build_region(target, params);
  return sweep_region(r, sweep, &target);
}

Filtration build_filtration(const Region& target, const Sweep& sweep) {
  return sweep_region(target, sweep, nullptr);
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const LatticePoint& p) { j = p.coords; }
void from_json(const nlohmann::json& j, LatticePoint& p) { p.coords = j.get<std::vector<Coord>>(); }

void to_json(nlohmann::json& j, const LinearCut& c) {
  j = nlohmann::json{{"a", c.a}};
  j["lo"] = std::isfinite(c.lo) ? nlohmann::json(c.lo) : nlohmann::json(nullptr);
  j["hi"] = std::isfinite(c.hi) ? nlohmann::json(c.hi) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, LinearCut& c) {
  c.a = j.at("a").get<std::vector<double>>();
  c.lo = (j.contains("lo") && !j.at("lo").is_null()) ? j.at("lo").get<double>() : -kInf;
  c.hi = (j.contains("hi") && !j.at("hi").is_null()) ? j.at("hi").get<double>() : kInf;
}

void to_json(nlohmann::json& j, const RegionSpec& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)}, {"base", s.base}, {"lengths", s.lengths}};
  j["slant"] = s.slant ? nlohmann::json(*s.slant) : nlohmann::json(nullptr);
  j["normal_frac"] = s.normal_frac ? nlohmann::json(*s.normal_frac) : nlohmann::json(nullptr);
  if (s.slant_axis) j["slant_axis"] = *s.slant_axis;
  if (!s.cuts.empty()) j["cuts"] = s.cuts;
  if (s.kind == RegionKind::Explicit) j["points"] = s.points;
}

void from_json(const nlohmann::json& j, RegionSpec& s) {
  s = RegionSpec{};
  s.kind = region_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("base")) s.base = j.at("base").get<std::vector<double>>();
  if (j.contains("lengths")) s.lengths = j.at("lengths").get<std::vector<Coord>>();
  if (j.contains("slant") && !j.at("slant").is_null()) s.slant = j.at("slant").get<std::vector<double>>();
  if (j.contains("normal_frac") && !j.at("normal_frac").is_null()) {
    s.normal_frac = j.at("normal_frac").get<std::vector<double>>();
  }
  if (j.contains("slant_axis") && !j.at("slant_axis").is_null()) s.slant_axis = j.at("slant_axis").get<int>();
  if (j.contains("cuts")) s.cuts = j.at("cuts").get<std::vector<LinearCut>>();
  if (j.contains("points")) s.points = j.at("points").get<std::vector<LatticePoint>>();
  if (s.kind != RegionKind::Explicit && s.lengths.size() != s.base.size()) {
    fail(ErrorCode::DimensionMismatch, "base and lengths must have the same length");
  }
}

void write_points_csv(std::ostream& os, const Region& region) {
  for (int j = 0; j < region.dim(); ++j) os << (j ? "," : "") << 'x' << (j + 1);
  os << '\n';
  for (const auto& p : region.points()) {
    for (int j = 0; j < region.dim(); ++j) os << (j ? "," : "") << p.coords[static_cast<std::size_t>(j)];
    os << '\n';
  }
}

}  // namespace pvbs

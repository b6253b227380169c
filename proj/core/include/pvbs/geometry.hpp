// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

/// @file geometry.hpp
/// @brief Lattice regions defined by half-open linear constraints, connectivity,
///        filtrations and the coordinate normalization of the parameter space.

#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pvbs/params.hpp"

namespace pvbs {

using Coord = std::int64_t;

/// Membership slack for strict inequalities with real coefficients.
inline constexpr double kGeomTolerance = 1e-9;

struct LatticePoint {
  std::vector<Coord> coords;

  int dim() const { return static_cast<int>(coords.size()); }
  auto operator<=>(const LatticePoint&) const = default;
};

enum class RegionKind { HalfSpaceSlab, Parallelogram, Trapezoid, Parallelotope, Explicit };

std::string to_string(RegionKind kind);
RegionKind region_kind_from_string(const std::string& s);

/// lo <= a.x < hi (either side may be infinite).
struct LinearCut {
  std::vector<double> a;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool admits(const LatticePoint& x) const;
};

/// Constraint description of a region. Each "slot" k carries a functional f_k
/// (default e_k) and a length L_k.
///
///  - Parallelotope / HalfSpaceSlab: base[k] <= f_k.x < base[k] + L_k
///  - Parallelogram:                 0 <= f_k.(x - b) < L_k
///  - Trapezoid:   0 <= n.(x - b) and u.(x - b) < L_0 in slot 0, where n is the
///                 normal fraction and u the slant (default e_1); axis slots
///                 0 <= x_k - b_k < L_k otherwise.
///
/// normal_frac replaces f_0. slant replaces f_{slant_axis}; slant_axis defaults
/// to 1 when normal_frac is present and 0 otherwise. For Parallelogram,
/// Trapezoid and HalfSpaceSlab a missing normal_frac defaults to m/m_1.
struct RegionSpec {
  RegionKind kind = RegionKind::Parallelotope;
  std::vector<double> base;
  std::vector<Coord> lengths;
  std::optional<std::vector<double>> slant;
  std::optional<std::vector<double>> normal_frac;
  std::optional<int> slant_axis;
  std::vector<LinearCut> cuts;
  std::vector<LatticePoint> points;  // Explicit only

  int dim() const;

  static RegionSpec box(std::vector<Coord> lower, std::vector<Coord> lengths);
  static RegionSpec explicit_points(int dim, std::vector<LatticePoint> points);
};

/// The half-open constraints defining spec. params supplies m for defaults.
std::vector<LinearCut> constraints_of(const RegionSpec& spec, const ModelParams* params);

class Region {
 public:
  Region() = default;
  Region(int dim, std::vector<LatticePoint> points, RegionSpec spec);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<LatticePoint>& points() const { return points_; }
  const LatticePoint& operator[](std::size_t i) const { return points_[i]; }
  const RegionSpec& spec() const { return spec_; }

  bool contains(const LatticePoint& p) const;
  std::optional<std::size_t> index_of(const LatticePoint& p) const;

  friend bool operator==(const Region& a, const Region& b) { return a.points_ == b.points_; }

 private:
  int dim_ = 0;
  std::vector<LatticePoint> points_;
  RegionSpec spec_;
};

/// Nearest-neighbour pair (i, j) of region site indices with x_j = x_i + e_axis.
struct Edge {
  std::size_t a;
  std::size_t b;
  int axis;
};

Region build_region(const RegionSpec& spec, const ModelParams& params);
/// Variant for specs that need no parameter defaults (boxes, explicit sets).
Region build_region(const RegionSpec& spec);

std::vector<Edge> edges_of(const Region& region);
/// Edges of `region` whose endpoints both lie in `sub`.
std::vector<Edge> edges_within(const Region& region, const Region& sub);

bool is_connected(const Region& region);

Region region_difference(const Region& a, const Region& b);
Region region_intersection(const Region& a, const Region& b);
Region region_translate(const Region& r, const std::vector<Coord>& shift);
/// Translate so the componentwise minimum is the origin; a canonical form up to translation.
Region region_canonical(const Region& r);

/// Sufficient slant-direction length for connectedness: max_{j>=2} m_j/m_1 + 1.
double connectivity_threshold(const ModelParams& params, RegionKind kind);
/// Smallest scale L with 2L >= connectivity_threshold (at least 1).
int minimal_scale(const ModelParams& params);

/// A functional whose upper bound is swept: stage k = {x : phi.x < origin + k}.
struct Sweep {
  std::vector<double> functional;
  std::optional<double> origin;
  std::string label;

  static Sweep axis(int j, int d);
  static Sweep along(std::vector<double> v, std::string label);
};

struct Filtration {
  std::vector<Region> stages;  // stages[0] is empty, stages.back() is the target
  std::string direction_label;
  std::vector<double> thresholds;  // thresholds[k] = origin + t_k for k >= 1

  std::size_t size() const { return stages.size(); }
  /// Lambda_n \ Lambda_k (k clamped at 0).
  Region difference(int n, int k) const;
};

Filtration build_filtration(const RegionSpec& target, const ModelParams& params, const Sweep& sweep);
Filtration build_filtration(const Region& target, const Sweep& sweep);

// ---------------------------------------------------------------------------
// Coordinate normalization and case classification.

enum class CaseLabel { Case1a, Case1b, Case2a, Case2b, Case3a, Case3b, Case4 };

std::string to_string(CaseLabel label);

/// new coordinate i = (reflect[perm[i]] ? -1 : 1) * old coordinate perm[i].
struct CoordinateChange {
  std::vector<int> perm;
  std::vector<bool> reflect;

  static CoordinateChange identity(int d);
  LatticePoint apply(const LatticePoint& x) const;
  ModelParams apply(const ModelParams& p) const;
};

struct Classification {
  CaseLabel label = CaseLabel::Case1a;
  ModelParams original;
  ModelParams normalized;
  CoordinateChange change;
  double theta = 0.0;              // angle between -m and log lambda
  bool gapless_direction = false;  // theta below tolerance
  std::vector<double> slant;       // v for Cases 1b, 2b, 3a, 3b, 4 (normalized coordinates)
  int j_prime = 0;                 // Case 3b: number of leading coordinates with lambda_j = 1
};

inline constexpr double kThetaTolerance = 1e-9;
inline constexpr double kUnityTolerance = 1e-12;

/// Angle between -m and log lambda, computed stably via atan2.
double angle_between_normal_and_log_lambda(const ModelParams& p);

Classification classify_case(const ModelParams& params);

// ---------------------------------------------------------------------------
// Serialization.

void to_json(nlohmann::json& j, const LatticePoint& p);
void from_json(const nlohmann::json& j, LatticePoint& p);
void to_json(nlohmann::json& j, const LinearCut& c);
void from_json(const nlohmann::json& j, LinearCut& c);
void to_json(nlohmann::json& j, const RegionSpec& s);
void from_json(const nlohmann::json& j, RegionSpec& s);
void to_json(nlohmann::json& j, const CoordinateChange& c);
void to_json(nlohmann::json& j, const Classification& c);

void write_points_csv(std::ostream& os, const Region& region);

}  // namespace pvbs

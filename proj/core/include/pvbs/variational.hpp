// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

/// @file variational.hpp
/// @brief Variational upper bounds on the half-space gap from a one-particle
///        trial state supported on a slab along the boundary.

#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pvbs/geometry.hpp"

namespace pvbs {

/// min |v_j| over entries above 1e-12 max_i |v_i|. Throws AllZero.
double c_of(const std::vector<double>& v);

/// Angle between -m and log lambda in [0, pi]. Throws UndefinedAngle for lambda = 1.
double angle_theta(const ModelParams& params);

/// 2(d-1)/(c(m) c(lambda)^2) ||log lambda|| |sin theta|; exactly 0 when theta
/// is below kThetaTolerance. Throws HypothesisViolated unless m.log(lambda) < 0.
double closed_form_upper_bound(const ModelParams& params);

/// Coordinates in which the trial state is built: m_j >= 0, and coordinate 0
/// has m_0 > 0, with lambda_0 < 1 whenever the hypothesis holds.
struct SlabFrame {
  ModelParams normalized;
  CoordinateChange change;
  bool hypothesis = false;  // m.log(lambda) < 0
};
SlabFrame slab_frame(const ModelParams& params);

/// {0 <= (m/m_0).x < L, -L <= x_j <= L for j >= 1} in slab_frame coordinates.
RegionSpec trial_slab(const SlabFrame& frame, int L);

struct UpperBoundResult {
  int L = 0;
  double rayleigh_quotient = 0.0;
  std::optional<double> closed_form_bound;  // absent when the hypothesis fails
  double theta = 0.0;
  double c_m = 0.0;
  double c_lambda = 0.0;
  bool hypothesis = false;
  double log_norm = 0.0;       // log C(slab)
  double log_numerator = 0.0;  // log <Psi, H Psi>
  std::optional<double> finite_bound;  // explicit finite-L majorant (needs lambda_0 < 1)
  std::optional<double> margin;        // finite_bound minus its L -> infinity limit
};

inline constexpr double kMaxTrialFibers = 5e7;

/// Exact Rayleigh quotient of the slab trial state from per-fiber geometric
/// sums. Throws RegionTooLarge beyond kMaxTrialFibers transverse fibers.
UpperBoundResult trial_state_energy(const ModelParams& params, int L);

/// Finite-L majorant of the quotient and its L -> infinity limit, in slab_frame coordinates.
double finite_upper_bound(const SlabFrame& frame, int L);
double finite_upper_bound_limit(const SlabFrame& frame);

/// Slope of log(quotient) against log(L) by least squares (informational).
double decay_exponent(const std::vector<UpperBoundResult>& rows);

void write_sweep_csv(std::ostream& os, const std::vector<UpperBoundResult>& rows);
void to_json(nlohmann::json& j, const UpperBoundResult& r);

}  // namespace pvbs

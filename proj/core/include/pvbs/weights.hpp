// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

/// @file weights.hpp
/// @brief Ground-state weights lambda^x and normalization coefficients C(Lambda), in log space.

#pragma once

#include <iosfwd>
#include <vector>

#include "pvbs/geometry.hpp"
#include "pvbs/params.hpp"

namespace pvbs {

/// sum_j x_j log lambda_j
double log_weight(const LatticePoint& x, const ModelParams& params);

/// log sum_i exp(v_i), anchored at the maximum. Empty input gives -inf.
double log_sum_exp(const std::vector<double>& v);
/// log(exp(a) - exp(b)) for a >= b; -inf when equal.
double log_diff_exp(double a, double b);
/// log sum_{k=0}^{n-1} exp(k s). n = 0 gives -inf.
double log_geometric_sum(double s, long long n);

/// log C(Lambda) = log sum_x lambda^{2x}. An empty region gives -inf.
double normalization(const Region& region, const ModelParams& params);

struct NormalizationBracket {
  double log_lower = 0.0;
  double log_upper = 0.0;
  bool exact = false;
};

/// Closed-form bracket on log C for the region described by spec.
///
/// Covered shapes: parallelotopes / parallelograms whose slot 0 functional has
/// leading coefficient 1 and whose other slots are coordinate axes (remainder
/// factor lambda_1^{2r}, r in [0,1)), and trapezoids with lambda_1 > 1, leading
/// coefficient 1 and integer slant (C_min / C_max bracket). Anything else raises
/// CaseMismatch.
NormalizationBracket normalization_closed_form(const RegionSpec& spec, const ModelParams& params);

struct GroundStateVector {
  Region region;
  int particle_count = 1;
  std::vector<double> amplitudes;  // indexed like the sector basis (site order for n = 1)
  double norm_log = 0.0;           // log C(Lambda) for n = 1, 0 for n = 0
};

GroundStateVector zero_particle_ground_state(const Region& region);
GroundStateVector one_particle_ground_state(const Region& region, const ModelParams& params);

/// Rows "x1,...,xd,amplitude".
void write_ground_state_csv(std::ostream& os, const GroundStateVector& gs);

}  // namespace pvbs

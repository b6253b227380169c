// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace pvbs {

inline constexpr double kUnitNormTolerance = 1e-12;

/// Model configuration: dimension, couplings lambda_j > 0 and a unit normal m.
struct ModelParams {
  int d = 0;
  std::vector<double> lambda;
  std::vector<double> m;

  /// Validates and returns the parameters. Throws InvalidInput / ZeroNormal.
  static ModelParams make(std::vector<double> lambda, std::vector<double> m);
  /// Same, but rescales m to unit length first.
  static ModelParams make_normalized(std::vector<double> lambda, std::vector<double> m);

  std::vector<double> log_lambda() const;
  double log_lambda_norm() const;
  bool is_isotropic(double tol = 1e-12) const;  // all lambda_j == 1
  void validate() const;
};

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);

}  // namespace pvbs

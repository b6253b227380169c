// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include "pvbs/params.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "pvbs/error.hpp"

namespace pvbs {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

ModelParams ModelParams::make(std::vector<double> lambda, std::vector<double> m) {
  ModelParams p;
  p.d = static_cast<int>(lambda.size());
  p.lambda = std::move(lambda);
  p.m = std::move(m);
  p.validate();
  return p;
}

ModelParams ModelParams::make_normalized(std::vector<double> lambda, std::vector<double> m) {
  const double n = norm2(m);
  if (!(n > 0.0)) fail(ErrorCode::ZeroNormal, "normal vector m is zero");
  for (double& v : m) v /= n;
  return make(std::move(lambda), std::move(m));
}

void ModelParams::validate() const {
  if (d < 1) fail(ErrorCode::InvalidInput, "dimension must be >= 1");
  if (static_cast<int>(lambda.size()) != d || static_cast<int>(m.size()) != d) {
    fail(ErrorCode::DimensionMismatch, "lambda and m must both have d entries");
  }
  for (double l : lambda) {
    if (!(l > 0.0) || !std::isfinite(l)) fail(ErrorCode::InvalidInput, "lambda entries must be finite and > 0");
  }
  for (double v : m) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidInput, "m entries must be finite");
  }
  const double n = norm2(m);
  if (n == 0.0) fail(ErrorCode::ZeroNormal, "normal vector m is zero");
  if (std::abs(n - 1.0) > kUnitNormTolerance) fail(ErrorCode::InvalidInput, "m must have unit norm");
}

std::vector<double> ModelParams::log_lambda() const {
  std::vector<double> out(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) out[i] = std::log(lambda[i]);
  return out;
}

double ModelParams::log_lambda_norm() const { return norm2(log_lambda()); }

bool ModelParams::is_isotropic(double tol) const {
  for (double l : lambda) {
    if (std::abs(std::log(l)) > tol) return false;
  }
  return true;
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"d", p.d}, {"lambda", p.lambda}, {"m", p.m}};
}

void from_json(const nlohmann::json& j, ModelParams& p) {
  p = ModelParams::make(j.at("lambda").get<std::vector<double>>(), j.at("m").get<std::vector<double>>());
  if (j.contains("d") && j.at("d").get<int>() != p.d) {
    fail(ErrorCode::DimensionMismatch, "d does not match the length of lambda");
  }
}

}  // namespace pvbs

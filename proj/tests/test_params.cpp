// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "pvbs/error.hpp"
#include "pvbs/params.hpp"

using namespace pvbs;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST_CASE("make validates couplings and normal") {
  const auto p = ModelParams::make({2.0, 0.5}, {0.6, 0.8});
  CHECK(p.d == 2);
  CHECK(code_of([] { ModelParams::make({0.0, 1.0}, {1.0, 0.0}); }) == ErrorCode::InvalidInput);
  CHECK(code_of([] { ModelParams::make({1.0, 1.0}, {1.0, 1.0}); }) == ErrorCode::InvalidInput);
  CHECK(code_of([] { ModelParams::make({1.0, 1.0}, {0.0, 0.0}); }) == ErrorCode::ZeroNormal);
  CHECK(code_of([] { ModelParams::make({1.0, 1.0}, {1.0}); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] { ModelParams::make({}, {}); }) == ErrorCode::InvalidInput);
}

TEST_CASE("make_normalized rescales m") {
  const auto p = ModelParams::make_normalized({2.0, 3.0}, {3.0, 4.0});
  CHECK(p.m[0] == doctest::Approx(0.6));
  CHECK(p.m[1] == doctest::Approx(0.8));
  CHECK(code_of([] { ModelParams::make_normalized({2.0}, {0.0}); }) == ErrorCode::ZeroNormal);
}

TEST_CASE("log lambda and isotropy") {
  const auto p = ModelParams::make({std::exp(1.0), 1.0}, {1.0, 0.0});
  CHECK(p.log_lambda()[0] == doctest::Approx(1.0));
  CHECK(p.log_lambda_norm() == doctest::Approx(1.0));
  CHECK_FALSE(p.is_isotropic());
  CHECK(ModelParams::make({1.0, 1.0, 1.0}, {0.0, 0.0, 1.0}).is_isotropic());
}

TEST_CASE("json round trip") {
  const auto p = ModelParams::make({2.0, 0.5}, {0.6, 0.8});
  const nlohmann::json j = p;
  const auto q = j.get<ModelParams>();
  CHECK(q.lambda == p.lambda);
  CHECK(q.m == p.m);
  nlohmann::json bad = j;
  bad["d"] = 3;
  CHECK(code_of([&] { (void)bad.get<ModelParams>(); }) == ErrorCode::DimensionMismatch);
}

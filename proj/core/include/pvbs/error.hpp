// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pvbs {

enum class ErrorCode {
  InvalidInput,
  DimensionMismatch,
  EmptyRegion,
  UnboundedRegion,
  DegenerateNormal,
  InvalidDirection,
  ZeroNormal,
  GaplessBulk,
  GaplessDirection,
  CaseMismatch,
  SectorTooLarge,
  RegionTooLarge,
  SolverFailure,
  DisconnectedVolume,
  StageOutOfRange,
  TildeLambdaUnity,
  NoFeasibleEll,
  AllZero,
  UndefinedAngle,
  HypothesisViolated,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace pvbs

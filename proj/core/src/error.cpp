// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include "pvbs/error.hpp"

namespace pvbs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::UnboundedRegion: return "UnboundedRegion";
    case ErrorCode::DegenerateNormal: return "DegenerateNormal";
    case ErrorCode::InvalidDirection: return "InvalidDirection";
    case ErrorCode::ZeroNormal: return "ZeroNormal";
    case ErrorCode::GaplessBulk: return "GaplessBulk";
    case ErrorCode::GaplessDirection: return "GaplessDirection";
    case ErrorCode::CaseMismatch: return "CaseMismatch";
    case ErrorCode::SectorTooLarge: return "SectorTooLarge";
    case ErrorCode::RegionTooLarge: return "RegionTooLarge";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::DisconnectedVolume: return "DisconnectedVolume";
    case ErrorCode::StageOutOfRange: return "StageOutOfRange";
    case ErrorCode::TildeLambdaUnity: return "TildeLambdaUnity";
    case ErrorCode::NoFeasibleEll: return "NoFeasibleEll";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::UndefinedAngle: return "UndefinedAngle";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace pvbs

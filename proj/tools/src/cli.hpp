// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pvbs::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kTooLarge = 2,
  kSolverFailure = 3,
  kGaplessDirection = 4,
  kNoFeasibleEll = 5,
  kEpsilonMismatch = 6,
  kGaplessBulk = 7,
};

inline constexpr const char* kSchema = "pvbs-gap/1";

/// Runs one command line (without the program name). Results go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pvbs::cli

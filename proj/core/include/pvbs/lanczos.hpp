// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

/// @file lanczos.hpp
/// @brief Restarted block Lanczos for the lowest eigenpairs of a sparse symmetric matrix.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pvbs/operator.hpp"

namespace pvbs {

struct LanczosOptions {
  int block_size = 8;
  int max_basis = 48;
  double tolerance = 1e-10;  // residual norm relative to max(1, |theta|)
  int max_iterations = 10000;  // block expansions
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct LanczosResult {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd vectors;
  int iterations = 0;
};

/// k lowest eigenpairs. Full reorthogonalization, thick restart with the lowest
/// Ritz vectors. Throws SolverFailure when max_iterations is exhausted.
LanczosResult lanczos_lowest(const SparseMatrix& a, int k, const LanczosOptions& options = {});

}  // namespace pvbs

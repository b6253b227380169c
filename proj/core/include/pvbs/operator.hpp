// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

/// @file operator.hpp
/// @brief Particle-number sectors of the Hamiltonian as sparse symmetric matrices.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pvbs/geometry.hpp"
#include "pvbs/params.hpp"

namespace pvbs {

inline constexpr std::size_t kDefaultMaxStates = 5'000'000;
inline constexpr std::size_t kMaxSites = 64;

/// Two-site term in the basis {00, 01, 10, 11}; the first factor is site x,
/// the second x + e_j. A rank-2 orthogonal projection.
Eigen::Matrix4d interaction_matrix(double lambda);

/// binomial(n, k), saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

/// n-particle configurations over `sites` ordered sites, as bit patterns in
/// increasing numeric order (bit i = site i occupied).
class OccupationBasis {
 public:
  OccupationBasis() = default;
  OccupationBasis(std::size_t sites, int particles, std::size_t max_states = kDefaultMaxStates);

  std::size_t sites() const { return sites_; }
  int particles() const { return particles_; }
  std::size_t size() const { return states_.size(); }
  std::uint64_t state(std::size_t i) const { return states_[i]; }
  const std::vector<std::uint64_t>& states() const { return states_; }
  /// Combinatorial rank: sum_i binomial(pos_i, i + 1) over occupied positions.
  std::size_t rank(std::uint64_t state) const;

 private:
  std::size_t sites_ = 0;
  int particles_ = 0;
  std::vector<std::uint64_t> states_;
  std::vector<std::vector<std::size_t>> choose_;  // choose_[p][k] = binomial(p, k)
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SectorOperator {
  OccupationBasis basis;
  SparseMatrix matrix;
  std::size_t assembled_edge_count = 0;

  std::size_t dim() const { return basis.size(); }
};

/// Sum of the two-site terms over `edges` (all edges of region when null),
/// restricted to the n-particle sector.
SectorOperator assemble_sector(const Region& region, const ModelParams& params, int n,
                               std::size_t max_states = kDefaultMaxStates,
                               const std::vector<Edge>* edges = nullptr);

Eigen::VectorXd apply(const SectorOperator& op, const Eigen::VectorXd& v);

/// MatrixMarket coordinate format, symmetric, lower triangle, 1-based.
void write_matrix_market(std::ostream& os, const SectorOperator& op);

}  // namespace pvbs

// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include "pvbs/operator.hpp"

#include <bit>
#include <iomanip>
#include <limits>
#include <ostream>

#include "pvbs/error.hpp"

namespace pvbs {

Eigen::Matrix4d interaction_matrix(double lambda) {
  if (!(lambda > 0.0)) fail(ErrorCode::InvalidInput, "lambda must be > 0");
  const double c = 1.0 / (1.0 + lambda * lambda);
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  h(1, 1) = c;
  h(1, 2) = -lambda * c;
  h(2, 1) = -lambda * c;
  h(2, 2) = lambda * lambda * c;
  h(3, 3) = 1.0;
  return h;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t num = n - k + i;
    // r * num / i is exact at every step.
    if (r > std::numeric_limits<std::size_t>::max() / num) return std::numeric_limits<std::size_t>::max();
    r = r * num / i;
  }
  return r;
}

OccupationBasis::OccupationBasis(std::size_t sites, int particles, std::size_t max_states)
    : sites_(sites), particles_(particles) {
  if (sites > kMaxSites) fail(ErrorCode::RegionTooLarge, "occupation basis supports at most 64 sites");
  if (particles < 0 || static_cast<std::size_t>(particles) > sites) fail(ErrorCode::InvalidInput, "particle count out of range");
  const std::size_t count = binomial(sites, static_cast<std::size_t>(particles));
  if (count > max_states) {
    fail(ErrorCode::SectorTooLarge, "sector has " + std::to_string(count) + " states, cap is " + std::to_string(max_states));
  }
  choose_.assign(sites + 1, std::vector<std::size_t>(static_cast<std::size_t>(particles) + 2, 0));
  for (std::size_t p = 0; p <= sites; ++p) {
    for (std::size_t k = 0; k < choose_[p].size(); ++k) choose_[p][k] = binomial(p, k);
  }
  states_.reserve(count);
  if (particles == 0) {
    states_.push_back(0);
    return;
  }
  std::uint64_t s = particles == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << particles) - 1;
  for (std::size_t i = 0; i < count; ++i) {
    states_.push_back(s);
    if (i + 1 == count) break;
    // Next pattern with the same popcount.
    const std::uint64_t c = s & (~s + 1);
    const std::uint64_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
}

std::size_t OccupationBasis::rank(std::uint64_t state) const {
  std::size_t r = 0;
  std::size_t i = 1;
  while (state != 0) {
    const auto pos = static_cast<std::size_t>(std::countr_zero(state));
    r += choose_[pos][i];
    ++i;
    state &= state - 1;
  }
  return r;
}

SectorOperator assemble_sector(const Region& region, const ModelParams& params, int n, std::size_t max_states,
                               const std::vector<Edge>* edges) {
  if (params.d != region.dim() && !region.empty()) fail(ErrorCode::DimensionMismatch, "region and model disagree on d");
  SectorOperator op;
  op.basis = OccupationBasis(region.size(), n, max_states);
  std::vector<Edge> own;
  if (edges == nullptr) {
    own = edges_of(region);
    edges = &own;
  }
  op.assembled_edge_count = edges->size();

  struct Coupling {
    std::uint64_t mask_a, mask_b;
    double only_a, only_b, hop;
  };
  std::vector<Coupling> cs;
  cs.reserve(edges->size());
  for (const auto& e : *edges) {
    const double l = params.lambda[static_cast<std::size_t>(e.axis)];
    const double c = 1.0 / (1.0 + l * l);
    cs.push_back({std::uint64_t{1} << e.a, std::uint64_t{1} << e.b, l * l * c, c, -l * c});
  }

  const std::size_t dim = op.basis.size();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(dim * (1 + cs.size() / 2));
  for (std::size_t i = 0; i < dim; ++i) {
    const std::uint64_t s = op.basis.state(i);
    double diag = 0.0;
    for (const auto& c : cs) {
      const bool oa = (s & c.mask_a) != 0;
      const bool ob = (s & c.mask_b) != 0;
      if (oa && ob) {
        diag += 1.0;
      } else if (oa || ob) {
        diag += oa ? c.only_a : c.only_b;
        const std::size_t j = op.basis.rank(s ^ c.mask_a ^ c.mask_b);
        trips.emplace_back(static_cast<int>(i), static_cast<int>(j), c.hop);
      }
    }
    if (diag != 0.0) trips.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);
  }
  op.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  op.matrix.makeCompressed();
  return op;
}

Eigen::VectorXd apply(const SectorOperator& op, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != op.dim()) fail(ErrorCode::DimensionMismatch, "vector length differs from sector dimension");
  return op.matrix * v;
}

void write_matrix_market(std::ostream& os, const SectorOperator& op) {
  std::size_t nnz = 0;
  for (int k = 0; k < op.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it) {
      if (it.col() <= it.row()) ++nnz;
    }
  }
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << "% particles " << op.basis.particles() << " sites " << op.basis.sites() << '\n';
  os << op.dim() << ' ' << op.dim() << ' ' << nnz << '\n';
  os << std::setprecision(17);
  for (int k = 0; k < op.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it) {
      if (it.col() <= it.row()) os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace pvbs

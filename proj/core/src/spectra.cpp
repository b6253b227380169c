// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include "pvbs/spectra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "pvbs/error.hpp"
#include "pvbs/lanczos.hpp"

namespace pvbs {

namespace {

std::vector<double> dense_eigenvalues(const SectorOperator& op) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(op.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorCode::SolverFailure, "dense eigensolve failed");
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

LanczosOptions lanczos_options(const SolverCaps& caps) {
  LanczosOptions o;
  o.block_size = caps.block_size;
  o.tolerance = caps.tolerance;
  o.max_iterations = caps.max_iterations;
  return o;
}

constexpr int kReportedPerSector = 6;

}  // namespace

std::string to_string(SolverKind kind) { return kind == SolverKind::Dense ? "Dense" : "Iterative"; }

SectorSpectrum sector_spectrum(const SectorOperator& op, const SolverCaps& caps) {
  SectorSpectrum s;
  s.particles = op.basis.particles();
  s.dim = op.dim();
  if (s.dim == 0) return s;
  if (s.dim <= caps.dense_threshold) {
    s.solver = SolverKind::Dense;
    s.eigenvalues = dense_eigenvalues(op);
  } else {
    s.solver = SolverKind::Iterative;
    int k = 4;
    while (true) {
      auto res = lanczos_lowest(op.matrix, k, lanczos_options(caps));
      s.eigenvalues = std::move(res.eigenvalues);
      const bool found = std::any_of(s.eigenvalues.begin(), s.eigenvalues.end(),
                                     [&](double e) { return e > caps.zero_threshold; });
      if (found || static_cast<std::size_t>(k) >= s.dim) break;
      k *= 2;
    }
  }
  for (double e : s.eigenvalues) {
    if (e <= caps.zero_threshold) {
      ++s.kernel_count;
    } else if (!s.first_excited) {
      s.first_excited = e;
    }
  }
  return s;
}

SectorGap sector_gap(const SectorOperator& op, const SolverCaps& caps) {
  if (op.dim() == 0) fail(ErrorCode::InvalidInput, "empty sector");
  SectorGap g;
  std::vector<double> ev;
  if (op.dim() <= caps.dense_threshold) {
    g.solver = SolverKind::Dense;
    ev = dense_eigenvalues(op);
  } else {
    g.solver = SolverKind::Iterative;
    int k = 4;
    while (true) {
      ev = lanczos_lowest(op.matrix, k, lanczos_options(caps)).eigenvalues;
      if (ev.back() > ev.front() + caps.level_tolerance || static_cast<std::size_t>(k) >= op.dim()) break;
      k *= 2;
    }
  }
  g.lowest = ev.front();
  for (double e : ev) {
    if (e > g.lowest + caps.level_tolerance) {
      g.second_level = e;
      break;
    }
  }
  return g;
}

std::vector<int> default_sectors(std::size_t sites) {
  std::vector<int> out;
  for (int n = 0; n <= static_cast<int>(std::min<std::size_t>(sites, 4)); ++n) out.push_back(n);
  return out;
}

std::vector<int> all_sectors(std::size_t sites) {
  std::vector<int> out;
  for (int n = 0; n <= static_cast<int>(sites); ++n) out.push_back(n);
  return out;
}

GapResult spectral_gap(const Region& region, const ModelParams& params, const std::vector<int>& sectors,
                       const SolverCaps& caps) {
  GapResult r;
  r.zero_threshold = caps.zero_threshold;
  const auto edges = edges_of(region);
  std::optional<double> gap;
  for (int n : sectors) {
    if (n < 0 || static_cast<std::size_t>(n) > region.size()) fail(ErrorCode::InvalidInput, "sector out of range");
    const SectorOperator op = assemble_sector(region, params, n, caps.max_states, &edges);
    const SectorSpectrum s = sector_spectrum(op, caps);
    r.sectors_scanned.push_back(n);
    r.kernel_dim += s.kernel_count;
    if (s.solver == SolverKind::Iterative) r.solver = SolverKind::Iterative;
    if (s.first_excited && (!gap || *s.first_excited < *gap)) gap = s.first_excited;
    const std::size_t keep = std::min<std::size_t>(s.eigenvalues.size(), static_cast<std::size_t>(s.kernel_count + kReportedPerSector));
    r.low_eigenvalues.insert(r.low_eigenvalues.end(), s.eigenvalues.begin(), s.eigenvalues.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  std::sort(r.low_eigenvalues.begin(), r.low_eigenvalues.end());
  r.gap = gap.value_or(0.0);
  return r;
}

GapResult spectral_gap(const Region& region, const ModelParams& params, bool exhaustive, const SolverCaps& caps) {
  return spectral_gap(region, params, exhaustive ? all_sectors(region.size()) : default_sectors(region.size()), caps);
}

int kernel_dimension(const Region& region, const ModelParams& params, int max_n, const SolverCaps& caps) {
  const auto edges = edges_of(region);
  int total = 0;
  for (int n = 0; n <= std::min<int>(max_n, static_cast<int>(region.size())); ++n) {
    total += sector_spectrum(assemble_sector(region, params, n, caps.max_states, &edges), caps).kernel_count;
  }
  return total;
}

void to_json(nlohmann::json& j, const GapResult& g) {
  j = nlohmann::json{{"gap", g.gap},
                     {"kernel_dim", g.kernel_dim},
                     {"low_eigenvalues", g.low_eigenvalues},
                     {"sectors_scanned", g.sectors_scanned},
                     {"solver", to_string(g.solver)},
                     {"zero_threshold", g.zero_threshold}};
}

}  // namespace pvbs

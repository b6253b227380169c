// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

/// @file spectra.hpp
/// @brief Low-lying spectra and spectral gaps, dense below a size threshold and
///        block Lanczos above it.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pvbs/operator.hpp"

namespace pvbs {

struct SolverCaps {
  std::size_t max_states = kDefaultMaxStates;
  std::size_t dense_threshold = 1024;
  double zero_threshold = 1e-8;
  double tolerance = 1e-10;
  int max_iterations = 10000;
  int block_size = 8;
  double level_tolerance = 1e-10;  // eigenvalues closer than this are one level
};

enum class SolverKind { Dense, Iterative };
std::string to_string(SolverKind kind);

struct SectorSpectrum {
  int particles = 0;
  std::size_t dim = 0;
  std::vector<double> eigenvalues;  // lowest computed, ascending
  int kernel_count = 0;             // eigenvalues <= zero_threshold
  std::optional<double> first_excited;  // smallest eigenvalue > zero_threshold
  SolverKind solver = SolverKind::Dense;
};

/// Lowest eigenvalues of one sector; enough of them to count the kernel and
/// expose the first eigenvalue above the zero threshold, if the sector has one.
SectorSpectrum sector_spectrum(const SectorOperator& op, const SolverCaps& caps = {});

struct SectorGap {
  double lowest = 0.0;
  std::optional<double> second_level;
  SolverKind solver = SolverKind::Dense;
};

/// Lowest eigenvalue and the next distinct level.
SectorGap sector_gap(const SectorOperator& op, const SolverCaps& caps = {});

struct GapResult {
  double gap = 0.0;
  int kernel_dim = 0;
  std::vector<double> low_eigenvalues;
  std::vector<int> sectors_scanned;
  SolverKind solver = SolverKind::Dense;
  double zero_threshold = 1e-8;
};

/// n in {0, ..., min(sites, 4)}.
std::vector<int> default_sectors(std::size_t sites);
std::vector<int> all_sectors(std::size_t sites);

GapResult spectral_gap(const Region& region, const ModelParams& params, const std::vector<int>& sectors,
                       const SolverCaps& caps = {});
/// Default small-n scan, or every sector when exhaustive.
GapResult spectral_gap(const Region& region, const ModelParams& params, bool exhaustive = false,
                       const SolverCaps& caps = {});

/// Zero-energy states summed over sectors 0..max_n.
int kernel_dimension(const Region& region, const ModelParams& params, int max_n, const SolverCaps& caps = {});

void to_json(nlohmann::json& j, const GapResult& g);

}  // namespace pvbs

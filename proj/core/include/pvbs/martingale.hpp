// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

/// @file martingale.hpp
/// @brief Martingale-method lower bounds: exact and brute-force overlap norms,
///        case-specific closed forms, ell selection and bound composition.

#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pvbs/geometry.hpp"
#include "pvbs/spectra.hpp"

namespace pvbs {

// ---------------------------------------------------------------------------
// Overlap norms epsilon.

/// sqrt(C(L_{n+1-l}) C(L_{n+1}\L_n) / (C(L_n) C(L_{n+1}\L_{n+1-l}))), log domain.
/// Throws StageOutOfRange unless 1 <= n and n + 1 < filtration.size(), and
/// DisconnectedVolume unless L_n and the strip are connected.
double epsilon_exact(const Filtration& filtration, int n, int ell, const ModelParams& params);

inline constexpr std::size_t kBruteforceMaxSites = 14;
inline constexpr std::size_t kBruteforceAllSectorsSites = 10;

/// || G^{strip} (G^{L_n} - G^{L_{n+1}}) || from explicit kernel projectors on
/// L_{n+1}: sectors 0..2, or every sector when |L_{n+1}| <= 10.
double epsilon_bruteforce(const Filtration& filtration, int n, int ell, const ModelParams& params,
                          double zero_threshold = 1e-8);

/// A filtration with a stage/width pair, for checking the two epsilon routes.
struct LemmaInstance {
  ModelParams params;
  Filtration filtration;
  int n = 1;
  int ell = 2;
  std::string description;
};

/// Random instance in d in {1, 2}: lambda log-uniform in [1/3, 3], a box,
/// parallelogram or trapezoid target with at most 14 sites and a random sweep.
/// The strips are not guaranteed to be connected.
LemmaInstance random_lemma_instance(std::mt19937_64& rng);
/// A fixed instance whose strip is disconnected.
LemmaInstance disconnected_lemma_instance();

/// f(n, l) for lambda != 1; the count limit (n+1-l)/(l n) at lambda = 1.
double f_decay(int n, int ell, double lambda);
/// min(1, lambda^{2(l-1)}) (1 - lambda^2) / (1 - lambda^{2l})
double f_envelope(int ell, double lambda);

// ---------------------------------------------------------------------------
// Closed forms.

enum class FormulaSource { ExactLemma, Case1a, Case1b, Case2a, Case2b, Case3a, Case3b, Case4 };
std::string to_string(FormulaSource s);
FormulaSource formula_source(CaseLabel label);

struct EpsilonRecord {
  int ell = 2;
  double epsilon = 0.0;
  FormulaSource source = FormulaSource::ExactLemma;
  bool satisfies_condition = false;  // epsilon^2 < 1/ell
};

/// The geometric ratio tilde-lambda_j governing direction j (0-based, normalized coordinates).
double tilde_lambda(const Classification& cls, int direction);
/// Closed-form epsilon for the case of cls in direction j at width ell.
/// Throws TildeLambdaUnity if the governing ratio is 1.
EpsilonRecord epsilon_closed_form(const Classification& cls, int ell, int direction);
/// Smallest ell the case allows in direction j (connectivity for the slanted slot, else 2).
int minimal_ell(const Classification& cls, int direction);
/// Smallest ell >= max(ell_min, minimal_ell) with epsilon^2 < 1/ell. Throws NoFeasibleEll.
EpsilonRecord select_ell(const Classification& cls, int direction, int ell_min = 2, int ell_max = 10000);

// ---------------------------------------------------------------------------
// Volume sequences.

struct CaseStep {
  int direction = 0;  // 0-based normalized coordinate
  std::string label;
  std::vector<double> functional;
};

struct CasePlan {
  Classification cls;
  int scale = 0;
  RegionSpec target;  // Lambda_L in normalized coordinates
  std::vector<CaseStep> steps;  // outermost first
};

CasePlan make_case_plan(const Classification& cls, int scale);

/// Volume after fixing strips of width ells[direction] at stage offsets
/// offsets[0..step-1], together with the sweep used at `step`.
struct NestedVolume {
  RegionSpec spec;
  Sweep sweep;
};
NestedVolume nested_volume(const CasePlan& plan, std::size_t step, const std::vector<int>& ells,
                           const std::vector<long long>& offsets);
Filtration case_filtration(const CasePlan& plan, std::size_t step, const std::vector<int>& ells,
                           const std::vector<long long>& offsets);

// ---------------------------------------------------------------------------
// Base volumes and composition.

struct FamilyMember {
  std::string kind;
  Region region;  // translated to the origin
  double gap = 0.0;
  int kernel_dim = 0;
};

struct BaseGapResult {
  double gap = 0.0;
  std::size_t family_size = 0;
  std::vector<FamilyMember> members;
};

/// Translation classes of the small volumes the case needs gaps for.
std::vector<FamilyMember> base_family(const Classification& cls, const std::vector<int>& ells);
/// Gaps of base_family; exhaustive sector scan for members with at most 14 sites.
BaseGapResult base_gap(const Classification& cls, const std::vector<int>& ells, const SolverCaps& caps = {});

/// base_gap * prod_j (1 - eps_j sqrt(l_j))^2 / l_j, multiplied in record order.
double compose_lower_bound(double base_gap, const std::vector<EpsilonRecord>& records);

struct DirectionRecord {
  int direction = 0;
  std::string label;
  EpsilonRecord record;
  int d_ell = 0;
};

struct CertifyOptions {
  SolverCaps caps;
  int ell_max = 10000;
};

struct BoundCertificate {
  ModelParams params;
  Classification classification;
  int scale = 0;
  RegionSpec target;
  std::vector<DirectionRecord> per_direction;
  BaseGapResult base;
  double lower_bound = 0.0;
  std::optional<double> upper_bound;
  bool consistent = true;
  std::vector<std::string> warnings;

  std::vector<EpsilonRecord> records() const;
};

BoundCertificate certify_lower_bound(const ModelParams& params, int scale, const CertifyOptions& options = {});

/// Records an upper bound and updates `consistent` (lower <= upper + 1e-9).
void attach_upper_bound(BoundCertificate& cert, double upper);

/// Chooses a normal m for which some lambda_j != 1 has m_j != 0 and m is not
/// parallel to +-log lambda, then certifies. The m of `params` is ignored.
BoundCertificate certify_bulk(const ModelParams& params, const CertifyOptions& options = {});
BoundCertificate certify_bulk(const std::vector<double>& lambda, const CertifyOptions& options = {});

void to_json(nlohmann::json& j, const EpsilonRecord& r);
void to_json(nlohmann::json& j, const BoundCertificate& c);

}  // namespace pvbs

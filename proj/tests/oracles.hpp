// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations for the tests. Nothing here calls the
// library routines it is used to check.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "pvbs/geometry.hpp"

namespace oracle {

using pvbs::LatticePoint;
using pvbs::ModelParams;
using pvbs::Region;

/// Two-site term |phi><phi| + |11><11| in the basis |00>, |01>, |10>, |11>
/// (first factor is the lower site), phi = (|01> - lambda |10>)/sqrt(1 + lambda^2).
inline Eigen::Matrix4d local_term(double lambda) {
  Eigen::Vector4d phi(0.0, 1.0, -lambda, 0.0);
  phi /= std::sqrt(1.0 + lambda * lambda);
  Eigen::Vector4d e11(0.0, 0.0, 0.0, 1.0);
  return phi * phi.transpose() + e11 * e11.transpose();
}

struct Bond {
  std::size_t a;
  std::size_t b;
  int axis;
};

inline std::vector<Bond> bonds(const Region& r) {
  std::vector<Bond> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      int axis = -1, diff = 0;
      for (int j = 0; j < r.dim(); ++j) {
        const auto delta = r[k].coords[static_cast<std::size_t>(j)] - r[i].coords[static_cast<std::size_t>(j)];
        if (delta != 0) {
          ++diff;
          if (delta == 1) axis = j;
        }
      }
      if (diff == 1 && axis >= 0) out.push_back({i, k, axis});
    }
  }
  return out;
}

/// Full 2^N Hamiltonian, site i is bit (N-1-i) so that site 0 is the leftmost
/// tensor factor. Terms are embedded by Kronecker products with identities.
inline Eigen::MatrixXd full_hamiltonian(const Region& r, const ModelParams& p, const std::vector<Bond>& bs) {
  const std::size_t n = r.size();
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& e : bs) {
    const Eigen::Matrix4d t = local_term(p.lambda[static_cast<std::size_t>(e.axis)]);
    // Kronecker embedding: |s'><s| entries with matching spectator bits.
    const std::size_t ba = n - 1 - e.a, bb = n - 1 - e.b;
    for (std::size_t s = 0; s < dim; ++s) {
      const int ia = static_cast<int>((s >> ba) & 1U), ib = static_cast<int>((s >> bb) & 1U);
      const std::size_t rest = s & ~((std::size_t{1} << ba) | (std::size_t{1} << bb));
      for (int oa = 0; oa < 2; ++oa) {
        for (int ob = 0; ob < 2; ++ob) {
          const double v = t(2 * oa + ob, 2 * ia + ib);
          if (v == 0.0) continue;
          const std::size_t s2 = rest | (static_cast<std::size_t>(oa) << ba) | (static_cast<std::size_t>(ob) << bb);
          h(static_cast<Eigen::Index>(s2), static_cast<Eigen::Index>(s)) += v;
        }
      }
    }
  }
  return h;
}

inline Eigen::MatrixXd full_hamiltonian(const Region& r, const ModelParams& p) { return full_hamiltonian(r, p, bonds(r)); }

/// Block of the full Hamiltonian with `particles` ones.
inline Eigen::MatrixXd particle_block(const Eigen::MatrixXd& h, std::size_t sites, int particles) {
  std::vector<Eigen::Index> idx;
  for (std::size_t s = 0; s < (std::size_t{1} << sites); ++s) {
    if (std::popcount(s) == particles) idx.push_back(static_cast<Eigen::Index>(s));
  }
  Eigen::MatrixXd b(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h(idx[i], idx[j]);
  }
  return b;
}

inline std::vector<double> eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

/// Smallest eigenvalue above `zero`, or 0 if none.
inline double gap_of(const std::vector<double>& ev, double zero = 1e-8) {
  for (double e : ev) {
    if (e > zero) return e;
  }
  return 0.0;
}

inline int kernel_count(const std::vector<double>& ev, double zero = 1e-8) {
  return static_cast<int>(std::count_if(ev.begin(), ev.end(), [&](double e) { return e <= zero; }));
}

/// sum_x prod_j lambda_j^{2 x_j}, accumulated directly in long double.
inline long double weight_sum(const std::vector<LatticePoint>& pts, const ModelParams& p) {
  long double s = 0.0L;
  for (const auto& x : pts) {
    long double w = 1.0L;
    for (std::size_t j = 0; j < x.coords.size(); ++j) w *= std::pow(static_cast<long double>(p.lambda[j]), 2.0L * x.coords[j]);
    s += w;
  }
  return s;
}

/// Lattice points of the box [lo, hi]^d admitted by pred.
template <class Pred>
std::vector<LatticePoint> points_in_box(int d, long long lo, long long hi, Pred pred) {
  std::vector<LatticePoint> out;
  std::vector<pvbs::Coord> x(static_cast<std::size_t>(d), lo);
  while (true) {
    LatticePoint p{x};
    if (pred(p)) out.push_back(p);
    int k = 0;
    while (k < d && x[static_cast<std::size_t>(k)] == hi) x[static_cast<std::size_t>(k++)] = lo;
    if (k == d) break;
    ++x[static_cast<std::size_t>(k)];
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Random connected lattice animal with `size` sites grown from the origin.
inline std::vector<LatticePoint> random_animal(int d, std::size_t size, std::mt19937_64& rng) {
  std::set<LatticePoint> cells{LatticePoint{std::vector<pvbs::Coord>(static_cast<std::size_t>(d), 0)}};
  while (cells.size() < size) {
    std::vector<LatticePoint> v(cells.begin(), cells.end());
    LatticePoint c = v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
    const int axis = std::uniform_int_distribution<int>(0, d - 1)(rng);
    c.coords[static_cast<std::size_t>(axis)] += std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1;
    cells.insert(c);
  }
  return {cells.begin(), cells.end()};
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

}  // namespace oracle

// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include "pvbs/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "pvbs/error.hpp"

namespace pvbs {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

class KrylovBasis {
 public:
  KrylovBasis(const SparseMatrix& a, Index capacity) : a_(a), v_(a.rows(), capacity), av_(a.rows(), capacity) {}

  Index cols() const { return cols_; }
  Index capacity() const { return v_.cols(); }
  auto v() const { return v_.leftCols(cols_); }
  auto av() const { return av_.leftCols(cols_); }
  auto av_block(Index start, Index count) const { return av_.middleCols(start, count); }

  void reset(const MatrixXd& u, const MatrixXd& au) {
    cols_ = u.cols();
    v_.leftCols(cols_) = u;
    av_.leftCols(cols_) = au;
  }

  // Orthogonalizes the columns of w against the basis (two passes) and appends
  // the ones that survive. Returns the number appended.
  Index append(MatrixXd w) {
    Index added = 0;
    for (Index c = 0; c < w.cols() && cols_ < capacity(); ++c) {
      Eigen::VectorXd x = w.col(c);
      const double n0 = x.norm();
      if (!(n0 > 0.0)) continue;
      for (int pass = 0; pass < 2; ++pass) {
        if (cols_ > 0) x -= v_.leftCols(cols_) * (v_.leftCols(cols_).transpose() * x);
      }
      const double n1 = x.norm();
      if (!(n1 > 1e-10 * n0) || n1 < 1e-300) continue;
      x /= n1;
      v_.col(cols_) = x;
      av_.col(cols_) = a_ * x;
      ++cols_;
      ++added;
    }
    return added;
  }

 private:
  const SparseMatrix& a_;
  MatrixXd v_;
  MatrixXd av_;
  Index cols_ = 0;
};

}  // namespace

LanczosResult lanczos_lowest(const SparseMatrix& a, int k, const LanczosOptions& options) {
  const Index n = a.rows();
  if (n == 0 || k <= 0) fail(ErrorCode::InvalidInput, "lanczos needs a nonempty matrix and k >= 1");
  const Index kk = std::min<Index>(k, n);
  const Index b = std::min<Index>(std::max(1, options.block_size), n);
  const Index m = std::min<Index>(n, std::max<Index>(options.max_basis, 2 * kk + 2 * b));

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  const auto random_block = [&](Index cols) {
    MatrixXd w(n, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < n; ++i) w(i, j) = gauss(rng);
    }
    return w;
  };

  KrylovBasis basis(a, m);
  Index last_start = 0;
  Index last_count = basis.append(random_block(b));
  int iterations = 0;

  while (true) {
    while (basis.cols() < m) {
      const Index start = basis.cols();
      Index added = basis.append(basis.av_block(last_start, last_count));
      ++iterations;
      if (added == 0) added = basis.append(random_block(b));
      if (added == 0) break;
      last_start = start;
      last_count = added;
      if (iterations > options.max_iterations) break;
    }

    const Index cols = basis.cols();
    MatrixXd t = basis.v().transpose() * basis.av();
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
    if (es.info() != Eigen::Success) fail(ErrorCode::SolverFailure, "Rayleigh-Ritz eigensolve failed");
    const Index want = std::min(kk, cols);
    const Index keep = std::min<Index>(cols, std::min<Index>(want + b, m - b > 0 ? m - b : want));
    const MatrixXd y = es.eigenvectors().leftCols(std::max(keep, want));
    const MatrixXd u = basis.v() * y;
    const MatrixXd au = basis.av() * y;
    MatrixXd r = au - u * es.eigenvalues().head(y.cols()).asDiagonal();

    bool converged = cols == n;
    if (!converged) {
      converged = true;
      for (Index i = 0; i < want; ++i) {
        const double theta = es.eigenvalues()(i);
        if (r.col(i).norm() > options.tolerance * std::max(1.0, std::abs(theta))) {
          converged = false;
          break;
        }
      }
    }
    if (converged && want == kk) {
      LanczosResult res;
      res.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + kk);
      res.vectors = u.leftCols(kk);
      res.iterations = iterations;
      return res;
    }
    if (iterations > options.max_iterations) {
      fail(ErrorCode::SolverFailure, "block Lanczos did not converge within " + std::to_string(options.max_iterations) + " iterations");
    }

    // Thick restart from the lowest Ritz vectors, expanding along their residuals.
    const Index p = std::min<Index>(keep, u.cols());
    basis.reset(u.leftCols(p), au.leftCols(p));
    const Index start = basis.cols();
    Index added = basis.append(r.leftCols(std::min(b, p)));
    if (added == 0) added = basis.append(random_block(b));
    last_start = start;
    last_count = added;
    if (added == 0) {
      // Invariant subspace with no room to grow: accept the current Ritz values.
      LanczosResult res;
      res.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + want);
      res.vectors = u.leftCols(want);
      res.iterations = iterations;
      return res;
    }
  }
}

}  // namespace pvbs

// Copyright 2026 The FedGraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "fedgraph/error.hpp"
#include "fedgraph/graph_core.hpp"

namespace fedgraph {
namespace {

double max_abs_asymmetry(const SparseMatrix& m) {
  SparseMatrix diff = SparseMatrix(m.transpose()) - m;
  double worst = 0.0;
  for (Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

Matrix orthonormalize(const Matrix& block) {
  Eigen::HouseholderQR<Matrix> qr(block);
  return qr.householderQ() * Matrix::Identity(block.rows(), block.cols());
}

SpectralResult finish(Matrix vectors, const Vector& values, int c,
                      const EigenSolverOptions& options) {
  SpectralResult out;
  out.embedding.matrix = vectors.leftCols(c);
  out.diagnostics.eigenvalues.assign(values.data(), values.data() + c + 1);
  out.diagnostics.zero_count =
      count_zero_eigenvalues(out.diagnostics.eigenvalues, options);
  return out;
}

SpectralResult dense_path(const SparseMatrix& laplacian, int c,
                          const EigenSolverOptions& options) {
  Matrix dense = Matrix(laplacian);
  dense = 0.5 * (dense + dense.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
  if (es.info() != Eigen::Success) {
    throw NumericError("dense symmetric eigensolver failed on a " +
                       std::to_string(dense.rows()) + "x" +
                       std::to_string(dense.rows()) + " matrix");
  }
  return finish(es.eigenvectors(), es.eigenvalues(), c, options);
}

// Subspace iteration on (L + sigma I)^{-1} with Rayleigh-Ritz on L itself.
SpectralResult sparse_path(const SparseMatrix& laplacian, int c,
                           const EigenSolverOptions& options,
                           const Matrix* warm_start) {
  const Index n = laplacian.rows();
  const Index want = c + 1;
  Index block = std::min<Index>(n, want + std::max<Index>(want, 10));

  double scale = 1.0;
  for (Index k = 0; k < laplacian.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(laplacian, k); it; ++it) {
      col += std::abs(it.value());
    }
    scale = std::max(scale, col);
  }
  const double shift = 1e-6 * scale;

  SparseMatrix shifted = laplacian;
  for (Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) {
    throw NumericError("sparse LDL^T factorisation failed (n=" +
                       std::to_string(n) + ")");
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix v(n, block);
  Index filled = 0;
  if (warm_start != nullptr && warm_start->rows() == n) {
    filled = std::min<Index>(warm_start->cols(), block);
    v.leftCols(filled) = warm_start->leftCols(filled);
  }
  for (Index j = filled; j < block; ++j) {
    for (Index i = 0; i < n; ++i) v(i, j) = normal(rng);
  }
  v = orthonormalize(v);

  Vector theta(block);
  double worst_residual = 0.0;
  int total_iterations = 0;
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    for (int it = 0; it < options.iterations_per_restart; ++it) {
      ++total_iterations;
      Matrix w = ldlt.solve(v);
      v = orthonormalize(w);
      Matrix lv = laplacian * v;
      Matrix h = v.transpose() * lv;
      h = 0.5 * (h + h.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> small(h);
      const Matrix& y = small.eigenvectors();
      theta = small.eigenvalues();
      v = v * y;
      lv = lv * y;
      // The c-th pair only reports the eigengap, so its Ritz value (error at
      // most residual^2 / gap) is held to tolerance rather than its vector.
      worst_residual = 0.0;
      bool guard_ok = true;
      for (Index j = 0; j < want; ++j) {
        const double r = (lv.col(j) - theta(j) * v.col(j)).norm();
        if (j < c) {
          worst_residual = std::max(worst_residual, r);
        } else {
          const double gap = theta(j + 1) - theta(j);
          guard_ok = r * r <= options.tolerance * scale * gap;
        }
      }
      if (guard_ok && worst_residual <= options.tolerance * scale) {
        return finish(std::move(v), theta, c, options);
      }
    }
    // Keep the converging Ritz vectors and widen the guard band.
    const Index grown = std::min<Index>(n / 3, 2 * block - want);
    if (grown > block) {
      Matrix wider(n, grown);
      wider.leftCols(block) = v;
      for (Index j = block; j < grown; ++j) {
        for (Index i = 0; i < n; ++i) wider(i, j) = normal(rng);
      }
      v = orthonormalize(wider);
      block = grown;
    }
  }
  std::ostringstream msg;
  msg << "eigensolver did not converge: n=" << n << " c=" << c
      << " iterations=" << total_iterations
      << " restarts=" << options.max_restarts
      << " residual=" << worst_residual
      << " tolerance=" << options.tolerance * scale;
  throw NumericError(msg.str());
}

}  // namespace

SparseMatrix graph_laplacian(const StructuralGraph& g) {
  const Index n = g.n;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * g.nonzeros() + static_cast<std::size_t>(n));
  Vector degree = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    for (const auto& e : g.rows[static_cast<std::size_t>(i)]) {
      const Index j = e.col;
      const double half = 0.5 * e.weight;
      triplets.emplace_back(i, j, -half);
      triplets.emplace_back(j, i, -half);
      degree(i) += half;
      degree(j) += half;
    }
  }
  for (Index i = 0; i < n; ++i) triplets.emplace_back(i, i, degree(i));
  SparseMatrix l(n, n);
  l.setFromTriplets(triplets.begin(), triplets.end());
  l.makeCompressed();
  return l;
}

int count_zero_eigenvalues(std::span<const double> ascending,
                           const EigenSolverOptions& options) {
  if (ascending.empty()) return 0;
  double largest = 0.0;
  for (double v : ascending) largest = std::max(largest, std::abs(v));
  const double threshold =
      std::max(options.zero_rel_tol * largest, options.zero_abs_floor);
  int count = 0;
  for (double v : ascending) {
    if (v < threshold) ++count;
  }
  return count;
}

SpectralResult c_smallest_eigvecs(const SparseMatrix& laplacian, int c,
                                  const EigenSolverOptions& options,
                                  const Matrix* warm_start) {
  const Index n = laplacian.rows();
  if (laplacian.cols() != n) {
    throw InvalidInputError("eigensolver needs a square matrix");
  }
  if (c < 1 || c >= n) {
    throw InvalidInputError("eigensolver needs 1 <= c < n (c=" +
                            std::to_string(c) + ", n=" + std::to_string(n) +
                            ")");
  }
  if (max_abs_asymmetry(laplacian) > 1e-8) {
    throw InvalidInputError("eigensolver needs a symmetric matrix");
  }
  const Index want = c + 1;
  // Heavy fill makes the sparse factorisation dense anyway.
  const bool filled = n <= options.dense_fallback_up_to &&
                      4 * laplacian.nonZeros() >= n * n;
  const bool dense = n <= options.dense_threshold || filled ||
                     3 * (want + std::max<Index>(want, 10)) > n;
  if (dense) return dense_path(laplacian, c, options);
  try {
    return sparse_path(laplacian, c, options, warm_start);
  } catch (const NumericError&) {
    if (n > options.dense_fallback_up_to) throw;
    return dense_path(laplacian, c, options);
  }
}

}  // namespace fedgraph

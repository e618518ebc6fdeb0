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

#ifndef FEDGRAPH_GRAPH_CORE_HPP_
#define FEDGRAPH_GRAPH_CORE_HPP_

// Adaptive-neighbour structural graph learning under a Laplacian rank
// constraint. Shared by the client (private graphs) and the server (global
// refinement).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fedgraph/types.hpp"

namespace fedgraph {

// Dense N x N matrix of squared Euclidean distances.
Matrix pairwise_sq_dists(const PointSet& points);

// L = D - (E + E^T) / 2 with D the degree matrix of the symmetrised graph.
SparseMatrix graph_laplacian(const StructuralGraph& g);

struct EigenSolverOptions {
  // Matrices up to this order are decomposed densely; larger ones go through
  // shift-invert subspace iteration on a sparse LDL^T factorisation.
  Index dense_threshold = 256;
  // A stalled iterative solve is redone densely up to this order.
  Index dense_fallback_up_to = 3000;
  double tolerance = 1e-8;
  int max_restarts = 5;
  int iterations_per_restart = 150;
  // An eigenvalue counts as zero below
  // max(zero_rel_tol * largest_reported, zero_abs_floor).
  double zero_rel_tol = 1e-8;
  double zero_abs_floor = 1e-10;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct SpectralResult {
  SpectralEmbedding embedding;
  RankDiagnostics diagnostics;
};

// Eigenvectors of the c smallest eigenvalues of a symmetric PSD matrix. The
// diagnostics carry the c+1 smallest eigenvalues. `warm_start`, if given,
// seeds the iterative solver with an approximate basis.
SpectralResult c_smallest_eigvecs(const SparseMatrix& laplacian, int c,
                                  const EigenSolverOptions& options = {},
                                  const Matrix* warm_start = nullptr);

int count_zero_eigenvalues(std::span<const double> ascending,
                           const EigenSolverOptions& options = {});

struct GammaEstimate {
  std::vector<double> per_row;
  double mean = 0.0;
};

// gamma_i = (k/2) d_{i,k+1} - (1/2) sum_{j<=k} d_ij for ascending rows.
double row_gamma(std::span<const double> sorted_dists, int k);
GammaEstimate estimate_gamma(
    const std::vector<std::vector<double>>& sorted_row_dists, int k);

// Closed-form optimal simplex row supported on the k nearest candidates.
// Candidates are indexed by position in `row_dists`; `exclude` (typically the
// row's own index) is never selected. Ties go to the lower index. Returns
// entries sorted by column, zero weights dropped.
std::vector<GraphEntry> knn_row_solve(std::span<const double> row_dists, int k,
                                      std::optional<Index> exclude = {});

// Euclidean projection onto the probability simplex.
Vector simplex_project(const Vector& v);

// min(10, floor(n/c) - 1), but never below 3.
int default_neighbors(Index n, int c);

struct GraphLearningOptions {
  int k = 0;  // 0 selects default_neighbors
  int max_iter = 30;
  double change_tol = 1e-6;
  EigenSolverOptions eigen;
};

struct GraphLearningResult {
  StructuralGraph graph;
  SpectralEmbedding embedding;
  RankDiagnostics diagnostics;
};

// Alternates F <- c smallest eigenvectors of L_E and a row-wise closed-form
// update of E on d_ij = d^x_ij + lambda * d^f_ij, doubling lambda while the
// graph has too few components and halving it on too many.
//
// diagnostics.objective_trace holds one triple per alternation, all evaluated
// at that alternation's lambda and gamma_i:
//   [J(E_old, F_old), J(E_new, F_old), J(E_new, F_new)]
// with J(E, F) = sum_ij (d^x_ij E_ij + gamma_i E_ij^2) + 2 lambda Tr(F^T L_E F).
//
// Failing to reach c components is not an error: the closest graph is
// returned with diagnostics.converged == false.
GraphLearningResult learn_private_graph(const PointSet& points, int c,
                                        const GraphLearningOptions& options = {});

// Plain k-nearest-neighbour graph with closed-form weights and no rank
// constraint (one E-step on d^x only).
StructuralGraph knn_graph(const PointSet& points, int k);

struct Components {
  ClusterAssignment assignment;
  int count = 0;
};

// Components of the symmetrised support; an edge exists when either direction
// carries weight above `tol`. Labels follow first appearance.
Components connected_components(const StructuralGraph& g, double tol = 1e-12);

}  // namespace fedgraph

#endif  // FEDGRAPH_GRAPH_CORE_HPP_

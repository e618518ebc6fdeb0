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

#ifndef FEDGRAPH_AGGREGATION_HPP_
#define FEDGRAPH_AGGREGATION_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedgraph/graph_core.hpp"
#include "fedgraph/prototypes.hpp"
#include "fedgraph/types.hpp"

namespace fedgraph {

// KL(p || q) for Gaussians. `q_name` is used in error messages.
double gaussian_kl(const Prototype& p, const Prototype& q,
                   const std::string& q_name = "q");

// Jeffreys divergence (KL(p||q) + KL(q||p)) / 2.
double symmetric_kl(const Prototype& p, const Prototype& q);

// C_i x C_j matrix of exp(-symmetric_kl) between the clusters of two clients.
Matrix cluster_kernel(const PrototypeSet& a, const PrototypeSet& b);

// Off-diagonal block of the global graph in factored form: entry (m, n) is
// kernel(assign_i[m], assign_j[n]).
struct InterClientBlock {
  std::uint32_t client_i = 0;
  std::uint32_t client_j = 0;
  Matrix kernel;
  std::vector<int> assign_i;
  std::vector<int> assign_j;

  Index rows() const { return static_cast<Index>(assign_i.size()); }
  Index cols() const { return static_cast<Index>(assign_j.size()); }
  Matrix dense() const;
  InterClientBlock transposed() const;
};

InterClientBlock inter_client_block(const PrototypeSet& protos_i,
                                    std::span<const int> assign_i,
                                    const PrototypeSet& protos_j,
                                    std::span<const int> assign_j);

struct AssemblyOptions {
  double beta = 1.0;
  int inter_k = 5;  // entries kept per row per off-diagonal block
  Index dense_up_to = 500;  // keep whole blocks when total_n is this small
};

struct GlobalGraph {
  Index total_n = 0;
  std::vector<Index> client_offsets;
  std::vector<Index> client_sizes;
  // Block matrix before symmetrisation: private graphs on the diagonal,
  // beta-scaled sparsified kernels off it.
  StructuralGraph raw;
  // (raw + raw^T) / 2.
  StructuralGraph symmetric;
  // `symmetric` with every row divided by its sum; the refinement target E*.
  StructuralGraph graph;

  struct BlockLocation {
    Index row = 0;
    Index col = 0;
    Index rows = 0;
    Index cols = 0;
  };
  BlockLocation block(std::size_t client_i, std::size_t client_j) const;
};

// `blocks` may hold (i, j) or (j, i) for each unordered client pair.
GlobalGraph assemble_global(const std::vector<StructuralGraph>& private_graphs,
                            const std::vector<InterClientBlock>& blocks,
                            const AssemblyOptions& options = {});

struct RefineOptions {
  int max_iter = 30;
  double initial_lambda = 1.0;
  double change_tol = 1e-6;
  EigenSolverOptions eigen;
};

struct RefineResult {
  StructuralGraph similarity;
  SpectralEmbedding embedding;
  RankDiagnostics diagnostics;
};

// Alternates F <- c smallest eigenvectors of L_S and, per row,
// S_i <- simplex projection of E*_i - (lambda/2) d^f_i over E*_i's support.
// objective_trace triples follow learn_private_graph, with
// J(S, F) = ||S - E*||_F^2 + 2 lambda Tr(F^T L_S F).
RefineResult refine_global(const GlobalGraph& e_star, int c,
                           const RefineOptions& options = {});

// Component labels when S has exactly c components, otherwise k-means on
// the rows of F.
ClusterAssignment extract_global_clusters(const StructuralGraph& s,
                                          const SpectralEmbedding& f, int c,
                                          std::uint64_t seed);

// Everything the server derives in one round.
struct GlobalResult {
  StructuralGraph similarity;
  SpectralEmbedding embedding;
  ClusterAssignment assignments;
  PrototypeSet global_prototypes;
  RankDiagnostics diagnostics;
  std::vector<std::string> warnings;
};

struct GlobalPrototypes {
  PrototypeSet prototypes;
  // Maps incoming labels to compacted ones (-1 never occurs for members).
  std::vector<int> relabel;
  std::vector<std::string> warnings;
};

// Mean and covariance (+ ridge) of the vectors in each cluster. Empty
// clusters are dropped and the remaining labels compacted.
GlobalPrototypes compute_global_prototypes(const Matrix& vectors,
                                           const ClusterAssignment& assignment);

}  // namespace fedgraph

#endif  // FEDGRAPH_AGGREGATION_HPP_

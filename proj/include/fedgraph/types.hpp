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

#ifndef FEDGRAPH_TYPES_HPP_
#define FEDGRAPH_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace fedgraph {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// N x d sample matrix; one row per sample.
class PointSet {
 public:
  PointSet() = default;
  // Throws InvalidInputError unless N >= 2, d >= 1 and every entry is finite.
  explicit PointSet(Matrix data);

  Index rows() const { return data_.rows(); }
  Index dim() const { return data_.cols(); }
  const Matrix& data() const { return data_; }
  auto row(Index i) const { return data_.row(i); }

  // Rows selected by index, in the order given.
  PointSet subset(const std::vector<Index>& indices) const;

 private:
  Matrix data_;
};

struct GraphEntry {
  std::uint32_t col = 0;
  double weight = 0.0;

  friend bool operator==(const GraphEntry&, const GraphEntry&) = default;
};

// Sparse row-stochastic affinity matrix. Rows hold (column, weight) pairs
// sorted by column with no self loops.
struct StructuralGraph {
  Index n = 0;
  Index row_capacity = 0;
  std::vector<std::vector<GraphEntry>> rows;

  StructuralGraph() = default;
  StructuralGraph(Index n, Index row_capacity)
      : n(n), row_capacity(row_capacity), rows(static_cast<std::size_t>(n)) {}

  std::size_t nonzeros() const;
  double row_sum(Index i) const;
  // Throws InvalidInputError naming the first violated invariant.
  void validate(double sum_tol = 1e-9) const;

  SparseMatrix to_sparse() const;
  Matrix dense() const;
  // Builds a graph from a dense matrix, dropping entries <= drop_below.
  static StructuralGraph from_dense(const Matrix& m, double drop_below = 0.0);

  friend bool operator==(const StructuralGraph&,
                         const StructuralGraph&) = default;
};

// N x C matrix with orthonormal columns.
struct SpectralEmbedding {
  Matrix matrix;

  Index n() const { return matrix.rows(); }
  Index c() const { return matrix.cols(); }
};

struct RankDiagnostics {
  std::vector<double> eigenvalues;  // c+1 smallest, ascending
  int zero_count = 0;
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
  // Connected components of the returned graph.
  int components = 0;
  // Per-alternation objective values; see graph_core.hpp.
  std::vector<std::vector<double>> objective_trace;
};

struct Provenance {
  std::uint32_t client_id = 0;
  std::uint32_t local_index = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ClusterAssignment {
  std::vector<int> labels;
  int num_clusters = 0;
  // Empty unless the assignment spans several clients.
  std::vector<Provenance> provenance;

  std::size_t size() const { return labels.size(); }
  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

}  // namespace fedgraph

#endif  // FEDGRAPH_TYPES_HPP_

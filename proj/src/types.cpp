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

#include "fedgraph/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedgraph/error.hpp"

namespace fedgraph {

PointSet::PointSet(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 2) {
    throw InvalidInputError("point set needs at least 2 samples, got " +
                            std::to_string(data_.rows()));
  }
  if (data_.cols() < 1) {
    throw InvalidInputError("point set needs at least 1 feature");
  }
  if (!data_.allFinite()) {
    for (Index i = 0; i < data_.rows(); ++i) {
      if (!data_.row(i).allFinite()) {
        throw InvalidInputError("non-finite value in sample " +
                                std::to_string(i));
      }
    }
  }
}

PointSet PointSet::subset(const std::vector<Index>& indices) const {
  Matrix out(static_cast<Index>(indices.size()), data_.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out.row(static_cast<Index>(r)) = data_.row(indices[r]);
  }
  return PointSet(std::move(out));
}

std::size_t StructuralGraph::nonzeros() const {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  return total;
}

double StructuralGraph::row_sum(Index i) const {
  double s = 0.0;
  for (const auto& e : rows[static_cast<std::size_t>(i)]) s += e.weight;
  return s;
}

void StructuralGraph::validate(double sum_tol) const {
  if (static_cast<Index>(rows.size()) != n) {
    throw InvalidInputError("graph row count does not match n");
  }
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    if (row_capacity > 0 && static_cast<Index>(r.size()) > row_capacity) {
      throw InvalidInputError("row " + std::to_string(i) +
                              " exceeds row capacity");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      const auto& e = r[k];
      if (static_cast<Index>(e.col) >= n) {
        throw InvalidInputError("row " + std::to_string(i) +
                                " has out-of-range column");
      }
      if (static_cast<Index>(e.col) == i) {
        throw InvalidInputError("row " + std::to_string(i) +
                                " has a self loop");
      }
      if (k > 0 && r[k - 1].col >= e.col) {
        throw InvalidInputError("row " + std::to_string(i) +
                                " columns not strictly increasing");
      }
      if (!(e.weight >= 0.0 && e.weight <= 1.0)) {
        throw InvalidInputError("row " + std::to_string(i) +
                                " has weight outside [0,1]");
      }
      s += e.weight;
    }
    if (std::abs(s - 1.0) > sum_tol) {
      throw InvalidInputError("row " + std::to_string(i) + " sums to " +
                              std::to_string(s));
    }
  }
}

SparseMatrix StructuralGraph::to_sparse() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(nonzeros());
  for (Index i = 0; i < n; ++i) {
    for (const auto& e : rows[static_cast<std::size_t>(i)]) {
      triplets.emplace_back(i, static_cast<Index>(e.col), e.weight);
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Matrix StructuralGraph::dense() const {
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (const auto& e : rows[static_cast<std::size_t>(i)]) {
      m(i, static_cast<Index>(e.col)) = e.weight;
    }
  }
  return m;
}

StructuralGraph StructuralGraph::from_dense(const Matrix& m,
                                            double drop_below) {
  StructuralGraph g(m.rows(), 0);
  for (Index i = 0; i < m.rows(); ++i) {
    auto& r = g.rows[static_cast<std::size_t>(i)];
    for (Index j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) > drop_below) {
        r.push_back({static_cast<std::uint32_t>(j), m(i, j)});
      }
    }
    g.row_capacity = std::max<Index>(g.row_capacity, static_cast<Index>(r.size()));
  }
  return g;
}

}  // namespace fedgraph

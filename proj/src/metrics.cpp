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

#include "fedgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fedgraph/error.hpp"

namespace fedgraph {
namespace {

void check_pair(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.empty() || predicted.empty()) {
    throw InvalidInputError("clustering metrics need non-empty labelings");
  }
  if (truth.size() != predicted.size()) {
    throw InvalidInputError("label vectors differ in length (" +
                            std::to_string(truth.size()) + " vs " +
                            std::to_string(predicted.size()) + ")");
  }
}

double entropy(const Vector& counts, double n) {
  double h = 0.0;
  for (Index i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0) {
      const double p = counts(i) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

double choose2(double x) { return 0.5 * x * (x - 1.0); }

// Same partition up to relabelling.
bool same_partition(const Matrix& table) {
  for (Index i = 0; i < table.rows(); ++i) {
    if ((table.row(i).array() > 0).count() > 1) return false;
  }
  for (Index j = 0; j < table.cols(); ++j) {
    if ((table.col(j).array() > 0).count() > 1) return false;
  }
  return true;
}

}  // namespace

std::vector<Index> linear_sum_assignment(const Matrix& cost) {
  const Index n = cost.rows();
  const Index m = cost.cols();
  if (n > m) {
    throw InvalidInputError("assignment needs rows <= cols");
  }
  // Shortest augmenting path with potentials, 1-based internally.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<Index> p(m + 1, 0), way(m + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const Index i0 = p[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> out(n, -1);
  for (Index j = 1; j <= m; ++j) {
    if (p[j] != 0) out[p[j] - 1] = j - 1;
  }
  return out;
}

Matrix contingency_table(std::span<const int> truth,
                         std::span<const int> predicted) {
  check_pair(truth, predicted);
  const int rows = *std::max_element(truth.begin(), truth.end()) + 1;
  const int cols = *std::max_element(predicted.begin(), predicted.end()) + 1;
  if (*std::min_element(truth.begin(), truth.end()) < 0 ||
      *std::min_element(predicted.begin(), predicted.end()) < 0) {
    throw InvalidInputError("labels must be non-negative");
  }
  Matrix table = Matrix::Zero(rows, cols);
  for (std::size_t i = 0; i < truth.size(); ++i) table(truth[i], predicted[i]) += 1.0;
  return table;
}

double hungarian_accuracy(std::span<const int> truth,
                          std::span<const int> predicted) {
  const Matrix table = contingency_table(truth, predicted);
  // Square up so every cluster and class may stay unmatched.
  const Index k = std::max(table.rows(), table.cols());
  Matrix cost = Matrix::Zero(k, k);
  cost.topLeftCorner(table.rows(), table.cols()) = -table;
  const auto match = linear_sum_assignment(cost);
  double hit = 0.0;
  for (Index i = 0; i < k; ++i) hit -= cost(i, match[i]);
  return hit / static_cast<double>(truth.size());
}

double nmi(std::span<const int> truth, std::span<const int> predicted) {
  const Matrix table = contingency_table(truth, predicted);
  const double n = static_cast<double>(truth.size());
  const Vector a = table.rowwise().sum();
  const Vector b = table.colwise().sum().transpose();
  const double ha = entropy(a, n);
  const double hb = entropy(b, n);
  if (ha == 0.0 || hb == 0.0) return same_partition(table) ? 1.0 : 0.0;
  double mi = 0.0;
  for (Index i = 0; i < table.rows(); ++i) {
    for (Index j = 0; j < table.cols(); ++j) {
      const double nij = table(i, j);
      if (nij > 0) mi += nij / n * std::log(n * nij / (a(i) * b(j)));
    }
  }
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

double ari(std::span<const int> truth, std::span<const int> predicted) {
  const Matrix table = contingency_table(truth, predicted);
  const double n = static_cast<double>(truth.size());
  if (truth.size() < 2) return 1.0;
  double index = 0.0;
  for (Index i = 0; i < table.size(); ++i) index += choose2(table.data()[i]);
  double sum_a = 0.0, sum_b = 0.0;
  const Vector a = table.rowwise().sum();
  const Vector b = table.colwise().sum().transpose();
  for (Index i = 0; i < a.size(); ++i) sum_a += choose2(a(i));
  for (Index j = 0; j < b.size(); ++j) sum_b += choose2(b(j));
  const double expected = sum_a * sum_b / choose2(n);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return same_partition(table) ? 1.0 : 0.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace fedgraph

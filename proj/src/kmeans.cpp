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

#include "fedgraph/kmeans.hpp"

#include <limits>
#include <string>

#include "fedgraph/error.hpp"

namespace fedgraph {

Matrix kmeanspp_seeds(const Matrix& x, int k, std::mt19937_64& rng) {
  const Index n = x.rows();
  Matrix centers(k, x.cols());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centers.row(0) = x.row(pick(rng));
  Vector closest(n);
  for (Index i = 0; i < n; ++i) closest(i) = (x.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = closest.sum();
    Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (chosen = 0; chosen < n - 1; ++chosen) {
        target -= closest(chosen);
        if (target <= 0.0) break;
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = x.row(chosen);
    for (Index i = 0; i < n; ++i) {
      closest(i) = std::min(closest(i), (x.row(i) - centers.row(c)).squaredNorm());
    }
  }
  return centers;
}

std::vector<int> nearest_center(const Matrix& x, const Matrix& centers) {
  std::vector<int> labels(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i) {
    Index best = 0;
    (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int restarts,
                    int max_iter) {
  const Index n = x.rows();
  if (k < 1 || k > n) {
    throw InvalidInputError("k-means needs 1 <= k <= n (k=" + std::to_string(k) +
                            ", n=" + std::to_string(n) + ")");
  }
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    Matrix centers = kmeanspp_seeds(x, k, rng);
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    double inertia = 0.0;
    for (int it = 0; it < max_iter; ++it) {
      bool changed = false;
      inertia = 0.0;
      Vector dist(n);
      for (Index i = 0; i < n; ++i) {
        Index c = 0;
        dist(i) = (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&c);
        inertia += dist(i);
        if (labels[static_cast<std::size_t>(i)] != static_cast<int>(c)) {
          labels[static_cast<std::size_t>(i)] = static_cast<int>(c);
          changed = true;
        }
      }
      if (!changed && it > 0) break;
      Matrix sums = Matrix::Zero(k, x.cols());
      Vector counts = Vector::Zero(k);
      for (Index i = 0; i < n; ++i) {
        sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
        counts(labels[static_cast<std::size_t>(i)]) += 1.0;
      }
      for (int c = 0; c < k; ++c) {
        if (counts(c) > 0) {
          centers.row(c) = sums.row(c) / counts(c);
        } else {
          Index far = 0;
          dist.maxCoeff(&far);
          centers.row(c) = x.row(far);
          dist(far) = 0.0;
        }
      }
    }
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.centers = centers;
      best.labels = labels;
    }
  }
  return best;
}

}  // namespace fedgraph

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

#ifndef FEDGRAPH_TESTS_TEST_UTIL_HPP_
#define FEDGRAPH_TESTS_TEST_UTIL_HPP_

// Hand-rolled generators shared by the property tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "fedgraph/prototypes.hpp"
#include "fedgraph/types.hpp"
#include "fedgraph/wire.hpp"

namespace fedgraph::testing {

inline Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, Index n, double sd = 1.0) {
  return random_matrix(rng, n, 1, sd).col(0);
}

// `c` well separated isotropic blobs of `per` points each in `d` dimensions.
inline PointSet blobs(std::mt19937_64& rng, int c, Index per, Index d, double spread = 0.05,
                      std::vector<int>* labels = nullptr) {
  std::normal_distribution<double> normal(0.0, spread);
  Matrix x(c * per, d);
  for (int k = 0; k < c; ++k) {
    for (Index i = 0; i < per; ++i) {
      for (Index j = 0; j < d; ++j) {
        x(k * per + i, j) = (j == k % d ? 3.0 * (1 + k / d) : 0.0) + normal(rng);
      }
      if (labels) labels->push_back(k);
    }
  }
  return PointSet(std::move(x));
}

inline Matrix random_spd(std::mt19937_64& rng, Index d, double floor = 0.1) {
  const Matrix a = random_matrix(rng, d, d);
  return a * a.transpose() / static_cast<double>(d) + floor * Matrix::Identity(d, d);
}

// Row-stochastic sparse graph with at most `cap` neighbours per row.
inline StructuralGraph random_graph(std::mt19937_64& rng, Index n, Index cap) {
  StructuralGraph g(n, cap);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (Index i = 0; i < n; ++i) {
    std::vector<std::uint32_t> cols;
    for (Index j = 0; j < n; ++j) {
      if (j != i) cols.push_back(static_cast<std::uint32_t>(j));
    }
    std::shuffle(cols.begin(), cols.end(), rng);
    const Index keep = std::uniform_int_distribution<Index>(
        1, std::min<Index>(cap, static_cast<Index>(cols.size())))(rng);
    cols.resize(static_cast<std::size_t>(keep));
    std::sort(cols.begin(), cols.end());
    double total = 0.0;
    for (auto c : cols) {
      const double w = unit(rng);
      g.rows[static_cast<std::size_t>(i)].push_back({c, w});
      total += w;
    }
    for (auto& e : g.rows[static_cast<std::size_t>(i)]) e.weight /= total;
  }
  return g;
}

inline PrototypeSet random_prototypes(std::mt19937_64& rng, int c, Index d, CovarianceForm form) {
  PrototypeSet p;
  p.form = form;
  p.client_id = static_cast<std::uint32_t>(rng() % 16);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < c; ++k) {
    Prototype proto;
    proto.mean = random_vector(rng, d);
    proto.covariance = random_spd(rng, d);
    if (form == CovarianceForm::kDiagonal) {
      proto.covariance = Matrix(proto.covariance.diagonal().asDiagonal());
    }
    proto.weight = unit(rng);
    p.prototypes.push_back(std::move(proto));
  }
  p.noised = (rng() & 1) != 0;
  p.epsilon_spent = p.noised ? unit(rng) * 4.0 : 0.0;
  return p;
}

inline UploadMessage random_upload(std::mt19937_64& rng) {
  UploadMessage m;
  m.client_id = static_cast<std::uint32_t>(rng() % 64);
  m.round = static_cast<std::uint32_t>(rng() % 8);
  const Index n = 2 + static_cast<Index>(rng() % 30);
  const Index cap = 1 + static_cast<Index>(rng() % 6);
  m.graph = random_graph(rng, n, cap);
  const int c = 1 + static_cast<int>(rng() % 4);
  const Index d = 1 + static_cast<Index>(rng() % 5);
  m.prototypes = random_prototypes(
      rng, c, d, (rng() & 1) != 0 ? CovarianceForm::kFull : CovarianceForm::kDiagonal);
  for (Index i = 0; i < n; ++i) m.local_labels.push_back(static_cast<int>(rng() % c));
  return m;
}

inline GlobalFeedback random_feedback(std::mt19937_64& rng) {
  GlobalFeedback f;
  f.client_id = static_cast<std::uint32_t>(rng() % 64);
  f.round = static_cast<std::uint32_t>(rng() % 8);
  f.num_clusters = 1 + static_cast<int>(rng() % 5);
  const Index n = 1 + static_cast<Index>(rng() % 40);
  for (Index i = 0; i < n; ++i) f.assignments.push_back(static_cast<int>(rng() % f.num_clusters));
  f.global_prototypes = random_prototypes(rng, f.num_clusters, 1 + static_cast<Index>(rng() % 4),
                                          CovarianceForm::kFull);
  return f;
}

// Union-find over the symmetrised support of a graph.
inline int union_find_components(const StructuralGraph& g) {
  std::vector<Index> parent(static_cast<std::size_t>(g.n));
  for (Index i = 0; i < g.n; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](Index v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  int count = static_cast<int>(g.n);
  for (Index i = 0; i < g.n; ++i) {
    for (const auto& e : g.rows[static_cast<std::size_t>(i)]) {
      if (e.weight <= 1e-12) continue;
      const Index a = find(i), b = find(static_cast<Index>(e.col));
      if (a != b) {
        parent[static_cast<std::size_t>(a)] = b;
        --count;
      }
    }
  }
  return count;
}

// Threshold tau with sum(max(v - tau, 0)) = 1, found by bisection.
inline Vector simplex_by_bisection(const Vector& v) {
  double lo = v.minCoeff() - 1.0, hi = v.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((v.array() - mid).max(0.0).sum() > 1.0) lo = mid;
    else hi = mid;
  }
  return (v.array() - 0.5 * (lo + hi)).max(0.0).matrix();
}

// One random byte-level corruption: bit flip, overwrite, truncation,
// insertion, deletion or appended byte.
inline std::vector<std::uint8_t> mutate(std::vector<std::uint8_t> b, std::mt19937_64& rng) {
  const std::size_t at = rng() % b.size();
  switch (rng() % 6) {
    case 0:
      b[at] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
      break;
    case 1:
      b[at] = static_cast<std::uint8_t>(b[at] + 1 + rng() % 255);
      break;
    case 2:
      b.resize(at);
      break;
    case 3:
      b.insert(b.begin() + static_cast<std::ptrdiff_t>(at), static_cast<std::uint8_t>(rng()));
      break;
    case 4:
      b.erase(b.begin() + static_cast<std::ptrdiff_t>(at));
      break;
    default:
      b.push_back(static_cast<std::uint8_t>(rng()));
      break;
  }
  return b;
}

}  // namespace fedgraph::testing

#endif  // FEDGRAPH_TESTS_TEST_UTIL_HPP_

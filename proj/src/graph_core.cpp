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

#include "fedgraph/graph_core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "fedgraph/error.hpp"

namespace fedgraph {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>;

// Row access to d^x without necessarily materialising N x N.
class DistanceRows {
 public:
  explicit DistanceRows(const PointSet& points) : x_(points.data()) {
    if (x_.rows() <= kDenseLimit) {
      dense_ = Matrix(x_.rows(), x_.rows());
      for (Index i = 0; i < x_.rows(); ++i) fill_row(i, dense_.col(i).data());
    }
  }

  Index n() const { return x_.rows(); }

  // Writes row i into out[0..n).
  void row(Index i, double* out) const {
    if (dense_.size() > 0) {
      const double* src = dense_.col(i).data();  // symmetric
      std::copy(src, src + n(), out);
    } else {
      fill_row(i, out);
    }
  }

 private:
  static constexpr Index kDenseLimit = 3000;

  void fill_row(Index i, double* out) const {
    const auto xi = x_.row(i);
    for (Index j = 0; j < x_.rows(); ++j) out[j] = (x_.row(j) - xi).squaredNorm();
  }

  RowMajor x_;
  Matrix dense_;
};

void add_embedding_dists(const RowMajor& f, Index i, double lambda,
                         double* row) {
  const auto fi = f.row(i);
  for (Index j = 0; j < f.rows(); ++j) {
    row[j] += lambda * (f.row(j) - fi).squaredNorm();
  }
}

struct EStep {
  StructuralGraph graph;
  std::vector<double> gamma;
};

// One closed-form E-step on d^x + lambda d^f (f may be empty for d^x only).
EStep e_step(const DistanceRows& dx, const RowMajor& f, double lambda, int k) {
  const Index n = dx.n();
  EStep out{StructuralGraph(n, k), std::vector<double>(n, 0.0)};
  std::vector<double> row(static_cast<std::size_t>(n));
  std::vector<std::pair<double, Index>> order;
  for (Index i = 0; i < n; ++i) {
    dx.row(i, row.data());
    if (f.size() > 0 && lambda != 0.0) {
      add_embedding_dists(f, i, lambda, row.data());
    }
    out.graph.rows[static_cast<std::size_t>(i)] =
        knn_row_solve(row, k, i);
    // gamma_i from the same k+1 nearest candidates.
    order.clear();
    for (Index j = 0; j < n; ++j) {
      if (j != i) order.emplace_back(row[static_cast<std::size_t>(j)], j);
    }
    std::nth_element(order.begin(), order.begin() + k, order.end());
    std::sort(order.begin(), order.begin() + k + 1);
    std::vector<double> sorted(static_cast<std::size_t>(k + 1));
    for (int h = 0; h <= k; ++h) sorted[h] = order[h].first;
    out.gamma[static_cast<std::size_t>(i)] = row_gamma(sorted, k);
  }
  return out;
}

// sum_ij (d^x_ij E_ij + gamma_i E_ij^2) + lambda sum_ij d^f_ij E_ij, the last
// term being 2 lambda Tr(F^T L_E F).
double private_objective(const StructuralGraph& e, const DistanceRows& dx,
                         const RowMajor& f, double lambda,
                         const std::vector<double>& gamma) {
  std::vector<double> row(static_cast<std::size_t>(e.n));
  double total = 0.0;
  for (Index i = 0; i < e.n; ++i) {
    dx.row(i, row.data());
    const auto fi = f.row(i);
    for (const auto& entry : e.rows[static_cast<std::size_t>(i)]) {
      const double w = entry.weight;
      const double df = (f.row(entry.col) - fi).squaredNorm();
      total += row[entry.col] * w + gamma[static_cast<std::size_t>(i)] * w * w +
               lambda * df * w;
    }
  }
  return total;
}

double frobenius_change(const StructuralGraph& a, const StructuralGraph& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& ra = a.rows[i];
    const auto& rb = b.rows[i];
    std::size_t p = 0, q = 0;
    while (p < ra.size() || q < rb.size()) {
      if (q == rb.size() || (p < ra.size() && ra[p].col < rb[q].col)) {
        total += ra[p].weight * ra[p].weight;
        ++p;
      } else if (p == ra.size() || rb[q].col < ra[p].col) {
        total += rb[q].weight * rb[q].weight;
        ++q;
      } else {
        const double d = ra[p].weight - rb[q].weight;
        total += d * d;
        ++p;
        ++q;
      }
    }
  }
  return std::sqrt(total);
}

}  // namespace

Matrix pairwise_sq_dists(const PointSet& points) {
  const Index n = points.rows();
  Matrix out = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double d = (points.row(i) - points.row(j)).squaredNorm();
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

double row_gamma(std::span<const double> sorted_dists, int k) {
  if (k < 1 || static_cast<Index>(sorted_dists.size()) < k + 1) {
    throw InvalidInputError("gamma needs at least k+1 sorted distances (k=" +
                            std::to_string(k) + ", have " +
                            std::to_string(sorted_dists.size()) + ")");
  }
  double head = 0.0;
  for (int j = 0; j < k; ++j) head += sorted_dists[j];
  return 0.5 * k * sorted_dists[k] - 0.5 * head;
}

GammaEstimate estimate_gamma(
    const std::vector<std::vector<double>>& sorted_row_dists, int k) {
  GammaEstimate out;
  out.per_row.reserve(sorted_row_dists.size());
  for (const auto& r : sorted_row_dists) out.per_row.push_back(row_gamma(r, k));
  if (!out.per_row.empty()) {
    out.mean = std::accumulate(out.per_row.begin(), out.per_row.end(), 0.0) /
               static_cast<double>(out.per_row.size());
  }
  return out;
}

std::vector<GraphEntry> knn_row_solve(std::span<const double> row_dists, int k,
                                      std::optional<Index> exclude) {
  std::vector<std::pair<double, Index>> order;
  order.reserve(row_dists.size());
  for (Index j = 0; j < static_cast<Index>(row_dists.size()); ++j) {
    if (exclude && *exclude == j) continue;
    order.emplace_back(row_dists[j], j);
  }
  if (k < 1 || static_cast<Index>(order.size()) < k + 1) {
    throw InvalidInputError("knn row solve needs k >= 1 and k+1 candidates (k=" +
                            std::to_string(k) + ", candidates=" +
                            std::to_string(order.size()) + ")");
  }
  std::nth_element(order.begin(), order.begin() + k, order.end());
  std::sort(order.begin(), order.begin() + k + 1);

  const double boundary = order[k].first;
  double head = 0.0;
  for (int j = 0; j < k; ++j) head += order[j].first;
  const double denom = k * boundary - head;

  std::vector<GraphEntry> out;
  out.reserve(static_cast<std::size_t>(k));
  if (!(denom > 0.0)) {
    // k+1 nearest are all equidistant: every simplex point on them is optimal.
    for (int j = 0; j < k; ++j) {
      out.push_back({static_cast<std::uint32_t>(order[j].second), 1.0 / k});
    }
  } else {
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      const double w = (boundary - order[j].first) / denom;
      if (w > 0.0) {
        out.push_back({static_cast<std::uint32_t>(order[j].second), w});
        total += w;
      }
    }
    // Pin the sum to 1 against rounding.
    for (auto& e : out) e.weight /= total;
  }
  std::sort(out.begin(), out.end(),
            [](const GraphEntry& a, const GraphEntry& b) { return a.col < b.col; });
  return out;
}

Vector simplex_project(const Vector& v) {
  const Index n = v.size();
  if (n == 0) throw InvalidInputError("cannot project an empty vector");
  if (!v.allFinite()) throw InvalidInputError("simplex projection of non-finite vector");
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < n; ++j) {
    cumulative += u[static_cast<std::size_t>(j)];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - t > 0.0) theta = t;
  }
  Vector out = (v.array() - theta).max(0.0).matrix();
  const double s = out.sum();
  if (s > 0.0) out /= s;
  return out;
}

int default_neighbors(Index n, int c) {
  const Index per_cluster = n / std::max(c, 1);
  const Index k = std::min<Index>(10, per_cluster - 1);
  return static_cast<int>(std::max<Index>(k, 3));
}

StructuralGraph knn_graph(const PointSet& points, int k) {
  if (k + 1 >= points.rows()) {
    throw InvalidInputError("knn graph needs k+1 < n");
  }
  DistanceRows dx(points);
  return e_step(dx, RowMajor(), 0.0, k).graph;
}

GraphLearningResult learn_private_graph(const PointSet& points, int c,
                                        const GraphLearningOptions& options) {
  const Index n = points.rows();
  if (c < 1 || c >= n) {
    throw InvalidInputError("graph learning needs 1 <= c < n (c=" +
                            std::to_string(c) + ", n=" + std::to_string(n) +
                            ")");
  }
  const int k = options.k > 0 ? options.k : default_neighbors(n, c);
  if (k + 1 >= n) {
    throw InvalidInputError("graph learning needs k+1 < n (k=" +
                            std::to_string(k) + ", n=" + std::to_string(n) +
                            ")");
  }

  DistanceRows dx(points);
  EStep init = e_step(dx, RowMajor(), 0.0, k);
  double lambda = std::accumulate(init.gamma.begin(), init.gamma.end(), 0.0) /
                  static_cast<double>(n);
  if (!(lambda > 0.0)) lambda = 1.0;

  StructuralGraph graph = std::move(init.graph);
  SpectralResult spec = c_smallest_eigvecs(graph_laplacian(graph), c,
                                           options.eigen);
  RowMajor f = spec.embedding.matrix;
  RowMajor f_prev = f;

  struct Snapshot {
    StructuralGraph graph;
    SpectralResult spectral;
    double lambda;
  };
  std::optional<Snapshot> best;
  std::optional<Snapshot> closest;
  int closest_gap = std::numeric_limits<int>::max();

  std::vector<std::vector<double>> trace;
  double change = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool stable = false;
  for (int it = 1; it <= options.max_iter; ++it) {
    iterations = it;
    const int zeros = spec.diagnostics.zero_count;
    const int comps = connected_components(graph).count;
    if (zeros == c && comps == c) {
      best = Snapshot{graph, spec, lambda};
      if (change < options.change_tol) {
        stable = true;
        break;
      }
    } else if (std::abs(comps - c) < closest_gap) {
      closest_gap = std::abs(comps - c);
      closest = Snapshot{graph, spec, lambda};
    }

    if (zeros < c) {
      lambda *= 2.0;
    } else if (zeros > c) {
      lambda *= 0.5;
      f = f_prev;
    }

    // E-step with F fixed.
    EStep next = e_step(dx, f, lambda, k);
    const double j_before = private_objective(graph, dx, f, lambda, next.gamma);
    const double j_mid = private_objective(next.graph, dx, f, lambda, next.gamma);

    // F-step with E fixed.
    const Matrix warm = f;
    spec = c_smallest_eigvecs(graph_laplacian(next.graph), c, options.eigen,
                              &warm);
    f_prev = f;
    f = spec.embedding.matrix;
    const double j_after =
        private_objective(next.graph, dx, f, lambda, next.gamma);
    trace.push_back({j_before, j_mid, j_after});

    change = frobenius_change(graph, next.graph);
    graph = std::move(next.graph);
  }

  if (!stable) {
    const int zeros = spec.diagnostics.zero_count;
    const int comps = connected_components(graph).count;
    if (zeros == c && comps == c) {
      best = Snapshot{graph, spec, lambda};
    }
  }

  GraphLearningResult out;
  const Snapshot* chosen = nullptr;
  Snapshot last{graph, spec, lambda};
  if (best) {
    chosen = &*best;
  } else if (closest && std::abs(connected_components(graph).count - c) >
                            closest_gap) {
    chosen = &*closest;
  } else {
    chosen = &last;
  }
  out.graph = chosen->graph;
  out.embedding = chosen->spectral.embedding;
  out.diagnostics = chosen->spectral.diagnostics;
  out.diagnostics.lambda = chosen->lambda;
  out.diagnostics.iterations = iterations;
  out.diagnostics.components = connected_components(out.graph).count;
  out.diagnostics.converged =
      out.diagnostics.components == c && out.diagnostics.zero_count == c;
  out.diagnostics.objective_trace = std::move(trace);
  return out;
}

Components connected_components(const StructuralGraph& g, double tol) {
  const Index n = g.n;
  std::vector<std::vector<std::uint32_t>> adjacency(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (const auto& e : g.rows[static_cast<std::size_t>(i)]) {
      if (e.weight > tol) {
        adjacency[static_cast<std::size_t>(i)].push_back(e.col);
        adjacency[e.col].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
  Components out;
  out.assignment.labels.assign(static_cast<std::size_t>(n), -1);
  std::deque<std::uint32_t> queue;
  for (Index s = 0; s < n; ++s) {
    if (out.assignment.labels[static_cast<std::size_t>(s)] >= 0) continue;
    const int label = out.count++;
    out.assignment.labels[static_cast<std::size_t>(s)] = label;
    queue.push_back(static_cast<std::uint32_t>(s));
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (auto v : adjacency[u]) {
        if (out.assignment.labels[v] < 0) {
          out.assignment.labels[v] = label;
          queue.push_back(v);
        }
      }
    }
  }
  out.assignment.num_clusters = out.count;
  return out;
}

}  // namespace fedgraph

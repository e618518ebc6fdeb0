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

#include "fedgraph/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <utility>

#include <Eigen/Cholesky>

#include "fedgraph/error.hpp"
#include "fedgraph/kmeans.hpp"

namespace fedgraph {
namespace {

bool is_diagonal(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

double log_det_llt(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void append_sorted(std::vector<GraphEntry>& row, std::uint32_t col, double w) {
  row.push_back({col, w});
}

// Merges (col, weight) lists that may hold duplicates into a sorted row.
std::vector<GraphEntry> canonical_row(std::vector<GraphEntry> row) {
  std::sort(row.begin(), row.end(),
            [](const GraphEntry& a, const GraphEntry& b) { return a.col < b.col; });
  std::vector<GraphEntry> out;
  out.reserve(row.size());
  for (const auto& e : row) {
    if (!out.empty() && out.back().col == e.col) {
      out.back().weight += e.weight;
    } else {
      out.push_back(e);
    }
  }
  return out;
}

double refine_objective(const StructuralGraph& s, const StructuralGraph& e_star,
                        const Matrix& f, double lambda) {
  double total = 0.0;
  for (Index i = 0; i < s.n; ++i) {
    const auto& rs = s.rows[static_cast<std::size_t>(i)];
    const auto& re = e_star.rows[static_cast<std::size_t>(i)];
    // S support is a subset of E* support.
    std::size_t p = 0;
    for (const auto& e : re) {
      double sv = 0.0;
      while (p < rs.size() && rs[p].col < e.col) ++p;
      if (p < rs.size() && rs[p].col == e.col) sv = rs[p].weight;
      const double diff = sv - e.weight;
      total += diff * diff;
    }
    for (const auto& e : rs) {
      total += lambda * (f.row(e.col) - f.row(i)).squaredNorm() * e.weight;
    }
  }
  return total;
}

double frobenius_change(const StructuralGraph& a, const StructuralGraph& b) {
  return (a.to_sparse() - b.to_sparse()).norm();
}

}  // namespace

double gaussian_kl(const Prototype& p, const Prototype& q, const std::string& q_name) {
  const Index d = p.mean.size();
  if (q.mean.size() != d || p.covariance.rows() != d || q.covariance.rows() != d) {
    throw InvalidInputError("KL between prototypes of different dimension");
  }
  const Vector diff = q.mean - p.mean;
  if (is_diagonal(p.covariance) && is_diagonal(q.covariance)) {
    const Vector vp = p.covariance.diagonal();
    const Vector vq = q.covariance.diagonal();
    if ((vq.array() <= 0.0).any()) {
      throw NumericError("covariance of prototype " + q_name + " is singular");
    }
    if ((vp.array() <= 0.0).any()) {
      throw NumericError("covariance of prototype p is singular");
    }
    const double kl = 0.5 * ((vp.array() / vq.array()).sum() +
                             (diff.array().square() / vq.array()).sum() -
                             static_cast<double>(d) +
                             vq.array().log().sum() - vp.array().log().sum());
    return std::max(kl, 0.0);
  }
  Eigen::LLT<Matrix> lq(q.covariance);
  if (lq.info() != Eigen::Success) {
    throw NumericError("covariance of prototype " + q_name + " is not positive definite");
  }
  Eigen::LLT<Matrix> lp(p.covariance);
  if (lp.info() != Eigen::Success) {
    throw NumericError("covariance of prototype p is not positive definite");
  }
  const double trace = lq.solve(p.covariance).trace();
  const double maha = diff.dot(lq.solve(diff));
  const double kl =
      0.5 * (trace + maha - static_cast<double>(d) + log_det_llt(lq) - log_det_llt(lp));
  return std::max(kl, 0.0);
}

double symmetric_kl(const Prototype& p, const Prototype& q) {
  return 0.5 * (gaussian_kl(p, q) + gaussian_kl(q, p));
}

Matrix cluster_kernel(const PrototypeSet& a, const PrototypeSet& b) {
  Matrix k(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      const auto& pa = a.prototypes[static_cast<std::size_t>(i)];
      const auto& pb = b.prototypes[static_cast<std::size_t>(j)];
      const double kl_ab = gaussian_kl(pa, pb, "client " + std::to_string(b.client_id) +
                                                   " cluster " + std::to_string(j));
      const double kl_ba = gaussian_kl(pb, pa, "client " + std::to_string(a.client_id) +
                                                   " cluster " + std::to_string(i));
      k(i, j) = std::exp(-0.5 * (kl_ab + kl_ba));
    }
  }
  return k;
}

Matrix InterClientBlock::dense() const {
  Matrix out(rows(), cols());
  for (Index m = 0; m < rows(); ++m) {
    for (Index n = 0; n < cols(); ++n) {
      out(m, n) = kernel(assign_i[static_cast<std::size_t>(m)],
                         assign_j[static_cast<std::size_t>(n)]);
    }
  }
  return out;
}

InterClientBlock InterClientBlock::transposed() const {
  return {client_j, client_i, kernel.transpose(), assign_j, assign_i};
}

InterClientBlock inter_client_block(const PrototypeSet& protos_i,
                                    std::span<const int> assign_i,
                                    const PrototypeSet& protos_j,
                                    std::span<const int> assign_j) {
  auto check = [](const PrototypeSet& p, std::span<const int> a) {
    for (int label : a) {
      if (label < 0 || label >= p.size()) {
        throw InvalidInputError("client " + std::to_string(p.client_id) +
                                " assignment label " + std::to_string(label) +
                                " has no prototype");
      }
    }
  };
  check(protos_i, assign_i);
  check(protos_j, assign_j);
  return {protos_i.client_id, protos_j.client_id, cluster_kernel(protos_i, protos_j),
          std::vector<int>(assign_i.begin(), assign_i.end()),
          std::vector<int>(assign_j.begin(), assign_j.end())};
}

GlobalGraph::BlockLocation GlobalGraph::block(std::size_t client_i,
                                              std::size_t client_j) const {
  return {client_offsets.at(client_i), client_offsets.at(client_j), client_sizes.at(client_i),
          client_sizes.at(client_j)};
}

GlobalGraph assemble_global(const std::vector<StructuralGraph>& private_graphs,
                            const std::vector<InterClientBlock>& blocks,
                            const AssemblyOptions& options) {
  const std::size_t m = private_graphs.size();
  if (m == 0) throw InvalidInputError("global assembly needs at least one client");
  GlobalGraph out;
  Index offset = 0;
  for (const auto& g : private_graphs) {
    out.client_offsets.push_back(offset);
    out.client_sizes.push_back(g.n);
    offset += g.n;
  }
  out.total_n = offset;

  std::map<std::pair<std::size_t, std::size_t>, InterClientBlock> by_pair;
  for (const auto& b : blocks) {
    if (b.client_i >= m || b.client_j >= m || b.client_i == b.client_j) {
      throw InvalidInputError("inter-client block (" + std::to_string(b.client_i) + ", " +
                              std::to_string(b.client_j) + ") does not name two clients");
    }
    if (b.rows() != out.client_sizes[b.client_i] || b.cols() != out.client_sizes[b.client_j]) {
      throw InvalidInputError("inter-client block (" + std::to_string(b.client_i) + ", " +
                              std::to_string(b.client_j) + ") has shape " +
                              std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                              ", expected " + std::to_string(out.client_sizes[b.client_i]) +
                              "x" + std::to_string(out.client_sizes[b.client_j]));
    }
    by_pair.emplace(std::make_pair(b.client_i, b.client_j), b);
  }

  const bool dense = out.total_n <= options.dense_up_to;
  out.raw = StructuralGraph(out.total_n, 0);
  for (std::size_t ci = 0; ci < m; ++ci) {
    const Index base = out.client_offsets[ci];
    const auto& g = private_graphs[ci];
    for (Index r = 0; r < g.n; ++r) {
      auto& row = out.raw.rows[static_cast<std::size_t>(base + r)];
      for (const auto& e : g.rows[static_cast<std::size_t>(r)]) {
        append_sorted(row, static_cast<std::uint32_t>(base + e.col), e.weight);
      }
    }
    for (std::size_t cj = 0; cj < m; ++cj) {
      if (ci == cj) continue;
      InterClientBlock block;
      if (auto it = by_pair.find({ci, cj}); it != by_pair.end()) {
        block = it->second;
      } else if (auto jt = by_pair.find({cj, ci}); jt != by_pair.end()) {
        block = jt->second.transposed();
      } else {
        throw InvalidInputError("missing inter-client block between clients " +
                                std::to_string(ci) + " and " + std::to_string(cj));
      }
      const Index col_base = out.client_offsets[cj];
      // The kept columns depend only on the row's local cluster.
      std::map<int, std::vector<GraphEntry>> per_label;
      for (Index r = 0; r < block.rows(); ++r) {
        const int label = block.assign_i[static_cast<std::size_t>(r)];
        auto found = per_label.find(label);
        if (found == per_label.end()) {
          std::vector<std::pair<double, Index>> cand;
          cand.reserve(static_cast<std::size_t>(block.cols()));
          for (Index n = 0; n < block.cols(); ++n) {
            const double w =
                options.beta * block.kernel(label, block.assign_j[static_cast<std::size_t>(n)]);
            if (w > 0.0) cand.emplace_back(-w, n);
          }
          std::size_t keep = cand.size();
          if (!dense && keep > static_cast<std::size_t>(options.inter_k)) {
            keep = static_cast<std::size_t>(options.inter_k);
            std::partial_sort(cand.begin(), cand.begin() + static_cast<long>(keep), cand.end());
          }
          std::vector<GraphEntry> entries;
          for (std::size_t h = 0; h < keep; ++h) {
            entries.push_back({static_cast<std::uint32_t>(col_base + cand[h].second),
                               -cand[h].first});
          }
          found = per_label.emplace(label, std::move(entries)).first;
        }
        auto& row = out.raw.rows[static_cast<std::size_t>(base + r)];
        row.insert(row.end(), found->second.begin(), found->second.end());
      }
    }
  }
  for (auto& row : out.raw.rows) {
    row = canonical_row(std::move(row));
    out.raw.row_capacity = std::max<Index>(out.raw.row_capacity, static_cast<Index>(row.size()));
  }

  // Symmetrise.
  std::vector<std::vector<GraphEntry>> sym(static_cast<std::size_t>(out.total_n));
  for (Index i = 0; i < out.total_n; ++i) {
    for (const auto& e : out.raw.rows[static_cast<std::size_t>(i)]) {
      sym[static_cast<std::size_t>(i)].push_back({e.col, 0.5 * e.weight});
      sym[e.col].push_back({static_cast<std::uint32_t>(i), 0.5 * e.weight});
    }
  }
  out.symmetric = StructuralGraph(out.total_n, 0);
  out.graph = StructuralGraph(out.total_n, 0);
  for (Index i = 0; i < out.total_n; ++i) {
    auto row = canonical_row(std::move(sym[static_cast<std::size_t>(i)]));
    out.symmetric.row_capacity =
        std::max<Index>(out.symmetric.row_capacity, static_cast<Index>(row.size()));
    double total = 0.0;
    for (const auto& e : row) total += e.weight;
    auto normalized = row;
    for (auto& e : normalized) e.weight /= total;
    out.symmetric.rows[static_cast<std::size_t>(i)] = std::move(row);
    out.graph.rows[static_cast<std::size_t>(i)] = std::move(normalized);
  }
  out.graph.row_capacity = out.symmetric.row_capacity;
  return out;
}

RefineResult refine_global(const GlobalGraph& e_star, int c, const RefineOptions& options) {
  const StructuralGraph& target = e_star.graph;
  const Index n = target.n;
  if (c < 1 || c >= n) {
    throw InvalidInputError("refinement needs 1 <= c < total_n (c=" + std::to_string(c) +
                            ", n=" + std::to_string(n) + ")");
  }
  StructuralGraph s = target;
  SpectralResult spec = c_smallest_eigvecs(graph_laplacian(s), c, options.eigen);
  Matrix f = spec.embedding.matrix;
  Matrix f_prev = f;
  double lambda = options.initial_lambda;

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
    const int comps = connected_components(s).count;
    if (zeros == c && comps == c) {
      best = Snapshot{s, spec, lambda};
      if (change < options.change_tol) {
        stable = true;
        break;
      }
    } else if (std::abs(comps - c) < closest_gap) {
      closest_gap = std::abs(comps - c);
      closest = Snapshot{s, spec, lambda};
    }
    if (zeros < c) {
      lambda *= 2.0;
    } else if (zeros > c) {
      lambda *= 0.5;
      f = f_prev;
    }

    StructuralGraph next(n, 0);
    for (Index i = 0; i < n; ++i) {
      const auto& support = target.rows[static_cast<std::size_t>(i)];
      Vector v(static_cast<Index>(support.size()));
      for (std::size_t h = 0; h < support.size(); ++h) {
        const double df = (f.row(support[h].col) - f.row(i)).squaredNorm();
        v(static_cast<Index>(h)) = support[h].weight - 0.5 * lambda * df;
      }
      const Vector projected = simplex_project(v);
      auto& row = next.rows[static_cast<std::size_t>(i)];
      for (std::size_t h = 0; h < support.size(); ++h) {
        const double w = projected(static_cast<Index>(h));
        if (w > 0.0) row.push_back({support[h].col, w});
      }
      next.row_capacity = std::max<Index>(next.row_capacity, static_cast<Index>(row.size()));
    }
    const double j_before = refine_objective(s, target, f, lambda);
    const double j_mid = refine_objective(next, target, f, lambda);
    const Matrix warm = f;
    spec = c_smallest_eigvecs(graph_laplacian(next), c, options.eigen, &warm);
    f_prev = f;
    f = spec.embedding.matrix;
    const double j_after = refine_objective(next, target, f, lambda);
    trace.push_back({j_before, j_mid, j_after});
    change = frobenius_change(s, next);
    s = std::move(next);
  }
  if (!stable && spec.diagnostics.zero_count == c && connected_components(s).count == c) {
    best = Snapshot{s, spec, lambda};
  }

  Snapshot last{s, spec, lambda};
  const Snapshot* chosen = &last;
  if (best) {
    chosen = &*best;
  } else if (closest && std::abs(connected_components(s).count - c) > closest_gap) {
    chosen = &*closest;
  }
  RefineResult out;
  out.similarity = chosen->graph;
  out.embedding = chosen->spectral.embedding;
  out.diagnostics = chosen->spectral.diagnostics;
  out.diagnostics.lambda = chosen->lambda;
  out.diagnostics.iterations = iterations;
  out.diagnostics.components = connected_components(out.similarity).count;
  out.diagnostics.converged =
      out.diagnostics.components == c && out.diagnostics.zero_count == c;
  out.diagnostics.objective_trace = std::move(trace);
  return out;
}

ClusterAssignment extract_global_clusters(const StructuralGraph& s, const SpectralEmbedding& f,
                                          int c, std::uint64_t seed) {
  if (f.n() != s.n) throw InvalidInputError("embedding and graph sizes differ");
  Components comps = connected_components(s);
  if (comps.count == c) return comps.assignment;
  const KMeansResult km = kmeans(f.matrix, c, seed, 10, 100);
  ClusterAssignment out;
  out.labels = km.labels;
  out.num_clusters = c;
  return out;
}

GlobalPrototypes compute_global_prototypes(const Matrix& vectors,
                                           const ClusterAssignment& assignment) {
  const Index n = vectors.rows();
  if (static_cast<Index>(assignment.labels.size()) != n) {
    throw InvalidInputError("assignment length does not match vector count");
  }
  const int c = assignment.num_clusters;
  std::vector<Index> counts(static_cast<std::size_t>(c), 0);
  for (int label : assignment.labels) {
    if (label < 0 || label >= c) throw InvalidInputError("assignment label out of range");
    ++counts[static_cast<std::size_t>(label)];
  }
  GlobalPrototypes out;
  out.relabel.assign(static_cast<std::size_t>(c), -1);
  int next = 0;
  for (int k = 0; k < c; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      out.warnings.push_back("global cluster " + std::to_string(k) +
                             " is empty; dropped and cluster count reduced");
    } else {
      out.relabel[static_cast<std::size_t>(k)] = next++;
    }
  }
  std::vector<int> compact(assignment.labels.size());
  for (std::size_t i = 0; i < compact.size(); ++i) {
    compact[i] = out.relabel[static_cast<std::size_t>(assignment.labels[i])];
  }
  out.prototypes = gaussians_from_labels(PointSet(vectors), compact, next);
  return out;
}

}  // namespace fedgraph

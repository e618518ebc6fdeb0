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

#include "fedgraph/federation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <utility>

#include "fedgraph/error.hpp"
#include "fedgraph/graph_core.hpp"
#include "fedgraph/kmeans.hpp"
#include "fedgraph/metrics.hpp"
#include "fedgraph/random.hpp"

namespace fedgraph {
namespace {

// Stream tags for derive_seed.
enum : std::uint64_t {
  kTagEmbedder = 1,
  kTagGmm = 2,
  kTagEigen = 3,
  kTagNoise = 4,
  kTagServer = 5,
  kTagBaseline = 6,
  kTagEdgeNoise = 7,
};

template <typename Fn>
void for_each_client(std::size_t count, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t k) {
    try {
      fn(k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) run(k);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < count; k += workers) run(k);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Global prototypes arrive in the release domain; bring them back to the
// client's input coordinates.
PrototypeSet to_input_space(const PrototypeSet& p, const FederationConfig& config) {
  if (config.epsilon <= 0.0) return p;
  PrototypeSet out = p;
  const double s = config.dp_clip_norm;
  for (auto& proto : out.prototypes) {
    proto.mean *= s;
    proto.covariance *= s * s;
  }
  return out;
}

// Hard GMM labels can leave a component empty; give it the sample closest
// to that component's mean among clusters that can spare one.
void fill_empty_clusters(const Matrix& z, const PrototypeSet& fit, std::vector<int>& labels,
                         int c) {
  std::vector<Index> counts(static_cast<std::size_t>(c), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  for (int k = 0; k < c; ++k) {
    if (counts[static_cast<std::size_t>(k)] > 0) continue;
    const Vector& mean = fit.prototypes[static_cast<std::size_t>(k)].mean;
    Index best = -1;
    double best_dist = 0.0;
    for (Index i = 0; i < z.rows(); ++i) {
      if (counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] < 2) continue;
      const double d = (z.row(i).transpose() - mean).squaredNorm();
      if (best < 0 || d < best_dist) {
        best = i;
        best_dist = d;
      }
    }
    if (best < 0) throw DegenerateFitError("not enough samples to populate every cluster");
    --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(best)])];
    labels[static_cast<std::size_t>(best)] = k;
    ++counts[static_cast<std::size_t>(k)];
  }
}

std::vector<int> local_labels(const PointSet& z, const StructuralGraph& graph, int c,
                              std::uint64_t seed) {
  Components comps = connected_components(graph);
  if (comps.count == c) return std::move(comps.assignment.labels);
  if (comps.count > c) return merge_components(z.data(), comps, c);
  GmmFit fit = fit_gmm(z, c, seed);
  std::vector<int> labels = std::move(fit.assignment.labels);
  fill_empty_clusters(z.data(), fit.prototypes, labels, c);
  return labels;
}

double alignment_distance(const std::vector<ClientState>& states,
                          const std::vector<GlobalFeedback>& feedback,
                          const FederationConfig& config) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const PrototypeSet p = to_input_space(feedback[k].global_prototypes, config);
    if (p.size() == 0) continue;
    Matrix means(p.size(), p.dim());
    for (int j = 0; j < p.size(); ++j) {
      means.row(j) = p.prototypes[static_cast<std::size_t>(j)].mean.transpose();
    }
    const Matrix centers = states[k].model ? states[k].model->encode(means) : means;
    const Matrix& z = states[k].latent;
    for (Index i = 0; i < z.rows(); ++i) {
      const int label = feedback[k].assignments[static_cast<std::size_t>(i)];
      total += (z.row(i) - centers.row(label)).norm();
      ++count;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

struct RoundOutcome {
  ServerRoundOutput server;
  std::vector<MessageSizeReport> sizes;
  std::vector<std::uint8_t> result_bytes;
};

// Clients and server only exchange encoded bytes.
RoundOutcome play_round(const std::vector<PointSet>& datasets, const FederationConfig& config,
                        const std::vector<GlobalFeedback>* feedback, std::uint32_t round,
                        std::vector<ClientState>& states) {
  const std::size_t m = datasets.size();
  std::vector<std::vector<std::uint8_t>> wire(m);
  std::vector<MessageSizeReport> sizes(m);
  for_each_client(m, config.threads, [&](std::size_t k) {
    std::optional<GlobalFeedback> received;
    if (feedback != nullptr) received = decode_feedback(encode_message((*feedback)[k]));
    const UploadMessage up = client_round(datasets[k], config, received ? &*received : nullptr,
                                          round, states[k]);
    wire[k] = encode_message(up);
    sizes[k] = message_size_report(up, states[k].neighbors_used);
  });
  std::vector<UploadMessage> uploads;
  uploads.reserve(m);
  for (const auto& bytes : wire) uploads.push_back(decode_upload(bytes));
  RoundOutcome out;
  out.server = server_round(uploads, config);
  out.sizes = std::move(sizes);
  out.result_bytes = encode_global_result(out.server.result, round);
  return out;
}

std::vector<ClientState> fresh_states(std::size_t m) {
  std::vector<ClientState> states(m);
  for (std::size_t k = 0; k < m; ++k) states[k].client_id = static_cast<std::uint32_t>(k);
  return states;
}

void check_datasets(const std::vector<PointSet>& datasets, const FederationConfig& config) {
  if (static_cast<int>(datasets.size()) != config.num_clients) {
    throw ConfigError("config names " + std::to_string(config.num_clients) + " clients but " +
                      std::to_string(datasets.size()) + " datasets were given");
  }
  for (const auto& d : datasets) {
    if (d.dim() != datasets.front().dim()) {
      throw InvalidInputError("client datasets have different feature dimensions");
    }
  }
}

void finish_run(FederationRun& run, RoundOutcome&& outcome, const std::vector<ClientState>& states) {
  run.result = std::move(outcome.server.result);
  run.client_labels.clear();
  for (const auto& fb : outcome.server.feedback) run.client_labels.push_back(fb.assignments);
  run.upload_sizes.insert(run.upload_sizes.end(), outcome.sizes.begin(), outcome.sizes.end());
  run.result_bytes.push_back(std::move(outcome.result_bytes));
  run.noise_draws = 0;
  run.client_graph_converged.clear();
  for (const auto& s : states) {
    run.noise_draws += s.noise_draws;
    run.client_graph_converged.push_back(s.graph_converged);
  }
}

}  // namespace

std::vector<int> merge_components(const Matrix& z, const Components& comps, int c) {
  if (c < 1 || c > comps.count) {
    throw InvalidInputError("cannot merge " + std::to_string(comps.count) +
                            " components into " + std::to_string(c));
  }
  if (static_cast<Index>(comps.assignment.labels.size()) != z.rows()) {
    throw InvalidInputError("component labels do not match the point count");
  }
  const Index n = z.rows();
  const auto m = static_cast<std::size_t>(comps.count);
  const auto& label = comps.assignment.labels;
  Matrix gap = Matrix::Constant(static_cast<Index>(m), static_cast<Index>(m),
                                std::numeric_limits<double>::infinity());
  for (Index i = 0; i < n; ++i) {
    const int a = label[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < n; ++j) {
      const int b = label[static_cast<std::size_t>(j)];
      if (a == b) continue;
      const double d = (z.row(i) - z.row(j)).squaredNorm();
      if (d < gap(a, b)) gap(a, b) = gap(b, a) = d;
    }
  }
  std::vector<std::pair<double, std::pair<int, int>>> pairs;
  for (int a = 0; a < comps.count; ++a) {
    for (int b = a + 1; b < comps.count; ++b) pairs.push_back({gap(a, b), {a, b}});
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<int> parent(m);
  for (std::size_t a = 0; a < m; ++a) parent[a] = static_cast<int>(a);
  auto root = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)];
    return a;
  };
  int remaining = comps.count;
  for (const auto& [d, ab] : pairs) {
    if (remaining == c) break;
    const int ra = root(ab.first);
    const int rb = root(ab.second);
    if (ra == rb) continue;
    parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
    --remaining;
  }
  std::vector<int> relabel(m, -1);
  int next = 0;
  std::vector<int> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(root(label[static_cast<std::size_t>(i)]));
    if (relabel[r] < 0) relabel[r] = next++;
    out[static_cast<std::size_t>(i)] = relabel[r];
  }
  return out;
}

void FederationConfig::validate() const {
  if (num_clients < 1) throw ConfigError("num_clients must be at least 1");
  if (clusters < 1) throw ConfigError("clusters must be at least 1");
  if (neighbors < 0) throw ConfigError("neighbors must be non-negative");
  if (inter_block_k < 1) throw ConfigError("inter_block_k must be at least 1");
  if (!(beta >= 0.0)) throw ConfigError("beta must be non-negative");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (rounds < 1) throw ConfigError("rounds must be at least 1");
  if (!(dp_clip_norm > 0.0)) throw ConfigError("dp_clip_norm must be positive");
  if (!(psd_floor_noise_ratio >= 0.0)) throw ConfigError("psd_floor_noise_ratio must be non-negative");
  if (!(edge_noise_epsilon >= 0.0) || !std::isfinite(edge_noise_epsilon)) {
    throw ConfigError("edge_noise_epsilon must be finite and non-negative");
  }
  if (graph_max_iter < 1 || refine_max_iter < 1) throw ConfigError("iteration caps must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

UploadMessage client_round(const PointSet& data, const FederationConfig& config,
                           const GlobalFeedback* feedback, std::uint32_t round,
                           ClientState& state) {
  const std::uint32_t id = state.client_id;
  try {
    const int c = config.clusters;
    const Index n = data.rows();
    Matrix z;
    if (config.embedder.kind == EmbedderKind::kIdentity) {
      config.embedder.validate(data.dim());
      z = data.data();
    } else {
      EmbedderConfig ec = config.embedder;
      ec.clusters = c;
      ec.seed = derive_seed(config.seed, {kTagEmbedder, id, config.embedder.seed});
      std::optional<PrototypeSet> centres;
      if (feedback != nullptr) centres = to_input_space(feedback->global_prototypes, config);
      LatentSet latent = train_embedder(data, centres ? &*centres : nullptr, ec,
                                        state.model ? &*state.model : nullptr);
      state.model = std::move(latent.model);
      ++state.embedder_updates;
      z = std::move(latent.embeddings);
    }
    state.latent = z;
    const PointSet zp(std::move(z));

    const int k = config.neighbors > 0 ? config.neighbors : default_neighbors(n, c);
    if (k + 1 >= n) {
      throw InvalidInputError("client has " + std::to_string(n) + " samples, too few for " +
                              std::to_string(k) + " neighbours");
    }
    state.neighbors_used = k;
    StructuralGraph graph;
    if (config.learn_private_structure) {
      GraphLearningOptions go;
      go.k = k;
      go.max_iter = config.graph_max_iter;
      go.eigen.seed = derive_seed(config.seed, {kTagEigen, id});
      GraphLearningResult learned = learn_private_graph(zp, c, go);
      state.graph_converged = learned.diagnostics.converged;
      graph = std::move(learned.graph);
    } else {
      graph = knn_graph(zp, k);
      state.graph_converged = false;
    }

    std::vector<int> labels = local_labels(zp, graph, c, derive_seed(config.seed, {kTagGmm, id}));
    const bool private_release = config.epsilon > 0.0;
    const PointSet domain = private_release ? clip_to_l1_ball(data, config.dp_clip_norm) : data;
    PrototypeSet protos = gaussians_from_labels(domain, labels, c);
    protos.client_id = id;
    if (private_release) {
      std::vector<Index> counts(static_cast<std::size_t>(c), 0);
      for (int l : labels) ++counts[static_cast<std::size_t>(l)];
      const Index n_c_min = *std::min_element(counts.begin(), counts.end());
      const SensitivityBounds bounds = compute_sensitivities(n_c_min);
      PrivacyOptions po;
      po.psd_floor = std::max(kCovarianceRidge, config.psd_floor_noise_ratio *
                                                    bounds.delta_sigma / (0.5 * config.epsilon));
      NoiseSource noise(derive_seed(config.seed, {kTagNoise, id, state.embedder_updates}));
      protos = privatize_prototypes(protos, bounds, config.epsilon, noise, po);
      state.noise_draws += noise.draws();
    }

    if (config.edge_noise_epsilon > 0.0) {
      NoiseSource noise(derive_seed(config.seed, {kTagEdgeNoise, id, state.embedder_updates}));
      noise_edge_weights(graph, config.edge_noise_epsilon, noise);
      state.noise_draws += noise.draws();
    }

    UploadMessage msg;
    msg.client_id = id;
    msg.round = round;
    msg.graph = std::move(graph);
    msg.prototypes = std::move(protos);
    msg.local_labels = std::move(labels);
    return msg;
  } catch (const ClientError&) {
    throw;
  } catch (const Error& e) {
    throw ClientError(id, e.what());
  }
}

void noise_edge_weights(StructuralGraph& graph, double epsilon, NoiseSource& noise) {
  if (!(epsilon > 0.0)) throw InvalidInputError("edge noise needs a positive epsilon");
  const double scale = 2.0 / epsilon;
  for (auto& row : graph.rows) {
    if (row.empty()) continue;
    Vector w(static_cast<Index>(row.size()));
    for (std::size_t j = 0; j < row.size(); ++j) {
      w[static_cast<Index>(j)] = row[j].weight + noise.laplace(scale);
    }
    const Vector p = simplex_project(w);
    std::vector<GraphEntry> kept;
    kept.reserve(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (p[static_cast<Index>(j)] > 0.0) kept.push_back({row[j].col, p[static_cast<Index>(j)]});
    }
    row = std::move(kept);
  }
}

ServerRoundOutput server_round(const std::vector<UploadMessage>& uploads,
                               const FederationConfig& config) {
  const std::size_t m = static_cast<std::size_t>(config.num_clients);
  std::vector<const UploadMessage*> by_id(m, nullptr);
  for (const auto& u : uploads) {
    if (u.client_id >= m) {
      throw ProtocolError("upload from unknown client " + std::to_string(u.client_id));
    }
    if (by_id[u.client_id] != nullptr) {
      throw ProtocolError("duplicate upload from client " + std::to_string(u.client_id));
    }
    by_id[u.client_id] = &u;
  }
  std::string missing;
  for (std::size_t k = 0; k < m; ++k) {
    if (by_id[k] == nullptr) missing += (missing.empty() ? "" : ", ") + std::to_string(k);
  }
  if (!missing.empty()) throw ProtocolError("round incomplete: no upload from clients " + missing);

  const std::uint32_t round = by_id[0]->round;
  const Index dim = by_id[0]->prototypes.dim();
  std::vector<StructuralGraph> graphs;
  graphs.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const UploadMessage& u = *by_id[k];
    const std::string who = "client " + std::to_string(k);
    if (u.round != round) {
      throw ProtocolError(who + " uploaded for round " + std::to_string(u.round) + ", expected " +
                          std::to_string(round));
    }
    try {
      u.graph.validate();
    } catch (const InvalidInputError& e) {
      throw ProtocolError(who + " sent an invalid graph: " + e.what());
    }
    if (static_cast<Index>(u.local_labels.size()) != u.graph.n) {
      throw ProtocolError(who + " sent " + std::to_string(u.local_labels.size()) +
                          " labels for " + std::to_string(u.graph.n) + " samples");
    }
    if (u.prototypes.dim() != dim || u.prototypes.size() == 0) {
      throw ProtocolError(who + " sent prototypes of an unexpected dimension");
    }
    graphs.push_back(u.graph);
  }

  std::vector<InterClientBlock> blocks;
  try {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        blocks.push_back(inter_client_block(by_id[i]->prototypes, by_id[i]->local_labels,
                                            by_id[j]->prototypes, by_id[j]->local_labels));
      }
    }
  } catch (const InvalidInputError& e) {
    throw ProtocolError(e.what());
  }
  AssemblyOptions ao;
  ao.beta = config.beta;
  ao.inter_k = config.inter_block_k;
  ao.dense_up_to = config.dense_blocks_up_to;
  const GlobalGraph e_star = assemble_global(graphs, blocks, ao);

  const int c = config.clusters;
  EigenSolverOptions eigen;
  eigen.seed = derive_seed(config.seed, {kTagServer, kTagEigen});
  GlobalResult result;
  if (config.refine_global_structure) {
    RefineOptions ro;
    ro.max_iter = config.refine_max_iter;
    ro.eigen = eigen;
    RefineResult refined = refine_global(e_star, c, ro);
    result.similarity = std::move(refined.similarity);
    result.embedding = std::move(refined.embedding);
    result.diagnostics = std::move(refined.diagnostics);
  } else {
    result.similarity = e_star.graph;
    SpectralResult spec = c_smallest_eigvecs(graph_laplacian(e_star.graph), c, eigen);
    result.embedding = std::move(spec.embedding);
    result.diagnostics = std::move(spec.diagnostics);
    result.diagnostics.components = connected_components(e_star.graph).count;
    result.diagnostics.converged = result.diagnostics.components == c;
  }
  ClusterAssignment assignment = extract_global_clusters(
      result.similarity, result.embedding, c, derive_seed(config.seed, {kTagServer}));

  // Every sample stands in for its cluster's uploaded mean.
  Matrix vectors(e_star.total_n, dim);
  for (std::size_t k = 0; k < m; ++k) {
    const UploadMessage& u = *by_id[k];
    const Index base = e_star.client_offsets[k];
    for (Index i = 0; i < u.graph.n; ++i) {
      const int label = u.local_labels[static_cast<std::size_t>(i)];
      vectors.row(base + i) =
          u.prototypes.prototypes[static_cast<std::size_t>(label)].mean.transpose();
      assignment.provenance.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(i)});
    }
  }
  GlobalPrototypes gp = compute_global_prototypes(vectors, assignment);
  for (auto& label : assignment.labels) label = gp.relabel[static_cast<std::size_t>(label)];
  assignment.num_clusters = gp.prototypes.size();
  result.assignments = std::move(assignment);
  result.global_prototypes = std::move(gp.prototypes);
  result.warnings = std::move(gp.warnings);

  ServerRoundOutput out;
  for (std::size_t k = 0; k < m; ++k) {
    GlobalFeedback fb;
    fb.client_id = static_cast<std::uint32_t>(k);
    fb.round = round;
    const auto first = result.assignments.labels.begin() + e_star.client_offsets[k];
    fb.assignments.assign(first, first + e_star.client_sizes[k]);
    fb.num_clusters = result.assignments.num_clusters;
    fb.global_prototypes = result.global_prototypes;
    out.feedback.push_back(std::move(fb));
  }
  out.result = std::move(result);
  return out;
}

FederationRun run_one_shot(const std::vector<PointSet>& datasets, const FederationConfig& config) {
  config.validate();
  check_datasets(datasets, config);
  FederationConfig one_shot = config;
  one_shot.embedder.kind = EmbedderKind::kIdentity;
  one_shot.embedder.latent_dim = datasets.front().dim();
  std::vector<ClientState> states = fresh_states(datasets.size());
  FederationRun run;
  finish_run(run, play_round(datasets, one_shot, nullptr, 0, states), states);
  return run;
}

FederationRun run_iterative(const std::vector<PointSet>& datasets, const FederationConfig& config,
                            const std::vector<int>* truth) {
  config.validate();
  check_datasets(datasets, config);
  Index total = 0;
  for (const auto& d : datasets) total += d.rows();
  if (truth != nullptr && static_cast<Index>(truth->size()) != total) {
    throw InvalidInputError("truth labels do not cover every sample");
  }
  std::vector<ClientState> states = fresh_states(datasets.size());
  FederationRun run;
  std::vector<GlobalFeedback> feedback;
  for (int t = 0; t <= config.rounds; ++t) {
    RoundOutcome outcome = play_round(datasets, config, t == 0 ? nullptr : &feedback,
                                      static_cast<std::uint32_t>(t), states);
    RoundTrace entry;
    entry.round = static_cast<std::uint32_t>(t);
    entry.components = outcome.server.result.diagnostics.components;
    entry.alignment = alignment_distance(states, outcome.server.feedback, config);
    if (truth != nullptr) {
      const auto& labels = outcome.server.result.assignments.labels;
      entry.acc = hungarian_accuracy(*truth, labels);
      entry.nmi = nmi(*truth, labels);
      entry.ari = ari(*truth, labels);
    }
    run.trace.push_back(entry);
    feedback = outcome.server.feedback;
    finish_run(run, std::move(outcome), states);
  }
  return run;
}

FederationRun baseline_federated_kmeans(const std::vector<PointSet>& datasets,
                                        const FederationConfig& config) {
  config.validate();
  check_datasets(datasets, config);
  const int c = config.clusters;
  const Index d = datasets.front().dim();
  std::vector<Matrix> centroids(datasets.size());
  for_each_client(datasets.size(), config.threads, [&](std::size_t k) {
    const auto seed = derive_seed(config.seed, {kTagBaseline, k});
    centroids[k] = kmeans(datasets[k].data(), c, seed).centers;
  });
  Matrix pooled(static_cast<Index>(datasets.size()) * c, d);
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    pooled.middleRows(static_cast<Index>(k) * c, c) = centroids[k];
  }
  const Matrix global = kmeans(pooled, c, derive_seed(config.seed, {kTagServer, kTagBaseline})).centers;

  FederationRun run;
  ClusterAssignment& a = run.result.assignments;
  a.num_clusters = c;
  std::vector<Index> counts(static_cast<std::size_t>(c), 0);
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    std::vector<int> labels = nearest_center(datasets[k].data(), global);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      a.labels.push_back(labels[i]);
      a.provenance.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(i)});
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    run.client_labels.push_back(std::move(labels));
  }
  PrototypeSet& protos = run.result.global_prototypes;
  protos.form = covariance_form_for(d);
  for (int j = 0; j < c; ++j) {
    Prototype p;
    p.mean = global.row(j).transpose();
    p.covariance = kCovarianceRidge * Matrix::Identity(d, d);
    p.weight = static_cast<double>(counts[static_cast<std::size_t>(j)]) /
               static_cast<double>(a.labels.size());
    protos.prototypes.push_back(std::move(p));
  }
  return run;
}

}  // namespace fedgraph

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

#ifndef FEDGRAPH_FEDERATION_HPP_
#define FEDGRAPH_FEDERATION_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "fedgraph/aggregation.hpp"
#include "fedgraph/embedder.hpp"
#include "fedgraph/graph_core.hpp"
#include "fedgraph/random.hpp"
#include "fedgraph/wire.hpp"

namespace fedgraph {

struct FederationConfig {
  int num_clients = 2;
  int clusters = 2;
  int neighbors = 0;  // k_n; 0 selects default_neighbors per client
  int inter_block_k = 5;
  double beta = 1.0;
  double epsilon = 0.0;  // 0 disables the Laplace mechanism
  int rounds = 1;
  EmbedderConfig embedder;
  std::uint64_t seed = 0;

  // Public L1 radius of the prototype release domain: samples are divided
  // by it and projected into the unit L1 ball before prototypes are noised.
  double dp_clip_norm = 1.0;
  // Eigenvalue floor of a noised covariance, in units of its noise scale.
  double psd_floor_noise_ratio = 1.0;
  // Budget for Laplace noise on the uploaded edge weights; 0 sends them as is.
  double edge_noise_epsilon = 0.0;
  int graph_max_iter = 30;
  int refine_max_iter = 30;
  Index dense_blocks_up_to = 500;
  // Ablation switches: a plain kNN graph replaces the learned private
  // graph, and the assembled graph is clustered without refinement.
  bool learn_private_structure = true;
  bool refine_global_structure = true;
  int threads = 1;

  void validate() const;
};

// Per-client state that survives between rounds. Nothing in here is ever
// sent to the server.
struct ClientState {
  std::uint32_t client_id = 0;
  std::optional<LinearAutoencoder> model;
  std::uint32_t embedder_updates = 0;
  std::uint64_t noise_draws = 0;
  Matrix latent;
  int neighbors_used = 0;
  bool graph_converged = false;
};

// Local cluster labels when the learned graph has more than `c` components:
// components are joined along their closest point pairs until `c` remain.
// Labels are numbered by first appearance.
std::vector<int> merge_components(const Matrix& points, const Components& comps, int c);

// Adds Laplace(2/epsilon) noise to every stored weight and projects each row
// back onto the simplex. Entries projected to zero are dropped.
void noise_edge_weights(StructuralGraph& graph, double epsilon, NoiseSource& noise);

// One client step: embed, learn the private graph, extract and release
// prototypes. `feedback` carries the previous round's global prototypes.
UploadMessage client_round(const PointSet& data, const FederationConfig& config,
                           const GlobalFeedback* feedback, std::uint32_t round,
                           ClientState& state);

struct ServerRoundOutput {
  GlobalResult result;
  std::vector<GlobalFeedback> feedback;  // ordered by client id
};

// Only uploads cross this boundary. Throws ProtocolError when a client is
// missing, duplicated, or on a different round.
ServerRoundOutput server_round(const std::vector<UploadMessage>& uploads,
                               const FederationConfig& config);

struct RoundTrace {
  std::uint32_t round = 0;
  std::optional<double> acc;
  std::optional<double> nmi;
  std::optional<double> ari;
  // Mean latent distance from each sample to its assigned global centre.
  double alignment = 0.0;
  int components = 0;
};

struct FederationRun {
  GlobalResult result;
  std::vector<std::vector<int>> client_labels;  // feedback slices
  std::vector<RoundTrace> trace;
  std::vector<MessageSizeReport> upload_sizes;  // every round, clients in id order
  std::vector<std::vector<std::uint8_t>> result_bytes;  // per round
  std::uint64_t noise_draws = 0;
  std::vector<bool> client_graph_converged;
};

// Single upload/aggregate round with identity embeddings.
FederationRun run_one_shot(const std::vector<PointSet>& datasets, const FederationConfig& config);

// Round 0 bootstraps the embedders and the first global prototypes, then
// `config.rounds` rounds exchange feedback. `truth` (concatenated in client
// order) enables per-round metrics.
FederationRun run_iterative(const std::vector<PointSet>& datasets, const FederationConfig& config,
                            const std::vector<int>* truth = nullptr);

// Each client uploads k-means centroids; the server clusters the pooled
// centroids and every sample takes its nearest global centre.
FederationRun baseline_federated_kmeans(const std::vector<PointSet>& datasets,
                                        const FederationConfig& config);

}  // namespace fedgraph

#endif  // FEDGRAPH_FEDERATION_HPP_

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

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <type_traits>

#include <gtest/gtest.h>

#include "fedgraph/data.hpp"
#include "fedgraph/error.hpp"
#include "fedgraph/federation.hpp"
#include "fedgraph/metrics.hpp"
#include "fedgraph/random.hpp"
#include "test_util.hpp"

namespace fedgraph {
namespace {

// The server sees uploads and configuration only; raw samples cannot reach
// it through this signature.
static_assert(std::is_same_v<decltype(&server_round),
                             ServerRoundOutput (*)(const std::vector<UploadMessage>&,
                                                   const FederationConfig&)>);
static_assert(!std::is_constructible_v<UploadMessage, PointSet>);

struct Split {
  std::vector<PointSet> clients;
  std::vector<int> truth;
};

Split moons_split(Index n, int clients, std::uint64_t seed, double h = 0.0) {
  const LabeledDataset ds = gen_moons(n, 0.06, seed);
  const PartitionPlan plan = partition_clients(ds, clients, h, derive_seed(seed, {99}));
  Split s;
  for (const auto& idx : plan.clients) {
    const LabeledDataset part = ds.subset(idx);
    s.clients.push_back(part.points);
    s.truth.insert(s.truth.end(), part.labels.begin(), part.labels.end());
  }
  return s;
}

FederationConfig base_config(int clients = 2) {
  FederationConfig c;
  c.num_clients = clients;
  c.clusters = 2;
  c.dp_clip_norm = 3.0;
  return c;
}

TEST(Federation, OneShotSeparatesMoonsWithoutNoise) {
  const Split s = moons_split(400, 2, 1);
  const FederationRun run = run_one_shot(s.clients, base_config());
  EXPECT_GE(hungarian_accuracy(s.truth, run.result.assignments.labels), 0.95);
  EXPECT_EQ(run.noise_draws, 0u);
  ASSERT_EQ(run.client_labels.size(), 2u);
  EXPECT_EQ(run.client_labels[0].size(), static_cast<std::size_t>(s.clients[0].rows()));
}

TEST(Federation, ZeroEpsilonDrawsNoNoise) {
  const Split s = moons_split(200, 2, 2);
  FederationConfig cfg = base_config();
  ClientState state;
  client_round(s.clients[0], cfg, nullptr, 0, state);
  EXPECT_EQ(state.noise_draws, 0u);
  cfg.epsilon = 1.0;
  ClientState noisy;
  const UploadMessage up = client_round(s.clients[0], cfg, nullptr, 0, noisy);
  EXPECT_EQ(noisy.noise_draws, 2u * (2u + 4u));
  EXPECT_TRUE(up.prototypes.noised);
}

TEST(Federation, EdgeNoiseKeepsRowsStochastic) {
  const Split s = moons_split(200, 2, 4);
  FederationConfig cfg = base_config();
  ClientState plain_state;
  const UploadMessage plain = client_round(s.clients[0], cfg, nullptr, 0, plain_state);
  cfg.edge_noise_epsilon = 1.0;
  ClientState state;
  const UploadMessage up = client_round(s.clients[0], cfg, nullptr, 0, state);
  EXPECT_EQ(state.noise_draws, plain.graph.nonzeros());
  ASSERT_EQ(up.graph.n, plain.graph.n);
  EXPECT_NO_THROW(up.graph.validate());
  bool changed = false;
  for (std::size_t i = 0; i < up.graph.rows.size(); ++i) {
    const auto& before = plain.graph.rows[i];
    for (const GraphEntry& e : up.graph.rows[i]) {
      const auto it = std::find_if(before.begin(), before.end(),
                                   [&](const GraphEntry& b) { return b.col == e.col; });
      ASSERT_NE(it, before.end()) << "row " << i << " gained column " << e.col;
      changed = changed || it->weight != e.weight;
    }
  }
  EXPECT_TRUE(changed);
}

TEST(Federation, OneRoundWithIdentityEqualsOneShot) {
  const Split s = moons_split(300, 2, 3);
  FederationConfig cfg = base_config();
  cfg.epsilon = 1.0;
  cfg.rounds = 1;
  cfg.embedder.kind = EmbedderKind::kIdentity;
  cfg.embedder.latent_dim = 2;
  const FederationRun a = run_one_shot(s.clients, cfg);
  const FederationRun b = run_iterative(s.clients, cfg);
  ASSERT_EQ(a.result_bytes.size(), 1u);
  ASSERT_EQ(b.result_bytes.size(), 2u);
  // Encoded results carry their round number; compare at a common round.
  EXPECT_EQ(a.result_bytes[0], encode_global_result(b.result, 0));
  EXPECT_EQ(a.result.assignments, b.result.assignments);
}

TEST(Federation, FullRunIsByteDeterministic) {
  const Split s = moons_split(300, 3, 4);
  FederationConfig cfg = base_config(3);
  cfg.epsilon = 1.0;
  cfg.rounds = 2;
  cfg.embedder.kind = EmbedderKind::kLinearDec;
  cfg.embedder.epochs = 30;
  const FederationRun a = run_iterative(s.clients, cfg, &s.truth);
  cfg.threads = 3;
  const FederationRun b = run_iterative(s.clients, cfg, &s.truth);
  ASSERT_EQ(a.result_bytes.size(), 3u);
  EXPECT_EQ(a.result_bytes, b.result_bytes);
  EXPECT_EQ(a.noise_draws, b.noise_draws);
  EXPECT_EQ(a.trace.size(), 3u);
}

TEST(Federation, UploadsRespectSparsityBound) {
  for (int seed = 0; seed < 3; ++seed) {
    const Split s = moons_split(400, 2, 10 + seed);
    FederationConfig cfg = base_config();
    cfg.epsilon = 1.0;
    const FederationRun run = run_one_shot(s.clients, cfg);
    for (const auto& r : run.upload_sizes) EXPECT_TRUE(r.within_bound);
  }
}

TEST(Federation, UploadBytesScaleLinearly) {
  std::vector<std::size_t> bytes;
  for (Index n : {500, 1000}) {
    const LabeledDataset ds = gen_moons(n, 0.06, 5);
    ClientState st;
    const UploadMessage up = client_round(ds.points, base_config(), nullptr, 0, st);
    bytes.push_back(message_size_report(up, st.neighbors_used).bytes);
  }
  EXPECT_LE(static_cast<double>(bytes[1]), 2.2 * static_cast<double>(bytes[0]));
}

TEST(ServerRound, ProtocolViolations) {
  const Split s = moons_split(200, 2, 6);
  const FederationConfig cfg = base_config();
  std::vector<ClientState> st(2);
  st[1].client_id = 1;
  const UploadMessage a = client_round(s.clients[0], cfg, nullptr, 0, st[0]);
  const UploadMessage b = client_round(s.clients[1], cfg, nullptr, 0, st[1]);
  EXPECT_NO_THROW(server_round({a, b}, cfg));
  EXPECT_THROW(server_round({a}, cfg), ProtocolError);
  EXPECT_THROW(server_round({a, a}, cfg), ProtocolError);
  UploadMessage late = b;
  late.round = 4;
  EXPECT_THROW(server_round({a, late}, cfg), ProtocolError);
  UploadMessage stranger = b;
  stranger.client_id = 7;
  EXPECT_THROW(server_round({a, stranger}, cfg), ProtocolError);
  UploadMessage short_labels = b;
  short_labels.local_labels.pop_back();
  EXPECT_THROW(server_round({a, short_labels}, cfg), ProtocolError);
  try {
    server_round({b}, cfg);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("0"), std::string::npos);
  }
}

TEST(ServerRound, FeedbackSlicesCoverEveryClient) {
  const Split s = moons_split(300, 3, 7);
  const FederationConfig cfg = base_config(3);
  std::vector<UploadMessage> ups;
  for (std::uint32_t k = 0; k < 3; ++k) {
    ClientState st;
    st.client_id = k;
    ups.push_back(client_round(s.clients[k], cfg, nullptr, 0, st));
  }
  std::swap(ups[0], ups[2]);  // arrival order does not matter
  const ServerRoundOutput out = server_round(ups, cfg);
  ASSERT_EQ(out.feedback.size(), 3u);
  for (std::uint32_t k = 0; k < 3; ++k) {
    EXPECT_EQ(out.feedback[k].client_id, k);
    EXPECT_EQ(out.feedback[k].assignments.size(), static_cast<std::size_t>(s.clients[k].rows()));
    EXPECT_EQ(out.feedback[k].global_prototypes.size(), out.feedback[k].num_clusters);
  }
}

TEST(ClientRound, ErrorsNameTheClient) {
  Matrix tiny(4, 2);
  tiny << 0, 0, 1, 1, 2, 2, 3, 3;
  ClientState st;
  st.client_id = 5;
  try {
    client_round(PointSet(tiny), base_config(), nullptr, 0, st);
    FAIL();
  } catch (const ClientError& e) {
    EXPECT_EQ(e.client_id(), 5u);
  }
}

TEST(Baseline, KMeansBaselineIsDeterministicAndComplete) {
  const Split s = moons_split(400, 2, 8);
  const FederationRun a = baseline_federated_kmeans(s.clients, base_config());
  const FederationRun b = baseline_federated_kmeans(s.clients, base_config());
  EXPECT_EQ(a.result.assignments, b.result.assignments);
  EXPECT_EQ(a.result.assignments.size(), 400u);
  const double acc = hungarian_accuracy(s.truth, a.result.assignments.labels);
  EXPECT_GT(acc, 0.6);
  EXPECT_LT(acc, 0.95);  // linear boundaries cannot follow the arcs
}

// Naive agglomeration: repeatedly join the groups holding the closest pair of
// points that lie in different groups.
std::vector<int> merge_oracle(const Matrix& z, std::vector<int> group, int count, int c) {
  const auto n = static_cast<std::size_t>(z.rows());
  while (count > c) {
    double best = std::numeric_limits<double>::infinity();
    int keep = -1;
    int drop = -1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (group[i] == group[j]) continue;
        const double d = (z.row(static_cast<Index>(i)) - z.row(static_cast<Index>(j))).norm();
        if (d < best) {
          best = d;
          keep = group[i];
          drop = group[j];
        }
      }
    }
    for (auto& g : group) {
      if (g == drop) g = keep;
    }
    --count;
  }
  std::map<int, int> renumber;
  for (auto& g : group) {
    auto [it, fresh] = renumber.try_emplace(g, static_cast<int>(renumber.size()));
    g = it->second;
  }
  return group;
}

TEST(MergeComponents, MatchesNaiveAgglomeration) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = std::uniform_int_distribution<int>(2, 8)(rng);
    const Index n = std::uniform_int_distribution<Index>(m, 40)(rng);
    const int c = std::uniform_int_distribution<int>(1, m)(rng);
    const Matrix z = testing::random_matrix(rng, n, 3);
    Components comps;
    comps.count = m;
    comps.assignment.num_clusters = m;
    for (Index i = 0; i < n; ++i) {
      comps.assignment.labels.push_back(
          i < m ? static_cast<int>(i) : std::uniform_int_distribution<int>(0, m - 1)(rng));
    }
    std::shuffle(comps.assignment.labels.begin(), comps.assignment.labels.end(), rng);
    const std::vector<int> got = merge_components(z, comps, c);
    EXPECT_EQ(got, merge_oracle(z, comps.assignment.labels, m, c)) << "trial " << trial;
    EXPECT_EQ(*std::max_element(got.begin(), got.end()), c - 1);
  }
}

TEST(MergeComponents, RejectsBadTargets) {
  Components comps;
  comps.count = 2;
  comps.assignment.labels = {0, 1, 1};
  const Matrix z = Matrix::Zero(3, 2);
  EXPECT_THROW(merge_components(z, comps, 3), InvalidInputError);
  EXPECT_THROW(merge_components(z, comps, 0), InvalidInputError);
  EXPECT_THROW(merge_components(Matrix::Zero(2, 2), comps, 1), InvalidInputError);
}

TEST(FederationConfig, Validation) {
  FederationConfig c;
  c.epsilon = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = FederationConfig{};
  c.num_clients = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = FederationConfig{};
  c.edge_noise_epsilon = -0.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = FederationConfig{};
  c.dp_clip_norm = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  const Split s = moons_split(100, 2, 9);
  c = base_config(3);
  EXPECT_THROW(run_one_shot(s.clients, c), ConfigError);
}

}  // namespace
}  // namespace fedgraph

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

#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <gtest/gtest.h>

#include "fedgraph/aggregation.hpp"
#include "fedgraph/error.hpp"
#include "test_util.hpp"

namespace fedgraph {
namespace {

using testing::random_graph;
using testing::random_prototypes;
using testing::random_spd;

// Closed form through an explicit inverse and LU determinants.
double kl_oracle(const Prototype& p, const Prototype& q) {
  const Index d = p.mean.size();
  const Matrix qi = q.covariance.inverse();
  const Vector diff = q.mean - p.mean;
  return 0.5 * ((qi * p.covariance).trace() + diff.dot(qi * diff) - static_cast<double>(d) +
                std::log(q.covariance.determinant() / p.covariance.determinant()));
}

TEST(GaussianKl, MatchesClosedFormOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 1 + static_cast<Index>(rng() % 6);
    const auto form = trial % 2 == 0 ? CovarianceForm::kFull : CovarianceForm::kDiagonal;
    const PrototypeSet s = random_prototypes(rng, 2, d, form);
    const auto& p = s.prototypes[0];
    const auto& q = s.prototypes[1];
    EXPECT_NEAR(gaussian_kl(p, q), kl_oracle(p, q), 1e-9 * std::max(1.0, kl_oracle(p, q)));
    EXPECT_NEAR(gaussian_kl(p, p), 0.0, 1e-12);
    EXPECT_NEAR(symmetric_kl(p, q), symmetric_kl(q, p), 1e-12);
  }
}

TEST(GaussianKl, MatchesMonteCarloIn2D) {
  std::mt19937_64 rng(2);
  Prototype p, q;
  p.mean = Vector::Zero(2);
  q.mean = Vector::Ones(2) * 0.5;
  p.covariance = random_spd(rng, 2, 0.3);
  q.covariance = random_spd(rng, 2, 0.3);
  const Eigen::LLT<Matrix> lp(p.covariance);
  const Matrix pi = p.covariance.inverse(), qi = q.covariance.inverse();
  std::normal_distribution<double> normal;
  double sum = 0.0;
  const int draws = 400000;
  for (int t = 0; t < draws; ++t) {
    Vector z(2);
    z << normal(rng), normal(rng);
    const Vector x = p.mean + lp.matrixL() * z;
    const Vector dp = x - p.mean, dq = x - q.mean;
    sum += 0.5 * (dq.dot(qi * dq) - dp.dot(pi * dp)) +
           0.5 * std::log(q.covariance.determinant() / p.covariance.determinant());
  }
  EXPECT_NEAR(gaussian_kl(p, q), sum / draws, 0.02);
}

TEST(GaussianKl, SingularCovarianceNamesThePrototype) {
  Prototype p, q;
  p.mean = q.mean = Vector::Zero(2);
  p.covariance = Matrix::Identity(2, 2);
  q.covariance = Matrix::Zero(2, 2);
  q.covariance(0, 1) = q.covariance(1, 0) = 1.0;
  try {
    gaussian_kl(p, q, "client 3 cluster 1");
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("client 3 cluster 1"), std::string::npos);
  }
}

TEST(ClusterKernel, ValuesInUnitIntervalAndSymmetricUnderSwap) {
  std::mt19937_64 rng(3);
  const PrototypeSet a = random_prototypes(rng, 3, 2, CovarianceForm::kFull);
  const PrototypeSet b = random_prototypes(rng, 4, 2, CovarianceForm::kFull);
  const Matrix k = cluster_kernel(a, b);
  const Matrix kt = cluster_kernel(b, a);
  EXPECT_LT((k - kt.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT(k.minCoeff(), 0.0);
  EXPECT_LE(k.maxCoeff(), 1.0);
  EXPECT_NEAR(cluster_kernel(a, a).diagonal().minCoeff(), 1.0, 1e-12);
}

TEST(InterClientBlock, DenseExpandsLabels) {
  std::mt19937_64 rng(4);
  const PrototypeSet a = random_prototypes(rng, 2, 2, CovarianceForm::kFull);
  const PrototypeSet b = random_prototypes(rng, 3, 2, CovarianceForm::kFull);
  const std::vector<int> la{0, 1, 1}, lb{2, 0};
  const InterClientBlock blk = inter_client_block(a, la, b, lb);
  const Matrix d = blk.dense();
  const Matrix k = cluster_kernel(a, b);
  for (int m = 0; m < 3; ++m) {
    for (int n = 0; n < 2; ++n) EXPECT_DOUBLE_EQ(d(m, n), k(la[m], lb[n]));
  }
  EXPECT_LT((blk.transposed().dense() - d.transpose()).cwiseAbs().maxCoeff(), 0.0 + 1e-15);
  const std::vector<int> bad{0, 7};
  EXPECT_THROW(inter_client_block(a, la, b, bad), InvalidInputError);
}

struct Fixture {
  std::vector<StructuralGraph> graphs;
  std::vector<InterClientBlock> blocks;
};

Fixture random_federation(std::mt19937_64& rng, const std::vector<Index>& sizes, Index cap) {
  Fixture f;
  std::vector<PrototypeSet> protos;
  std::vector<std::vector<int>> labels;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    f.graphs.push_back(random_graph(rng, sizes[k], cap));
    protos.push_back(random_prototypes(rng, 2, 2, CovarianceForm::kFull));
    protos.back().client_id = static_cast<std::uint32_t>(k);
    std::vector<int> l;
    for (Index i = 0; i < sizes[k]; ++i) l.push_back(static_cast<int>(rng() % 2));
    labels.push_back(l);
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    for (std::size_t j = i + 1; j < sizes.size(); ++j) {
      InterClientBlock b = inter_client_block(protos[i], labels[i], protos[j], labels[j]);
      b.client_i = static_cast<std::uint32_t>(i);
      b.client_j = static_cast<std::uint32_t>(j);
      // Mix orientations; the assembler must accept either.
      f.blocks.push_back((i + j) % 2 == 0 ? b : b.transposed());
    }
  }
  return f;
}

TEST(AssembleGlobal, StochasticSymmetricAndWithinSparsityBudget) {
  std::mt19937_64 rng(5);
  const std::vector<Index> sizes{300, 250, 200};
  const Fixture f = random_federation(rng, sizes, 6);
  AssemblyOptions o;
  const GlobalGraph g = assemble_global(f.graphs, f.blocks, o);
  EXPECT_EQ(g.total_n, 750);
  g.graph.validate();
  const Matrix s = g.symmetric.dense();
  EXPECT_LT((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  std::size_t budget = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    budget += f.graphs[k].nonzeros() + static_cast<std::size_t>(sizes[k]) * (sizes.size() - 1) *
                                           static_cast<std::size_t>(o.inter_k);
  }
  EXPECT_LE(g.raw.nonzeros(), budget);
  // Private blocks sit on the diagonal untouched in the raw matrix.
  const auto loc = g.block(1, 1);
  const Matrix raw = g.raw.dense();
  EXPECT_LT((raw.block(loc.row, loc.col, loc.rows, loc.cols) - f.graphs[1].dense())
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
}

TEST(AssembleGlobal, DenseBlocksWhenSmall) {
  std::mt19937_64 rng(6);
  const Fixture f = random_federation(rng, {20, 15}, 3);
  AssemblyOptions o;
  o.beta = 0.5;
  const GlobalGraph g = assemble_global(f.graphs, f.blocks, o);
  const auto loc = g.block(0, 1);
  const Matrix raw = g.raw.dense();
  const InterClientBlock b = f.blocks[0].client_i == 0 ? f.blocks[0] : f.blocks[0].transposed();
  EXPECT_LT((raw.block(loc.row, loc.col, loc.rows, loc.cols) - 0.5 * b.dense())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(AssembleGlobal, MissingBlockIsAnError) {
  std::mt19937_64 rng(7);
  Fixture f = random_federation(rng, {10, 10, 10}, 3);
  f.blocks.pop_back();
  EXPECT_THROW(assemble_global(f.graphs, f.blocks), InvalidInputError);
}

TEST(RefineGlobal, ObjectiveNonIncreasingAndRankReached) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    const Fixture f = random_federation(rng, {120, 90}, 5);
    const GlobalGraph g = assemble_global(f.graphs, f.blocks);
    const RefineResult r = refine_global(g, 2);
    ASSERT_FALSE(r.diagnostics.objective_trace.empty());
    for (const auto& t : r.diagnostics.objective_trace) {
      const double scale = std::max(1.0, std::abs(t[0]));
      EXPECT_LE(t[1], t[0] + 1e-8 * scale);
      EXPECT_LE(t[2], t[1] + 1e-8 * scale);
    }
    r.similarity.validate(1e-8);
    if (r.diagnostics.converged) {
      EXPECT_EQ(r.diagnostics.zero_count, r.diagnostics.components);
      EXPECT_EQ(testing::union_find_components(r.similarity), 2);
    }
    // S stays on the support of E*.
    for (Index i = 0; i < g.total_n; ++i) {
      const auto& support = g.graph.rows[static_cast<std::size_t>(i)];
      for (const auto& e : r.similarity.rows[static_cast<std::size_t>(i)]) {
        EXPECT_TRUE(std::any_of(support.begin(), support.end(),
                                [&](const GraphEntry& x) { return x.col == e.col; }));
      }
    }
  }
}

TEST(ExtractGlobalClusters, UsesComponentsWhenCountMatches) {
  StructuralGraph s(4, 1);
  s.rows[0] = {{1, 1.0}};
  s.rows[1] = {{0, 1.0}};
  s.rows[2] = {{3, 1.0}};
  s.rows[3] = {{2, 1.0}};
  SpectralEmbedding f;
  f.matrix = Matrix::Zero(4, 2);
  const ClusterAssignment a = extract_global_clusters(s, f, 2, 1);
  EXPECT_EQ(a.labels, (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(a.num_clusters, 2);
}

TEST(GlobalPrototypes, EmptyClustersDroppedAndCompacted) {
  Matrix v(4, 1);
  v << 0.0, 1.0, 10.0, 12.0;
  ClusterAssignment a;
  a.labels = {0, 0, 2, 2};
  a.num_clusters = 3;
  const GlobalPrototypes g = compute_global_prototypes(v, a);
  ASSERT_EQ(g.prototypes.size(), 2);
  EXPECT_EQ(g.relabel[0], 0);
  EXPECT_EQ(g.relabel[2], 1);
  EXPECT_NEAR(g.prototypes.prototypes[1].mean(0), 11.0, 1e-12);
  EXPECT_NEAR(g.prototypes.prototypes[1].covariance(0, 0), 1.0, 1e-5);
  EXPECT_FALSE(g.warnings.empty());
}

}  // namespace
}  // namespace fedgraph

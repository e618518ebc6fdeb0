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
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "fedgraph/embedder.hpp"
#include "fedgraph/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace fedgraph {
namespace {

using testing::gradient_error;
using testing::random_matrix;

TEST(EmbedderGradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(1);
  for (int instance = 0; instance < 5; ++instance) {
    const Index d = 2 + static_cast<Index>(rng() % 7);   // <= 8
    const Index n = 5 + static_cast<Index>(rng() % 16);  // <= 20
    const Index latent = 1 + static_cast<Index>(rng() % 3);
    const int c = 2 + static_cast<int>(rng() % 2);
    const Matrix x = random_matrix(rng, n, d);
    const LinearAutoencoder model = LinearAutoencoder::random(d, latent, rng());

    EXPECT_LT(gradient_error(model, x, nullptr, 0.0), 1e-4);

    DecTerm input;
    input.input_centers = random_matrix(rng, c, d);
    input.target = dec_target_dist(
        dec_soft_assign_rows(model.encode(x), model.encode(*input.input_centers)));
    EXPECT_LT(gradient_error(model, x, &input, 0.7), 1e-4);

    DecTerm latent_term;
    latent_term.latent_centers = random_matrix(rng, c, latent);
    latent_term.target =
        dec_target_dist(dec_soft_assign_rows(model.encode(x), *latent_term.latent_centers));
    EXPECT_LT(gradient_error(model, x, &latent_term, 0.7), 1e-4);
  }
}

TEST(DecSoftAssign, RowsAreDistributionsMatchingStudentT) {
  std::mt19937_64 rng(2);
  const Matrix z = random_matrix(rng, 10, 2);
  const Matrix mu = random_matrix(rng, 3, 2);
  const Matrix q = dec_soft_assign_rows(z, mu);
  for (Index i = 0; i < 10; ++i) {
    EXPECT_NEAR(q.row(i).sum(), 1.0, 1e-12);
    Vector raw(3);
    for (Index j = 0; j < 3; ++j) raw(j) = 1.0 / (1.0 + (z.row(i) - mu.row(j)).squaredNorm());
    EXPECT_LT((q.row(i).transpose() - raw / raw.sum()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((dec_soft_assign(z.row(i).transpose(), mu) - q.row(i).transpose())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-15);
  }
  const Matrix p = dec_target_dist(q);
  for (Index i = 0; i < 10; ++i) EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-12);
}

TEST(TrainEmbedder, IdentityReturnsInput) {
  std::mt19937_64 rng(3);
  const PointSet x(random_matrix(rng, 12, 3));
  EmbedderConfig cfg;
  cfg.latent_dim = 3;
  const LatentSet out = train_embedder(x, nullptr, cfg);
  EXPECT_EQ(out.embeddings, x.data());
  EXPECT_FALSE(out.model.has_value());
  cfg.latent_dim = 2;
  EXPECT_THROW(train_embedder(x, nullptr, cfg), ConfigError);
}

TEST(TrainEmbedder, LossDecreasesAndIsDeterministic) {
  std::mt19937_64 rng(4);
  const PointSet x = testing::blobs(rng, 2, 30, 5, 0.3);
  EmbedderConfig cfg;
  cfg.kind = EmbedderKind::kLinearDec;
  cfg.latent_dim = 2;
  cfg.epochs = 100;
  cfg.seed = 9;
  const LatentSet a = train_embedder(x, nullptr, cfg);
  const LatentSet b = train_embedder(x, nullptr, cfg);
  EXPECT_EQ(a.embeddings, b.embeddings);
  ASSERT_EQ(a.loss_trace.size(), 101u);
  EXPECT_LT(a.loss_trace.back(), a.loss_trace.front());
  ASSERT_TRUE(a.model.has_value());
  EXPECT_EQ(a.model->latent_dim(), 2);
}

TEST(TrainEmbedder, GlobalPrototypesMustMatchInputWidth) {
  std::mt19937_64 rng(5);
  const PointSet x(random_matrix(rng, 12, 3));
  EmbedderConfig cfg;
  cfg.kind = EmbedderKind::kLinearDec;
  const PrototypeSet wrong = testing::random_prototypes(rng, 2, 4, CovarianceForm::kFull);
  EXPECT_THROW(train_embedder(x, &wrong, cfg), InvalidInputError);
}

TEST(TrainEmbedder, DivergenceHalvesStepThenFails) {
  std::mt19937_64 rng(6);
  const PointSet x(random_matrix(rng, 20, 4, 50.0));
  EmbedderConfig cfg;
  cfg.kind = EmbedderKind::kLinearDec;
  cfg.step_size = 1e6;
  cfg.epochs = 50;
  EXPECT_THROW(train_embedder(x, nullptr, cfg), NumericError);
}

TEST(EmbedderConfig, Validation) {
  EmbedderConfig cfg;
  cfg.kind = EmbedderKind::kLinearDec;
  cfg.latent_dim = 0;
  EXPECT_THROW(cfg.validate(3), ConfigError);
  cfg.latent_dim = 2;
  cfg.lambda_dec = -1;
  EXPECT_THROW(cfg.validate(3), ConfigError);
  EXPECT_EQ(embedder_kind_from_string(to_string(EmbedderKind::kLinearDec)),
            EmbedderKind::kLinearDec);
  EXPECT_THROW(embedder_kind_from_string("mlp"), ConfigError);
}

}  // namespace
}  // namespace fedgraph

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

#ifndef FEDGRAPH_EMBEDDER_HPP_
#define FEDGRAPH_EMBEDDER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedgraph/prototypes.hpp"
#include "fedgraph/types.hpp"

namespace fedgraph {

enum class EmbedderKind : std::uint8_t { kIdentity = 0, kLinearDec = 1 };

std::string to_string(EmbedderKind kind);
EmbedderKind embedder_kind_from_string(const std::string& name);

struct EmbedderConfig {
  EmbedderKind kind = EmbedderKind::kIdentity;
  Index latent_dim = 2;
  double lambda_dec = 0.1;
  int epochs = 200;
  double step_size = 1e-2;
  std::uint64_t seed = 0;
  // Centre count for k-means when no global prototypes exist yet.
  int clusters = 2;

  // Throws ConfigError; identity embedders must keep the input width.
  void validate(Index input_dim) const;
};

// z = W x + b_enc, x_hat = W' z + b_dec.
struct LinearAutoencoder {
  Matrix encoder;      // latent x d
  Vector encoder_bias;  // latent
  Matrix decoder;      // d x latent
  Vector decoder_bias;  // d

  Index input_dim() const { return encoder.cols(); }
  Index latent_dim() const { return encoder.rows(); }
  Matrix encode(const Matrix& x) const;  // rows are samples
  Matrix decode(const Matrix& z) const;

  static LinearAutoencoder random(Index input_dim, Index latent_dim, std::uint64_t seed);
};

// Student-t kernel with one degree of freedom, normalised over centres.
// `centers` holds one centre per row.
Vector dec_soft_assign(const Vector& z, const Matrix& centers);
Matrix dec_soft_assign_rows(const Matrix& z, const Matrix& centers);

// Sharpened target p_ij proportional to q_ij^2 / f_j with f_j = sum_i q_ij.
// Columns with zero frequency contribute nothing.
Matrix dec_target_dist(const Matrix& q);

// Clustering term of the training loss. The target distribution is held
// fixed while the model moves.
struct DecTerm {
  Matrix target;  // N x c
  // Exactly one of the two centre sources is used: input-space means pushed
  // through the current encoder, or fixed latent centres.
  std::optional<Matrix> input_centers;  // c x d
  std::optional<Matrix> latent_centers;  // c x latent
};

struct LossGradient {
  double loss = 0.0;
  double reconstruction = 0.0;
  double clustering = 0.0;
  LinearAutoencoder gradient;
};

// Loss = ||X - X_hat||_F^2 / N + lambda_dec * KL(P || Q) / N and its exact
// gradient with respect to every parameter.
LossGradient embedder_loss(const LinearAutoencoder& model, const Matrix& x,
                           const DecTerm* dec, double lambda_dec);

struct LatentSet {
  Matrix embeddings;  // N x latent
  EmbedderConfig config;
  std::optional<LinearAutoencoder> model;  // absent for the identity kind
  std::vector<double> loss_trace;  // loss before each epoch, then final
  int step_halvings = 0;
};

// Identity: returns the data unchanged. Linear: gradient descent from
// `initial` (or a seeded random model) against global prototypes, or
// against k-means centres of the starting embedding when none are given.
LatentSet train_embedder(const PointSet& data, const PrototypeSet* global_protos,
                         const EmbedderConfig& config,
                         const LinearAutoencoder* initial = nullptr);

}  // namespace fedgraph

#endif  // FEDGRAPH_EMBEDDER_HPP_

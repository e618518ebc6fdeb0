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

#include "fedgraph/embedder.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "fedgraph/error.hpp"
#include "fedgraph/kmeans.hpp"

namespace fedgraph {
namespace {

constexpr int kMaxStepHalvings = 3;

bool finite(const LinearAutoencoder& m) {
  return m.encoder.allFinite() && m.encoder_bias.allFinite() && m.decoder.allFinite() &&
         m.decoder_bias.allFinite();
}

void descend(LinearAutoencoder& m, const LinearAutoencoder& g, double step) {
  m.encoder -= step * g.encoder;
  m.encoder_bias -= step * g.encoder_bias;
  m.decoder -= step * g.decoder;
  m.decoder_bias -= step * g.decoder_bias;
}

Matrix centers_for(const LinearAutoencoder& model, const DecTerm& dec) {
  if (dec.input_centers) return model.encode(*dec.input_centers);
  return *dec.latent_centers;
}

}  // namespace

std::string to_string(EmbedderKind kind) {
  return kind == EmbedderKind::kIdentity ? "identity" : "linear_dec";
}

EmbedderKind embedder_kind_from_string(const std::string& name) {
  if (name == "identity") return EmbedderKind::kIdentity;
  if (name == "linear_dec") return EmbedderKind::kLinearDec;
  throw ConfigError("unknown embedder kind '" + name + "'");
}

void EmbedderConfig::validate(Index input_dim) const {
  if (latent_dim < 1) throw ConfigError("embedder latent_dim must be at least 1");
  if (!(lambda_dec >= 0.0)) throw ConfigError("embedder lambda_dec must be non-negative");
  if (!(step_size > 0.0)) throw ConfigError("embedder step_size must be positive");
  if (epochs < 0) throw ConfigError("embedder epochs must be non-negative");
  if (clusters < 1) throw ConfigError("embedder clusters must be at least 1");
  if (kind == EmbedderKind::kIdentity && latent_dim != input_dim) {
    throw ConfigError("identity embedder needs latent_dim (" + std::to_string(latent_dim) +
                      ") equal to the input dimension (" + std::to_string(input_dim) + ")");
  }
}

Matrix LinearAutoencoder::encode(const Matrix& x) const {
  return (x * encoder.transpose()).rowwise() + encoder_bias.transpose();
}

Matrix LinearAutoencoder::decode(const Matrix& z) const {
  return (z * decoder.transpose()).rowwise() + decoder_bias.transpose();
}

LinearAutoencoder LinearAutoencoder::random(Index input_dim, Index latent_dim,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LinearAutoencoder m;
  m.encoder.resize(latent_dim, input_dim);
  m.decoder.resize(input_dim, latent_dim);
  const double enc_scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double dec_scale = 1.0 / std::sqrt(static_cast<double>(latent_dim));
  for (Index i = 0; i < m.encoder.size(); ++i) m.encoder.data()[i] = enc_scale * normal(rng);
  for (Index i = 0; i < m.decoder.size(); ++i) m.decoder.data()[i] = dec_scale * normal(rng);
  m.encoder_bias = Vector::Zero(latent_dim);
  m.decoder_bias = Vector::Zero(input_dim);
  return m;
}

Vector dec_soft_assign(const Vector& z, const Matrix& centers) {
  if (centers.rows() < 1) throw InvalidInputError("soft assignment needs at least one centre");
  if (centers.cols() != z.size()) {
    throw InvalidInputError("soft assignment centre width does not match the embedding");
  }
  Vector q(centers.rows());
  for (Index j = 0; j < centers.rows(); ++j) {
    q(j) = 1.0 / (1.0 + (centers.row(j).transpose() - z).squaredNorm());
  }
  return q / q.sum();
}

Matrix dec_soft_assign_rows(const Matrix& z, const Matrix& centers) {
  Matrix q(z.rows(), centers.rows());
  for (Index i = 0; i < z.rows(); ++i) {
    q.row(i) = dec_soft_assign(z.row(i).transpose(), centers).transpose();
  }
  return q;
}

Matrix dec_target_dist(const Matrix& q) {
  const Vector freq = q.colwise().sum().transpose();
  Matrix p = Matrix::Zero(q.rows(), q.cols());
  for (Index i = 0; i < q.rows(); ++i) {
    for (Index j = 0; j < q.cols(); ++j) {
      if (freq(j) > 0.0) p(i, j) = q(i, j) * q(i, j) / freq(j);
    }
    const double total = p.row(i).sum();
    if (total > 0.0) p.row(i) /= total;
  }
  return p;
}

LossGradient embedder_loss(const LinearAutoencoder& model, const Matrix& x,
                           const DecTerm* dec, double lambda_dec) {
  const Index n = x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Matrix z = model.encode(x);
  const Matrix residual = model.decode(z) - x;

  LossGradient out;
  out.reconstruction = residual.squaredNorm() * inv_n;
  const Matrix d_xhat = 2.0 * inv_n * residual;
  out.gradient.decoder = d_xhat.transpose() * z;
  out.gradient.decoder_bias = d_xhat.colwise().sum().transpose();
  Matrix d_z = d_xhat * model.decoder;
  out.gradient.encoder_bias = Vector::Zero(model.latent_dim());

  if (dec != nullptr && lambda_dec > 0.0) {
    const Matrix centers = centers_for(model, *dec);
    const Index c = centers.rows();
    if (dec->target.rows() != n || dec->target.cols() != c) {
      throw InvalidInputError("clustering target shape does not match data and centres");
    }
    Matrix d_centers = Matrix::Zero(c, centers.cols());
    double kl = 0.0;
    const double weight = lambda_dec * inv_n;
    for (Index i = 0; i < n; ++i) {
      Vector kernel(c);
      for (Index j = 0; j < c; ++j) {
        kernel(j) = 1.0 / (1.0 + (z.row(i) - centers.row(j)).squaredNorm());
      }
      const Vector q = kernel / kernel.sum();
      for (Index j = 0; j < c; ++j) {
        const double p = dec->target(i, j);
        if (p > 0.0) kl += p * std::log(p / q(j));
        const double coeff = 2.0 * weight * (p - q(j)) * kernel(j);
        const auto diff = z.row(i) - centers.row(j);
        d_z.row(i) += coeff * diff;
        d_centers.row(j) -= coeff * diff;
      }
    }
    out.clustering = kl * inv_n;
    if (dec->input_centers) {
      out.gradient.encoder = d_centers.transpose() * (*dec->input_centers);
      out.gradient.encoder_bias = d_centers.colwise().sum().transpose();
    }
  }
  out.loss = out.reconstruction + lambda_dec * out.clustering;

  const Matrix enc_grad = d_z.transpose() * x;
  if (out.gradient.encoder.size() == 0) {
    out.gradient.encoder = enc_grad;
  } else {
    out.gradient.encoder += enc_grad;
  }
  out.gradient.encoder_bias += d_z.colwise().sum().transpose();
  return out;
}

LatentSet train_embedder(const PointSet& data, const PrototypeSet* global_protos,
                         const EmbedderConfig& config, const LinearAutoencoder* initial) {
  const Matrix& x = data.data();
  config.validate(x.cols());
  LatentSet out;
  out.config = config;
  if (config.kind == EmbedderKind::kIdentity) {
    out.embeddings = x;
    return out;
  }

  LinearAutoencoder start;
  if (initial != nullptr) {
    if (initial->input_dim() != x.cols() || initial->latent_dim() != config.latent_dim) {
      throw InvalidInputError("initial embedder shape does not match data and config");
    }
    start = *initial;
  } else {
    start = LinearAutoencoder::random(x.cols(), config.latent_dim, config.seed);
  }

  DecTerm dec;
  const Matrix z0 = start.encode(x);
  if (global_protos != nullptr && global_protos->size() > 0) {
    if (global_protos->dim() != x.cols()) {
      throw InvalidInputError("global prototypes live in a " +
                              std::to_string(global_protos->dim()) +
                              "-dimensional space, data has " + std::to_string(x.cols()));
    }
    Matrix means(global_protos->size(), x.cols());
    for (int j = 0; j < global_protos->size(); ++j) {
      means.row(j) = global_protos->prototypes[static_cast<std::size_t>(j)].mean.transpose();
    }
    dec.input_centers = std::move(means);
  } else {
    const int k = std::min<int>(config.clusters, static_cast<int>(x.rows()));
    dec.latent_centers = kmeans(z0, k, config.seed, 10, 100).centers;
  }
  dec.target = dec_target_dist(dec_soft_assign_rows(z0, centers_for(start, dec)));

  double step = config.step_size;
  for (int attempt = 0;; ++attempt) {
    LinearAutoencoder model = start;
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(config.epochs) + 1);
    bool diverged = false;
    for (int epoch = 0; epoch <= config.epochs; ++epoch) {
      LossGradient lg = embedder_loss(model, x, &dec, config.lambda_dec);
      trace.push_back(lg.loss);
      if (!std::isfinite(lg.loss)) {
        diverged = true;
        break;
      }
      if (epoch == config.epochs) break;
      descend(model, lg.gradient, step);
      if (!finite(model)) {
        diverged = true;
        break;
      }
    }
    if (!diverged) {
      out.embeddings = model.encode(x);
      out.model = std::move(model);
      out.loss_trace = std::move(trace);
      out.step_halvings = attempt;
      return out;
    }
    if (attempt == kMaxStepHalvings) {
      throw NumericError("embedder training diverged after " +
                         std::to_string(kMaxStepHalvings) + " step-size halvings (last step " +
                         std::to_string(step) + ")");
    }
    step *= 0.5;
  }
}

}  // namespace fedgraph

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

#include "fedgraph/prototypes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "fedgraph/error.hpp"
#include "fedgraph/kmeans.hpp"
#include "fedgraph/random.hpp"

namespace fedgraph {
namespace {

// log N(x | mu, Sigma) - ridge/2 tr(Sigma^-1), for full or diagonal Sigma.
class PenalizedDensity {
 public:
  PenalizedDensity(const Prototype& p, CovarianceForm form) : mean_(p.mean), form_(form) {
    const Index d = p.mean.size();
    double log_det = 0.0;
    double trace_inv = 0.0;
    if (form == CovarianceForm::kDiagonal) {
      inv_var_ = p.covariance.diagonal().cwiseInverse();
      log_det = p.covariance.diagonal().array().log().sum();
      trace_inv = inv_var_.sum();
    } else {
      llt_.compute(p.covariance);
      if (llt_.info() != Eigen::Success) {
        throw NumericError("covariance is not positive definite");
      }
      log_det = 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
      Matrix inv_l = llt_.matrixL().solve(Matrix::Identity(d, d));
      trace_inv = inv_l.squaredNorm();
    }
    constant_ = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det) -
                0.5 * kCovarianceRidge * trace_inv;
  }

  double operator()(const Eigen::Ref<const Vector>& x) const {
    const Vector diff = x - mean_;
    double maha = 0.0;
    if (form_ == CovarianceForm::kDiagonal) {
      maha = (diff.array().square() * inv_var_.array()).sum();
    } else {
      maha = llt_.matrixL().solve(diff).squaredNorm();
    }
    return constant_ - 0.5 * maha;
  }

 private:
  Vector mean_;
  CovarianceForm form_;
  Eigen::LLT<Matrix> llt_;
  Vector inv_var_;
  double constant_ = 0.0;
};

struct EStepResult {
  Matrix resp;  // n x c
  Matrix log_density;  // n x c, penalised component log densities
  double log_likelihood = 0.0;
  double max_error = 0.0;
};

EStepResult e_step(const Matrix& x, const PrototypeSet& set) {
  const Index n = x.rows();
  const int c = set.size();
  EStepResult out{Matrix(n, c), Matrix(n, c), 0.0, 0.0};
  for (int k = 0; k < c; ++k) {
    const Prototype& p = set.prototypes[static_cast<std::size_t>(k)];
    PenalizedDensity density(p, set.form);
    const double log_weight = std::log(p.weight);
    for (Index i = 0; i < n; ++i) {
      out.log_density(i, k) = density(x.row(i).transpose());
      out.resp(i, k) = log_weight + out.log_density(i, k);
    }
  }
  for (Index i = 0; i < n; ++i) {
    const double top = out.resp.row(i).maxCoeff();
    const double lse = top + std::log((out.resp.row(i).array() - top).exp().sum());
    out.log_likelihood += lse;
    out.resp.row(i) = (out.resp.row(i).array() - lse).exp();
    out.max_error = std::max(out.max_error, std::abs(out.resp.row(i).sum() - 1.0));
  }
  return out;
}

Prototype weighted_gaussian(const Matrix& x, const Eigen::Ref<const Vector>& w,
                            CovarianceForm form) {
  const double total = w.sum();
  Prototype p;
  p.mean = (x.transpose() * w) / total;
  const Matrix centred = x.rowwise() - p.mean.transpose();
  const Index d = x.cols();
  if (form == CovarianceForm::kDiagonal) {
    Vector var = (centred.array().square().colwise() * w.array()).colwise().sum().transpose() / total;
    p.covariance = Matrix(var.asDiagonal());
  } else {
    p.covariance = centred.transpose() * w.asDiagonal() * centred / total;
    p.covariance = 0.5 * (p.covariance + p.covariance.transpose()).eval();
  }
  p.covariance += kCovarianceRidge * Matrix::Identity(d, d);
  p.weight = total;
  return p;
}

}  // namespace

namespace {

GmmFit fit_gmm_once(const Matrix& x, int c, std::uint64_t seed, const GmmOptions& options) {
  const Index n = x.rows();
  const CovarianceForm form = covariance_form_for(x.cols());
  GmmFit fit;
  fit.prototypes.form = form;

  std::vector<int> start = options.initial_labels;
  if (start.empty()) start = kmeans(x, c, seed, 1, 50).labels;
  Matrix resp = Matrix::Zero(n, c);
  for (Index i = 0; i < n; ++i) resp(i, start[static_cast<std::size_t>(i)]) = 1.0;

  const Prototype global = weighted_gaussian(x, Vector::Ones(n), form);

  auto m_step = [&](const Matrix& r, const Matrix* log_density) {
    PrototypeSet next;
    next.form = form;
    next.prototypes.resize(static_cast<std::size_t>(c));
    for (int k = 0; k < c; ++k) {
      const double nk = r.col(k).sum();
      if (nk < 1.0) {
        if (++fit.collapses > options.max_collapses) {
          throw DegenerateFitError("GMM component collapsed " +
                                   std::to_string(fit.collapses) + " times");
        }
        // Reseed at the worst-explained sample.
        Index far = 0;
        if (log_density != nullptr) {
          log_density->rowwise().maxCoeff().minCoeff(&far);
        } else {
          (x.rowwise() - global.mean.transpose()).rowwise().squaredNorm().maxCoeff(&far);
        }
        Prototype p = global;
        p.mean = x.row(far).transpose();
        p.weight = static_cast<double>(n) / c;
        next.prototypes[static_cast<std::size_t>(k)] = std::move(p);
      } else {
        next.prototypes[static_cast<std::size_t>(k)] = weighted_gaussian(x, r.col(k), form);
      }
    }
    double total = 0.0;
    for (const auto& p : next.prototypes) total += p.weight;
    for (auto& p : next.prototypes) p.weight /= total;
    return next;
  };

  PrototypeSet params = m_step(resp, nullptr);
  EStepResult e;
  for (int it = 0; it < options.max_iter; ++it) {
    e = e_step(x, params);
    fit.max_responsibility_error = std::max(fit.max_responsibility_error, e.max_error);
    const bool done = !fit.log_likelihood.empty() &&
                      std::abs(e.log_likelihood - fit.log_likelihood.back()) < options.tol;
    fit.log_likelihood.push_back(e.log_likelihood);
    if (done || it + 1 == options.max_iter) break;
    params = m_step(e.resp, &e.log_density);
  }

  fit.prototypes = std::move(params);
  fit.assignment.num_clusters = c;
  fit.assignment.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Index k = 0;
    e.resp.row(i).maxCoeff(&k);
    fit.assignment.labels[static_cast<std::size_t>(i)] = static_cast<int>(k);
  }
  return fit;
}

}  // namespace

GmmFit fit_gmm(const PointSet& points, int c, std::uint64_t seed,
               const GmmOptions& options) {
  const Index n = points.rows();
  if (c < 1 || c > n) {
    throw InvalidInputError("GMM needs 1 <= c <= n (c=" + std::to_string(c) + ", n=" +
                            std::to_string(n) + ")");
  }
  if (options.restarts < 1) throw InvalidInputError("GMM needs at least one restart");
  if (!options.initial_labels.empty()) {
    if (static_cast<Index>(options.initial_labels.size()) != n) {
      throw InvalidInputError("GMM initial labels do not match sample count");
    }
    for (int label : options.initial_labels) {
      if (label < 0 || label >= c) throw InvalidInputError("GMM initial label out of range");
    }
  }
  std::optional<GmmFit> best;
  for (int r = 0; r < options.restarts; ++r) {
    const std::uint64_t s = r == 0 ? seed : derive_seed(seed, {static_cast<std::uint64_t>(r)});
    GmmFit fit;
    try {
      fit = fit_gmm_once(points.data(), c, s, options);
    } catch (const DegenerateFitError&) {
      if (r + 1 == options.restarts && !best) throw;
      continue;
    }
    if (!best || fit.log_likelihood.back() > best->log_likelihood.back()) best = std::move(fit);
  }
  return std::move(*best);
}

bool operator==(const Prototype& a, const Prototype& b) {
  return a.weight == b.weight && a.mean.size() == b.mean.size() && a.mean == b.mean &&
         a.covariance.rows() == b.covariance.rows() &&
         a.covariance.cols() == b.covariance.cols() && a.covariance == b.covariance;
}

PrototypeSet gaussians_from_labels(const PointSet& points, std::span<const int> labels,
                                   int c) {
  const Matrix& x = points.data();
  if (static_cast<Index>(labels.size()) != x.rows()) {
    throw InvalidInputError("label count does not match sample count");
  }
  for (int l : labels) {
    if (l < 0 || l >= c) {
      throw InvalidInputError("label " + std::to_string(l) + " outside 0.." + std::to_string(c - 1));
    }
  }
  PrototypeSet out;
  out.form = covariance_form_for(x.cols());
  for (int k = 0; k < c; ++k) {
    Vector w = Vector::Zero(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == k) w(i) = 1.0;
    }
    if (w.sum() == 0.0) {
      throw InvalidInputError("cluster " + std::to_string(k) + " has no members");
    }
    Prototype p = weighted_gaussian(x, w, out.form);
    p.weight /= static_cast<double>(x.rows());
    out.prototypes.push_back(std::move(p));
  }
  return out;
}

PointSet l1_normalize(const PointSet& points) {
  Matrix x = points.data();
  for (Index i = 0; i < x.rows(); ++i) {
    const double norm = x.row(i).lpNorm<1>();
    if (norm == 0.0) {
      throw InvalidInputError("cannot L1-normalise all-zero row " + std::to_string(i));
    }
    x.row(i) /= norm;
  }
  return PointSet(std::move(x));
}

PointSet clip_to_l1_ball(const PointSet& points, double scale) {
  if (!(scale > 0.0)) throw InvalidInputError("L1 clipping scale must be positive");
  Matrix x = points.data() / scale;
  for (Index i = 0; i < x.rows(); ++i) {
    const double norm = x.row(i).lpNorm<1>();
    if (norm > 1.0) x.row(i) /= norm;
  }
  return PointSet(std::move(x));
}

SensitivityBounds compute_sensitivities(Index n_c_min) {
  if (n_c_min < 1) {
    throw InvalidInputError("sensitivity needs a cluster size of at least 1");
  }
  const double n = static_cast<double>(n_c_min);
  return {2.0 / n, (2.0 * std::numbers::sqrt2 + 4.0) / n, n_c_min};
}

Matrix psd_repair(const Matrix& m, double floor) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed in PSD repair");
  if (es.eigenvalues().minCoeff() >= floor) return sym;
  const Vector clipped = es.eigenvalues().cwiseMax(floor);
  Matrix out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

PrototypeSet privatize_prototypes(const PrototypeSet& p, const SensitivityBounds& bounds,
                                  double epsilon, NoiseSource& noise,
                                  const PrivacyOptions& options) {
  if (!(epsilon > 0.0)) throw InvalidInputError("epsilon must be positive");
  if (p.noised) throw InvalidInputError("prototypes are already noised");
  const double scale_mu = bounds.delta_mu / (0.5 * epsilon);
  const double scale_sigma = bounds.delta_sigma / (0.5 * epsilon);
  PrototypeSet out = p;
  for (auto& proto : out.prototypes) {
    for (Index j = 0; j < proto.mean.size(); ++j) proto.mean(j) += noise.laplace(scale_mu);
    Matrix& cov = proto.covariance;
    if (p.form == CovarianceForm::kDiagonal) {
      for (Index j = 0; j < cov.rows(); ++j) {
        cov(j, j) = std::max(cov(j, j) + noise.laplace(scale_sigma), options.psd_floor);
      }
    } else {
      for (Index col = 0; col < cov.cols(); ++col) {
        for (Index row = 0; row < cov.rows(); ++row) cov(row, col) += noise.laplace(scale_sigma);
      }
      cov = psd_repair(cov, options.psd_floor);
    }
  }
  out.noised = true;
  out.epsilon_spent = epsilon;
  return out;
}

PrototypeSet privatize_prototypes(const PrototypeSet& p, const SensitivityBounds& bounds,
                                  double epsilon, std::uint64_t rng_seed,
                                  const PrivacyOptions& options) {
  NoiseSource noise(rng_seed);
  return privatize_prototypes(p, bounds, epsilon, noise, options);
}

}  // namespace fedgraph

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

#ifndef FEDGRAPH_PROTOTYPES_HPP_
#define FEDGRAPH_PROTOTYPES_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "fedgraph/random.hpp"
#include "fedgraph/types.hpp"

namespace fedgraph {

inline constexpr double kCovarianceRidge = 1e-6;
// Above this dimension covariances are kept diagonal.
inline constexpr Index kFullCovarianceMaxDim = 64;

enum class CovarianceForm : std::uint8_t { kFull = 0, kDiagonal = 1 };

struct Prototype {
  Vector mean;
  Matrix covariance;  // d x d; off-diagonals zero in diagonal form
  double weight = 0.0;
};

// Exact equality, shapes included.
bool operator==(const Prototype& a, const Prototype& b);

struct PrototypeSet {
  std::uint32_t client_id = 0;
  std::vector<Prototype> prototypes;
  CovarianceForm form = CovarianceForm::kFull;
  bool noised = false;
  double epsilon_spent = 0.0;

  Index dim() const { return prototypes.empty() ? 0 : prototypes.front().mean.size(); }
  int size() const { return static_cast<int>(prototypes.size()); }
  friend bool operator==(const PrototypeSet&, const PrototypeSet&) = default;
};

inline CovarianceForm covariance_form_for(Index dim) {
  return dim <= kFullCovarianceMaxDim ? CovarianceForm::kFull
                                      : CovarianceForm::kDiagonal;
}

struct GmmOptions {
  int max_iter = 100;
  double tol = 1e-6;  // change in the (ridge-penalised) log-likelihood
  int max_collapses = 3;
  // Independent k-means++ initialisations; the best final objective wins.
  int restarts = 1;
  // Hard starting partition; empty means k-means++ k-means.
  std::vector<int> initial_labels;
};

struct GmmFit {
  PrototypeSet prototypes;
  ClusterAssignment assignment;
  // Objective after each EM iteration:
  //   sum_i log sum_k pi_k N(x_i | mu_k, Sigma_k) exp(-ridge/2 tr Sigma_k^-1),
  // which is what EM with a ridge of `kCovarianceRidge` I ascends exactly.
  std::vector<double> log_likelihood;
  // Largest |sum_k r_ik - 1| seen over all E-steps.
  double max_responsibility_error = 0.0;
  int collapses = 0;
};

// EM for a C-component Gaussian mixture, initialised from k-means++ seeded
// k-means. Deterministic for a fixed seed.
GmmFit fit_gmm(const PointSet& points, int c, std::uint64_t seed,
               const GmmOptions& options = {});

// Maximum-likelihood Gaussian per given label (one M-step with hard
// responsibilities). Labels must cover 0..c-1; empty labels are an error.
PrototypeSet gaussians_from_labels(const PointSet& points,
                                   std::span<const int> labels, int c);

// Scales every row to unit L1 norm. Throws on an all-zero row.
PointSet l1_normalize(const PointSet& points);

// Divides by `scale` and shrinks any row still outside the unit L1 ball onto
// it. Keeps the geometry of the data while meeting ||x||_1 <= 1.
PointSet clip_to_l1_ball(const PointSet& points, double scale);

struct SensitivityBounds {
  double delta_mu = 0.0;
  double delta_sigma = 0.0;
  Index n_c_min = 0;
};

// Bounds for L1-bounded data: 2 / n and (2 sqrt 2 + 4) / n.
SensitivityBounds compute_sensitivities(Index n_c_min);

// Eigenvalues below `floor` are lifted to it.
Matrix psd_repair(const Matrix& m, double floor = 1e-6);

struct PrivacyOptions {
  double psd_floor = 1e-6;
};

// Laplace mechanism with the budget split evenly between means and
// covariances: scales delta_mu / (eps/2) and delta_sigma / (eps/2).
PrototypeSet privatize_prototypes(const PrototypeSet& p,
                                  const SensitivityBounds& bounds,
                                  double epsilon, NoiseSource& noise,
                                  const PrivacyOptions& options = {});
PrototypeSet privatize_prototypes(const PrototypeSet& p,
                                  const SensitivityBounds& bounds,
                                  double epsilon, std::uint64_t rng_seed,
                                  const PrivacyOptions& options = {});

}  // namespace fedgraph

#endif  // FEDGRAPH_PROTOTYPES_HPP_

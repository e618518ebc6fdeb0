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
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "fedgraph/error.hpp"
#include "fedgraph/metrics.hpp"
#include "fedgraph/prototypes.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace fedgraph {
namespace {

using testing::blobs;
using testing::ks_p_value;
using testing::ks_statistic;
using testing::random_matrix;

TEST(Sensitivities, MatchClosedForms) {
  for (Index n : {1, 10, 100, 1000}) {
    const SensitivityBounds b = compute_sensitivities(n);
    EXPECT_EQ(b.delta_mu, 2.0 / static_cast<double>(n));
    EXPECT_EQ(b.delta_sigma, (2.0 * std::sqrt(2.0) + 4.0) / static_cast<double>(n));
    EXPECT_EQ(b.n_c_min, n);
  }
  EXPECT_THROW(compute_sensitivities(0), InvalidInputError);
}

TEST(LaplaceMechanism, NoiseFitsLaplaceAtOnePercent) {
  // Means and (diagonal) covariances are perturbed with independent Laplace
  // draws of scale delta / (eps / 2). One test over the draws of all ten
  // seeds keeps the overall significance at 0.01.
  const Index d = 500;
  PrototypeSet p;
  p.form = CovarianceForm::kDiagonal;
  Prototype proto;
  proto.mean = Vector::Zero(d);
  proto.covariance = Matrix(Vector::Constant(d, 1e3).asDiagonal());
  p.prototypes.push_back(proto);
  const SensitivityBounds bounds = compute_sensitivities(25);
  const double eps = 1.0;
  std::vector<double> mu, sig;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PrototypeSet out = privatize_prototypes(p, bounds, eps, seed);
    for (Index j = 0; j < d; ++j) {
      mu.push_back(out.prototypes[0].mean(j));
      sig.push_back(out.prototypes[0].covariance(j, j) - 1e3);
    }
  }
  EXPECT_GT(ks_p_value(ks_statistic(mu, bounds.delta_mu / (eps / 2)), mu.size()), 0.01);
  EXPECT_GT(ks_p_value(ks_statistic(sig, bounds.delta_sigma / (eps / 2)), sig.size()), 0.01);
  // The same test has the power to reject a scale that is off by 20%.
  EXPECT_LT(ks_p_value(ks_statistic(mu, 1.25 * bounds.delta_mu / (eps / 2)), mu.size()), 0.01);
  EXPECT_LT(ks_p_value(ks_statistic(sig, 0.8 * bounds.delta_sigma / (eps / 2)), sig.size()),
            0.01);
}

TEST(LaplaceMechanism, DrawCounterAndDeterminism) {
  std::mt19937_64 rng(1);
  const PrototypeSet p = testing::random_prototypes(rng, 3, 4, CovarianceForm::kFull);
  PrototypeSet clean = p;
  clean.noised = false;
  NoiseSource a(9), b(9);
  const PrototypeSet x = privatize_prototypes(clean, compute_sensitivities(10), 1.0, a);
  const PrototypeSet y = privatize_prototypes(clean, compute_sensitivities(10), 1.0, b);
  EXPECT_EQ(x, y);
  EXPECT_EQ(a.draws(), 3u * (4u + 16u));
  EXPECT_TRUE(x.noised);
  EXPECT_THROW(privatize_prototypes(x, compute_sensitivities(10), 1.0, a), InvalidInputError);
  EXPECT_THROW(privatize_prototypes(clean, compute_sensitivities(10), 0.0, a), InvalidInputError);
}

TEST(LaplaceMechanism, NoisedCovariancesArePsd) {
  std::mt19937_64 rng(2);
  PrototypeSet p = testing::random_prototypes(rng, 4, 5, CovarianceForm::kFull);
  p.noised = false;
  PrivacyOptions o;
  o.psd_floor = 0.01;
  const PrototypeSet out = privatize_prototypes(p, compute_sensitivities(1), 0.5, 3, o);
  for (const auto& proto : out.prototypes) {
    EXPECT_LT((proto.covariance - proto.covariance.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(proto.covariance);
    EXPECT_GE(es.eigenvalues().minCoeff(), 0.01 - 1e-9);
  }
}

TEST(PsdRepair, LiftsNegativeEigenvalues) {
  Matrix m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  const Matrix r = psd_repair(m, 0.5);
  Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  EXPECT_NEAR(es.eigenvalues()(0), 0.5, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(1), 3.0, 1e-12);
}

TEST(Normalization, L1AndClip) {
  std::mt19937_64 rng(3);
  const PointSet x(random_matrix(rng, 50, 4, 3.0));
  const PointSet u = l1_normalize(x);
  for (Index i = 0; i < u.rows(); ++i) EXPECT_NEAR(u.data().row(i).lpNorm<1>(), 1.0, 1e-12);
  const PointSet c = clip_to_l1_ball(x, 2.0);
  for (Index i = 0; i < c.rows(); ++i) {
    const double scaled = x.data().row(i).lpNorm<1>() / 2.0;
    EXPECT_LE(c.data().row(i).lpNorm<1>(), 1.0 + 1e-12);
    if (scaled <= 1.0) {
      EXPECT_LT((c.data().row(i) - x.data().row(i) / 2.0).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
  Matrix zero = Matrix::Zero(2, 2);
  zero(1, 0) = 1.0;
  EXPECT_THROW(l1_normalize(PointSet(zero)), InvalidInputError);
}

TEST(GaussiansFromLabels, MatchDirectFormula) {
  std::mt19937_64 rng(4);
  const Matrix x = random_matrix(rng, 30, 3);
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(i % 3);
  const PrototypeSet p = gaussians_from_labels(PointSet(x), labels, 3);
  for (int k = 0; k < 3; ++k) {
    Vector mu = Vector::Zero(3);
    for (int i = k; i < 30; i += 3) mu += x.row(i).transpose();
    mu /= 10.0;
    Matrix cov = Matrix::Zero(3, 3);
    for (int i = k; i < 30; i += 3) {
      const Vector dv = x.row(i).transpose() - mu;
      cov += dv * dv.transpose();
    }
    cov /= 10.0;
    const auto& proto = p.prototypes[static_cast<std::size_t>(k)];
    EXPECT_LT((proto.mean - mu).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((proto.covariance - cov).cwiseAbs().maxCoeff(), 1e-5);  // ridge only
    EXPECT_NEAR(proto.weight, 1.0 / 3.0, 1e-12);
  }
  labels[0] = 5;
  EXPECT_THROW(gaussians_from_labels(PointSet(x), labels, 3), InvalidInputError);
}

TEST(Gmm, RecoversSeparatedBlobs) {
  std::mt19937_64 rng(5);
  std::vector<int> truth;
  const PointSet x = blobs(rng, 3, 60, 2, 0.2, &truth);
  const GmmFit fit = fit_gmm(x, 3, 7);
  EXPECT_DOUBLE_EQ(hungarian_accuracy(truth, fit.assignment.labels), 1.0);
  EXPECT_LT(fit.max_responsibility_error, 1e-9);
  for (std::size_t i = 1; i < fit.log_likelihood.size(); ++i) {
    EXPECT_GE(fit.log_likelihood[i], fit.log_likelihood[i - 1] - 1e-8 * std::abs(fit.log_likelihood[i - 1]));
  }
  double weight = 0.0;
  for (const auto& p : fit.prototypes.prototypes) weight += p.weight;
  EXPECT_NEAR(weight, 1.0, 1e-9);
}

TEST(Gmm, DeterministicAndRestartsNeverWorse) {
  std::mt19937_64 rng(6);
  const PointSet x(random_matrix(rng, 120, 2));
  const GmmFit a = fit_gmm(x, 4, 11);
  const GmmFit b = fit_gmm(x, 4, 11);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.prototypes, b.prototypes);
  GmmOptions o;
  o.restarts = 5;
  const GmmFit best = fit_gmm(x, 4, 11, o);
  EXPECT_GE(best.log_likelihood.back(), a.log_likelihood.back() - 1e-9);
}

TEST(Gmm, InitialLabelsAreHonoured) {
  std::mt19937_64 rng(7);
  std::vector<int> truth;
  const PointSet x = blobs(rng, 2, 40, 2, 0.2, &truth);
  GmmOptions o;
  o.initial_labels = truth;
  const GmmFit fit = fit_gmm(x, 2, 1, o);
  EXPECT_EQ(fit.assignment.labels, truth);
  o.initial_labels.pop_back();
  EXPECT_THROW(fit_gmm(x, 2, 1, o), InvalidInputError);
}

TEST(Gmm, DiagonalAboveDimensionLimit) {
  std::mt19937_64 rng(8);
  const PointSet x(random_matrix(rng, 200, kFullCovarianceMaxDim + 1));
  const GmmFit fit = fit_gmm(x, 2, 3);
  EXPECT_EQ(fit.prototypes.form, CovarianceForm::kDiagonal);
  const Matrix& cov = fit.prototypes.prototypes[0].covariance;
  EXPECT_EQ((cov - Matrix(cov.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
}

}  // namespace
}  // namespace fedgraph

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

#ifndef FEDGRAPH_TESTS_ORACLES_HPP_
#define FEDGRAPH_TESTS_ORACLES_HPP_

// Independent reference computations shared by the unit tests and the
// acceptance runner.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fedgraph/embedder.hpp"
#include "fedgraph/types.hpp"

namespace fedgraph::testing {

// Asymptotic Kolmogorov-Smirnov p-value with the usual small-sample
// correction of the statistic.
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    sum += (k % 2 == 1 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lambda * lambda);
  }
  return std::clamp(sum, 0.0, 1.0);
}

inline double laplace_cdf(double x, double b) {
  return x < 0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
}

// Largest gap between the empirical CDF of `xs` and Laplace(0, b).
inline double ks_statistic(std::vector<double> xs, double b) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = laplace_cdf(xs[i], b);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

// Every parameter as one flat list of references.
inline std::vector<double*> parameters(LinearAutoencoder& m) {
  std::vector<double*> out;
  for (Matrix* mat : {&m.encoder, &m.decoder}) {
    for (Index i = 0; i < mat->size(); ++i) out.push_back(mat->data() + i);
  }
  for (Vector* vec : {&m.encoder_bias, &m.decoder_bias}) {
    for (Index i = 0; i < vec->size(); ++i) out.push_back(vec->data() + i);
  }
  return out;
}

// Relative error ||analytic - numeric|| / ||numeric|| of the full gradient,
// central differences with step h.
inline double gradient_error(const LinearAutoencoder& model, const Matrix& x,
                             const DecTerm* dec, double lambda, double h = 1e-6) {
  LossGradient lg = embedder_loss(model, x, dec, lambda);
  LinearAutoencoder probe = model;
  LinearAutoencoder grad = lg.gradient;
  auto ps = parameters(probe);
  auto gs = parameters(grad);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < ps.size(); ++t) {
    const double saved = *ps[t];
    *ps[t] = saved + h;
    const double up = embedder_loss(probe, x, dec, lambda).loss;
    *ps[t] = saved - h;
    const double down = embedder_loss(probe, x, dec, lambda).loss;
    *ps[t] = saved;
    const double fd = (up - down) / (2 * h);
    num += (fd - *gs[t]) * (fd - *gs[t]);
    den += fd * fd;
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

// Best point of a 1/steps grid over the probability simplex in 3 dimensions.
inline Vector simplex_grid_argmin(const Vector& v, int steps) {
  Vector best(3);
  double best_d = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= steps; ++a) {
    for (int b = 0; a + b <= steps; ++b) {
      Vector g(3);
      g << a / double(steps), b / double(steps), (steps - a - b) / double(steps);
      const double d = (g - v).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = g;
      }
    }
  }
  return best;
}

}  // namespace fedgraph::testing

#endif  // FEDGRAPH_TESTS_ORACLES_HPP_

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

#ifndef FEDGRAPH_KMEANS_HPP_
#define FEDGRAPH_KMEANS_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "fedgraph/types.hpp"

namespace fedgraph {

struct KMeansResult {
  Matrix centers;  // k x d
  std::vector<int> labels;
  double inertia = 0.0;
};

// k-means++ seeding (D^2 sampling) on the rows of x.
Matrix kmeanspp_seeds(const Matrix& x, int k, std::mt19937_64& rng);

// Lloyd iterations from k-means++ seeds; best inertia over `restarts`.
// Empty clusters are re-seeded at the point farthest from its centre.
KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed,
                    int restarts = 10, int max_iter = 100);

// Index of the nearest centre for every row.
std::vector<int> nearest_center(const Matrix& x, const Matrix& centers);

}  // namespace fedgraph

#endif  // FEDGRAPH_KMEANS_HPP_

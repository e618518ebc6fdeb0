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

#ifndef FEDGRAPH_RANDOM_HPP_
#define FEDGRAPH_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <cmath>
#include <random>

namespace fedgraph {

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream seed from a base seed and a path of stream ids.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(base);
  for (auto p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Laplace sampler that counts its draws.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : rng_(seed) {}

  // One draw from Laplace(0, scale) by inverse CDF.
  double laplace(double scale) {
    ++draws_;
    std::uniform_real_distribution<double> uniform(-0.5, 0.5);
    double u = uniform(rng_);
    while (u == -0.5) u = uniform(rng_);
    const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
    return u < 0 ? -magnitude : magnitude;
  }

  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 rng_;
  std::uint64_t draws_ = 0;
};

}  // namespace fedgraph

#endif  // FEDGRAPH_RANDOM_HPP_

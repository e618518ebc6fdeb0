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

#ifndef FEDGRAPH_DATA_HPP_
#define FEDGRAPH_DATA_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedgraph/types.hpp"

namespace fedgraph {

struct LabeledDataset {
  PointSet points;
  std::vector<int> labels;  // empty when unlabeled
  std::string name;
  int class_count = 0;

  bool has_labels() const { return !labels.empty(); }
  LabeledDataset subset(const std::vector<Index>& indices) const;
};

// Two interleaving half circles; n/2 points per arc with t ~ U[0, pi].
LabeledDataset gen_moons(Index n, double noise_sigma, std::uint64_t seed);

// Concentric circles of radius 1 + class in the first two coordinates, the
// remaining coordinates Gaussian noise.
LabeledDataset gen_ring(Index n, Index dim, int classes, std::uint64_t seed,
                        double noise_sigma = 0.05);

struct LabelColumn {
  std::optional<int> index;  // negative counts from the end
  std::optional<std::string> name;
};

// Numeric CSV with an optional header row; the label column, if any, may hold
// arbitrary strings and is factorised in first-appearance order.
LabeledDataset load_csv(const std::string& path,
                        const std::optional<LabelColumn>& label_column = {});

// Per-column z-score; constant columns are centred only.
PointSet zscore_columns(const PointSet& points);

struct PartitionPlan {
  std::vector<std::vector<Index>> clients;
  double heterogeneity = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

// h = 0 is a uniform random split. For h > 0 client k draws a fraction h of
// its quota from its dominant classes (classes dealt round-robin to clients)
// and the rest uniformly from whatever remains.
PartitionPlan partition_clients(const LabeledDataset& ds, int clients,
                                double heterogeneity, std::uint64_t seed);

}  // namespace fedgraph

#endif  // FEDGRAPH_DATA_HPP_

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

#ifndef FEDGRAPH_METRICS_HPP_
#define FEDGRAPH_METRICS_HPP_

#include <span>
#include <vector>

#include "fedgraph/types.hpp"

namespace fedgraph {

// Minimum-cost assignment of rows to columns for a rectangular cost matrix
// (rows <= cols). Returns the column chosen for each row.
std::vector<Index> linear_sum_assignment(const Matrix& cost);

// Contingency table: rows = true classes, cols = predicted clusters. Labels
// must be non-negative.
Matrix contingency_table(std::span<const int> truth,
                         std::span<const int> predicted);

// Best one-to-one cluster-to-class matched fraction.
double hungarian_accuracy(std::span<const int> truth,
                          std::span<const int> predicted);

// I(T;P) / sqrt(H(T) H(P)), natural logs.
double nmi(std::span<const int> truth, std::span<const int> predicted);

double ari(std::span<const int> truth, std::span<const int> predicted);

}  // namespace fedgraph

#endif  // FEDGRAPH_METRICS_HPP_

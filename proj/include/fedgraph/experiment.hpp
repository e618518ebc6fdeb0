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

#ifndef FEDGRAPH_EXPERIMENT_HPP_
#define FEDGRAPH_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedgraph/data.hpp"
#include "fedgraph/federation.hpp"

namespace fedgraph {

inline constexpr int kSpecSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

struct DatasetSpec {
  // "moons", "ring" or "csv".
  std::string source = "moons";
  Index n = 1000;
  double noise = 0.06;
  Index dim = 20;
  int classes = 5;
  std::string path;
  std::optional<LabelColumn> label_column;
  bool standardize = true;
};

enum class RunMode { kOneShot, kIterative, kBaselineKMeans };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

struct AblationFlags {
  bool dp_off = false;
  bool psg_off = false;
  bool gsg_off = false;

  std::string label() const;
};

struct ExperimentSpec {
  std::string name = "experiment";
  DatasetSpec dataset;
  double heterogeneity = 0.0;
  FederationConfig federation;
  // When true the clip norm is the largest row L1 norm of the prepared
  // dataset, treated as a public bound on the feature range.
  bool auto_clip_norm = true;
  RunMode mode = RunMode::kOneShot;
  AblationFlags ablation;
  std::string output;

  // Fields absent from the JSON keep their defaults. Throws ConfigError.
  static ExperimentSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

ExperimentSpec load_spec(const std::string& path);

// A bare federation section, for callers that bring their own client data.
// Unlike a full spec, the clip norm must be numeric. Throws ConfigError.
FederationConfig federation_from_json(const nlohmann::json& j);

struct Metrics {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
};

struct RunReport {
  ExperimentSpec spec;  // fully resolved
  std::uint64_t seed = 0;
  Metrics metrics;
  std::vector<RoundTrace> trace;
  std::vector<MessageSizeReport> message_sizes;
  double wall_clock_seconds = 0.0;
  std::uint64_t noise_draws = 0;
  std::vector<std::string> warnings;
  std::vector<int> labels;  // predicted labels in dataset order

  nlohmann::json to_json() const;
};

// Builds the dataset, partitions it, runs the selected mode and scores it.
RunReport run_experiment(const ExperimentSpec& spec);

// Loads the prepared dataset and client split for a spec.
struct PreparedData {
  LabeledDataset dataset;
  PartitionPlan plan;
  std::vector<PointSet> clients;
  std::vector<int> truth;  // concatenated in client order
  std::vector<Index> order;  // dataset index of each concatenated sample
};
PreparedData prepare_data(const ExperimentSpec& spec);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

Summary summarize(const std::vector<double>& values);

struct SweepCell {
  std::string name;
  std::vector<RunReport> runs;
  std::vector<std::string> failures;  // one entry per failed run
  Summary acc, nmi, ari, seconds;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  bool any_failure() const;
  std::string table() const;
  std::string csv() const;
  nlohmann::json to_json() const;
};

// Runs every spec with seeds base_seed .. base_seed + repeats - 1. A failed
// run is recorded in its cell and the sweep continues.
SweepResult run_sweep(const std::vector<ExperimentSpec>& specs, int repeats,
                      std::uint64_t base_seed, int threads = 1);

// The five arms of the component ablation: full, no noise, no private
// graph learning, no global refinement, neither graph stage.
std::vector<ExperimentSpec> expand_ablation(const ExperimentSpec& base);

// One spec per heterogeneity ratio.
std::vector<ExperimentSpec> expand_heterogeneity(const ExperimentSpec& base,
                                                 const std::vector<double>& ratios);

}  // namespace fedgraph

#endif  // FEDGRAPH_EXPERIMENT_HPP_

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

#include "fedgraph/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "fedgraph/error.hpp"
#include "fedgraph/metrics.hpp"
#include "fedgraph/random.hpp"

namespace fedgraph {
namespace {

using nlohmann::json;

enum : std::uint64_t { kTagData = 11, kTagPartition = 12 };

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.contains(it.key())) {
      throw ConfigError("unknown field '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

EmbedderConfig parse_embedder(const json& j) {
  const std::string where = "federation.embedder";
  reject_unknown(j, {"kind", "latent_dim", "lambda_dec", "epochs", "step_size", "seed"}, where);
  EmbedderConfig e;
  std::string kind = to_string(e.kind);
  read(j, "kind", kind, where);
  e.kind = embedder_kind_from_string(kind);
  read(j, "latent_dim", e.latent_dim, where);
  read(j, "lambda_dec", e.lambda_dec, where);
  read(j, "epochs", e.epochs, where);
  read(j, "step_size", e.step_size, where);
  read(j, "seed", e.seed, where);
  return e;
}

json embedder_json(const EmbedderConfig& e) {
  return {{"kind", to_string(e.kind)},   {"latent_dim", e.latent_dim},
          {"lambda_dec", e.lambda_dec},  {"epochs", e.epochs},
          {"step_size", e.step_size},    {"seed", e.seed}};
}

double max_l1_norm(const PointSet& points) {
  double best = 0.0;
  for (Index i = 0; i < points.rows(); ++i) best = std::max(best, points.data().row(i).lpNorm<1>());
  return best;
}

json trace_json(const RoundTrace& t) {
  json j = {{"round", t.round}, {"alignment", t.alignment}, {"components", t.components}};
  if (t.acc) j["acc"] = *t.acc;
  if (t.nmi) j["nmi"] = *t.nmi;
  if (t.ari) j["ari"] = *t.ari;
  return j;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// Reads the federation section into `c`. Returns the clip norm when it is
// given as a number and nullopt when it is "auto" or absent.
std::optional<double> read_federation(const json& f, FederationConfig& c) {
  const std::string where = "federation";
  reject_unknown(f, {"num_clients", "clusters", "neighbors", "inter_block_k", "beta", "epsilon",
                     "rounds", "embedder", "seed", "dp_clip_norm", "psd_floor_noise_ratio",
                     "edge_noise_epsilon",
                     "graph_max_iter", "refine_max_iter", "dense_blocks_up_to", "threads"},
                 where);
  read(f, "num_clients", c.num_clients, where);
  read(f, "clusters", c.clusters, where);
  read(f, "neighbors", c.neighbors, where);
  read(f, "inter_block_k", c.inter_block_k, where);
  read(f, "beta", c.beta, where);
  read(f, "epsilon", c.epsilon, where);
  read(f, "rounds", c.rounds, where);
  read(f, "seed", c.seed, where);
  read(f, "psd_floor_noise_ratio", c.psd_floor_noise_ratio, where);
  read(f, "edge_noise_epsilon", c.edge_noise_epsilon, where);
  read(f, "graph_max_iter", c.graph_max_iter, where);
  read(f, "refine_max_iter", c.refine_max_iter, where);
  read(f, "dense_blocks_up_to", c.dense_blocks_up_to, where);
  read(f, "threads", c.threads, where);
  if (f.contains("embedder")) c.embedder = parse_embedder(f.at("embedder"));
  if (!f.contains("dp_clip_norm")) return std::nullopt;
  const json& clip = f.at("dp_clip_norm");
  if (clip.is_string() && clip.get<std::string>() == "auto") return std::nullopt;
  if (!clip.is_number()) {
    throw ConfigError("federation.dp_clip_norm must be a number or \"auto\"");
  }
  c.dp_clip_norm = clip.get<double>();
  return c.dp_clip_norm;
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kOneShot:
      return "one_shot";
    case RunMode::kIterative:
      return "iterative";
    case RunMode::kBaselineKMeans:
      return "baseline_kmeans";
  }
  return "one_shot";
}

RunMode run_mode_from_string(const std::string& name) {
  if (name == "one_shot") return RunMode::kOneShot;
  if (name == "iterative") return RunMode::kIterative;
  if (name == "baseline_kmeans") return RunMode::kBaselineKMeans;
  throw ConfigError("unknown mode '" + name + "'");
}

std::string AblationFlags::label() const {
  if (!dp_off && !psg_off && !gsg_off) return "full";
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += "+";
    out += name;
  };
  add(dp_off, "dp_off");
  add(psg_off, "psg_off");
  add(gsg_off, "gsg_off");
  return out;
}

FederationConfig federation_from_json(const json& j) {
  FederationConfig c;
  const std::optional<double> clip = read_federation(j, c);
  if (!clip && j.contains("dp_clip_norm")) {
    throw ConfigError("federation.dp_clip_norm \"auto\" needs a dataset; give a number");
  }
  c.validate();
  return c;
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  reject_unknown(j, {"schema_version", "name", "dataset", "heterogeneity", "federation", "mode",
                     "ablation", "output"},
                 "experiment");
  int version = kSpecSchemaVersion;
  read(j, "schema_version", version, "experiment");
  if (version != kSpecSchemaVersion) {
    throw ConfigError("unsupported experiment schema version " + std::to_string(version));
  }
  ExperimentSpec s;
  read(j, "name", s.name, "experiment");
  read(j, "heterogeneity", s.heterogeneity, "experiment");
  read(j, "output", s.output, "experiment");
  std::string mode = to_string(s.mode);
  read(j, "mode", mode, "experiment");
  s.mode = run_mode_from_string(mode);

  if (!j.contains("dataset")) throw ConfigError("experiment needs a dataset");
  const json& d = j.at("dataset");
  reject_unknown(d, {"source", "n", "noise", "dim", "classes", "path", "label_column",
                     "standardize"},
                 "dataset");
  read(d, "source", s.dataset.source, "dataset");
  read(d, "n", s.dataset.n, "dataset");
  read(d, "noise", s.dataset.noise, "dataset");
  read(d, "dim", s.dataset.dim, "dataset");
  read(d, "classes", s.dataset.classes, "dataset");
  read(d, "path", s.dataset.path, "dataset");
  read(d, "standardize", s.dataset.standardize, "dataset");
  if (d.contains("label_column")) {
    const json& lc = d.at("label_column");
    LabelColumn col;
    if (lc.is_number_integer()) {
      col.index = lc.get<int>();
    } else if (lc.is_string()) {
      col.name = lc.get<std::string>();
    } else if (!lc.is_null()) {
      throw ConfigError("dataset.label_column must be an index, a name, or null");
    }
    if (!lc.is_null()) s.dataset.label_column = col;
  }

  s.federation.clusters = 0;
  if (j.contains("federation")) {
    const std::optional<double> clip = read_federation(j.at("federation"), s.federation);
    if (j.at("federation").contains("dp_clip_norm")) s.auto_clip_norm = !clip.has_value();
  }

  if (j.contains("ablation")) {
    const json& a = j.at("ablation");
    reject_unknown(a, {"dp_off", "psg_off", "gsg_off"}, "ablation");
    read(a, "dp_off", s.ablation.dp_off, "ablation");
    read(a, "psg_off", s.ablation.psg_off, "ablation");
    read(a, "gsg_off", s.ablation.gsg_off, "ablation");
  }
  s.validate();
  return s;
}

json ExperimentSpec::to_json() const {
  json d = {{"source", dataset.source}, {"standardize", dataset.standardize}};
  if (dataset.source == "csv") {
    d["path"] = dataset.path;
    if (dataset.label_column) {
      if (dataset.label_column->index) d["label_column"] = *dataset.label_column->index;
      else d["label_column"] = *dataset.label_column->name;
    } else {
      d["label_column"] = nullptr;
    }
  } else {
    d["n"] = dataset.n;
    d["noise"] = dataset.noise;
    if (dataset.source == "ring") {
      d["dim"] = dataset.dim;
      d["classes"] = dataset.classes;
    }
  }
  const FederationConfig& c = federation;
  json f = {{"num_clients", c.num_clients},
            {"clusters", c.clusters},
            {"neighbors", c.neighbors},
            {"inter_block_k", c.inter_block_k},
            {"beta", c.beta},
            {"epsilon", c.epsilon},
            {"rounds", c.rounds},
            {"embedder", embedder_json(c.embedder)},
            {"seed", c.seed},
            {"psd_floor_noise_ratio", c.psd_floor_noise_ratio},
            {"edge_noise_epsilon", c.edge_noise_epsilon},
            {"graph_max_iter", c.graph_max_iter},
            {"refine_max_iter", c.refine_max_iter},
            {"dense_blocks_up_to", c.dense_blocks_up_to},
            {"threads", c.threads}};
  if (auto_clip_norm) f["dp_clip_norm"] = "auto";
  else f["dp_clip_norm"] = c.dp_clip_norm;
  return {{"schema_version", kSpecSchemaVersion},
          {"name", name},
          {"dataset", d},
          {"heterogeneity", heterogeneity},
          {"federation", f},
          {"mode", to_string(mode)},
          {"ablation",
           {{"dp_off", ablation.dp_off}, {"psg_off", ablation.psg_off},
            {"gsg_off", ablation.gsg_off}}},
          {"output", output}};
}

void ExperimentSpec::validate() const {
  if (dataset.source == "moons") {
    if (dataset.n < 4 || dataset.n % 2 != 0) throw ConfigError("moons needs an even n >= 4");
  } else if (dataset.source == "ring") {
    if (dataset.classes < 1 || dataset.n % dataset.classes != 0) {
      throw ConfigError("ring needs n divisible by the class count");
    }
  } else if (dataset.source == "csv") {
    if (dataset.path.empty()) throw ConfigError("csv dataset needs a path");
  } else {
    throw ConfigError("unknown dataset source '" + dataset.source + "'");
  }
  if (!(dataset.noise >= 0.0)) throw ConfigError("dataset noise must be non-negative");
  if (!(heterogeneity >= 0.0 && heterogeneity < 1.0)) {
    throw ConfigError("heterogeneity must lie in [0, 1)");
  }
  FederationConfig probe = federation;
  if (probe.clusters == 0) probe.clusters = 1;  // resolved from the data later
  probe.validate();
  if (mode == RunMode::kBaselineKMeans && (ablation.psg_off || ablation.gsg_off)) {
    throw ConfigError("graph ablations do not apply to the k-means baseline");
  }
  if (mode == RunMode::kOneShot && federation.embedder.kind != EmbedderKind::kIdentity) {
    throw ConfigError("one-shot runs use the identity embedder");
  }
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  ExperimentSpec spec = ExperimentSpec::from_json(j);
  if (spec.dataset.source == "csv") {
    std::filesystem::path p(spec.dataset.path);
    if (p.is_relative()) {
      spec.dataset.path = (std::filesystem::path(path).parent_path() / p).lexically_normal().string();
    }
  }
  return spec;
}

PreparedData prepare_data(const ExperimentSpec& spec) {
  const std::uint64_t seed = spec.federation.seed;
  PreparedData out;
  const DatasetSpec& d = spec.dataset;
  if (d.source == "moons") {
    out.dataset = gen_moons(d.n, d.noise, derive_seed(seed, {kTagData}));
  } else if (d.source == "ring") {
    out.dataset = gen_ring(d.n, d.dim, d.classes, derive_seed(seed, {kTagData}), d.noise);
  } else {
    out.dataset = load_csv(d.path, d.label_column);
    if (d.standardize) out.dataset.points = zscore_columns(out.dataset.points);
  }
  out.plan = partition_clients(out.dataset, spec.federation.num_clients, spec.heterogeneity,
                               derive_seed(seed, {kTagPartition}));
  for (const auto& idx : out.plan.clients) {
    LabeledDataset part = out.dataset.subset(idx);
    out.clients.push_back(part.points);
    out.truth.insert(out.truth.end(), part.labels.begin(), part.labels.end());
    out.order.insert(out.order.end(), idx.begin(), idx.end());
  }
  return out;
}

json RunReport::to_json() const {
  json sizes = json::array();
  bool within = true;
  for (const auto& m : message_sizes) {
    sizes.push_back({{"graph_nonzeros", m.graph_nonzeros},
                     {"prototype_values", m.prototype_values},
                     {"nonzeros", m.nonzeros},
                     {"label_count", m.label_count},
                     {"bytes", m.bytes},
                     {"bound", m.bound},
                     {"within_bound", m.within_bound}});
    within = within && m.within_bound;
  }
  json trace_j = json::array();
  for (const auto& t : trace) trace_j.push_back(trace_json(t));
  return {{"schema_version", kReportSchemaVersion},
          {"name", spec.name},
          {"seed", seed},
          {"mode", to_string(spec.mode)},
          {"ablation", spec.ablation.label()},
          {"metrics", {{"acc", metrics.acc}, {"nmi", metrics.nmi}, {"ari", metrics.ari}}},
          {"trace", trace_j},
          {"message_sizes", sizes},
          {"all_uploads_within_bound", within},
          {"wall_clock_seconds", wall_clock_seconds},
          {"noise_draws", noise_draws},
          {"warnings", warnings},
          {"resolved",
           {{"clusters", spec.federation.clusters},
            {"dp_clip_norm", spec.federation.dp_clip_norm}}},
          {"config", spec.to_json()},
          {"labels", labels}};
}

RunReport run_experiment(const ExperimentSpec& input) {
  input.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentSpec spec = input;
  PreparedData data = prepare_data(spec);
  if (!data.dataset.has_labels() && spec.federation.clusters == 0) {
    throw ConfigError("clusters must be given for unlabelled data");
  }
  if (spec.federation.clusters == 0) spec.federation.clusters = data.dataset.class_count;
  if (spec.auto_clip_norm) spec.federation.dp_clip_norm = max_l1_norm(data.dataset.points);

  FederationConfig config = spec.federation;
  if (spec.ablation.dp_off) config.epsilon = 0.0;
  if (spec.ablation.psg_off) config.learn_private_structure = false;
  if (spec.ablation.gsg_off) config.refine_global_structure = false;

  FederationRun run;
  switch (spec.mode) {
    case RunMode::kOneShot:
      run = run_one_shot(data.clients, config);
      break;
    case RunMode::kIterative:
      run = run_iterative(data.clients, config, data.dataset.has_labels() ? &data.truth : nullptr);
      break;
    case RunMode::kBaselineKMeans:
      run = baseline_federated_kmeans(data.clients, config);
      break;
  }

  RunReport report;
  report.seed = spec.federation.seed;
  report.trace = run.trace;
  report.message_sizes = run.upload_sizes;
  report.noise_draws = run.noise_draws;
  report.warnings = data.plan.warnings;
  report.warnings.insert(report.warnings.end(), run.result.warnings.begin(),
                         run.result.warnings.end());
  for (std::size_t k = 0; k < run.client_graph_converged.size(); ++k) {
    if (!run.client_graph_converged[k] && config.learn_private_structure) {
      report.warnings.push_back("client " + std::to_string(k) +
                                " private graph did not reach the target component count");
    }
  }
  const auto& predicted = run.result.assignments.labels;
  report.labels.assign(predicted.size(), 0);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    report.labels[static_cast<std::size_t>(data.order[i])] = predicted[i];
  }
  if (data.dataset.has_labels()) {
    report.metrics = {hungarian_accuracy(data.truth, predicted), nmi(data.truth, predicted),
                      ari(data.truth, predicted)};
  }
  report.spec = std::move(spec);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

bool SweepResult::any_failure() const {
  for (const auto& c : cells) {
    if (!c.failures.empty()) return true;
  }
  return false;
}

std::string SweepResult::table() const {
  std::size_t width = 4;
  for (const auto& c : cells) width = std::max(width, c.name.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "cell"
     << "  runs  fail  ACC              NMI              ARI              seconds\n";
  for (const auto& c : cells) {
    os << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << std::setw(4)
       << c.runs.size() << "  " << std::setw(4) << c.failures.size() << "  "
       << fixed(c.acc.mean) << " +- " << fixed(c.acc.std) << "  " << fixed(c.nmi.mean) << " +- "
       << fixed(c.nmi.std) << "  " << fixed(c.ari.mean) << " +- " << fixed(c.ari.std) << "  "
       << fixed(c.seconds.mean, 2) << "\n";
  }
  return os.str();
}

std::string SweepResult::csv() const {
  std::ostringstream os;
  os << "cell,runs,failures,acc_mean,acc_std,nmi_mean,nmi_std,ari_mean,ari_std,seconds_mean\n";
  os << std::setprecision(10);
  for (const auto& c : cells) {
    os << c.name << "," << c.runs.size() << "," << c.failures.size() << "," << c.acc.mean << ","
       << c.acc.std << "," << c.nmi.mean << "," << c.nmi.std << "," << c.ari.mean << ","
       << c.ari.std << "," << c.seconds.mean << "\n";
  }
  return os.str();
}

json SweepResult::to_json() const {
  json cells_j = json::array();
  for (const auto& c : cells) {
    json runs = json::array();
    for (const auto& r : c.runs) runs.push_back(r.to_json());
    cells_j.push_back({{"name", c.name},
                       {"acc", {{"mean", c.acc.mean}, {"std", c.acc.std}}},
                       {"nmi", {{"mean", c.nmi.mean}, {"std", c.nmi.std}}},
                       {"ari", {{"mean", c.ari.mean}, {"std", c.ari.std}}},
                       {"seconds", {{"mean", c.seconds.mean}, {"std", c.seconds.std}}},
                       {"failures", c.failures},
                       {"runs", runs}});
  }
  return {{"schema_version", kReportSchemaVersion}, {"cells", cells_j}};
}

SweepResult run_sweep(const std::vector<ExperimentSpec>& specs, int repeats,
                      std::uint64_t base_seed, int threads) {
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  struct Job {
    std::size_t cell;
    int rep;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < specs.size(); ++c) {
    for (int r = 0; r < repeats; ++r) jobs.push_back({c, r});
  }
  std::vector<std::optional<RunReport>> reports(jobs.size());
  std::vector<std::string> errors(jobs.size());
  auto work = [&](std::size_t idx) {
    ExperimentSpec s = specs[jobs[idx].cell];
    s.federation.seed = base_seed + static_cast<std::uint64_t>(jobs[idx].rep);
    try {
      reports[idx] = run_experiment(s);
    } catch (const std::exception& e) {
      errors[idx] = "seed " + std::to_string(s.federation.seed) + ": " + e.what();
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(jobs.size(), static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < jobs.size(); i += workers) work(i);
      });
    }
  }

  SweepResult out;
  out.cells.resize(specs.size());
  for (std::size_t c = 0; c < specs.size(); ++c) out.cells[c].name = specs[c].name;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    SweepCell& cell = out.cells[jobs[i].cell];
    if (reports[i]) cell.runs.push_back(std::move(*reports[i]));
    else cell.failures.push_back(errors[i]);
  }
  for (auto& cell : out.cells) {
    std::vector<double> acc, nmi_v, ari_v, secs;
    for (const auto& r : cell.runs) {
      acc.push_back(r.metrics.acc);
      nmi_v.push_back(r.metrics.nmi);
      ari_v.push_back(r.metrics.ari);
      secs.push_back(r.wall_clock_seconds);
    }
    cell.acc = summarize(acc);
    cell.nmi = summarize(nmi_v);
    cell.ari = summarize(ari_v);
    cell.seconds = summarize(secs);
  }
  return out;
}

std::vector<ExperimentSpec> expand_ablation(const ExperimentSpec& base) {
  const AblationFlags arms[] = {
      {false, false, false}, {true, false, false}, {false, true, false},
      {false, false, true},  {false, true, true},
  };
  std::vector<ExperimentSpec> out;
  for (const auto& a : arms) {
    ExperimentSpec s = base;
    s.ablation = a;
    s.name = base.name + "/" + a.label();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ExperimentSpec> expand_heterogeneity(const ExperimentSpec& base,
                                                 const std::vector<double>& ratios) {
  std::vector<ExperimentSpec> out;
  for (double h : ratios) {
    ExperimentSpec s = base;
    s.heterogeneity = h;
    std::ostringstream name;
    name << base.name << "/h=" << h;
    s.name = name.str();
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fedgraph

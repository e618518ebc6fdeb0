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

// fedgraph: batch driver for federated graph clustering experiments.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fedgraph/error.hpp"
#include "fedgraph/experiment.hpp"

namespace fs = std::filesystem;
using namespace fedgraph;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<int> clients;
  std::optional<double> heterogeneity;
  std::optional<std::string> mode;
  std::optional<int> rounds;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--epsilon", o.epsilon, "Privacy budget (0 disables noise)");
  cmd->add_option("--clients", o.clients, "Number of clients");
  cmd->add_option("--heterogeneity", o.heterogeneity, "Class imbalance ratio h in [0,1)");
  cmd->add_option("--mode", o.mode, "one_shot, iterative or baseline_kmeans");
  cmd->add_option("--rounds", o.rounds, "Feedback rounds for iterative mode");
}

ExperimentSpec load_with_overrides(const std::string& path, const Overrides& o) {
  ExperimentSpec s = load_spec(path);
  if (o.seed) s.federation.seed = *o.seed;
  if (o.epsilon) s.federation.epsilon = *o.epsilon;
  if (o.clients) s.federation.num_clients = *o.clients;
  if (o.heterogeneity) s.heterogeneity = *o.heterogeneity;
  if (o.mode) s.mode = run_mode_from_string(*o.mode);
  if (o.rounds) s.federation.rounds = *o.rounds;
  s.validate();
  return s;
}

int worker_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("FEDGRAPH_THREADS")) {
    try {
      n = std::min(n, std::max(1, std::stoi(env)));
    } catch (const std::exception&) {
      throw ConfigError(std::string("FEDGRAPH_THREADS is not an integer: ") + env);
    }
  }
  return n;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string file_stem(const std::string& name) {
  std::string s = name;
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '/' || c == ' ' || c == '='; }, '_');
  return s;
}

std::string out_dir(const std::string& flag, const ExperimentSpec& spec) {
  return flag.empty() ? spec.output : flag;
}

// Writes the aggregate table to stdout and, with an output directory, the
// CSV, the sweep JSON and one report per run. Returns the exit status.
int emit_sweep(const SweepResult& result, const std::string& dir, const std::string& stem) {
  std::cout << result.table();
  for (const auto& cell : result.cells) {
    for (const auto& f : cell.failures) std::cerr << "run failed in " << cell.name << ": " << f << "\n";
  }
  if (!dir.empty()) {
    const fs::path base(dir);
    write_file(base / (stem + ".csv"), result.csv());
    write_file(base / (stem + ".txt"), result.table());
    write_file(base / (stem + ".json"), result.to_json().dump(2) + "\n");
    for (const auto& cell : result.cells) {
      for (const auto& r : cell.runs) {
        write_file(base / "runs" / (file_stem(cell.name) + "-seed" + std::to_string(r.seed) + ".json"),
                   r.to_json().dump(2) + "\n");
      }
    }
  }
  return result.any_failure() ? 1 : 0;
}

std::vector<double> parse_ratios(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad ratio '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("no ratios given");
  return out;
}

int run_bench(const std::string& config, const Overrides& o, const std::string& sizes_text,
              const std::string& dir) {
  ExperimentSpec base = load_with_overrides(config, o);
  std::vector<double> sizes = parse_ratios(sizes_text);
  std::ostringstream table;
  table << "n        bytes/client  nonzeros  bound     seconds\n";
  int status = 0;
  for (double sz : sizes) {
    ExperimentSpec s = base;
    s.dataset.n = static_cast<Index>(sz);
    try {
      s.validate();
      RunReport r = run_experiment(s);
      std::size_t bytes = 0, nnz = 0, bound = 0;
      for (const auto& m : r.message_sizes) {
        bytes = std::max(bytes, m.bytes);
        nnz = std::max(nnz, m.nonzeros);
        bound = std::max(bound, m.bound);
      }
      char line[160];
      std::snprintf(line, sizeof line, "%-8lld %-13zu %-9zu %-9zu %.3f\n",
                    static_cast<long long>(s.dataset.n), bytes, nnz, bound, r.wall_clock_seconds);
      table << line;
    } catch (const std::exception& e) {
      std::cerr << "bench n=" << s.dataset.n << " failed: " << e.what() << "\n";
      status = 1;
    }
  }
  std::cout << table.str();
  if (!dir.empty()) write_file(fs::path(dir) / "bench.txt", table.str());
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated graph clustering experiments"};
  app.require_subcommand(1);

  std::string config, out, ratios = "0.2,0.4,0.6,0.8,0.95", sizes = "500,1000,2000,4000";
  int repeats = 10;
  Overrides o;

  auto* run = app.add_subcommand("run", "Run one experiment and write its report");
  run->add_option("--config", config, "Experiment JSON")->required();
  run->add_option("--out", out, "Output directory (report goes to stdout when absent)");
  add_overrides(run, o);

  auto* sweep = app.add_subcommand("sweep", "Repeat one experiment over consecutive seeds");
  sweep->add_option("--config", config)->required();
  sweep->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  sweep->add_option("--out", out);
  add_overrides(sweep, o);

  auto* ablate = app.add_subcommand("ablate", "Run the five ablation arms on shared seeds");
  ablate->add_option("--config", config)->required();
  ablate->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  ablate->add_option("--out", out);
  add_overrides(ablate, o);

  auto* het = app.add_subcommand("het-sweep", "Sweep the heterogeneity ratio");
  het->add_option("--config", config)->required();
  het->add_option("--ratios", ratios, "Comma separated ratios");
  het->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  het->add_option("--out", out);
  add_overrides(het, o);

  auto* bench = app.add_subcommand("bench", "Message size and runtime against sample count");
  bench->add_option("--config", config)->required();
  bench->add_option("--sizes", sizes, "Comma separated dataset sizes");
  bench->add_option("--out", out);
  add_overrides(bench, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentSpec spec = load_with_overrides(config, o);
      RunReport report = run_experiment(spec);
      const std::string text = report.to_json().dump(2) + "\n";
      const std::string dir = out_dir(out, spec);
      if (dir.empty()) {
        std::cout << text;
      } else {
        const fs::path path = fs::path(dir) / (file_stem(spec.name) + "-seed" +
                                               std::to_string(report.seed) + ".json");
        write_file(path, text);
        std::cout << spec.name << " seed " << report.seed << ": ACC " << report.metrics.acc
                  << " NMI " << report.metrics.nmi << " ARI " << report.metrics.ari << " -> "
                  << path.string() << "\n";
      }
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
      return 0;
    }
    if (bench->parsed()) return run_bench(config, o, sizes, out);

    ExperimentSpec spec = load_with_overrides(config, o);
    std::vector<ExperimentSpec> specs{spec};
    std::string stem = file_stem(spec.name);
    if (ablate->parsed()) {
      specs = expand_ablation(spec);
      stem += "-ablation";
    } else if (het->parsed()) {
      specs = expand_heterogeneity(spec, parse_ratios(ratios));
      if (spec.mode != RunMode::kBaselineKMeans) {
        ExperimentSpec b = spec;
        b.mode = RunMode::kBaselineKMeans;
        b.ablation = {};
        for (auto& s : expand_heterogeneity(b, parse_ratios(ratios))) {
          s.name += "/baseline";
          specs.push_back(std::move(s));
        }
      }
      stem += "-het";
    } else {
      stem += "-sweep";
    }
    SweepResult result = run_sweep(specs, repeats, spec.federation.seed, worker_count());
    return emit_sweep(result, out_dir(out, spec), stem);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

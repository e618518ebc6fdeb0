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

// Python bindings. Experiment specs and reports cross the boundary as JSON
// text; the Python package turns them into dicts.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fedgraph/data.hpp"
#include "fedgraph/error.hpp"
#include "fedgraph/experiment.hpp"
#include "fedgraph/federation.hpp"
#include "fedgraph/metrics.hpp"
#include "fedgraph/wire.hpp"

namespace py = pybind11;

namespace fedgraph {
namespace {

ExperimentSpec spec_from_text(const std::string& text) {
  ExperimentSpec spec = ExperimentSpec::from_json(nlohmann::json::parse(text));
  spec.validate();
  return spec;
}

FederationConfig federation_from_text(const std::string& text) {
  return federation_from_json(nlohmann::json::parse(text));
}

py::tuple dataset_tuple(const LabeledDataset& ds) {
  return py::make_tuple(ds.points.data(), ds.labels);
}

std::vector<PointSet> point_sets(const std::vector<Matrix>& arrays) {
  std::vector<PointSet> out;
  out.reserve(arrays.size());
  for (const auto& a : arrays) out.emplace_back(a);
  return out;
}

py::dict run_dict(const FederationRun& run) {
  py::dict out;
  out["labels"] = run.result.assignments.labels;
  out["client_labels"] = run.client_labels;
  out["noise_draws"] = run.noise_draws;
  out["components"] = run.result.diagnostics.components;
  std::vector<bool> bounded;
  for (const auto& s : run.upload_sizes) bounded.push_back(s.within_bound);
  out["uploads_within_bound"] = bounded;
  std::vector<py::bytes> results;
  for (const auto& b : run.result_bytes) {
    results.emplace_back(reinterpret_cast<const char*>(b.data()), b.size());
  }
  out["result_bytes"] = results;
  return out;
}

}  // namespace
}  // namespace fedgraph

PYBIND11_MODULE(_fedgraph, m) {
  using namespace fedgraph;
  m.doc() = "Federated graph clustering engine";

  // Translators run newest first, so the base class goes in before its
  // subclasses.
  static py::exception<Error> base(m, "FedGraphError", PyExc_RuntimeError);
  static py::exception<InvalidInputError> invalid(m, "InvalidInputError", base.ptr());
  static py::exception<NumericError> numeric(m, "NumericError", base.ptr());
  static py::exception<DecodeError> decode(m, "DecodeError", base.ptr());
  static py::exception<IoError> io(m, "IoError", base.ptr());
  static py::exception<ParseError> parse(m, "ParseError", base.ptr());
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  static py::exception<ProtocolError> protocol(m, "ProtocolError", base.ptr());
  static py::exception<ClientError> client(m, "ClientError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ClientError& e) {
      py::set_error(client, e.what());
    } catch (const ProtocolError& e) {
      py::set_error(protocol, e.what());
    } catch (const ConfigError& e) {
      py::set_error(config, e.what());
    } catch (const ParseError& e) {
      py::set_error(parse, e.what());
    } catch (const IoError& e) {
      py::set_error(io, e.what());
    } catch (const DecodeError& e) {
      py::set_error(decode, e.what());
    } catch (const NumericError& e) {
      py::set_error(numeric, e.what());
    } catch (const InvalidInputError& e) {
      py::set_error(invalid, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    } catch (const nlohmann::json::exception& e) {
      py::set_error(config, e.what());
    }
  });

  m.def(
      "load_spec_json", [](const std::string& path) { return load_spec(path).to_json().dump(); },
      py::arg("path"), "Reads a config file and returns the resolved spec as JSON text.");
  m.def(
      "run_experiment_json",
      [](const std::string& spec) {
        const ExperimentSpec s = spec_from_text(spec);
        py::gil_scoped_release unlocked;
        return run_experiment(s).to_json().dump();
      },
      py::arg("spec"), "Runs one experiment; returns the report as JSON text.");
  m.def(
      "run_sweep_json",
      [](const std::vector<std::string>& specs, int repeats, std::uint64_t base_seed,
         int threads) {
        std::vector<ExperimentSpec> parsed;
        for (const auto& s : specs) parsed.push_back(spec_from_text(s));
        py::gil_scoped_release unlocked;
        return run_sweep(parsed, repeats, base_seed, threads).to_json().dump();
      },
      py::arg("specs"), py::arg("repeats"), py::arg("base_seed"), py::arg("threads") = 1);
  m.def(
      "ablation_specs_json",
      [](const std::string& spec) {
        std::vector<std::string> out;
        for (const auto& s : expand_ablation(spec_from_text(spec))) out.push_back(s.to_json().dump());
        return out;
      },
      py::arg("spec"));
  m.def(
      "heterogeneity_specs_json",
      [](const std::string& spec, const std::vector<double>& ratios) {
        std::vector<std::string> out;
        for (const auto& s : expand_heterogeneity(spec_from_text(spec), ratios)) {
          out.push_back(s.to_json().dump());
        }
        return out;
      },
      py::arg("spec"), py::arg("ratios"));

  m.def(
      "gen_moons",
      [](Index n, double noise, std::uint64_t seed) { return dataset_tuple(gen_moons(n, noise, seed)); },
      py::arg("n"), py::arg("noise") = 0.06, py::arg("seed") = 0);
  m.def(
      "gen_ring",
      [](Index n, Index dim, int classes, std::uint64_t seed) {
        return dataset_tuple(gen_ring(n, dim, classes, seed));
      },
      py::arg("n"), py::arg("dim") = 20, py::arg("classes") = 5, py::arg("seed") = 0);

  m.def(
      "run_one_shot",
      [](const std::vector<Matrix>& clients, const std::string& federation) {
        const FederationConfig c = federation_from_text(federation);
        const std::vector<PointSet> data = point_sets(clients);
        FederationRun run;
        {
          py::gil_scoped_release unlocked;
          run = run_one_shot(data, c);
        }
        return run_dict(run);
      },
      py::arg("clients"), py::arg("federation"));
  m.def(
      "run_iterative",
      [](const std::vector<Matrix>& clients, const std::string& federation) {
        const FederationConfig c = federation_from_text(federation);
        const std::vector<PointSet> data = point_sets(clients);
        FederationRun run;
        {
          py::gil_scoped_release unlocked;
          run = run_iterative(data, c);
        }
        return run_dict(run);
      },
      py::arg("clients"), py::arg("federation"));

  m.def(
      "accuracy",
      [](const std::vector<int>& t, const std::vector<int>& p) { return hungarian_accuracy(t, p); },
      py::arg("truth"), py::arg("predicted"));
  m.def(
      "nmi", [](const std::vector<int>& t, const std::vector<int>& p) { return nmi(t, p); },
      py::arg("truth"), py::arg("predicted"));
  m.def(
      "ari", [](const std::vector<int>& t, const std::vector<int>& p) { return ari(t, p); },
      py::arg("truth"), py::arg("predicted"));

  m.def(
      "message_type",
      [](const py::bytes& data) {
        const std::string raw = data;
        const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
        const Message msg = decode_message(bytes);
        return std::string(std::holds_alternative<UploadMessage>(msg) ? "upload" : "feedback");
      },
      py::arg("data"), "Decodes an upload or feedback message and names its type.");

  m.attr("SPEC_SCHEMA_VERSION") = kSpecSchemaVersion;
  m.attr("REPORT_SCHEMA_VERSION") = kReportSchemaVersion;
}

# Copyright 2026 The FedGraph Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Federated graph clustering engine.

Experiment specs and reports are plain dicts with the same layout as the
JSON configs under ``configs/``.
"""

from __future__ import annotations

import json
import os
from typing import Any, Iterable, Mapping, Sequence, Union

import numpy as np

from ._fedgraph import (
    REPORT_SCHEMA_VERSION,
    SPEC_SCHEMA_VERSION,
    ClientError,
    ConfigError,
    DecodeError,
    FedGraphError,
    InvalidInputError,
    IoError,
    NumericError,
    ParseError,
    ProtocolError,
    accuracy,
    ari,
    gen_moons,
    gen_ring,
    message_type,
    nmi,
)
from . import _fedgraph

__all__ = [
    "REPORT_SCHEMA_VERSION",
    "SPEC_SCHEMA_VERSION",
    "ClientError",
    "ConfigError",
    "DecodeError",
    "FedGraphError",
    "InvalidInputError",
    "IoError",
    "NumericError",
    "ParseError",
    "ProtocolError",
    "accuracy",
    "ablate",
    "ari",
    "gen_moons",
    "gen_ring",
    "heterogeneity_sweep",
    "load_config",
    "message_type",
    "nmi",
    "run",
    "run_iterative",
    "run_one_shot",
    "sweep",
]

Config = Union[str, os.PathLike, Mapping[str, Any]]


def load_config(path: Union[str, os.PathLike]) -> dict:
    """Reads a config file; relative dataset paths resolve against its folder."""
    return json.loads(_fedgraph.load_spec_json(os.fspath(path)))


def _spec(config: Config) -> dict:
    if isinstance(config, Mapping):
        return dict(config)
    return load_config(config)


def run(config: Config, seed: int | None = None) -> dict:
    """Runs one experiment and returns its report."""
    spec = _spec(config)
    if seed is not None:
        spec.setdefault("federation", {})["seed"] = seed
    return json.loads(_fedgraph.run_experiment_json(json.dumps(spec)))


def _sweep(specs: Iterable[str], repeats: int, seed: int | None, threads: int,
           base: dict) -> dict:
    base_seed = seed if seed is not None else base.get("federation", {}).get("seed", 0)
    return json.loads(_fedgraph.run_sweep_json(list(specs), repeats, base_seed, threads))


def sweep(config: Config, repeats: int = 10, seed: int | None = None,
          threads: int = 1) -> dict:
    """Repeats one experiment over consecutive seeds."""
    spec = _spec(config)
    return _sweep([json.dumps(spec)], repeats, seed, threads, spec)


def ablate(config: Config, repeats: int = 20, seed: int | None = None,
           threads: int = 1) -> dict:
    """Runs every ablation arm on the same seeds."""
    spec = _spec(config)
    arms = _fedgraph.ablation_specs_json(json.dumps(spec))
    return _sweep(arms, repeats, seed, threads, spec)


def heterogeneity_sweep(config: Config, ratios: Sequence[float] = (0.2, 0.4, 0.6, 0.8, 0.95),
                        repeats: int = 10, seed: int | None = None,
                        threads: int = 1) -> dict:
    """Repeats the experiment at each heterogeneity ratio."""
    spec = _spec(config)
    cells = _fedgraph.heterogeneity_specs_json(json.dumps(spec), list(ratios))
    return _sweep(cells, repeats, seed, threads, spec)


def _clients(clients: Sequence[np.ndarray]) -> list:
    return [np.ascontiguousarray(c, dtype=np.float64) for c in clients]


def run_one_shot(clients: Sequence[np.ndarray], federation: Mapping[str, Any]) -> dict:
    """One upload and aggregation round over in-memory client arrays."""
    return _fedgraph.run_one_shot(_clients(clients), json.dumps(dict(federation)))


def run_iterative(clients: Sequence[np.ndarray], federation: Mapping[str, Any]) -> dict:
    """Round 0 plus ``federation["rounds"]`` feedback rounds."""
    return _fedgraph.run_iterative(_clients(clients), json.dumps(dict(federation)))

"""Experiment configuration: YAML in, validated dataclasses out.

A configuration looks like::

    name: example_sec4
    plant:
      r_p: [0, 0, 0]
      C_p: [1, 0, 0]
    alpha1: [1, 0]
    graph:
      n_observers: 5
      edges:              # [i, j, mu] with i < j, node 0 is the plant
        - [0, 1, 1.0]
        - ...
      # or instead of edges:
      # generator: random-connected   (complete | path | star | random-connected)
      # weight: 1.0                   (complete, path, star)
      # weight_range: [0.1, 2.0]      (random-connected)
      # seed: 42                      (random-connected)
    grid: {t_max: 10.0, step: 0.01}
    horizons: [10, 50, 100, 500, 1000]
    outputs: [traces, averages, report]

An optional ``unchecked`` section with ``R_o`` and ``b`` bypasses synthesis;
it exists for negative controls.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import graph as _graph
from .errors import ParseError, ValidationError
from .graph import ObserverGraph
from .spin import PlantSpec
from .synthesis import CouplingScheme

GENERATORS = ("complete", "path", "star", "random-connected")
OUTPUTS = ("traces", "averages", "report")
BUNDLED = ("example_sec4",)


@dataclass
class GraphConfig:
    n_observers: int
    edges: list[tuple[int, int, float]] | None = None
    generator: str | None = None
    weight: float = 1.0
    weight_range: tuple[float, float] = (0.1, 2.0)
    seed: int | None = None
    edge_prob: float = 0.3

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"n_observers": self.n_observers}
        if self.edges is not None:
            d["edges"] = [[i, j, mu] for i, j, mu in self.edges]
        else:
            d["generator"] = self.generator
            if self.generator == "random-connected":
                d["weight_range"] = list(self.weight_range)
                d["seed"] = self.seed
                d["edge_prob"] = self.edge_prob
            else:
                d["weight"] = self.weight
        return d


@dataclass
class ExperimentConfig:
    graph: GraphConfig | None
    plant_r: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    plant_C: list[float] = field(default_factory=lambda: [1.0, 0.0, 0.0])
    alpha1: list[float] = field(default_factory=lambda: [1.0, 0.0])
    t_max: float = 10.0
    step: float = 0.01
    horizons: list[float] = field(default_factory=lambda: [10.0, 50.0, 100.0, 500.0, 1000.0])
    outputs: list[str] = field(default_factory=lambda: list(OUTPUTS))
    name: str = "experiment"
    unchecked_R_o: list[list[float]] | None = None
    unchecked_b: list[float] | None = None

    @property
    def plant(self) -> PlantSpec:
        return PlantSpec(r_p=self.plant_r, C_p=self.plant_C)

    @property
    def scheme(self) -> CouplingScheme:
        return CouplingScheme.for_plant(self.plant, self.alpha1)

    @property
    def is_unchecked(self) -> bool:
        return self.unchecked_R_o is not None

    def build_graph(self) -> ObserverGraph:
        g = self.graph
        if g is None:
            raise ValidationError("no graph section", field="graph")
        if g.edges is not None:
            return ObserverGraph.from_edges(g.n_observers, g.edges)
        if g.generator == "complete":
            return _graph.complete_graph(g.n_observers, g.weight)
        if g.generator == "path":
            return _graph.path_graph(g.n_observers, g.weight)
        if g.generator == "star":
            return _graph.star_graph(g.n_observers, g.weight)
        return _graph.random_connected_graph(
            g.n_observers, g.seed, g.weight_range, g.edge_prob
        )

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "name": self.name,
            "plant": {"r_p": list(self.plant_r), "C_p": list(self.plant_C)},
            "alpha1": list(self.alpha1),
        }
        if self.graph is not None:
            d["graph"] = self.graph.to_dict()
        d["grid"] = {"t_max": self.t_max, "step": self.step}
        d["horizons"] = list(self.horizons)
        d["outputs"] = list(self.outputs)
        if self.is_unchecked:
            d["unchecked"] = {"R_o": self.unchecked_R_o, "b": self.unchecked_b}
        return d

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False, default_flow_style=None)


def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"expected a number, got {value!r}", field=where)
    value = float(value)
    if not np.isfinite(value):
        raise ValidationError("must be finite", field=where)
    return value


def _vector(value, length: int, where: str) -> list[float]:
    if not isinstance(value, list) or len(value) != length:
        raise ValidationError(f"expected a list of {length} numbers, got {value!r}", field=where)
    return [_num(v, f"{where}[{k}]") for k, v in enumerate(value)]


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"expected an integer, got {value!r}", field=where)
    return value


def _parse_graph(raw) -> GraphConfig:
    if not isinstance(raw, dict):
        raise ValidationError("expected a mapping", field="graph")
    if raw.get("plant_node", 0) != 0:
        raise ValidationError("the plant must be node 0", field="graph.plant_node")
    n = _int(raw.get("n_observers"), "graph.n_observers")
    if n < 1:
        raise ValidationError("need at least one observer", field="graph.n_observers")
    has_edges = "edges" in raw
    has_gen = "generator" in raw
    if has_edges == has_gen:
        raise ValidationError("give exactly one of 'edges' or 'generator'", field="graph")
    if has_edges:
        edges = []
        seen = set()
        if not isinstance(raw["edges"], list) or not raw["edges"]:
            raise ValidationError("expected a nonempty list of [i, j, mu]", field="graph.edges")
        for k, e in enumerate(raw["edges"]):
            where = f"graph.edges[{k}]"
            if not isinstance(e, list) or len(e) != 3:
                raise ValidationError(f"expected [i, j, mu], got {e!r}", field=where)
            i, j = _int(e[0], where + "[0]"), _int(e[1], where + "[1]")
            mu = _num(e[2], where + "[2]")
            if not i < j:
                raise ValidationError(f"edge ({i}, {j}) must have i < j", field=where)
            if i < 0 or j > n:
                raise ValidationError(f"edge ({i}, {j}) is outside nodes 0..{n}", field=where)
            if mu <= 0:
                raise ValidationError(f"edge ({i}, {j}) has weight {mu}; must be > 0", field=where)
            if (i, j) in seen:
                raise ValidationError(f"edge ({i}, {j}) listed twice", field=where)
            seen.add((i, j))
            edges.append((i, j, mu))
        return GraphConfig(n, edges=edges)

    gen = raw["generator"]
    if gen not in GENERATORS:
        raise ValidationError(f"unknown generator {gen!r}; one of {GENERATORS}", field="graph.generator")
    gc = GraphConfig(n, generator=gen)
    if gen == "random-connected":
        lo, hi = _vector(raw.get("weight_range", [0.1, 2.0]), 2, "graph.weight_range")
        if not 0 < lo <= hi:
            raise ValidationError("need 0 < low <= high", field="graph.weight_range")
        gc.weight_range = (lo, hi)
        seed = raw.get("seed", 0)
        gc.seed = _int(seed, "graph.seed")
        if gc.seed < 0:
            raise ValidationError("seed must be nonnegative", field="graph.seed")
        gc.edge_prob = _num(raw.get("edge_prob", 0.3), "graph.edge_prob")
        if not 0 <= gc.edge_prob <= 1:
            raise ValidationError("must lie in [0, 1]", field="graph.edge_prob")
    else:
        gc.weight = _num(raw.get("weight", 1.0), "graph.weight")
        if gc.weight <= 0:
            raise ValidationError(f"weight {gc.weight} must be > 0", field="graph.weight")
    return gc


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ParseError("configuration must be a mapping at the top level")
    known = {"name", "plant", "alpha1", "graph", "grid", "horizons", "outputs", "unchecked"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValidationError(f"unknown keys {unknown}", field="<root>")

    plant = raw.get("plant", {})
    if not isinstance(plant, dict):
        raise ValidationError("expected a mapping", field="plant")
    r_p = _vector(plant.get("r_p", [0, 0, 0]), 3, "plant.r_p")
    C_p = _vector(plant.get("C_p", [1, 0, 0]), 3, "plant.C_p")
    if not any(C_p):
        raise ValidationError("C_p must be nonzero", field="plant.C_p")
    alpha1 = _vector(raw.get("alpha1", [1, 0]), 2, "alpha1")
    if not any(alpha1):
        raise ValidationError("alpha1 must be nonzero", field="alpha1")

    grid = raw.get("grid", {})
    if not isinstance(grid, dict):
        raise ValidationError("expected a mapping", field="grid")
    t_max = _num(grid.get("t_max", 10.0), "grid.t_max")
    step = _num(grid.get("step", 0.01), "grid.step")
    if t_max <= 0:
        raise ValidationError(f"t_max must be > 0, got {t_max}", field="grid.t_max")
    if step <= 0 or step > t_max:
        raise ValidationError(f"step must lie in (0, t_max], got {step}", field="grid.step")

    horizons = raw.get("horizons", [10, 50, 100, 500, 1000])
    if not isinstance(horizons, list) or not horizons:
        raise ValidationError("expected a nonempty list", field="horizons")
    horizons = [_num(h, f"horizons[{k}]") for k, h in enumerate(horizons)]
    if any(h <= 0 for h in horizons):
        raise ValidationError("horizons must be positive", field="horizons")

    outputs = raw.get("outputs", list(OUTPUTS))
    if not isinstance(outputs, list) or any(o not in OUTPUTS for o in outputs):
        raise ValidationError(f"entries must be among {OUTPUTS}", field="outputs")

    cfg = ExperimentConfig(
        graph=None,
        plant_r=r_p,
        plant_C=C_p,
        alpha1=alpha1,
        t_max=t_max,
        step=step,
        horizons=horizons,
        outputs=list(outputs),
        name=str(raw.get("name", "experiment")),
    )

    if "unchecked" in raw:
        un = raw["unchecked"]
        if not isinstance(un, dict) or "R_o" not in un or "b" not in un:
            raise ValidationError("expected a mapping with R_o and b", field="unchecked")
        R = un["R_o"]
        if not isinstance(R, list) or not R or len(R) % 2:
            raise ValidationError("R_o must be a square matrix of even size", field="unchecked.R_o")
        size = len(R)
        cfg.unchecked_R_o = [_vector(row, size, f"unchecked.R_o[{k}]") for k, row in enumerate(R)]
        cfg.unchecked_b = _vector(un["b"], size, "unchecked.b")
        if "graph" in raw:
            cfg.graph = _parse_graph(raw["graph"])
    else:
        if "graph" not in raw:
            raise ValidationError("missing graph section", field="graph")
        cfg.graph = _parse_graph(raw["graph"])
    return cfg


def parse_config(text: bytes | str) -> ExperimentConfig:
    """Parse and validate a YAML configuration document.

    Raises
    ------
    ParseError
        Empty input, invalid UTF-8 or malformed YAML (with line and column).
    ValidationError
        A field has the wrong type or an invalid value; the message names it.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"config is not valid UTF-8: {exc}") from exc
    if not text.strip():
        raise ParseError("config is empty")
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ParseError(f"malformed config{where}: {exc}") from exc
    if raw is None:
        raise ParseError("config is empty")
    return config_from_dict(raw)


def bundled_config_text(name: str) -> str:
    if name not in BUNDLED:
        raise KeyError(f"no bundled config named {name!r}; available: {BUNDLED}")
    return resources.files("qobsnet.data").joinpath(f"{name}.yaml").read_text("utf-8")


def load_config(source: str | Path) -> ExperimentConfig:
    """Load a config from a path, or by name for the bundled ones."""
    if str(source) in BUNDLED:
        return parse_config(bundled_config_text(str(source)))
    try:
        data = Path(source).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read config {source}: {exc.strerror}") from exc
    return parse_config(data)

"""Experiment orchestration: synthesis reports, trace archives, verification."""
from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from . import dynamics as dyn
from . import graph as _graph
from . import spin
from . import synthesis as syn
from .config import ExperimentConfig
from .errors import GridTooCoarseWarning, ObserverNetworkError

# tolerances used by run_verify
TOL_ALGEBRA = 1e-10
TOL_ZP = 1e-14
TOL_DYNAMICS = 1e-8


def matrix_to_json(M) -> dict[str, Any]:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return {"rows": M.shape[0], "cols": M.shape[1], "data": M.reshape(-1).tolist()}


def matrix_from_json(d: dict[str, Any]) -> np.ndarray:
    return np.asarray(d["data"], dtype=float).reshape(d["rows"], d["cols"])


def realize(cfg: ExperimentConfig) -> tuple[syn.NetworkRealization, syn.AugmentedSystem]:
    if cfg.is_unchecked:
        real = syn.realization_unchecked(cfg.unchecked_R_o, cfg.unchecked_b, cfg.alpha1)
    else:
        real = syn.build_realization(cfg.build_graph(), cfg.scheme)
    return real, syn.assemble_augmented(cfg.plant, real)


def run_synthesize(cfg: ExperimentConfig) -> dict[str, Any]:
    """Synthesize the network and return a JSON-ready report.

    Synthesis and certification errors propagate to the caller.
    """
    real, aug = realize(cfg)
    cert = syn.certify_positive_definite(real)
    return {
        "name": cfg.name,
        "config_sha256": cfg.digest(),
        "version": __version__,
        "n_observers": real.n_observers,
        "omega": real.omega.tolist(),
        "R_o": matrix_to_json(real.R_o),
        "A_o": matrix_to_json(real.A_o),
        "b": real.b.tolist(),
        "C_o": matrix_to_json(real.C_o),
        "A_a": matrix_to_json(aug.A_a),
        "C_a": matrix_to_json(aug.C_a),
        "certificate": {
            "lambda_min": cert.lambda_min,
            "lambda_max": cert.lambda_max,
            "comparison_lambda_min": cert.comparison_lambda_min,
            "laplacian_nullity": cert.laplacian_nullity,
            "n_components": cert.n_components,
            "certified": True,
        },
    }


# --- simulation ---------------------------------------------------------------

@dataclass
class TraceArchive:
    """Coefficient traces and running averages for one experiment.

    ``traces`` and ``running_avg`` are indexed ``[output_row, time, state]``.
    """

    metadata: dict[str, Any]
    grid: np.ndarray
    traces: np.ndarray
    running_avg: np.ndarray
    horizon_averages: dict[float, np.ndarray]
    report: dict[str, Any]

    def table(self, values: np.ndarray, row: int) -> str:
        """CSV table for output row ``row`` (0-based), one line per time."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n_states = values.shape[2]
        w.writerow(["time"] + [f"row{row + 1}_col{j + 1}" for j in range(n_states)])
        for m, t in enumerate(self.grid):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in values[row, m]])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "metadata": self.metadata,
            "grid": self.grid.tolist(),
            "traces": self.traces.tolist(),
            "running_avg": self.running_avg.tolist(),
            "horizon_averages": [
                {"T": T, "average": matrix_to_json(A)} for T, A in self.horizon_averages.items()
            ],
            "report": self.report,
        }
        return json.dumps(payload, indent=1)

    def write(self, out_dir: str | Path, outputs=("traces", "averages", "report")) -> list[Path]:
        out = Path(out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OSError(f"cannot create output directory {out}: {exc.strerror}") from exc
        files: dict[str, str] = {}
        for k in range(self.traces.shape[0]):
            if "traces" in outputs:
                files[f"traces_row{k + 1}.csv"] = self.table(self.traces, k)
            if "averages" in outputs:
                files[f"averages_row{k + 1}.csv"] = self.table(self.running_avg, k)
        if "report" in outputs:
            files["report.json"] = json.dumps(self.report, indent=1, sort_keys=True)
        files["archive.json"] = self.to_json()
        written = []
        for name in sorted(files):
            path = out / name
            try:
                path.write_text(files[name], encoding="utf-8")
            except OSError as exc:
                raise OSError(f"cannot write {path}: {exc.strerror}") from exc
            written.append(path)
        return written


def run_simulate(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> TraceArchive:
    """Propagate the augmented system on the configured grid.

    Running averages use the closed form; the simpson quadrature average is
    kept only as a residual in the report.
    """
    real, aug = realize(cfg)
    grid = dyn.uniform_grid(cfg.t_max, cfg.step)
    prop = dyn.propagate(aug, grid)
    result = dyn.coefficient_traces(aug, prop)
    advisories = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", GridTooCoarseWarning)
        quad = dyn.time_average_quadrature(result)
    advisories += [f"GridTooCoarse: {w.message}" for w in caught
                   if issubclass(w.category, GridTooCoarseWarning)]
    exact = dyn.running_average_closed_form(aug, grid)
    horizon_averages = {float(T): dyn.time_average_closed_form(aug, T) for T in cfg.horizons}
    e1 = np.zeros(aug.A_a.shape[0])
    e1[0] = 1.0
    report = {
        "plant_row_residual": result.residuals["plant_row"],
        "quadrature_gap": float(np.max(np.abs(quad - exact))),
        "horizon_deviation": {
            repr(T): float(np.max(np.linalg.norm(A[1:] - e1, axis=1)))
            for T, A in horizon_averages.items()
        },
        "advisories": advisories,
    }
    archive = TraceArchive(
        metadata={"name": cfg.name, "config_sha256": cfg.digest(), "version": __version__},
        grid=grid,
        traces=result.traces,
        running_avg=exact,
        horizon_averages=horizon_averages,
        report=report,
    )
    if out_dir is not None:
        archive.write(out_dir, cfg.outputs)
    return archive


# --- verification -------------------------------------------------------------

@dataclass
class Check:
    name: str
    value: float | None
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        val = "n/a" if self.value is None else f"{self.value:.3e}"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"[{status}] {self.name:<36} value={val:<10} tol={self.tolerance:.9g}{extra}"


@dataclass
class VerifyReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, value: float | None, tol: float, passed: bool | None = None, detail: str = ""):
        if passed is None:
            passed = value is not None and value <= tol
        self.checks.append(Check(name, value, tol, bool(passed), detail))

    def attempt(self, name: str, tol: float, fn: Callable[[], float]) -> float | None:
        try:
            value = float(fn())
        except (ObserverNetworkError, np.linalg.LinAlgError, ValueError) as exc:
            self.add(name, None, tol, False, f"{type(exc).__name__}: {exc}")
            return None
        self.add(name, value, tol)
        return value

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "value": c.value, "tolerance": c.tolerance,
                 "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }

    def text(self) -> str:
        lines = [c.line() for c in self.checks]
        lines.append("ALL PASS" if self.passed else "SOME CHECKS FAILED")
        return "\n".join(lines)


def algebra_checks(report: VerifyReport, rng: np.random.Generator, n_pairs: int = 1000) -> None:
    report.add("pauli_commutators", spin.pauli_commutator_residual(), 0.0)
    pairs = rng.uniform(-10, 10, size=(n_pairs, 2, 3))
    scaled = max(
        spin.theta_identities_residual(b, g)
        / ((1 + np.linalg.norm(b)) * (1 + np.linalg.norm(g)))
        for b, g in pairs
    )
    report.add("theta_identities", scaled, TOL_ALGEBRA, detail="scaled by (1+|b|)(1+|g|)")


def _network_residuals(plant: spin.PlantSpec, real, aug, grid, horizons, rng) -> dict[str, float]:
    """Residuals of one realization; raises if the realization is not certified."""
    cert = syn.certify_positive_definite(real)
    prop = dyn.propagate(aug, grid)
    out = {
        "pd_margin": cert.lambda_min / cert.lambda_max,
        "plant_row": float(np.max(np.abs(prop.phi[:, 0, :] - np.eye(prop.phi.shape[1])[0]))),
        "symplectic": dyn.check_symplectic_ccr(real, prop),
        "hamiltonian": dyn.check_hamiltonian_conservation(
            real, rng.standard_normal(2 * real.n_observers), prop),
        "norm_bound": dyn.check_norm_bound(real, prop),
        "zp_invariance": spin.verify_zp_invariance(plant) / float(plant.C_p @ plant.C_p),
    }
    conv = dyn.check_convergence(aug, real, horizons)
    out["convergence"] = float(np.max(conv.deviation * conv.horizons / conv.bound_constant))
    return out


def _add_network_checks(report: VerifyReport, res: dict[str, float], suffix: str = "") -> None:
    report.add("positive_definite" + suffix, res["pd_margin"], syn.PD_RTOL,
               passed=res["pd_margin"] > syn.PD_RTOL, detail="lambda_min / lambda_max")
    report.add("plant_output_constant" + suffix, res["plant_row"], TOL_DYNAMICS)
    report.add("zp_invariance" + suffix, res["zp_invariance"], TOL_ZP)
    report.add("symplectic_ccr" + suffix, res["symplectic"], TOL_DYNAMICS)
    report.add("hamiltonian_drift" + suffix, res["hamiltonian"], TOL_DYNAMICS)
    report.add("norm_bound_ratio" + suffix, res["norm_bound"], 1 + TOL_DYNAMICS)
    report.add("convergence_bound_ratio" + suffix, res["convergence"], 1.0,
               detail="max_T D(T) T / K")


def run_verify(cfg: ExperimentConfig | None = None, seed: int = 42, count: int = 50,
               n_range: tuple[int, int] = (1, 8), weight_range: tuple[float, float] = (0.1, 2.0),
               t_max: float = 50.0, step: float = 0.5) -> VerifyReport:
    """Run every invariant check and collect pass/fail lines.

    With a config, the checks run on its network and grid. Without one, a
    sweep over ``count`` random connected graphs drawn with ``seed`` is used.
    Failures are recorded in the report, never raised.
    """
    rng = np.random.default_rng(seed)
    report = VerifyReport()
    algebra_checks(report, rng)

    if cfg is not None:
        _verify_config(report, cfg, rng)
        return report

    plant = spin.PlantSpec()
    grid = dyn.uniform_grid(t_max, step)
    horizons = [100.0, 200.0, 400.0, 800.0]
    worst: dict[str, float] = {}
    failures = []
    for k in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        g = _graph.random_connected_graph(n, rng, weight_range)
        alpha1 = rng.uniform(-1, 1, size=2)
        try:
            real = syn.build_realization(g, syn.CouplingScheme.for_plant(plant, alpha1))
            res = _network_residuals(plant, real, syn.assemble_augmented(plant, real),
                                     grid, horizons, rng)
        except ObserverNetworkError as exc:
            failures.append(f"graph {k}: {type(exc).__name__}: {exc}")
            continue
        for key, v in res.items():
            if key == "pd_margin":
                worst[key] = min(worst.get(key, np.inf), v)
            else:
                worst[key] = max(worst.get(key, -np.inf), v)
    report.add("sweep_synthesis", float(len(failures)), 0.0,
               detail=f"{count} graphs, seed {seed}" + ("; " + "; ".join(failures[:3]) if failures else ""))
    if worst:
        _add_network_checks(report, worst, suffix=" (sweep max)")
    return report


def _verify_config(report: VerifyReport, cfg: ExperimentConfig, rng: np.random.Generator) -> None:
    plant = cfg.plant
    report.add("zp_invariance", spin.verify_zp_invariance(plant) / float(plant.C_p @ plant.C_p), TOL_ZP)
    try:
        real, aug = realize(cfg)
    except ObserverNetworkError as exc:
        report.add("synthesis", None, 0.0, False, f"{type(exc).__name__}: {exc}")
        return
    grid = dyn.uniform_grid(cfg.t_max, cfg.step)
    prop = dyn.propagate(aug, grid)

    certified = report.attempt(
        "positive_definite", syn.PD_RTOL,
        lambda: _pd_margin(real)) is not None
    if certified:
        report.checks[-1].passed = report.checks[-1].value > syn.PD_RTOL
        report.checks[-1].detail = "lambda_min / lambda_max"
    report.add("plant_output_constant",
               float(np.max(np.abs(prop.phi[:, 0, :] - np.eye(prop.phi.shape[1])[0]))), TOL_DYNAMICS)
    report.attempt("symplectic_ccr", TOL_DYNAMICS, lambda: dyn.check_symplectic_ccr(real, prop))
    x0 = rng.standard_normal(2 * real.n_observers)
    report.attempt("hamiltonian_drift", TOL_DYNAMICS,
                   lambda: dyn.check_hamiltonian_conservation(real, x0, prop))
    if not certified:
        for name in ("norm_bound_ratio", "convergence_bound_ratio"):
            report.add(name, None, 1.0, False, "skipped: R_o not certified")
        return
    report.attempt("norm_bound_ratio", 1 + TOL_DYNAMICS, lambda: dyn.check_norm_bound(real, prop))
    report.add("consensus_target",
               float(np.max(np.abs(syn.consensus_target(real) - 1.0))), 1e-12)

    def conv_ratio():
        conv = dyn.check_convergence(aug, real, cfg.horizons)
        return float(np.max(conv.deviation * conv.horizons / conv.bound_constant))
    report.attempt("convergence_bound_ratio", 1.0, conv_ratio)


def _pd_margin(real) -> float:
    cert = syn.certify_positive_definite(real)
    return cert.lambda_min / cert.lambda_max

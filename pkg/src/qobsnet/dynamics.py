"""Propagation of the augmented coefficient dynamics and invariant checks.

The augmented drift has the block form ``[[0, 0], [b, A_o]]``, so the
propagator is

    Phi(t) = [[1, 0], [(exp(A_o t) - I) A_o^{-1} b, exp(A_o t)]]

and its time average over ``[0, T]`` has an exact expression in terms of
``exp(A_o T)``. Quadrature averages are provided as an independent check.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.integrate import cumulative_simpson, cumulative_trapezoid

from .errors import (
    BadGridError,
    GridTooCoarseWarning,
    NonFiniteError,
    SingularDriftError,
)
from .synthesis import AugmentedSystem, NetworkRealization

# advisory threshold on max|A| * step
COARSE_GRID_LIMIT = 0.5


@dataclass(frozen=True)
class Propagator:
    grid: np.ndarray
    phi: np.ndarray  # (K, n, n)

    def __len__(self):
        return len(self.grid)


@dataclass
class SimulationResult:
    """Output coefficients ``C_a Phi(t)`` on a time grid.

    ``traces[k, m, j]`` is the coefficient of state ``j`` in output ``k`` at
    ``grid[m]``. ``running_avg`` has the same layout once computed.
    """

    grid: np.ndarray
    traces: np.ndarray
    running_avg: np.ndarray | None = None
    residuals: dict[str, float] = field(default_factory=dict)
    max_rate: float = 0.0


@dataclass(frozen=True)
class ConvergenceReport:
    horizons: np.ndarray
    deviation: np.ndarray
    bound_constant: float

    @property
    def bound(self) -> np.ndarray:
        return self.bound_constant / self.horizons

    @property
    def within_bound(self) -> bool:
        return bool(np.all(self.deviation <= self.bound * (1 + 1e-9)))


def matrix_exp(A, t: float = 1.0) -> np.ndarray:
    """``exp(A t)`` by scaling and squaring with a Pade approximant."""
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)) or not np.isfinite(t):
        raise NonFiniteError("matrix_exp needs finite input")
    return scipy.linalg.expm(A * t)


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise BadGridError("time grid is empty")
    if not np.all(np.isfinite(grid)):
        raise BadGridError("time grid has non-finite entries")
    if grid[0] != 0.0:
        raise BadGridError(f"time grid must start at 0, starts at {grid[0]}")
    if np.any(np.diff(grid) <= 0):
        raise BadGridError("time grid must be strictly increasing")
    return grid


def uniform_grid(t_max: float, step: float) -> np.ndarray:
    n = int(round(t_max / step))
    return np.linspace(0.0, n * step, n + 1)


def propagate_matrix(A, grid) -> Propagator:
    """``exp(A t_k)`` for every ``t_k`` in ``grid``."""
    grid = _check_grid(grid)
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise NonFiniteError("drift has non-finite entries")
    phi = scipy.linalg.expm(grid[:, None, None] * A[None, :, :])
    phi[0] = np.eye(A.shape[0])
    return Propagator(grid, phi)


def propagate(aug: AugmentedSystem, grid) -> Propagator:
    return propagate_matrix(aug.A_a, grid)


def coefficient_traces(aug: AugmentedSystem, prop: Propagator) -> SimulationResult:
    traces = np.einsum("kn,tnj->ktj", aug.C_a, prop.phi)
    res = SimulationResult(prop.grid, traces, max_rate=float(np.max(np.abs(aug.A_a))))
    res.residuals["plant_row"] = float(np.max(np.abs(traces[0] - aug.C_a[0])))
    return res


def _average_observer_propagator(A_o: np.ndarray, T: float) -> np.ndarray:
    """``(1/T) (exp(A_o T) - I) A_o^{-1}``."""
    n = A_o.shape[0]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu = scipy.linalg.lu_factor(A_o.T, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularDriftError(str(exc)) from exc
    if np.min(np.abs(np.diag(lu[0]))) <= 1e-13 * np.max(np.abs(A_o)):
        raise SingularDriftError("observer drift A_o is singular")
    E = scipy.linalg.expm(A_o * T) - np.eye(n)
    return scipy.linalg.lu_solve(lu, E.T).T / T


def average_propagator(aug: AugmentedSystem, T: float) -> np.ndarray:
    """``(1/T) int_0^T Phi(t) dt`` for the augmented drift."""
    if not T > 0:
        raise ValueError(f"averaging horizon must be positive, got {T}")
    A_o, b = aug.A_o, aug.b
    avg_o = _average_observer_propagator(A_o, T)
    n = A_o.shape[0]
    out = np.zeros((n + 1, n + 1))
    out[0, 0] = 1.0
    out[1:, 1:] = avg_o
    # average of (exp(A_o t) - I) A_o^{-1} b
    out[1:, 0] = (avg_o - np.eye(n)) @ np.linalg.solve(A_o, b)
    return out


def time_average_closed_form(aug: AugmentedSystem, T: float) -> np.ndarray:
    return aug.C_a @ average_propagator(aug, T)


def time_average_quadrature(result: SimulationResult, method: str = "simpson") -> np.ndarray:
    """Running averages ``(1/t) int_0^t trace`` at every grid point.

    The value at ``t = 0`` is the trace itself. Sets ``result.running_avg``
    and returns it. A :class:`GridTooCoarseWarning` is issued when the grid
    step is large relative to the fastest rate in the drift.
    """
    t = result.grid
    if len(t) > 1:
        step = float(np.max(np.diff(t)))
        if result.max_rate * step > COARSE_GRID_LIMIT:
            warnings.warn(
                f"grid step {step:g} is coarse for drift entries up to "
                f"{result.max_rate:g}; quadrature averages may be inaccurate",
                GridTooCoarseWarning,
                stacklevel=2,
            )
    if method == "simpson" and len(t) >= 3:
        integral = cumulative_simpson(result.traces, x=t, axis=1, initial=0.0)
    elif method in ("simpson", "trapezoid"):
        integral = cumulative_trapezoid(result.traces, x=t, axis=1, initial=0.0)
    else:
        raise ValueError(f"unknown quadrature method {method!r}")
    avg = np.empty_like(result.traces)
    avg[:, 0, :] = result.traces[:, 0, :]
    avg[:, 1:, :] = integral[:, 1:, :] / t[1:, None]
    result.running_avg = avg
    return avg


def running_average_closed_form(aug: AugmentedSystem, grid) -> np.ndarray:
    """Closed-form running averages on ``grid``, laid out like ``SimulationResult.traces``."""
    grid = _check_grid(grid)
    out = np.empty((aug.C_a.shape[0], len(grid), aug.A_a.shape[0]))
    out[:, 0, :] = aug.C_a
    for m, T in enumerate(grid[1:], start=1):
        out[:, m, :] = time_average_closed_form(aug, T)
    return out


def convergence_constant(real: NetworkRealization) -> float:
    """Constant ``K`` with ``D(T) <= K / T``.

    The observer rows of the averaged output deviate from ``e_1`` by
    ``-C_o avg(exp(A_o t)) [-u | I]`` where ``u`` is the equilibrium offset,
    and ``|avg(exp(A_o t))| <= (sqrt(kappa) + 1) |R_o^{-1} Theta_o^{-1}| / (2T)``.
    """
    eigs = np.linalg.eigvalsh(real.R_o)
    kappa = eigs[-1] / eigs[0]
    inv = np.linalg.inv(real.R_o) @ np.linalg.inv(real.Theta_o)
    u = np.tile(real.alpha1 / (real.alpha1 @ real.alpha1), real.n_observers)
    return float(
        0.5 * (np.sqrt(kappa) + 1.0)
        * np.linalg.norm(inv, 2)
        * np.linalg.norm(real.C_o, 2)
        * np.sqrt(1.0 + u @ u)
    )


def consensus_deviation(aug: AugmentedSystem, T: float) -> float:
    """``max_i |avg row_i - e_1|`` over the observer output rows."""
    avg = time_average_closed_form(aug, T)
    target = np.zeros(avg.shape[1])
    target[0] = 1.0
    return float(np.max(np.linalg.norm(avg[1:] - target, axis=1)))


def check_convergence(aug: AugmentedSystem, real: NetworkRealization, horizons) -> ConvergenceReport:
    horizons = np.asarray(horizons, dtype=float).reshape(-1)
    dev = np.array([consensus_deviation(aug, T) for T in horizons])
    return ConvergenceReport(horizons, dev, convergence_constant(real))


def _observer_block(real: NetworkRealization, prop: Propagator) -> np.ndarray:
    n = 2 * real.n_observers
    size = prop.phi.shape[-1]
    if size == n:
        return prop.phi
    if size == n + 1:
        return prop.phi[:, 1:, 1:]
    raise ValueError(f"propagator of size {size} does not match a network with {n} observer states")


def check_hamiltonian_conservation(real: NetworkRealization, x0, prop: Propagator) -> float:
    """Max relative drift of ``x^T R_o x`` along ``x(t) = exp(A_o t) x0``."""
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if not np.any(x0):
        raise ValueError("x0 must be nonzero")
    phi = _observer_block(real, prop)
    R = real.R_o
    h0 = x0 @ R @ x0
    xs = phi @ x0
    h = np.einsum("ti,ij,tj->t", xs, R, xs)
    return float(np.max(np.abs(h - h0)) / abs(h0))


def check_symplectic_ccr(real: NetworkRealization, prop: Propagator) -> float:
    """Max over the grid of ``|Phi_o Theta_o Phi_o^T - Theta_o|_2``."""
    phi = _observer_block(real, prop)
    Th = real.Theta_o
    diff = phi @ Th @ np.swapaxes(phi, 1, 2) - Th
    return float(np.max(np.linalg.norm(diff, ord=2, axis=(1, 2))))


def check_norm_bound(real: NetworkRealization, prop: Propagator) -> float:
    """Max over the grid of ``|Phi_o(t)|_2 / sqrt(lambda_max / lambda_min)``."""
    phi = _observer_block(real, prop)
    eigs = np.linalg.eigvalsh(real.R_o)
    bound = np.sqrt(eigs[-1] / eigs[0])
    return float(np.max(np.linalg.norm(phi, ord=2, axis=(1, 2))) / bound)


def spectrum_real_part(real: NetworkRealization) -> float:
    """``max |Re lambda(A_o)| / |A_o|``; zero for a Hamiltonian drift with ``R_o > 0``."""
    lam = np.linalg.eigvals(real.A_o)
    return float(np.max(np.abs(lam.real)) / np.linalg.norm(real.A_o, 2))

"""Construction of the direct-coupled oscillator observer network.

Each observer ``j`` is an oscillator with state ``[q_j, p_j]``. Given a
connected plant-observer graph and a coupling direction ``alpha1``, the
frequencies are fixed by the resonance condition

    omega_j = |alpha1|^2 * (sum of weights of all edges at node j),

which makes the stacked vector ``alpha1 / |alpha1|^2 * z_p`` an equilibrium
of the observer network. The Hamiltonian matrix ``R_o`` is then positive
definite whenever the graph is connected.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import graph as _graph
from .errors import (
    NonzeroPlantHamiltonianError,
    NotPositiveDefiniteError,
    ZeroAlphaError,
)
from .graph import ObserverGraph, ReducedGraph
from .spin import PlantSpec

J = np.array([[0.0, 1.0], [-1.0, 0.0]])

PD_RTOL = 1e-10


def commutation_matrix(n_observers: int) -> np.ndarray:
    """Block diagonal ``diag(J, ..., J)``."""
    return np.kron(np.eye(n_observers), J)


@dataclass(frozen=True)
class CouplingScheme:
    """Coupling directions: ``alpha1`` between observers, ``alpha0 = C_p^T`` to the plant."""

    alpha1: np.ndarray
    alpha0: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))

    def __post_init__(self):
        a1 = np.asarray(self.alpha1, dtype=float).reshape(-1)
        a0 = np.asarray(self.alpha0, dtype=float).reshape(-1)
        if a1.shape != (2,):
            raise ValueError(f"alpha1 must have 2 entries, got shape {a1.shape}")
        if a0.shape != (3,):
            raise ValueError(f"alpha0 must have 3 entries, got shape {a0.shape}")
        if not np.all(np.isfinite(a1)):
            raise ValueError("alpha1 must be finite")
        if not np.any(a1):
            raise ZeroAlphaError("alpha1 must be nonzero")
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "alpha0", a0)

    @classmethod
    def for_plant(cls, plant: PlantSpec, alpha1) -> "CouplingScheme":
        return cls(alpha1=alpha1, alpha0=plant.C_p.copy())

    @property
    def alpha1_norm_sq(self) -> float:
        return float(self.alpha1 @ self.alpha1)


@dataclass(frozen=True)
class NetworkRealization:
    """Synthesized observer network.

    Attributes
    ----------
    omega : ndarray, shape (N,)
        Oscillator frequencies.
    R_o : ndarray, shape (2N, 2N)
        Hamiltonian matrix of the network.
    Theta_o : ndarray, shape (2N, 2N)
        ``diag(J, ..., J)``.
    A_o : ndarray, shape (2N, 2N)
        Drift ``2 Theta_o R_o``.
    b : ndarray, shape (2N,)
        Column through which the constant plant output drives the observers.
    C_o : ndarray, shape (N, 2N)
        Block diagonal output map with rows ``alpha1^T``.
    graph, scheme
        Inputs of the construction; both are ``None`` for realizations built
        with :func:`realization_unchecked`.
    """

    omega: np.ndarray
    R_o: np.ndarray
    Theta_o: np.ndarray
    A_o: np.ndarray
    b: np.ndarray
    C_o: np.ndarray
    alpha1: np.ndarray
    graph: ObserverGraph | None = None
    scheme: CouplingScheme | None = None

    @property
    def n_observers(self) -> int:
        return len(self.omega)

    def reduced_graph(self) -> ReducedGraph | None:
        if self.graph is None:
            return None
        return _graph.reduce(self.graph, float(self.alpha1 @ self.alpha1))


@dataclass(frozen=True)
class AugmentedSystem:
    """Drift and output map on the state ``[z_p, q_1, p_1, ..., q_N, p_N]``."""

    A_a: np.ndarray
    C_a: np.ndarray

    @property
    def n_observers(self) -> int:
        return (self.A_a.shape[0] - 1) // 2

    @property
    def A_o(self) -> np.ndarray:
        return self.A_a[1:, 1:]

    @property
    def b(self) -> np.ndarray:
        return self.A_a[1:, 0]


@dataclass(frozen=True)
class PDCertificate:
    """Positive definiteness evidence for ``R_o``.

    ``comparison_lambda_min`` is the smallest eigenvalue of the N x N
    comparison matrix (reduced Laplacian plus plant attachments), which bounds
    the quadratic form of ``R_o`` from below on per-oscillator norms.
    ``laplacian_nullity`` should equal ``n_components``.
    """

    lambda_min: float
    lambda_max: float
    comparison_lambda_min: float | None = None
    laplacian_nullity: int | None = None
    n_components: int | None = None

    @property
    def condition_number(self) -> float:
        return self.lambda_max / self.lambda_min


def synthesize_omegas(g: ObserverGraph, scheme: CouplingScheme) -> np.ndarray:
    _graph.validate_graph(g)
    s = scheme.alpha1_norm_sq
    omega = np.zeros(g.n_observers)
    for (i, j), mu in g.weights.items():
        # the plant node only contributes to its observer end
        if i > 0:
            omega[i - 1] += mu * s
        omega[j - 1] += mu * s
    return omega


def build_realization(g: ObserverGraph, scheme: CouplingScheme) -> NetworkRealization:
    omega = synthesize_omegas(g, scheme)
    n = g.n_observers
    a1 = scheme.alpha1
    aaT = np.outer(a1, a1)
    R_o = np.zeros((2 * n, 2 * n))
    b = np.zeros(2 * n)
    for j in range(n):
        R_o[2 * j:2 * j + 2, 2 * j:2 * j + 2] = omega[j] * np.eye(2)
    for (i, j), mu in g.weights.items():
        if i == 0:
            b[2 * (j - 1):2 * j] = -2.0 * mu * (J @ a1)
            continue
        bi, bj = 2 * (i - 1), 2 * (j - 1)
        R_o[bi:bi + 2, bj:bj + 2] = -mu * aaT
        R_o[bj:bj + 2, bi:bi + 2] = -mu * aaT
    Theta_o = commutation_matrix(n)
    return NetworkRealization(
        omega=omega,
        R_o=R_o,
        Theta_o=Theta_o,
        A_o=2.0 * Theta_o @ R_o,
        b=b,
        C_o=np.kron(np.eye(n), a1),
        alpha1=a1,
        graph=g,
        scheme=scheme,
    )


def realization_unchecked(R_o, b, alpha1) -> NetworkRealization:
    """Wrap a hand-supplied ``R_o`` and coupling column without any synthesis checks.

    Meant for experiments and negative controls; ``R_o`` need not be
    symmetric. ``omega`` is read off as half the trace of each diagonal block.
    """
    R_o = np.array(R_o, dtype=float)
    b = np.array(b, dtype=float).reshape(-1)
    a1 = np.array(alpha1, dtype=float).reshape(2)
    if R_o.ndim != 2 or R_o.shape[0] != R_o.shape[1] or R_o.shape[0] % 2:
        raise ValueError(f"R_o must be square of even size, got shape {R_o.shape}")
    n = R_o.shape[0] // 2
    if b.shape != (2 * n,):
        raise ValueError(f"b must have {2 * n} entries, got {b.shape}")
    omega = np.array([np.trace(R_o[2 * j:2 * j + 2, 2 * j:2 * j + 2]) / 2 for j in range(n)])
    Theta_o = commutation_matrix(n)
    return NetworkRealization(
        omega=omega,
        R_o=R_o,
        Theta_o=Theta_o,
        A_o=2.0 * Theta_o @ R_o,
        b=b,
        C_o=np.kron(np.eye(n), a1),
        alpha1=a1,
    )


def certify_positive_definite(real: NetworkRealization) -> PDCertificate:
    """Check ``R_o > 0`` directly and along the comparison-matrix route.

    Raises
    ------
    NotPositiveDefiniteError
        If ``R_o`` is not symmetric, if ``lambda_min(R_o) <= 1e-10 lambda_max``,
        or if the comparison matrix fails the same test.
    """
    R = real.R_o
    if not np.allclose(R, R.T, rtol=0.0, atol=1e-12 * max(1.0, np.max(np.abs(R)))):
        raise NotPositiveDefiniteError("R_o is not symmetric")
    eigs = np.linalg.eigvalsh(R)
    lmin, lmax = float(eigs[0]), float(eigs[-1])
    if not (lmax > 0 and lmin > PD_RTOL * lmax):
        raise NotPositiveDefiniteError(
            f"lambda_min(R_o) = {lmin:.3e} is not above {PD_RTOL:g} * lambda_max = {lmax:.3e}"
        )
    rg = real.reduced_graph()
    if rg is None:
        return PDCertificate(lmin, lmax)

    L = _graph.weighted_laplacian(rg)
    comp = _graph.connected_components(rg)
    nullity = _graph.laplacian_nullity(L)
    cmp_eigs = np.linalg.eigvalsh(L + _graph.plant_attachment_diag(rg))
    cmin = float(cmp_eigs[0])
    if not cmin > PD_RTOL * float(cmp_eigs[-1]):
        raise NotPositiveDefiniteError(
            f"comparison matrix has lambda_min = {cmin:.3e}; some component is "
            "not attached to the plant"
        )
    return PDCertificate(lmin, lmax, cmin, nullity, comp.count)


def assemble_augmented(plant: PlantSpec, real: NetworkRealization) -> AugmentedSystem:
    if np.any(plant.r_p != 0):
        raise NonzeroPlantHamiltonianError(
            f"construction requires r_p = 0, got {plant.r_p.tolist()}"
        )
    n = real.n_observers
    A_a = np.zeros((2 * n + 1, 2 * n + 1))
    A_a[1:, 0] = real.b
    A_a[1:, 1:] = real.A_o
    C_a = np.zeros((n + 1, 2 * n + 1))
    C_a[0, 0] = 1.0
    C_a[1:, 1:] = real.C_o
    return AugmentedSystem(A_a, C_a)


def consensus_target(real: NetworkRealization) -> np.ndarray:
    """``C_o`` applied to the equilibrium offset per unit plant output; ones(N)."""
    a1 = real.alpha1
    offset = np.tile(a1 / (a1 @ a1), real.n_observers)
    return real.C_o @ offset

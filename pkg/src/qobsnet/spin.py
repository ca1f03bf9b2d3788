"""Single-qubit operator algebra at the coefficient level.

The Pauli matrices are only used to check the spin commutation relations.
All dynamics in the package work on real coefficient vectors.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class PauliTriple(NamedTuple):
    sigma1: np.ndarray
    sigma2: np.ndarray
    sigma3: np.ndarray


@dataclass(frozen=True)
class PlantSpec:
    """Qubit plant with Hamiltonian ``r_p . x_p`` and scalar output ``C_p x_p``.

    Parameters
    ----------
    r_p : array_like, shape (3,)
        Hamiltonian coefficients. Synthesis requires ``r_p == 0``.
    C_p : array_like, shape (3,) or (1, 3)
        Output row selecting the plant variable to be estimated.
    """

    r_p: np.ndarray = field(default_factory=lambda: np.zeros(3))
    C_p: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))

    def __post_init__(self):
        r_p = np.asarray(self.r_p, dtype=float).reshape(-1)
        C_p = np.asarray(self.C_p, dtype=float).reshape(-1)
        if r_p.shape != (3,):
            raise ValueError(f"r_p must have 3 entries, got shape {r_p.shape}")
        if C_p.shape != (3,):
            raise ValueError(f"C_p must have 3 entries, got shape {C_p.shape}")
        if not np.all(np.isfinite(r_p)) or not np.all(np.isfinite(C_p)):
            raise ValueError("plant coefficients must be finite")
        if not np.any(C_p):
            raise ValueError("C_p must be nonzero")
        r_p.flags.writeable = False
        C_p.flags.writeable = False
        object.__setattr__(self, "r_p", r_p)
        object.__setattr__(self, "C_p", C_p)


def pauli_matrices() -> PauliTriple:
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
    s3 = np.array([[1, 0], [0, -1]], dtype=complex)
    return PauliTriple(s1, s2, s3)


def levi_civita(i: int, j: int, k: int) -> int:
    """Permutation symbol on indices ``0, 1, 2``."""
    return int((i - j) * (j - k) * (k - i) / 2)


def pauli_commutator_residual() -> float:
    """Largest entry of ``[s_i, s_j] - 2i sum_k eps_ijk s_k`` over all 9 pairs.

    With the exact Pauli entries this is 0.0.
    """
    sigma = pauli_matrices()
    worst = 0.0
    for i, j in itertools.product(range(3), repeat=2):
        lhs = sigma[i] @ sigma[j] - sigma[j] @ sigma[i]
        rhs = sum(2j * levi_civita(i, j, k) * sigma[k] for k in range(3))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def theta_map(beta) -> np.ndarray:
    """Skew matrix ``Theta(beta)`` with ``Theta(beta) @ g == -cross(beta, g)``."""
    b1, b2, b3 = np.asarray(beta, dtype=float).reshape(3)
    return np.array([
        [0.0, b3, -b2],
        [-b3, 0.0, b1],
        [b2, -b1, 0.0],
    ])


def plant_drift(spec: PlantSpec) -> np.ndarray:
    """Heisenberg drift of the isolated plant, ``-2 Theta(r_p)``."""
    return -2.0 * theta_map(spec.r_p)


def theta_identities_residual(beta, gamma) -> float:
    """Maximum absolute residual over the four algebraic identities of ``theta_map``.

    The identities are

    * ``Theta(b) g + Theta(g) b = 0``
    * ``Theta(b) b = 0``
    * ``Theta(b) Theta(g) = g b^T - (b^T g) I``
    * ``Theta(Theta(b) g) = Theta(b) Theta(g) - Theta(g) Theta(b)``

    They hold exactly, so a floating point residual should be of order
    ``eps * (1 + |b|) * (1 + |g|)``.
    """
    b = np.asarray(beta, dtype=float).reshape(3)
    g = np.asarray(gamma, dtype=float).reshape(3)
    tb, tg = theta_map(b), theta_map(g)
    residuals = (
        tb @ g + tg @ b,
        tb @ b,
        tb @ tg - (np.outer(g, b) - (b @ g) * np.eye(3)),
        theta_map(tb @ g) - (tb @ tg - tg @ tb),
    )
    return max(float(np.max(np.abs(r))) for r in residuals)


def verify_zp_invariance(spec: PlantSpec) -> float:
    """Norm of ``C_p Theta(C_p^T)``.

    The plant output is constant under the observer coupling exactly when
    this vanishes, which it does for every ``C_p``.
    """
    return float(np.linalg.norm(spec.C_p @ theta_map(spec.C_p)))

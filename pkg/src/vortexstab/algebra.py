"""Skew-Hermitian matrix algebra underlying the vortex relative dynamics.

The state of the reduced dynamics is a skew-Hermitian n x n matrix ``mu``
written as ``mu = i M`` with ``M`` Hermitian.  Everything downstream works
either with the matrix itself (:class:`MuMatrix`) or with its real coordinate
vector of length ``n**2`` in the ordering

    (mu_1, ..., mu_n, x_12, y_12, x_13, y_13, ..., x_{n-1,n}, y_{n-1,n})

where ``mu_k`` are the diagonal imaginary parts, ``mu_jk = x_jk + i y_jk`` are
the upper-triangular entries of ``M`` in row-major order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, SingularCoupling

SKEW_TOL = 1e-12
INVERSE_RESIDUAL_TOL = 1e-10


class Regime(enum.Enum):
    NON_ZERO_TOTAL = "nonzero_total"
    ZERO_TOTAL = "zero_total"


@dataclass(frozen=True)
class Circulations:
    """Circulation strengths of N vortices with derived total and regime.

    The total circulation decides the reduction: ``n = N - 1`` shape-matrix
    dimension when the total is nonzero, ``n = N - 2`` when it vanishes.
    """

    gammas: tuple[float, ...]
    total: float = field(init=False)
    regime: Regime = field(init=False)

    def __post_init__(self):
        gammas = tuple(float(g) for g in self.gammas)
        if len(gammas) < 3:
            raise ValueError("need at least 3 vortices")
        if any(g == 0.0 for g in gammas):
            raise ValueError("all circulations must be nonzero")
        object.__setattr__(self, "gammas", gammas)
        total = float(sum(gammas))
        tol = 1e-12 * max(abs(g) for g in gammas)
        regime = Regime.ZERO_TOTAL if abs(total) <= tol else Regime.NON_ZERO_TOTAL
        if regime is Regime.ZERO_TOTAL:
            total = 0.0
        object.__setattr__(self, "total", total)
        object.__setattr__(self, "regime", regime)

    @property
    def N(self) -> int:
        return len(self.gammas)

    @property
    def n(self) -> int:
        """Dimension of the shape matrix mu."""
        return self.N - 1 if self.regime is Regime.NON_ZERO_TOTAL else self.N - 2

    def as_array(self) -> np.ndarray:
        return np.asarray(self.gammas, dtype=float)


@dataclass(frozen=True)
class CouplingMatrix:
    """Real symmetric circulation coupling matrix with cached inverse."""

    k: np.ndarray
    k_inv: np.ndarray

    @property
    def n(self) -> int:
        return self.k.shape[0]


@dataclass(frozen=True)
class MuMatrix:
    """Skew-Hermitian n x n matrix, the state of the relative dynamics."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatch("mu must be a square matrix")
        tol = SKEW_TOL * max(1.0, float(np.abs(entries).max(initial=0.0)))
        if np.abs(entries.conj().T + entries).max(initial=0.0) > tol:
            raise ValueError("mu is not skew-Hermitian")
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def hermitian_part(self) -> np.ndarray:
        """The Hermitian matrix M = -i mu whose 2x2 minors define the constraints."""
        return -1j * self.entries


def _pair_indices(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@lru_cache(maxsize=None)
def pair_indices(n: int) -> tuple[tuple[int, int], ...]:
    """Row-major upper-triangular (i, j) pairs, 0-based."""
    return tuple(_pair_indices(n))


@lru_cache(maxsize=None)
def coordinate_basis(n: int) -> np.ndarray:
    """Hermitian basis matrices E_m with M(u) = sum_m u_m E_m.

    Shape (n**2, n, n); the ordering matches the coordinate flattening.
    """
    basis = np.zeros((n * n, n, n), dtype=complex)
    for k in range(n):
        basis[k, k, k] = 1.0
    for p, (i, j) in enumerate(pair_indices(n)):
        basis[n + 2 * p, i, j] = 1.0
        basis[n + 2 * p, j, i] = 1.0
        basis[n + 2 * p + 1, i, j] = 1j
        basis[n + 2 * p + 1, j, i] = -1j
    basis.setflags(write=False)
    return basis


def flatten(mu: MuMatrix) -> np.ndarray:
    """Real coordinate vector of length n**2 (pure copying, no arithmetic)."""
    n = mu.n
    v = np.empty(n * n)
    e = mu.entries
    for k in range(n):
        v[k] = e[k, k].imag
    for p, (i, j) in enumerate(pair_indices(n)):
        # e[i, j] = i*(x + i*y) = -y + i*x
        v[n + 2 * p] = e[i, j].imag
        v[n + 2 * p + 1] = -e[i, j].real
    return v


def unflatten(v: np.ndarray, n: int) -> MuMatrix:
    """Inverse of :func:`flatten`."""
    v = np.asarray(v, dtype=float)
    if v.shape != (n * n,):
        raise DimensionMismatch(f"expected length {n * n}, got {v.shape}")
    e = np.zeros((n, n), dtype=complex)
    for k in range(n):
        e[k, k] = 1j * v[k]
    for p, (i, j) in enumerate(pair_indices(n)):
        x, y = v[n + 2 * p], v[n + 2 * p + 1]
        e[i, j] = complex(-y, x)
        e[j, i] = complex(y, x)
    return MuMatrix(e)


def pairing(xi: MuMatrix, eta: MuMatrix) -> float:
    """Inner product (1/2) tr(xi^* eta) identifying the algebra with its dual."""
    if xi.n != eta.n:
        raise DimensionMismatch("pairing requires equal dimensions")
    return float(0.5 * np.trace(xi.entries.conj().T @ eta.entries).real)


def lie_bracket(xi: MuMatrix, eta: MuMatrix, k: CouplingMatrix) -> MuMatrix:
    """Coupling-twisted bracket xi K^-1 eta - eta K^-1 xi."""
    if not (xi.n == eta.n == k.n):
        raise DimensionMismatch("bracket requires equal dimensions")
    a = xi.entries @ k.k_inv @ eta.entries
    return MuMatrix(a - a.conj().T)


def build_coupling_matrix(circ: Circulations) -> CouplingMatrix:
    """Coupling matrix of the circulation set, regime-dependent.

    Nonzero total circulation Gamma:  n = N-1 and
        K_ii = -G_i (Gamma - G_i) / Gamma,   K_ij = G_i G_j / Gamma.
    Zero total circulation:  n = N-2 and
        K0_ij = -(1/G_N) * (G_i G_j + delta_ij G_i G_N).
    """
    g = circ.as_array()
    if circ.regime is Regime.NON_ZERO_TOTAL:
        gn = g[:-1]
        k = np.outer(gn, gn) / circ.total
        np.fill_diagonal(k, -gn * (circ.total - gn) / circ.total)
    else:
        gn = g[:-2]
        last = g[-1]
        k = -(np.outer(gn, gn) + np.diag(gn * last)) / last
    try:
        k_inv = np.linalg.inv(k)
    except np.linalg.LinAlgError as exc:
        raise SingularCoupling(str(exc)) from exc
    residual = np.abs(k @ k_inv - np.eye(k.shape[0])).max()
    if residual > INVERSE_RESIDUAL_TOL:
        raise SingularCoupling(f"inverse residual {residual:.3e}")
    for a in (k, k_inv):
        a.setflags(write=False)
    return CouplingMatrix(k=k, k_inv=k_inv)

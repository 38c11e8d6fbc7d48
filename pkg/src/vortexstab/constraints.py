"""Casimir invariants and the rank-one constraint map.

The constraint components are the 2x2 determinants of the Hermitian matrix
``M = -i mu`` sweeping its upper triangle and subdiagonal: ``R_i`` from the
diagonal blocks and complex ``R_ij`` from the off-diagonal ones (split into
real and imaginary parts).  Their joint zero level set, inside the open set of
matrices with no vanishing entry, is exactly the rank-one stratum the reduced
dynamics lives on.  Every component is a quadratic form in the flattened
coordinates, so Jacobians are exact and Hessians are constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    Circulations,
    CouplingMatrix,
    MuMatrix,
    Regime,
    coordinate_basis,
    flatten,
    pair_indices,
)
from .errors import DimensionMismatch, NotInOpenSet, UnsupportedScenario

RANK_THRESHOLD = 1e-8
OPEN_SET_TOL = 1e-12


def casimir(mu: MuMatrix, k: CouplingMatrix, j: int) -> float:
    """C_j(mu) = tr((i K mu)^j), a conserved quantity of the reduced flow."""
    if mu.n != k.n:
        raise DimensionMismatch("mu and coupling matrix differ in size")
    if j < 1:
        raise ValueError("Casimir index must be >= 1")
    b = 1j * k.k @ mu.entries
    t = np.trace(np.linalg.matrix_power(b, j))
    return float(t.real)


def casimir_values(mu: MuMatrix, k: CouplingMatrix, js: Iterable[int]) -> np.ndarray:
    b = 1j * k.k @ mu.entries
    out = []
    p = np.eye(mu.n, dtype=complex)
    js = list(js)
    top = max(js)
    traces = {}
    for j in range(1, top + 1):
        p = p @ b
        traces[j] = float(np.trace(p).real)
    return np.asarray([traces[j] for j in js])


def casimir_gradient(mu: MuMatrix, k: CouplingMatrix, j: int) -> np.ndarray:
    """Gradient of C_j with respect to the flattened coordinates."""
    n = mu.n
    b = 1j * k.k @ mu.entries
    bp = np.linalg.matrix_power(b, j - 1)
    basis = coordinate_basis(n)
    # dC_j . E_m = j tr(b^{j-1} * iK * (i E_m)) with mu = i M
    front = j * bp @ (1j * k.k)
    grad = np.einsum("ab,mba->m", front * 1j, basis)
    return np.ascontiguousarray(grad.real)


def casimir_hessian(mu: MuMatrix, k: CouplingMatrix, j: int) -> np.ndarray:
    """Second derivative of C_j; zero for j = 1, exact product rule otherwise."""
    n = mu.n
    if j == 1:
        return np.zeros((n * n, n * n))
    basis = coordinate_basis(n)
    ik = 1j * k.k
    db = np.einsum("ab,mbc->mac", ik, 1j * basis)  # derivative of b = iK mu
    b = ik @ mu.entries
    powers = [np.linalg.matrix_power(b, r) for r in range(j - 1)]
    hess = np.zeros((n * n, n * n))
    for r in range(j - 1):
        left = np.einsum("ab,mbc->mac", powers[r], db)
        right = np.einsum("ab,pbc->pac", powers[j - 2 - r], db)
        # sum_r tr(b^r db_m b^{j-2-r} db_p)
        hess += j * np.einsum("mab,pba->mp", left, right).real
    return 0.5 * (hess + hess.T)


def scenario_casimir_c1(mu: MuMatrix, circ: Circulations) -> float:
    """The per-scenario linear first Casimir exactly as printed for the
    worked configurations (triangle/square with center, and general N=3)."""
    u = flatten(mu)
    g = circ.as_array()
    N = circ.N
    if N == 3 and circ.regime is Regime.NON_ZERO_TOTAL:
        g1, g2, g3 = g
        return float(
            (g2 * (g1 + g3) * u[0] + g1 * (g2 + g3) * u[1] - 2 * g1 * g2 * u[2])
            / circ.total
        )
    if N == 4 and circ.regime is Regime.ZERO_TOTAL and np.allclose(g[:3], 1.0):
        return float((2.0 / 3.0) * (u[0] + u[1] - u[2]))
    if N == 4 and circ.regime is Regime.NON_ZERO_TOTAL and np.allclose(g[:3], 1.0):
        gam = g[3]
        return float(
            (
                (gam + 2) * u[0]
                + (gam + 2) * u[1]
                + (gam + 2) * u[2]
                - 2 * (u[3] + u[5] + u[7])
            )
            / (gam + 3)
        )
    if N == 5 and circ.regime is Regime.NON_ZERO_TOTAL and np.allclose(g[:4], 1.0):
        gam = g[4]
        return float(
            ((gam + 3) * (u[0] + u[1] + u[2] + u[3]) - 2 * u[4::2].sum()) / (gam + 4)
        )
    raise UnsupportedScenario("no printed C1 fixture for this circulation set")


@dataclass(frozen=True)
class _Quadratic:
    """(c1.u)(c2.u) - (c3.u)(c4.u), with exact gradient and constant Hessian."""

    c1: np.ndarray
    c2: np.ndarray
    c3: np.ndarray
    c4: np.ndarray

    def value(self, u: np.ndarray) -> complex:
        return (self.c1 @ u) * (self.c2 @ u) - (self.c3 @ u) * (self.c4 @ u)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        return (
            self.c1 * (self.c2 @ u)
            + self.c2 * (self.c1 @ u)
            - self.c3 * (self.c4 @ u)
            - self.c4 * (self.c3 @ u)
        )

    def hessian(self) -> np.ndarray:
        return (
            np.outer(self.c1, self.c2)
            + np.outer(self.c2, self.c1)
            - np.outer(self.c3, self.c4)
            - np.outer(self.c4, self.c3)
        )


class ConstraintSystem:
    """All (n-1)^2 real rank-one constraint components for n x n shapes,
    ordered (R_1 .. R_{n-1}, Re R_12, Im R_12, ...)."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        basis = coordinate_basis(n)
        # entry (a, b) of M = -i mu as a complex linear form in u
        ell = np.einsum("mab->abm", basis)
        components: list[_Quadratic] = []
        labels: list[str] = []
        for i in range(n - 1):
            components.append(
                _Quadratic(ell[i, i], ell[i + 1, i + 1], ell[i, i + 1], ell[i + 1, i])
            )
            labels.append(f"R{i + 1}")
        for (i, j) in pair_indices(n - 1):
            components.append(
                _Quadratic(ell[i, j], ell[i + 1, j + 1], ell[i, j + 1], ell[i + 1, j])
            )
            labels.append(f"ReR{i + 1}{j + 1}")
            labels.append(f"ImR{i + 1}{j + 1}")
        self._components = components
        self.labels = labels
        self.size = (n - 1) ** 2
        self._hessians: list[np.ndarray] | None = None

    def _expand(self, vals_c) -> np.ndarray:
        """Split complex off-diagonal components into (Re, Im) rows."""
        rows = []
        for slot, v in enumerate(vals_c):
            if slot < self.n - 1:
                rows.append(np.real(v))
            else:
                rows.append(np.real(v))
                rows.append(np.imag(v))
        return np.asarray(rows)

    def values(self, u: np.ndarray) -> np.ndarray:
        return self._expand([c.value(u) for c in self._components])

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        return self._expand([c.gradient(u) for c in self._components])

    def hessians(self) -> list[np.ndarray]:
        """Constant Hessians of each real component, in output order."""
        if self._hessians is None:
            out = []
            for slot, c in enumerate(self._components):
                h = c.hessian()
                if slot < self.n - 1:
                    out.append(h.real)
                else:
                    out.append(h.real)
                    out.append(h.imag)
            self._hessians = out
        return self._hessians


@lru_cache(maxsize=None)
def constraint_system(n: int) -> ConstraintSystem:
    return ConstraintSystem(n)


def constraint_residuals(mu: MuMatrix) -> np.ndarray:
    """R(mu); vanishes exactly on rank-one shape matrices."""
    return constraint_system(mu.n).values(flatten(mu))


def constraint_jacobian(mu: MuMatrix) -> np.ndarray:
    """Jacobian of the constraint map, shape ((n-1)^2, n^2)."""
    return constraint_system(mu.n).jacobian(flatten(mu))


def in_open_set(mu: MuMatrix, tol: float = OPEN_SET_TOL) -> bool:
    """True when no diagonal or upper-triangular entry of mu vanishes."""
    m = mu.hermitian_part
    n = mu.n
    if np.any(np.abs(np.diag(m).real) <= tol):
        return False
    for (i, j) in pair_indices(n):
        if abs(m[i, j]) <= tol:
            return False
    return True


@dataclass(frozen=True)
class RankCheck:
    rank: int
    full_rank: bool
    expected: int
    nullity: int


def submersion_rank_check(mu: MuMatrix) -> RankCheck:
    """Numerical rank of the constraint Jacobian at mu (must lie in the open
    set of matrices with no vanishing entry)."""
    if not in_open_set(mu):
        raise NotInOpenSet("mu has a vanishing entry")
    jac = constraint_jacobian(mu)
    n = mu.n
    expected = (n - 1) ** 2
    if expected == 0:
        return RankCheck(rank=0, full_rank=True, expected=0, nullity=n * n)
    sv = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(sv > RANK_THRESHOLD * sv[0]))
    return RankCheck(
        rank=rank,
        full_rank=rank == expected,
        expected=expected,
        nullity=n * n - rank,
    )

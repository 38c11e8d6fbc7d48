"""Vortex Hamiltonians: full-space, reduced, and the reduced matrix gradient.

Both reduced Hamiltonians (nonzero and zero total circulation) are sums of
terms ``-(1/4pi) * w_t * ln(c_t . u)`` where ``u`` is the coordinate vector of
the shape matrix and each ``c_t`` is a constant linear form (a squared
inter-vortex distance expressed in shape coordinates).  Gradients and Hessians
are therefore exact closed forms.

The zero-total-circulation Hamiltonian assumes zero linear impulse, which is
how the positions of the two reference vortices are recovered from the
relative coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import Circulations, MuMatrix, Regime, pair_indices
from .errors import Collision, DimensionMismatch, DomainError

COLLISION_TOL = 1e-9
LOG_FLOOR = 1e-300
FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class VortexConfiguration:
    """Planar vortex positions (as complex numbers) with their circulations."""

    positions: tuple[complex, ...]
    circ: Circulations

    def __post_init__(self):
        positions = tuple(complex(q) for q in self.positions)
        if len(positions) != self.circ.N:
            raise DimensionMismatch("positions and circulations differ in length")
        object.__setattr__(self, "positions", positions)
        q = self.as_array()
        d = np.abs(q[:, None] - q[None, :])
        np.fill_diagonal(d, np.inf)
        if d.min() <= COLLISION_TOL:
            raise Collision(f"minimum vortex separation {d.min():.3e}")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.positions, dtype=complex)


def full_hamiltonian(cfg: VortexConfiguration) -> float:
    """H(q) = -(1/4pi) sum_{i<j} G_i G_j ln|q_i - q_j|^2."""
    q = cfg.as_array()
    g = cfg.circ.as_array()
    total = 0.0
    for i in range(len(q)):
        for j in range(i + 1, len(q)):
            total += g[i] * g[j] * np.log(abs(q[i] - q[j]) ** 2)
    return float(-total / FOUR_PI)


class ReducedHamiltonian:
    """Reduced Hamiltonian of a circulation set in log-linear-form shape.

    ``value``/``gradient``/``hessian`` act on the flattened coordinate vector
    ``u`` of length ``n**2``.
    """

    def __init__(self, circ: Circulations):
        self.circ = circ
        self.n = circ.n
        forms, weights = _log_terms(circ)
        self._forms = forms          # (terms, n**2)
        self._weights = weights      # (terms,)

    def _arguments(self, u: np.ndarray) -> np.ndarray:
        s = self._forms @ u
        if np.any(s <= LOG_FLOOR):
            raise DomainError("non-positive squared distance in reduced Hamiltonian")
        return s

    def value(self, u: np.ndarray) -> float:
        s = self._arguments(u)
        return float(-(self._weights @ np.log(s)) / FOUR_PI)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        s = self._arguments(u)
        return -(self._forms.T @ (self._weights / s)) / FOUR_PI

    def hessian(self, u: np.ndarray) -> np.ndarray:
        s = self._arguments(u)
        return (self._forms.T * (self._weights / s**2)) @ self._forms / FOUR_PI


def _log_terms(circ: Circulations) -> tuple[np.ndarray, np.ndarray]:
    """Linear forms (squared distances) and circulation-product weights."""
    g = circ.as_array()
    n = circ.n
    pairs = pair_indices(n)
    pos = {p: n + 2 * k for k, p in enumerate(pairs)}

    def x_index(i: int, j: int) -> int:
        return pos[(i, j) if i < j else (j, i)]

    forms: list[np.ndarray] = []
    weights: list[float] = []

    def add(w: float, c: np.ndarray):
        forms.append(c)
        weights.append(w)

    if circ.regime is Regime.NON_ZERO_TOTAL:
        # pairs (i, N): |z_i|^2 = mu_i
        for i in range(n):
            c = np.zeros(n * n)
            c[i] = 1.0
            add(g[i] * g[n], c)
    else:
        # pairs (i, N-1): reference vortex is N-1, |z_i|^2 = mu_i
        for i in range(n):
            c = np.zeros(n * n)
            c[i] = 1.0
            add(g[i] * g[n], c)
        gN = g[n + 1]
        # pairs (i, N): q_N recovered from zero linear impulse,
        # |z_i - w|^2 with w = -(1/G_N) sum_j G_j z_j
        for i in range(n):
            c = np.zeros(n * n)
            c[i] = (g[i] + gN) ** 2
            for j in range(n):
                if j == i:
                    continue
                c[j] = g[j] ** 2
                c[x_index(i, j)] += 2.0 * (g[i] + gN) * g[j]
            for (j, k) in pairs:
                if i in (j, k):
                    continue
                c[x_index(j, k)] += 2.0 * g[j] * g[k]
            add(g[i] * gN, c / gN**2)
        # pair (N-1, N): |w|^2
        c = np.zeros(n * n)
        for i in range(n):
            c[i] = g[i] ** 2
        for (j, k) in pairs:
            c[x_index(j, k)] = 2.0 * g[j] * g[k]
        add(g[n] * gN, c / gN**2)

    # pairs among vortices 1..n: |z_i - z_j|^2 = mu_i + mu_j - 2 x_ij
    for (i, j) in pairs:
        c = np.zeros(n * n)
        c[i] = 1.0
        c[j] = 1.0
        c[pos[(i, j)]] = -2.0
        add(g[i] * g[j], c)

    return np.array(forms), np.array(weights)


@lru_cache(maxsize=None)
def reduced_system(circ: Circulations) -> ReducedHamiltonian:
    return ReducedHamiltonian(circ)


def gradient_matrix(grad: np.ndarray, n: int) -> MuMatrix:
    """Assemble the matrix derivative from the flattened gradient.

    Diagonal entry k is ``2i * dh/dmu_k``; off-diagonal (j, k) with j < k is
    ``i*(dh/dx_jk + i dh/dy_jk)``.  The result pairs with any direction nu to
    give the directional derivative of h.
    """
    e = np.zeros((n, n), dtype=complex)
    for k in range(n):
        e[k, k] = 2j * grad[k]
    for p, (i, j) in enumerate(pair_indices(n)):
        gx, gy = grad[n + 2 * p], grad[n + 2 * p + 1]
        e[i, j] = 1j * complex(gx, gy)
        e[j, i] = 1j * complex(gx, -gy)
    return MuMatrix(e)


def _check_dim(mu: MuMatrix, circ: Circulations):
    if mu.n != circ.n:
        raise DimensionMismatch(f"mu is {mu.n}x{mu.n}, circulations give n={circ.n}")


def reduced_hamiltonian(mu: MuMatrix, circ: Circulations) -> float:
    """Reduced Hamiltonian h(mu); satisfies h(i z z*) = H(q)."""
    from .algebra import flatten

    _check_dim(mu, circ)
    return reduced_system(circ).value(flatten(mu))


def reduced_gradient(mu: MuMatrix, circ: Circulations) -> MuMatrix:
    """Matrix derivative of the reduced Hamiltonian at mu."""
    from .algebra import flatten

    _check_dim(mu, circ)
    sys = reduced_system(circ)
    return gradient_matrix(sys.gradient(flatten(mu)), circ.n)

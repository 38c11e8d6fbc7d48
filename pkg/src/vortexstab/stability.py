"""Linear spectra and the energy-Casimir stability certificate.

The certificate follows the constrained second-order recipe: find multipliers
making the combined function

    f = a0 * (4 pi h) + sum_i a_i C_i + sum b_i R_i + sum (c_ij Re R_ij + d_ij Im R_ij)

critical at the fixed point, then test positive definiteness of its Hessian
restricted to the tangent space of the joint Casimir/constraint level set via
Sylvester's criterion.  The ``4 pi h`` scaling matches the closed-form
multiplier and minor fixtures used in the acceptance suite.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    Circulations,
    MuMatrix,
    build_coupling_matrix,
    coordinate_basis,
    flatten,
    pair_indices,
    unflatten,
)
from .constraints import (
    casimir_gradient,
    casimir_hessian,
    constraint_system,
    in_open_set,
)
from .dynamics import lie_poisson_vector_field
from .errors import (
    Infeasible,
    NoConvergence,
    NotAFixedPoint,
    NotAFixedPointWarning,
    NotInOpenSet,
    RankDeficiency,
)
from .hamiltonian import FOUR_PI, gradient_matrix, reduced_system

FP_TOL = 1e-9
SPEC_TOL = 1e-8
MULTIPLIER_TOL = 1e-8
RANK_THRESHOLD = 1e-8
RANDOM_RETRIES = 8


@dataclass(frozen=True)
class FixedPointCheck:
    residual: float
    ok: bool


def is_fixed_point(mu0: MuMatrix, circ: Circulations, tol: float = FP_TOL) -> FixedPointCheck:
    """Sup-norm of the reduced vector field at mu0."""
    xh = lie_poisson_vector_field(mu0, circ)
    residual = float(np.abs(flatten(xh)).max(initial=0.0))
    return FixedPointCheck(residual=residual, ok=residual < tol)


def linearize(mu0: MuMatrix, circ: Circulations) -> np.ndarray:
    """Jacobian of the flattened reduced vector field at mu0, exact.

    Differentiates X_h = -mu G K^-1 + K^-1 G mu through the closed-form
    Hessian of h; emits a warning (and still returns the matrix) when mu0 is
    not a fixed point.
    """
    check = is_fixed_point(mu0, circ)
    if not check.ok:
        warnings.warn(
            f"linearizing at a non-fixed point (residual {check.residual:.3e})",
            NotAFixedPointWarning,
        )
    n = circ.n
    sys = reduced_system(circ)
    u0 = flatten(mu0)
    kinv = build_coupling_matrix(circ).k_inv
    m = mu0.entries
    g = gradient_matrix(sys.gradient(u0), n).entries
    hess = sys.hessian(u0)
    basis = coordinate_basis(n)
    a = np.empty((n * n, n * n))
    for col in range(n * n):
        nu = 1j * basis[col]
        p = gradient_matrix(hess[:, col], n).entries
        deriv = -nu @ g @ kinv - m @ p @ kinv + kinv @ p @ m + kinv @ g @ nu
        a[:, col] = flatten(MuMatrix(deriv))
    return a


def spectrum(a: np.ndarray) -> np.ndarray:
    """All eigenvalues of a dense real matrix, sorted by (Re, Im)."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("spectrum expects a square matrix")
    try:
        ev = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = np.lexsort((ev.imag, ev.real))
    return ev[order]


def _stacked_gradients(
    mu0: MuMatrix, circ: Circulations, casimir_subset: Sequence[int]
) -> np.ndarray:
    """Rows: Casimir gradients of the subset, then all constraint gradients."""
    k = build_coupling_matrix(circ)
    u0 = flatten(mu0)
    rows = [casimir_gradient(mu0, k, j) for j in casimir_subset]
    jac = constraint_system(circ.n).jacobian(u0)
    if jac.size:
        rows.extend(jac)
    return np.asarray(rows)


@dataclass(frozen=True)
class IndependenceResult:
    independent: bool
    rank: int
    expected: int
    dependent_casimirs: tuple[int, ...]

    def __bool__(self) -> bool:
        return self.independent


def independence_check(
    mu0: MuMatrix, circ: Circulations, casimir_subset: Sequence[int] = (1,)
) -> IndependenceResult:
    """Numerical rank test of the stacked Casimir and constraint differentials.

    Also reports which Casimirs C_1..C_n individually lie in the span of the
    constraint gradients at mu0 (those add nothing to the certificate).
    """
    if not in_open_set(mu0):
        raise NotInOpenSet("mu0 has a vanishing entry")
    stack = _stacked_gradients(mu0, circ, casimir_subset)
    sv = np.linalg.svd(stack, compute_uv=False)
    rank = int(np.sum(sv > RANK_THRESHOLD * sv[0]))
    expected = len(casimir_subset) + (circ.n - 1) ** 2

    k = build_coupling_matrix(circ)
    jac = constraint_system(circ.n).jacobian(flatten(mu0))
    dependent = []
    for j in range(1, circ.n + 1):
        grad = casimir_gradient(mu0, k, j)
        if jac.size:
            coeffs, *_ = np.linalg.lstsq(jac.T, grad, rcond=None)
            resid = np.linalg.norm(jac.T @ coeffs - grad)
        else:
            resid = np.linalg.norm(grad)
        if resid <= 1e-8 * max(1.0, np.linalg.norm(grad)):
            dependent.append(j)
    return IndependenceResult(
        independent=rank == expected,
        rank=rank,
        expected=expected,
        dependent_casimirs=tuple(dependent),
    )


@dataclass(frozen=True)
class MultiplierSet:
    """Coefficients of the certificate function, normalized to a0 = +-1."""

    a0: float
    a: tuple[float, ...]
    b: tuple[float, ...]
    c: tuple[float, ...]
    d: tuple[float, ...]
    residual: float
    solution_space_dim: int

    @property
    def constraint_coefficients(self) -> np.ndarray:
        """Coefficients in constraint-component order (b's, then c/d pairs)."""
        out = list(self.b)
        for cc, dd in zip(self.c, self.d):
            out.extend((cc, dd))
        return np.asarray(out)


def _split_multipliers(
    w: np.ndarray, a0: float, n: int, n_casimirs: int, residual: float, nullity: int
) -> MultiplierSet:
    a = tuple(w[:n_casimirs])
    rest = w[n_casimirs:]
    b = tuple(rest[: n - 1])
    c, d = [], []
    for p in range(len(pair_indices(n - 1))):
        c.append(rest[n - 1 + 2 * p])
        d.append(rest[n - 1 + 2 * p + 1])
    return MultiplierSet(
        a0=a0,
        a=a,
        b=b,
        c=tuple(c),
        d=tuple(d),
        residual=residual,
        solution_space_dim=nullity,
    )


def _df_norm(
    mu0: MuMatrix, circ: Circulations, casimir_subset: Sequence[int], a0: float, w: np.ndarray
) -> float:
    """Fresh evaluation of ||Df(mu0)||_inf for the given coefficients."""
    u0 = flatten(mu0)
    df = a0 * FOUR_PI * reduced_system(circ).gradient(u0)
    df = df + _stacked_gradients(mu0, circ, casimir_subset).T @ w
    return float(np.abs(df).max())


def solve_multiplier_system(
    mu0: MuMatrix,
    circ: Circulations,
    casimir_subset: Sequence[int] = (1,),
    a0: float = 1.0,
) -> MultiplierSet:
    """Solve Df(mu0) = 0 for the Casimir/constraint coefficients at fixed a0.

    Minimal-norm solution when underdetermined; raises Infeasible when no
    coefficient choice makes mu0 a critical point of f.
    """
    if a0 == 0.0:
        raise ValueError("a0 must be nonzero")
    a0 = float(np.sign(a0))
    u0 = flatten(mu0)
    cols = _stacked_gradients(mu0, circ, casimir_subset).T
    rhs = -a0 * FOUR_PI * reduced_system(circ).gradient(u0)
    w, *_ = np.linalg.lstsq(cols, rhs, rcond=None)
    sv = np.linalg.svd(cols, compute_uv=False)
    rank = int(np.sum(sv > RANK_THRESHOLD * sv[0])) if sv.size else 0
    nullity = cols.shape[1] - rank
    residual = _df_norm(mu0, circ, casimir_subset, a0, w)
    if residual > MULTIPLIER_TOL:
        raise Infeasible(f"no critical point for a0={a0:+.0f}: residual {residual:.3e}")
    return _split_multipliers(w, a0, circ.n, len(casimir_subset), residual, nullity)


def tangent_basis(
    mu0: MuMatrix, circ: Circulations, casimir_subset: Sequence[int] = (1,)
) -> np.ndarray:
    """Orthonormal basis (rows) of the tangent space of the joint level set."""
    stack = _stacked_gradients(mu0, circ, casimir_subset)
    n = circ.n
    expected = n * n - (n - 1) ** 2 - len(casimir_subset)
    _, sv, vt = np.linalg.svd(stack, full_matrices=True)
    rank = int(np.sum(sv > RANK_THRESHOLD * sv[0]))
    basis = vt[rank:]
    if basis.shape[0] != expected:
        raise RankDeficiency(
            f"nullity {basis.shape[0]}, expected {expected} (gradients not independent)"
        )
    return basis


def certificate_hessian(
    mu0: MuMatrix, circ: Circulations, casimir_subset: Sequence[int], mult: MultiplierSet
) -> np.ndarray:
    """Full Hessian of f at mu0 in flattened coordinates."""
    u0 = flatten(mu0)
    k = build_coupling_matrix(circ)
    h = mult.a0 * FOUR_PI * reduced_system(circ).hessian(u0)
    for a_i, j in zip(mult.a, casimir_subset):
        if a_i != 0.0 and j > 1:
            h = h + a_i * casimir_hessian(mu0, k, j)
    chess = constraint_system(circ.n).hessians()
    for coeff, hc in zip(mult.constraint_coefficients, chess):
        if coeff != 0.0:
            h = h + coeff * hc
    return h


def restricted_hessian(
    mu0: MuMatrix,
    circ: Circulations,
    mult: MultiplierSet,
    basis: np.ndarray,
    casimir_subset: Sequence[int] = (1,),
) -> np.ndarray:
    """Project the certificate Hessian onto a tangent basis (rows)."""
    basis = np.asarray(basis, dtype=float)
    h = certificate_hessian(mu0, circ, casimir_subset, mult)
    restricted = basis @ h @ basis.T
    scale = max(1.0, np.abs(restricted).max(initial=0.0))
    asym = np.abs(restricted - restricted.T).max(initial=0.0)
    if asym > 1e-10 * scale:
        raise ValueError(f"restricted Hessian asymmetric by {asym:.3e}")
    return 0.5 * (restricted + restricted.T)


@dataclass(frozen=True)
class SylvesterResult:
    positive_definite: bool
    minors: tuple[float, ...]


def sylvester_verdict(hessian: np.ndarray) -> SylvesterResult:
    """Leading principal minors with an all-positive test, cross-checked
    against the smallest eigenvalue."""
    h = np.asarray(hessian, dtype=float)
    minor_tol = 1e-10 * (1.0 + np.abs(h).max(initial=0.0))
    minors = tuple(float(np.linalg.det(h[: i + 1, : i + 1])) for i in range(h.shape[0]))
    minors_positive = all(m > minor_tol for m in minors)
    eig_min = float(np.linalg.eigvalsh(h).min()) if h.size else 0.0
    return SylvesterResult(
        positive_definite=minors_positive and eig_min > 0.0,
        minors=minors,
    )


class Verdict(enum.Enum):
    CERTIFIED_STABLE = "certified-stable"
    LINEARLY_UNSTABLE = "linearly-unstable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CertificateResult:
    verdict: Verdict
    spectrum: np.ndarray
    multipliers: MultiplierSet | None = None
    tangent_basis: np.ndarray | None = None
    restricted_hessian: np.ndarray | None = None
    minors: tuple[float, ...] | None = None
    reason: str = ""


def energy_casimir_certificate(
    mu0: MuMatrix,
    circ: Circulations,
    casimir_subset: Sequence[int] = (1,),
    rng_seed: int = 0,
) -> CertificateResult:
    """Full stability pipeline at a fixed point of the reduced dynamics.

    Linear instability (an eigenvalue with positive real part beyond
    tolerance) short-circuits the certificate; otherwise both signs of a0 are
    tried, with a few seeded random retries through the multiplier solution
    space when it is not unique.
    """
    check = is_fixed_point(mu0, circ)
    if not check.ok:
        raise NotAFixedPoint(f"residual {check.residual:.3e}")
    if not in_open_set(mu0):
        raise NotInOpenSet("mu0 has a vanishing entry")

    a = linearize(mu0, circ)
    ev = spectrum(a)
    if float(ev.real.max()) > SPEC_TOL:
        return CertificateResult(
            verdict=Verdict.LINEARLY_UNSTABLE,
            spectrum=ev,
            reason=f"max Re lambda = {ev.real.max():.6e}",
        )

    indep = independence_check(mu0, circ, casimir_subset)
    if not indep.independent:
        return CertificateResult(
            verdict=Verdict.INCONCLUSIVE,
            spectrum=ev,
            reason=f"differentials not independent (rank {indep.rank} < {indep.expected})",
        )
    basis = tangent_basis(mu0, circ, casimir_subset)

    reasons = []
    rng = np.random.default_rng(rng_seed)
    stack_t = _stacked_gradients(mu0, circ, casimir_subset).T
    for a0 in (1.0, -1.0):
        try:
            mult = solve_multiplier_system(mu0, circ, casimir_subset, a0)
        except Infeasible as exc:
            reasons.append(str(exc))
            continue
        candidates = [mult]
        if mult.solution_space_dim > 0:
            _, sv, vt = np.linalg.svd(stack_t.T, full_matrices=True)
            rank = int(np.sum(sv > RANK_THRESHOLD * sv[0]))
            null = vt[rank:]
            base = np.concatenate([mult.a, mult.constraint_coefficients])
            for _ in range(RANDOM_RETRIES):
                w = base + null.T @ rng.standard_normal(null.shape[0])
                residual = _df_norm(mu0, circ, casimir_subset, a0, w)
                candidates.append(
                    _split_multipliers(
                        w, a0, circ.n, len(casimir_subset), residual, mult.solution_space_dim
                    )
                )
        for cand in candidates:
            rh = restricted_hessian(mu0, circ, cand, basis, casimir_subset)
            syl = sylvester_verdict(rh)
            if syl.positive_definite:
                assert float(ev.real.max()) < SPEC_TOL
                return CertificateResult(
                    verdict=Verdict.CERTIFIED_STABLE,
                    spectrum=ev,
                    multipliers=cand,
                    tangent_basis=basis,
                    restricted_hessian=rh,
                    minors=syl.minors,
                )
        reasons.append(f"restricted Hessian not positive definite for a0={a0:+.0f}")
    return CertificateResult(
        verdict=Verdict.INCONCLUSIVE,
        spectrum=ev,
        tangent_basis=basis,
        reason="; ".join(reasons),
    )

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexstab.algebra import (
    Circulations,
    MuMatrix,
    Regime,
    build_coupling_matrix,
    coordinate_basis,
    flatten,
    lie_bracket,
    pair_indices,
    pairing,
    unflatten,
)
def random_skew_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return MuMatrix(0.5 * (a - a.conj().T))


class TestCirculations:
    def test_regime_detection(self):
        assert Circulations((1.0, 1.0, 1.0)).regime is Regime.NON_ZERO_TOTAL
        assert Circulations((1.0, 1.0, 1.0, -3.0)).regime is Regime.ZERO_TOTAL

    def test_reduced_dimension(self):
        # n = N-1 generically, N-2 when the total circulation vanishes
        assert Circulations((1.0, 2.0, 3.0)).n == 2
        assert Circulations((1.0, 1.0, -2.0)).n == 1
        assert Circulations((1.0, 1.0, 1.0, 1.0, -4.0)).n == 3

    def test_rejects_zero_circulation(self):
        with pytest.raises(ValueError):
            Circulations((1.0, 0.0, 1.0))

    def test_rejects_too_few(self):
        with pytest.raises(ValueError):
            Circulations((1.0, -1.0))


class TestCouplingMatrix:
    def test_equal_circulations_fixture(self):
        # K for three unit circulations: -2/3 diagonal, 1/3 off-diagonal
        k = build_coupling_matrix(Circulations((1.0, 1.0, 1.0)))
        expected = np.array([[-2.0, 1.0], [1.0, -2.0]]) / 3.0
        np.testing.assert_allclose(k.k, expected, atol=1e-14)

    def test_mixed_sign_fixture(self):
        k = build_coupling_matrix(Circulations((1.0, -1.0, 1.0)))
        expected = np.array([[0.0, -1.0], [-1.0, 2.0]])
        np.testing.assert_allclose(k.k, expected, atol=1e-14)

    def test_zero_total_matches_limit(self):
        # the zero-total coupling for (1,1,1,-3) coincides with the
        # three-vortex matrix for (1,1,1)
        k0 = build_coupling_matrix(Circulations((1.0, 1.0, 1.0, -3.0)))
        k = build_coupling_matrix(Circulations((1.0, 1.0, 1.0)))
        np.testing.assert_allclose(k0.k, k.k, atol=1e-14)

    def test_inverse_consistency(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            g = rng.uniform(0.2, 2.0, 4) * rng.choice([-1.0, 1.0], 4)
            if abs(g.sum()) < 0.1:
                continue
            k = build_coupling_matrix(Circulations(tuple(g)))
            np.testing.assert_allclose(k.k @ k.k_inv, np.eye(3), atol=1e-10)

    def test_determinant_identity_three_vortices(self):
        # det K = G1*G2*G3 / (G1+G2+G3), hence K is invertible whenever the
        # circulations are admissible
        rng = np.random.default_rng(1)
        for _ in range(20):
            g = rng.uniform(0.2, 2.0, 3) * rng.choice([-1.0, 1.0], 3)
            if abs(g.sum()) < 0.1:
                continue
            k = build_coupling_matrix(Circulations(tuple(g)))
            assert np.linalg.det(k.k) == pytest.approx(g.prod() / g.sum(), rel=1e-12)


class TestFlatten:
    @given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=2**31))
    @settings(max_examples=40, deadline=None)
    def test_round_trip(self, n, seed):
        mu = random_skew_hermitian(np.random.default_rng(seed), n)
        again = unflatten(flatten(mu), n)
        np.testing.assert_array_equal(again.entries, mu.entries)

    def test_flatten_is_linear_copy(self):
        # coordinates are read straight out of the matrix, no arithmetic
        mu = unflatten(np.arange(1.0, 10.0), 3)
        u = flatten(mu)
        np.testing.assert_array_equal(u, np.arange(1.0, 10.0))

    def test_pair_ordering_row_major(self):
        assert pair_indices(3) == ((0, 1), (0, 2), (1, 2))
        assert pair_indices(4) == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

    def test_coordinate_basis_reconstructs(self):
        rng = np.random.default_rng(3)
        for n in (2, 3, 4):
            u = rng.standard_normal(n * n)
            m = np.einsum("m,mab->ab", u, coordinate_basis(n))
            np.testing.assert_allclose(m, -1j * unflatten(u, n).entries, atol=1e-14)


class TestPairingAndBracket:
    def test_pairing_recovers_coordinates(self):
        # <E_m-dual, mu> agrees with the flattened coordinate vector
        rng = np.random.default_rng(5)
        mu = random_skew_hermitian(rng, 3)
        nu = random_skew_hermitian(rng, 3)
        lhs = pairing(mu, nu)
        assert lhs == pytest.approx(0.5 * np.trace(mu.entries.conj().T @ nu.entries).real)

    def test_bracket_antisymmetry(self):
        rng = np.random.default_rng(6)
        k = build_coupling_matrix(Circulations((1.0, 2.0, -0.5, 0.7)))
        x, y = random_skew_hermitian(rng, 3), random_skew_hermitian(rng, 3)
        np.testing.assert_allclose(
            lie_bracket(x, y, k).entries, -lie_bracket(y, x, k).entries, atol=1e-12
        )

    def test_bracket_jacobi_identity(self):
        rng = np.random.default_rng(7)
        k = build_coupling_matrix(Circulations((1.0, 2.0, -0.5, 0.7)))
        x, y, z = (random_skew_hermitian(rng, 3) for _ in range(3))
        total = (
            lie_bracket(x, lie_bracket(y, z, k), k).entries
            + lie_bracket(y, lie_bracket(z, x, k), k).entries
            + lie_bracket(z, lie_bracket(x, y, k), k).entries
        )
        np.testing.assert_allclose(total, 0.0, atol=1e-12)

    def test_bracket_closes_in_algebra(self):
        rng = np.random.default_rng(8)
        k = build_coupling_matrix(Circulations((1.0, -2.0, 0.5, 0.7)))
        x, y = random_skew_hermitian(rng, 3), random_skew_hermitian(rng, 3)
        b = lie_bracket(x, y, k).entries
        np.testing.assert_allclose(b, -b.conj().T, atol=1e-12)

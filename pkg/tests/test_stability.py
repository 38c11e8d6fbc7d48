import warnings

import numpy as np
import pytest

from vortexstab.algebra import Circulations, MuMatrix, flatten, unflatten
from vortexstab.dynamics import integrate, moment_map, relative_coordinates
from vortexstab.errors import NotAFixedPoint, NotAFixedPointWarning, NotInOpenSet
from vortexstab.hamiltonian import VortexConfiguration
from vortexstab.scenarios import build_scenario, scenario_fixed_point
from vortexstab.stability import (
    Verdict,
    energy_casimir_certificate,
    independence_check,
    is_fixed_point,
    linearize,
    restricted_hessian,
    solve_multiplier_system,
    spectrum,
    sylvester_verdict,
    tangent_basis,
)

EQUILATERAL3_MU0 = unflatten(np.array([1.0, 1.0, 0.5, -np.sqrt(3) / 2]), 2)


def center_fixed_point(kind, gamma):
    scen = build_scenario(kind, gamma=gamma)
    return scenario_fixed_point(scen), scen.circ


class TestFixedPoint:
    def test_equilateral_is_fixed(self):
        for gammas in [(1.0, 1.0, 1.0), (1.0, -0.4, 0.7), (2.0, 0.3, -0.8)]:
            chk = is_fixed_point(EQUILATERAL3_MU0, Circulations(gammas))
            assert chk.ok and chk.residual < 1e-12

    def test_perturbed_point_is_not(self):
        mu = unflatten(np.array([1.1, 1.0, 0.5, -np.sqrt(3) / 2]), 2)
        assert not is_fixed_point(mu, Circulations((1.0, 1.0, 1.0))).ok

    def test_center_scenarios_fixed(self):
        for kind, g in [
            ("triangle-with-center", 0.7),
            ("triangle-with-center", -3.0),
            ("square-with-center", 1.3),
            ("square-with-center", -4.0),
        ]:
            mu0, circ = center_fixed_point(kind, g)
            assert is_fixed_point(mu0, circ).ok


class TestLinearize:
    def test_matches_printed_three_vortex_matrix(self):
        # closed-form Jacobian for the unit-side equilateral triangle
        g1, g2, g3 = 1.3, -0.6, 0.9
        circ = Circulations((g1, g2, g3))
        s3 = np.sqrt(3)
        expected = (1 / (4 * np.pi)) * np.array(
            [
                [-2 * s3 * g2, 0, 4 * s3 * g2, 0],
                [0, 2 * s3 * g1, -4 * s3 * g1, 0],
                [-s3 * (g2 + g3), s3 * (g1 + g3), 2 * s3 * (g2 - g1), 0],
                [g2 - g3, g3 - g1, 2 * (g1 - g2), 0],
            ]
        )
        a = linearize(EQUILATERAL3_MU0, circ)
        np.testing.assert_allclose(a, expected, atol=1e-10)

    def test_matches_central_differences(self):
        from vortexstab.dynamics import lie_poisson_vector_field

        for kind, g in [("triangle-with-center", 0.8), ("square-with-center", -4.0)]:
            mu0, circ = center_fixed_point(kind, g)
            a = linearize(mu0, circ)
            u0 = flatten(mu0)
            n = circ.n
            eps = 1e-6
            fd = np.empty_like(a)
            for i in range(n * n):
                d = np.zeros(n * n)
                d[i] = eps
                xp = flatten(lie_poisson_vector_field(unflatten(u0 + d, n), circ))
                xm = flatten(lie_poisson_vector_field(unflatten(u0 - d, n), circ))
                fd[:, i] = (xp - xm) / (2 * eps)
            np.testing.assert_allclose(a, fd, atol=1e-6)

    def test_warns_off_equilibrium(self):
        mu = unflatten(np.array([1.2, 1.0, 0.5, -np.sqrt(3) / 2]), 2)
        with pytest.warns(NotAFixedPointWarning):
            linearize(mu, Circulations((1.0, 1.0, 1.0)))


class TestSpectrum:
    def test_simple_fixture(self):
        ev = spectrum(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        np.testing.assert_allclose(sorted(ev.imag), [-1.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(ev.real, 0.0, atol=1e-12)

    def test_sorted_by_real_then_imaginary(self):
        ev = spectrum(np.diag([3.0, -1.0, 2.0]))
        np.testing.assert_allclose(ev.real, [-1.0, 2.0, 3.0])

    def test_negation_symmetry_at_fixed_points(self):
        # linearizations of Hamiltonian systems have eigenvalues in
        # {lambda, -lambda} pairs
        for kind, g in [("triangle-with-center", 2.0), ("square-with-center", 0.5)]:
            mu0, circ = center_fixed_point(kind, g)
            ev = spectrum(linearize(mu0, circ))
            for lam in ev:
                assert np.abs(ev + lam).min() < 1e-8

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            spectrum(np.zeros((2, 3)))


class TestIndependence:
    def test_single_casimir_independent(self):
        mu0, circ = center_fixed_point("triangle-with-center", 0.7)
        res = independence_check(mu0, circ, (1,))
        assert res.independent and res.rank == 5 and res.expected == 5

    def test_all_casimirs_dependent_with_constraints(self):
        mu0, circ = center_fixed_point("triangle-with-center", 0.7)
        res = independence_check(mu0, circ, (1, 2, 3))
        assert not res.independent

    def test_higher_casimirs_add_no_rank(self):
        # at rank-one points every C_j with j >= 2 is functionally dependent
        # on C_1 and the constraints, so stacking them cannot raise the rank
        mu0, circ = center_fixed_point("square-with-center", 1.0)
        base = independence_check(mu0, circ, (1,))
        assert base.independent
        full = independence_check(mu0, circ, (1, 2, 3, 4))
        assert not full.independent
        assert full.rank == base.rank

    def test_rejects_degenerate_point(self):
        mu = MuMatrix(np.diag([1j, 2j, 3j]))
        circ = Circulations((1.0, 1.0, 1.0, 2.0))
        with pytest.raises(NotInOpenSet):
            independence_check(mu, circ, (1,))


class TestMultipliersAndBasis:
    def test_residual_reevaluated_small(self):
        for kind, g in [("triangle-with-center", 0.5), ("square-with-center", 1.5)]:
            mu0, circ = center_fixed_point(kind, g)
            for a0 in (1.0, -1.0):
                m = solve_multiplier_system(mu0, circ, (1,), a0)
                assert m.residual < 1e-8
                assert m.a0 == a0

    def test_tangent_basis_annihilated_and_orthonormal(self):
        from vortexstab.stability import _stacked_gradients

        mu0, circ = center_fixed_point("square-with-center", 1.0)
        basis = tangent_basis(mu0, circ, (1,))
        assert basis.shape == (6, 16)
        stack = _stacked_gradients(mu0, circ, (1,))
        assert np.abs(stack @ basis.T).max() < 1e-10
        np.testing.assert_allclose(basis @ basis.T, np.eye(6), atol=1e-12)

    def test_expected_dimensions(self):
        mu0, circ = center_fixed_point("triangle-with-center", 0.5)
        assert tangent_basis(mu0, circ, (1,)).shape == (4, 9)

    def test_zero_total_basis_spans_printed_plane(self):
        # n = 2 zero-total reduction: the tangent plane must agree with the
        # span of (1,0,1,0) and (-1,1,0,0) regardless of basis choice
        mu0, circ = center_fixed_point("triangle-with-center", -3.0)
        basis = tangent_basis(mu0, circ, (1,))
        assert basis.shape == (2, 4)
        printed = np.array([[1.0, 0, 1, 0], [-1.0, 1, 0, 0]])
        # projection of each printed vector onto the computed plane is itself
        proj = printed @ basis.T @ basis
        np.testing.assert_allclose(proj, printed, atol=1e-10)


class TestSylvester:
    def test_positive_diagonal(self):
        res = sylvester_verdict(np.diag([2.0, 3.0]))
        assert res.positive_definite
        np.testing.assert_allclose(res.minors, [2.0, 6.0])

    def test_zero_total_printed_matrix(self):
        h = (-1.0 / 9.0) * np.array([[-4.0, 2.0], [2.0, -4.0]])
        res = sylvester_verdict(h)
        assert res.positive_definite
        np.testing.assert_allclose(res.minors, [4.0 / 9.0, 4.0 / 27.0], rtol=1e-12)

    def test_indefinite(self):
        res = sylvester_verdict(np.array([[1.0, 2.0], [2.0, 1.0]]))
        assert not res.positive_definite
        np.testing.assert_allclose(res.minors, [1.0, -3.0], rtol=1e-12)


class TestCertificate:
    @pytest.mark.parametrize(
        "kind,gamma,verdict",
        [
            ("triangle-with-center", 0.5, Verdict.CERTIFIED_STABLE),
            ("triangle-with-center", -4.0, Verdict.CERTIFIED_STABLE),
            ("triangle-with-center", 2.0, Verdict.LINEARLY_UNSTABLE),
            ("triangle-with-center", -1.0, Verdict.INCONCLUSIVE),
            ("triangle-with-center", -3.0, Verdict.CERTIFIED_STABLE),
            ("square-with-center", 1.0, Verdict.CERTIFIED_STABLE),
            ("square-with-center", 3.0, Verdict.LINEARLY_UNSTABLE),
            ("square-with-center", -1.0, Verdict.LINEARLY_UNSTABLE),
            ("square-with-center", -0.3, Verdict.INCONCLUSIVE),
            ("square-with-center", -4.0, Verdict.LINEARLY_UNSTABLE),
        ],
    )
    def test_verdicts(self, kind, gamma, verdict):
        mu0, circ = center_fixed_point(kind, gamma)
        res = energy_casimir_certificate(mu0, circ)
        assert res.verdict is verdict

    def test_certified_evidence_complete(self):
        mu0, circ = center_fixed_point("triangle-with-center", 0.5)
        res = energy_casimir_certificate(mu0, circ)
        assert res.multipliers is not None
        assert res.minors is not None and all(m > 0 for m in res.minors)
        assert res.restricted_hessian is not None
        assert max(ev.real for ev in res.spectrum) < 1e-8

    def test_unstable_skips_certificate(self):
        mu0, circ = center_fixed_point("square-with-center", 3.0)
        res = energy_casimir_certificate(mu0, circ)
        assert res.multipliers is None and res.minors is None
        assert "Re lambda" in res.reason

    def test_rejects_non_fixed_point(self):
        mu = unflatten(np.array([1.3, 1.0, 0.5, -np.sqrt(3) / 2]), 2)
        with pytest.raises(NotAFixedPoint):
            energy_casimir_certificate(mu, Circulations((1.0, 1.0, 1.0)))

    def test_verdict_invariant_under_basis_rotation(self):
        rng = np.random.default_rng(77)
        for kind, g in [("triangle-with-center", 0.5), ("square-with-center", 2.0)]:
            mu0, circ = center_fixed_point(kind, g)
            m = solve_multiplier_system(mu0, circ, (1,), 1.0)
            basis = tangent_basis(mu0, circ, (1,))
            q, _ = np.linalg.qr(rng.standard_normal((basis.shape[0],) * 2))
            rotated = q @ basis
            v1 = sylvester_verdict(restricted_hessian(mu0, circ, m, basis, (1,)))
            v2 = sylvester_verdict(restricted_hessian(mu0, circ, m, rotated, (1,)))
            assert v1.positive_definite == v2.positive_definite

    def test_equilateral_three_vortex_criterion(self):
        # sign of G1G2 + G1G3 + G2G3 decides the verdict
        for gammas, verdict in [
            ((1.0, 1.0, 1.0), Verdict.CERTIFIED_STABLE),
            ((1.0, 1.0, -0.4), Verdict.CERTIFIED_STABLE),
            ((1.0, 1.0, -0.6), Verdict.LINEARLY_UNSTABLE),
        ]:
            circ = Circulations(gammas)
            g = np.array(gammas)
            s2 = g[0] * g[1] + g[0] * g[2] + g[1] * g[2]
            res = energy_casimir_certificate(EQUILATERAL3_MU0, circ)
            assert res.verdict is verdict, (gammas, s2, res.reason)


class TestDynamicalCorroboration:
    def test_stable_point_stays_close(self):
        scen = build_scenario("triangle-with-center", gamma=0.5)
        mu0 = scenario_fixed_point(scen)
        z = relative_coordinates(scen.configuration).as_array()
        rng = np.random.default_rng(88)
        noise = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        z = z + 1e-4 * noise / np.linalg.norm(noise)
        u0 = flatten(moment_map(type(relative_coordinates(scen.configuration))(tuple(z))))
        traj = integrate(u0, scen.circ, t_end=20.0, dt=5e-3)
        assert not traj.aborted
        dev = np.abs(traj.states - flatten(mu0)).max()
        assert dev < 1e-2

    def test_unstable_point_grows_at_predicted_rate(self):
        scen = build_scenario("triangle-with-center", gamma=2.0)
        mu0 = scenario_fixed_point(scen)
        circ = scen.circ
        ev = spectrum(linearize(mu0, circ))
        lam = float(ev.real.max())
        assert lam > 1e-3
        z = relative_coordinates(scen.configuration).as_array()
        rng = np.random.default_rng(89)
        noise = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        z = z + 1e-6 * noise / np.linalg.norm(noise)
        u0 = flatten(moment_map(type(relative_coordinates(scen.configuration))(tuple(z))))
        traj = integrate(u0, circ, t_end=60.0, dt=5e-3)
        dev = np.abs(traj.states - flatten(mu0)).max(axis=1)
        # compare growth over the linear regime against e^{lam t}
        i0 = np.argmax(dev > 1e-5)
        i1 = np.argmax(dev > 1e-3)
        assert i1 > i0 > 0
        t_obs = traj.times[i1] - traj.times[i0]
        t_pred = np.log(dev[i1] / dev[i0]) / lam
        assert t_obs / t_pred < 3.0 and t_pred / t_obs < 3.0

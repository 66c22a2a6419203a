"""Tests for the Jacobi elliptic kernel"""

import numpy as np
import pytest
from scipy.special import ellipj, ellipk

from modules.elliptic import (
    QUARTER_SHIFTS,
    agm,
    complete_K,
    complete_K_prime,
    derivatives,
    duality_point,
    duality_residuals,
    jacobi,
    jacobi_values,
    nearest_pole,
    quarter_shift,
    shift_offset,
)
from utils.exceptions import DomainError, PoleError

TOL = 1e-12


class TestCompleteIntegrals:

    @pytest.mark.parametrize("m", [0.0, 0.1, 0.5, 0.9, 0.999])
    def test_matches_scipy(self, m):
        np.testing.assert_allclose(complete_K(m), ellipk(m), rtol=1e-14)

    @pytest.mark.parametrize("m", [0.1, 0.5, 0.9])
    def test_agm_relation(self, m):
        np.testing.assert_allclose(complete_K(m), np.pi / (2.0 * agm(1.0, np.sqrt(1.0 - m))), rtol=1e-13)

    def test_k_prime_is_k_of_complement(self):
        np.testing.assert_allclose(complete_K_prime(0.3), complete_K(0.7), rtol=1e-15)

    @pytest.mark.parametrize("m", [1.0, 1.5, -0.1])
    def test_k_domain(self, m):
        with pytest.raises(DomainError):
            complete_K(m)

    def test_k_prime_domain(self):
        with pytest.raises(DomainError):
            complete_K_prime(0.0)


class TestJacobiValues:

    @pytest.mark.parametrize("m", [0.2, 0.5, 0.8])
    def test_real_axis_matches_scipy(self, m):
        x = np.linspace(-6.0, 6.0, 41)
        sn, cn, dn = jacobi_values(x, m)
        expected = ellipj(x, m)
        np.testing.assert_allclose(sn.real, expected[0], atol=TOL)
        np.testing.assert_allclose(cn.real, expected[1], atol=TOL)
        np.testing.assert_allclose(dn.real, expected[2], atol=TOL)
        np.testing.assert_allclose(sn.imag, 0.0, atol=TOL)

    def test_trigonometric_limit(self):
        z = np.array([0.3 + 0.2j, -1.1 + 0.7j])
        sn, cn, dn = jacobi_values(z, 0.0)
        np.testing.assert_allclose(sn, np.sin(z), atol=TOL)
        np.testing.assert_allclose(cn, np.cos(z), atol=TOL)
        np.testing.assert_allclose(dn, 1.0, atol=TOL)

    @pytest.mark.parametrize("m", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_identities_at_random_points(self, m, rng):
        K, Kp = complete_K(m), complete_K_prime(m)
        z = rng.uniform(-2 * K, 2 * K, 200) + 1j * rng.uniform(-0.6 * Kp, 0.6 * Kp, 200)
        sn, cn, dn = jacobi_values(z, m)
        assert np.max(np.abs(sn**2 + cn**2 - 1.0)) < TOL
        assert np.max(np.abs(dn**2 + m * sn**2 - 1.0)) < TOL

    def test_analytic_continuation_of_sn(self):
        # sn(iy, m) = i sc(y, 1-m)
        y, m = 0.7, 0.4
        sn, _, _ = jacobi_values(1j * y, m)
        s, c, _, _ = ellipj(y, 1.0 - m)
        np.testing.assert_allclose(sn, 1j * s / c, atol=TOL)

    def test_pole_raises(self):
        m = 0.5
        with pytest.raises(PoleError) as info:
            jacobi_values(1j * complete_K_prime(m), m)
        np.testing.assert_allclose(info.value.location, 1j * complete_K_prime(m))

    def test_modulus_domain(self):
        with pytest.raises(DomainError):
            jacobi_values(0.5, 1.2)

    def test_nearest_pole(self):
        m = 0.5
        K, Kp = complete_K(m), complete_K_prime(m)
        pole, distance = nearest_pole(2 * K + 1j * Kp + 1e-3, m)
        np.testing.assert_allclose(pole, 2 * K + 1j * Kp)
        assert 0.0 < distance < 1e-2

    def test_scalar_triple(self):
        triple = jacobi(0.4 + 0.3j, 0.6)
        assert max(triple.identity_residuals()) < TOL


class TestShiftsAndDuality:

    @pytest.mark.parametrize("shift", QUARTER_SHIFTS)
    def test_quarter_shift_matches_direct_evaluation(self, shift):
        z, m = 0.3 + 0.2j, 0.4
        shifted = quarter_shift(z, m, shift)
        sn, cn, dn = jacobi_values(z + shift_offset(shift, m), m)
        np.testing.assert_allclose([shifted.sn, shifted.cn, shifted.dn], [sn, cn, dn], atol=1e-11)

    def test_unknown_shift(self):
        with pytest.raises(DomainError):
            quarter_shift(0.1, 0.5, "2K")

    @pytest.mark.parametrize("m", [0.2, 0.5, 0.8])
    def test_duality_identities(self, m, rng):
        K, Kp = complete_K(m), complete_K_prime(m)
        y = rng.uniform(-2 * K, 2 * K, 100) + 1j * rng.uniform(-0.6 * Kp, 0.6 * Kp, 100)
        for residual in duality_residuals(y, m):
            assert np.max(residual) < TOL

    def test_duality_point(self):
        m = 0.3
        np.testing.assert_allclose(duality_point(0.0, m), complete_K_prime(m) + 1j * complete_K(m))


class TestDerivativesAndPeriods:

    @pytest.fixture
    def points(self, rng):
        m = 0.45
        K, Kp = complete_K(m), complete_K_prime(m)
        z = rng.uniform(-K, K, 50) + 1j * rng.uniform(-0.5 * Kp, 0.5 * Kp, 50)
        return z, m, K, Kp

    def test_derivatives_match_central_differences(self, points):
        z, m, _, _ = points
        h = 1e-5
        forward = np.array(jacobi_values(z + h, m))
        backward = np.array(jacobi_values(z - h, m))
        numeric = (forward - backward) / (2 * h)
        analytic = np.array(derivatives(*jacobi_values(z, m), m))
        np.testing.assert_allclose(numeric, analytic, atol=1e-8)

    def test_derivative_formulas(self):
        sn, cn, dn = jacobi_values(0.4 + 0.2j, 0.3)
        d_sn, d_cn, d_dn = derivatives(sn, cn, dn, 0.3)
        assert d_sn == pytest.approx(cn * dn)
        assert d_cn == pytest.approx(-sn * dn)
        assert d_dn == pytest.approx(-0.3 * sn * cn)

    def test_real_periods(self, points):
        z, m, K, _ = points
        sn, cn, dn = jacobi_values(z, m)
        sn4, cn4, _ = jacobi_values(z + 4 * K, m)
        sn2, cn2, dn2 = jacobi_values(z + 2 * K, m)
        np.testing.assert_allclose([sn4, cn4], [sn, cn], atol=1e-10)
        np.testing.assert_allclose([sn2, cn2, dn2], [-sn, -cn, dn], atol=1e-10)

    def test_imaginary_periods(self, points):
        z, m, _, Kp = points
        sn, cn, dn = jacobi_values(z, m)
        shifted = jacobi_values(z + 2j * Kp, m)
        np.testing.assert_allclose(shifted, [sn, -cn, -dn], atol=1e-10)
        _, cn_full, dn_full = jacobi_values(z + 4j * Kp, m)
        np.testing.assert_allclose([cn_full, dn_full], [cn, dn], atol=1e-9)

    def test_conjugation_symmetry(self, points):
        z, m, _, _ = points
        direct = np.array(jacobi_values(np.conj(z), m))
        conjugated = np.conj(np.array(jacobi_values(z, m)))
        np.testing.assert_allclose(direct, conjugated, atol=TOL)

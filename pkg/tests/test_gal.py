"""Tests for the GAL potential, its notation and transforms"""

import numpy as np
import pytest
from pydantic import ValidationError

from modules.catalog import closed_form_edges, energies_of
from modules.elliptic import complete_K, complete_K_prime, jacobi_values
from modules.gal import (
    TRANSFORMS,
    eval_potential,
    line_points,
    period_grid,
    potential_at_y,
    pt_symmetry_residual,
    transform_spec,
)
from modules.susy import parameter_from_coefficient
from schema import GALSpec
from utils.exceptions import ConfigurationError, DomainError


class TestGALSpec:

    def test_default_beta_is_half_quarter_period(self):
        spec = GALSpec(a=1.0, m=0.3)
        np.testing.assert_allclose(spec.beta, complete_K(0.3) / 2.0)

    def test_bracket_and_period(self, generic_spec):
        assert generic_spec.bracket == "[6,2,2,2]"
        np.testing.assert_allclose(generic_spec.period, 2.0 * complete_K_prime(0.4))

    def test_singular_line_rejected(self):
        with pytest.raises(ValidationError, match="singular line"):
            GALSpec(a=1.0, m=0.5, beta=0.0)

    @pytest.mark.parametrize("m", [0.0, 1.0, -0.2])
    def test_modulus_range(self, m):
        with pytest.raises(ValidationError):
            GALSpec(a=1.0, m=m)

    def test_unknown_field_rejected(self):
        with pytest.raises(ValidationError):
            GALSpec(a=1.0, m=0.5, h=2.0)


class TestPotential:

    def test_lame_formula(self, lame1):
        x = np.linspace(0.0, 1.0, 5)
        y = 1j * x + lame1.beta
        sn, _, _ = jacobi_values(y, lame1.m)
        np.testing.assert_allclose(eval_potential(lame1, x), -2.0 * lame1.m * sn**2, atol=1e-13)

    def test_scalar_evaluation(self, lame1):
        assert isinstance(eval_potential(lame1, 0.25), complex)

    @pytest.mark.parametrize("params", [(1, 0, 0, 0), (2, 1, 0, 0), (2, 1, 1, 1), (0.7, 0.2, 1.3, 0.4)])
    def test_pt_symmetry(self, params):
        a, b, f, g = params
        spec = GALSpec(a=a, b=b, f=f, g=g, m=0.6)
        assert pt_symmetry_residual(spec, period_grid(spec, 64)) < 1e-12

    def test_periodic_in_x(self, generic_spec):
        x = np.linspace(0.1, 1.0, 7)
        np.testing.assert_allclose(eval_potential(generic_spec, x + generic_spec.period),
                                   eval_potential(generic_spec, x), atol=1e-10)

    def test_singular_beta_override(self, lame1):
        with pytest.raises(ConfigurationError):
            eval_potential(lame1, 0.3, beta=complete_K(lame1.m))


class TestTransforms:

    @pytest.mark.parametrize("op, offset", [("shift_K", "K"), ("shift_iK'", "iK'"), ("shift_K_iK'", "K+iK'")])
    def test_translations(self, generic_spec, op, offset):
        result = transform_spec(generic_spec, op)
        K, Kp = generic_spec.quarter_period, generic_spec.complementary_quarter_period
        shift = {"K": K, "iK'": 1j * Kp, "K+iK'": K + 1j * Kp}[offset]
        y = line_points(generic_spec, np.linspace(0.1, 0.9, 9))
        np.testing.assert_allclose(potential_at_y(result.new_spec, y),
                                   potential_at_y(generic_spec, y + shift), atol=1e-9)
        assert result.energy_map.is_identity

    @pytest.mark.parametrize("name", "abfg")
    def test_reflection_keeps_coefficients(self, generic_spec, name):
        result = transform_spec(generic_spec, f"reflect_{name}")
        np.testing.assert_allclose(result.new_spec.coefficients, generic_spec.coefficients)

    def test_dual_maps_lame_edges(self):
        spec = GALSpec(a=1.0, m=0.3)
        dual = transform_spec(spec, "dual")
        assert dual.new_spec.m == pytest.approx(0.7)
        mapped = np.sort(dual.energy_map.apply(energies_of(closed_form_edges(dual.new_spec))).real)
        np.testing.assert_allclose(mapped, np.sort(energies_of(closed_form_edges(spec)).real), atol=1e-12)

    def test_dual_parameter_order(self):
        result = transform_spec(GALSpec(a=3.0, b=1.0, f=2.0, g=0.0, m=0.4), "dual")
        assert result.new_spec.parameters == (3.0, 0.0, 2.0, 1.0)
        assert result.energy_map.sigma == -1

    def test_unknown_transform(self, lame1):
        with pytest.raises(DomainError):
            transform_spec(lame1, "rotate")

    def test_transform_names(self):
        assert "dual" in TRANSFORMS and len(TRANSFORMS) == 8


class TestInvolutionsAndNotation:

    @pytest.mark.parametrize("params", [(1, 0, 0, 0), (2, 1, 0, 1), (2, 1, 1, 1), (0.7, 0.2, 1.3, 0.4)])
    def test_dual_twice_is_identity(self, params):
        a, b, f, g = params
        spec = GALSpec(a=a, b=b, f=f, g=g, m=0.35)
        once = transform_spec(spec, "dual")
        twice = transform_spec(once.new_spec, "dual")
        assert twice.new_spec.parameters == spec.parameters
        assert twice.new_spec.m == pytest.approx(spec.m, abs=1e-15)
        assert twice.energy_map.compose(once.energy_map).is_identity
        energies = np.array([-3.2, -1.0 + 0.5j])
        np.testing.assert_allclose(twice.energy_map.apply(once.energy_map.apply(energies)), energies)

    def test_pt_residual_grows_off_the_symmetric_line(self, generic_spec):
        grid = period_grid(generic_spec, 64)
        on_line = pt_symmetry_residual(generic_spec, grid)
        off_line = pt_symmetry_residual(generic_spec, grid, beta=generic_spec.beta + 0.1j)
        assert on_line < 1e-12
        assert off_line > 1e-3

    def test_bracket_matches_explicit_coefficients(self, generic_spec):
        x = np.linspace(0.05, 1.5, 11)
        y = line_points(generic_spec, x)
        sn, cn, dn = jacobi_values(y, generic_spec.m)
        A, B, F, G = 6.0, 2.0, 2.0, 2.0
        m = generic_spec.m
        explicit = -A * m * sn**2 - B * m * (cn / dn) ** 2 - F * (dn / cn) ** 2 - G / sn**2
        assert generic_spec.bracket == "[6,2,2,2]"
        assert generic_spec.coefficients == (A, B, F, G)
        np.testing.assert_allclose(eval_potential(generic_spec, x), explicit, atol=1e-10)

    def test_bracket_from_any_realization(self, generic_spec):
        # p and -p-1 give the same coefficient
        reflected = GALSpec(a=-3.0, b=-2.0, f=1.0, g=-2.0, m=generic_spec.m)
        assert reflected.bracket == generic_spec.bracket
        x = np.linspace(0.05, 1.5, 11)
        np.testing.assert_allclose(eval_potential(reflected, x), eval_potential(generic_spec, x), atol=1e-12)

    def test_bracket_round_trip(self, generic_spec):
        params = [parameter_from_coefficient(c) for c in generic_spec.coefficients]
        rebuilt = GALSpec(**dict(zip("abfg", params)), m=generic_spec.m)
        assert rebuilt.bracket == generic_spec.bracket
        assert rebuilt.parameters == generic_spec.parameters

"""Tests for the closed-form tables, collocation and mid-band states"""

import numpy as np
import pytest

from modules.catalog import (
    MIDBAND_CASES,
    QESCatalog,
    closed_form_edges,
    delta_values,
    dedupe_states,
    energies_of,
    lame_a4_closed_energies,
    delta_branch_residuals,
    interchange_discrepancy,
    lame_edges,
    lame_energy_reflection,
    midband_energies,
    midband_reflection,
    midband_spec,
    midband_states,
    qes_spectrum,
    qes_spectrum_general,
    realizations,
    table_family_specs,
)
from modules.states import eval_state, floquet_sign, period_class, pole_margin, schrodinger_residual
from schema import GALSpec, QESState
from utils.exceptions import DomainError, UnsupportedFamilyError

RESIDUAL_TOL = 1e-8


class TestDeltaValues:

    def test_delta1_for_lame_a2(self):
        deltas = delta_values(2.0, 0.0, 0.0, 0.5)
        np.testing.assert_allclose(deltas[1], np.sqrt(0.75))
        assert not deltas.complex_flags["delta1"]

    def test_negative_radicand_gives_imaginary_root(self):
        # delta5 radicand (a-1+m)^2 - (2a-1)m < 0 for a=1.2, m=0.6
        deltas = delta_values(1.2, 0.0, 0.0, 0.6)
        assert deltas.complex_flags["delta5"]
        assert deltas[5].real == 0.0 and deltas[5].imag > 0.0


class TestClosedFormEdges:

    def test_realizations_of_lame(self):
        assert len(realizations(GALSpec(a=2.0, m=0.5))) == 16
        assert len(realizations(GALSpec(a=-0.5, m=0.5))) == 8

    def test_lame_a1(self, lame1):
        energies = np.sort(energies_of(closed_form_edges(lame1)).real)
        np.testing.assert_allclose(energies, [-1.5, -1.0, -0.5], atol=1e-14)

    def test_lame_a2(self, lame2, lame2_edges):
        energies = np.sort(energies_of(closed_form_edges(lame2)).real)
        np.testing.assert_allclose(energies, lame2_edges, atol=1e-13)

    @pytest.mark.parametrize("a", [1, 2, 3])
    @pytest.mark.parametrize("m", [0.3, 0.7])
    def test_lame_residuals(self, a, m):
        spec = GALSpec(a=float(a), m=m)
        states = closed_form_edges(spec)
        assert len(states) == 2 * a + 1
        for state in states:
            assert schrodinger_residual(state, spec) < RESIDUAL_TOL, state.provenance

    def test_associated_lame_contains_n0_row(self):
        spec = GALSpec(a=2.0, g=1.0, m=0.5)
        states = closed_form_edges(spec)
        energies = energies_of(states)
        assert np.min(np.abs(energies - (-6.0))) < 1e-12
        for state in states:
            assert schrodinger_residual(state, spec) < RESIDUAL_TOL, state.provenance

    def test_unsupported_family(self):
        with pytest.raises(UnsupportedFamilyError):
            closed_form_edges(GALSpec(a=0.3, b=0.2, f=0.1, g=0.4, m=0.5))

    def test_lame_states_are_pole_free(self, lame2):
        for state in closed_form_edges(lame2):
            assert pole_margin(state, lame2, count=512) > 1e-6

    def test_sn_cn_dn_state_of_a3(self):
        spec = GALSpec(a=3.0, m=0.5)
        totals = [tuple(round(p + q) for p, q in zip(s.prefactor_exponents, s.primary_factor))
                  for s in closed_form_edges(spec)]
        assert (1, 1, 1) in totals

    def test_table_family_specs_are_distinct(self):
        specs = table_family_specs(range(1, 3), 0.5)
        brackets = [s.bracket for s in specs]
        assert len(brackets) == len(set(brackets))
        assert "[6,0,0,0]" in brackets


class TestCollocation:

    def test_lame_a2_sector_free(self):
        states = qes_spectrum_general(GALSpec(a=2.0, m=0.5))
        np.testing.assert_allclose(np.sort(energies_of(states).real),
                                   [-3.0 - 2 * np.sqrt(0.75), -3.0 + 2 * np.sqrt(0.75)], atol=1e-9)
        assert all(s.provenance == "collocation" for s in states)

    def test_full_spectrum_covers_closed_forms(self, lame2, lame2_edges):
        collocated = energies_of(qes_spectrum(lame2))
        for energy in lame2_edges:
            assert np.min(np.abs(collocated - energy)) < 1e-9

    def test_collocated_states_solve_the_equation(self, lame2):
        for state in qes_spectrum(lame2):
            assert schrodinger_residual(state, lame2) < 1e-7

    def test_no_closure(self):
        with pytest.raises(UnsupportedFamilyError):
            qes_spectrum_general(GALSpec(a=0.3, m=0.5))

    def test_unknown_sector(self, lame2):
        with pytest.raises(DomainError):
            qes_spectrum_general(lame2, sector=("tn",))

    def test_non_integer_parameters(self):
        # a + g = 2 closes although neither parameter is an integer
        spec = GALSpec(a=1.3, g=0.7, m=0.4)
        states = qes_spectrum_general(spec)
        assert len(states) == 2
        for state in states:
            assert schrodinger_residual(state, spec) < 1e-7


class TestLameA4:

    def test_closed_energies_at_half(self):
        pairs = lame_a4_closed_energies(0.5)
        np.testing.assert_allclose(pairs["sn*cn"], [-12.5 - 2 * np.sqrt(5.5), -12.5 + 2 * np.sqrt(5.5)])

    def test_catalog_has_nine_edges(self):
        states = QESCatalog().states(GALSpec(a=4.0, m=0.5))
        assert len(states) == 9
        assert sum(s.provenance == "cubic" for s in states) == 3

    @pytest.mark.parametrize("a", [1, 2, 3])
    @pytest.mark.parametrize("m", [0.3, 0.45])
    def test_energy_reflection(self, a, m):
        assert lame_energy_reflection(a, m) < 1e-12

    def test_lame_a3_has_seven_edges(self):
        assert len(lame_edges(3, 0.3)) == 7

    @pytest.mark.parametrize("level", [0.5, 1.5])
    @pytest.mark.parametrize("m", [0.2, 0.5, 0.8])
    def test_half_integral_midband_reflection(self, level, m):
        assert midband_reflection(level, m) < 1e-12

    def test_half_integral_reflection_pairs_levels(self):
        # a = 3/2: E_0(m) = -15/4 - E_1(1-m)
        lower = sorted(e.real for e in midband_energies("b_half", 0.5, 0, 0, 1.5, 0.3))
        upper = sorted(e.real for e in midband_energies("b_half", 0.5, 0, 0, 1.5, 0.7))
        assert lower[0] == pytest.approx(-3.75 - upper[1], abs=1e-12)
        assert lower[0] != pytest.approx(-3.75 - upper[0], abs=1e-6)


class TestInterchangeSymmetry:

    @pytest.mark.parametrize("family", ["lame-g", "lame-f"])
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("m", [0.3, 0.65])
    def test_energies_map_into_each_other(self, family, n, m):
        for a in range(n + 1):
            fixed, multiset = interchange_discrepancy(family, n, float(a), m)
            assert fixed < 1e-12
            assert multiset < 1e-12

    def test_non_integer_a(self):
        fixed, multiset = interchange_discrepancy("lame-g", 3, 1.3, 0.4)
        assert max(fixed, multiset) < 1e-12

    def test_lame_g_n1_pair(self):
        # lame-g n=1: the cn row at a=2 carries the dn energy of a=-1 and vice versa
        m = 0.4
        assert interchange_discrepancy("lame-g", 1, 2.0, m) == pytest.approx((0.0, 0.0), abs=1e-14)

    def test_translates_share_the_qes_spectrum(self):
        # [6,0,0,2] and [2,0,0,6] are iK' translates of each other
        key = lambda z: (round(z.real, 8), round(z.imag, 8))
        first = sorted(energies_of(qes_spectrum(GALSpec(a=2.0, g=1.0, m=0.4))), key=key)
        second = sorted(energies_of(qes_spectrum(GALSpec(a=1.0, g=2.0, m=0.4))), key=key)
        assert len(first) == len(second)
        np.testing.assert_allclose(first, second, atol=1e-9)

    def test_unknown_family(self):
        with pytest.raises(DomainError):
            interchange_discrepancy("associated", 2, 1.0, 0.5)


class TestDeltaBranchSymmetry:

    @pytest.mark.parametrize("a", [0.3, 1.0, 2.0, 2.5, 4.0])
    @pytest.mark.parametrize("m", [0.2, 0.55])
    def test_delta5_delta8_fixed_delta6_delta7_swap(self, a, m):
        residuals = delta_branch_residuals(a, m)
        assert residuals["interchange"] < 1e-12
        assert residuals["modulus"] < 1e-12

    def test_delta6_and_delta7_differ(self):
        deltas = delta_values(2.5, 0.0, 0.0, 0.3)
        assert abs(deltas[6] - deltas[7]) > 1e-3
        np.testing.assert_allclose(deltas[6], delta_values(0.5, 0.0, 0.0, 0.3)[7], atol=1e-12)
        np.testing.assert_allclose(deltas[7], delta_values(2.5, 0.0, 0.0, 0.7)[6], atol=1e-12)


class TestMidband:

    @pytest.mark.parametrize("N, split", [(0, 0), (1, 0), (1, 1)])
    def test_b_half_states(self, N, split):
        t, m = 1.3, 0.5
        spec = midband_spec("b_half", t, N, split, 0.5, m)
        states = midband_states("b_half", t, N, split, 0.5, m)
        assert len(states) == 2
        assert states[0].energy == states[1].energy
        for state in states:
            assert schrodinger_residual(state, spec) < RESIDUAL_TOL, state.provenance
            assert state.period_class == "bloch(1.3)"

    def test_b_half_energy_even_in_t(self):
        assert midband_energies("b_half", 1.3, 1, 0, 0.5, 0.5) == midband_energies("b_half", -1.3, 1, 0, 0.5, 0.5)

    @pytest.mark.parametrize("case", ["f_half", "g_half"])
    def test_lowest_states_of_other_cases(self, case):
        t, m = 1.3, 0.5
        spec = midband_spec(case, t, 0, 0, 0.5, m)
        for state in midband_states(case, t, 0, 0, 0.5, m):
            assert schrodinger_residual(state, spec) < RESIDUAL_TOL, state.provenance

    def test_level_three_halves_has_two_branches(self):
        assert len(midband_energies("b_half", 1.3, 1, 0, 1.5, 0.5)) == 2

    def test_spec_layout(self):
        spec = midband_spec("g_half", 1.3, 2, 1, 0.5, 0.5)
        np.testing.assert_allclose(spec.parameters, (0.8, 1.0, 1.0, 0.5))

    @pytest.mark.parametrize("kwargs", [
        dict(case="x_half", N=0, split=0, level=0.5),
        dict(case="b_half", N=1, split=2, level=0.5),
        dict(case="b_half", N=0, split=0, level=1.0),
    ])
    def test_invalid_arguments(self, kwargs):
        with pytest.raises(DomainError):
            midband_spec(t=1.3, m=0.5, **kwargs)

    def test_cases(self):
        assert MIDBAND_CASES == ("b_half", "f_half", "g_half")


class TestStateHelpers:

    def test_period_classes(self):
        assert period_class((0, 0, 0)) == "2iK'"
        assert period_class((0, 1, 0)) == "2K+2iK'"
        assert period_class((0, 0, 1)) == "4iK'"
        assert period_class((1, 0, 1)) == "2K+2iK'"
        assert period_class((0, 0.5, 0)) == "4K-type"
        assert period_class((0, 0, 0), bloch_exponent=0.3) == "bloch(0.3)"

    def test_floquet_sign(self):
        assert floquet_sign(QESState(energy=-1.0, prefactor_exponents=(0, 1, 0))) == -1
        assert floquet_sign(QESState(energy=-1.0, prefactor_exponents=(1, 1, 1))) == 1

    def test_eval_state_scalar(self, lame1):
        state = closed_form_edges(lame1)[0]
        assert isinstance(eval_state(state, lame1, 0.2), complex)

    def test_dedupe_keeps_first(self):
        states = [QESState(energy=-1.0, prefactor_exponents=(0, 0, 0), provenance="a"),
                  QESState(energy=-1.0 + 1e-12, prefactor_exponents=(0, 0, 0), provenance="b"),
                  QESState(energy=-2.0, prefactor_exponents=(0, 0, 0), provenance="c")]
        kept = dedupe_states(states)
        assert [s.provenance for s in kept] == ["c", "a"]

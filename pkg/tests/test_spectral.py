"""Tests for the Floquet oracle"""

from types import SimpleNamespace

import numpy as np
import pytest

from modules import spectral
from modules.gal import potential_callable
from modules.spectral import FloquetOracle, default_energy_window
from schema import GALSpec
from utils.exceptions import IntegrationError


@pytest.fixture(scope="module")
def oracle() -> FloquetOracle:
    return FloquetOracle()


class TestTraces:

    def test_free_particle(self, oracle):
        energies = np.array([-1.0, 0.5, 2.0, 10.0])
        period = 1.0
        delta = oracle.traces(lambda x: 0.0j, energies, period)
        expected = 2.0 * np.cos(period * np.sqrt(energies.astype(complex)))
        np.testing.assert_allclose(delta, expected, atol=1e-8)

    def test_empty_energy_list(self, oracle):
        assert oracle.traces(lambda x: 0.0j, [], 1.0).size == 0

    def test_pt_discriminant_is_real(self, oracle, lame2):
        delta = oracle.traces(potential_callable(lame2), np.linspace(-6.0, 1.0, 15), lame2.period)
        assert np.max(np.abs(delta.imag)) < 1e-6

    def test_discriminant_sample(self, oracle, lame1):
        sample = oracle.discriminant(lame1, -1.0)
        assert sample.is_edge_like
        assert not sample.broken_pt

    def test_closed_form_edges_touch_two(self, oracle, lame2, lame2_edges):
        assert np.max(oracle.edge_residuals(lame2, lame2_edges)) < 1e-6

    def test_curve_length(self, oracle, lame1):
        curve = oracle.discriminant_curve(lame1, np.linspace(-2.0, 0.0, 5))
        assert [s.E for s in curve] == list(np.linspace(-2.0, 0.0, 5))

    def test_integration_failure(self, oracle, monkeypatch):
        stalled = SimpleNamespace(status=-1, t=np.array([0.0, 0.25]), message="step size too small")
        monkeypatch.setattr(spectral, "solve_ivp", lambda *args, **kwargs: stalled)
        with pytest.raises(IntegrationError) as info:
            oracle.traces(lambda x: 0.0j, [1.0], 1.0)
        assert info.value.location == 0.25


class TestBandEdges:

    def test_default_window(self, lame1):
        e_min, e_max = default_energy_window(lame1)
        assert e_min < -1.5 and e_max > -0.5

    @pytest.mark.slow
    def test_lame_a1_edges(self, oracle, lame1):
        edges = oracle.band_edges_numeric(lame1, -3.0, 1.0)
        np.testing.assert_allclose(edges, [-1.5, -1.0, -0.5], atol=1e-8)

    @pytest.mark.slow
    def test_lame_a1_classification(self, oracle, lame1):
        structure = oracle.classify_bands(lame1, -3.0, 1.0)
        assert structure.gap_count == 1
        assert len(structure.bands) == 2
        assert structure.bands[0][0] == pytest.approx(-1.5, abs=1e-8)
        assert structure.gaps[0] == (-3.0, structure.edges[0])
        assert not structure.broken_pt

    @pytest.mark.slow
    def test_lame_a2_edges(self, oracle, lame2, lame2_edges):
        edges = oracle.band_edges_numeric(lame2, -6.0, 0.0)
        np.testing.assert_allclose(edges, lame2_edges, atol=1e-8)

    def test_free_particle_scan_has_no_edges_below_zero(self, oracle):
        edges, tangencies, broken = oracle.scan(lambda x: 0.0j, 1.0, -2.0, -0.1, scan_points=200)
        assert edges == [] and tangencies == [] and not broken

    def test_empty_window(self, oracle):
        with pytest.raises(ValueError):
            oracle.classify_potential(lambda x: 0.0j, 1.0, 1.0, 1.0)

    def test_tolerances_from_config(self):
        oracle = FloquetOracle()
        assert oracle.rtol == oracle.config.ODE_RTOL
        assert FloquetOracle(rtol=1e-8).rtol == 1e-8


def test_generic_spec_window_is_finite(generic_spec):
    e_min, e_max = default_energy_window(generic_spec)
    assert np.isfinite(e_min) and e_min < e_max
    assert GALSpec(a=1.0, m=0.5).bracket == "[2,0,0,0]"

"""
SUSY Partner Module
Superpotentials of QES states, partner potentials V+ = W^2 + W', identification
of partners inside the GAL family and numerical isospectrality reports
"""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from config import Config
from schema import GALSpec, IsospectralityReport, PartnerProfile, QESState
from modules.catalog import QESCatalog, energies_of
from modules.elliptic import jacobi_values
from modules.gal import line_points, period_grid
from modules.spectral import FloquetOracle
from modules.states import elliptic_point, state_jet_at
from utils.exceptions import PoleError
from utils.logger import log_execution_time, setup_logger

# (label, first parameters, second parameters)
CONJECTURE_PAIRS: Tuple[Tuple[str, Tuple[float, ...], Tuple[float, ...]], ...] = (
    ("lame-2a(2a+1) a=1", (2.0, 0.0, 0.0, 0.0), (1.0, 1.0, 1.0, 0.0)),
    ("lame-2a(2a+1) a=2", (4.0, 0.0, 0.0, 0.0), (2.0, 2.0, 2.0, 1.0)),
    ("lame-(2a-1)2a a=2", (3.0, 0.0, 0.0, 0.0), (2.0, 1.0, 1.0, 1.0)),
    ("associated-lame b=a-2 a=3", (3.0, 1.0, 0.0, 0.0), (2.0, 2.0, 1.0, 0.0)),
)


def gal_basis(m: float, y) -> np.ndarray:
    """Columns -m sn^2, -m cd^2, -dc^2, -ns^2, 1 at the points y"""
    sn, cn, dn = jacobi_values(y, m)
    s2, c2, d2 = sn * sn, cn * cn, dn * dn
    return np.column_stack([-m * s2, -m * c2 / d2, -d2 / c2, -1.0 / s2, np.ones_like(s2)])


def parameter_from_coefficient(value: float) -> Optional[float]:
    """Larger root p of p(p+1) = value, None when complex"""
    discriminant = 1.0 + 4.0 * value
    if discriminant < 0.0:
        return None
    return 0.5 * (-1.0 + np.sqrt(discriminant))


class SusyPartnerBuilder:
    """Builds SUSY partners of GAL potentials from their exact eigenstates"""

    def __init__(self, oracle: Optional[FloquetOracle] = None):
        self.config = Config()
        self.logger = setup_logger('susy_partner_builder')
        self.oracle = oracle or FloquetOracle()
        self.catalog = QESCatalog()

    def _log_derivatives(self, state: QESState, spec: GALSpec, x) -> Tuple[np.ndarray, np.ndarray]:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        jet = state_jet_at(state, elliptic_point(line_points(spec, x), spec.m))
        magnitude = np.abs(jet.value)
        floor = self.config.PSI_FLOOR * max(float(np.max(magnitude)), 1.0)
        if np.any(magnitude < floor):
            index = int(np.argmin(magnitude))
            raise PoleError(f"|psi| = {magnitude[index]:.3e} at x={x[index]}: superpotential has a pole",
                            location=complex(x[index]))
        return jet.first / jet.value, jet.second / jet.value

    def superpotential(self, state: QESState, spec: GALSpec, x):
        """
        W(x) = -psi'(x)/psi(x) on the line y = ix + beta

        Args:
            state: Factored eigenstate
            spec: Potential the state belongs to
            x: Real point or array

        Returns:
            Complex value(s)
        """
        ratio, _ = self._log_derivatives(state, spec, x)
        W = -1j * ratio
        return complex(W[0]) if np.ndim(x) == 0 else W

    def partner_profile(self, state: QESState, spec: GALSpec,
                        grid: Optional[Sequence[float]] = None) -> PartnerProfile:
        """
        V+ = W^2 + W' sampled over one period

        Args:
            state: Factored eigenstate
            spec: Potential the state belongs to
            grid: Real x points (default: Config.PARTNER_GRID points over one period)

        Returns:
            PartnerProfile
        """
        x = period_grid(spec, self.config.PARTNER_GRID) if grid is None else np.asarray(grid, dtype=float)
        first, second = self._log_derivatives(state, spec, x)
        W = -1j * first
        W_prime = second - first * first
        values = W * W + W_prime
        return PartnerProfile(
            grid=list(x),
            values=list(values),
            superpotential=list(W),
            superpotential_prime=list(W_prime),
            factorization_energy=state.energy,
            period=spec.period,
            m=spec.m,
            beta=spec.beta,
        )

    def partner_callable(self, profile: PartnerProfile, shift: complex = 0.0) -> Callable[[float], complex]:
        """
        Periodic cubic interpolation of V+ + shift

        Args:
            profile: PartnerProfile sampled on [0, period) without the endpoint
            shift: Constant added to the profile (the factorization energy restores the original scale)

        Returns:
            Scalar x -> V(x)
        """
        x = np.append(np.asarray(profile.grid), profile.period)
        values = np.asarray(profile.values, dtype=complex) + shift
        values = np.append(values, values[0])
        real = CubicSpline(x, values.real, bc_type="periodic")
        imag = CubicSpline(x, values.imag, bc_type="periodic")

        def potential(point: float) -> complex:
            return complex(real(point), imag(point))

        return potential

    def identify_gal(self, profile: PartnerProfile, m: Optional[float] = None,
                     beta: Optional[float] = None) -> Optional[Tuple[GALSpec, float]]:
        """
        Least-squares fit of a sampled profile by the GAL basis plus a constant

        Args:
            profile: PartnerProfile
            m: Modulus (default: the profile's)
            beta: Line offset (default: the profile's)

        Returns:
            (GALSpec, fit residual) when the fit is exact to Config.IDENTIFY_TOL, else None
        """
        m = profile.m if m is None else m
        beta = profile.beta if beta is None else beta
        x = np.asarray(profile.grid)
        values = np.asarray(profile.values, dtype=complex)
        basis = gal_basis(m, 1j * x + beta)
        system = np.vstack([basis.real, basis.imag])
        target = np.concatenate([values.real, values.imag])
        coefficients, *_ = np.linalg.lstsq(system, target, rcond=None)
        fitted = basis @ coefficients
        residual = float(np.max(np.abs(fitted - values)) / max(1.0, float(np.max(np.abs(values)))))
        if residual >= self.config.IDENTIFY_TOL:
            self.logger.info(f"profile is outside the GAL family (fit residual {residual:.3e})")
            return None
        parameters = [parameter_from_coefficient(c) for c in coefficients[:4]]
        if any(p is None for p in parameters):
            self.logger.info(f"fitted coefficients {coefficients[:4]} have no real parameters")
            return None
        a, b, f, g = (float(np.round(p, 9)) for p in parameters)
        spec = GALSpec(a=a, b=b, f=f, g=g, m=m, beta=beta)
        self.logger.debug(f"identified partner {spec.bracket} with constant {coefficients[4]:.6g}, residual {residual:.3e}")
        return spec, residual

    def mean_offset_deviation(self, profile: PartnerProfile, reference) -> float:
        """max |(V+ - mean V+) - (ref - mean ref)| for a reference sampled on the same grid"""
        values = np.asarray(profile.values, dtype=complex)
        reference = np.asarray(reference, dtype=complex)
        return float(np.max(np.abs((values - values.mean()) - (reference - reference.mean()))))

    def compare_edge_sets(self, label_a: str, edges_a: Sequence[float], label_b: str,
                          edges_b: Sequence[float], tolerance: float = 1e-6, note: str = "") -> IsospectralityReport:
        """
        Edge-by-edge comparison of two sorted edge lists

        Returns:
            IsospectralityReport; lists of different length never agree
        """
        edges_a, edges_b = sorted(edges_a), sorted(edges_b)
        if len(edges_a) != len(edges_b) or not edges_a:
            discrepancy = float("inf")
        else:
            discrepancy = float(np.max(np.abs(np.asarray(edges_a) - np.asarray(edges_b))))
        return IsospectralityReport(
            label_a=label_a, label_b=label_b, edges_a=edges_a, edges_b=edges_b,
            max_discrepancy=discrepancy, tolerance=tolerance, agree=discrepancy < tolerance, note=note,
        )

    def _window_for(self, spec: GALSpec, e_min: Optional[float], e_max: Optional[float]):
        if e_min is not None and e_max is not None:
            return e_min, e_max
        energies = energies_of(self.catalog.states(spec)).real
        return energies.min() - 0.5, energies.max() + 0.5

    @log_execution_time
    def isospectrality_report(self, spec: GALSpec, state: QESState, e_min: Optional[float] = None,
                              e_max: Optional[float] = None, tolerance: float = 1e-6,
                              reference_edges: Optional[Sequence[float]] = None) -> IsospectralityReport:
        """
        Band edges of a spec against band edges of its partner built from one state

        The partner is compared on the original energy scale, V+ + E.

        Args:
            spec: GAL potential
            state: Eigenstate used for the factorization
            e_min, e_max: Energy window (default: around the catalog energies)
            tolerance: Agreement threshold
            reference_edges: Precomputed edges of the potential in the same window

        Returns:
            IsospectralityReport
        """
        e_min, e_max = self._window_for(spec, e_min, e_max)
        profile = self.partner_profile(state, spec)
        if reference_edges is None:
            original = self.oracle.band_edges_numeric(spec, e_min, e_max)
        else:
            original = list(reference_edges)
        partner, _, _ = self.oracle.scan(self.partner_callable(profile, shift=state.energy),
                                         profile.period, e_min, e_max)
        identified = self.identify_gal(profile)
        note = f"partner {identified[0].bracket}" if identified else "partner outside the GAL family"
        report = self.compare_edge_sets(spec.bracket, original, f"partner[{state.provenance}]", partner,
                                        tolerance, note=note)
        self.logger.info(f"{spec.bracket} vs partner from E={state.energy.real:.6g}: "
                         f"max discrepancy {report.max_discrepancy:.3e}")
        return report

    def conjecture_report(self, m: float, pairs=CONJECTURE_PAIRS, tolerance: float = 1e-6) -> List[IsospectralityReport]:
        """
        Edge-set comparison of the conjectured isospectral pairs

        Args:
            m: Modulus parameter
            pairs: (label, parameters, parameters) triples
            tolerance: Agreement threshold

        Returns:
            One report per pair
        """
        reports = []
        for label, first, second in pairs:
            spec_a = GALSpec(a=first[0], b=first[1], f=first[2], g=first[3], m=m)
            spec_b = GALSpec(a=second[0], b=second[1], f=second[2], g=second[3], m=m)
            e_min, e_max = self._window_for(spec_a, None, None)
            edges_a = self.oracle.band_edges_numeric(spec_a, e_min, e_max)
            edges_b = self.oracle.band_edges_numeric(spec_b, e_min, e_max)
            report = self.compare_edge_sets(spec_a.bracket, edges_a, spec_b.bracket, edges_b, tolerance, note=label)
            self.logger.info(f"conjecture {label} at m={m}: {spec_a.bracket} vs {spec_b.bracket} "
                             f"{'agree' if report.agree else 'differ'} ({report.max_discrepancy:.3e})")
            reports.append(report)
        return reports

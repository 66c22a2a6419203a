"""
Spectral Oracle Module
Floquet monodromy traces, discriminant curves, band edges and band/gap
classification for GAL specs and for arbitrary periodic potentials
"""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from config import Config
from schema import BandStructure, DiscriminantSample, GALSpec
from modules.gal import potential_callable
from utils.exceptions import IntegrationError
from utils.logger import log_execution_time, setup_logger

Potential = Callable[[float], complex]


def default_energy_window(spec: GALSpec) -> Tuple[float, float]:
    """Energy window that contains every band edge of the QES part of the spectrum"""
    total = sum(abs(c) for c in spec.coefficients)
    return (-(1.0 + spec.m) * total - 2.0, 2.0)


class FloquetOracle:
    """Independent numerical band-structure oracle built on the one-period monodromy matrix"""

    def __init__(self, rtol: Optional[float] = None, atol: Optional[float] = None,
                 edge_tol: Optional[float] = None):
        self.config = Config()
        self.logger = setup_logger('floquet_oracle')
        self.rtol = rtol or self.config.ODE_RTOL
        self.atol = atol or self.config.ODE_ATOL
        self.edge_tol = edge_tol or self.config.EDGE_TOL

    def traces(self, potential: Potential, energies, period: float, x0: float = 0.0) -> np.ndarray:
        """
        Discriminant psi_1(L) + psi_2'(L) for many energies in one integration

        Args:
            potential: Scalar x -> V(x)
            energies: Real trial energies
            period: L
            x0: Start of the period

        Returns:
            Complex array of discriminant values
        """
        energies = np.atleast_1d(np.asarray(energies, dtype=float))
        if energies.size == 0:
            return np.empty(0, dtype=complex)

        def rhs(x, state):
            Y = state.reshape(-1, 4)
            shift = potential(x) - energies
            out = np.empty_like(Y)
            out[:, 0] = Y[:, 1]
            out[:, 1] = shift * Y[:, 0]
            out[:, 2] = Y[:, 3]
            out[:, 3] = shift * Y[:, 2]
            return out.ravel()

        initial = np.tile(np.array([1.0, 0.0, 0.0, 1.0], dtype=complex), energies.size)
        sol = solve_ivp(rhs, (x0, x0 + period), initial, method=self.config.ODE_METHOD,
                        rtol=self.rtol, atol=self.atol)
        if sol.status != 0:
            location = float(sol.t[-1])
            self.logger.error(f"Integration failed at x={location}: {sol.message}")
            raise IntegrationError(f"integrator stopped at x={location}: {sol.message}", location=location)
        final = sol.y[:, -1].reshape(-1, 4)
        return final[:, 0] + final[:, 3]

    def discriminant(self, spec: GALSpec, E: float, x0: float = 0.0) -> DiscriminantSample:
        """
        Floquet discriminant of a GAL spec at one energy

        Args:
            spec: GAL potential
            E: Real trial energy
            x0: Start of the period

        Returns:
            DiscriminantSample
        """
        delta = self.traces(potential_callable(spec), [E], spec.period, x0)[0]
        return DiscriminantSample(E=float(E), delta=complex(delta))

    def discriminant_curve(self, spec: GALSpec, energies) -> List[DiscriminantSample]:
        values = self.traces(potential_callable(spec), energies, spec.period)
        return [DiscriminantSample(E=float(E), delta=complex(d)) for E, d in zip(np.atleast_1d(energies), values)]

    def _scan_count(self, e_min: float, e_max: float, scan_points: Optional[int]) -> int:
        if scan_points is not None:
            return max(int(scan_points), self.config.SCAN_POINTS_MIN)
        count = int(np.ceil(self.config.SCAN_POINTS_PER_UNIT * (e_max - e_min)))
        return int(np.clip(count, self.config.SCAN_POINTS_MIN, self.config.SCAN_POINTS_CAP))

    def _refine_roots(self, potential: Potential, period: float, brackets: Sequence[Tuple[float, float, float]]):
        """Vectorized multisection of Re(delta) - target on every bracket (lo, hi, target)"""
        if not brackets:
            return []
        lo = np.array([b[0] for b in brackets])
        hi = np.array([b[1] for b in brackets])
        target = np.array([b[2] for b in brackets])
        f_lo = self.traces(potential, lo, period).real - target
        f_hi = self.traces(potential, hi, period).real - target
        fractions = np.linspace(0.0, 1.0, self.config.REFINE_POINTS + 2)[1:-1]

        for _ in range(40):
            if np.max(hi - lo) <= self.edge_tol:
                break
            interior = lo[:, None] + (hi - lo)[:, None] * fractions[None, :]
            values = self.traces(potential, interior.ravel(), period).real.reshape(interior.shape) - target[:, None]
            points = np.column_stack([lo, interior, hi])
            samples = np.column_stack([f_lo, values, f_hi])
            for i in range(len(lo)):
                crossing = np.flatnonzero(np.sign(samples[i, :-1]) != np.sign(samples[i, 1:]))
                j = int(crossing[0]) if crossing.size else int(np.argmin(np.abs(samples[i])))
                j = min(j, points.shape[1] - 2)
                lo[i], hi[i] = points[i, j], points[i, j + 1]
                f_lo[i], f_hi[i] = samples[i, j], samples[i, j + 1]
        return list(0.5 * (lo + hi))

    def _refine_tangencies(self, potential: Potential, period: float,
                           windows: Sequence[Tuple[float, float]]) -> List[float]:
        """Locate maxima of |Re delta| inside each window and keep those touching +-2"""
        if not windows:
            return []
        lo = np.array([w[0] for w in windows])
        hi = np.array([w[1] for w in windows])
        fractions = np.linspace(0.0, 1.0, self.config.REFINE_POINTS + 2)
        best = 0.5 * (lo + hi)
        peak = np.zeros(len(lo))
        for _ in range(10):
            grid = lo[:, None] + (hi - lo)[:, None] * fractions[None, :]
            values = np.abs(self.traces(potential, grid.ravel(), period).real).reshape(grid.shape)
            for i in range(len(lo)):
                j = int(np.argmax(values[i]))
                best[i], peak[i] = grid[i, j], values[i, j]
                left, right = max(j - 1, 0), min(j + 1, grid.shape[1] - 1)
                lo[i], hi[i] = grid[i, left], grid[i, right]
        return [float(E) for E, value in zip(best, peak) if abs(value - 2.0) < self.config.TANGENCY_TOL]

    def _merge(self, energies: Sequence[float]) -> List[float]:
        merged: List[float] = []
        for E in sorted(energies):
            if merged and E - merged[-1] < self.config.EDGE_MERGE_TOL:
                merged[-1] = 0.5 * (merged[-1] + E)
            else:
                merged.append(float(E))
        return merged

    @log_execution_time
    def scan(self, potential: Potential, period: float, e_min: float, e_max: float,
             scan_points: Optional[int] = None):
        """
        Band edges of an arbitrary periodic potential

        Args:
            potential: Scalar x -> V(x)
            period: L
            e_min, e_max: Energy window
            scan_points: Uniform scan size (default scales with the window)

        Returns:
            Tuple (edges, tangencies, broken_pt)
        """
        count = self._scan_count(e_min, e_max, scan_points)
        energies = np.linspace(e_min, e_max, count)
        delta = self.traces(potential, energies, period)
        imaginary = float(np.max(np.abs(delta.imag)))
        broken = imaginary > self.config.TOL_DISC
        if broken:
            self.logger.warning(f"max |Im delta| = {imaginary:.3e}: PT symmetry broken, classifying on Re delta")
        real = delta.real

        brackets = []
        exact = []
        for target in (2.0, -2.0):
            shifted = real - target
            zero = np.flatnonzero(shifted == 0.0)
            exact.extend(energies[zero])
            crossing = np.flatnonzero(shifted[:-1] * shifted[1:] < 0.0)
            brackets.extend((energies[k], energies[k + 1], target) for k in crossing)

        step = energies[1] - energies[0]
        near_bracket = np.zeros(count, dtype=bool)
        for lo, _, _ in brackets:
            k = int(round((lo - e_min) / step))
            near_bracket[max(k - 2, 0):k + 4] = True

        magnitude = np.abs(real)
        windows = []
        for k in range(1, count - 1):
            if near_bracket[k]:
                continue
            if magnitude[k] >= magnitude[k - 1] and magnitude[k] >= magnitude[k + 1] and 0.0 <= 2.0 - magnitude[k] < 1e-3:
                windows.append((energies[k - 1], energies[k + 1]))

        edges = self._refine_roots(potential, period, brackets) + exact
        tangencies = self._merge(self._refine_tangencies(potential, period, windows))
        edges = self._merge(list(edges) + tangencies)
        self.logger.debug(f"scan [{e_min}, {e_max}] with {count} points: {len(edges)} edges, {len(tangencies)} tangencies")
        return edges, tangencies, broken

    def band_edges_numeric(self, spec: GALSpec, e_min: float, e_max: float,
                           scan_points: Optional[int] = None) -> List[float]:
        """
        Band edges of a GAL spec in [e_min, e_max]

        Args:
            spec: GAL potential
            e_min, e_max: Energy window
            scan_points: Uniform scan size

        Returns:
            Sorted edge energies (empty when none)
        """
        edges, _, _ = self.scan(potential_callable(spec), spec.period, e_min, e_max, scan_points)
        return edges

    def classify_potential(self, potential: Potential, period: float, e_min: float, e_max: float,
                           scan_points: Optional[int] = None) -> BandStructure:
        """
        Bands and gaps of an arbitrary periodic potential

        Args:
            potential: Scalar x -> V(x)
            period: L
            e_min, e_max: Energy window
            scan_points: Uniform scan size

        Returns:
            BandStructure tiling [e_min, e_max]
        """
        if not e_min < e_max:
            raise ValueError(f"empty energy window [{e_min}, {e_max}]")
        edges, tangencies, broken = self.scan(potential, period, e_min, e_max, scan_points)
        cuts = [e_min] + [E for E in edges if e_min < E < e_max] + [e_max]
        intervals = [(lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi - lo > self.config.EDGE_MERGE_TOL]
        midpoints = [0.5 * (lo + hi) for lo, hi in intervals]
        delta = self.traces(potential, midpoints, period).real

        bands, gaps = [], []
        gap_count = 0
        edge_set = set(edges)
        for (lo, hi), value in zip(intervals, delta):
            if abs(value) <= 2.0:
                bands.append((lo, hi))
            else:
                gaps.append((lo, hi))
                if lo in edge_set and hi in edge_set:
                    gap_count += 1
        return BandStructure(e_min=e_min, e_max=e_max, edges=edges, tangencies=tangencies,
                             bands=bands, gaps=gaps, gap_count=gap_count, broken_pt=broken)

    def classify_bands(self, spec: GALSpec, e_min: float, e_max: float,
                       scan_points: Optional[int] = None) -> BandStructure:
        """BandStructure of a GAL spec; gap_count counts open gaps between two edges"""
        structure = self.classify_potential(potential_callable(spec), spec.period, e_min, e_max, scan_points)
        self.logger.info(f"{spec.bracket} m={spec.m}: {len(structure.edges)} edges, {structure.gap_count} gaps")
        return structure

    def edge_residuals(self, spec: GALSpec, energies) -> np.ndarray:
        """||delta(E)| - 2| for candidate edge energies"""
        delta = self.traces(potential_callable(spec), np.real(energies), spec.period)
        return np.abs(np.abs(delta.real) - 2.0)

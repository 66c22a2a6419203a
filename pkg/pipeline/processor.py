"""
Verification Pipeline
Runs the acceptance criteria as independent checks and collects one result row per criterion
"""

import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from config import Config
from schema import CriterionResult, GALSpec, QESState
from modules.catalog import (
    QESCatalog,
    closed_form_edges,
    energies_of,
    delta_branch_residuals,
    interchange_discrepancy,
    lame_a4_closed_energies,
    lame_a4_edges,
    midband_reflection,
    midband_spec,
    midband_states,
    qes_spectrum,
    table_family_specs,
)
from modules.elliptic import complete_K, complete_K_prime, duality_residuals, jacobi_values
from modules.gal import eval_potential, real_associated_lame, potential_callable, transform_spec
from modules.heun import gal_to_heun, heun_residual
from modules.spectral import FloquetOracle
from modules.states import schrodinger_residual
from modules.susy import CONJECTURE_PAIRS, SusyPartnerBuilder
from utils.exceptions import ConfigurationError
from utils.logger import log_execution_time, log_memory_usage, setup_logger

CRITERIA: Dict[int, str] = {
    1: "elliptic identities",
    2: "Lame a=1 band edges",
    3: "Lame a=2 edges are discriminant roots",
    4: "table residual sweep",
    5: "collocation reproduces tables",
    6: "modulus duality of QES spectra",
    7: "discriminant identities",
    8: "SUSY partners",
    9: "finite-gap counts",
    10: "conjecture suite",
    11: "mid-band states",
    12: "Heun mapping",
}

SEED = 20240611


def parse_suite(suite: str) -> List[int]:
    """'all' or a comma list such as '1,2,11'"""
    if suite.strip().lower() == "all":
        return sorted(CRITERIA)
    try:
        ids = sorted({int(token) for token in suite.split(",") if token.strip()})
    except ValueError:
        raise ConfigurationError(f"suite {suite!r} is not 'all' or a comma list of integers", field="suite")
    unknown = [i for i in ids if i not in CRITERIA]
    if unknown:
        raise ConfigurationError(f"unknown criteria {unknown}; expected ids in 1..{len(CRITERIA)}", field="suite")
    return ids


def find_state(states: Sequence[QESState], exponents: Tuple[int, int, int],
               poly: Optional[Sequence[complex]] = None) -> QESState:
    """State whose total factor exponents (prefactor plus integer factors) match"""
    for state in states:
        total = tuple(round(p + q) for p, q in zip(state.prefactor_exponents, state.primary_factor))
        if total == tuple(exponents) and (poly is None or np.allclose(state.poly_A, poly)):
            return state
    raise LookupError(f"no state with exponents {exponents}")


class VerificationProcessor:
    """Processor that runs the verification criteria and assembles the result table"""

    def __init__(self, m: float = 0.5, residual_tol: float = 1e-8):
        self.config = Config()
        self.logger = setup_logger('verification_processor')
        self.m = m
        self.residual_tol = residual_tol
        self.oracle = FloquetOracle()
        self.catalog = QESCatalog()
        self.susy = SusyPartnerBuilder(self.oracle)
        self.checks: Dict[int, Callable[[], CriterionResult]] = {
            1: self.check_elliptic_identities,
            2: self.check_lame_a1_edges,
            3: self.check_lame_a2_discriminant,
            4: self.check_residual_sweep,
            5: self.check_collocation,
            6: self.check_duality,
            7: self.check_discriminant_identities,
            8: self.check_susy,
            9: self.check_gap_counts,
            10: self.check_conjectures,
            11: self.check_midband,
            12: self.check_heun,
        }
        self.logger.info("Verification processor initialized successfully")

    def _result(self, criterion: int, metric: float, threshold: float, detail: str = "",
                passed: Optional[bool] = None) -> CriterionResult:
        ok = bool(metric < threshold) if passed is None else passed
        return CriterionResult(id=criterion, name=CRITERIA[criterion], passed=ok,
                               metric=float(metric), threshold=threshold, detail=detail)

    @log_execution_time
    def check_elliptic_identities(self) -> CriterionResult:
        """sn^2+cn^2-1, dn^2+m sn^2-1 and the duality identities at random complex points"""
        rng = np.random.default_rng(SEED)
        worst = 0.0
        for m in np.round(np.arange(0.1, 1.0, 0.1), 10):
            K, Kp = complete_K(m), complete_K_prime(m)
            z = rng.uniform(-2 * K, 2 * K, 1000) + 1j * rng.uniform(-0.6 * Kp, 0.6 * Kp, 1000)
            sn, cn, dn = jacobi_values(z, m)
            residuals = [np.abs(sn**2 + cn**2 - 1.0), np.abs(dn**2 + m * sn**2 - 1.0)]
            residuals.extend(duality_residuals(z, m))
            worst = max(worst, max(float(np.max(r)) for r in residuals))
        return self._result(1, worst, 1e-12, "1000 points per m in 0.1..0.9")

    @log_execution_time
    def check_lame_a1_edges(self) -> CriterionResult:
        spec = GALSpec(a=1.0, m=0.5)
        edges = self.oracle.band_edges_numeric(spec, -3.0, 1.0)
        expected = [-1.5, -1.0, -0.5]
        if len(edges) != len(expected):
            return self._result(2, float("inf"), 1e-8, f"found {len(edges)} edges: {edges}")
        metric = float(np.max(np.abs(np.asarray(edges) - expected)))
        return self._result(2, metric, 1e-8, f"edges {edges}")

    @log_execution_time
    def check_lame_a2_discriminant(self) -> CriterionResult:
        spec = GALSpec(a=2.0, m=0.5)
        delta = np.sqrt(0.75)
        energies = [-3.0 - 2 * delta, -4.5, -3.0, -1.5, -3.0 + 2 * delta]
        metric = float(np.max(self.oracle.edge_residuals(spec, energies)))
        return self._result(3, metric, 1e-6, "five closed-form edges of [6,0,0,0]")

    def _sweep(self, a_values=range(1, 6), moduli=(0.3, 0.7)):
        for m in moduli:
            for spec in table_family_specs(a_values, m):
                yield spec, closed_form_edges(spec)

    @log_execution_time
    def check_residual_sweep(self) -> CriterionResult:
        worst, count, label = 0.0, 0, ""
        for spec, states in self._sweep():
            for state in states:
                residual = schrodinger_residual(state, spec)
                count += 1
                if residual > worst:
                    worst, label = residual, f"{spec.bracket} m={spec.m} {state.provenance}"
        return self._result(4, worst, self.residual_tol, f"{count} states; worst {label}")

    @staticmethod
    def multiset_discrepancy(first: Sequence[complex], second: Sequence[complex]) -> float:
        """Max gap between two energy lists sorted by (real, imag); inf when the counts differ"""
        if len(first) != len(second):
            return float("inf")
        key = lambda z: (round(z.real, 8), round(z.imag, 8))
        first = np.array(sorted(np.asarray(first, dtype=complex), key=key))
        second = np.array(sorted(np.asarray(second, dtype=complex), key=key))
        return float(np.max(np.abs(first - second))) if first.size else 0.0

    @staticmethod
    def assignment_discrepancy(tabulated: Sequence[complex], collocated: Sequence[complex]) -> float:
        """
        Worst gap of a one-to-one matching of every tabulated energy to a distinct collocated one

        Returns:
            inf when there are more tabulated than collocated energies
        """
        tabulated = np.asarray(tabulated, dtype=complex)
        collocated = np.asarray(collocated, dtype=complex)
        if tabulated.size > collocated.size:
            return float("inf")
        if tabulated.size == 0:
            return 0.0
        cost = np.abs(tabulated[:, None] - collocated[None, :])
        rows, columns = linear_sum_assignment(cost)
        return float(np.max(cost[rows, columns]))

    @log_execution_time
    def check_collocation(self) -> CriterionResult:
        worst, count, extra, short = 0.0, 0, 0, []
        for spec, states in self._sweep():
            collocated = energies_of(qes_spectrum(spec))
            tabulated = energies_of(states)
            count += tabulated.size
            extra += collocated.size - tabulated.size
            discrepancy = self.assignment_discrepancy(tabulated, collocated)
            if not np.isfinite(discrepancy):
                short.append(f"{spec.bracket} m={spec.m}: {tabulated.size} tabulated, {collocated.size} collocated")
            worst = max(worst, discrepancy)
        detail = f"{count} closed-form energies matched one-to-one; {extra} collocated energies outside the tables"
        if short:
            detail += "; too few collocated " + ", ".join(short[:3])
        return self._result(5, worst, 1e-9, detail)

    def _duality_discrepancy(self, spec: GALSpec) -> float:
        dual = transform_spec(spec, "dual")
        original = energies_of(qes_spectrum(spec))
        mapped = dual.energy_map.apply(energies_of(qes_spectrum(dual.new_spec)))
        return self.multiset_discrepancy(original, mapped)

    @log_execution_time
    def check_duality(self) -> CriterionResult:
        rng = np.random.default_rng(SEED + 6)
        worst = 0.0
        for _ in range(20):
            m = float(rng.uniform(0.1, 0.9))
            a = int(rng.integers(1, 5))
            b = int(rng.integers(0, 3))
            g = int(rng.integers(0, 3))
            for spec in (GALSpec(a=a, m=m), GALSpec(a=a, g=g, m=m), GALSpec(a=a, b=b, g=g, m=m)):
                worst = max(worst, self._duality_discrepancy(spec))
        symmetry = self.interchange_symmetry(self.m)
        detail = (f"20 draws each of Lame, b=f=0 and f=0 families; "
                  f"a<->g, a<->f and delta5..delta8 symmetries {symmetry:.2e}")
        return self._result(6, max(worst, symmetry), 1e-9, detail)

    @staticmethod
    def interchange_symmetry(m: float) -> float:
        """Worst violation of the lame-g/lame-f interchange and radical symmetries over n <= 4, a in 0..n"""
        worst = 0.0
        for family in ("lame-g", "lame-f"):
            for n in range(5):
                for a in range(n + 1):
                    worst = max((worst,) + interchange_discrepancy(family, n, float(a), m))
        for a in (0.3, 1.0, 2.5, 4.0):
            worst = max([worst] + list(delta_branch_residuals(a, m).values()))
        return worst

    def _pt_vs_real(self, spec: GALSpec, energies: np.ndarray) -> float:
        A, _, _, G = spec.coefficients
        pt = self.oracle.traces(potential_callable(spec), energies, spec.period)
        real = self.oracle.traces(real_associated_lame(A, G, 1.0 - spec.m), energies + A + G, spec.period)
        return float(np.max(np.abs(pt - real) / np.maximum(1.0, np.abs(real))))

    @log_execution_time
    def check_discriminant_identities(self) -> CriterionResult:
        lame = self._pt_vs_real(GALSpec(a=2.0, m=0.4), np.linspace(-5.0, 2.0, 50))
        associated = self._pt_vs_real(GALSpec(a=2.0, g=1.0, m=0.4), np.linspace(-7.0, 2.0, 50))
        return self._result(7, max(lame, associated), 1e-6,
                            f"Lame {lame:.2e}, associated {associated:.2e} (relative)")

    @log_execution_time
    def check_susy(self) -> CriterionResult:
        m = self.m
        spec = GALSpec(a=3.0, m=m)
        state = find_state(closed_form_edges(spec), (1, 1, 1))
        profile = self.susy.partner_profile(state, spec)
        reference = eval_potential(GALSpec(a=2.0, b=1.0, f=1.0, g=1.0, m=m), np.asarray(profile.grid))
        deviation = self.susy.mean_offset_deviation(profile, reference)
        identified = self.susy.identify_gal(profile)
        bracket = identified[0].bracket if identified else "none"

        lame = GALSpec(a=2.0, m=m)
        states = closed_form_edges(lame)
        energies = energies_of(states).real
        e_min, e_max = energies.min() - 0.5, energies.max() + 0.5
        reference_edges = self.oracle.band_edges_numeric(lame, e_min, e_max)
        discrepancies = [
            self.susy.isospectrality_report(lame, s, e_min, e_max, reference_edges=reference_edges).max_discrepancy
            for s in states
        ]
        isospectral = max(discrepancies)
        passed = deviation < 1e-9 and bracket == "[6,2,2,2]" and isospectral < 1e-6
        detail = (f"[12,0,0,0] partner deviation {deviation:.2e}, identified {bracket}, "
                  f"{len(states)} partners of [6,0,0,0] max edge discrepancy {isospectral:.2e}")
        return self._result(8, max(deviation, isospectral), 1e-6, detail, passed=passed)

    @log_execution_time
    def check_gap_counts(self) -> CriterionResult:
        first = self.oracle.classify_bands(GALSpec(a=2.0, b=1.0, m=0.5), -10.0, -1.0)
        second = self.oracle.classify_bands(GALSpec(a=3.0, g=1.0, m=0.5), -12.0, 2.0)
        passed = first.gap_count == 2 and len(first.edges) == 5 and second.gap_count == 3
        detail = (f"[6,2,0,0]: {first.gap_count} gaps, {len(first.edges)} edges; "
                  f"[12,0,0,2]: {second.gap_count} gaps, {len(second.edges)} edges")
        return self._result(9, float(not passed), 0.5, detail, passed=passed)

    def resolve_a4_sign(self, m: float) -> str:
        """Which sign of the leading term of the third a=4 family lies on the discriminant"""
        centre = 5.0 * (1.0 + 2.0 * m)
        root = 2.0 * np.sqrt(9 * m**2 - 9 * m + 4)
        spec = GALSpec(a=4.0, m=m)
        negative = np.max(self.oracle.edge_residuals(spec, [-centre - root, -centre + root]))
        positive = np.max(self.oracle.edge_residuals(spec, [centre - root, centre + root]))
        sign = "-" if negative < positive else "+"
        self.logger.info(f"third a=4 family at m={m}: leading sign '{sign}' "
                         f"(residuals - {negative:.2e}, + {positive:.2e})")
        return sign

    def a4_edge_discrepancy(self, m: float, margin: float = 1.0) -> float:
        """Largest gap between the nine [20,0,0,0] edges from closed forms and from the Floquet oracle"""
        closed = np.sort(energies_of(lame_a4_edges(m)).real)
        numeric = self.oracle.band_edges_numeric(GALSpec(a=4.0, m=m), closed[0] - margin, closed[-1] + margin)
        if len(numeric) != closed.size:
            self.logger.warning(f"[20,0,0,0] at m={m}: {closed.size} closed-form edges, {len(numeric)} numeric")
            return float("inf")
        return float(np.max(np.abs(closed - numeric)))

    @log_execution_time
    def check_conjectures(self) -> CriterionResult:
        worst, notes = 0.0, []
        for m in (0.3, 0.7):
            reports = self.susy.conjecture_report(m, pairs=self.susy_pairs())
            worst = max([worst] + [r.max_discrepancy for r in reports])
            a4 = self.a4_edge_discrepancy(m)
            worst = max(worst, a4)
            notes.append(f"m={m}: sign {self.resolve_a4_sign(m)}, a=4 closed vs numeric {a4:.2e}")
        closed_forms = lame_a4_closed_energies(0.5)
        notes.append(f"sn*cn pair at m=0.5: {closed_forms['sn*cn']}")
        return self._result(10, worst, 1e-6, "; ".join(notes))

    @staticmethod
    def susy_pairs():
        """The two Lame 2a(2a+1) pairings; the other pairs go through conjecture_report directly"""
        return CONJECTURE_PAIRS[:2]

    @log_execution_time
    def check_midband(self) -> CriterionResult:
        t, m = 1.3, self.m
        worst_residual, worst_parity, worst_delta = 0.0, 0.0, 0.0
        for N in (0, 1):
            for split in range(N + 1):
                spec = midband_spec("b_half", t, N, split, 0.5, m)
                states = midband_states("b_half", t, N, split, 0.5, m)
                mirrored = midband_states("b_half", -t, N, split, 0.5, m)
                for state in states:
                    worst_residual = max(worst_residual, schrodinger_residual(state, spec))
                worst_parity = max(worst_parity, float(np.max(np.abs(energies_of(states) - energies_of(mirrored)))))
                delta = self.oracle.discriminant(spec, states[0].energy.real).delta
                worst_delta = max(worst_delta, abs(delta) - 2.0)
        reflection = max(midband_reflection(level, m) for level in (0.5, 1.5))
        passed = (worst_residual < self.residual_tol and worst_parity < 1e-12 and worst_delta <= 1e-6
                  and reflection < 1e-12)
        detail = (f"residual {worst_residual:.2e}, t-parity {worst_parity:.2e}, max |delta|-2 {worst_delta:.2e}, "
                  f"half-integral Lame reflection {reflection:.2e}")
        return self._result(11, worst_residual, self.residual_tol, detail, passed=passed)

    @log_execution_time
    def check_heun(self) -> CriterionResult:
        worst_constraint, worst_residual, count = 0.0, 0.0, 0
        for spec, states in self._sweep(a_values=range(1, 4)):
            for state in states:
                hp = gal_to_heun(spec, state.energy)
                worst_constraint = max(worst_constraint, hp.constraint_residual)
                worst_residual = max(worst_residual, heun_residual(hp, state, spec))
                count += 1
        passed = worst_constraint < 1e-14 and worst_residual < self.residual_tol
        detail = f"{count} states; constraint {worst_constraint:.2e}, residual {worst_residual:.2e}"
        return self._result(12, worst_residual, self.residual_tol, detail, passed=passed)

    def run_criterion(self, criterion: int) -> CriterionResult:
        """
        Run one criterion, converting any exception into a failed row

        Args:
            criterion: Criterion id

        Returns:
            CriterionResult with elapsed time
        """
        start_time = time.time()
        try:
            result = self.checks[criterion]()
        except Exception as e:
            self.logger.error(f"Criterion {criterion} ({CRITERIA[criterion]}) failed: {str(e)}")
            result = CriterionResult(id=criterion, name=CRITERIA[criterion], passed=False,
                                     detail=f"ERROR: {str(e)}")
        return result.model_copy(update={"elapsed": time.time() - start_time})

    def run_suite(self, criteria: Sequence[int]) -> List[CriterionResult]:
        """
        Run criteria in parallel

        Args:
            criteria: Criterion ids

        Returns:
            Results in criterion order
        """
        results: List[CriterionResult] = []
        self.logger.info(f"Starting verification of {len(criteria)} criteria")
        log_memory_usage("verification start")
        start_time = time.time()

        with ThreadPoolExecutor(max_workers=self.config.MAX_WORKERS) as executor:
            future_to_id = {executor.submit(self.run_criterion, c): c for c in criteria}
            for future in as_completed(future_to_id):
                criterion = future_to_id[future]
                try:
                    results.append(future.result(timeout=self.config.TASK_TIMEOUT))
                except Exception as e:
                    self.logger.error(f"Task failed for criterion {criterion}: {str(e)}")
                    results.append(CriterionResult(id=criterion, name=CRITERIA[criterion], passed=False,
                                                   detail=f"ERROR: {str(e)}"))

        total_time = time.time() - start_time
        log_memory_usage("verification end")
        if total_time > self.config.TARGET_SUITE_TIME * self.config.WARNING_THRESHOLD:
            self.logger.warning(f"Verification took {total_time:.1f}s (target {self.config.TARGET_SUITE_TIME}s)")
        self.logger.info(f"Verification completed in {total_time:.2f} seconds")
        return sorted(results, key=lambda r: r.id)

"""
QES Catalog Module
Exact band-edge and mid-band eigenstates of the PT-symmetric GAL potentials:
closed-form table families, the Lame a=4 edges, the collocation QES solver
and the full QES spectrum over every sector
"""

import itertools
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from config import Config
from schema import DeltaSet, GALSpec, QESState
from modules.gal import line_points, potential_at_y
from modules.states import (
    bloch_log_jet,
    elliptic_point,
    integer_monomial_jet,
    monomial_log_jet,
    period_class,
    polynomial_jet,
    multiply_jets,
)
from utils.exceptions import DomainError, IllConditionedError, UnsupportedFamilyError
from utils.logger import log_execution_time, setup_logger

logger = setup_logger('catalog')

SECTOR_FACTORS = ("sn", "cn", "dn")
MIDBAND_CASES = ("b_half", "f_half", "g_half")

# case -> (Bloch base, partner base, primary, companion of the odd ansatz, companion of the even ansatz)
_MIDBAND_LAYOUT = {
    "b_half": ("cn+i*sn", "cn-i*sn", (0, 1, 0), (1, 0, 0), (1, 1, 0)),
    "f_half": ("dn+i*sqrt(m)*sn", "dn-i*sqrt(m)*sn", (0, 0, 1), (1, 0, 0), (1, 0, 1)),
    "g_half": ("dn+sqrt(m)*cn", "dn-sqrt(m)*cn", (0, 1, 0), (0, 0, 1), (0, 1, 1)),
}


class TableRow(NamedTuple):
    """One row of a closed-form table: extra integer factors, energy and polynomial in sn^2"""
    label: str
    powers: Tuple[int, int, int]
    base_energy: float
    delta_index: Optional[int] = None
    poly: Optional[Callable[[complex], List[complex]]] = None


def _near_integer(value: float) -> bool:
    return abs(value - round(value)) < Config.PARAMETER_TOL


def _is_zero(value: float) -> bool:
    return abs(value) < Config.PARAMETER_TOL


def _sort_key(state: QESState):
    return (round(state.energy.real, 12), round(state.energy.imag, 12))


def dedupe_states(states: Iterable[QESState], tol: float = Config.ENERGY_DEDUP_TOL) -> List[QESState]:
    """Keep the first state of every energy cluster, sorted by real then imaginary part"""
    kept: List[QESState] = []
    for state in states:
        if all(abs(state.energy - other.energy) > tol for other in kept):
            kept.append(state)
    return sorted(kept, key=_sort_key)


def energies_of(states: Iterable[QESState]) -> np.ndarray:
    return np.array([state.energy for state in states], dtype=complex)


def delta_values(a: float, b: float, g: float, m: float) -> DeltaSet:
    """
    The eleven radicals of the closed-form tables

    Args:
        a, b, g: Realization parameters
        m: Modulus parameter

    Returns:
        DeltaSet with principal roots and the radicands they came from
    """
    radicands = {
        "delta1": (1 + m) ** 2 * (a - 1) ** 2 - (2 * a - 1) * (2 * a - 3) * m,
        "delta2": (a - 1 + m * (a - 2)) ** 2 - (2 * a - 1) * (2 * a - 5) * m,
        "delta3": (a - 2 + m * (a - 1)) ** 2 - (2 * a - 1) * (2 * a - 5) * m,
        "delta4": (1 + m) ** 2 * (a - 2) ** 2 - (2 * a - 1) * (2 * a - 7) * m,
        "delta5": (a - 1 + m) ** 2 - (2 * a - 1) * m,
        "delta6": (a - 1 + 2 * m) ** 2 - 3 * (2 * a - 1) * m,
        "delta7": (a - 2 + 2 * m) ** 2 - (2 * a - 1) * m,
        "delta8": (a - 2 + 3 * m) ** 2 - 3 * (2 * a - 1) * m,
        "delta9": ((1 + m) * (a - 1) + b) ** 2 - (2 * a - 1) * (2 * a + 2 * b - 3) * m,
        "delta10": (a + b - 1 + m * (a - 2)) ** 2 - (2 * a - 1) * (2 * a + 2 * b - 5) * m,
        "delta11": ((a + b - 1) + m * (1 - b - g)) ** 2 - (2 * a - 1) * (1 - 2 * g) * m,
    }
    radicands = {name: float(value) for name, value in radicands.items()}
    roots = {name: complex(np.emath.sqrt(value)) for name, value in radicands.items()}
    return DeltaSet(**roots, radicands=radicands)


def _lame_g_rows(n: int, a: float, m: float) -> List[TableRow]:
    if n == 0:
        return [TableRow("1", (0, 0, 0), -(1 + m) * a**2)]
    if n == 1:
        return [
            TableRow("cn", (0, 1, 0), -a**2 - m * (a - 1) ** 2),
            TableRow("dn", (0, 0, 1), -(a - 1) ** 2 - m * a**2),
        ]
    if n == 2:
        return [
            TableRow("cn*dn", (0, 1, 1), -(1 + m) * (a - 1) ** 2),
            TableRow("quad", (0, 0, 0), -(1 + m) * (a**2 - 2 * a + 2), 1,
                     lambda E: [2 * (2 * a - 3), E + (1 + m) * (a - 2) ** 2]),
        ]
    if n == 3:
        return [
            TableRow("cn*quad", (0, 1, 0), -(a**2 - 2 * a + 2) - (a**2 - 4 * a + 5) * m, 2,
                     lambda E: [2 * (2 * a - 5), E + (a - 2) ** 2 + m * (a - 3) ** 2]),
            TableRow("dn*quad", (0, 0, 1), -(a**2 - 4 * a + 5) - (a**2 - 2 * a + 2) * m, 3,
                     lambda E: [2 * (2 * a - 5), E + (a - 3) ** 2 + m * (a - 2) ** 2]),
        ]
    if n == 4:
        return [
            TableRow("cn*dn*quad", (0, 1, 1), -(1 + m) * (a**2 - 4 * a + 5), 4,
                     lambda E: [2 * (2 * a - 7), E + (1 + m) * (a - 3) ** 2]),
        ]
    return []


def _lame_f_rows(n: int, a: float, m: float) -> List[TableRow]:
    if n == 0:
        return [TableRow("1", (0, 0, 0), -a**2)]
    if n == 1:
        return [
            TableRow("sn", (1, 0, 0), -a**2 - m),
            TableRow("dn", (0, 0, 1), -(a - 1) ** 2 - m),
        ]
    if n == 2:
        return [
            TableRow("sn*dn", (1, 0, 1), -(a - 1) ** 2 - 4 * m),
            TableRow("quad", (0, 0, 0), -(a**2 + 2 - 2 * a + 2 * m), 5,
                     lambda E: [2.0, E + (a - 2) ** 2]),
        ]
    if n == 3:
        return [
            TableRow("sn*quad", (1, 0, 0), -(a**2 + 2 - 2 * a + 5 * m), 6,
                     lambda E: [6.0, E + (a - 2) ** 2 + m]),
            TableRow("dn*quad", (0, 0, 1), -(a**2 + 5 - 4 * a + 5 * m), 7,
                     lambda E: [2.0, E + (a - 3) ** 2 + m]),
        ]
    if n == 4:
        return [
            TableRow("sn*dn*quad", (1, 0, 1), -(a**2 + 5 - 4 * a + 10 * m), 8,
                     lambda E: [6.0, E + (a - 3) ** 2 + 4 * m]),
        ]
    return []


def _associated_rows(n: int, a: float, b: float, m: float) -> List[TableRow]:
    if n == 0:
        return [TableRow("1", (0, 0, 0), -(a + b) ** 2 - m * a**2)]
    if n == 1:
        return [TableRow("cn", (0, 1, 0), -(a + b) ** 2 - m * (a - 1) ** 2)]
    if n == 2:
        return [
            TableRow("quad", (0, 0, 0), -(1 + m) - (a + b - 1) ** 2 - m * (a - 1) ** 2, 9,
                     lambda E: [2 * (2 * a + 2 * b - 3), E + (a + b - 2) ** 2 + m * (a - 2) ** 2]),
        ]
    if n == 3:
        return [
            TableRow("cn*quad", (0, 1, 0), -(1 + m) - (a + b - 1) ** 2 - m * (a - 2) ** 2, 10,
                     lambda E: [2 * (2 * a + 2 * b - 5), E + (a + b - 2) ** 2 + m * (a - 3) ** 2]),
        ]
    return []


def _paired_sum_rows(n: int, a: float, b: float, g: float, m: float) -> List[TableRow]:
    if n == 0:
        return [TableRow("1", (0, 0, 0), -(a + b) ** 2 - m * (g + b) ** 2)]
    if n == 1:
        return [
            TableRow("quad", (0, 0, 0), -(a + b - 1) ** 2 - m * (b + g - 1) ** 2 - (1 + m), 11,
                     lambda E: [-2 * (2 * g - 1), E + (a + b - 2) ** 2 + m * (b + g) ** 2]),
        ]
    return []


def _matching_tables(a: float, b: float, f: float, g: float, m: float):
    """Yield (family, n, rows) for every closed-form family the realization belongs to"""
    if _is_zero(b) and _is_zero(f) and _near_integer(a + g) and 0 <= round(a + g) <= 4:
        n = int(round(a + g))
        yield "lame-g", n, _lame_g_rows(n, a, m)
    if _is_zero(b) and _is_zero(g) and _near_integer(a + f) and 0 <= round(a + f) <= 4:
        n = int(round(a + f))
        yield "lame-f", n, _lame_f_rows(n, a, m)
    if _is_zero(f) and _near_integer(a + b + g) and 0 <= round(a + b + g) <= 3:
        n = int(round(a + b + g))
        yield "associated", n, _associated_rows(n, a, b, m)
    total = a + b + f + g
    if _near_integer(total / 2.0) and round(total / 2.0) in (0, 1):
        n = int(round(total / 2.0))
        yield "paired-sum", n, _paired_sum_rows(n, a, b, g, m)


def realizations(spec: GALSpec) -> List[Tuple[float, float, float, float]]:
    """All parameter tuples (a', b', f', g') with p' in {p, -p-1} giving the same coefficients"""
    choices = [sorted({p, -p - 1.0}, reverse=True) for p in spec.parameters]
    seen = []
    for combo in itertools.product(*choices):
        if all(max(abs(x - y) for x, y in zip(combo, other)) > Config.PARAMETER_TOL for other in seen):
            seen.append(combo)
    return seen


def _reflected_factors(spec: GALSpec, realization: Sequence[float]) -> Tuple[str, ...]:
    _, b, f, g = spec.parameters
    _, rb, rf, rg = realization
    flipped = []
    for name, literal, value in (("sn", g, rg), ("cn", f, rf), ("dn", b, rb)):
        if abs(literal - value) > Config.PARAMETER_TOL:
            flipped.append(name)
    return tuple(flipped)


def _prefactor_exponents(realization: Sequence[float]) -> Tuple[float, float, float]:
    _, b, f, g = realization
    return (-g, -f, -b)


def _branch_energies(row: TableRow, deltas: DeltaSet) -> List[Tuple[complex, str, bool]]:
    if row.delta_index is None:
        return [(complex(row.base_energy), "", False)]
    delta = deltas[row.delta_index]
    broken = deltas.radicands[f"delta{row.delta_index}"] < 0.0
    return [
        (complex(row.base_energy) - 2.0 * delta, "-", broken),
        (complex(row.base_energy) + 2.0 * delta, "+", broken),
    ]


def _table_states(spec: GALSpec, realization: Sequence[float]) -> List[QESState]:
    a, b, f, g = realization
    deltas = delta_values(a, b, g, spec.m)
    prefactor = _prefactor_exponents(realization)
    states = []
    for family, n, rows in _matching_tables(a, b, f, g, spec.m):
        for row in rows:
            total = tuple(p + q for p, q in zip(prefactor, row.powers))
            for energy, branch, broken in _branch_energies(row, deltas):
                poly = row.poly(energy) if row.poly is not None else [1.0]
                states.append(QESState(
                    energy=energy,
                    prefactor_exponents=prefactor,
                    extra_factor=_reflected_factors(spec, realization),
                    primary_factor=row.powers,
                    poly_A=[complex(c) for c in poly],
                    period_class=period_class(total),
                    provenance=f"{family}:n={n}:{row.label}{branch}",
                    realization=tuple(float(p) for p in realization),
                    broken_pt=broken,
                ))
    return states


def closed_form_edges(spec: GALSpec) -> List[QESState]:
    """
    Band-edge states of every table family any realization of the parameters belongs to

    Args:
        spec: GAL potential

    Returns:
        States sorted by energy, one per distinct energy

    Raises:
        UnsupportedFamilyError: No realization fits a table family
    """
    states: List[QESState] = []
    for realization in realizations(spec):
        states.extend(_table_states(spec, realization))
    if not states:
        raise UnsupportedFamilyError(
            f"{spec.bracket} matches no closed-form table; use qes_spectrum_general or qes_spectrum"
        )
    result = dedupe_states(states)
    logger.debug(f"closed_form_edges {spec.bracket} m={spec.m}: {len(result)} states")
    return result


def _closure_order(realization: Sequence[float]) -> Optional[int]:
    half = sum(realization) / 2.0
    if _near_integer(half) and round(half) >= 0:
        return int(round(half))
    return None


def _sector_realizations(spec: GALSpec, sector: Iterable[str]):
    sector = set(sector)
    unknown = sector - set(SECTOR_FACTORS)
    if unknown:
        raise DomainError(f"unknown sector factors {sorted(unknown)}; expected a subset of {SECTOR_FACTORS}")
    a, b, f, g = spec.parameters
    rb = -b - 1.0 if "dn" in sector else b
    rf = -f - 1.0 if "cn" in sector else f
    rg = -g - 1.0 if "sn" in sector else g
    for ra in sorted({a, -a - 1.0}, reverse=True):
        realization = (ra, rb, rf, rg)
        n = _closure_order(realization)
        if n is not None:
            yield realization, n


def collocation_points(spec: GALSpec, count: int) -> np.ndarray:
    """count interior points of (0, K'(m)) mapped to the line y = ix + beta"""
    x = np.linspace(0.0, spec.complementary_quarter_period, count + 2)[1:-1]
    return line_points(spec, x)


def collocation_matrices(spec: GALSpec, realization: Sequence[float], n: int,
                         y: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Action of the Schrodinger operator on span{M sn^{2k}, k=0..n}, M = sn^-g' cn^-f' dn^-b'

    Rows are points, columns basis functions, both divided by M.

    Returns:
        (H, S) with H c = E S c for every eigenvector c
    """
    if y is None:
        y = collocation_points(spec, n + 1)
    p = elliptic_point(y, spec.m)
    first, second = monomial_log_jet(p, _prefactor_exponents(realization))
    V = potential_at_y(spec, p.y)
    H = np.empty((len(y), n + 1), dtype=complex)
    S = np.empty((len(y), n + 1), dtype=complex)
    for k in range(n + 1):
        coefficients = np.zeros(k + 1)
        coefficients[k] = 1.0
        jet = polynomial_jet(p, coefficients)
        S[:, k] = jet.value
        H[:, k] = (second + first * first + V) * jet.value + 2.0 * first * jet.first + jet.second
    return H, S


def _equilibrate(H: np.ndarray, S: np.ndarray):
    rows = np.max(np.abs(S), axis=1)
    H, S = H / rows[:, None], S / rows[:, None]
    columns = np.max(np.abs(S), axis=0)
    return H / columns[None, :], S / columns[None, :], columns


def _null_vector(matrix: np.ndarray) -> Tuple[np.ndarray, float]:
    _, singular, vh = np.linalg.svd(matrix)
    quality = float(singular[-1] / singular[0]) if singular[0] > 0 else 0.0
    return vh[-1].conj(), quality


def _normalized(vector: np.ndarray) -> List[complex]:
    vector = np.asarray(vector, dtype=complex)
    pivot = vector[int(np.argmax(np.abs(vector)))]
    return [complex(c) for c in vector / pivot]


def _broken(energy: complex) -> bool:
    return abs(energy.imag) > Config.TOL_DISC * max(1.0, abs(energy))


@log_execution_time
def qes_spectrum_general(spec: GALSpec, sector: Iterable[str] = (),
                         basis_size: Optional[int] = None) -> List[QESState]:
    """
    QES eigenstates of one sector by collocation

    The sector names the factors whose parameter is reflected p -> -p-1. The
    closure a'+b'+f'+g' = 2n fixes the polynomial degree n; basis_size selects
    between the two choices of a' when both close.

    Args:
        spec: GAL potential
        sector: Subset of {"sn", "cn", "dn"}
        basis_size: n + 1 (optional)

    Returns:
        n + 1 states with provenance "collocation"

    Raises:
        UnsupportedFamilyError: No closure for this sector
        IllConditionedError: Collocation matrix condition number above threshold
    """
    sector = tuple(sorted(set(sector)))
    chosen = None
    for realization, n in _sector_realizations(spec, sector):
        if basis_size is None or n + 1 == basis_size:
            chosen = (realization, n)
            break
    if chosen is None:
        raise UnsupportedFamilyError(
            f"{spec.bracket} has no QES closure in sector {sector or '()'}"
            + (f" with basis size {basis_size}" if basis_size else "")
        )
    realization, n = chosen

    H, S = collocation_matrices(spec, realization, n)
    H, S, columns = _equilibrate(H, S)
    condition = float(np.linalg.cond(S))
    if condition > Config.COLLOCATION_COND_MAX:
        raise IllConditionedError(
            f"collocation matrix for {spec.bracket} sector {sector} has condition {condition:.3e}; "
            f"choose different collocation points",
            condition_number=condition,
        )

    energies, vectors = linalg.eig(H, S)
    prefactor = _prefactor_exponents(realization)
    states = []
    for index in range(n + 1):
        energy = complex(energies[index])
        states.append(QESState(
            energy=energy,
            prefactor_exponents=prefactor,
            extra_factor=_reflected_factors(spec, realization),
            poly_A=_normalized(vectors[:, index] / columns),
            period_class=period_class(prefactor),
            provenance="collocation",
            realization=tuple(float(p) for p in realization),
            broken_pt=_broken(energy),
        ))
    return sorted(states, key=_sort_key)


def qes_spectrum(spec: GALSpec, max_order: int = Config.QES_MAX_ORDER) -> List[QESState]:
    """
    Union of the QES states of every sector and every closing choice of a'

    Args:
        spec: GAL potential
        max_order: Largest polynomial degree n attempted

    Returns:
        Distinct states sorted by energy (empty when nothing closes)
    """
    states: List[QESState] = []
    for size in range(len(SECTOR_FACTORS) + 1):
        for sector in itertools.combinations(SECTOR_FACTORS, size):
            for _, n in _sector_realizations(spec, sector):
                if n > max_order:
                    logger.debug(f"skipping sector {sector} of {spec.bracket}: order {n} > {max_order}")
                    continue
                states.extend(qes_spectrum_general(spec, sector, basis_size=n + 1))
    return dedupe_states(states)


def lame_a4_closed_energies(m: float) -> Dict[str, Tuple[float, float]]:
    """
    The six closed-form edges of [20,0,0,0], grouped by the factor pair of their sector

    Returns:
        Mapping sector -> (lower, upper)
    """
    families = {
        "sn*cn": (-5.0 * (m + 2.0), np.sqrt(4 * m**2 - 9 * m + 9)),
        "cn*dn": (-5.0 * (1.0 + m), np.sqrt(4 * m**2 + m + 4)),
        "sn*dn": (-5.0 * (1.0 + 2.0 * m), np.sqrt(9 * m**2 - 9 * m + 4)),
    }
    return {name: (centre - 2.0 * root, centre + 2.0 * root) for name, (centre, root) in families.items()}


def lame_a4_cubic(m: float) -> np.ndarray:
    """Coefficients of the characteristic cubic of the sector-free n=2 basis of [20,0,0,0]"""
    spec = GALSpec(a=4.0, m=m)
    H, S = collocation_matrices(spec, (4.0, 0.0, 0.0, 0.0), 2)
    return np.poly(np.linalg.solve(S, H))


@log_execution_time
def lame_a4_edges(m: float) -> List[QESState]:
    """
    Nine band edges of the PT-Lame potential [20,0,0,0]

    Args:
        m: Modulus parameter

    Returns:
        Six closed-form states and three roots of the cubic, sorted by energy
    """
    spec = GALSpec(a=4.0, m=m)
    closed = closed_form_edges(spec)
    if len(closed) != 6:
        logger.warning(f"expected six closed-form edges for [20,0,0,0], found {len(closed)}")

    realization = (4.0, 0.0, 0.0, 0.0)
    H, S = collocation_matrices(spec, realization, 2)
    roots = np.roots(np.poly(np.linalg.solve(S, H)))
    cubic = []
    for energy in roots:
        vector, quality = _null_vector(H - energy * S)
        cubic.append(QESState(
            energy=complex(energy),
            prefactor_exponents=(0.0, 0.0, 0.0),
            poly_A=_normalized(vector),
            period_class="2iK'",
            provenance="cubic",
            realization=realization,
            broken_pt=_broken(complex(energy)),
            fit_quality=quality,
        ))
    return dedupe_states(closed + cubic)


def lame_edges(a: int, m: float) -> List[QESState]:
    """The 2a+1 band edges of the PT-Lame potential a(a+1) for a = 1..4"""
    if a == 4:
        return lame_a4_edges(m)
    if a not in (1, 2, 3):
        raise UnsupportedFamilyError(f"closed-form Lame edges are available for a in 1..4, got {a}")
    return closed_form_edges(GALSpec(a=float(a), m=m))


def lame_energy_reflection(a: int, m: float) -> float:
    """
    max_j |E_j(m) + a(a+1) + E_{2a-j}(1-m)| over the sorted Lame edges

    Returns:
        Largest violation of the modulus-reflection relation
    """
    lower = np.sort(energies_of(lame_edges(a, m)).real)
    upper = np.sort(energies_of(lame_edges(a, 1.0 - m)).real)
    return float(np.max(np.abs(lower + a * (a + 1) + upper[::-1])))


def midband_reflection(level: float, m: float) -> float:
    """
    Half-integral analogue of lame_energy_reflection for the a + 1/2 mid-band levels

    The b_half family at t = 1/2, N = 0 is the K-translate of the PT-Lame
    potential with a = level, so E_j(m) = -a(a+1) - E_{a-1/2-j}(1-m).
    """
    a = level
    lower = np.sort(np.real(midband_energies("b_half", 0.5, 0, 0, level, m)))
    upper = np.sort(np.real(midband_energies("b_half", 0.5, 0, 0, level, 1.0 - m)))
    return float(np.max(np.abs(lower + a * (a + 1) + upper[::-1])))


# family -> (rows, parities of the (sn, cn, dn) row powers whose energy formula is its own image)
_INTERCHANGE_FAMILIES = {
    "lame-g": (_lame_g_rows, lambda powers: (powers[1] + powers[2]) % 2 == 0),
    "lame-f": (_lame_f_rows, lambda powers: (powers[0] + powers[2]) % 2 == 0),
}


def _row_energies(rows: Sequence[TableRow], deltas: DeltaSet) -> Dict[str, Tuple[complex, TableRow]]:
    return {f"{row.label}{branch}": (energy, row)
            for row in rows for energy, branch, _ in _branch_energies(row, deltas)}


def interchange_discrepancy(family: str, n: int, a: float, m: float) -> Tuple[float, float]:
    """
    Table energies at a against those at n - a, the a<->g (lame-g) or a<->f (lame-f) interchange

    The interchanged potential is a quarter-period translate of the original
    (iK' for lame-g, K+iK' for lame-f), so the energy lists agree as multisets.
    Rows of the 2iK' class (lame-g) or 2K+2iK' class (lame-f) keep their own energy.

    Args:
        family: lame-g or lame-f
        n: Closure order a + g (or a + f)
        a: First parameter
        m: Modulus parameter

    Returns:
        (largest change of a self-mapped row, largest gap between the sorted energy lists)
    """
    if family not in _INTERCHANGE_FAMILIES:
        raise DomainError(f"interchange is defined for {sorted(_INTERCHANGE_FAMILIES)}, got {family!r}")
    rows_of, self_mapped = _INTERCHANGE_FAMILIES[family]
    partner = n - a
    original = _row_energies(rows_of(n, a, m), delta_values(a, 0.0, 0.0, m))
    swapped = _row_energies(rows_of(n, partner, m), delta_values(partner, 0.0, 0.0, m))

    fixed = max((abs(energy - swapped[label][0]) for label, (energy, row) in original.items()
                 if self_mapped(row.powers)), default=0.0)
    if len(original) != len(swapped):
        return float(fixed), float("inf")
    key = lambda z: (round(z.real, 8), round(z.imag, 8))
    first = np.array(sorted((e for e, _ in original.values()), key=key))
    second = np.array(sorted((e for e, _ in swapped.values()), key=key))
    return float(fixed), float(np.max(np.abs(first - second))) if first.size else 0.0


def delta_branch_residuals(a: float, m: float) -> Dict[str, float]:
    """
    Radicals of the lame-f rows under a -> n - a (the a<->f interchange) and m -> 1 - m

    delta5 (n=2) and delta8 (n=4) are fixed, delta6 and delta7 (n=3) trade places.

    Returns:
        Mapping transformation -> largest violation over delta5..delta8
    """
    here = delta_values(a, 0.0, 0.0, m)
    dual = delta_values(a, 0.0, 0.0, 1.0 - m)
    at = {n: delta_values(n - a, 0.0, 0.0, m) for n in (2.0, 3.0, 4.0)}
    return {
        "interchange": float(max(abs(here.delta5 - at[2.0].delta5), abs(here.delta8 - at[4.0].delta8),
                                 abs(here.delta6 - at[3.0].delta7), abs(here.delta7 - at[3.0].delta6))),
        "modulus": float(max(abs(here.delta5 - dual.delta5), abs(here.delta8 - dual.delta8),
                             abs(here.delta6 - dual.delta7), abs(here.delta7 - dual.delta6))),
    }


def midband_spec(case: str, t: float, N: int, split: int, level: float, m: float,
                 beta: Optional[float] = None) -> GALSpec:
    """
    GAL spec carrying the mid-band family: a = t - 1/2, the case parameter equals level

    Args:
        case: b_half, f_half or g_half
        t: Bloch exponent
        N: Sum of the two integer parameters
        split: First of the two integer parameters
        level: 1/2 or 3/2
        m: Modulus parameter
        beta: Optional line offset

    Returns:
        GALSpec
    """
    if case not in MIDBAND_CASES:
        raise DomainError(f"unknown mid-band case {case!r}; expected one of {MIDBAND_CASES}")
    if level not in (0.5, 1.5):
        raise DomainError(f"mid-band level must be 1/2 or 3/2, got {level}")
    for name, value in (("N", N), ("split", split)):
        if not _near_integer(value) or value < 0:
            raise DomainError(f"mid-band {name} must be a non-negative integer, got {value}")
    if split > N:
        raise DomainError(f"split {split} exceeds N={N}")
    p, q = float(split), float(N - split)
    a = t - 0.5
    if case == "b_half":
        return GALSpec(a=a, b=level, f=p, g=q, m=m, beta=beta)
    if case == "f_half":
        return GALSpec(a=a, b=p, f=level, g=q, m=m, beta=beta)
    return GALSpec(a=a, b=p, f=q, g=level, m=m, beta=beta)


def midband_energies(case: str, t: float, N: int, split: int, level: float, m: float) -> List[complex]:
    """Closed-form mid-band energies (two branches at level 3/2)"""
    spec = midband_spec(case, t, N, split, level, m)
    _, b, f, g = spec.parameters
    if level == 0.5:
        if case == "b_half":
            return [complex(-(t**2 + m * (g + b) ** 2))]
        if case == "f_half":
            return [complex(-(m * t**2 + (g + f) ** 2))]
        return [complex(-((f + g) ** 2 + m * (g + b) ** 2))]

    if case == "b_half":
        centre = m * (2 * g + 1) - (1 + t**2 + m * (g + b) ** 2)
        radicand = (2 * g + 1) ** 2 * m**2 + 4 * m * (N + 1) * (f - g) + 4 * (1 - m) * t**2
    elif case == "f_half":
        centre = (2 * g + 1) - ((1 + t**2) * m + (g + f) ** 2)
        radicand = (2 * g + 1) ** 2 + 4 * m * (N + 1) * (f - g) - 4 * m * (1 - m) * t**2
    else:
        centre = 1 + 2 * f + (2 * b + 1) * m - ((f + g) ** 2 + m * (g + b) ** 2)
        radicand = (1 - m) * ((2 * f + 1) ** 2 - (2 * b + 1) ** 2 * m) + 4 * m * t**2
    root = complex(np.emath.sqrt(radicand))
    return [complex(centre) - root, complex(centre) + root]


def _midband_ansatz(case: str, N: int, level: float):
    """(primary, companion, len A, len B, form) of the two-sector ansatz"""
    _, _, odd_primary, odd_companion, even_companion = _MIDBAND_LAYOUT[case]
    total = level + N
    if _near_integer((total - 0.5) / 2.0):
        order = int(round((total - 0.5) / 2.0))
        return (0, 0, 0), even_companion, order + 1, order, "even"
    order = int(round((total - 1.5) / 2.0))
    return odd_primary, odd_companion, order + 1, order + 1, "odd"


def _midband_closed_coefficients(case: str, t: float, N: int, split: int, level: float):
    """(poly_A, poly_B) when a closed form exists, else None"""
    if level == 0.5 and N == 0:
        return [1.0], []
    if case == "b_half" and level == 0.5 and N == 1:
        ratio = -1j / t if split == 1 else -1j * t
        return [1.0], [ratio]
    return None


def _midband_fit(spec: GALSpec, base: str, t: float, energy: complex, primary, companion,
                 size_a: int, size_b: int) -> Tuple[List[complex], List[complex], float]:
    unknowns = size_a + size_b
    count = Config.MIDBAND_FIT_FACTOR * unknowns + 4
    x = np.linspace(0.0, spec.period, count, endpoint=False)
    p = elliptic_point(line_points(spec, x), spec.m)
    first, second = monomial_log_jet(p, (-spec.g, -spec.f, -spec.b))
    _, bloch_first, bloch_second = bloch_log_jet(p, base, t)
    first, second = first + bloch_first, second + bloch_second
    shift = potential_at_y(spec, p.y) - energy

    columns, scales = [], []
    for factor, size in ((primary, size_a), (companion, size_b)):
        monomial = integer_monomial_jet(p, factor)
        for k in range(size):
            coefficients = np.zeros(k + 1)
            coefficients[k] = 1.0
            z = multiply_jets(monomial, polynomial_jet(p, coefficients))
            columns.append((second + first * first + shift) * z.value + 2.0 * first * z.first + z.second)
            scales.append(np.abs(second + first * first) * np.abs(z.value) + 2.0 * np.abs(first * z.first)
                          + np.abs(z.second) + np.abs(shift * z.value))
    matrix = np.column_stack(columns)
    weights = np.sum(np.column_stack(scales), axis=1)
    matrix = matrix / weights[:, None]
    norms = np.linalg.norm(matrix, axis=0)
    norms[norms == 0.0] = 1.0
    vector, _ = _null_vector(matrix / norms[None, :])
    vector = vector / norms
    quality = float(np.linalg.norm(matrix @ vector) / np.linalg.norm(np.abs(matrix) @ np.abs(vector)))
    coefficients = _normalized(vector)
    return coefficients[:size_a], coefficients[size_a:], quality


def midband_states(case: str, t: float, N: int, split: int, level: float, m: float,
                   beta: Optional[float] = None) -> List[QESState]:
    """
    Doubly degenerate mid-band states with Bloch factor [base]^t and their partners

    Args:
        case: b_half, f_half or g_half
        t: Bloch exponent (non-integer for a genuine mid-band level)
        N: Sum of the two integer parameters
        split: First of the two integer parameters
        level: 1/2 or 3/2
        m: Modulus parameter
        beta: Optional line offset

    Returns:
        For every energy, the state and its partner with the conjugate base
    """
    spec = midband_spec(case, t, N, split, level, m, beta)
    base, partner_base, _, _, _ = _MIDBAND_LAYOUT[case]
    primary, companion, size_a, size_b, form = _midband_ansatz(case, N, level)
    prefactor = (-spec.g, -spec.f, -spec.b)
    states = []
    for index, energy in enumerate(midband_energies(case, t, N, split, level, m)):
        branch = "" if level == 0.5 else ("-" if index == 0 else "+")
        for label, bloch_base, sign in (("state", base, 1.0), ("partner", partner_base, -1.0)):
            closed = _midband_closed_coefficients(case, sign * t, N, split, level)
            if closed is not None:
                poly_a, poly_b = closed
                quality, source = None, "closed"
            else:
                poly_a, poly_b, quality = _midband_fit(spec, bloch_base, t, energy, primary, companion,
                                                       size_a, size_b)
                source = "fit"
                if quality > 1e-8:
                    logger.warning(f"mid-band fit {case} level={level} N={N} {label}{branch}: quality {quality:.2e}")
            states.append(QESState(
                energy=energy,
                prefactor_exponents=prefactor,
                bloch_base=bloch_base,
                bloch_exponent=t,
                primary_factor=primary,
                companion_factor=companion if poly_b else (0, 0, 0),
                poly_A=[complex(c) for c in poly_a],
                poly_B=[complex(c) for c in poly_b],
                period_class=period_class(prefactor, bloch_exponent=t),
                provenance=f"midband:{case}:level={level:g}:N={N}:{form}:{label}{branch}:{source}",
                realization=spec.parameters,
                broken_pt=_broken(energy),
                fit_quality=quality,
            ))
    return states


class QESCatalog:
    """Service facade used by the CLI and the verification processor"""

    def __init__(self):
        self.config = Config()
        self.logger = setup_logger('qes_catalog')

    def states(self, spec: GALSpec) -> List[QESState]:
        """
        Closed-form states when a table family matches, otherwise the collocated QES spectrum

        Args:
            spec: GAL potential

        Returns:
            States sorted by energy
        """
        try:
            if abs(spec.a - 4.0) < self.config.PARAMETER_TOL and not any(spec.parameters[1:]):
                return lame_a4_edges(spec.m)
            return closed_form_edges(spec)
        except UnsupportedFamilyError as e:
            self.logger.info(f"{str(e)}; falling back to the sector sweep")
        states = qes_spectrum(spec)
        if not states:
            raise UnsupportedFamilyError(f"{spec.bracket} has no QES closure in any sector")
        return states

    def midband(self, case: str, t: float, N: int, split: int, level: float, m: float,
                beta: Optional[float] = None) -> Tuple[GALSpec, List[QESState]]:
        spec = midband_spec(case, t, N, split, level, m, beta)
        return spec, midband_states(case, t, N, split, level, m, beta)


def table_family_specs(a_values: Iterable[int], m: float) -> List[GALSpec]:
    """
    Integer representatives of the four table families

    b=f=0 with a+g=n<=4, b=g=0 with a+f=n<=4, f=0 with a+b+g=n<=3 (b in 1..2) and
    a+b+f+g=2n with n<=1 (b, g in 0..1).

    Args:
        a_values: Values of a
        m: Modulus parameter

    Returns:
        Specs with distinct coefficient brackets
    """
    specs: List[GALSpec] = []
    seen = set()

    def add(a, b, f, g):
        spec = GALSpec(a=float(a), b=float(b), f=float(f), g=float(g), m=m)
        if spec.bracket not in seen:
            seen.add(spec.bracket)
            specs.append(spec)

    for a in a_values:
        for n in range(5):
            add(a, 0, 0, n - a)
            add(a, 0, n - a, 0)
        for b in (1, 2):
            for n in range(4):
                add(a, b, 0, n - a - b)
        for b in (0, 1):
            for g in (0, 1):
                for n in (0, 1):
                    add(a, b, 2 * n - a - b - g, g)
    return specs

"""
State Evaluation Module
Factored eigenstates psi = sn^rs cn^rc dn^rd [Bloch base]^t (P*A(u) + C*B(u)), u = sn^2(y),
with analytic first and second derivatives in y
"""

from typing import Iterable, NamedTuple, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from config import Config
from schema import GALSpec, QESState
from modules.elliptic import jacobi_values
from modules.gal import line_points, period_grid, potential_at_y
from utils.exceptions import PoleError
from utils.logger import setup_logger

logger = setup_logger('states')

FACTOR_NAMES = ("sn", "cn", "dn")


class Jet(NamedTuple):
    """Value, first and second y-derivative of a function on a set of points"""
    value: np.ndarray
    first: np.ndarray
    second: np.ndarray


class EllipticPoint(NamedTuple):
    y: np.ndarray
    sn: np.ndarray
    cn: np.ndarray
    dn: np.ndarray
    m: float


def elliptic_point(y, m: float) -> EllipticPoint:
    y = np.asarray(y, dtype=complex)
    sn, cn, dn = jacobi_values(y, m)
    return EllipticPoint(y, sn, cn, dn, m)


def monomial_log_jet(p: EllipticPoint, exponents: Tuple[float, float, float]):
    """
    (ln M)' and (ln M)'' for M = sn^a cn^b dn^c

    Args:
        p: Elliptic values at the points
        exponents: (a, b, c)

    Returns:
        Tuple (L1, L2)
    """
    sn, cn, dn, m = p.sn, p.cn, p.dn, p.m
    first = np.zeros_like(sn)
    second = np.zeros_like(sn)
    rs, rc, rd = exponents
    if rs:
        ls = cn * dn / sn
        first = first + rs * ls
        second = second + rs * ((-dn * dn - m * cn * cn) - ls * ls)
    if rc:
        lc = -sn * dn / cn
        first = first + rc * lc
        second = second + rc * ((-dn * dn + m * sn * sn) - lc * lc)
    if rd:
        ld = -m * sn * cn / dn
        first = first + rd * ld
        second = second + rd * (-m * (cn * cn - sn * sn) - ld * ld)
    return first, second


def _factor_jets(p: EllipticPoint):
    sn, cn, dn, m = p.sn, p.cn, p.dn, p.m
    return (
        Jet(sn, cn * dn, -sn * dn * dn - m * sn * cn * cn),
        Jet(cn, -sn * dn, -cn * dn * dn + m * sn * sn * cn),
        Jet(dn, -m * sn * cn, -m * dn * (cn * cn - sn * sn)),
    )


def multiply_jets(left: Jet, right: Jet) -> Jet:
    return Jet(
        left.value * right.value,
        left.first * right.value + left.value * right.first,
        left.second * right.value + 2.0 * left.first * right.first + left.value * right.second,
    )


def integer_monomial_jet(p: EllipticPoint, powers: Tuple[int, int, int]) -> Jet:
    """Jet of sn^i cn^j dn^k for small non-negative integer powers"""
    one = np.ones_like(p.sn)
    jet = Jet(one, np.zeros_like(one), np.zeros_like(one))
    for factor, power in zip(_factor_jets(p), powers):
        for _ in range(int(power)):
            jet = multiply_jets(jet, factor)
    return jet


def polynomial_jet(p: EllipticPoint, coefficients) -> Jet:
    """Jet of sum_k c_k sn^{2k}(y)"""
    sn, cn, dn, m = p.sn, p.cn, p.dn, p.m
    coefficients = np.asarray(coefficients, dtype=complex)
    u = sn * sn
    du = 2.0 * sn * cn * dn
    d2u = 2.0 * (cn * cn * dn * dn - sn * sn * dn * dn - m * sn * sn * cn * cn)
    if coefficients.size == 0:
        zero = np.zeros_like(u)
        return Jet(zero, zero, zero)
    value = npoly.polyval(u, coefficients)
    pu = npoly.polyval(u, npoly.polyder(coefficients)) if coefficients.size > 1 else np.zeros_like(u)
    puu = npoly.polyval(u, npoly.polyder(coefficients, 2)) if coefficients.size > 2 else np.zeros_like(u)
    return Jet(value, pu * du, puu * du * du + pu * d2u)


def bloch_log_jet(p: EllipticPoint, base: str, t: float):
    """
    Value of B^t and (ln B^t)', (ln B^t)'' for the three Bloch bases and their inverses

    Returns:
        Tuple (value, L1, L2)
    """
    sn, cn, dn, m = p.sn, p.cn, p.dn, p.m
    k = np.sqrt(m)
    if base == "cn+i*sn":
        value, lb, dlb = cn + 1j * sn, 1j * dn, -1j * m * sn * cn
    elif base == "cn-i*sn":
        value, lb, dlb = cn - 1j * sn, -1j * dn, 1j * m * sn * cn
    elif base == "dn+i*sqrt(m)*sn":
        value, lb, dlb = dn + 1j * k * sn, 1j * k * cn, -1j * k * sn * dn
    elif base == "dn-i*sqrt(m)*sn":
        value, lb, dlb = dn - 1j * k * sn, -1j * k * cn, 1j * k * sn * dn
    elif base == "dn+sqrt(m)*cn":
        value, lb, dlb = dn + k * cn, -k * sn, -k * cn * dn
    elif base == "dn-sqrt(m)*cn":
        value, lb, dlb = dn - k * cn, k * sn, k * cn * dn
    else:
        raise ValueError(f"unknown Bloch base {base!r}")
    return np.exp(t * np.log(value)), t * lb, t * dlb


def _prefactor(p: EllipticPoint, state: QESState, shift: Tuple[float, float, float]):
    exponents = tuple(r - s for r, s in zip(state.prefactor_exponents, shift))
    for factor, name, exponent in zip((p.sn, p.cn, p.dn), FACTOR_NAMES, exponents):
        if exponent < 0 and np.any(np.abs(factor) < Config.PSI_FLOOR):
            index = int(np.argmin(np.abs(factor)))
            location = complex(p.y.ravel()[index])
            raise PoleError(f"{name} vanishes at y={location} where its exponent is {exponent}", location=location)
    value = np.ones_like(p.sn)
    for factor, exponent in zip((p.sn, p.cn, p.dn), exponents):
        if exponent:
            value = value * np.power(factor, exponent)
    first, second = monomial_log_jet(p, exponents)
    if state.bloch_base is not None:
        bloch_value, bloch_first, bloch_second = bloch_log_jet(p, state.bloch_base, state.bloch_exponent)
        value = value * bloch_value
        first = first + bloch_first
        second = second + bloch_second
    return value, first, second


def z_jet(p: EllipticPoint, state: QESState) -> Jet:
    """Jet of the polynomial part P*A(u) + C*B(u)"""
    primary = multiply_jets(integer_monomial_jet(p, state.primary_factor), polynomial_jet(p, state.poly_A))
    if not state.poly_B:
        return primary
    companion = multiply_jets(integer_monomial_jet(p, state.companion_factor), polynomial_jet(p, state.poly_B))
    return Jet(primary.value + companion.value, primary.first + companion.first, primary.second + companion.second)


def state_jet_at(state: QESState, p: EllipticPoint,
                 shift: Tuple[float, float, float] = (0.0, 0.0, 0.0)) -> Jet:
    """
    psi, psi_y, psi_yy at the given elliptic point set

    Args:
        state: Factored state
        p: Elliptic values
        shift: Exponents removed from the monomial prefactor (used for the post-ansatz factor)

    Returns:
        Jet of the state
    """
    value, first, second = _prefactor(p, state, shift)
    z = z_jet(p, state)
    return Jet(
        value * z.value,
        value * (first * z.value + z.first),
        value * ((second + first * first) * z.value + 2.0 * first * z.first + z.second),
    )


def state_jet(state: QESState, spec: GALSpec, x) -> Jet:
    """Jet of psi in y along the line y = ix + beta"""
    return state_jet_at(state, elliptic_point(line_points(spec, x), spec.m))


def eval_state(state: QESState, spec: GALSpec, x):
    """
    psi(x) on the line y = ix + beta

    Args:
        state: Factored state
        spec: Potential the state belongs to
        x: Real point or array

    Returns:
        Complex value(s)
    """
    value = state_jet(state, spec, x).value
    return complex(value) if np.ndim(value) == 0 else value


def schrodinger_residual(state: QESState, spec: GALSpec, grid: Optional[Iterable[float]] = None,
                         energy: Optional[complex] = None) -> float:
    """
    max |-psi_xx + V psi - E psi| / max |psi| over the grid

    Since d/dx = i d/dy on the line, -psi_xx = psi_yy.

    Args:
        state: Factored state
        spec: Potential
        grid: Real x points (default: one period, Config.RESIDUAL_GRID points)
        energy: Override of the state's energy (sensitivity checks)

    Returns:
        Normalized residual
    """
    x = period_grid(spec, Config.RESIDUAL_GRID) if grid is None else np.asarray(list(grid), dtype=float)
    p = elliptic_point(line_points(spec, x), spec.m)
    jet = state_jet_at(state, p)
    E = state.energy if energy is None else energy
    V = potential_at_y(spec, p.y)
    residual = jet.second + (V - E) * jet.value
    return float(np.max(np.abs(residual)) / np.max(np.abs(jet.value)))


def pole_margin(state: QESState, spec: GALSpec, count: int = Config.PARTNER_GRID) -> float:
    """min |psi| / max |psi| over one period"""
    values = np.abs(state_jet(state, spec, period_grid(spec, count)).value)
    return float(np.min(values) / np.max(values))


def _near_integer(value: float) -> bool:
    return abs(value - round(value)) < Config.PARAMETER_TOL


def period_class(exponents: Tuple[float, float, float], bloch_exponent: Optional[float] = None) -> str:
    """
    Period class from exponent parities

    sn, cn, dn pick up signs (+,-,-) under y -> y + 2iK' and (-,-,+) under y -> y + 2K.

    Args:
        exponents: Total (sn, cn, dn) exponents
        bloch_exponent: t for mid-band states

    Returns:
        One of 2iK', 4iK', 2K+2iK', 4K-type, bloch(t)
    """
    if bloch_exponent is not None:
        return f"bloch({bloch_exponent:g})"
    rs, rc, rd = exponents
    imaginary = rc + rd
    if not _near_integer(imaginary):
        return "4K-type"
    if round(imaginary) % 2 == 0:
        return "2iK'"
    diagonal = rs + rd
    if _near_integer(diagonal) and round(diagonal) % 2 == 0:
        return "2K+2iK'"
    return "4iK'"


def floquet_sign(state: QESState) -> int:
    """psi(x + 2K') = sign * psi(x) for band-edge states with integer cn/dn exponent sum"""
    rc, rd = state.prefactor_exponents[1], state.prefactor_exponents[2]
    return 1 if round(rc + rd) % 2 == 0 else -1

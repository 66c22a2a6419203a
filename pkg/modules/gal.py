"""
GAL Potential Module
The PT-symmetric generalized associated Lame potential, its bracket notation,
symmetry and duality transforms
"""

from typing import Callable, Iterable, Optional

import numpy as np

from config import Config
from schema import EnergyMap, GALSpec, TransformResult
from modules.elliptic import addition_theorem, complete_K, complete_K_prime, jacobi_values
from utils.exceptions import ConfigurationError, DomainError
from utils.logger import setup_logger

logger = setup_logger('gal')

TRANSFORMS = ("shift_K", "shift_iK'", "shift_K_iK'", "reflect_a", "reflect_b", "reflect_f", "reflect_g", "dual")


def line_points(spec: GALSpec, x, beta: Optional[complex] = None) -> np.ndarray:
    """y = ix + beta for real x"""
    offset = spec.beta if beta is None else beta
    return 1j * np.asarray(x, dtype=float) + offset


def potential_at_y(spec: GALSpec, y) -> np.ndarray:
    """
    GAL potential as a function of the complex variable y

    Args:
        spec: Potential parameters
        y: Complex point(s)

    Returns:
        -A m sn^2 - B m cd^2 - F dc^2 - G ns^2 at y
    """
    A, B, F, G = spec.coefficients
    m = spec.m
    sn, cn, dn = jacobi_values(y, m)
    s2, c2, d2 = sn * sn, cn * cn, dn * dn
    value = -A * m * s2
    if B:
        value = value - B * m * c2 / d2
    if F:
        value = value - F * d2 / c2
    if G:
        value = value - G / s2
    return value


def _check_beta(spec: GALSpec, beta: complex) -> None:
    quarter = spec.quarter_period
    offset = np.mod(np.real(beta), quarter)
    if np.imag(beta) == 0.0 and min(offset, quarter - offset) / quarter < Config.EPS_POLE:
        raise ConfigurationError(f"beta={beta} lies on a singular line", field="beta")


def eval_potential(spec: GALSpec, x, beta: Optional[complex] = None):
    """
    V^PT(x) on the line y = ix + beta

    Args:
        spec: Potential parameters
        x: Real point or array of points
        beta: Optional override of the line offset (may be complex in sensitivity checks)

    Returns:
        Complex potential value(s)
    """
    if beta is not None:
        _check_beta(spec, beta)
    values = potential_at_y(spec, line_points(spec, x, beta))
    return complex(values) if np.ndim(values) == 0 else values


def potential_callable(spec: GALSpec) -> Callable[[float], complex]:
    """Scalar x -> V(x) closure for the ODE integrator"""
    A, B, F, G = spec.coefficients
    m = spec.m
    beta = spec.beta
    K, Kp = spec.quarter_period, spec.complementary_quarter_period

    def potential(x: float) -> complex:
        sn, cn, dn = addition_theorem(beta, x, m, K, Kp)
        s2, c2, d2 = sn * sn, cn * cn, dn * dn
        return complex(-A * m * s2 - B * m * c2 / d2 - F * d2 / c2 - G / s2)

    return potential


def real_associated_lame(A: float, G: float, m: float) -> Callable[[float], complex]:
    """
    Real associated Lame potential A m sn^2(x) + G m cd^2(x) on the real axis

    Its discriminant at modulus 1-m and energy E + A + G equals the PT
    discriminant of [A, 0, 0, G] at modulus m and energy E.
    """
    K, Kp = complete_K(m), complete_K_prime(m)

    def potential(x: float) -> complex:
        sn, cn, dn = addition_theorem(x, 0.0, m, K, Kp)
        return complex(A * m * sn * sn + G * m * cn * cn / (dn * dn))

    return potential


def period_grid(spec: GALSpec, count: int = Config.POTENTIAL_GRID, endpoint: bool = False) -> np.ndarray:
    """Uniform x-grid over one period [0, 2K'(m))"""
    return np.linspace(0.0, spec.period, count, endpoint=endpoint)


def pt_symmetry_residual(spec: GALSpec, grid: Iterable[float], beta: Optional[complex] = None) -> float:
    """
    max |V(-x) - conj(V(x))| over the grid

    Args:
        spec: Potential parameters
        grid: Real x points within one period
        beta: Optional line offset override

    Returns:
        Largest PT violation
    """
    x = np.asarray(list(grid), dtype=float)
    forward = potential_at_y(spec, line_points(spec, x, beta))
    backward = potential_at_y(spec, line_points(spec, -x, beta))
    return float(np.max(np.abs(backward - np.conj(forward))))


def transform_spec(spec: GALSpec, op: str) -> TransformResult:
    """
    Apply a symmetry, translation or duality transform

    Args:
        spec: Source spec
        op: One of shift_K, shift_iK', shift_K_iK', reflect_<p>, dual

    Returns:
        TransformResult with new spec, energy map and argument map
    """
    a, b, f, g = spec.parameters
    identity = EnergyMap()

    if op == "shift_K":
        return TransformResult(op=op, new_spec=spec.with_parameters(b, a, g, f),
                               energy_map=identity, argument_map="y -> y + K(m)")
    if op == "shift_iK'":
        return TransformResult(op=op, new_spec=spec.with_parameters(g, f, b, a),
                               energy_map=identity, argument_map="y -> y + iK'(m)")
    if op == "shift_K_iK'":
        return TransformResult(op=op, new_spec=spec.with_parameters(f, g, a, b),
                               energy_map=identity, argument_map="y -> y + K(m) + iK'(m)")
    if op.startswith("reflect_"):
        name = op.split("_", 1)[1]
        if name not in "abfg" or len(name) != 1:
            raise DomainError(f"unknown reflection {op!r}")
        params = dict(a=a, b=b, f=f, g=g)
        params[name] = -params[name] - 1.0
        return TransformResult(op=op, new_spec=spec.with_parameters(**params),
                               energy_map=identity, argument_map="y -> y")
    if op == "dual":
        total = sum(spec.coefficients)
        new_spec = GALSpec(a=a, b=g, f=f, g=b, m=1.0 - spec.m)
        logger.debug(f"dual of {spec.bracket} at m={spec.m}: {new_spec.bracket} at m={new_spec.m}")
        return TransformResult(op=op, new_spec=new_spec,
                               energy_map=EnergyMap(sigma=-1, offset=-total),
                               argument_map="y -> iy + K'(m) + iK(m), m -> 1 - m")
    raise DomainError(f"unknown transform {op!r}; expected one of {TRANSFORMS}")

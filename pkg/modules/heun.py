"""
Heun Dictionary Module
Maps the GAL equation for the post-ansatz factor onto canonical Heun form in
u = sn^2(y) and checks mapped states by pulling the Heun operator back to y
"""

from typing import Iterable, Optional, Tuple

import numpy as np

from config import Config
from schema import GALSpec, HeunParameters, QESState
from modules.gal import line_points, period_grid
from modules.states import elliptic_point, state_jet_at
from utils.logger import setup_logger

logger = setup_logger('heun')

SINGULAR_TOL = 1e-8


def gal_to_heun(spec: GALSpec, E: complex) -> HeunParameters:
    """
    Canonical Heun parameters of the GAL equation at energy E

    Args:
        spec: GAL potential
        E: Energy

    Returns:
        HeunParameters with alpha the root of smaller real part
    """
    a, b, f, g = spec.parameters
    m = spec.m
    total = b + f + g
    Q = total * (total - 1.0) - a * (a + 1.0)
    R = E + (f + g) ** 2 + m * (g + b) ** 2
    s = 0.5 - total
    discriminant = s * s - Q
    root = complex(np.emath.sqrt(discriminant))
    alpha, beta = sorted(((s - root) / 2.0, (s + root) / 2.0), key=lambda z: (z.real, z.imag))
    return HeunParameters(
        alpha=alpha,
        beta=beta,
        gamma=0.5 - g,
        delta=0.5 - f,
        epsilon=0.5 - b,
        q=complex(R) / (4.0 * m),
        c=1.0 / m,
        complex_exponents=discriminant < 0.0,
    )


def _u_jets(p):
    sn, cn, dn, m = p.sn, p.cn, p.dn, p.m
    u = sn * sn
    du = 2.0 * sn * cn * dn
    d2u = 2.0 * (cn * cn * dn * dn - sn * sn * dn * dn - m * sn * sn * cn * cn)
    return u, du, d2u


def _heun_coefficients(hp: HeunParameters, u):
    """P(u) and Q(u) of G'' + P G' + Q G = 0"""
    P = hp.gamma / u + hp.delta / (u - 1.0) + hp.epsilon / (u - hp.c)
    Qh = (hp.alpha * hp.beta * u - hp.q) / (u * (u - 1.0) * (u - hp.c))
    return P, Qh


def heun_residual(hp: HeunParameters, state: QESState, spec: GALSpec,
                  grid: Optional[Iterable[float]] = None) -> float:
    """
    Canonical Heun residual of a mapped state

    G(u) = phi(y) with phi = psi / (sn^-g cn^-f dn^-b); G_u and G_uu come from
    the analytic y-derivatives of phi through u = sn^2(y).

    Args:
        hp: Heun parameters, normally gal_to_heun(spec, state.energy)
        state: Factored band-edge state
        spec: GAL potential
        grid: Real x points (default: one period, Config.RESIDUAL_GRID points)

    Returns:
        max |Heun residual| / max |G| over the points kept
    """
    x = period_grid(spec, Config.RESIDUAL_GRID) if grid is None else np.asarray(list(grid), dtype=float)
    p = elliptic_point(line_points(spec, x), spec.m)
    u, du, d2u = _u_jets(p)

    keep = (np.abs(u) > SINGULAR_TOL) & (np.abs(u - 1.0) > SINGULAR_TOL) & \
        (np.abs(u - hp.c) > SINGULAR_TOL) & (np.abs(du) > SINGULAR_TOL)
    skipped = int(np.size(keep) - np.count_nonzero(keep))
    if skipped:
        logger.debug(f"heun_residual skipped {skipped} points at removable singularities")

    phi = state_jet_at(state, p, shift=(-spec.g, -spec.f, -spec.b))
    G = phi.value[keep]
    G_u = phi.first[keep] / du[keep]
    G_uu = (phi.second[keep] - d2u[keep] * G_u) / du[keep] ** 2
    P, Qh = _heun_coefficients(hp, u[keep])
    residual = G_uu + P * G_u + Qh * G
    return float(np.max(np.abs(residual)) / np.max(np.abs(G)))


def coefficient_round_trip(spec: GALSpec, E: complex, y) -> Tuple[float, float]:
    """
    Compare the GAL phi-equation coefficients with the pulled-back Heun ones

        phi'' + [2b m sc/d + 2f sd/c - 2g cd/s] phi' + [Q m sn^2 - R] phi = 0

    Args:
        spec: GAL potential
        E: Energy
        y: Complex points off the singular lattice

    Returns:
        (max discrepancy of the phi' coefficient, max discrepancy of the phi coefficient)
    """
    a, b, f, g = spec.parameters
    m = spec.m
    p = elliptic_point(y, m)
    sn, cn, dn = p.sn, p.cn, p.dn
    total = b + f + g
    Q = total * (total - 1.0) - a * (a + 1.0)
    R = E + (f + g) ** 2 + m * (g + b) ** 2
    first_direct = 2.0 * b * m * sn * cn / dn + 2.0 * f * sn * dn / cn - 2.0 * g * cn * dn / sn
    zeroth_direct = Q * m * sn * sn - R

    hp = gal_to_heun(spec, E)
    u, du, d2u = _u_jets(p)
    P, Qh = _heun_coefficients(hp, u)
    first_pulled = P * du - d2u / du
    zeroth_pulled = Qh * du * du
    return (
        float(np.max(np.abs(first_pulled - first_direct))),
        float(np.max(np.abs(zeroth_pulled - zeroth_direct))),
    )

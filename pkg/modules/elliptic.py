"""
Jacobi Elliptic Functions Module
Complete integrals, sn/cn/dn at complex argument, quarter-period shifts and
the modulus-duality point used by the rest of galband
"""

from typing import Tuple, Union

import numpy as np
from scipy.special import ellipj, ellipk

from config import Config
from schema import EllipticTriple
from utils.exceptions import DomainError, PoleError
from utils.logger import setup_logger

logger = setup_logger('elliptic')

ArrayLike = Union[complex, float, np.ndarray]

QUARTER_SHIFTS = ("K", "iK'", "K+iK'")


def agm(a: float, b: float, tol: float = 1e-16) -> float:
    """
    Arithmetic-geometric mean of two positive numbers

    Args:
        a: First argument
        b: Second argument
        tol: Relative stopping tolerance

    Returns:
        AGM(a, b)
    """
    a, b = float(a), float(b)
    for _ in range(64):
        if abs(a - b) <= tol * abs(a):
            break
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return a


def complete_K(m: float) -> float:
    """
    Complete elliptic integral of the first kind K(m)

    Args:
        m: Modulus parameter, 0 <= m < 1

    Returns:
        K(m)
    """
    if not 0.0 <= m < 1.0:
        raise DomainError(f"complete_K requires 0 <= m < 1, got m={m}")
    return float(ellipk(m))


def complete_K_prime(m: float) -> float:
    """K'(m) = K(1 - m), defined for 0 < m <= 1"""
    if not 0.0 < m <= 1.0:
        raise DomainError(f"complete_K_prime requires 0 < m <= 1, got m={m}")
    return float(ellipk(1.0 - m))


def _real_triple(u: np.ndarray, m: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    sn, cn, _, _ = ellipj(u, m)
    # dn from sn keeps full relative accuracy near m -> 1
    dn = np.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn


def nearest_pole(z: ArrayLike, m: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nearest lattice pole 2pK + (2q+1)iK' and its distance in lattice units

    Args:
        z: Complex argument(s)
        m: Modulus parameter, 0 < m < 1

    Returns:
        (pole location, normalized distance)
    """
    z = np.asarray(z, dtype=complex)
    K = complete_K(m)
    Kp = complete_K_prime(m)
    p = np.round(z.real / (2.0 * K))
    q = np.round((z.imag / Kp - 1.0) / 2.0)
    pole = 2.0 * p * K + 1j * (2.0 * q + 1.0) * Kp
    distance = np.hypot((z.real - pole.real) / K, (z.imag - pole.imag) / Kp)
    return pole, distance


def _check_poles(z: np.ndarray, m: float) -> None:
    pole, distance = nearest_pole(z, m)
    close = distance < Config.EPS_POLE
    if np.any(close):
        index = np.flatnonzero(close)[0]
        location = complex(pole.ravel()[index])
        raise PoleError(
            f"argument {complex(z.ravel()[index])} is within the pole radius of lattice point {location}",
            location=location,
        )


def jacobi_values(z: ArrayLike, m: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    sn, cn, dn at complex argument(s) via the addition theorem on z = x + iy

    Args:
        z: Complex scalar or array
        m: Modulus parameter, 0 <= m <= 1

    Returns:
        Tuple (sn, cn, dn) of complex arrays shaped like z
    """
    if not 0.0 <= m <= 1.0:
        raise DomainError(f"jacobi requires 0 <= m <= 1, got m={m}")
    z = np.asarray(z, dtype=complex)

    if m == 1.0:
        # non-spectral limit, identity tests only
        sech = 1.0 / np.cosh(z)
        return np.tanh(z), sech, sech

    if 0.0 < m:
        _check_poles(z, m)
        return addition_theorem(z.real, z.imag, m, complete_K(m), complete_K_prime(m))
    return addition_theorem(z.real, z.imag, m, complete_K(m), np.inf)


def addition_theorem(x, y, m: float, K: float, Kp: float):
    """
    sn, cn, dn at x + iy from real-argument values at m and 1 - m

    No pole check; callers in tight loops pass precomputed quarter periods.
    """
    x = x - 4.0 * K * np.round(x / (4.0 * K))
    if np.isfinite(Kp):
        y = y - 4.0 * Kp * np.round(y / (4.0 * Kp))

    s, c, d = _real_triple(x, m)
    s1, c1, d1 = _real_triple(y, 1.0 - m)

    denominator = c1 * c1 + m * s * s * s1 * s1
    sn = (s * d1 + 1j * c * d * s1 * c1) / denominator
    cn = (c * c1 - 1j * s * d * s1 * d1) / denominator
    dn = (d * c1 * d1 - 1j * m * s * c * s1) / denominator
    return sn, cn, dn


def jacobi(z: complex, m: float) -> EllipticTriple:
    """
    Jacobi elliptic functions at one complex point

    Args:
        z: Complex argument away from the poles 2pK + (2q+1)iK'
        m: Modulus parameter

    Returns:
        EllipticTriple
    """
    sn, cn, dn = jacobi_values(z, m)
    return EllipticTriple(z=complex(z), m=m, sn=complex(sn), cn=complex(cn), dn=complex(dn))


def shift_values(
    sn: np.ndarray, cn: np.ndarray, dn: np.ndarray, m: float, shift: str
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Closed quarter-period identities applied to known values

    Args:
        sn, cn, dn: Values at z
        m: Modulus parameter, 0 < m < 1
        shift: One of "K", "iK'", "K+iK'"

    Returns:
        (sn, cn, dn) at z + shift
    """
    k = np.sqrt(m)
    kp = np.sqrt(1.0 - m)
    if shift == "K":
        return cn / dn, -kp * sn / dn, kp / dn
    if shift == "iK'":
        return 1.0 / (k * sn), -1j * dn / (k * sn), -1j * cn / sn
    if shift == "K+iK'":
        return dn / (k * cn), -1j * kp / (k * cn), 1j * kp * sn / cn
    raise DomainError(f"unknown quarter shift {shift!r}; expected one of {QUARTER_SHIFTS}")


def shift_offset(shift: str, m: float) -> complex:
    """Numerical value of the quarter period named by shift"""
    K = complete_K(m)
    Kp = complete_K_prime(m)
    return {"K": K, "iK'": 1j * Kp, "K+iK'": K + 1j * Kp}[shift]


def quarter_shift(z: complex, m: float, shift: str) -> EllipticTriple:
    """
    Triple at z + shift from the closed quarter-period identities

    Args:
        z: Complex argument
        m: Modulus parameter, 0 < m < 1
        shift: One of "K", "iK'", "K+iK'"

    Returns:
        EllipticTriple at z + shift
    """
    if shift not in QUARTER_SHIFTS:
        raise DomainError(f"unknown quarter shift {shift!r}; expected one of {QUARTER_SHIFTS}")
    target = complex(z) + shift_offset(shift, m)
    _check_poles(np.asarray(target), m)
    sn, cn, dn = jacobi_values(z, m)
    s, c, d = shift_values(sn, cn, dn, m, shift)
    return EllipticTriple(z=target, m=m, sn=complex(s), cn=complex(c), dn=complex(d))


def duality_point(y: ArrayLike, m: float) -> np.ndarray:
    """w = iy + K'(m) + iK(m), the argument at modulus 1 - m in the duality identities"""
    return 1j * np.asarray(y, dtype=complex) + complete_K_prime(m) + 1j * complete_K(m)


def duality_residuals(y: ArrayLike, m: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Residuals of the three modulus-duality identities

        sqrt(m) sn(y, m) = -dn(w, 1-m)
        sqrt(m) cn(y, m) = i sqrt(1-m) cn(w, 1-m)
        dn(y, m)         = sqrt(1-m) sn(w, 1-m)

    Args:
        y: Complex argument(s)
        m: Modulus parameter, 0 < m < 1

    Returns:
        Absolute residual arrays for the sn, cn and dn identities
    """
    sn, cn, dn = jacobi_values(y, m)
    sw, cw, dw = jacobi_values(duality_point(y, m), 1.0 - m)
    k = np.sqrt(m)
    kp = np.sqrt(1.0 - m)
    return (
        np.abs(k * sn + dw),
        np.abs(k * cn - 1j * kp * cw),
        np.abs(dn - kp * sw),
    )


def derivatives(sn: np.ndarray, cn: np.ndarray, dn: np.ndarray, m: float):
    """First derivatives (sn', cn', dn') from the values"""
    return cn * dn, -sn * dn, -m * sn * cn

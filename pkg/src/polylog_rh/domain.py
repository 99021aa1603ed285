"""Branch-cut aware elementary functions and the domains they live on.

Points are plain Python ``complex`` values.  The five domains are open sets:

* ``CUT_PLANE_D``       C minus the real ray [1, inf)
* ``CUT_PLANE_D_PRIME`` C minus the real ray (-inf, 0]
* ``HALF_PLANE_PLUS``   Re z < 1
* ``HALF_PLANE_MINUS``  Re z > 0
* ``STRIP``             0 < Re z < 1
"""

from __future__ import annotations

import cmath
import enum
import math
from numbers import Number

import numpy as np


class DomainError(ValueError):
    """Raised when a point lies outside (or on the boundary of) a required domain."""


class DomainId(enum.Enum):
    CUT_PLANE_D = "CutPlaneD"
    CUT_PLANE_D_PRIME = "CutPlaneDPrime"
    HALF_PLANE_PLUS = "HalfPlanePlus"
    HALF_PLANE_MINUS = "HalfPlaneMinus"
    STRIP = "Strip"

    @property
    def description(self) -> str:
        return _DESCRIPTIONS[self]


_DESCRIPTIONS = {
    DomainId.CUT_PLANE_D: "D = C \\ [1, inf)",
    DomainId.CUT_PLANE_D_PRIME: "D' = C \\ (-inf, 0]",
    DomainId.HALF_PLANE_PLUS: "D(+) = {Re z < 1}",
    DomainId.HALF_PLANE_MINUS: "D(-) = {Re z > 0}",
    DomainId.STRIP: "S = {0 < Re z < 1}",
}


def as_point(z: Number) -> complex:
    """Coerce to complex, rejecting NaN and infinities."""
    w = complex(z)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError(f"non-finite point {w!r}")
    return w


def in_domain(z: Number, d: DomainId) -> bool:
    w = complex(z)
    x, y = w.real, w.imag
    if not (math.isfinite(x) and math.isfinite(y)):
        return False
    if d is DomainId.CUT_PLANE_D:
        return not (y == 0.0 and x >= 1.0)
    if d is DomainId.CUT_PLANE_D_PRIME:
        return not (y == 0.0 and x <= 0.0)
    if d is DomainId.HALF_PLANE_PLUS:
        return x < 1.0
    if d is DomainId.HALF_PLANE_MINUS:
        return x > 0.0
    if d is DomainId.STRIP:
        return 0.0 < x < 1.0
    raise TypeError(f"unknown domain {d!r}")


def require(z: Number, d: DomainId, what: str = "z") -> complex:
    w = as_point(z)
    if not in_domain(w, d):
        if d is DomainId.CUT_PLANE_D:
            raise DomainError(f"{what}={w} on cut of D (real x >= 1)")
        if d is DomainId.CUT_PLANE_D_PRIME:
            raise DomainError(f"{what}={w} on cut of D' (real x <= 0)")
        raise DomainError(f"{what}={w} outside {d.description}")
    return w


def principal_log(z: Number) -> complex:
    """log|z| + i arg z with arg in (-pi, pi]."""
    w = as_point(z)
    if w == 0:
        raise DomainError("log of zero")
    # cmath.log honours the sign of a zero imaginary part; normalise so that
    # the negative real axis always maps to +i*pi.
    if w.imag == 0.0:
        w = complex(w.real, 0.0)
    return cmath.log(w)


def factorial(j: int) -> float:
    if j < 0:
        raise ValueError("factorial of negative integer")
    if j <= 20:
        return float(math.factorial(j))
    out = float(math.factorial(20))
    for i in range(21, j + 1):
        out *= i
    return out


def log_power_term(z: Number, j: int) -> complex:
    """(-1)^j log^j z / j! on the principal branch of D'."""
    if j < 1:
        raise ValueError("j must be >= 1")
    w = require(z, DomainId.CUT_PLANE_D_PRIME)
    return (-principal_log(w)) ** j / factorial(j)


def log_power_terms(z, j: int) -> np.ndarray:
    """Vectorised log_power_term for arrays known to lie in D'."""
    z = np.asarray(z, dtype=complex)
    return (-np.log(z)) ** j / factorial(j)


def log1p_complex(w):
    """log(1 + w) accurate for small |w| (Kahan's correction), array friendly."""
    w = np.asarray(w, dtype=complex)
    u = 1.0 + w
    d = u - 1.0
    small = np.abs(w) < 1e-4
    safe_d = np.where(small | (d == 0), 1.0, d)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        out = np.log(u) * (w / safe_d)
    # short Taylor series where the ratio w/d is ill-defined or inaccurate
    series = w * (1 - w * (1 / 2 - w * (1 / 3 - w * (1 / 4 - w / 5))))
    return np.where(small, series, out)


def expm1_complex(u):
    """exp(u) - 1 without cancellation near 0, array friendly."""
    u = np.asarray(u, dtype=complex)
    return 2.0 * np.exp(0.5 * u) * np.sinh(0.5 * u)

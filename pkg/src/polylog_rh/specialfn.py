"""Reference evaluation of Li_1, Li_k, Li_{2,1,...,1} and zeta(k).

These evaluators never use the inversion formula, so they serve as
independent oracles for both the inversion check and the Riemann-Hilbert
reconstruction.

Continuation of Li_k beyond the series disk integrates Li_{k-1}(t)/t from a
seed point.  Writing s = log t, repeated integration collapses to a single
integral (Cauchy's formula for repeated integration)::

    Li_k(z) = sum_{m=0}^{k-2} Li_{k-m}(z0) (S - s0)^m / m!
              + int_{s0}^{S} (S - s)^{k-2} / (k-2)! * Li_1(e^s) ds

with S = log z taken continuously along the path.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .domain import (
    DomainError,
    DomainId,
    as_point,
    expm1_complex,
    factorial,
    in_domain,
    log1p_complex,
    principal_log,
    require,
)
from .quadrature import adaptive_gl


class SeriesBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class SeriesConfig:
    tol: float = 1e-17
    max_terms: int = 100_000
    radius_switch: float = 0.5

    def __post_init__(self):
        if not 0 < self.tol <= 1e-12:
            raise ValueError("tol must lie in (0, 1e-12]")
        if self.max_terms < 10:
            raise ValueError("max_terms must be >= 10")
        if not 0 < self.radius_switch < 1:
            raise ValueError("radius_switch must lie in (0, 1)")


DEFAULT_SERIES = SeriesConfig()

_SERIES_RADIUS_CUTOFF = 1.0 - 1e-6


@dataclass(frozen=True)
class PathSpec:
    """Waypoints of an integration path in the cut plane D.

    Consecutive waypoints are joined by arcs that are straight in log t
    (radial segments when the waypoints share an argument).  The first
    waypoint must lie on the series disk.
    """

    waypoints: tuple[complex, ...]
    nodes_per_segment: int = 64

    def __post_init__(self):
        pts = tuple(as_point(w) for w in self.waypoints)
        object.__setattr__(self, "waypoints", pts)
        if len(pts) < 2:
            raise ValueError("a path needs at least two waypoints")
        if any(p == 0 for p in pts):
            raise DomainError("path waypoints must avoid t = 0")
        for p, q in zip(pts, pts[1:]):
            if p == q:
                raise ValueError("consecutive waypoints must be distinct")

    def log_vertices(self) -> list[complex]:
        """Continuous logarithm at each waypoint."""
        out = [principal_log(self.waypoints[0])]
        for p, q in zip(self.waypoints, self.waypoints[1:]):
            out.append(out[-1] + cmath.log(q / p))
        return out

    def check_inside(self, domain: DomainId = DomainId.CUT_PLANE_D) -> None:
        logs = self.log_vertices()
        tau = np.linspace(0.0, 1.0, self.nodes_per_segment + 1)
        for s0, s1 in zip(logs, logs[1:]):
            t = np.exp(s0 + tau * (s1 - s0))
            for p in t:
                # sampled points with a positive real part >= 1 and a tiny
                # imaginary part are treated as touching the cut
                if domain is DomainId.CUT_PLANE_D and p.real >= 1.0 and abs(p.imag) < 1e-14 * p.real:
                    raise DomainError(f"path touches the cut of D near {complex(p)}")
                if not in_domain(complex(p), domain):
                    raise DomainError(f"path leaves {domain.description} near {complex(p)}")


def default_path(z: complex, cfg: SeriesConfig = DEFAULT_SERIES) -> PathSpec:
    """Radial path from the series circle to z.

    A ray from the origin meets [1, inf) only if it is the positive real axis,
    which D excludes beyond 1, so the radial path stays in D whenever z does.
    """
    z = require(z, DomainId.CUT_PLANE_D)
    seed = cfg.radius_switch * z / abs(z)
    return PathSpec((seed, z))


def li1(z) -> complex:
    z = require(z, DomainId.CUT_PLANE_D)
    if abs(z) < 0.5:
        return -complex(log1p_complex(-z))
    return -principal_log(1.0 - z)


def _series(k: int, z: complex, cfg: SeriesConfig) -> tuple[complex, float]:
    r = abs(z)
    if r >= _SERIES_RADIUS_CUTOFF:
        raise DomainError(f"|z|={r} too close to 1 for the power series")
    if z == 0:
        return 0j, 0.0
    re, im = [], []
    power = 1 + 0j
    for n in range(1, cfg.max_terms + 1):
        power *= z
        term = power / n**k
        re.append(term.real)
        im.append(term.imag)
        bound = r**n / n**k
        if bound < cfg.tol:
            tail = r ** (n + 1) / (n + 1) ** k / (1.0 - r)
            return complex(math.fsum(re), math.fsum(im)), tail
    raise SeriesBudgetError(f"series for Li_{k}({z}) exceeded {cfg.max_terms} terms")


def li_series(k: int, z, cfg: SeriesConfig = DEFAULT_SERIES) -> complex:
    """Partial sum of sum z^n / n^k with compensated summation."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return _series(k, as_point(z), cfg)[0]


def _li1_vec(t: np.ndarray) -> np.ndarray:
    return -log1p_complex(-t)


def _li_path(k: int, z: complex, path: PathSpec | None, cfg: SeriesConfig, tol: float) -> tuple[complex, float]:
    path = path or default_path(z, cfg)
    if path.waypoints[-1] != z:
        raise ValueError("path must end at z")
    seed = path.waypoints[0]
    if abs(seed) > cfg.radius_switch + 1e-12:
        raise ValueError("path must start on the series disk")
    path.check_inside()
    logs = path.log_vertices()
    S = logs[-1]
    delta = S - logs[0]
    value, err = complex(0), 0.0
    for m in range(k - 1):
        head, tail = _series(k - m, seed, cfg)
        scale = abs(delta) ** m / factorial(m)
        value += head * delta**m / factorial(m)
        err += tail * scale
    p = k - 2
    coef = 1.0 / factorial(p)
    for s0, s1 in zip(logs, logs[1:]):
        ds = s1 - s0

        def integrand(tau, s0=s0, ds=ds):
            s = s0 + tau * ds
            return (S - s) ** p * _li1_vec(np.exp(s)) * ds

        part, part_err = adaptive_gl(integrand, 0.0, 1.0, tol=tol)
        value += coef * part
        err += coef * part_err
    return value, err


def li_path(k: int, z, path: PathSpec | None = None, cfg: SeriesConfig = DEFAULT_SERIES,
            tol: float = 1e-15) -> complex:
    """Li_k(z) by integration along ``path`` (defaults to the radial path)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    z = require(z, DomainId.CUT_PLANE_D)
    if k == 1:
        return li1(z)
    if z == 0:
        return 0j
    return _li_path(k, z, path, cfg, tol)[0]


def li(k: int, z, cfg: SeriesConfig = DEFAULT_SERIES) -> complex:
    """Principal branch of Li_k on D."""
    return li_with_error(k, z, cfg)[0]


def li_with_error(k: int, z, cfg: SeriesConfig = DEFAULT_SERIES) -> tuple[complex, float]:
    """Li_k(z) together with an estimate of its absolute truncation/quadrature error."""
    if k < 1:
        raise ValueError("k must be >= 1")
    z = require(z, DomainId.CUT_PLANE_D)
    if k == 1:
        value = li1(z)
        return value, 2.2e-16 * max(abs(value), 1.0)
    if z == 0:
        return 0j, 0.0
    if abs(z) <= cfg.radius_switch:
        return _series(k, z, cfg)
    return _li_path(k, z, None, cfg, 1e-15)


def li_derivative(k: int, z, cfg: SeriesConfig = DEFAULT_SERIES) -> complex:
    """d/dz Li_k from the closed-form recursion (no numerical differentiation)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    z = require(z, DomainId.CUT_PLANE_D)
    if k == 1:
        return 1.0 / (1.0 - z)
    if z == 0:
        return 1 + 0j
    return li(k - 1, z, cfg) / z


def li21n(k: int, w, tol: float = 1e-15) -> complex:
    """Li_{2,1,...,1}(w) with k - 2 trailing ones (weight k), principal branch on D."""
    return li21n_with_error(k, w, tol)[0]


def li21n_with_error(k: int, w, tol: float = 1e-15) -> tuple[complex, float]:
    """Li_{2,1,...,1}(w) and a quadrature error estimate.

    With t = 1 - exp(-u) the defining integral becomes
    (1/(k-1)!) * int_0^U u^{k-1} / (e^u - 1) du,  U = -log(1 - w),
    taken on the straight segment from 0 to U.  |Im U| < pi keeps the
    segment clear of the poles at 2*pi*i*n and the image path inside D.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    w = require(w, DomainId.CUT_PLANE_D, "w")
    if w == 0:
        return 0j, 0.0
    U = -complex(log1p_complex(-w)) if abs(w) < 0.5 else -principal_log(1.0 - w)

    def integrand(tau):
        u = tau * U
        return u ** (k - 1) / expm1_complex(u) * U

    value, err = adaptive_gl(integrand, 0.0, 1.0, tol=tol)
    f = factorial(k - 1)
    return value / f, err / f


# --- zeta values ---------------------------------------------------------

_DIRECT_TERMS = 100


def _bernoulli_even(count: int) -> list[Fraction]:
    """B_2, B_4, ..., B_{2*count} (Akiyama-Tanigawa)."""
    n_max = 2 * count
    a = [Fraction(0)] * (n_max + 1)
    out = []
    for m in range(n_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(a[0])
    return out


def _zeta_em(k: int, n_direct: int, tail_terms: int) -> float:
    N = n_direct
    head = math.fsum(1.0 / n**k for n in range(1, N))
    parts = [head, N ** (1 - k) / (k - 1), 0.5 * N**-k]
    rising = Fraction(k)  # k (k+1) ... (k + 2j - 2)
    for j, b in enumerate(_bernoulli_even(tail_terms), start=1):
        if j > 1:
            rising *= (k + 2 * j - 3) * (k + 2 * j - 2)
        coeff = b / math.factorial(2 * j) * rising
        parts.append(float(coeff) * N ** (-k - 2 * j + 1))
    return math.fsum(parts)


@dataclass
class ZetaTable:
    """Memo of zeta(k) computed by direct summation plus Euler-Maclaurin tail."""

    values: dict[int, float] = field(default_factory=dict)
    tail_terms: int = 8

    def get(self, k: int) -> float:
        if k < 2:
            raise ValueError("zeta(k) needs k >= 2")
        if k not in self.values:
            self.values[k] = _zeta_em(k, _DIRECT_TERMS, self.tail_terms)
        return self.values[k]

    @classmethod
    def build(cls, k_max: int, tail_terms: int = 8) -> "ZetaTable":
        table = cls(tail_terms=tail_terms)
        for k in range(2, k_max + 1):
            table.get(k)
        return table


DEFAULT_ZETA = ZetaTable.build(52)


def zeta(k: int, table: ZetaTable | None = None) -> float:
    return (table or DEFAULT_ZETA).get(k)


def li_many(k: int, pts: Sequence[complex]) -> np.ndarray:
    return np.array([li(k, p) for p in pts], dtype=complex)

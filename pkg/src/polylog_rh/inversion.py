"""Residuals of the polylogarithm inversion formula

    Li_k(z) + sum_{j=1}^{k-1} (-1)^j log^j(z) / j! * Li_{k-j}(z) + Li_{2,1,...,1}(1 - z) = zeta(k).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .domain import DomainError, DomainId, in_domain, log_power_term, require
from .specialfn import li, li21n, zeta


@dataclass(frozen=True)
class InversionResidual:
    k: int
    z: complex
    lhs: complex = complex("nan")
    residual: complex = complex("nan")
    terms: tuple[complex, ...] = field(default_factory=tuple)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def inversion_lhs(k: int, z) -> InversionResidual:
    if k < 2:
        raise ValueError("k must be >= 2")
    z = require(z, DomainId.CUT_PLANE_D)
    z = require(z, DomainId.CUT_PLANE_D_PRIME)
    terms = [li(k, z)]
    for j in range(1, k):
        terms.append(log_power_term(z, j) * li(k - j, z))
    terms.append(li21n(k, 1.0 - z))
    lhs = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    return InversionResidual(k=k, z=z, lhs=lhs, residual=lhs - zeta(k), terms=tuple(terms))


def default_grid() -> list[complex]:
    """Re z in 0.1..0.9 (step 0.1) by Im z in -2..2 (step 0.5)."""
    return [complex(round(0.1 * i, 10), round(0.5 * j, 10)) for i in range(1, 10) for j in range(-4, 5)]


def small_grid() -> list[complex]:
    """The 9-point grid {0.2, 0.5, 0.8} x {-0.5i, 0, 0.5i}."""
    return [complex(x, y) for x in (0.2, 0.5, 0.8) for y in (-0.5, 0.0, 0.5)]


def parse_threads(default: int = 1) -> int:
    raw = os.environ.get("POLYLOG_RH_THREADS")
    if raw is None:
        return default
    n = int(raw)
    if n < 1:
        raise ValueError("POLYLOG_RH_THREADS must be a positive integer")
    return n


def _one(k: int, z: complex) -> InversionResidual:
    if not in_domain(z, DomainId.STRIP):
        return InversionResidual(k=k, z=z, error=f"z={z} outside {DomainId.STRIP.description}")
    try:
        return inversion_lhs(k, z)
    except (DomainError, ArithmeticError) as exc:
        return InversionResidual(k=k, z=z, error=str(exc))


def residual_grid(k_max: int, grid: Sequence[complex], threads: int | None = None) -> list[InversionResidual]:
    """Residuals for k = 2..k_max over ``grid``, k-major then grid order.

    Points outside the strip are reported with an error marker instead of
    aborting the batch.
    """
    jobs = [(k, complex(z)) for k in range(2, k_max + 1) for z in grid]
    threads = threads or parse_threads()
    if threads == 1 or len(jobs) < 2:
        return [_one(k, z) for k, z in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: _one(*job), jobs))


def max_abs_residual(results: Sequence[InversionResidual]) -> float:
    vals = [abs(r.residual) for r in results if r.ok]
    return max(vals) if vals else 0.0


def lhs_derivative(k: int, z: complex, direction: complex = 1.0, h: float = 1e-4) -> complex:
    """Central difference of the left-hand side along ``direction``."""
    d = direction / abs(direction)
    up = inversion_lhs(k, z + h * d).lhs
    down = inversion_lhs(k, z - h * d).lhs
    return (up - down) / (2 * h)


__all__ = [
    "InversionResidual",
    "default_grid",
    "inversion_lhs",
    "lhs_derivative",
    "max_abs_residual",
    "residual_grid",
    "small_grid",
]

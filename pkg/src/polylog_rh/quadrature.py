"""Quadrature helpers shared by the evaluators and the Riemann-Hilbert engine."""

from __future__ import annotations

import functools
import heapq
import math
from fractions import Fraction
from typing import Callable

import numpy as np

_GL_ORDER = 15


class QuadratureError(RuntimeError):
    pass


@functools.lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def adaptive_gl(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    tol: float = 1e-14,
    rtol: float = 1e-15,
    max_panels: int = 2000,
) -> tuple[complex, float]:
    """Integrate a vectorised complex integrand over the real interval [lo, hi].

    Globally adaptive: the panel with the largest error estimate (difference
    between a 15-point Gauss-Legendre panel and its two halves) is bisected
    until the summed estimate drops below ``max(tol, rtol * |integral|)``.
    Returns ``(value, error_estimate)``.
    """
    if hi == lo:
        return 0j, 0.0
    x, w = gauss_legendre(_GL_ORDER)

    def panel(a, b):
        h = b - a
        return h * np.dot(w, f(a + h * x))

    def split(a, b, whole):
        m = 0.5 * (a + b)
        left, right = panel(a, m), panel(m, b)
        return (a, m, left), (m, b, right), abs(left + right - whole)

    # heap entries: (-error, left endpoint, right endpoint, value)
    heap: list = []
    counter = 0

    def push(a, b, value):
        nonlocal counter
        l, r, est = split(a, b, value)
        heapq.heappush(heap, (-est, counter, a, b, l[2] + r[2], l, r))
        counter += 1

    push(lo, hi, panel(lo, hi))
    n_panels = 1
    while True:
        err = -math.fsum(item[0] for item in heap)
        total = sum(item[4] for item in heap)
        if err <= max(tol, rtol * abs(total)):
            break
        neg, _, a, b, _, l, r = heapq.heappop(heap)
        if n_panels >= max_panels or l[1] in (a, b):
            heapq.heappush(heap, (neg, counter, a, b, l[2] + r[2], l, r))
            counter += 1
            if n_panels >= max_panels:
                raise QuadratureError(f"panel budget exceeded on [{lo}, {hi}] (error {err:.3g})")
            break
        push(*l)
        push(*r)
        n_panels += 1
    # summation order fixed by left endpoint for reproducibility
    items = sorted(heap, key=lambda item: item[2])
    total = complex(math.fsum(v[4].real for v in items), math.fsum(v[4].imag for v in items))
    return total, -math.fsum(v[0] for v in items)


def fixed_gl(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, panels: int, order: int = 20) -> complex:
    """Composite Gauss-Legendre with equal panels; deterministic and vectorised."""
    x, w = gauss_legendre(order)
    edges = np.linspace(lo, hi, panels + 1)
    h = np.diff(edges)
    pts = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    vals = f(pts).reshape(panels, order)
    return complex(np.sum(h * (vals @ w)))


@functools.lru_cache(maxsize=None)
def _interval_weights(m: int) -> np.ndarray:
    """W[s, i] = integral over [s, s+1] of the Lagrange basis L_i on nodes 0..m-1."""
    nodes = [Fraction(i) for i in range(m)]
    W = np.zeros((m - 1, m))
    for i in range(m):
        # coefficients of L_i, lowest degree first
        coeffs = [Fraction(1)]
        denom = Fraction(1)
        for j in range(m):
            if j == i:
                continue
            denom *= nodes[i] - nodes[j]
            new = [Fraction(0)] * (len(coeffs) + 1)
            for p, c in enumerate(coeffs):
                new[p] -= c * nodes[j]
                new[p + 1] += c
            coeffs = new
        coeffs = [c / denom for c in coeffs]
        anti = [Fraction(0)] + [c / (p + 1) for p, c in enumerate(coeffs)]
        for s in range(m - 1):
            val = sum(c * (Fraction(s + 1) ** p - Fraction(s) ** p) for p, c in enumerate(anti))
            W[s, i] = float(val)
    return W


def cumulative_uniform(values: np.ndarray, h: float, origin: int, order: int = 12) -> np.ndarray:
    """Running integral of samples on a uniform grid, zero at index ``origin``.

    Each cell [u_j, u_{j+1}] is integrated exactly for the degree ``order - 1``
    interpolant through the ``order`` nearest samples.
    """
    values = np.asarray(values)
    n = values.size
    if n < order:
        raise ValueError("grid shorter than interpolation stencil")
    W = _interval_weights(order)
    cells = np.empty(n - 1, dtype=values.dtype)
    half = order // 2
    for j in range(n - 1):
        start = min(max(j - half + 1, 0), n - order)
        cells[j] = h * np.dot(W[j - start], values[start:start + order])
    out = np.empty(n, dtype=values.dtype)
    out[origin] = 0.0
    if origin < n - 1:
        out[origin + 1:] = np.cumsum(cells[origin:])
    if origin > 0:
        out[:origin] = -np.cumsum(cells[:origin][::-1])[::-1]
    return out

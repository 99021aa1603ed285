"""Recursive additive Riemann-Hilbert reconstruction of Li_k from zeta(k).

Level k (k >= 2) knows Li_1 and the reconstructed f_j^+ for j < k.  The
functional relation on the strip 0 < Re z < 1,

    f_k^+ + sum_j (-1)^j log^j z / j! f_{k-j}^+ + f_k^- = zeta(k),

differentiates to f_k^+' + f_k^-' = g_k with the known jump derivative

    g_k(z) = f_{k-1}^+(z) / z - (-1)^{k-1} log^{k-1} z / ((k-1)! (1 - z)).

g_k decays like log^{k-1}|z| / |z| along the strip, so it splits by Cauchy
integrals over two vertical lines Re t = a < b:

    h_plus(z)  =  1/(2 pi i) int_{Re t = b} g_k(t) / (t - z) dt   (Re z < b)
    h_minus(z) = -1/(2 pi i) int_{Re t = a} g_k(t) / (t - z) dt   (Re z > a)

h_plus is f_k^+' and h_minus is f_k^-'.  Integrating from 0 (respectively 1)
and fixing the constants by the normalisation f_k^+(0) = 0 and by the
functional relation at a probe point gives f_k^+ and f_k^-.

Lines are parametrised as t = c + i sinh(u) and sampled on a uniform u grid.
Trapezoid sums for points close to a line (in the mapped variable) subtract
the pole of the Cauchy kernel first; its weight is the jump data itself, read
from the opposite line or interpolated locally along the line.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .domain import DomainError, DomainId, factorial, in_domain, log_power_term, log_power_terms
from .quadrature import adaptive_gl, cumulative_uniform, gauss_legendre
from .specialfn import li, li1, li21n, li_derivative, zeta


class ContourError(ValueError):
    pass


class AccuracyError(RuntimeError):
    pass


class LiouvilleCeilingError(RuntimeError):
    def __init__(self, message: str, reports: list["ReconstructionReport"]):
        super().__init__(message)
        self.reports = reports


class Rule(enum.Enum):
    TRAPEZOID_MAPPED = "trapezoid_mapped"
    GAUSS_LEGENDRE_PANELS = "gauss_legendre_panels"


class Mode(enum.Enum):
    PURE_RECURSIVE = "pure-recursive"
    ORACLE_JUMP = "oracle-jump"


# 2 pi Im(u*) / h beyond which the trapezoid error of the kernel pole,
# about 2 pi exp(-2 pi Im(u*) / h), falls below 1e-17
_CORRECTION_EXPONENT = -math.log(1e-17 / (2 * math.pi))


@dataclass(frozen=True)
class ContourSpec:
    abscissa: float
    u_max: float = 30.0
    nodes: int = 2048
    rule: Rule = Rule.TRAPEZOID_MAPPED

    def __post_init__(self):
        if not 0.0 < self.abscissa < 1.0:
            raise ContourError("contour abscissa must lie in (0, 1)")
        if self.u_max < 10:
            raise ContourError("u_max must be >= 10")
        if self.nodes < 64:
            raise ContourError("nodes must be >= 64")
        if self.rule is Rule.TRAPEZOID_MAPPED and self.nodes % 2:
            raise ContourError("trapezoid rule needs an even node count")
        if self.rule is Rule.GAUSS_LEGENDRE_PANELS and self.nodes % 16:
            raise ContourError("Gauss-Legendre panels need a node count divisible by 16")


DEFAULT_LEFT = ContourSpec(0.1)
DEFAULT_RIGHT = ContourSpec(0.9)

DEFAULT_TEST_POINTS = (0.5 + 0j, 0.3 + 0.5j, 0.7 - 0.5j, 0.4 + 1j, 0.6 - 1j)


TAIL_EXTENSION = 14.0


class MappedLine:
    """Samples of the vertical line Re t = c under t = c + i sinh(u).

    Trapezoid lines carry ``tail_nodes`` extra nodes at the same spacing
    beyond each end of [-u_max, u_max].  Data there come from the jump
    itself or from a fitted large-|t| model, so the truncation left over is
    the one at the extended end.
    """

    def __init__(self, spec: ContourSpec, tail_nodes: int | None = None):
        self.spec = spec
        self.c = spec.abscissa
        U, n = spec.u_max, spec.nodes
        if spec.rule is Rule.TRAPEZOID_MAPPED:
            self.h = 2.0 * U / n
            if tail_nodes is None:
                tail_nodes = 2 * math.ceil(TAIL_EXTENSION / (2 * self.h))
            self.tail_nodes = tail_nodes
            m = n // 2 + tail_nodes
            self.u = self.h * np.arange(-m, m + 1)
            self.w = np.full(self.u.size, self.h)
            self.w[[0, -1]] *= 0.5
            self.origin = m
        else:
            x, w = gauss_legendre(16)
            panels = n // 16
            edges = np.linspace(-U, U, panels + 1)
            width = np.diff(edges)
            self.u = (edges[:-1, None] + width[:, None] * x[None, :]).ravel()
            self.w = (width[:, None] * w[None, :]).ravel()
            self.h = None
            self.origin = None
            self.tail_nodes = 0
        self.t = self.c + 1j * np.sinh(self.u)
        self.dt = 1j * np.cosh(self.u)

    @property
    def corrected(self) -> bool:
        return self.h is not None

    def coarse(self) -> "MappedLine":
        """Same line with every other node (trapezoid) or half the panels."""
        spec = self.spec
        if self.corrected:
            return MappedLine(ContourSpec(spec.abscissa, spec.u_max, spec.nodes // 2, spec.rule), self.tail_nodes // 2)
        return MappedLine(ContourSpec(spec.abscissa, spec.u_max, max(64, spec.nodes // 2) // 16 * 16, spec.rule))

    def cauchy(self, g: np.ndarray, z, residue=None) -> np.ndarray:
        """1/(2 pi i) int_line g(t) / (t - z) dt for each z off the line.

        For points whose kernel pole sits close to the real u axis the sum
        runs over (g(t) - g(z) rho(t)/rho(z)) / (t - z) with
        rho(t) = 1/(t - p), p one unit across the line from z; the
        subtracted part integrates to +-g(z) exactly.  ``residue`` may
        supply g(z); otherwise it is interpolated locally from the samples.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        wdt = self.w * self.dt
        if not self.corrected:
            return ((wdt * g)[None, :] / (self.t[None, :] - z[:, None])).sum(axis=1) / (2j * math.pi)
        ustar = np.arcsinh(-1j * (z - self.c))
        near = 2 * math.pi * np.abs(ustar.imag) / self.h < _CORRECTION_EXPONENT
        out = np.empty(z.size, dtype=complex)
        far = ~near
        if far.any():
            zf = z[far]
            out[far] = ((wdt * g)[None, :] / (self.t[None, :] - zf[:, None])).sum(axis=1)
        if near.any():
            zn = z[near]
            if residue is None:
                r = self.continue_data(g, ustar[near])
            else:
                r = np.atleast_1d(np.asarray(residue, dtype=complex))[near]
            side = np.where(zn.real < self.c, 1.0, -1.0)
            pole = self.c + side
            ratio = (zn - pole)[:, None] / (self.t[None, :] - pole[:, None])
            smooth = (g[None, :] - r[:, None] * ratio) / (self.t[None, :] - zn[:, None])
            out[near] = (wdt[None, :] * smooth).sum(axis=1) + 2j * math.pi * side * r
        return out / (2j * math.pi)

    def continue_data(self, g: np.ndarray, us: np.ndarray, order: int = 12) -> np.ndarray:
        """Continue line samples to complex mapped points by local interpolation."""
        n = self.u.size
        pos = (us.real - self.u[0]) / self.h
        start = np.clip(np.floor(pos).astype(int) - order // 2 + 1, 0, n - order)
        idx = start[:, None] + np.arange(order)[None, :]
        x = (us[:, None] - self.u[idx]) / self.h
        exact = np.abs(x) < 1e-14
        bw = _bary_weights(order)[None, :] / np.where(exact, 1.0, x)
        vals = (bw * g[idx]).sum(axis=1) / bw.sum(axis=1)
        rows, cols = np.nonzero(exact)
        vals[rows] = g[idx[rows, cols]]
        return vals


@functools.lru_cache(maxsize=None)
def _bary_weights(m: int) -> np.ndarray:
    """Barycentric weights for equispaced nodes: (-1)^j binom(m-1, j)."""
    return np.array([(-1) ** j * math.comb(m - 1, j) for j in range(m)], dtype=float)


# --- function handles ------------------------------------------------------


@dataclass(frozen=True)
class FunctionHandle:
    """A vectorised holomorphic function with its domain of validity.

    ``domain`` names the analytic domain; ``region`` (when given) is the
    stricter set where the numerical representation may be evaluated.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    domain: DomainId
    label: str
    region: Callable[[complex], bool] | None = None

    def admits(self, z: complex) -> bool:
        if not in_domain(z, self.domain):
            return False
        return self.region is None or self.region(z)

    def __call__(self, z):
        arr = np.asarray(z, dtype=complex)
        for p in np.atleast_1d(arr).ravel():
            if not self.admits(complex(p)):
                raise DomainError(f"{self.label}: z={complex(p)} outside its domain")
        out = np.asarray(self.eval(np.atleast_1d(arr)), dtype=complex)
        return complex(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def handle(fn, domain: DomainId, label: str, region=None, vectorized: bool = False) -> FunctionHandle:
    """Wrap a callable as a FunctionHandle; scalar callables are mapped pointwise."""
    if vectorized:
        return FunctionHandle(fn, domain, label, region)

    def vec(z):
        return np.array([fn(complex(p)) for p in z], dtype=complex)

    return FunctionHandle(vec, domain, label, region)


ZERO = handle(lambda z: np.zeros_like(z), DomainId.STRIP, "0", vectorized=True)


# --- jump data -------------------------------------------------------------


def log_jump(k: int, z: np.ndarray) -> np.ndarray:
    """(-1)^{k-1} log^{k-1} z / ((k-1)! (1 - z)), the D(-) part of the jump."""
    z = np.asarray(z, dtype=complex)
    return log_power_terms(z, k - 1) / (1.0 - z)


def jump_derivative(k: int, prior: Sequence[FunctionHandle] | None = None) -> FunctionHandle:
    """g_k(z) = f_{k-1}^+(z)/z - (-1)^{k-1} log^{k-1}(z) / ((k-1)! (1 - z)) on the strip.

    ``prior`` holds the handles f_2^+, ..., f_{k-1}^+.  When it is empty or
    omitted, Li_{k-1} comes from the reference evaluators (Li_1 is always the
    base datum).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if prior and len(prior) != k - 2:
        raise ValueError(f"level {k} expects {k - 2} prior handles, got {len(prior)}")
    if k == 2:
        lower = handle(li1, DomainId.CUT_PLANE_D, "Li_1")
    elif prior:
        lower = prior[-1]
    else:
        lower = handle(lambda z: li(k - 1, z), DomainId.CUT_PLANE_D, f"Li_{k - 1}")

    def g(z):
        return lower(z) / z - log_jump(k, z)

    return FunctionHandle(g, DomainId.STRIP, f"g'_{k}[{lower.label}]")


# --- the split -------------------------------------------------------------


@dataclass
class SplitResult:
    h_plus: FunctionHandle
    h_minus: FunctionHandle
    quadrature_error_estimate: float
    tail_estimate: float
    left: MappedLine = field(repr=False)
    right: MappedLine = field(repr=False)
    g_left: np.ndarray = field(repr=False)
    g_right: np.ndarray = field(repr=False)
    source: FunctionHandle = field(repr=False)

    @property
    def budget(self) -> float:
        return self.quadrature_error_estimate + self.tail_estimate

    def plus_raw(self, z, residue=None) -> np.ndarray:
        return self.right.cauchy(self.g_right, z, residue)

    def minus_raw(self, z, residue=None) -> np.ndarray:
        return -self.left.cauchy(self.g_left, z, residue)


def _diagnostic_points(a: float, b: float) -> np.ndarray:
    xs = [a + 0.05, a + 0.25 * (b - a), 0.5 * (a + b), b - 0.25 * (b - a), b - 0.05]
    ys = [-2.0, -1.0, -0.25, 0.0, 0.25, 1.0, 2.0]
    return np.array([complex(x, y) for x in xs for y in ys])


def _tail_bound(g: np.ndarray, line: MappedLine, z: np.ndarray, p: int) -> float:
    """Bound on the truncated Cauchy integral beyond the last node.

    Assumes |g(t)| <= C log^p|t| / |t| beyond the last node, so the mapped
    integrand decays like u^p exp(-u).
    """
    U = float(line.u[-1])
    series = sum(math.factorial(p) / math.factorial(p - j) / U**j for j in range(p + 1))
    total = 0.0
    for idx in (0, -1):
        t = line.t[idx]
        kern = np.abs(line.dt[idx] / (t - z)).max()
        total += abs(g[idx]) * kern * series
    return total / (2 * math.pi)


def plemelj_split(
    h: FunctionHandle,
    left: ContourSpec = DEFAULT_LEFT,
    right: ContourSpec = DEFAULT_RIGHT,
    decay_power: int = 8,
    tol: float | None = None,
) -> SplitResult:
    """Split h on the strip into pieces holomorphic left of b and right of a.

    The reported ``quadrature_error_estimate`` is the largest change of
    h_plus or h_minus between the full node set and a half-density one over
    a fixed set of points of the substrip; ``tail_estimate`` bounds the
    truncation beyond the last node under the declared decay class.
    """
    a, b = left.abscissa, right.abscissa
    if not a < b:
        raise ContourError("contour abscissas must satisfy a < b")
    if not 0 <= decay_power <= 8:
        raise ValueError("decay power must lie in [0, 8]")
    L, R = MappedLine(left), MappedLine(right)
    g_left = np.asarray(h(L.t), dtype=complex)
    g_right = np.asarray(h(R.t), dtype=complex)

    diag = _diagnostic_points(a, b)
    Lc, Rc = L.coarse(), R.coarse()
    g_left_c = g_left[::2] if L.corrected else np.asarray(h(Lc.t), dtype=complex)
    g_right_c = g_right[::2] if R.corrected else np.asarray(h(Rc.t), dtype=complex)
    d_plus = np.abs(R.cauchy(g_right, diag) - Rc.cauchy(g_right_c, diag)).max()
    d_minus = np.abs(L.cauchy(g_left, diag) - Lc.cauchy(g_left_c, diag)).max()
    scale = max(np.abs(g_left).max(), np.abs(g_right).max(), 1.0)
    quad_err = float(max(d_plus, d_minus) + 1e-14 * scale)
    tail = _tail_bound(g_left, L, diag, decay_power) + _tail_bound(g_right, R, diag, decay_power)
    if tol is not None and quad_err + tail > tol:
        raise AccuracyError(
            f"split error budget {quad_err + tail:.3g} exceeds tolerance {tol:.3g}; "
            "increase nodes or u_max"
        )

    h_plus = FunctionHandle(
        lambda z: R.cauchy(g_right, z), DomainId.HALF_PLANE_PLUS, f"split+[{h.label}]", lambda z: z.real < b
    )
    h_minus = FunctionHandle(
        lambda z: -L.cauchy(g_left, z), DomainId.HALF_PLANE_MINUS, f"split-[{h.label}]", lambda z: z.real > a
    )
    return SplitResult(h_plus, h_minus, quad_err, tail, L, R, g_left, g_right, h)


def identify_liouville(split: SplitResult, k: int, test_points: Sequence[complex]) -> float:
    """max |h_plus - Li_k'| over the test points (0 for an empty set)."""
    if len(test_points) == 0:
        return 0.0
    pts = np.asarray(test_points, dtype=complex)
    got = split.h_plus(pts)
    ref = np.array([li_derivative(k, p) for p in pts])
    return float(np.abs(got - ref).max())


# --- antiderivatives -------------------------------------------------------


class _Primitive:
    """z -> anchor_value + int_anchor^z piece(s) ds along the straight segment.

    Values at contour nodes, when known, are served from a cache.
    """

    def __init__(self, piece: FunctionHandle, anchor: complex, tol: float = 1e-13):
        self.piece = piece
        self.anchor = anchor
        self.tol = tol
        self.offset = 0j
        self.cache: dict[complex, complex] = {}

    def raw(self, z: complex) -> complex:
        z = complex(z)
        if z == self.anchor:
            return 0j
        d = z - self.anchor

        def integrand(tau):
            return self.piece(self.anchor + tau * d) * d

        # long segments are integrated in two pieces so the near end keeps
        # its resolution
        length = abs(d)
        if length > 4.0:
            cut = 2.0 / length
            v1, _ = adaptive_gl(integrand, 0.0, cut, tol=self.tol)
            v2, _ = adaptive_gl(lambda s: integrand(np.exp(s)) * np.exp(s), math.log(cut), 0.0, tol=self.tol)
            return v1 + v2
        value, _ = adaptive_gl(integrand, 0.0, 1.0, tol=self.tol)
        return value

    def __call__(self, z: np.ndarray) -> np.ndarray:
        out = np.empty(z.shape, dtype=complex)
        for i, p in enumerate(z.ravel()):
            p = complex(p)
            hit = self.cache.get(p)
            out.flat[i] = hit if hit is not None else self.raw(p) + self.offset
        return out


def antiderivative_plus(split: SplitResult, k: int) -> tuple[FunctionHandle, complex]:
    """f_k^+ = int_0^z h_plus + c_plus with c_plus fixed by f_k^+(0) = 0."""
    prim = _Primitive(split.h_plus, 0j)
    c_plus = -prim.raw(0j)
    prim.offset = c_plus
    b = split.right.c
    fh = FunctionHandle(prim, DomainId.HALF_PLANE_PLUS, f"f+_{k}", lambda z: z.real < b)
    return fh, c_plus


def antiderivative_minus(split: SplitResult, k: int) -> FunctionHandle:
    """Raw f_k^- = int_1^z h_minus (before the constant is fixed)."""
    prim = _Primitive(split.h_minus, 1 + 0j)
    a = split.left.c
    return FunctionHandle(prim, DomainId.HALF_PLANE_MINUS, f"f-_{k}", lambda z: z.real > a)


def fix_c_minus(
    k: int,
    f_plus: FunctionHandle,
    f_minus_raw: FunctionHandle,
    zeta_k: float,
    probe: complex = 0.5,
    lower: Sequence[FunctionHandle] | None = None,
) -> complex:
    """Constant making the functional relation hold at ``probe``.

    ``lower`` supplies f_1^+, ..., f_{k-1}^+; by default the reference Li_j.
    """
    probe = complex(probe)
    total = complex(f_plus(probe)) + complex(f_minus_raw(probe))
    for j in range(1, k):
        if lower:
            val = complex(lower[k - j - 1](probe))
        else:
            val = li(k - j, probe)
        total += log_power_term(probe, j) * val
    return zeta_k - total


def shift(fh: FunctionHandle, c: complex, label: str | None = None) -> FunctionHandle:
    prim = fh.eval
    if isinstance(prim, _Primitive):
        prim.offset = prim.offset + c
        for key in prim.cache:
            prim.cache[key] += c
        return FunctionHandle(prim, fh.domain, label or fh.label, fh.region)
    return FunctionHandle(lambda z: fh.eval(z) + c, fh.domain, label or fh.label, fh.region)


# --- recursion -------------------------------------------------------------


@dataclass
class ReconstructionReport:
    k: int
    c_plus: complex
    c_minus: complex
    sample_errors_plus: list[tuple[complex, float]]
    sample_errors_minus: list[tuple[complex, float]]
    liouville_defect: float
    quadrature_error_estimate: float
    tail_estimate: float
    mode: str

    @property
    def max_error_plus(self) -> float:
        return max((e for _, e in self.sample_errors_plus), default=0.0)

    @property
    def max_error_minus(self) -> float:
        return max((e for _, e in self.sample_errors_minus), default=0.0)

    @property
    def max_sample_error(self) -> float:
        return max(self.max_error_plus, self.max_error_minus)


@dataclass
class Level:
    """Reconstructed pieces of one recursion level."""

    k: int
    split: SplitResult
    f_plus: FunctionHandle
    f_minus: FunctionHandle
    c_plus: complex
    c_minus: complex
    plus_on_left: np.ndarray
    plus_on_right: np.ndarray


def _line_primitive(line: MappedLine, derivative_on_line: np.ndarray, start_value: complex) -> np.ndarray:
    """Values of a primitive along the line, given its derivative there."""
    integrand = derivative_on_line * line.dt
    return start_value + cumulative_uniform(integrand, line.h, line.origin)


def _check_substrip(points: Sequence[complex], a: float, b: float) -> None:
    for p in points:
        if not (a + 0.05 <= p.real <= b - 0.05):
            raise DomainError(f"test point {p} outside the substrip [{a + 0.05}, {b - 0.05}]")


def reconstruct_level(
    k: int,
    lower: Sequence[FunctionHandle],
    lower_nodes: Sequence[tuple[np.ndarray, np.ndarray]] | None,
    left: ContourSpec,
    right: ContourSpec,
    probe: complex = 0.5,
    jump: FunctionHandle | None = None,
) -> Level:
    """One level of the recursion.

    ``lower`` are f_1^+ .. f_{k-1}^+; ``lower_nodes`` their values on the
    (left, right) contour nodes, or None to evaluate the handles there.
    """
    if left.rule is not Rule.TRAPEZOID_MAPPED or right.rule is not Rule.TRAPEZOID_MAPPED:
        raise ContourError("the recursion needs the mapped trapezoid rule")
    if jump is None:
        jump = jump_derivative(k, list(lower[1:]))
    split = plemelj_split(jump, left, right, decay_power=min(k - 1, 8))
    L, R = split.left, split.right
    f_plus, c_plus = antiderivative_plus(split, k)
    f_minus_raw = antiderivative_minus(split, k)

    # f_k^+ along the left line: integrate h_plus up and down from t = a
    plus_left = _line_primitive(L, split.plus_raw(L.t, split.g_left), complex(f_plus(complex(L.c))))
    # f_k^- along the right line, before its constant is fixed
    minus_right = _line_primitive(R, split.minus_raw(R.t, split.g_right), complex(f_minus_raw(complex(R.c))))

    c_minus = fix_c_minus(k, f_plus, f_minus_raw, zeta(k), probe, lower)
    f_minus = shift(f_minus_raw, c_minus)

    # across the right line f_k^+ is continued by the functional relation
    if lower_nodes is None:
        lower_right = [np.asarray(fh(R.t)) for fh in lower]
    else:
        lower_right = [nodes[1] for nodes in lower_nodes]
    plus_right = zeta(k) - (minus_right + c_minus)
    for j in range(1, k):
        plus_right = plus_right - log_power_terms(R.t, j) * lower_right[k - j - 1]

    prim = f_plus.eval
    prim.cache.update(zip(L.t.tolist(), plus_left.tolist()))
    prim.cache.update(zip(R.t.tolist(), plus_right.tolist()))
    return Level(k, split, f_plus, f_minus, c_plus, c_minus, plus_left, plus_right)


def reconstruct_all(
    k_max: int,
    contours: tuple[ContourSpec, ContourSpec] = (DEFAULT_LEFT, DEFAULT_RIGHT),
    test_points: Sequence[complex] = DEFAULT_TEST_POINTS,
    mode: Mode | str = Mode.PURE_RECURSIVE,
    ceiling: float = 1e-4,
    probe: complex = 0.5,
    levels_out: list | None = None,
) -> list[ReconstructionReport]:
    """Reconstruct f_k^+ = Li_k and f_k^- = Li_{2,1,...,1}(1 - z) for k = 2..k_max."""
    mode = Mode(mode)
    left, right = contours
    a, b = left.abscissa, right.abscissa
    if not a < b:
        raise ContourError("contour abscissas must satisfy a < b")
    pts = [complex(p) for p in test_points]
    _check_substrip(pts, a, b)
    if k_max < 2:
        return []
    base = handle(li1, DomainId.CUT_PLANE_D, "Li_1")
    L0, R0 = MappedLine(left), MappedLine(right)
    lower: list[FunctionHandle] = [base]
    lower_nodes = [(li1_vec(L0.t), li1_vec(R0.t))]
    reports: list[ReconstructionReport] = []
    for k in range(2, k_max + 1):
        if mode is Mode.ORACLE_JUMP:
            jump = jump_derivative(k)
            ref_lower = [base] + [handle(lambda z, j=j: li(j, z), DomainId.CUT_PLANE_D, f"Li_{j}") for j in range(2, k)]
            level = reconstruct_level(k, ref_lower, None, left, right, probe, jump)
        else:
            jump = FunctionHandle(_node_jump(k, lower[-1], lower_nodes[-1], L0, R0), DomainId.STRIP, f"g'_{k}")
            level = reconstruct_level(k, lower, lower_nodes, left, right, probe, jump)
        if levels_out is not None:
            levels_out.append(level)
        defect = identify_liouville(level.split, k, pts)
        plus_err = [(p, abs(complex(level.f_plus(p)) - li(k, p))) for p in pts]
        minus_err = [(p, abs(complex(level.f_minus(p)) - li21n(k, 1 - p))) for p in pts]
        reports.append(
            ReconstructionReport(
                k=k,
                c_plus=level.c_plus,
                c_minus=level.c_minus,
                sample_errors_plus=plus_err,
                sample_errors_minus=minus_err,
                liouville_defect=defect,
                quadrature_error_estimate=level.split.quadrature_error_estimate,
                tail_estimate=level.split.tail_estimate,
                mode=mode.value,
            )
        )
        if not math.isfinite(defect) or defect > ceiling:
            raise LiouvilleCeilingError(
                f"level {k}: liouville defect {defect:.3g} exceeds ceiling {ceiling:.3g}", reports
            )
        lower.append(level.f_plus)
        lower_nodes.append(
            (tame_far_nodes(level.plus_on_left, L0, k), tame_far_nodes(level.plus_on_right, R0, k))
        )
    return reports


_FIT_WINDOW = (12.0, 20.0)


def tame_far_nodes(values: np.ndarray, line: MappedLine, degree: int,
                   window: tuple[float, float] = _FIT_WINDOW) -> np.ndarray:
    """Replace node values beyond ``window`` by a fitted large-|t| model.

    Far along a line the truncated Cauchy integrals lose accuracy, while
    Li_k(t) there is a polynomial of degree k in log t plus O(1/t).  That
    model is fitted by least squares on ``window`` (in |u|) at each end and
    used in place of the node data further out.
    """
    out = np.array(values, dtype=complex)
    lo, hi = window
    s = np.log(line.t)
    for sign in (1.0, -1.0):
        su = sign * line.u
        fit = (su >= lo) & (su <= hi)
        far = su > hi
        if not far.any():
            continue

        def basis(idx):
            cols = [s[idx] ** j for j in range(degree + 1)]
            cols += [1.0 / line.t[idx], 1.0 / line.t[idx] ** 2]
            return np.stack(cols, axis=1)

        A = basis(fit)
        scale = np.abs(A).max(axis=0)
        coef, *_ = np.linalg.lstsq(A / scale, out[fit], rcond=None)
        out[far] = (basis(far) / scale) @ coef
    return out


def li1_vec(t: np.ndarray) -> np.ndarray:
    return np.array([li1(p) for p in t], dtype=complex)


def _node_jump(k, f_prev: FunctionHandle, nodes_prev, L: MappedLine, R: MappedLine):
    """Jump derivative that reads f_{k-1}^+ from contour node values when it can."""
    table = dict(zip(L.t.tolist(), nodes_prev[0].tolist()))
    table.update(zip(R.t.tolist(), nodes_prev[1].tolist()))

    def g(z):
        vals = np.empty(z.shape, dtype=complex)
        for i, p in enumerate(z.ravel()):
            p = complex(p)
            hit = table.get(p)
            vals.flat[i] = hit if hit is not None else complex(f_prev(p))
        return vals / z - log_jump(k, z)

    return g

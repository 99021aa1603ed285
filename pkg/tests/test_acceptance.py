"""Acceptance gate: one PASS/FAIL line per criterion, printed in the terminal summary."""

import filecmp
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from polylog_rh import cli, rh_engine as rh
from polylog_rh.inversion import default_grid, max_abs_residual, residual_grid, small_grid
from polylog_rh.specialfn import li, li21n, li_derivative, zeta


def verdict(n: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({detail})")


def test_c1_inversion_identity():
    start = time.perf_counter()
    nine = residual_grid(6, small_grid(), threads=1)
    full = residual_grid(6, default_grid(), threads=1)
    elapsed = time.perf_counter() - start
    worst9, worst81 = max_abs_residual(nine), max_abs_residual(full)
    ok = len(nine) == 45 and worst9 <= 1e-9 and worst81 <= 1e-9 and elapsed <= 60
    verdict(1, "inversion identity k=2..6", ok,
            f"45 residuals max {worst9:.2e}, 81-point grid max {worst81:.2e}, {elapsed:.1f}s")
    assert ok


def test_c2_boundary_value():
    gaps = {k: [abs(li(k, 1 - eps) - zeta(k)) for eps in (1e-1, 1e-2, 1e-3)] for k in range(2, 7)}
    ok = all(g[0] > g[1] > g[2] for g in gaps.values())
    verdict(2, "|li(k,1-eps) - zeta(k)| decreasing", ok, f"k=6 gaps {', '.join(f'{g:.2e}' for g in gaps[6])}")
    assert ok


def test_c3_derivative_law():
    rng = np.random.default_rng(3)
    pts = rng.uniform(0.05, 0.95, 50) + 1j * rng.uniform(-2, 2, 50)
    h = 1e-5
    worst = 0.0
    for k in range(2, 6):
        for z in pts:
            fd = (li(k, z + h) - li(k, z - h)) / (2 * h)
            exact = li_derivative(k, z)
            worst = max(worst, abs(fd - exact) / abs(exact))
    ok = worst <= 1e-8
    verdict(3, "finite-difference derivative law", ok, f"max relative error {worst:.2e}")
    assert ok


def test_c4_duality_limit():
    gaps = [abs(li21n(k, 1 - 1e-6) - zeta(k)) for k in range(2, 7)]
    ok = max(gaps) <= 1e-5
    verdict(4, "|li21n(k,1-1e-6) - zeta(k)| <= 1e-5", ok, "gaps " + ", ".join(f"{g:.2e}" for g in gaps))
    assert ok


def test_c5_split_identity():
    rng = np.random.default_rng(5)
    z = rng.uniform(0.15, 0.85, 100) + 1j * rng.uniform(-3, 3, 100)
    jumps = [
        (rh.ZERO, 8),
        (rh.handle(lambda t: 1 / (t - 2), rh.DomainId.STRIP, "1/(z-2)", vectorized=True), 1),
        (rh.handle(lambda t: 1 / (t + 1), rh.DomainId.STRIP, "1/(z+1)", vectorized=True), 1),
    ] + [(rh.jump_derivative(k), k - 1) for k in range(2, 6)]
    ratios = []
    for h, p in jumps:
        s = rh.plemelj_split(h, decay_power=p)
        gap = np.abs(s.h_plus(z) + s.h_minus(z) - h(z)).max()
        ratios.append(gap / s.budget)
    ok = max(ratios) <= 1.0
    verdict(5, "split identity within reported budget", ok, f"worst gap/budget {max(ratios):.2e}")
    assert ok


def test_c6_liouville():
    start = time.perf_counter()
    reports = rh.reconstruct_all(5, mode="pure-recursive")
    elapsed = time.perf_counter() - start
    defects = [r.liouville_defect for r in reports]
    ok = max(defects) <= 1e-6 and elapsed <= 300
    verdict(6, "Liouville defect k=2..5", ok, "defects " + ", ".join(f"{d:.1e}" for d in defects) + f", {elapsed:.1f}s")
    assert ok


def test_c7_end_to_end(pure_run):
    reports, _ = pure_run
    plus = max(r.max_error_plus for r in reports)
    minus = max(r.max_error_minus for r in reports)
    cp = max(abs(r.c_plus) for r in reports)
    cm = max(abs(r.c_minus) for r in reports)
    ok = plus <= 1e-5 and minus <= 1e-5 and cp <= 1e-12 and cm <= 1e-5
    verdict(7, "pure-recursive reconstruction to k=5", ok,
            f"f+ {plus:.1e}, f- {minus:.1e}, |c+| {cp:.1e}, |c-| {cm:.1e}")
    assert ok


GOLDENS = [
    ("li(2,1/2)", lambda: li(2, 0.5), 0.5822405264650125, 1e-12),
    ("li(2,-1)", lambda: li(2, -1), -0.8224670334241132, 1e-12),
    ("zeta(2)", lambda: zeta(2), 1.6449340668482264, 1e-14),
    ("zeta(3)", lambda: zeta(3), 1.2020569031595943, 1e-14),
]


def test_c8_goldens():
    misses = [(name, abs(fn() - ref)) for name, fn, ref, tol in GOLDENS]
    ok = all(err <= tol for (_, err), (_, _, _, tol) in zip(misses, GOLDENS))
    verdict(8, "known-value goldens", ok, ", ".join(f"{n} {e:.1e}" for n, e in misses))
    assert ok


def test_golden_oracles_are_independent():
    # brute-force alternating series with a tail bound for li(2,-1)
    n = np.arange(1, 2_000_001, dtype=float)
    partial = math.fsum((-1.0) ** n / n**2)
    assert abs(partial - GOLDENS[1][2]) <= 1 / 2_000_001**2 + 1e-15
    assert abs(math.pi**2 / 6 - GOLDENS[2][2]) <= 1e-15


def test_c9_determinism(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    codes = [cli.main(["reconstruct", "--k-max", "3", "--out", str(p)]) for p in (first, second)]
    ok = codes == [0, 0] and filecmp.cmp(first, second, shallow=False)
    verdict(9, "reconstruct --k-max 3 byte-identical", ok, f"exit codes {codes}")
    assert ok

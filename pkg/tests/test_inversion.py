import math

import pytest
from hypothesis import given, settings, strategies as st

from polylog_rh.domain import DomainError
from polylog_rh.inversion import (
    default_grid,
    inversion_lhs,
    lhs_derivative,
    max_abs_residual,
    parse_threads,
    residual_grid,
    small_grid,
)
from polylog_rh.specialfn import li, zeta


def test_k2_at_half():
    r = inversion_lhs(2, 0.5)
    assert abs(r.residual) <= 1e-10
    assert len(r.terms) == 3
    assert r.lhs == pytest.approx(sum(r.terms), abs=1e-15)


def test_terms_near_one():
    r = inversion_lhs(2, 1 - 1e-9)
    head, log_term, dual = r.terms
    assert abs(head - zeta(2)) < 1e-7
    assert abs(log_term) < 1e-7 and abs(dual) < 1e-7


def test_k5_off_axis():
    assert abs(inversion_lhs(5, 0.3 + 0.4j).residual) <= 1e-9


def test_domain_errors():
    with pytest.raises(DomainError):
        inversion_lhs(3, -0.5)
    with pytest.raises(DomainError):
        inversion_lhs(3, 1.5)
    with pytest.raises(ValueError):
        inversion_lhs(1, 0.5)


def test_grid_shapes():
    assert len(default_grid()) == 81
    assert len(small_grid()) == 9
    assert residual_grid(4, []) == []
    res = residual_grid(2, [0.5])
    assert len(res) == 1 and abs(res[0].residual) <= 1e-10


def test_small_grid_all_k():
    res = residual_grid(6, small_grid())
    assert len(res) == 45
    assert [r.k for r in res[:9]] == [2] * 9
    assert max_abs_residual(res) <= 1e-9


def test_bad_points_are_marked_not_fatal():
    res = residual_grid(2, [0.5, 1.5 + 0.2j, -0.1])
    assert [r.ok for r in res] == [True, False, False]
    assert "outside" in res[1].error
    assert max_abs_residual(res) <= 1e-10


def test_threaded_grid_matches_serial(monkeypatch):
    serial = residual_grid(3, small_grid(), threads=1)
    monkeypatch.setenv("POLYLOG_RH_THREADS", "4")
    assert parse_threads() == 4
    threaded = residual_grid(3, small_grid())
    assert [r.lhs for r in serial] == [r.lhs for r in threaded]


def test_parse_threads_rejects_nonpositive(monkeypatch):
    monkeypatch.setenv("POLYLOG_RH_THREADS", "0")
    with pytest.raises(ValueError):
        parse_threads()


strip_points = st.builds(complex, st.floats(0.1, 0.9), st.floats(-2, 2))


@settings(max_examples=25, deadline=None)
@given(strip_points, st.integers(2, 6))
def test_identity_holds_on_strip(z, k):
    assert abs(inversion_lhs(k, z).residual) <= 1e-9


@settings(max_examples=10, deadline=None)
@given(strip_points, st.integers(2, 5), st.floats(0, 2 * math.pi))
def test_lhs_is_constant(z, k, angle):
    d = complex(math.cos(angle), math.sin(angle))
    assert abs(lhs_derivative(k, z, d)) <= 1e-7


@settings(max_examples=15, deadline=None)
@given(strip_points, st.integers(2, 5))
def test_residual_conjugation(z, k):
    r, rc = inversion_lhs(k, z).residual, inversion_lhs(k, z.conjugate()).residual
    assert abs(rc - r.conjugate()) <= 2e-15 * k

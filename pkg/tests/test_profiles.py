import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xizeros.profiles import (CoefficientSequence, delta_coefficients,
                              delta_sequence, eval_phi, eval_phi_F,
                              eval_phi_tilde_F, phi_tail_bound,
                              vanishing_order)


def expand(factors, N):
    """Polynomial product by plain convolution, truncated at degree N."""
    out = np.zeros(N + 1, dtype=object)
    out[0] = 1
    for f in factors:
        out = np.convolve(out, np.array(f, dtype=object))[:N + 1]
    return [int(c) for c in out]


def test_delta_coefficients_small():
    assert delta_coefficients(0) == [1]
    assert delta_coefficients(1) == [1, -12]
    assert delta_coefficients(3) == [1, -12, 54, -88]
    assert delta_coefficients(4) == [1, -12, 54, -88, -99]


@pytest.mark.parametrize("N", [5, 10, 20])
def test_delta_coefficients_against_convolution(N):
    factors = []
    for k in range(1, N + 1):
        base = [1] + [0] * (k - 1) + [-1]
        factors += [base] * 12
    assert delta_coefficients(N) == expand(factors, N)


def test_delta_coefficients_square_gives_tau():
    # squaring prod (1-q^k)^12 gives prod (1-q^k)^24, whose coefficients are
    # the Ramanujan tau values tau(1..6)
    c = delta_coefficients(6)
    sq = np.convolve(c, c)[:6]
    assert list(sq) == [1, -24, 252, -1472, 4830, -6048]


def test_delta_coefficients_errors(monkeypatch):
    with pytest.raises(ValueError):
        delta_coefficients(-1)
    # the true 64-bit limit is only reached near N ~ 8000; shrink it
    monkeypatch.setattr("xizeros.profiles.INT64_MAX", 1000)
    with pytest.raises(OverflowError):
        delta_coefficients(10)


@pytest.mark.parametrize("coeffs, k", [([1], 0), ([1, -1], 1), ([1, -2, 1], 2),
                                       ([2, 1], 0), ([1, 0, -1], 1),
                                       ([1, -3, 3, -1], 3)])
def test_vanishing_order(coeffs, k):
    assert vanishing_order(coeffs) == k
    assert CoefficientSequence(coeffs).k == k


def test_vanishing_order_delta_sequences():
    # P(1) for F^(N) is a nonzero integer of modest size at every N tested
    for N in range(0, 20):
        F = delta_sequence(N)
        assert F.poly_at_one(0) != 0
        assert F.k == 0


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=5),
       st.integers(0, 3))
@settings(max_examples=100, deadline=None)
def test_vanishing_order_multiplies(base, j):
    if not any(base) or sum(base) == 0:
        return
    poly = np.array(base[::-1], dtype=object)  # numpy order: high first
    for _ in range(j):
        poly = np.polymul(poly, np.array([1, -1], dtype=object))
    coeffs = [int(c) for c in poly[::-1]]
    assert vanishing_order(coeffs) == j


def test_coefficient_sequence_validation():
    with pytest.raises(ValueError):
        CoefficientSequence([])
    with pytest.raises(ValueError):
        CoefficientSequence([0, 0])
    with pytest.raises(ValueError):
        CoefficientSequence([[1, 2, 3]])


def test_json_round_trip():
    F = CoefficientSequence([1, [0.5, -2.0], -3])
    G = CoefficientSequence.from_json(F.to_json())
    assert G == F
    assert G.coeffs[1] == complex(0.5, -2.0)
    with pytest.raises(ValueError):
        CoefficientSequence.from_json("[1, 2]")


def test_phi_F_one_is_cosh_envelope():
    t = np.linspace(-3, 3, 13)
    assert np.allclose(eval_phi_F(CoefficientSequence([1]), t),
                       np.exp(-2 * math.pi * np.cosh(t)), rtol=1e-15)


def test_phi_F_tilde_ratio():
    F = CoefficientSequence([1, -1])
    t = np.array([-1.2, 0.0, 0.7])
    assert np.allclose(eval_phi_tilde_F(F, t) * 2 * np.cosh(t / 2),
                       eval_phi_F(F, t), rtol=1e-14)


def test_phi_F_conjugate_symmetry():
    F = CoefficientSequence([1, [0.3, 0.8], -2])
    t = np.linspace(-2, 2, 9)
    assert np.allclose(eval_phi_F(F, -t), np.conj(eval_phi_F(F, t)),
                       rtol=1e-13, atol=0)


@pytest.mark.parametrize("t", [-1.0, -0.2, 0.0, 0.5, 1.5])
def test_eval_phi_matches_infinite_product(t):
    mpmath.mp.dps = 30
    x, y = mpmath.e ** t, mpmath.e ** (-t)
    ref = mpmath.e ** (-2 * mpmath.pi * mpmath.cosh(t))
    for k in range(1, 80):
        ref *= ((1 - mpmath.e ** (-2 * mpmath.pi * k * x)) *
                (1 - mpmath.e ** (-2 * mpmath.pi * k * y))) ** 12
    got = eval_phi(t)
    assert abs(got - float(ref)) <= max(phi_tail_bound(t), 1e-14) * float(ref)


def test_phi_tail_bound_monotone():
    assert phi_tail_bound(0.0, 12) < phi_tail_bound(2.0, 12)
    assert phi_tail_bound(1.0, 20) < phi_tail_bound(1.0, 12)

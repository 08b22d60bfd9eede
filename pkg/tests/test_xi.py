import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import TEST_SEQUENCES, bessel_grid, bessel_mp
from xizeros.errors import DenominatorUncertifiedError, UnstableEstimateError
from xizeros.xi import (C_F, F_ratio, EvalContext, W_F, estimate_b_k,
                        growth_exponent, h, h_star_neg,
                        h_star_neg_by_conjugation, leading_ratio, xi_F)


def closed_form_b(F):
    """b_k = (-2 pi)^k / k! * conj(P^(k)(1)) from expanding the integrand
    around t = +infinity; used only as a test oracle."""
    k = F.k
    return (-2 * math.pi) ** k / math.factorial(k) * \
        F.poly_at_one(k).conjugate()


@pytest.mark.parametrize("tau", [0, 1, 2, 5, 10, 20, 30, 40])
def test_bessel_oracle_mpmath(ctx_one, tau):
    r = C_F(ctx_one, complex(0, tau))
    ref = bessel_mp(tau)
    assert abs(r.value - ref) <= max(1e-12 * abs(ref), 1e-30)
    assert abs(r.value - ref) <= 4 * r.err_estimate + 1e-300


@pytest.mark.parametrize("tau", [0, 1, 2, 5, 10])
def test_bessel_oracle_grid(ctx_one, tau):
    assert abs(xi_F(ctx_one, tau).value - bessel_grid(tau)) <= 1e-12


def test_xi_at_zero_positive(ctx_one):
    v = xi_F(ctx_one, 0).value
    assert v.real > 0 and v.imag == 0


def test_envelope():
    ctx = EvalContext.of([1])
    with pytest.raises(ValueError):
        xi_F(ctx, 1 + 21j)
    with pytest.raises(ValueError):
        C_F(ctx, 21 + 0j)


@given(st.floats(-30, 30))
@settings(max_examples=100, deadline=None)
def test_reality_on_line(tau):
    for coeffs in TEST_SEQUENCES.values():
        r = C_F(EvalContext.of(coeffs), complex(0, tau))
        assert abs(r.value.imag) <= 2 * r.err_estimate


def test_xi_conjugate_symmetry(any_ctx):
    for s in (0.4 + 1.1j, -7 - 3j, 12 + 0.5j):
        a = xi_F(any_ctx, s)
        b = xi_F(any_ctx, s.conjugate())
        assert abs(a.value - b.value.conjugate()) <= \
            2 * (a.err_estimate + b.err_estimate)


def test_C_reflection(any_ctx):
    for s in (0.7 + 3j, -1.5 + 8j):
        a = C_F(any_ctx, s)
        b = C_F(any_ctx, -s.conjugate())
        assert abs(b.value - a.value.conjugate()) <= \
            2 * (a.err_estimate + b.err_estimate)


def test_W_real_on_real_axis(any_ctx):
    for x in (0.0, 3.3, -12.0):
        r = W_F(any_ctx, x)
        assert abs(r.value.imag) <= 2 * r.err_estimate + 1e-300


def test_W_at_zero_direct(ctx_one):
    t = np.arange(-7, 7 + 0.002, 0.004)
    ref = 0.004 * np.sum(np.exp(-2 * math.pi * np.cosh(t)) / (2 * np.cosh(t / 2)))
    assert W_F(ctx_one, 0).value.real == pytest.approx(ref, rel=1e-12)


def test_decomposition_grid(any_ctx):
    worst = 0.0
    for x in np.linspace(-1, 1, 5):
        for y in np.linspace(-5, 5, 5):
            s = complex(x, y)
            c, a, b = C_F(any_ctx, s), h(any_ctx, s), h_star_neg(any_ctx, s)
            err = max(c.err_estimate, a.err_estimate, b.err_estimate)
            assert abs(c.value - a.value - b.value) <= 4 * err
            worst = max(worst, abs(c.value - a.value - b.value))


def test_h_star_two_routes(any_ctx):
    for s in (0, 1 + 1j, -0.5 + 7j):
        a = h_star_neg(any_ctx, s)
        b = h_star_neg_by_conjugation(any_ctx, s)
        assert abs(a.value - b.value) <= 2 * (a.err_estimate + b.err_estimate)


def test_h_substitution(ctx_one):
    assert h(ctx_one, 4j).value == W_F(ctx_one, 4 - 0.5j).value


def test_F_ratio_unit_modulus_on_line(any_ctx):
    assert abs(F_ratio(any_ctx, 0)) == pytest.approx(1, abs=1e-9)
    for tau in (3.0, 11.0, -6.5):
        assert abs(F_ratio(any_ctx, complex(0, tau))) == pytest.approx(1, abs=1e-8)


def test_F_ratio_below_one_right_of_line(ctx_one):
    assert abs(F_ratio(ctx_one, 3 + 10j)) < 1


def test_F_ratio_uncertified_denominator(monkeypatch):
    ctx = EvalContext.of([1])
    from xizeros import xi
    from xizeros.numerics import QuadratureResult
    monkeypatch.setattr(xi, "h", lambda c, s: QuadratureResult(1e-20, 1e-20, 1,
                                                              True))
    with pytest.raises(DenominatorUncertifiedError):
        xi.F_ratio(ctx, 1.0)


def test_growth_exponent():
    assert growth_exponent(0) == 1
    assert growth_exponent(0.25) == 0.75
    assert growth_exponent(1) == 0
    assert growth_exponent(2.5) == 0
    with pytest.raises(ValueError):
        growth_exponent(-0.1)


def test_b0_for_single_term(ctx_one):
    est = estimate_b_k(ctx_one, 1.0, [10, 15, 20, 25], corrections=2)
    assert est.relative_dispersion < 0.10
    assert abs(est.mean - closed_form_b(ctx_one.F)) < 0.2


def test_b0_uncorrected_is_biased_but_honest(ctx_one):
    # without the correction terms the O(1/|s|) drift dominates at tau <= 25
    est = estimate_b_k(ctx_one, 1.0, [10, 15, 20, 25])
    assert est.relative_dispersion > 0.1
    assert est.corrections == 0


def test_ratio_approaches_closed_form():
    for coeffs in ([1], [1, -1]):
        ctx = EvalContext.of(coeffs)
        b = closed_form_b(ctx.F)
        near = abs(leading_ratio(ctx, 3 + 10j) - b)
        far = abs(leading_ratio(ctx, 3 + 40j) - b)
        assert far < near


def test_b_estimate_scaling(ctx_one):
    taus = [10, 15, 20, 25]
    base = estimate_b_k(ctx_one, 1.0, taus, corrections=2)
    for c in (2.0, 1j, 0.5 - 1.5j):
        scaled = estimate_b_k(EvalContext(ctx_one.F.scaled(c)), 1.0, taus,
                              corrections=2)
        # h scales by |c|^2 and psi by c, so the ratio scales by conj(c)
        expect = c.conjugate() * base.mean if isinstance(c, complex) \
            else c * base.mean
        assert abs(scaled.mean - expect) <= 1e-8 * abs(expect)


def test_k_mismatch_grows_linearly(ctx_one):
    right = estimate_b_k(ctx_one, 1.0, [10, 20, 30, 40])
    wrong = estimate_b_k(ctx_one, 1.0, [10, 20, 30, 40], k=1)
    assert abs(right.trend) < 0.3
    assert 0.7 < wrong.trend < 1.3


def test_b_estimate_preconditions(ctx_one):
    with pytest.raises(ValueError):
        estimate_b_k(ctx_one, -0.5, [10, 20])
    with pytest.raises(ValueError):
        estimate_b_k(ctx_one, 1.0, [2, 20])


def test_b_estimate_unstable_near_psi_zeros():
    # psi_{F,1} vanishes at 1 + 2 pi i j / ln 3: every sample is excluded
    ctx = EvalContext.of([1, -1])
    rungs = [2 * math.pi * j / math.log(3) for j in (1, 2, 3)]
    with pytest.raises(UnstableEstimateError):
        estimate_b_k(ctx, 1.0, rungs)

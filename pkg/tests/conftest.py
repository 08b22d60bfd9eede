import math

import mpmath
import numpy as np
import pytest

from xizeros.profiles import delta_sequence
from xizeros.xi import EvalContext

TEST_SEQUENCES = {
    "one": [1],
    "one_minus_one": [1, -1],
    "binomial": [1, -2, 1],
    "delta4": list(delta_sequence(4).coeffs),
}


def bessel_mp(tau):
    """2 K_{i tau}(2 pi) from mpmath (independent special-function code)."""
    return 2.0 * float(mpmath.re(mpmath.besselk(1j * tau, 2 * mpmath.pi)))


def bessel_grid(tau, h=0.004, L=7.0):
    """2 int_0^inf exp(-2 pi cosh t) cos(tau t) dt on a fixed trapezoid grid."""
    t = np.arange(-L, L + h / 2, h)
    return float(h * np.sum(np.exp(-2 * math.pi * np.cosh(t)) * np.cos(tau * t)))


def bessel_sign_changes(lo, hi, step=0.01):
    """Ordinates in (lo, hi) where 2 K_{i tau}(2 pi) changes sign."""
    taus = np.arange(lo, hi, step)
    vals = [bessel_mp(t) for t in taus]
    out = []
    for a, b, va, vb in zip(taus, taus[1:], vals, vals[1:]):
        if va * vb < 0:
            out.append(float(mpmath.findroot(bessel_mp, (a, b),
                                             solver="anderson")))
    return out


@pytest.fixture(scope="session")
def ctx_one():
    return EvalContext.of([1])


@pytest.fixture(scope="session", params=sorted(TEST_SEQUENCES))
def any_ctx(request):
    return EvalContext.of(TEST_SEQUENCES[request.param])


# acceptance verdicts, printed once at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        verdict, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {verdict}  {detail}")

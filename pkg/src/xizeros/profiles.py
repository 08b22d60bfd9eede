"""Weight functions and coefficient sequences.

``phi`` is the product weight whose Fourier transform is the Ramanujan Xi
function; ``phi_F`` replaces the infinite product by two finite sums built
from a coefficient sequence ``F = (a_0, ..., a_n)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import constants

TWO_PI = 2.0 * math.pi
INT64_MAX = 2**63 - 1


def _as_complex_tuple(coeffs):
    out = []
    for c in coeffs:
        if isinstance(c, (list, tuple)):
            if len(c) != 2:
                raise ValueError(f"bad coefficient pair {c!r}")
            out.append(complex(float(c[0]), float(c[1])))
        else:
            out.append(complex(c))
    return tuple(out)


@dataclass(frozen=True)
class CoefficientSequence:
    """Finite sequence ``(a_0, ..., a_n)`` with at least one nonzero entry.

    ``k`` is the vanishing order of ``P(y) = sum a_m y^m`` at ``y = 1`` and is
    computed on construction.
    """

    coeffs: tuple
    k: int = field(init=False)

    def __init__(self, coeffs):
        values = _as_complex_tuple(coeffs)
        if not values:
            raise ValueError("coefficient sequence is empty")
        if not any(c != 0 for c in values):
            raise ValueError("at least one coefficient must be nonzero")
        object.__setattr__(self, "coeffs", values)
        object.__setattr__(self, "k", vanishing_order(values))

    @property
    def n(self):
        return len(self.coeffs) - 1

    @property
    def array(self):
        return np.array(self.coeffs, dtype=complex)

    def nonzero_count(self):
        return sum(1 for c in self.coeffs if c != 0)

    def scaled(self, c):
        return CoefficientSequence([c * a for a in self.coeffs])

    def poly_at_one(self, j=0):
        """``P^{(j)}(1)`` computed exactly from the falling factorials."""
        total = 0j
        for m, a in enumerate(self.coeffs):
            if m >= j:
                total += a * math.perm(m, j)
        return total

    def to_json(self):
        return json.dumps(
            {"coeffs": [[c.real, c.imag] for c in self.coeffs]})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        if not isinstance(data, dict) or "coeffs" not in data:
            raise ValueError('expected an object with a "coeffs" field')
        return cls(data["coeffs"])

    def label(self):
        parts = []
        for c in self.coeffs:
            if c.imag == 0 and c.real == int(c.real):
                parts.append(str(int(c.real)))
            elif c.imag == 0:
                parts.append(repr(c.real))
            else:
                parts.append(f"{c.real!r}{c.imag:+}j")
        return "(" + ",".join(parts) + ")"


def vanishing_order(F):
    """Smallest ``k`` with ``P^{(k)}(1) != 0``.

    Repeated synthetic division of ``P`` by ``(y - 1)``: the remainder of the
    ``j``-th division is ``P^{(j)}(1) / j!``. A derivative counts as zero when
    it is below ``1e-9`` times the sum of the moduli of the terms that make it
    up, ``sum |a_m| m!/(m-j)!``.
    """
    coeffs = F.coeffs if isinstance(F, CoefficientSequence) else \
        _as_complex_tuple(F)
    n = len(coeffs) - 1
    # highest degree first for Horner-style division
    poly = list(reversed(coeffs))
    for j in range(n + 1):
        quotient = [poly[0]]
        for c in poly[1:]:
            quotient.append(c + quotient[-1])
        remainder = quotient.pop()
        scale = sum(abs(a) * math.perm(m, j) for m, a in enumerate(coeffs)
                    if m >= j)
        if abs(remainder) * math.factorial(j) > constants.VANISH_RTOL * scale:
            return j
        poly = quotient
    return n


def phi_tail_bound(t, K=constants.PHI_TERMS):
    """Bound on the factors dropped from ``phi`` after the K-th product term,
    relative to the kept product: ``24 * sum_{k>K} exp(-2 pi k e^{-|t|})``.
    """
    q = math.exp(-TWO_PI * math.exp(-abs(t)))
    if q >= 1.0:
        return math.inf
    return 24.0 * q ** (K + 1) / (1.0 - q)


def eval_phi(t, K=constants.PHI_TERMS):
    """Weight ``exp(-2 pi cosh t) * prod_{k<=K} [(1-e^{-2pi k e^t})(1-e^{-2pi k e^{-t}})]^12``."""
    if K < 1:
        raise ValueError("K must be at least 1")
    t = np.asarray(t)
    with np.errstate(under="ignore", over="ignore"):
        et = np.exp(t)
        emt = np.exp(-t)
        prod = np.ones_like(et)
        for k in range(1, K + 1):
            prod = prod * (-np.expm1(-TWO_PI * k * et)) * (-np.expm1(-TWO_PI * k * emt))
        out = np.exp(-TWO_PI * np.cosh(t)) * prod**12
    return out[()] if out.ndim == 0 else out


def _sums(F, t):
    a = F.array
    m = np.arange(a.size)
    t = np.asarray(t)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        et = np.exp(t)[..., None]
        emt = np.exp(-t)[..., None]
        left = (a * np.exp(-TWO_PI * m * et)).sum(axis=-1)
        right = (a.conj() * np.exp(-TWO_PI * m * emt)).sum(axis=-1)
    return left, right


def eval_phi_F(F, t):
    """``phi_F(t)``; ``t`` may be a complex array (used by shifted contours)."""
    t = np.asarray(t)
    left, right = _sums(F, t)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        out = np.exp(-TWO_PI * np.cosh(t)) * left * right
    return out[()] if out.ndim == 0 else out


def eval_phi_tilde_F(F, t):
    """``phi_F(t) / (2 cosh(t/2))``."""
    t = np.asarray(t)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        out = eval_phi_F(F, t) / (2.0 * np.cosh(0.5 * t))
    return out


def delta_coefficients(N):
    """Integer coefficients of ``prod_{k=1}^{N} (1 - q^k)^12 mod q^{N+1}``.

    Exact integer arithmetic; raises ``OverflowError`` if a coefficient does
    not fit a signed 64-bit integer.
    """
    N = int(N)
    if N < 0:
        raise ValueError("N must be non-negative")
    series = [1] + [0] * N
    for k in range(1, N + 1):
        # multiply twelve times by (1 - q^k), truncated at degree N
        for _ in range(12):
            for m in range(N, k - 1, -1):
                series[m] -= series[m - k]
    for c in series:
        if abs(c) > INT64_MAX:
            raise OverflowError(f"coefficient {c} exceeds 64-bit range")
    return series


def delta_sequence(N):
    """The canonical approximating sequence ``F^{(N)}``."""
    return CoefficientSequence(delta_coefficients(N))

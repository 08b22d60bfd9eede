"""Dirichlet polynomial ``psi_F(s) = pi^{-s} sum a_m (2m+1)^{-s}`` and its
shift ``psi_{F,k}(s) = psi_F(s - k)``.

Zeros of ``psi_{F,k}`` are those of an exponential polynomial
``sum p_m exp(beta_m s)`` with real frequencies, so they lie in a vertical
strip, have bounded density per unit height and repeat almost periodically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contour import Rectangle, Sample, locate_zeros, winding
from .errors import BoundaryUnresolvableError
from .numerics import DEFAULT_BUDGET, EPS


def _log_bases(n):
    return np.log((2.0 * np.arange(n + 1) + 1.0) * math.pi)


def psi_F(F, s):
    """``pi^{-s} sum_m a_m (2m+1)^{-s}``; ``s`` may be an array."""
    s = np.asarray(s, dtype=complex)
    logs = _log_bases(F.n)
    with np.errstate(over="ignore", under="ignore"):
        out = (F.array * np.exp(-s[..., None] * logs)).sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def psi_F_prime(F, s):
    s = np.asarray(s, dtype=complex)
    logs = _log_bases(F.n)
    with np.errstate(over="ignore", under="ignore"):
        out = (-logs * F.array * np.exp(-s[..., None] * logs)).sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def psi_term_scale(F, s):
    """Sum of the moduli of the terms of ``psi_F(s)``; sets the noise level
    and the 'close to a zero' threshold."""
    s = np.asarray(s, dtype=complex)
    logs = _log_bases(F.n)
    out = (np.abs(F.array) * np.exp(-s.real[..., None] * logs)).sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def psi_F_k(F, s):
    return psi_F(F, np.asarray(s, dtype=complex) - F.k)


def _psi_k_sample(F):
    def f(s):
        s = complex(s)
        value = complex(psi_F(F, s - F.k))
        noise = 8.0 * EPS * (1.0 + abs(s)) * float(psi_term_scale(F, s - F.k))
        return Sample(value, noise)
    return f


def _psi_k_prime(F):
    return lambda s: complex(psi_F_prime(F, complex(s) - F.k))


@dataclass(frozen=True)
class ExponentialPolynomial:
    """``psi_{F,k}(s) = exp(-rate (s - k)) * sum_m p_m exp(beta_m s)``."""

    terms: tuple
    rate: float
    k: int
    n: int

    def __post_init__(self):
        betas = [b for _, b in self.terms]
        if not self.terms:
            raise ValueError("exponential polynomial has no terms")
        if betas[0] != 0.0:
            raise ValueError("first frequency must be 0")
        if any(b1 <= b0 for b0, b1 in zip(betas, betas[1:])):
            raise ValueError("frequencies must be strictly increasing")

    @property
    def betas(self):
        return np.array([b for _, b in self.terms])

    @property
    def coefficients(self):
        return np.array([p for p, _ in self.terms], dtype=complex)

    def bracket(self, s):
        """The sum ``sum_m p_m exp(beta_m s)`` without the prefactor."""
        s = np.asarray(s, dtype=complex)
        out = (self.coefficients * np.exp(s[..., None] * self.betas)).sum(axis=-1)
        return out[()] if out.ndim == 0 else out

    def prefactor(self, s):
        return np.exp(-self.rate * (np.asarray(s, dtype=complex) - self.k))

    def __call__(self, s):
        return self.prefactor(s) * self.bracket(s)


def to_exponential_polynomial(F):
    """Rewrite ``psi_{F,k}`` as a prefactor times an exponential polynomial.

    ``p_m = a_{n-m} exp(-beta_m k)`` and
    ``beta_m = ln((2n+1) / (2(n-m)+1))``. Trailing zero coefficients of
    ``F`` are stripped first so that ``n`` is the last nonzero index and the
    first frequency is 0; terms with ``a_{n-m} = 0`` are dropped.
    """
    coeffs = list(F.coeffs)
    while coeffs[-1] == 0:
        coeffs.pop()
    n = len(coeffs) - 1
    k = F.k
    merged = {}
    for m in range(n + 1):
        a = coeffs[n - m]
        if a == 0:
            continue
        beta = math.log((2 * n + 1) / (2 * (n - m) + 1))
        merged[beta] = merged.get(beta, 0j) + a * math.exp(-beta * k)
    terms = tuple((p, b) for b, p in sorted(merged.items()) if p != 0)
    return ExponentialPolynomial(terms, math.log((2 * n + 1) * math.pi), k, n)


@dataclass(frozen=True)
class StripBound:
    """All zeros of ``psi_{F,k}`` satisfy ``side_minus <= Re s <= side_plus``
    and hence ``|Re s| < c0``."""

    c0: float
    side_plus: float
    side_minus: float
    empty: bool = False

    def __post_init__(self):
        if not self.c0 > 0:
            raise ValueError("c0 must be positive")
        if self.c0 < max(abs(self.side_plus), abs(self.side_minus)):
            raise ValueError("c0 smaller than a dominance abscissa")


def _bisect_increasing(g, target=1.0, lo=-1.0, hi=1.0, tol=1e-13):
    """Root of ``g(x) = target`` for an increasing ``g``."""
    while g(lo) >= target:
        lo = 2.0 * lo - 1.0
    while g(hi) <= target:
        hi = 2.0 * hi + 1.0
    while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if g(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def zero_free_strip_bound(F, margin=0.1):
    """Dominance abscissae of ``psi_{F,k}``.

    ``side_plus`` is where the highest frequency term starts to exceed the
    sum of all others in modulus; ``side_minus`` is the analogue for the
    constant term on the left. Both are found by bisection of a monotone
    inequality. With a single nonzero term there are no zeros and the bound
    is flagged ``empty``.
    """
    ep = to_exponential_polynomial(F)
    mods = np.abs(ep.coefficients)
    betas = ep.betas
    if len(ep.terms) < 2:
        return StripBound(margin, 0.0, 0.0, empty=True)
    top, top_beta = mods[-1], betas[-1]
    rest, rest_beta = mods[:-1], betas[:-1]

    def right_deficit(x):
        # decreasing in x; negate for the increasing-bisection helper
        return -float((rest / top * np.exp((rest_beta - top_beta) * x)).sum())

    side_plus = _bisect_increasing(right_deficit, target=-1.0)
    low = mods[0]

    def left_excess(x):
        return float((mods[1:] / low * np.exp(betas[1:] * x)).sum())

    side_minus = _bisect_increasing(left_excess, target=1.0)
    c0 = max(abs(side_plus), abs(side_minus)) + margin
    return StripBound(c0, side_plus, side_minus)


def dirichlet_zeros_in_rect(F, rect, budget=DEFAULT_BUDGET, jitter_tries=8):
    """Zeros of ``psi_{F,k}`` in ``rect`` with multiplicities.

    If the boundary passes within noise of a zero, every edge is moved by
    ``d = j/(4(2n+1) jitter_tries)``, ``j = 1, 2, ...``, first inwards and
    then outwards, until the boundary is certified.
    """
    f = _psi_k_sample(F)
    if F.nonzero_count() < 2:
        return []
    delta = 1.0 / (4.0 * (2 * F.n + 1))
    candidates = [rect]
    for j in range(1, jitter_tries + 1):
        d = delta * j / jitter_tries
        for sign in (1.0, -1.0):
            try:
                candidates.append(Rectangle(rect.sigma0 + sign * d,
                                            rect.sigma1 - sign * d,
                                            rect.T1 + sign * d,
                                            rect.T2 - sign * d))
            except ValueError:
                pass
    for current in candidates:
        try:
            count = winding(f, current, budget, dilate=False).count
        except BoundaryUnresolvableError:
            continue
        return locate_zeros(f, current, budget, df=_psi_k_prime(F),
                            known_count=count)
    raise BoundaryUnresolvableError(
        f"psi boundary unresolvable after {jitter_tries} jitters", rect=rect)


@dataclass
class DensityReport:
    count: int
    bound: float
    T1: float
    T2: float
    c: float
    zeros: list = field(default_factory=list)

    @property
    def ok(self):
        return self.count <= self.bound


def density_bound(F, T1, T2):
    n = F.n
    return n + math.log(2 * n + 1) / (2.0 * math.pi) * (T2 - T1)


def density_check(F, T1, T2, c=None, budget=DEFAULT_BUDGET):
    """Count zeros of ``psi_{F,k}`` in ``(-c, c) x (T1, T2)`` and compare with
    ``n + ln(2n+1)/(2 pi) (T2 - T1)``."""
    if not T1 < T2:
        raise ValueError("T1 must be below T2")
    strip = zero_free_strip_bound(F)
    c = strip.c0 if c is None else c
    if c < strip.c0:
        raise ValueError(f"c = {c} is below c0 = {strip.c0}")
    if strip.empty:
        return DensityReport(0, density_bound(F, T1, T2), T1, T2, c)
    zeros = dirichlet_zeros_in_rect(F, Rectangle(-c, c, T1, T2), budget)
    count = sum(z.multiplicity for z in zeros)
    return DensityReport(count, density_bound(F, T1, T2), T1, T2, c, zeros)


def _phase_defect(betas, P):
    x = np.multiply.outer(np.atleast_1d(P), betas)
    wrapped = np.abs(np.remainder(x + math.pi, 2.0 * math.pi) - math.pi)
    return wrapped.max(axis=-1)


def _ternary_min(g, lo, hi, iters=200):
    """Minimiser of a unimodal function on ``[lo, hi]``."""
    for _ in range(iters):
        a = lo + (hi - lo) / 3.0
        b = hi - (hi - lo) / 3.0
        if g(a) <= g(b):
            hi = b
        else:
            lo = a
        if hi - lo <= 4 * EPS * max(1.0, abs(lo)):
            break
    return 0.5 * (lo + hi)


def almost_period(F, eps, search_limit=1e4, chunk=1 << 18):
    """Smallest translation ``Pi > 1`` bringing every frequency within
    ``eps`` of a multiple of ``2 pi``.

    A grid scan with step ``eps / (2 max beta)`` finds the first admissible
    window; the defect is then minimised inside that window so that exact
    periods are returned exactly. Returns ``None`` if nothing is found up
    to ``search_limit``.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    ep = to_exponential_polynomial(F)
    betas = ep.betas[1:]
    if betas.size == 0:
        raise ValueError("need at least two nonzero coefficients")
    step = eps / (2.0 * betas.max())
    start = 1.0
    while start < search_limit:
        grid = start + step * np.arange(1, chunk + 1)
        grid = grid[grid <= search_limit]
        if grid.size == 0:
            break
        defect = _phase_defect(betas, grid)
        hits = np.nonzero(defect <= eps)[0]
        if hits.size:
            i = hits[0]
            j = i
            while j + 1 < grid.size and defect[j + 1] <= eps:
                j += 1
            lo, hi = grid[i] - step, grid[j] + step
            best = _ternary_min(lambda P: float(_phase_defect(betas, P)[0]),
                                lo, hi)
            if _phase_defect(betas, best)[0] <= eps:
                return best
            return float(grid[i])
        start = grid[-1]
    return None


def min_modulus_on_set(F, grid):
    """Minimum of ``|psi_{F,k}|`` over the given points."""
    values = np.abs(psi_F_k(F, np.asarray(grid, dtype=complex)))
    return float(np.min(values))

"""The entire functions Xi_F, C_F, W_F and the pieces of the decomposition
``C_F(s) = h(s) + h*(-s)``.

All evaluators return a :class:`~xizeros.numerics.QuadratureResult`; the
value is ``result.value`` and ``result.err_estimate`` bounds its error.
Values are memoised per ``(F, budget, point)``, so repeated contour work
(overlapping rectangle edges, refinement) does not pay twice.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import dirichlet
from .errors import DenominatorUncertifiedError, UnstableEstimateError
from .numerics import DEFAULT_BUDGET, PrecisionBudget, QuadratureResult, \
    fourier_integral, log_gamma
from .profiles import CoefficientSequence, eval_phi_F, eval_phi_tilde_F

# envelope within which the shifted quadrature is trusted
MAX_IMAG = 20.0


@dataclass(frozen=True)
class EvalContext:
    F: CoefficientSequence
    budget: PrecisionBudget = DEFAULT_BUDGET

    @classmethod
    def of(cls, coeffs, budget=DEFAULT_BUDGET):
        F = coeffs if isinstance(coeffs, CoefficientSequence) else \
            CoefficientSequence(coeffs)
        return cls(F, budget)


def _check_envelope(z, what):
    if abs(z.imag) > MAX_IMAG + 1e-12:
        raise ValueError(f"{what}: |Im| = {abs(z.imag):g} exceeds {MAX_IMAG}")


@functools.lru_cache(maxsize=500_000)
def _xi_cached(F, budget, s):
    return fourier_integral(lambda t: eval_phi_F(F, t), s, budget,
                            shift="auto")


@functools.lru_cache(maxsize=500_000)
def _w_cached(F, budget, s):
    return fourier_integral(lambda t: eval_phi_tilde_F(F, t), s, budget,
                            shift="auto")


@functools.lru_cache(maxsize=100_000)
def _xi_t_cached(F, budget, s):
    return fourier_integral(lambda t: t * eval_phi_F(F, t), s, budget,
                            shift="auto")


def clear_cache():
    _xi_cached.cache_clear()
    _w_cached.cache_clear()
    _xi_t_cached.cache_clear()


def xi_F(ctx, s):
    """``Xi_F(s) = int phi_F(t) exp(i s t) dt`` for ``|Im s| <= 20``."""
    s = complex(s)
    _check_envelope(s, "xi_F")
    return _xi_cached(ctx.F, ctx.budget, s)


def C_F(ctx, s):
    """``C_F(s) = Xi_F(-i s)``, real on the imaginary axis."""
    s = complex(s)
    return xi_F(ctx, -1j * s)


def C_F_prime(ctx, s):
    """Derivative ``C_F'(s) = int t phi_F(t) exp(s t) dt``."""
    z = -1j * complex(s)
    _check_envelope(z, "C_F_prime")
    return _xi_t_cached(ctx.F, ctx.budget, z)


def W_F(ctx, s):
    """``W_F(s) = int phi_F(t) / (2 cosh(t/2)) exp(i s t) dt``."""
    s = complex(s)
    _check_envelope(s, "W_F")
    return _w_cached(ctx.F, ctx.budget, s)


def h(ctx, s):
    """``h(s) = W_F(-i s - i/2)``."""
    return W_F(ctx, -1j * complex(s) - 0.5j)


def h_star_neg(ctx, s):
    """``h*(-s) = conj(h(-conj(s)))``, evaluated as ``W_F(-i s + i/2)``."""
    return W_F(ctx, -1j * complex(s) + 0.5j)


def h_star_neg_by_conjugation(ctx, s):
    """Cross-check route for :func:`h_star_neg` through the star operation."""
    r = h(ctx, -complex(s).conjugate())
    return QuadratureResult(r.value.conjugate(), r.err_estimate,
                            r.evals_used, r.converged, r.shift)


def F_ratio(ctx, s):
    """``h*(-s) / h(s)``.

    Raises
    ------
    DenominatorUncertifiedError
        If ``|h(s)|`` is within ten error estimates of zero.
    """
    den = h(ctx, s)
    if abs(den.value) <= 10.0 * den.err_estimate:
        raise DenominatorUncertifiedError(
            f"|h({complex(s)})| = {abs(den.value):.3g} is not certified nonzero")
    return h_star_neg(ctx, s).value / den.value


def growth_exponent(sigma):
    """Piecewise exponent ``mu``: ``1 - sigma`` on ``[0, 1]``, 0 beyond."""
    if sigma < 0:
        raise ValueError("mu is defined for sigma >= 0")
    return 1.0 - sigma if sigma <= 1.0 else 0.0


@dataclass
class LeadingCoefficientEstimate:
    """Trimmed-mean estimate of the leading de Bruijn coefficient.

    ``samples`` holds ``(tau, corrected ratio)`` pairs; ``trend`` is the
    fitted exponent ``p`` in ``|ratio| ~ |tau|^p`` (about 0 when ``k`` is
    right, about 1 when the Gamma shift is off by one).
    """

    mean: complex
    dispersion: float
    k: int
    trend: float = 0.0
    corrections: int = 0
    samples: list = field(default_factory=list)
    excluded: list = field(default_factory=list)

    @property
    def relative_dispersion(self):
        return self.dispersion / abs(self.mean) if self.mean != 0 else math.inf


def leading_ratio(ctx, s, k=None):
    """``h(s) / (Gamma(s - k) psi_{F,k}(s))``, the quantity whose limit is
    the leading coefficient ``b_k``."""
    s = complex(s)
    k = ctx.F.k if k is None else k
    hv = h(ctx, s).value
    psi = dirichlet.psi_F(ctx.F, s - k)
    return hv * cmath.exp(-log_gamma(s - k)) / psi


def _correction_basis(F, points, k, order):
    """Columns ``Gamma(s-k-j) psi_F(s-k-j) / (Gamma(s-k) psi_F(s-k))``."""
    base = dirichlet.psi_F(F, points - k)
    cols = []
    falling = np.ones_like(points)
    for j in range(1, order + 1):
        falling = falling * (points - k - j)
        cols.append(dirichlet.psi_F(F, points - k - j) / (base * falling))
    return np.array(cols).T.reshape(len(points), order)


def estimate_b_k(ctx, sigma, tau_samples, k=None, corrections=0,
                 psi_floor=1e-3):
    """Estimate ``b_k`` from samples of :func:`leading_ratio` on
    ``Re s = sigma``.

    Samples where ``|psi_{F,k}|`` falls below ``psi_floor`` times the sum of
    its term moduli are too close to a zero of the Dirichlet polynomial and
    are excluded (listed in ``excluded``). The mean is trimmed by 10% at
    each end, separately for real and imaginary parts; the dispersion is the
    root-mean-square deviation of the samples.

    With ``corrections = M > 0`` the next ``M`` terms of the asymptotic
    expansion, ``c_j Gamma(s-k-j) psi_F(s-k-j)``, are fitted by least
    squares and removed from each sample before averaging. Their
    coefficients are nuisance parameters and are not reported.

    Raises
    ------
    UnstableEstimateError
        If the dispersion exceeds the modulus of the mean.
    """
    if sigma < -0.25:
        raise ValueError("sigma must be >= -1/4")
    k = ctx.F.k if k is None else k
    taus, values, excluded = [], [], []
    for tau in tau_samples:
        if abs(tau) < 5:
            raise ValueError("all |tau| samples must be >= 5")
        s = complex(sigma, tau)
        size = dirichlet.psi_term_scale(ctx.F, s - k)
        if abs(dirichlet.psi_F(ctx.F, s - k)) < psi_floor * size:
            excluded.append(float(tau))
            continue
        taus.append(float(tau))
        values.append(leading_ratio(ctx, s, k))
    if len(values) < corrections + 2:
        raise UnstableEstimateError(
            f"{len(values)} usable samples for {corrections} corrections")
    values = np.array(values)
    taus_arr = np.array(taus)
    mags = np.abs(values)
    trend = float(np.polyfit(np.log(np.abs(taus_arr)), np.log(mags), 1)[0]) \
        if len(set(np.abs(taus))) > 1 and np.all(mags > 0) else 0.0
    if corrections:
        points = sigma + 1j * taus_arr
        basis = _correction_basis(ctx.F, points, k, corrections)
        design = np.column_stack([np.ones(len(points)), basis])
        coef, *_ = np.linalg.lstsq(design, values, rcond=None)
        values = values - basis @ coef[1:]
    mean = complex(stats.trim_mean(values.real, 0.1),
                   stats.trim_mean(values.imag, 0.1))
    dispersion = float(np.sqrt(np.mean(np.abs(values - values.mean()) ** 2)))
    est = LeadingCoefficientEstimate(mean, dispersion, k, trend, corrections,
                                     list(zip(taus, values.tolist())),
                                     excluded)
    if dispersion > abs(mean):
        raise UnstableEstimateError(
            f"dispersion {dispersion:.3g} exceeds |mean| {abs(mean):.3g}")
    return est

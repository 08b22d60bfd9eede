"""Low-level kernels: complex log-Gamma, Fourier-type quadrature with an
optional complex contour shift, and continuous argument tracking.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import constants
from .errors import InvalidCutoffError, PhaseStepError, PoleError

EPS = np.finfo(float).eps

# B_{2j} / (2j (2j-1)) for j = 1..8
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# largest |Im t| used by the automatic contour shift
_MAX_SHIFT = 1.52


@dataclass(frozen=True)
class PrecisionBudget:
    """Error targets and sampling limits for one quadrature."""

    abs_tol: float = constants.ABS_TOL
    rel_tol: float = constants.REL_TOL
    max_evals: int = constants.MAX_EVALS
    t_cutoff: float = constants.T_CUTOFF

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if not (self.abs_tol > 0 or self.rel_tol > 0):
            raise ValueError("abs_tol or rel_tol must be positive")
        if self.max_evals < 64:
            raise ValueError("max_evals must be at least 64")
        if not self.t_cutoff > 0:
            raise ValueError("t_cutoff must be positive")

    def target(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))

    def as_dict(self):
        return {"abs_tol": self.abs_tol, "rel_tol": self.rel_tol,
                "max_evals": self.max_evals, "t_cutoff": self.t_cutoff}


DEFAULT_BUDGET = PrecisionBudget()


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    err_estimate: float
    evals_used: int
    converged: bool
    shift: float = 0.0


def log_gamma(z):
    """Principal branch of log Gamma(z) for complex ``z``.

    Uses the Stirling series after shifting the argument by the recurrence
    ``log Gamma(w) = log Gamma(w + 1) - log w`` until ``|w|`` is large and
    ``Re w`` is non-negative. The branch cut lies along the negative real
    axis, as for ``scipy.special.loggamma``.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise PoleError(f"log_gamma has a pole at {z.real:g}")
    if z == 1 or z == 2:
        return 0j
    w = z
    shift = 0j
    while abs(w) < 17.0 or w.real < 0.0:
        shift += cmath.log(w)
        w += 1.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = 0j
    power = inv
    for c in _STIRLING:
        series += c * power
        power *= inv2
    return (w - 0.5) * cmath.log(w) - w + _HALF_LOG_2PI + series - shift


def gamma(z):
    """Gamma(z) through :func:`log_gamma`."""
    return cmath.exp(log_gamma(z))


def _integrand(w, s, t):
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        return w(t) * np.exp(1j * s * t)


def _tail_bound(w, s, L, shift):
    """Bound on the integral beyond +-L, assuming log|integrand| is concave
    there (true for the cosh envelope and for Gaussians)."""
    total = 0.0
    for sign in (1.0, -1.0):
        t = sign * np.array([L - 0.05, L]) + 1j * shift
        mags = np.abs(_integrand(w, s, t))
        if not np.all(np.isfinite(mags)):
            return math.inf
        if mags[1] == 0.0:
            continue
        if mags[0] == 0.0 or mags[1] >= mags[0]:
            return math.inf
        rate = (math.log(mags[0]) - math.log(mags[1])) / 0.05
        total += mags[1] / rate
    return total


def choose_shift(w, s, t_cutoff=constants.T_CUTOFF, candidates=39):
    """Pick the imaginary offset of the integration line that minimises the
    peak integrand modulus, keeping the endpoints negligible.

    Moving ``t -> t + i*theta`` leaves the integral unchanged for entire
    profiles whose envelope still decays on the shifted line (true for
    ``|theta| < pi/2`` with the ``exp(-2 pi cosh t)`` envelope) and removes
    most of the cancellation that plagues the real-line rule for large
    ``|Re s|``.
    """
    t = np.linspace(-t_cutoff, t_cutoff, 97)
    best, best_peak = 0.0, math.inf
    for theta in np.linspace(-_MAX_SHIFT, _MAX_SHIFT, candidates):
        with np.errstate(divide="ignore"):
            logs = np.log(np.abs(_integrand(w, s, t + 1j * theta)))
        if not np.all(np.isfinite(logs) | (logs == -np.inf)):
            continue
        peak = logs.max()
        if not np.isfinite(peak):
            continue
        if max(logs[0], logs[-1]) > peak - 36.0:
            continue
        if peak < best_peak - 1e-12 or (abs(peak - best_peak) <= 1e-12
                                        and abs(theta) < abs(best)):
            best, best_peak = float(theta), peak
    return best


def fourier_integral(w, s, budget=DEFAULT_BUDGET, shift=0.0):
    """Integrate ``w(t) * exp(i s t)`` over the real line.

    The interval is truncated to ``[-t_cutoff, t_cutoff]`` and integrated by
    nested trapezoid refinement (step halving, old samples reused) until two
    successive levels agree. ``shift`` moves the path to ``Im t = shift``;
    pass ``"auto"`` to let :func:`choose_shift` pick it. ``w`` must accept
    complex numpy arrays whenever the shift is non-zero.

    The error estimate is the last inter-level difference plus the
    truncation-tail bound plus a rounding floor proportional to the sum of
    sampled moduli.

    Raises
    ------
    InvalidCutoffError
        If the tail beyond the cutoff is not negligible.
    """
    s = complex(s)
    L = float(budget.t_cutoff)
    if shift == "auto":
        shift = choose_shift(w, s, L)
    shift = float(shift)

    # at least 8 samples per period of the oscillation exp(i Re(s) t)
    h_needed = 2.0 * math.pi / (8.0 * max(abs(s.real), 1.0))
    n = 16
    h = 2.0 * L / n
    t = np.linspace(-L, L, n + 1) + 1j * shift
    f = _integrand(w, s, t)
    f = np.where(np.isfinite(f), f, 0.0)
    total = f.sum() - 0.5 * (f[0] + f[-1])
    abs_total = np.abs(f).sum()
    evals = n + 1
    value = h * total
    diff = math.inf
    rounding = 16.0 + abs(s) * L
    converged = False
    while True:
        if evals + n > budget.max_evals:
            break
        mid = -L + h * (np.arange(n) + 0.5) + 1j * shift
        fm = _integrand(w, s, mid)
        fm = np.where(np.isfinite(fm), fm, 0.0)
        evals += n
        total += fm.sum()
        abs_total += np.abs(fm).sum()
        n *= 2
        h *= 0.5
        new = h * total
        diff = abs(new - value)
        value = new
        floor = rounding * EPS * h * abs_total
        if h <= h_needed and evals >= 64:
            if diff <= budget.target(value) or diff <= floor:
                break
    floor = rounding * EPS * h * abs_total
    tail = _tail_bound(w, s, L, shift)
    if tail > max(budget.target(value), floor):
        raise InvalidCutoffError(
            f"tail bound {tail:.3g} at t_cutoff={L} exceeds tolerance")
    err = diff + tail + floor
    converged = bool(err <= budget.target(value))
    return QuadratureResult(complex(value), float(err), int(evals), converged,
                            shift)


def continuous_argument(samples):
    """Total change of argument along an ordered path of nonzero samples.

    Raises
    ------
    PhaseStepError
        If two consecutive samples differ in phase by pi/2 or more, which
        means the path was sampled too coarsely.
    """
    z = np.asarray(samples, dtype=complex)
    if z.size < 2:
        return 0.0
    if np.any(z == 0):
        raise ValueError("argument of zero is undefined")
    steps = np.angle(z[1:] / z[:-1])
    worst = np.abs(steps).max()
    if worst >= 0.5 * math.pi:
        raise PhaseStepError(f"phase step {worst:.3f} >= pi/2")
    return float(steps.sum())

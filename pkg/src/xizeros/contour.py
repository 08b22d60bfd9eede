"""Argument-principle machinery: rectangles, certified winding counts, and
zero isolation by recursive subdivision with a local polish.

Callbacks passed to this module take a complex point and return either a
complex number or an object with ``value`` and ``err_estimate`` attributes
(such as :class:`~xizeros.numerics.QuadratureResult`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constants
from .errors import BoundaryUnresolvableError, SnapFailureError
from .numerics import DEFAULT_BUDGET, continuous_argument

# refinement thresholds for boundary sampling
_MAX_PHASE_STEP = math.pi / 4
_MAX_LOG_RATIO = 1.0
_MAX_BOUNDARY_EVALS = 400_000


@dataclass(frozen=True)
class Rectangle:
    """Open rectangle ``(sigma0, sigma1) x (T1, T2)``."""

    sigma0: float
    sigma1: float
    T1: float
    T2: float

    def __post_init__(self):
        if not (self.sigma0 < self.sigma1 and self.T1 < self.T2):
            raise ValueError(f"degenerate rectangle {self}")

    @classmethod
    def around(cls, z, r):
        z = complex(z)
        return cls(z.real - r, z.real + r, z.imag - r, z.imag + r)

    @property
    def width(self):
        return self.sigma1 - self.sigma0

    @property
    def height(self):
        return self.T2 - self.T1

    @property
    def center(self):
        return complex(0.5 * (self.sigma0 + self.sigma1),
                       0.5 * (self.T1 + self.T2))

    @property
    def diameter(self):
        return math.hypot(self.width, self.height)

    def contains(self, z, margin=0.0):
        return (self.sigma0 - margin < z.real < self.sigma1 + margin
                and self.T1 - margin < z.imag < self.T2 + margin)

    def dilate(self, frac):
        dx, dy = frac * self.width, frac * self.height
        return Rectangle(self.sigma0 - dx, self.sigma1 + dx,
                         self.T1 - dy, self.T2 + dy)

    def split(self, frac=0.5):
        """Two halves across the longer side."""
        if self.width >= self.height:
            x = self.sigma0 + frac * self.width
            return (Rectangle(self.sigma0, x, self.T1, self.T2),
                    Rectangle(x, self.sigma1, self.T1, self.T2))
        y = self.T1 + frac * self.height
        return (Rectangle(self.sigma0, self.sigma1, self.T1, y),
                Rectangle(self.sigma0, self.sigma1, y, self.T2))

    def tiles(self, nx, ny):
        xs = np.linspace(self.sigma0, self.sigma1, nx + 1)
        ys = np.linspace(self.T1, self.T2, ny + 1)
        return [Rectangle(xs[i], xs[i + 1], ys[j], ys[j + 1])
                for j in range(ny) for i in range(nx)]

    def as_tuple(self):
        return (self.sigma0, self.sigma1, self.T1, self.T2)


@dataclass(frozen=True)
class ZeroRecord:
    position: complex
    multiplicity: int = 1
    on_line: bool = False
    method: str = "winding"
    residual: float = 0.0
    trusted: bool = True

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")
        if self.on_line and abs(self.position.real) > constants.LINE_TOL:
            raise ValueError("on-line zero with |Re| above line_tol")

    def sort_key(self):
        return (round(self.position.imag, 12), round(self.position.real, 12))


@dataclass(frozen=True)
class WindingResult:
    count: int
    raw: float
    rect: Rectangle
    evals: int
    min_modulus: float
    dilations: int = 0


@dataclass(frozen=True)
class Sample:
    """A function value with its error estimate."""

    value: complex
    err_estimate: float


def evaluate(f, s):
    """Return ``(value, err_estimate)`` for either callback flavour."""
    r = f(s)
    if hasattr(r, "value"):
        return complex(r.value), float(r.err_estimate)
    return complex(r), 0.0


def _lattice(u0, u1, spacing):
    """Points of the global lattice ``spacing * Z`` strictly between u0, u1
    (in traversal order), framed by the endpoints."""
    lo, hi = min(u0, u1), max(u0, u1)
    j0 = math.floor(lo / spacing) + 1
    j1 = math.ceil(hi / spacing) - 1
    inner = [j * spacing for j in range(j0, j1 + 1)
             if lo + 1e-12 * spacing < j * spacing < hi - 1e-12 * spacing]
    if u0 > u1:
        inner.reverse()
    return [u0] + inner + [u1]


def _spacing(length, base):
    return min(base, 2.0 ** math.floor(math.log2(length / 8.0)))


class _EdgeSampler:
    def __init__(self, f, noise_factor):
        self.f = f
        self.noise_factor = noise_factor
        self.evals = 0
        self.min_modulus = math.inf
        self.uncertified = None

    def point(self, z):
        v, e = evaluate(self.f, z)
        self.evals += 1
        m = abs(v)
        self.min_modulus = min(self.min_modulus, m)
        if not (m > self.noise_factor * e) or not math.isfinite(m):
            if self.uncertified is None:
                self.uncertified = z
        return v

    def edge(self, a, b, spacing):
        """Sampled values along the segment a -> b (complex endpoints)."""
        horizontal = a.imag == b.imag
        if horizontal:
            us = _lattice(a.real, b.real, spacing)
            pts = [complex(u, a.imag) for u in us]
        else:
            us = _lattice(a.imag, b.imag, spacing)
            pts = [complex(a.real, u) for u in us]
        vals = [self.point(z) for z in pts]
        out_p, out_v = [pts[0]], [vals[0]]
        stack = list(zip(zip(pts[1:], vals[1:]), zip(pts[:-1], vals[:-1])))
        stack.reverse()
        # depth-first bisection of any segment with a large phase or modulus
        # jump; a zero at the sample makes the boundary uncertified anyway
        while stack:
            (zb, vb), (za, va) = stack.pop()
            if self.uncertified is not None:
                return out_p, out_v
            if va == 0 or vb == 0:
                self.uncertified = za if va == 0 else zb
                return out_p, out_v
            step = abs(np.angle(vb / va))
            ratio = abs(math.log(abs(vb) / abs(va)))
            if step > _MAX_PHASE_STEP or ratio > _MAX_LOG_RATIO:
                if abs(zb - za) <= 1e-13 * max(1.0, abs(za)):
                    # still jumping at the resolution limit: a zero sits on
                    # the segment
                    if step > _MAX_PHASE_STEP:
                        self.uncertified = za
                        return out_p, out_v
                else:
                    zm = 0.5 * (za + zb)
                    vm = self.point(zm)
                    stack.append(((zb, vb), (zm, vm)))
                    stack.append(((zm, vm), (za, va)))
                    continue
            out_p.append(zb)
            out_v.append(vb)
            if self.evals > _MAX_BOUNDARY_EVALS:
                raise SnapFailureError("boundary sampling budget exhausted")
        return out_p, out_v


def _winding_once(f, rect, base_spacing, noise_factor):
    s = _EdgeSampler(f, noise_factor)
    c = [complex(rect.sigma0, rect.T1), complex(rect.sigma1, rect.T1),
         complex(rect.sigma1, rect.T2), complex(rect.sigma0, rect.T2)]
    total = 0.0
    for a, b in zip(c, c[1:] + c[:1]):
        spacing = _spacing(abs(b - a), base_spacing)
        _, vals = s.edge(a, b, spacing)
        if s.uncertified is not None:
            return None, s
        total += continuous_argument(vals)
    return total / (2.0 * math.pi), s


def winding(f, rect, budget=DEFAULT_BUDGET, *, dilate=True,
            max_dilations=constants.MAX_DILATIONS, spacing=0.125,
            noise_factor=10.0):
    """Certified winding number of ``f`` around ``rect``.

    Boundary samples must satisfy ``|f| > noise_factor * err_estimate``. On
    failure the rectangle is dilated (up to 1% per side in total, over
    ``max_dilations`` attempts) when ``dilate`` is true, otherwise
    :class:`BoundaryUnresolvableError` is raised at once. The raw winding
    must lie within 0.15 of an integer; otherwise sampling is refined.
    """
    current = rect
    evals = 0
    attempts = max_dilations if dilate else 0
    for attempt in range(attempts + 1):
        if attempt:
            current = rect.dilate(0.01 * attempt / max_dilations)
        base = spacing
        for _ in range(4):
            raw, sampler = _winding_once(f, current, base, noise_factor)
            evals += sampler.evals
            if raw is None:
                break
            n = round(raw)
            if abs(raw - n) <= constants.SNAP_TOL:
                return WindingResult(int(n), raw, current, evals,
                                     sampler.min_modulus, attempt)
            base *= 0.5
        else:
            raise SnapFailureError(
                f"winding {raw:.3f} not within {constants.SNAP_TOL} of an integer")
    raise BoundaryUnresolvableError(
        f"zero within noise of the boundary near {sampler.uncertified}",
        rect=current)


def winding_count(f, rect, budget=DEFAULT_BUDGET, **kwargs):
    """Number of zeros of ``f`` inside ``rect``, with multiplicity."""
    return winding(f, rect, budget, **kwargs).count


def _polish(f, df, z0, rect, tol=1e-15, maxiter=60):
    """Newton (with ``df``) or secant iteration from ``z0``; returns the
    converged point or ``None`` if it leaves the rectangle or stalls."""
    z = complex(z0)
    fz = evaluate(f, z)[0]
    if df is None:
        z_prev = z + 1e-7 * max(rect.width, rect.height)
        f_prev = evaluate(f, z_prev)[0]
    margin = 0.05 * max(rect.width, rect.height)
    for _ in range(maxiter):
        if fz == 0:
            return z
        if df is not None:
            d = evaluate(df, z)[0]
            if d == 0:
                return None
            step = fz / d
        else:
            denom = fz - f_prev
            if denom == 0:
                return z
            step = fz * (z - z_prev) / denom
            z_prev, f_prev = z, fz
        z = z - step
        if not rect.contains(z, margin):
            return None
        fz = evaluate(f, z)[0]
        if abs(step) <= tol * max(1.0, abs(z)):
            return z
    return z if abs(step) <= 1e-10 * max(1.0, abs(z)) else None


def locate_zeros(f, rect, budget=DEFAULT_BUDGET, df=None,
                 cluster_tol=constants.CLUSTER_TOL, method="winding+polish",
                 line_tol=constants.LINE_TOL, known_count=None):
    """All zeros of ``f`` in ``rect`` with multiplicities.

    Rectangles are bisected across their longer side, keeping only pieces
    with a nonzero winding count. A piece holding exactly one zero is
    polished by Newton/secant iteration; a piece still holding several
    zeros once its diameter is below ``cluster_tol`` is reported as one
    cluster whose multiplicity is the winding count. The result is sorted by
    imaginary part, then real part.
    """
    if known_count is None:
        known_count = winding(f, rect, budget, dilate=False).count
    found = []
    stack = [(rect, known_count)]
    while stack:
        r, count = stack.pop()
        if count == 0:
            continue
        if count == 1 and r.diameter < 1.0:
            z = _polish(f, df, r.center, r)
            if z is not None and r.contains(z, 1e-12):
                found.append(_record(f, z, 1, method, line_tol))
                continue
        if r.diameter < cluster_tol:
            found.append(_record(f, r.center, count, method, line_tol))
            continue
        stack.extend(_split_certified(f, r, count, budget))
    return sorted(found, key=ZeroRecord.sort_key)


def _split_certified(f, r, count, budget):
    for frac in (0.5, 0.4375, 0.5625, 0.375, 0.625, 0.3125, 0.6875):
        a, b = r.split(frac)
        try:
            ca = winding(f, a, budget, dilate=False).count
            cb = winding(f, b, budget, dilate=False).count
        except BoundaryUnresolvableError:
            continue
        if ca + cb == count:
            return [(b, cb), (a, ca)]
    raise BoundaryUnresolvableError(
        "could not split rectangle along a certified line", rect=r)


def _record(f, z, multiplicity, method, line_tol):
    value = evaluate(f, z)[0]
    return ZeroRecord(complex(z), multiplicity, abs(z.real) <= line_tol,
                      method, float(abs(value)))

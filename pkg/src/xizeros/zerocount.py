"""Zeros of ``C_F`` and the counting functions built from them.

On the line ``Re s = 0`` the function ``g(tau) = C_F(i tau)`` is real, so
simple on-line zeros show up as sign changes. Everything else (off-line
zeros, even multiplicities, near tangencies) is caught by comparing the
scan with certified winding counts over the strip ``|Re s| < beta``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import constants
from .contour import (Rectangle, WindingResult, ZeroRecord, locate_zeros,
                      winding, winding_count)
from .errors import BoundaryUnresolvableError, CrowdedNeighborhoodError
from .xi import C_F, C_F_prime, EvalContext

__all__ = [
    "Rectangle", "ZeroRecord", "WindingResult", "CountReport",
    "winding_count", "line_scan_zeros", "classify_multiplicity",
    "count_report", "ki_count", "zeros_to_csv", "zeros_from_csv",
    "reflection_matches",
]

CSV_FIELDS = ("re", "im", "multiplicity", "on_line", "method", "residual",
              "trusted")


def _with_budget(ctx, budget):
    return ctx if budget is None else EvalContext(ctx.F, budget)


def _c_fun(ctx):
    return lambda s: C_F(ctx, s)


def _c_prime(ctx):
    return lambda s: C_F_prime(ctx, s)


def _g(ctx, tau):
    r = C_F(ctx, complex(0.0, tau))
    return r.value.real, r.err_estimate


@dataclass
class LineScan:
    """Raw output of :func:`line_scan`: located sign changes and the
    ordinates where ``|g|`` dips without changing sign."""

    zeros: list
    tangencies: list
    T: float
    step: float


def line_scan(ctx, T, step=constants.SCAN_STEP, tol=constants.BISECT_TOL):
    """Scan ``g(tau) = Re C_F(i tau)`` on ``(-T, T)``.

    Sign changes are bisected (Brent) to an interval below ``tol``. If
    ``|g|`` at either end of a bracket is within three error estimates of
    zero the zero is kept but marked untrusted. Interior local minima of
    ``|g|`` without a sign change are returned as tangency candidates.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if not 0 < step <= 0.1:
        raise ValueError("step must lie in (0, 0.1]")
    n = max(2, math.ceil(2.0 * T / step))
    taus = np.linspace(-T, T, n + 1)[1:-1]
    samples = [_g(ctx, t) for t in taus]
    vals = np.array([v for v, _ in samples])
    errs = np.array([e for _, e in samples])
    noisy = np.abs(vals) <= 3.0 * errs
    zeros, tangencies = [], []
    for i in range(len(taus) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0 or a * b < 0:
            if a == 0.0:
                root = float(taus[i])
            else:
                root = brentq(lambda t: _g(ctx, t)[0], taus[i], taus[i + 1],
                              xtol=tol)
            value, err = _g(ctx, root)
            trusted = not (noisy[i] or noisy[i + 1])
            zeros.append(ZeroRecord(complex(0.0, root), 1, True, "line-scan",
                                    abs(value), trusted))
    mags = np.abs(vals)
    for i in range(1, len(taus) - 1):
        if mags[i] < mags[i - 1] and mags[i] < mags[i + 1] and \
                vals[i - 1] * vals[i] > 0 and vals[i] * vals[i + 1] > 0:
            tangencies.append(float(taus[i]))
    return LineScan(zeros, tangencies, float(T), float(step))


def line_scan_zeros(ctx, T, step=constants.SCAN_STEP):
    """On-line zeros of ``C_F`` with ``|Im s| < T`` found by sign changes."""
    return line_scan(ctx, T, step).zeros


def classify_multiplicity(ctx, z, budget=None, known=(),
                          r0=constants.MULTIPLICITY_RADIUS, max_radius=0.05):
    """Multiplicity of the zero ``z`` of ``C_F`` by a winding count on a
    small square.

    The half-side starts at ``r0`` and grows by a factor 4 until the
    boundary is certified and no other entry of ``known`` lies within
    ``2 r``.

    Raises
    ------
    CrowdedNeighborhoodError
        If another known zero lies within ``4e-6`` of ``z``.
    """
    ctx = _with_budget(ctx, budget)
    z = complex(z)
    others = [complex(w) for w in known if abs(complex(w) - z) > 0]
    if any(abs(w - z) < constants.CROWDED_RADIUS for w in others):
        raise CrowdedNeighborhoodError(f"another zero within "
                                       f"{constants.CROWDED_RADIUS} of {z}")
    f = _c_fun(ctx)
    r = r0
    while r <= max_radius:
        if not any(abs(w - z) < 2.0 * r for w in others):
            try:
                count = winding(f, Rectangle.around(z, r), ctx.budget,
                                dilate=False).count
            except BoundaryUnresolvableError:
                count = None
            if count:
                return count
        r *= 4.0
    raise BoundaryUnresolvableError(
        f"no certified square around {z} up to radius {max_radius}")


@dataclass
class CountReport:
    """The counting functions of ``C_F`` for one ``(T, beta)``.

    ``T`` and ``T_low`` are the edges actually used after jittering;
    ``histogram`` maps multiplicity to the number of distinct on-line zeros
    of that multiplicity.
    """

    N_bar: int
    N1_bar: int
    N0_prime: int
    N_ki: int
    histogram: dict
    T: float
    beta: float
    T_requested: float
    T_low: float = 1.0
    zeros: list = field(default_factory=list)
    off_line: list = field(default_factory=list)
    untrusted: int = 0
    F: tuple = ()

    def __post_init__(self):
        if not 0 <= self.N1_bar <= self.N0_prime <= self.N_bar:
            raise ValueError("counts violate 0 <= N1_bar <= N0_prime <= N_bar")
        if self.N1_bar != self.histogram.get(1, 0):
            raise ValueError("N1_bar differs from histogram[1]")
        if self.N_bar < sum(k * v for k, v in self.histogram.items()):
            raise ValueError("N_bar below the on-line multiplicity total")

    @classmethod
    def from_zeros(cls, zeros, T, beta, F=()):
        """Rebuild the counts from a located zero list (e.g. a CSV export)
        instead of fresh winding numbers."""
        zeros = [z for z in zeros
                 if abs(z.position.imag) < T and abs(z.position.real) < beta]
        online = [z for z in zeros if z.on_line]
        histogram = {}
        for z in online:
            histogram[z.multiplicity] = histogram.get(z.multiplicity, 0) + 1
        return cls(
            N_bar=sum(z.multiplicity for z in zeros),
            N1_bar=histogram.get(1, 0), N0_prime=len(online),
            N_ki=sum(z.multiplicity for z in zeros
                     if 1.0 <= z.position.imag < T),
            histogram=histogram, T=float(T), beta=float(beta),
            T_requested=float(T), zeros=sorted(zeros, key=ZeroRecord.sort_key),
            off_line=[z for z in zeros if not z.on_line],
            untrusted=sum(not z.trusted for z in zeros), F=tuple(F))

    @property
    def located_total(self):
        return sum(z.multiplicity for z in self.zeros)

    def to_dict(self):
        return {
            "schema": constants.SCHEMA,
            "F": [[c.real, c.imag] for c in self.F],
            "N_bar": self.N_bar,
            "N1_bar": self.N1_bar,
            "N0_prime": self.N0_prime,
            "N_ki": self.N_ki,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "T": self.T,
            "T_requested": self.T_requested,
            "T_low": self.T_low,
            "ki_convention": "T_low <= Im s < T, T_low jittered near 1",
            "beta": self.beta,
            "untrusted": self.untrusted,
            "zeros": [_zero_dict(z) for z in self.zeros],
            "off_line": [_zero_dict(z) for z in self.off_line],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _zero_dict(z):
    return {"re": z.position.real, "im": z.position.imag,
            "multiplicity": z.multiplicity, "on_line": z.on_line,
            "method": z.method, "residual": z.residual, "trusted": z.trusted}


def _jitters(step):
    out = [0.0]
    for j in range(1, 5):
        d = j * step / 8.0
        out += [d, -d]
    return out


def _certified_strip(f, beta, lo, hi, step, budget, jitter_low, jitter_high):
    """Winding over ``(-beta, beta) x (lo', hi')`` with the horizontal
    edges jittered by at most ``step / 2`` until they are certified."""
    last = None
    for dh in (_jitters(step) if jitter_high else [0.0]):
        for dl in (_jitters(step) if jitter_low else [0.0]):
            rect = Rectangle(-beta, beta, lo + dl, hi + dh)
            try:
                return winding(f, rect, budget, dilate=False)
            except BoundaryUnresolvableError as exc:
                last = exc
    raise BoundaryUnresolvableError(
        f"no certified edges near Im = {lo}, {hi} within step/2",
        rect=getattr(last, "rect", None))


def _symmetric_strip(f, beta, T, step, budget):
    last = None
    for d in _jitters(step):
        rect = Rectangle(-beta, beta, -(T + d), T + d)
        try:
            return winding(f, rect, budget, dilate=False)
        except BoundaryUnresolvableError as exc:
            last = exc
    raise BoundaryUnresolvableError(
        f"no certified edges near Im = +-{T} within step/2",
        rect=getattr(last, "rect", None))


def _merge(records, tol=constants.DEDUP_TOL):
    out = []
    for z in sorted(records, key=ZeroRecord.sort_key):
        if out and abs(out[-1].position - z.position) < tol:
            continue
        out.append(z)
    return out


def _snap(z, line_tol):
    """Put a zero with ``|Re| <= line_tol`` exactly on the line."""
    if abs(z.position.real) <= line_tol and not z.on_line:
        return ZeroRecord(complex(0.0, z.position.imag), z.multiplicity, True,
                          z.method, z.residual, z.trusted)
    return z


def _resolve_tangencies(ctx, taus, step, known, line_tol):
    f, df = _c_fun(ctx), _c_prime(ctx)
    found = []
    for tau in taus:
        box = Rectangle(-step, step, tau - step, tau + step)
        try:
            w = winding(f, box, ctx.budget, dilate=True)
        except BoundaryUnresolvableError:
            continue
        if w.count == 0:
            continue
        for z in locate_zeros(f, w.rect, ctx.budget, df=df,
                              known_count=w.count, line_tol=line_tol):
            if not any(abs(z.position - k.position) < constants.DEDUP_TOL
                       for k in known):
                found.append(_snap(z, line_tol))
    return found


def _localize_surplus(ctx, beta, T, online, line_tol, band=1.0):
    """Find zeros not accounted for by the on-line list, band by band."""
    f, df = _c_fun(ctx), _c_prime(ctx)
    nb = max(1, math.ceil(2.0 * T / band))
    edges = np.linspace(-T, T, nb + 1)
    extra = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        inside = [z for z in online if lo <= z.position.imag < hi]
        expected = sum(z.multiplicity for z in inside)
        w = _certified_strip(f, beta, lo, hi, (hi - lo) / 4.0, ctx.budget,
                             lo > -T, hi < T)
        if w.count <= expected:
            continue
        for z in locate_zeros(f, w.rect, ctx.budget, df=df,
                              known_count=w.count, line_tol=line_tol):
            if not any(abs(z.position - k.position) < 1e-6 for k in online):
                extra.append(_snap(z, line_tol))
    return extra


def count_report(ctx, T, beta=constants.BETA, budget=None,
                 step=constants.SCAN_STEP, line_tol=constants.LINE_TOL):
    """Assemble ``N_bar``, ``N1_bar``, ``N0_prime``, ``N_ki`` and the
    multiplicity histogram of on-line zeros.

    ``N_bar`` is the certified winding count over ``(-beta, beta) x (-T, T)``
    with ``T`` jittered by at most ``step / 2`` if an edge is not certified.
    If ``N_bar`` exceeds what the line scan accounts for, the surplus is
    localized by subdivision and listed in ``off_line``.
    """
    if T < 2:
        raise ValueError("T must be at least 2")
    if not beta > 0:
        raise ValueError("beta must be positive")
    ctx = _with_budget(ctx, budget)
    f = _c_fun(ctx)
    strip = _symmetric_strip(f, beta, T, step, ctx.budget)
    T_used = strip.rect.T2
    scan = line_scan(ctx, T_used, step)
    online = list(scan.zeros)
    online += _resolve_tangencies(ctx, scan.tangencies, step, online,
                                  line_tol)
    online = _merge([z for z in online if z.on_line])
    positions = [z.position for z in online]
    classified = []
    for z in online:
        m = classify_multiplicity(ctx, z.position, known=positions)
        classified.append(ZeroRecord(z.position, m, True, z.method,
                                     z.residual, z.trusted))
    online = classified
    off_line = []
    if strip.count > sum(z.multiplicity for z in online):
        off_line = _localize_surplus(ctx, beta, T_used, online, line_tol)
        moved = [z for z in off_line if z.on_line]
        off_line = [z for z in off_line if not z.on_line]
        online = _merge(online + moved)
    histogram = {}
    for z in online:
        histogram[z.multiplicity] = histogram.get(z.multiplicity, 0) + 1
    ki = _certified_strip(f, beta, 1.0, T_used, step, ctx.budget, True, False)
    zeros = sorted(online + off_line, key=ZeroRecord.sort_key)
    return CountReport(
        N_bar=strip.count, N1_bar=histogram.get(1, 0), N0_prime=len(online),
        N_ki=ki.count, histogram=histogram, T=T_used, beta=float(beta),
        T_requested=float(T), T_low=ki.rect.T1, zeros=zeros,
        off_line=off_line, untrusted=sum(not z.trusted for z in zeros),
        F=ctx.F.coeffs)


def ki_count(ctx, T, beta=constants.BETA, budget=None,
             step=constants.SCAN_STEP):
    """``N(T, C_F)``: zeros in ``(-beta, beta) x (1, T)``, both horizontal
    edges jittered by at most ``step / 2``. Returns the winding result, whose
    ``rect`` records the edges used."""
    ctx = _with_budget(ctx, budget)
    if not T > 1:
        raise ValueError("T must exceed 1")
    return _certified_strip(_c_fun(ctx), beta, 1.0, T, step, ctx.budget,
                            True, True)


def reflection_matches(zeros, tol=1e-8):
    """True if the multiset of zeros is invariant under ``s -> -conj(s)``."""
    pool = [(z.position, z.multiplicity) for z in zeros]
    used = [False] * len(pool)
    for p, m in pool:
        target = -p.conjugate()
        for j, (q, mq) in enumerate(pool):
            if not used[j] and mq == m and abs(q - target) <= tol:
                used[j] = True
                break
        else:
            return False
    return True


def zeros_to_csv(zeros):
    """CSV text for a list of zero records, with a leading schema line."""
    buf = io.StringIO()
    buf.write(f"# schema: {constants.SCHEMA}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for z in sorted(zeros, key=ZeroRecord.sort_key):
        writer.writerow([repr(z.position.real), repr(z.position.imag),
                         z.multiplicity, int(z.on_line), z.method,
                         repr(z.residual), int(z.trusted)])
    return buf.getvalue()


def zeros_from_csv(text):
    """Inverse of :func:`zeros_to_csv`."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != f"# schema: {constants.SCHEMA}":
        raise ValueError("missing or unknown schema line")
    out = []
    for row in csv.DictReader(lines[1:]):
        out.append(ZeroRecord(complex(float(row["re"]), float(row["im"])),
                              int(row["multiplicity"]),
                              bool(int(row["on_line"])), row["method"],
                              float(row["residual"]),
                              bool(int(row.get("trusted", 1)))))
    return out

"""Desk-scale verification of the zero-distribution statements for ``C_F``.

Each check returns a :class:`TheoremReport` with the two sides of the
inequality it tests, the margin, and enough diagnostics to rerun it.
Unspecified ``O(1)`` and ``O(log T)`` constants are replaced by the explicit
slacks in :mod:`xizeros.constants` and recorded in every report.
"""
from __future__ import annotations

import functools
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import constants, dirichlet
from .contour import Rectangle, winding
from .errors import (BoundaryUnresolvableError, NotFoundError,
                     Sigma0UncertifiedError, UnstableEstimateError)
from .numerics import log_gamma
from .xi import (C_F, EvalContext, growth_exponent, h, h_star_neg,
                 leading_ratio)
from .zerocount import count_report, ki_count

THEOREM_IDS = ("thm1_1", "thm1_3", "ki_count", "master_2_5", "decomp_2_2",
               "growth_2_6", "growth_2_7", "prop2_1")


def inputs_digest(theorem_id, ctx, **params):
    """Short SHA-256 of everything that determines a report."""
    payload = {
        "theorem": theorem_id,
        "F": [[c.real, c.imag] for c in ctx.F.coeffs],
        "budget": ctx.budget.as_dict(),
        "params": params,
    }
    text = json.dumps(payload, sort_keys=True, default=repr)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class TheoremReport:
    """Outcome of one check. ``applicable`` is false when a hypothesis of
    the statement fails; such a report never passes and never fails."""

    theorem_id: str
    passed: bool
    lhs: float
    rhs: float
    margin: float
    details: dict = field(default_factory=dict)
    inputs_digest: str = ""
    applicable: bool = True

    def __post_init__(self):
        if self.theorem_id not in THEOREM_IDS:
            raise ValueError(f"unknown theorem id {self.theorem_id!r}")
        if not self.applicable and self.passed:
            raise ValueError("a not-applicable report cannot pass")

    @property
    def status(self):
        if not self.applicable:
            return "not-applicable"
        return "pass" if self.passed else "fail"

    def to_dict(self):
        return {"theorem_id": self.theorem_id, "pass": self.passed,
                "status": self.status, "lhs": self.lhs, "rhs": self.rhs,
                "margin": self.margin, "details": self.details,
                "inputs_digest": self.inputs_digest,
                "applicable": self.applicable}


def _report(theorem_id, ctx, params, passed, lhs, rhs, details,
            applicable=True):
    return TheoremReport(theorem_id, bool(passed) and applicable, float(lhs),
                         float(rhs), float(rhs - lhs), details,
                         inputs_digest(theorem_id, ctx, **params), applicable)


@functools.lru_cache(maxsize=256)
def _count(F, budget, T, beta):
    return count_report(EvalContext(F, budget), T, beta)


def cached_count_report(ctx, T, beta=constants.BETA):
    """:func:`~xizeros.zerocount.count_report`, memoised per input."""
    return _count(ctx.F, ctx.budget, float(T), float(beta))


def _zero_list(zeros):
    return [[z.position.real, z.position.imag, z.multiplicity, z.on_line]
            for z in zeros]


def verify_decomposition(ctx, grid):
    """Check ``C_F(s) = h(s) + h*(-s)`` on every grid point.

    ``lhs`` is the largest deviation, ``rhs`` four times the worst error
    estimate among the three quadratures.
    """
    grid = [complex(s) for s in grid]
    if not grid:
        raise ValueError("empty grid")
    worst_dev, worst_err, where = 0.0, 0.0, None
    for s in grid:
        c, a, b = C_F(ctx, s), h(ctx, s), h_star_neg(ctx, s)
        dev = abs(c.value - a.value - b.value)
        worst_err = max(worst_err, c.err_estimate, a.err_estimate,
                        b.err_estimate)
        if dev >= worst_dev:
            worst_dev, where = dev, s
    rhs = 4.0 * worst_err
    details = {"points": len(grid), "worst_point": [where.real, where.imag]}
    return _report("decomp_2_2", ctx, {"grid": [[s.real, s.imag] for s in grid]},
                   worst_dev <= rhs, worst_dev, rhs, details)


def theorem_1_1_bound(n, T, slack=constants.C_SLACK):
    return (32.0 * n + 32.0 * math.log(2 * n + 1) / math.pi) * T + slack


def verify_theorem_1_1(ctx, T, beta=constants.BETA, report=None):
    """``0 <= N_bar - N1_bar <= (32n + 32 ln(2n+1)/pi) T + C_slack``.

    ``report`` replaces the in-process count (used when re-ingesting an
    exported zero list).
    """
    if T < 2:
        raise ValueError("T must be at least 2")
    rep = report or cached_count_report(ctx, T, beta)
    lhs = rep.N_bar - rep.N1_bar
    rhs = theorem_1_1_bound(ctx.F.n, rep.T)
    details = {"N_bar": rep.N_bar, "N1_bar": rep.N1_bar, "T_used": rep.T,
               "beta": beta, "C_slack": constants.C_SLACK,
               "non_simple_or_off_line": _zero_list(
                   [z for z in rep.zeros
                    if not (z.on_line and z.multiplicity == 1)])}
    return _report("thm1_1", ctx, {"T": T, "beta": beta},
                   0 <= lhs <= rhs, lhs, rhs, details)


def _psi_windows(Dstar, Dstarstar):
    return [Rectangle(-Dstarstar, Dstar, -50.0, 50.0),
            Rectangle(-Dstarstar, Dstar, 50.0, 150.0),
            Rectangle(-Dstarstar, Dstar, 150.0, 250.0)]


def verify_theorem_1_3(ctx, delta, Dstar, Dstarstar, T,
                       beta=constants.BETA, t_except=constants.T_EXCEPT,
                       report=None):
    """Zeros with ``|Re s| <= delta`` are on the line and simple, apart from
    a finite exception list confined to ``|Im s| <= t_except``.

    The hypothesis (``psi_{F,k}`` zero-free in ``-Dstarstar < Re s < Dstar``)
    is checked on three windows of height 100 and reported as
    window-certified. If a zero is found there the report is not applicable.
    """
    if not 0 < delta < Dstar < Dstarstar:
        raise ValueError("need 0 < delta < Dstar < Dstarstar")
    params = {"delta": delta, "Dstar": Dstar, "Dstarstar": Dstarstar,
              "T": T, "beta": beta, "t_except": t_except}
    windows = []
    if ctx.F.nonzero_count() >= 2:
        f = dirichlet._psi_k_sample(ctx.F)
        for rect in _psi_windows(Dstar, Dstarstar):
            count = winding(f, rect, ctx.budget).count
            windows.append({"rect": list(rect.as_tuple()), "count": count})
    hypothesis = all(w["count"] == 0 for w in windows)
    details = {"hypothesis": "window-certified" if hypothesis else "fails",
               "psi_windows": windows}
    if not hypothesis:
        return _report("thm1_3", ctx, params, False, math.nan, 0.0, details,
                       applicable=False)
    rep = report or cached_count_report(ctx, T, max(beta, delta + 0.5))
    inside = [z for z in rep.zeros if abs(z.position.real) <= delta]
    exceptions = [z for z in inside
                  if not (z.on_line and z.multiplicity == 1)]
    late = [z for z in exceptions if abs(z.position.imag) > t_except]
    details.update({"zeros_checked": len(inside),
                    "exceptions": _zero_list(exceptions),
                    "T_used": rep.T})
    return _report("thm1_3", ctx, params, not late, len(late), 0.0, details)


def ki_main_term(T):
    return T / math.pi * math.log(T / (math.e * math.pi))


def verify_ki_count(ctx, T_list, beta=constants.BETA,
                    max_c=constants.KI_MAX_C):
    """Fit the smallest ``C`` with ``|N(T) - (T/pi) ln(T/(e pi))| <= C ln T``
    over ``T_list``; passes iff ``C <= max_c``."""
    T_list = [float(T) for T in T_list]
    if not T_list or min(T_list) < 5:
        raise ValueError("every T must be at least 5")
    rows = []
    C = 0.0
    for T in T_list:
        w = ki_count(ctx, T, beta)
        resid = abs(w.count - ki_main_term(w.rect.T2))
        C = max(C, resid / math.log(w.rect.T2))
        rows.append({"T": T, "T_used": w.rect.T2, "T_low": w.rect.T1,
                     "N": w.count, "main": ki_main_term(w.rect.T2),
                     "residual": resid})
    return _report("ki_count", ctx, {"T_list": T_list, "beta": beta},
                   C <= max_c, C, max_c, {"rows": rows})


def _certify_sigma0(ctx, sigma0, height, step=constants.SCAN_STEP):
    taus = np.arange(-height, height + step / 2, step)
    worst = math.inf
    for tau in taus:
        r = h(ctx, complex(sigma0, tau))
        if not abs(r.value) > 10.0 * r.err_estimate:
            raise Sigma0UncertifiedError(
                f"|h| not certified at {sigma0}+{tau}i")
        worst = min(worst, abs(r.value))
    return worst


def verify_master_inequality(ctx, sigma0, T):
    """``N(-sigma0, sigma0, -T, T, C_F) - N0'(T, C_F)
    <= 4 N^(0, sigma0, -(2T+2), 2T+2, h) + C_slack``.

    Zeros of ``h`` on the closed rectangle are counted by winding around
    the rectangle enlarged by ``1e-6`` on every side.
    """
    if not sigma0 > 0:
        raise ValueError("sigma0 must be positive")
    window = 2.0 * T + 2.0
    min_h = _certify_sigma0(ctx, sigma0, window)
    rep = cached_count_report(ctx, T, sigma0)
    lhs = rep.N_bar - rep.N0_prime
    rect = Rectangle(-1e-6, sigma0 + 1e-6, -window - 1e-6, window + 1e-6)
    hw = winding(lambda s: h(ctx, s), rect, ctx.budget)
    rhs = 4.0 * hw.count + constants.C_SLACK
    details = {"N": rep.N_bar, "N0_prime": rep.N0_prime, "h_zeros": hw.count,
               "h_rect": list(hw.rect.as_tuple()), "window": window,
               "min_h_on_sigma0": min_h, "C_slack": constants.C_SLACK,
               "phi": "x + 2",
               "scope": "conclusion only; hypotheses (i)-(ii) not checked"}
    return _report("master_2_5", ctx, {"sigma0": sigma0, "T": T},
                   lhs <= rhs, lhs, rhs, details)


@dataclass
class GrowthCheck:
    sigma_grid: list
    tau_range: tuple
    mu_values: list
    ratio_stats: list

    def __post_init__(self):
        for s, mu in zip(self.sigma_grid, self.mu_values):
            if mu != growth_exponent(s):
                raise ValueError("mu values disagree with the piecewise mu")

    def to_dict(self):
        return {"sigma_grid": list(self.sigma_grid),
                "tau_range": list(self.tau_range),
                "mu_values": list(self.mu_values),
                "ratio_stats": self.ratio_stats}


def _growth_2_7_stats(ctx, sigma, taus):
    k = ctx.F.k
    mu = growth_exponent(sigma)
    ratios = []
    for tau in taus:
        s = complex(sigma, tau)
        gamma_mod = math.exp((log_gamma(s - k - 1)).real)
        ratios.append(abs(h_star_neg(ctx, s).value) / (gamma_mod * tau ** mu))
    ratios = np.array(ratios)
    mx, med = float(ratios.max()), float(np.median(ratios))
    return {"sigma": sigma, "max": mx, "median": med,
            "ok": mx <= 10.0 * med}


def _growth_2_6_stats(ctx, sigma, taus, psi_floor=1e-3):
    k = ctx.F.k
    bands = np.array_split(np.asarray(taus), 3)
    dispersions, excluded = [], []
    for band in bands:
        vals = []
        for tau in band:
            s = complex(sigma, tau)
            size = dirichlet.psi_term_scale(ctx.F, s - k)
            if abs(dirichlet.psi_F(ctx.F, s - k)) < psi_floor * size:
                excluded.append(float(tau))
                continue
            vals.append(leading_ratio(ctx, s, k))
        vals = np.array(vals)
        if vals.size < 2:
            dispersions.append(math.inf)
            continue
        dispersions.append(float(np.sqrt(np.mean(
            np.abs(vals - vals.mean()) ** 2))))
    ok = all(b < 1.2 * a for a, b in zip(dispersions, dispersions[1:]))
    return {"sigma": sigma, "band_dispersions": dispersions,
            "excluded": excluded, "ok": ok}


def verify_growth(ctx, which, sigma_grid=(0.0, 0.5, 1.0, 2.0),
                  tau_range=(5.0, 40.0), samples=36):
    """Desk-scale proxies for the two growth estimates.

    ``eq2_6``: the RMS dispersion of ``h / (Gamma(s-k) psi_{F,k})`` over
    three consecutive ``tau`` bands must decrease, each band below 1.2 times
    the previous one. Samples near zeros of ``psi_{F,k}`` are excluded.

    ``eq2_7``: ``|h*(-s)| / (|Gamma(s-k-1)| |tau|^mu(sigma))`` must have its
    maximum within ten times its median for every ``sigma``.
    """
    if which not in ("eq2_6", "eq2_7"):
        raise ValueError("which must be 'eq2_6' or 'eq2_7'")
    t0, t1 = tau_range
    if not 5.0 <= t0 < t1 <= 40.0:
        raise ValueError("tau_range must lie within [5, 40]")
    if any(not 0.0 <= s <= 3.0 for s in sigma_grid):
        raise ValueError("sigma_grid must lie within [0, 3]")
    taus = np.linspace(t0, t1, samples)
    stats_fn = _growth_2_6_stats if which == "eq2_6" else _growth_2_7_stats
    stats = [stats_fn(ctx, float(s), taus) for s in sigma_grid]
    check = GrowthCheck(list(map(float, sigma_grid)), (t0, t1),
                        [growth_exponent(s) for s in sigma_grid], stats)
    failing = sum(not st["ok"] for st in stats)
    tid = "growth_2_6" if which == "eq2_6" else "growth_2_7"
    return _report(tid, ctx, {"which": which, "sigma_grid": list(sigma_grid),
                              "tau_range": [t0, t1], "samples": samples},
                   failing == 0, failing, 0.0, check.to_dict())


def _beta_grid(step=0.5, top=10.0):
    return [step * j for j in range(1, int(round(top / step)) + 1)]


def beta0_estimate(ctx, T_probe, f=None, width=3.0):
    """Empirical stand-in for the zero-free half-width ``beta0``.

    A grid value ``beta`` qualifies when the windows ``(beta, beta+width)``
    and ``(-beta-width, -beta)`` of height ``2 T_probe`` hold no zeros and the
    count over ``(-beta, beta)`` equals the count at ``beta + 0.5``. The
    result is the smallest grid value from which every larger grid value
    also qualifies.

    ``f`` defaults to ``C_F``; any callback accepted by the winding engine
    may be passed instead.

    Raises
    ------
    NotFoundError
        If ``beta = 10`` itself does not qualify.
    """
    if T_probe < 10:
        raise ValueError("T_probe must be at least 10")
    f = f or (lambda s: C_F(ctx, s))
    budget = ctx.budget if ctx is not None else None
    counts = {}

    def total(beta):
        if beta not in counts:
            counts[beta] = winding(f, Rectangle(-beta, beta, -T_probe,
                                                T_probe), budget).count
        return counts[beta]

    def qualifies(beta):
        try:
            right = winding(f, Rectangle(beta, beta + width, -T_probe,
                                         T_probe), budget).count
            left = winding(f, Rectangle(-beta - width, -beta, -T_probe,
                                        T_probe), budget).count
            return right == 0 and left == 0 and \
                total(beta) == total(beta + 0.5)
        except BoundaryUnresolvableError:
            return False

    grid = _beta_grid()
    best = None
    for beta in reversed(grid):
        if not qualifies(beta):
            break
        best = beta
    if best is None:
        raise NotFoundError("no stabilisation by beta = 10")
    return best


def _density_windows(count=20):
    """Deterministic family of windows ``(T1, T2)`` of varied length."""
    out = []
    for j in range(count):
        T1 = -45.0 + 4.7 * j
        out.append((T1, T1 + 1.0 + 2.3 * (j % 5)))
    return out


def _nearest(points, z):
    return min((abs(p - z) for p in points), default=math.inf)


def verify_prop2_1(ctx, windows=20, eps=0.02, translate_height=20.0,
                   tolerance=0.1, search_limit=1e5):
    """Zero confinement, window density and quasi-periodicity of
    ``psi_{F,k}``.

    The three parts are reported separately in ``details``; ``lhs`` is the
    number of violations. Quasi-periodicity is not applicable when no almost
    period is found below ``search_limit``.
    """
    F = ctx.F
    params = {"windows": windows, "eps": eps, "height": translate_height,
              "tolerance": tolerance, "search_limit": search_limit}
    if F.nonzero_count() < 2:
        details = {"note": "single-term psi has no zeros"}
        return _report("prop2_1", ctx, params, True, 0, 0.0, details)
    strip = dirichlet.zero_free_strip_bound(F)
    f = dirichlet._psi_k_sample(F)
    c0 = strip.c0
    confinement = [
        winding(f, Rectangle(c0, c0 + 5.0, -50.0, 50.0), ctx.budget).count,
        winding(f, Rectangle(-c0 - 5.0, -c0, -50.0, 50.0), ctx.budget).count]
    density = []
    for T1, T2 in _density_windows(windows):
        r = dirichlet.density_check(F, T1, T2, budget=ctx.budget)
        density.append({"T1": T1, "T2": T2, "count": r.count,
                        "bound": r.bound, "ok": r.ok})
    violations = sum(confinement) + sum(not d["ok"] for d in density)
    period = dirichlet.almost_period(F, eps, search_limit=search_limit)
    quasi = {"eps": eps, "period": period, "applicable": period is not None}
    if period is not None:
        base = dirichlet.dirichlet_zeros_in_rect(
            F, Rectangle(-c0, c0, 0.0, translate_height), ctx.budget)
        shifted = dirichlet.dirichlet_zeros_in_rect(
            F, Rectangle(-c0 - 1.0, c0 + 1.0, period - 1.0,
                         period + translate_height + 1.0), ctx.budget)
        targets = [z.position for z in shifted]
        dists = [_nearest(targets, z.position + 1j * period) for z in base]
        misses = sum(d > tolerance for d in dists)
        quasi.update({"zeros": len(base), "max_distance": max(dists, default=0.0),
                      "misses": misses})
        violations += misses
    details = {"c0": c0, "confinement_counts": confinement,
               "density": density, "quasi_periodicity": quasi}
    return _report("prop2_1", ctx, params, violations == 0, violations, 0.0,
                   details)


SUITES = ("all", "thm1_1", "thm1_3", "ki", "master", "decomp", "growth",
          "prop2_1")


def run_suite(ctx, suite="all", T=10.0, beta=constants.BETA, delta=0.5,
              Dstar=0.9, Dstarstar=3.0, sigma0=3.0, T_list=None, report=None):
    """Run one named suite (or all of them) and return the reports in a
    fixed order. ``report`` (a :class:`CountReport`) stands in for the
    in-process count in the Theorem 1.1 and 1.3 checks."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    want = (lambda name: suite in ("all", name))
    out = []
    if want("decomp"):
        grid = [complex(x, y) for x in np.linspace(-1, 1, 5)
                for y in np.linspace(-5, 5, 5)]
        out.append(verify_decomposition(ctx, grid))
    if want("thm1_1"):
        out.append(verify_theorem_1_1(ctx, T, beta, report))
    if want("thm1_3"):
        out.append(verify_theorem_1_3(ctx, delta, Dstar, Dstarstar, T, beta,
                                      report=report))
    if want("ki"):
        ts = T_list or sorted({max(5.0, T), max(5.0, 2 * T), max(5.0, 3 * T)})
        out.append(verify_ki_count(ctx, [t for t in ts if t <= 40] or [T],
                                   beta))
    if want("master"):
        out.append(verify_master_inequality(ctx, sigma0, T))
    if want("growth"):
        for which in ("eq2_6", "eq2_7"):
            try:
                out.append(verify_growth(ctx, which))
            except UnstableEstimateError as exc:
                out.append(_report(
                    "growth_2_6" if which == "eq2_6" else "growth_2_7", ctx,
                    {"which": which}, False, math.nan, 0.0,
                    {"error": str(exc)}))
    if want("prop2_1"):
        out.append(verify_prop2_1(ctx))
    return out


def verification_document(entries):
    """Merge ``(F, reports)`` pairs into one JSON-ready document."""
    return {"schema": constants.VERIFY_SCHEMA,
            "reports": [dict(r.to_dict(), F=[[c.real, c.imag] for c in F])
                        for F, reports in entries for r in reports]}

import math

import numpy as np
import pytest

from conftest import bessel_sign_changes
from xizeros.contour import Rectangle, winding_count
from xizeros.errors import CrowdedNeighborhoodError
from xizeros.xi import C_F, EvalContext
from xizeros.zerocount import (CountReport, ZeroRecord, classify_multiplicity,
                               count_report, ki_count, line_scan,
                               line_scan_zeros, reflection_matches,
                               zeros_from_csv, zeros_to_csv)


@pytest.fixture(scope="module")
def bessel_zeros():
    pos = bessel_sign_changes(0.0, 20.0)
    return sorted([-t for t in pos] + pos)


def test_line_scan_matches_bessel(ctx_one, bessel_zeros):
    found = [z.position.imag for z in line_scan_zeros(ctx_one, 20.0)]
    assert len(found) == len(bessel_zeros) == 10
    assert np.allclose(found, bessel_zeros, atol=1e-9)
    assert all(z.method == "line-scan" and z.on_line and z.trusted
               for z in line_scan_zeros(ctx_one, 20.0))


def test_line_scan_symmetric_for_real_F():
    for coeffs in ([1, -1], [1, -2, 1]):
        ims = [z.position.imag for z in line_scan_zeros(EvalContext.of(coeffs), 15)]
        assert np.allclose(sorted(ims), sorted(-t for t in ims), atol=1e-9)


def test_no_bracket_at_origin(ctx_one):
    assert C_F(ctx_one, 0).value.real > 0
    assert all(abs(z.position.imag) > 1 for z in line_scan_zeros(ctx_one, 5))


def test_line_scan_step_limit(ctx_one):
    with pytest.raises(ValueError):
        line_scan(ctx_one, 5, step=0.2)


def test_tangency_candidates_are_reported(monkeypatch):
    # g has a near-double zero at tau = 2.01 without a sign change
    from xizeros import zerocount
    from xizeros.numerics import QuadratureResult
    monkeypatch.setattr(zerocount, "C_F", lambda ctx, s: QuadratureResult(
        complex((s.imag - 2.01) ** 2 + 1e-6), 1e-15, 1, True))
    scan = line_scan(None, 5)
    assert scan.zeros == []
    assert any(abs(t - 2.01) < 0.05 for t in scan.tangencies)


def test_multiplicity_simple(ctx_one):
    zeros = line_scan_zeros(ctx_one, 12)
    for z in zeros:
        assert classify_multiplicity(ctx_one, z.position,
                                     known=[w.position for w in zeros]) == 1


def test_multiplicity_engine_double_zero():
    z0 = 0.4 + 2.5j
    assert winding_count(lambda s: (s - z0) ** 2, Rectangle.around(z0, 1e-6)) == 2


def test_multiplicity_crowded(ctx_one):
    z = line_scan_zeros(ctx_one, 12)[0].position
    with pytest.raises(CrowdedNeighborhoodError):
        classify_multiplicity(ctx_one, z, known=[z, z + 1e-6j])


@pytest.fixture(scope="module")
def report_one():
    return count_report(EvalContext.of([1]), 10, 2.0)


def test_count_report_bessel_case(report_one, bessel_zeros):
    expected = sum(1 for t in bessel_zeros if abs(t) < 10)
    r = report_one
    assert r.N_bar == r.N1_bar == r.N0_prime == expected
    assert r.histogram == {1: expected}
    assert r.off_line == []
    assert r.N_ki == sum(1 for t in bessel_zeros if 1 <= t < 10)


def test_count_report_below_first_zero(ctx_one):
    r = count_report(ctx_one, 5, 2.0)
    assert (r.N_bar, r.N1_bar, r.N0_prime, r.N_ki) == (0, 0, 0, 0)
    assert r.histogram == {}


def test_count_report_rejects_small_T(ctx_one):
    with pytest.raises(ValueError):
        count_report(ctx_one, 1.5, 2.0)


def test_count_report_invariants():
    with pytest.raises(ValueError):
        CountReport(2, 3, 2, 0, {1: 3}, 10, 3, 10)
    with pytest.raises(ValueError):
        CountReport(4, 2, 3, 0, {1: 1, 2: 2}, 10, 3, 10)


def test_off_line_zeros_localized():
    # F = (1,-1) has a symmetric pair of zeros off the line near Im s = 19.8
    r = count_report(EvalContext.of([1, -1]), 20, 3.0)
    assert r.N_bar == r.located_total
    assert len(r.off_line) == 4
    assert reflection_matches(r.zeros)
    for z in r.off_line:
        assert abs(C_F(EvalContext.of([1, -1]), z.position).value) < 1e-12 * \
            abs(C_F(EvalContext.of([1, -1]), z.position + 0.1).value)


def test_complex_F_full_range_scan():
    ctx = EvalContext.of([1, [0.0, 0.5]])
    r = count_report(ctx, 12, 3.0)
    assert r.N_bar == r.located_total
    assert reflection_matches(r.zeros)


def test_tiling_additivity():
    ctx = EvalContext.of([1, -1])
    f = lambda s: C_F(ctx, s)
    beta, T = 3.0, 10.0
    total = winding_count(f, Rectangle(-beta, beta, -T, T))
    xs = [-beta, 0.37, beta]
    ys = [-T, -4.3, 0.6, 5.1, T]
    tiles = [Rectangle(xs[i], xs[i + 1], ys[j], ys[j + 1])
             for i in range(2) for j in range(4)]
    assert total == sum(winding_count(f, t) for t in tiles)


def test_ki_count_edges(ctx_one):
    w = ki_count(ctx_one, 10, 2.0)
    assert w.count == 1
    assert abs(w.rect.T1 - 1) <= 0.025 and abs(w.rect.T2 - 10) <= 0.025


def test_csv_round_trip(report_one):
    text = zeros_to_csv(report_one.zeros)
    assert text.startswith("# schema: xizeros/1\n")
    back = zeros_from_csv(text)
    assert back == sorted(report_one.zeros, key=ZeroRecord.sort_key)
    with pytest.raises(ValueError):
        zeros_from_csv("re,im\n1,2\n")


def test_json_report(report_one):
    import json
    d = json.loads(report_one.to_json())
    assert d["schema"] == "xizeros/1"
    assert d["histogram"] == {"1": 2}
    assert report_one.to_json() == report_one.to_json()


def test_from_zeros_reproduces_counts(report_one):
    again = CountReport.from_zeros(zeros_from_csv(zeros_to_csv(report_one.zeros)),
                                   report_one.T, report_one.beta)
    for name in ("N_bar", "N1_bar", "N0_prime", "N_ki", "histogram"):
        assert getattr(again, name) == getattr(report_one, name)


def test_reflection_matches_detects_asymmetry():
    a = ZeroRecord(0.5 + 3j)
    assert reflection_matches([a, ZeroRecord(-0.5 + 3j)])
    assert not reflection_matches([a])

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from holonomy_lab.drill import (
    EPS2BAR, Geodesic, SurfaceSummary, chain_report, choose_curves, drill_constants, tail_bound, teo_C,
    thick_bound, thin_bound,
)
from holonomy_lab.errors import DomainError

# frozen from an independent evaluation of (4 pi / 3)(1 - sech^6(x/2))^{-1/2} at x = asinh(1/sqrt 3)
C_EPS2BAR = 9.359494375


def test_teo_C_value():
    x = math.asinh(1 / math.sqrt(3))
    assert EPS2BAR == pytest.approx(x, rel=1e-15)
    assert teo_C(EPS2BAR) == pytest.approx(C_EPS2BAR, abs=1e-9)
    assert teo_C(EPS2BAR) == pytest.approx(4 * math.pi / 3 / math.sqrt(1 - math.cosh(x / 2) ** -6), rel=1e-13)


def test_teo_C_small_argument_stable():
    # sech^6(x/2) ~ 1 - 3x^2/4: C ~ (4 pi / 3) * 2 / (sqrt 3 x)
    x = 1e-6
    assert teo_C(x) == pytest.approx(8 * math.pi / (3 * math.sqrt(3) * x), rel=1e-6)


def test_pointwise_bounds():
    assert thick_bound(0.01, EPS2BAR) == pytest.approx(0.01 * C_EPS2BAR, abs=1e-10)
    assert thin_bound(0.2, 0.04) == pytest.approx(1.0)
    assert tail_bound(0.1, 0.01) == pytest.approx(0.1 + 0.02 * C_EPS2BAR, abs=1e-10)
    with pytest.raises(DomainError):
        thin_bound(0.1, 0.0)
    with pytest.raises(DomainError):
        teo_C(-1.0)


@pytest.mark.parametrize("L0,c", [(0.1, 1.0), (0.01, 2.5), (1.0, 0.3)])
def test_drill_constants(L0, c):
    k = drill_constants(L0, c)
    D = 32 * math.exp(4 * math.pi * L0) + 8 * c * C_EPS2BAR
    assert k.D == pytest.approx(D, rel=1e-9)
    assert k.D == pytest.approx(32 * math.exp(4 * math.pi * L0) + 8 * c * teo_C(EPS2BAR), rel=1e-12)
    assert k.C1 == pytest.approx(2 * math.pi * k.D + 1, rel=1e-12)
    assert k.C0 == pytest.approx(min((1 / 64) ** 2, 1 / (128 * math.pi * k.D) ** 2, L0 / 4), rel=1e-12)


def test_D1_value():
    assert drill_constants(0.1, 1.0).D1 == pytest.approx(56.2174, abs=1e-4)


@st.composite
def consistent_summaries(draw):
    total = draw(st.floats(1e-4, 0.4))
    n = draw(st.integers(0, 6))
    weights = np.array(draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n)))
    share = draw(st.floats(0.1, 1.0))
    collars = total * np.sqrt(share * weights / weights.sum()) if n else []
    geos = []
    for k, collar in enumerate(collars):
        length = draw(st.floats(1e-4, 2 * EPS2BAR))
        inj = length / 2 * draw(st.floats(1.0, 3.0))
        sup = collar / math.sqrt(inj) * draw(st.floats(0.0, 1.0))
        geos.append(Geodesic(f"g{k}", length, float(collar), sup, inj))
    return SurfaceSummary(total, tuple(geos))


@settings(max_examples=200, deadline=None)
@given(consistent_summaries())
def test_selection_length_budget(summary):
    sel = choose_curves(summary)
    assert sel["consistent"], sel["audit_failures"]
    assert sel["length_holds"]
    assert sel["selected_length"] <= 2 * summary.total_l2 * (1 + 1e-12)


def test_inconsistent_summary_is_flagged():
    bad = SurfaceSummary(0.01, (Geodesic("a", 0.1, 0.02, 10.0, 0.01),))
    sel = choose_curves(bad)
    assert not sel["consistent"]
    assert {f["message"] for f in sel["audit_failures"]} >= {"collar norm exceeds the total"}


def test_thick_case_reports_claimed_constant():
    sel = choose_curves(SurfaceSummary(0.01, ()))
    assert sel["thick_case"]["C_eps2bar"] == pytest.approx(C_EPS2BAR, abs=1e-9)
    assert sel["thick_case"]["C_eps2bar_claimed"] == 1.1


def test_chain_holds_below_C0():
    k = drill_constants(0.1, 1.0)
    rep = chain_report(SurfaceSummary(k.C0), k)
    assert rep.holds
    assert not any(s.conditional for s in rep.steps)
    assert not rep.step("bootstrap_gap").holds  # 1/64 > 1/36 - 1/64


def test_chain_conditional_above_C0():
    k = drill_constants(0.1, 1.0)
    rep = chain_report(SurfaceSummary(2 * k.C0), k)
    assert not rep.step("hypothesis").holds
    assert all(s.conditional for s in rep.steps[1:] if s.kind != "audit")


def test_chain_monotone_in_total():
    k = drill_constants(0.1, 1.0)
    totals = np.geomspace(k.C0 * 1e-3, k.C0 * 1e3, 40)
    reports = [chain_report(SurfaceSummary(t), k) for t in totals]
    holds = [r.holds for r in reports]
    # once the chain fails it stays failed
    assert holds == sorted(holds, reverse=True)
    for name in ("complement_bound", "bootstrap_threshold", "final"):
        lhs = [r.step(name).lhs for r in reports]
        assert np.all(np.diff(lhs) >= 0)


def test_summary_json_roundtrip_and_strict_keys():
    s = SurfaceSummary(0.01, (Geodesic("a", 0.1, 0.005, 0.01, 0.06),))
    assert SurfaceSummary.from_json(json.dumps(s.to_dict())) == s
    with pytest.raises(DomainError):
        SurfaceSummary.from_dict({"total_l2": 0.1, "extra": 1})
    with pytest.raises(DomainError):
        SurfaceSummary.from_dict({"total_l2": 0.1, "geodesics": [{"name": "a", "length": 1}]})


def test_report_serializes():
    k = drill_constants(0.1, 1.0)
    data = json.loads(chain_report(SurfaceSummary(k.C0 / 2), k).to_json())
    assert data["holds"] is True
    assert "C0_for_corrected_bootstrap" in data["info"]

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gicflow.field import FieldScenario
from gicflow.grid import Transformer, TransformerConfig as C
from gicflow.gsu import identify_gsus, synchronize_gsu_status
from gicflow.metrics import (DeltaQuantity, DeltaStats, compare_scenarios, delta_distribution,
                             effective_gic, format_pct, percent_error, qloss, qloss_totals_diff,
                             threshold_boundary, threshold_report)
from gicflow.solver import solve_scenario

from conftest import EAST, NORTH
from oracle import dense_solve


def xf(cfg, k=1.0):
    return Transformer("T", "H", "L", cfg, 0.1, 0.1, k_factor=k)


def test_effective_gic_gwye_delta():
    assert effective_gic(xf(C.GWYE_DELTA), (300.0, 0.0), (230.0, 13.8)) == 100.0
    assert effective_gic(xf(C.GWYE_DELTA_GSU), (-300.0, 55.0), (230.0, 13.8)) == 100.0


def test_effective_gic_gwye_gwye():
    assert effective_gic(xf(C.GWYE_GWYE), (300.0, 0.0), (230.0, 115.0)) == 100.0
    # ampere-turn balance: a = 2, I_L contributes -150/2
    assert effective_gic(xf(C.GWYE_GWYE), (300.0, -150.0), (230.0, 115.0)) == 75.0


def test_effective_gic_auto():
    # (345-138)*I_S + 138*I_C over 3*345
    got = effective_gic(xf(C.AUTO), (90.0, 300.0), (345.0, 138.0))
    assert got == pytest.approx((207 * 90 + 138 * 300) / (3 * 345))


def test_effective_gic_delta_delta_is_zero():
    assert effective_gic(xf(C.DELTA_DELTA), (10.0, 10.0), (34.5, 12.47)) == 0.0


def test_unknown_configuration_raises():
    bad = replace(xf(C.AUTO), configuration="Zigzag")
    with pytest.raises(ValueError):
        effective_gic(bad, (1.0, 1.0), (2.0, 1.0))


@settings(max_examples=100)
@given(st.sampled_from(list(C)), st.floats(-1e4, 1e4), st.floats(-1e4, 1e4),
       st.floats(40, 765), st.floats(0.1, 1.0))
def test_effective_gic_sign_flip_invariant(cfg, ih, il, kvh, ratio):
    t = xf(cfg)
    kvs = (kvh, kvh * ratio)
    assert effective_gic(t, (ih, il), kvs) == effective_gic(t, (-ih, -il), kvs)


def test_qloss_values():
    assert qloss(xf(C.GWYE_DELTA, k=0.0), 100.0) == 0.0
    assert qloss(xf(C.GWYE_DELTA, k=1.8), 100.0, 1.0) == pytest.approx(180.0)
    with pytest.raises(ValueError):
        qloss(xf(C.GWYE_DELTA, k=-1.0), 1.0)


@given(st.floats(0, 1e4), st.floats(0, 100), st.floats(0.5, 1.5))
def test_qloss_linear(i, c, v):
    t = xf(C.GWYE_DELTA, k=1.3)
    assert qloss(t, c * i, v) == pytest.approx(c * qloss(t, i, v), rel=1e-12, abs=1e-12)


@settings(max_examples=50)
@given(st.lists(st.floats(0, 1e3), max_size=20), st.randoms(use_true_random=False))
def test_qloss_totals_permutation_invariant(values, rnd):
    t = xf(C.GWYE_DELTA, k=0.7)
    q = [qloss(t, v) for v in values]
    shuffled = q[:]
    rnd.shuffle(shuffled)
    assert math.fsum(q) == math.fsum(shuffled)


def test_threshold_report(six):
    east = solve_scenario(six, EAST)
    north = solve_scenario(six, NORTH)
    assert threshold_report(solve_scenario(six, FieldScenario(1.0, 90.0))) == []
    # tuned with the dense oracle: north field puts only T26 (99.9 A/phase) above 75 A
    assert threshold_report(north) == ["T26"]
    assert threshold_report(east) == ["T15", "T34"]
    nonzero = sorted(t for t, v in east.effective_gic_per_phase.items() if v > 0)
    assert threshold_report(east, 0.0) == nonzero


def test_threshold_fixture_against_oracle(six):
    from gicflow.field import induced_emfs
    ref = dense_solve(six, {e.branch_id: e.emf_volts for e in induced_emfs(six, NORTH)})
    eff = {t: effective_gic(six.transformer_by_id[t], ref["winding"][t],
                            (six.bus_by_id[six.transformer_by_id[t].bus_high].nominal_kv,
                             six.bus_by_id[six.transformer_by_id[t].bus_low].nominal_kv))
           for t in ref["winding"]}
    assert sorted(t for t, v in eff.items() if v > 75) == ["T26"]


def test_threshold_is_strict_and_boundary_reported(six):
    sol = solve_scenario(six, NORTH)
    sol.effective_gic_per_phase["T15"] = 75.0
    assert "T15" not in threshold_report(sol)
    assert threshold_boundary(sol) == ["T15"]


@settings(max_examples=50)
@given(st.dictionaries(st.text("abc", min_size=1, max_size=3), st.floats(0, 200), max_size=8),
       st.floats(0, 50))
def test_threshold_monotone(eff, bump):
    class S:
        pass
    lo, hi = S(), S()
    lo.effective_gic_per_phase = eff
    hi.effective_gic_per_phase = {k: v + bump for k, v in eff.items()}
    assert set(threshold_report(lo)) <= set(threshold_report(hi))


def test_loss_totals_difference_and_display():
    diff, pct = qloss_totals_diff(7557, 7806)
    assert diff == 249
    assert format_pct(pct) == "3.2%"


def test_loss_totals_rounding_is_half_up():
    diff, pct = qloss_totals_diff(3796, 4495)
    assert diff == 699
    assert pct == pytest.approx(100 * 699 / 4495)
    # 15.5506...% rounds half-up to 15.6 at one decimal
    assert format_pct(pct) == "15.6%"


def test_percent_error_zero_denominator():
    assert percent_error(0.0, 0.0) == 0.0
    assert math.isnan(percent_error(1.0, 0.0))


def test_delta_distribution_identity(six):
    s = solve_scenario(six, EAST)
    d = delta_distribution(s, s)
    assert d.counts == (3,)
    assert d.stats.mean_abs == d.stats.max_abs == d.stats.std_abs == 0.0


def test_delta_stats_two_elements():
    st_ = DeltaStats.of([3.0, -5.0])
    assert st_.mean_abs == 4.0 and st_.max_abs == 5.0
    assert st_.std_abs == pytest.approx(math.sqrt(2.0))


def test_delta_distribution_bins():
    class S:
        def __init__(self, values):
            self.neutral_gic = values
            self.branch_gic_per_phase = values
    a = S({"x": 0.0, "y": 0.0, "z": 0.0})
    b = S({"x": 0.4, "y": -2.5, "z": 1.0})
    d = delta_distribution(a, b, DeltaQuantity.BRANCH_GIC)
    assert d.counts == (1, 1, 1)
    assert d.bin_edges == (0.0, 1.0, 2.0, 3.0)
    d2 = delta_distribution(a, b, bin_width=0.5)
    assert d2.counts == (1, 0, 1, 0, 0, 1)


def test_delta_distribution_id_mismatch(six):
    s = solve_scenario(six, EAST)
    t = solve_scenario(six, EAST)
    t.neutral_gic.pop("T15")
    with pytest.raises(ValueError):
        delta_distribution(s, t)


def test_six_bus_comparison_against_oracle(six):
    from gicflow.field import induced_emfs
    m_out = synchronize_gsu_status(six, identify_gsus(six))
    s_in, s_out = solve_scenario(six, EAST), solve_scenario(m_out, EAST)
    diff = compare_scenarios(s_in, s_out, six, m_out)
    assert diff.common_transformers == {"T15", "T34"}

    emf = {e.branch_id: e.emf_volts for e in induced_emfs(six, EAST)}
    r_in, r_out = dense_solve(six, emf), dense_solve(m_out, emf)
    neutral = [abs(r_out["neutral"][t] - r_in["neutral"][t]) for t in sorted(r_in["neutral"])]
    branch = [abs(r_out["branch"][b] - r_in["branch"][b]) for b in sorted(r_in["branch"])]
    assert diff.neutral_delta_stats.mean_abs == pytest.approx(np.mean(neutral), rel=1e-10)
    assert diff.neutral_delta_stats.max_abs == pytest.approx(np.max(neutral), rel=1e-10)
    assert diff.neutral_delta_stats.std_abs == pytest.approx(np.std(neutral, ddof=1), rel=1e-10)
    assert diff.branch_delta_stats.mean_abs == pytest.approx(np.mean(branch), rel=1e-10)
    assert diff.branch_delta_stats.max_abs == pytest.approx(np.max(branch), rel=1e-10)

    def q(ref, model, t):
        x = model.transformer_by_id[t]
        kv = (model.bus_by_id[x.bus_high].nominal_kv, model.bus_by_id[x.bus_low].nominal_kv)
        return qloss(x, effective_gic(x, ref["winding"][t], kv), model.bus_by_id[x.bus_high].voltage_pu)

    q_in = sum(q(r_in, six, t) for t in ("T15", "T34"))
    q_out = sum(q(r_out, m_out, t) for t in ("T15", "T34"))
    assert diff.qloss_in == pytest.approx(q_in, rel=1e-10)
    assert diff.qloss_out == pytest.approx(q_out, rel=1e-10)
    assert diff.qloss_error_pct == pytest.approx(100 * (q_out - q_in) / q_out, rel=1e-8)
    assert set(diff.per_area_error_pct) == {"East", "West"}


def test_identical_scenarios_compare_to_zero(six):
    s = solve_scenario(six, EAST)
    diff = compare_scenarios(s, s, six, six)
    assert diff.qloss_difference == 0.0 and diff.qloss_error_pct == 0.0
    assert diff.neutral_delta_stats == DeltaStats(0.0, 0.0, 0.0, 3)
    assert diff.threshold_count_in == diff.threshold_count_out


def test_swapping_scenarios_negates_difference(six):
    m_out = synchronize_gsu_status(six, identify_gsus(six))
    s_in, s_out = solve_scenario(six, EAST), solve_scenario(m_out, EAST)
    a = compare_scenarios(s_in, s_out, six, m_out)
    b = compare_scenarios(s_out, s_in, m_out, six)
    assert a.qloss_difference == -b.qloss_difference
    assert a.common_transformers == b.common_transformers


def test_mismatched_grids_rejected(six, loop_model):
    s = solve_scenario(six, EAST)
    with pytest.raises(ValueError):
        compare_scenarios(s, s, six, loop_model)

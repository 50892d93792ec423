import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memfuse import (FuseState, Linear, MemristorState, OddPolynomial,
                     PulseTrain, SolverError, StateBounds, apply_fuse_pulse,
                     device_current, fuse_read_resistance, preset,
                     run_pulse_train, saturate, solve_divider, summarize_train)
from memfuse.device import Asymmetric


def preset_fuse() -> FuseState:
    p1, p2 = preset("M1"), preset("M2")
    return FuseState(
        fwd=MemristorState(r=p2.base_r, bounds=p2.bounds, params=p2.params),
        rev=MemristorState(r=p1.base_r, bounds=p1.bounds, params=p1.params))


def wide_fuse(r_fwd: float, r_rev: float, iv=None) -> FuseState:
    p1, p2 = preset("M1"), preset("M2")
    b = StateBounds(1.0, 1e7)
    kw = {} if iv is None else {"iv": iv}
    return FuseState(
        fwd=MemristorState(r=r_fwd, bounds=b, params=p2.params, **kw),
        rev=MemristorState(r=r_rev, bounds=b, params=p1.params, **kw))


class TestSolveDivider:
    def test_closed_form_example(self):
        assert solve_divider(wide_fuse(900.0, 400.0), 2.5) == pytest.approx(
            1.7307692307692308, abs=1e-15)

    def test_negative_saturation_example(self):
        fuse = saturate(preset_fuse(), -1)
        assert solve_divider(fuse, 2.0) == pytest.approx(
            1.0649350649350648, abs=1e-15)

    def test_bracket_agrees_with_closed(self):
        fuse = saturate(preset_fuse(), -1)
        closed = solve_divider(fuse, 2.0, method="closed")
        bracket = solve_divider(fuse, 2.0, method="bracket")
        assert bracket == pytest.approx(closed, rel=1e-12)

    def test_closed_method_rejects_nonlinear(self):
        fuse = wide_fuse(900.0, 400.0, iv=OddPolynomial(c3=0.1))
        with pytest.raises(ValueError):
            solve_divider(fuse, 2.0, method="closed")

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            solve_divider(preset_fuse(), 2.0, method="nope")

    def test_nonlinear_residual(self):
        fuse = wide_fuse(4500.0, 3300.0, iv=OddPolynomial(c3=0.1))
        v_x = solve_divider(fuse, 2.0)
        res = (device_current(fuse.fwd.iv, fuse.fwd.r, v_x)
               + device_current(fuse.rev.iv, fuse.rev.r, v_x - 2.0))
        assert abs(res) < 1e-12

    def test_zero_bias(self):
        assert solve_divider(preset_fuse(), 0.0) == 0.0

    @settings(max_examples=200)
    @given(r_fwd=st.floats(min_value=10.0, max_value=1e6),
           r_rev=st.floats(min_value=10.0, max_value=1e6),
           v_b=st.floats(min_value=-5.0, max_value=5.0))
    def test_vx_within_bracket(self, r_fwd, r_rev, v_b):
        v_x = solve_divider(wide_fuse(r_fwd, r_rev), v_b)
        assert min(0.0, v_b) <= v_x <= max(0.0, v_b)


class TestReadout:
    def test_linear_read_is_sum(self):
        fuse = saturate(preset_fuse(), -1)
        assert fuse_read_resistance(fuse) == 7700.0

    def test_asymmetric_read_is_not_sum(self):
        iv = Asymmetric(c3_fwd=0.4, c3_rev=0.0)
        fuse = wide_fuse(4500.0, 3300.0, iv=iv)
        assert fuse_read_resistance(fuse) != pytest.approx(7800.0, abs=1e-6)


class TestPulse:
    def test_worked_example(self):
        fuse = saturate(preset_fuse(), -1)
        new, rec = apply_fuse_pulse(fuse, 2.0)
        assert rec.v_x == pytest.approx(1.0649350649350648, abs=1e-15)
        assert new.fwd.r == pytest.approx(4100.0 + 55.35512880080956,
                                          abs=1e-12)
        assert new.rev.r == pytest.approx(3600.0 - 15.815203049418118,
                                          abs=1e-12)
        assert rec.r_fuse == pytest.approx(new.fwd.r + new.rev.r, abs=1e-12)
        assert rec.pulse_index == 0
        assert rec.v_b == 2.0

    def test_dead_bias_is_identity(self):
        fuse = preset_fuse()
        new, _ = apply_fuse_pulse(fuse, 0.3)
        assert (new.fwd.r, new.rev.r) == (fuse.fwd.r, fuse.rev.r)


class TestSaturate:
    def test_positive(self):
        sat = saturate(preset_fuse(), +1)
        assert (sat.fwd.r, sat.rev.r) == (4900.0, 3000.0)

    def test_negative(self):
        sat = saturate(preset_fuse(), -1)
        assert (sat.fwd.r, sat.rev.r) == (4100.0, 3600.0)

    def test_zero_polarity_rejected(self):
        with pytest.raises(ValueError):
            saturate(preset_fuse(), 0)

    def test_saturation_is_fixed_under_more_pulses(self):
        sat = saturate(preset_fuse(), +1)
        end, _ = run_pulse_train(sat, PulseTrain(1.30, 50))
        assert (end.fwd.r, end.rev.r) == (4900.0, 3000.0)


class TestTrains:
    def test_train_validation(self):
        assert PulseTrain(1.3, 0).count == 0  # empty train is a no-op
        with pytest.raises(ValueError):
            PulseTrain(1.3, -5)
        with pytest.raises(ValueError):
            PulseTrain(float("nan"), 5)

    def test_global_pulse_indices(self):
        fuse = saturate(preset_fuse(), -1)
        _, traj = run_pulse_train(fuse, [PulseTrain(1.30, 3),
                                         PulseTrain(-2.70, 2)])
        assert [r.pulse_index for r in traj.records] == [0, 1, 2, 3, 4]
        assert [r.v_b for r in traj.records] == [1.30] * 3 + [-2.70] * 2

    def test_dip_and_recovery_trace(self):
        fuse = saturate(preset_fuse(), -1)
        end, traj = run_pulse_train(fuse, PulseTrain(1.30, 5000))
        rs = traj.r_fuse_series()
        assert min(rs) == pytest.approx(7358.410157659035, abs=1e-9)
        assert rs.index(min(rs)) == 938
        assert rs[-1] == pytest.approx(8046.219206292026, abs=1e-9)
        assert end.fwd.r == 4900.0  # forward device saturates high

    def test_reset_train_returns_to_negative_saturation(self):
        fuse = saturate(preset_fuse(), -1)
        end, traj = run_pulse_train(fuse, [PulseTrain(1.30, 5000),
                                           PulseTrain(-2.70, 1500)])
        assert traj.r_fuse_series()[-1] == 7700.0
        assert (end.fwd.r, end.rev.r) == (4100.0, 3600.0)

    def test_summary_matches_full_trajectory(self):
        fuse = saturate(preset_fuse(), -1)
        end_s, summary = summarize_train(fuse, 1.30, 5000)
        end_t, traj = run_pulse_train(fuse, PulseTrain(1.30, 5000))
        rs = traj.r_fuse_series()
        # same arithmetic on both paths: exact equality expected, not approx
        assert summary.r_min == min(rs)
        assert summary.min_index == rs.index(min(rs))
        assert summary.r_final == rs[-1]
        assert (end_s.fwd.r, end_s.rev.r) == (end_t.fwd.r, end_t.rev.r)
        assert summary.net_fwd == end_t.fwd.r - fuse.fwd.r
        assert summary.net_rev == end_t.rev.r - fuse.rev.r

    def test_summary_generic_path_matches_fast_path(self):
        p1, p2 = preset("M1"), preset("M2")
        iv = OddPolynomial(c3=0.05)
        fuse_nl = FuseState(
            fwd=MemristorState(r=4100.0, bounds=p2.bounds, params=p2.params,
                               iv=iv),
            rev=MemristorState(r=3600.0, bounds=p1.bounds, params=p1.params,
                               iv=iv))
        end, summary = summarize_train(fuse_nl, 1.30, 200)
        end_t, traj = run_pulse_train(fuse_nl, PulseTrain(1.30, 200))
        assert summary.r_final == traj.r_fuse_series()[-1]
        assert summary.r_min == min(traj.r_fuse_series())

    def test_initial_state_counts_as_minimum_candidate(self):
        # monotone-up train never dips below the starting resistance
        fuse = saturate(preset_fuse(), -1)
        _, summary = summarize_train(fuse, 2.5, 100)
        assert summary.min_index == -1
        assert summary.r_min == summary.r_initial

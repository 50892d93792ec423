import numpy as np
import pytest

from memfuse import (FitError, MemristorState, SensitivitySample, StateBounds,
                     fit_switching_params, preset, run_characterization,
                     switching_delta)


def wide_m1(r: float = 1e5) -> MemristorState:
    p = preset("M1")
    return MemristorState(r=r, bounds=StateBounds(100.0, 1e6), params=p.params)


def ideal_samples(ramp=None) -> list[SensitivitySample]:
    if ramp is None:
        ramp = [round(-2.0 + 0.05 * k, 10) for k in range(91)]
    return run_characterization(wide_m1(), ramp)


class TestPresets:
    def test_m1_values(self):
        p = preset("M1")
        assert (p.params.a_plus, p.params.a_minus) == (235.2, -91.8)
        assert (p.params.v_th_plus, p.params.v_th_minus) == (1.07, -0.52)
        assert (p.bounds.r_floor, p.bounds.r_ceiling) == (3000.0, 3600.0)
        assert p.base_r == 3300.0

    def test_m2_values(self):
        p = preset("M2")
        assert (p.params.a_plus, p.params.a_minus) == (439.4, -298.2)
        assert (p.params.v_th_plus, p.params.v_th_minus) == (0.71, -0.45)
        assert (p.bounds.r_floor, p.bounds.r_ceiling) == (4100.0, 4900.0)
        assert p.base_r == 4500.0

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            preset("M3")


class TestCharacterization:
    def test_deltas_match_model_with_carried_state(self):
        dev = wide_m1()
        ramp = [-2.0, -1.0, 0.0, 1.5, 2.0]
        samples = run_characterization(dev, ramp)
        # state carries across trains but, far from the bounds, each
        # measured delta equals the model's response at that amplitude
        for s in samples:
            assert s.delta_r == pytest.approx(
                switching_delta(dev.params, s.v), abs=1e-9)

    def test_state_actually_carries(self):
        dev = wide_m1(r=1e5)
        samples = run_characterization(dev, [2.0, 2.0])
        moved = 1e5 + samples[0].delta_r
        assert moved != 1e5
        # the probe device itself is unchanged (a working copy ran the ramp)
        assert dev.r == 1e5

    def test_pulses_per_train_normalizes_delta(self):
        one = run_characterization(wide_m1(), [1.5], pulses_per_train=1)
        many = run_characterization(wide_m1(), [1.5], pulses_per_train=4)
        assert many[0].delta_r == pytest.approx(one[0].delta_r, rel=1e-12)

    def test_clamped_device_reports_distorted_deltas(self):
        p = preset("M1")
        dev = MemristorState(r=p.base_r, bounds=p.bounds, params=p.params)
        samples = run_characterization(dev, [-2.0, -2.0, -2.0])
        # -201.07 ohm of model delta, but the floor is only 300 ohm away
        assert samples[1].delta_r > switching_delta(p.params, -2.0)


class TestFit:
    def test_noiseless_round_trip(self):
        fit = fit_switching_params(ideal_samples())
        p = fit.params
        assert p.a_plus == pytest.approx(235.2, rel=1e-9)
        assert p.a_minus == pytest.approx(-91.8, rel=1e-9)
        assert p.v_th_plus == pytest.approx(1.07, abs=1e-9)
        assert p.v_th_minus == pytest.approx(-0.52, abs=1e-9)
        assert fit.rss < 1e-12
        assert fit.n_samples == 91
        assert fit.missing == ()

    def test_noisy_fit_stays_close(self):
        rng = np.random.default_rng(3)
        noisy = [SensitivitySample(s.v, s.delta_r + rng.uniform(-5.0, 5.0))
                 for s in ideal_samples()]
        p = fit_switching_params(noisy).params
        assert p.v_th_plus == pytest.approx(1.07, abs=0.05)
        assert p.v_th_minus == pytest.approx(-0.52, abs=0.05)
        assert p.a_plus == pytest.approx(235.2, rel=0.05)
        assert p.a_minus == pytest.approx(-91.8, rel=0.05)

    def test_weights_downweight_outliers(self):
        samples = ideal_samples()
        spoiled = list(samples)
        spoiled[-1] = SensitivitySample(samples[-1].v,
                                        samples[-1].delta_r + 400.0)
        bad = fit_switching_params(spoiled).params
        weighted = [SensitivitySample(s.v, s.delta_r,
                                      weight=1e-6 if i == len(spoiled) - 1
                                      else 1.0)
                    for i, s in enumerate(spoiled)]
        good = fit_switching_params(weighted).params
        assert abs(good.a_plus - 235.2) < abs(bad.a_plus - 235.2)

    def test_empty_input_rejected(self):
        with pytest.raises(FitError):
            fit_switching_params([])

    def test_all_zero_deltas_rejected(self):
        flat = [SensitivitySample(v, 0.0) for v in (-0.4, -0.2, 0.0, 0.2,
                                                    0.4)]
        with pytest.raises(FitError):
            fit_switching_params(flat)

    def test_one_sided_data_flags_missing_polarity(self):
        pos_only = [s for s in ideal_samples() if s.v >= 0.0]
        fit = fit_switching_params(pos_only)
        assert "negative" in fit.missing
        assert fit.params is None
        assert fit.a_plus == pytest.approx(235.2, rel=1e-6)
        assert fit.v_th_plus == pytest.approx(1.07, abs=1e-6)

    def test_sample_validation(self):
        with pytest.raises(ValueError):
            SensitivitySample(float("nan"), 1.0)
        with pytest.raises(ValueError):
            SensitivitySample(1.0, 1.0, weight=-2.0)

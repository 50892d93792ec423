"""Switching-plot characterization and parameter fitting.

Characterization mimics the bench protocol: a ramp of pulse-train amplitudes
is applied to one device, reading the resistive state at +0.2 V before and
after each train; the per-pulse resistance change against amplitude is the
device's voltage-sensitivity plot.  Fitting inverts that plot back into the
four switching parameters with a grid-plus-golden-section threshold search
and closed-form least squares for the quadratic scales.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .device import (MemristorState, StateBounds, SwitchingParams, apply_pulse,
                     read_resistance)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_GRID_STEP = 0.01  # V, threshold grid granularity before refinement


class FitError(ValueError):
    """Raised when the data cannot identify any switching threshold."""


@dataclass(frozen=True)
class SensitivitySample:
    """One switching-plot point: amplitude (V), per-pulse delta (ohm), weight."""

    v: float
    delta_r: float
    weight: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.v) and math.isfinite(self.delta_r)):
            raise ValueError("sample values must be finite")
        if self.weight < 0:
            raise ValueError("weight must be nonnegative")


@dataclass(frozen=True)
class DevicePreset:
    params: SwitchingParams
    bounds: StateBounds
    base_r: float


def preset(name: str) -> DevicePreset:
    """Bundled device parameter sets, keyed by name ("M1", "M2")."""
    table = {
        "M1": DevicePreset(
            params=SwitchingParams(a_plus=235.2, a_minus=-91.8,
                                   v_th_plus=1.07, v_th_minus=-0.52),
            bounds=StateBounds(r_floor=3000.0, r_ceiling=3600.0),
            base_r=3300.0),
        "M2": DevicePreset(
            params=SwitchingParams(a_plus=439.4, a_minus=-298.2,
                                   v_th_plus=0.71, v_th_minus=-0.45),
            bounds=StateBounds(r_floor=4100.0, r_ceiling=4900.0),
            base_r=4500.0),
    }
    if name not in table:
        raise ValueError(f"unknown preset {name!r}; available: {sorted(table)}")
    return table[name]


def run_characterization(device: MemristorState, ramp,
                         pulses_per_train: int = 1) -> list[SensitivitySample]:
    """Apply a ramp of pulse trains to a working copy and record the plot.

    Each ramp entry is one train of pulses_per_train identical pulses; the
    recorded delta is (read-after - read-before) / pulses_per_train, so the
    samples share the per-pulse normalization of the switching model.  The
    working copy carries its state from train to train, as the physical
    protocol does — keep the ramp inside the device's comfortable range (or
    use wide bounds) if clamping must not distort the samples.
    """
    if pulses_per_train < 1:
        raise ValueError("pulses_per_train must be >= 1")
    samples: list[SensitivitySample] = []
    state = device
    for amplitude in ramp:
        r_before = read_resistance(state)
        for _ in range(pulses_per_train):
            state = apply_pulse(state, amplitude)
        r_after = read_resistance(state)
        samples.append(SensitivitySample(
            v=float(amplitude), delta_r=(r_after - r_before) / pulses_per_train))
    return samples


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters plus diagnostics.

    params is None when a polarity had too little data; the fitted side's
    values are still populated and the missing side is named in `missing`.
    """

    params: SwitchingParams | None
    a_plus: float | None
    a_minus: float | None
    v_th_plus: float | None
    v_th_minus: float | None
    rss: float
    n_samples: int
    missing: tuple[str, ...] = ()


def _side_cost(t: float, v: np.ndarray, d: np.ndarray, w: np.ndarray,
               positive: bool) -> tuple[float, float]:
    """(weighted RSS, scale) for one polarity at candidate threshold t.

    Samples beyond the threshold fit a * (v - t)**2 by weighted least squares
    (closed form — the model is linear in a); samples between 0 and the
    threshold are dead-zone points and contribute their full deviation from
    zero, which is what lets noisy near-zero data pin the threshold down.
    """
    if positive:
        active = v > t
        dead = (v >= 0.0) & ~active
    else:
        active = v < t
        dead = (v <= 0.0) & ~active
    x = (v[active] - t) ** 2
    wa = w[active]
    den = float(np.dot(wa * x, x))
    a = float(np.dot(wa * d[active], x)) / den if den > 0 else 0.0
    # enforce the sign convention; a wrong-signed optimum pays for it in RSS
    a = max(a, 1e-12) if positive else min(a, -1e-12)
    rss = float(np.dot(wa, (d[active] - a * x) ** 2)
                + np.dot(w[dead], d[dead] ** 2))
    return rss, a


def _fit_side(v: np.ndarray, d: np.ndarray, w: np.ndarray,
              positive: bool) -> tuple[float, float, float] | None:
    """Grid search + golden-section refine of one polarity's threshold.

    Returns (a, v_th, rss), or None when fewer than two samples ever sit
    strictly beyond a candidate threshold.  Candidates are walked outward
    from zero so RSS ties resolve toward the smaller |threshold|.
    """
    span = v.max() if positive else v.min()
    if (positive and span <= 0) or (not positive and span >= 0):
        return None
    n_steps = int(round(abs(span) / _GRID_STEP))
    cands = [i * _GRID_STEP * (1 if positive else -1) for i in range(n_steps + 1)]
    cands = [t for t in cands
             if (np.sum(v > t) if positive else np.sum(v < t)) >= 2]
    if not cands:
        return None

    costs = [_side_cost(t, v, d, w, positive)[0] for t in cands]
    best = int(np.argmin(costs))
    lo = cands[max(best - 1, 0)]
    hi = cands[min(best + 1, len(cands) - 1)]
    lo, hi = min(lo, hi), max(lo, hi)

    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = _side_cost(x1, v, d, w, positive)[0]
    f2 = _side_cost(x2, v, d, w, positive)[0]
    for _ in range(80):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = _side_cost(x1, v, d, w, positive)[0]
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = _side_cost(x2, v, d, w, positive)[0]
    t = 0.5 * (lo + hi)
    rss, a = _side_cost(t, v, d, w, positive)
    return a, t, rss


def fit_switching_params(data: list[SensitivitySample]) -> FitResult:
    """Fit the four-parameter switching model to sensitivity samples.

    Raises FitError when the data carry no switching signal at all; a single
    missing polarity degrades to a partial fit (params=None, side flagged)
    rather than inventing numbers.
    """
    if not data:
        raise FitError("no samples")
    v = np.array([s.v for s in data], dtype=float)
    d = np.array([s.delta_r for s in data], dtype=float)
    w = np.array([s.weight for s in data], dtype=float)
    if not np.any(d != 0.0):
        raise FitError("all deltas are zero: no threshold identifiable")

    pos = _fit_side(v, d, w, positive=True)
    neg = _fit_side(v, d, w, positive=False)
    if pos is None and neg is None:
        raise FitError("insufficient samples on both polarities")

    missing: list[str] = []
    a_p = t_p = a_m = t_m = None
    rss = 0.0
    if pos is None:
        missing.append("positive")
    else:
        a_p, t_p, r = pos
        rss += r
    if neg is None:
        missing.append("negative")
    else:
        a_m, t_m, r = neg
        rss += r

    params = None
    if not missing:
        params = SwitchingParams(a_plus=a_p, a_minus=a_m,
                                 v_th_plus=t_p, v_th_minus=t_m)
    return FitResult(params=params, a_plus=a_p, a_minus=a_m,
                     v_th_plus=t_p, v_th_minus=t_m, rss=rss,
                     n_samples=len(data), missing=tuple(missing))

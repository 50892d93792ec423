"""Anti-serial two-device fuse.

Two memristors are connected back-to-back, so a fuse bias v_b splits into a
divider voltage v_x across the forward device while the reverse device sees
-(v_b - v_x) in its own reference frame.  Under positive bias the forward
device is pushed up in resistance (reset) and the reverse device down (set);
the roles mirror under negative bias.  This module provides the divider
solver, the synchronous per-pulse update, pulse-train simulation with full
trajectories, whole-fuse read-out, and ideal saturation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .device import (Linear, MemristorState, NoWindow, apply_pulse,
                     device_current, effective_delta, read_resistance,
                     switching_delta)

RESIDUAL_TOL = 1e-12  # amps


class SolverError(RuntimeError):
    """Divider solve failed to converge; carries the final residual (A)."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual={residual:.3e} A)")
        self.residual = residual


@dataclass(frozen=True)
class FuseState:
    """The anti-serial pair: fwd sees +v_x, rev sees -(v_b - v_x)."""

    fwd: MemristorState
    rev: MemristorState

    def with_resistances(self, r_fwd: float, r_rev: float) -> "FuseState":
        return FuseState(self.fwd.with_r(r_fwd), self.rev.with_r(r_rev))


@dataclass(frozen=True)
class PulseTrain:
    """A run of identical pulses: signed amplitude, count, width (metadata)."""

    amplitude: float
    count: int
    width: float = 100e-6

    def __post_init__(self) -> None:
        if not math.isfinite(self.amplitude):
            raise ValueError("train amplitude must be finite")
        if self.count < 0:
            raise ValueError("train count must be >= 0")


@dataclass(frozen=True)
class StepRecord:
    """Post-pulse snapshot: divider voltage used plus read-out resistances."""

    pulse_index: int
    v_b: float
    v_x: float
    r_fwd: float
    r_rev: float
    r_fuse: float


@dataclass(frozen=True)
class Trajectory:
    initial: FuseState
    records: tuple[StepRecord, ...]
    trains: tuple[PulseTrain, ...]

    def r_fuse_series(self) -> list[float]:
        return [rec.r_fuse for rec in self.records]


def _closed_form_vx(r_fwd: float, r_rev: float, v_b: float) -> float:
    return v_b * r_fwd / (r_fwd + r_rev)


def _is_linear(fuse: FuseState) -> bool:
    return isinstance(fuse.fwd.iv, Linear) and isinstance(fuse.rev.iv, Linear)


def solve_divider(fuse: FuseState, v_b: float, method: str = "auto") -> float:
    """Divider voltage v_x across the forward device under fuse bias v_b.

    v_x satisfies I_fwd(v_x) = -I_rev(-(v_b - v_x)) (series current matched,
    anti-serial sign convention).  With Linear I-V on both devices this is the
    resistive divider v_b * r_fwd / (r_fwd + r_rev).

    method:
      "auto"    closed form when both devices are Linear, else bracketing
      "closed"  closed form (rejects non-Linear devices)
      "bracket" numeric root find on [min(0, v_b), max(0, v_b)] regardless

    The bracket always contains the root because both device currents are
    strictly increasing in voltage.  Raises SolverError if the bracketed
    solve cannot push the current mismatch below RESIDUAL_TOL.
    """
    if not math.isfinite(v_b):
        raise ValueError("v_b must be finite")
    if v_b == 0.0:
        return 0.0
    linear = _is_linear(fuse)
    if method == "closed" or (method == "auto" and linear):
        if not linear:
            raise ValueError("closed-form divider requires Linear I-V on both devices")
        return _closed_form_vx(fuse.fwd.r, fuse.rev.r, v_b)
    if method not in ("auto", "bracket"):
        raise ValueError(f"unknown divider method {method!r}")

    f_iv, f_r = fuse.fwd.iv, fuse.fwd.r
    r_iv, r_r = fuse.rev.iv, fuse.rev.r

    def mismatch(v_x: float) -> float:
        # Both terms are increasing in v_x, so the mismatch is monotone.
        return (device_current(f_iv, f_r, v_x)
                + device_current(r_iv, r_r, v_x - v_b))

    lo, hi = min(0.0, v_b), max(0.0, v_b)
    try:
        v_x = brentq(mismatch, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    except (ValueError, RuntimeError) as exc:
        raise SolverError(f"divider solve failed: {exc}",
                          residual=float("nan")) from exc
    residual = abs(mismatch(v_x))
    if residual >= RESIDUAL_TOL:
        raise SolverError("divider solve did not reach residual tolerance",
                          residual=residual)
    return v_x


def fuse_read_resistance(fuse: FuseState, v_read: float = 0.2) -> float:
    """Whole-fuse static resistance at the read-out voltage.

    Solve the divider at v_read and return v_read / series current.  With
    Linear I-V on both devices this equals r_fwd + r_rev exactly; any cubic
    asymmetry makes the ensemble read-out differ from the sum of the
    individually read devices.
    """
    if v_read == 0:
        raise ValueError("read-out voltage must be nonzero")
    if _is_linear(fuse):
        return fuse.fwd.r + fuse.rev.r
    v_x = solve_divider(fuse, v_read)
    return v_read / device_current(fuse.fwd.iv, fuse.fwd.r, v_x)


def apply_fuse_pulse(fuse: FuseState, v_b: float,
                     pulse_index: int = 0) -> tuple[FuseState, StepRecord]:
    """One synchronous fuse pulse at bias v_b.

    The divider voltage is computed from the pre-pulse states; both device
    deltas are evaluated against that same snapshot, then both resistances
    are updated and clamped (quasi-static pulse).
    """
    v_x = solve_divider(fuse, v_b)
    new_fwd = apply_pulse(fuse.fwd, v_x)
    new_rev = apply_pulse(fuse.rev, v_x - v_b)
    out = FuseState(new_fwd, new_rev)
    rec = StepRecord(pulse_index=pulse_index, v_b=v_b, v_x=v_x,
                     r_fwd=read_resistance(new_fwd),
                     r_rev=read_resistance(new_rev),
                     r_fuse=fuse_read_resistance(out))
    return out, rec


def run_pulse_train(fuse: FuseState,
                    trains: PulseTrain | list[PulseTrain] | tuple[PulseTrain, ...],
                    ) -> tuple[FuseState, Trajectory]:
    """Apply trains sequentially, recording one StepRecord per pulse."""
    if isinstance(trains, PulseTrain):
        trains = (trains,)
    trains = tuple(trains)
    records: list[StepRecord] = []
    state = fuse
    k = 0
    for train in trains:
        for _ in range(train.count):
            state, rec = apply_fuse_pulse(state, train.amplitude, pulse_index=k)
            records.append(rec)
            k += 1
    return state, Trajectory(initial=fuse, records=tuple(records), trains=trains)


def saturate(fuse: FuseState, polarity: float) -> FuseState:
    """End state of an arbitrarily long train of the given polarity.

    Positive polarity parks the forward device at its ceiling and the reverse
    device at its floor; negative polarity mirrors that.  Idempotent.
    """
    if polarity > 0:
        return fuse.with_resistances(fuse.fwd.bounds.r_ceiling,
                                     fuse.rev.bounds.r_floor)
    if polarity < 0:
        return fuse.with_resistances(fuse.fwd.bounds.r_floor,
                                     fuse.rev.bounds.r_ceiling)
    raise ValueError("polarity must be nonzero")


@dataclass(frozen=True)
class TrainSummary:
    """Record-free metrics of a constant-amplitude train (for amplitude scans)."""

    amplitude: float
    count: int
    r_initial: float
    r_min: float
    min_index: int   # 0-based pulse index where r_min was first reached
    r_final: float
    net_fwd: float   # r_fwd end - start
    net_rev: float


def summarize_train(fuse: FuseState, amplitude: float,
                    count: int) -> tuple[FuseState, TrainSummary]:
    """Run a constant-amplitude train tracking only aggregate metrics.

    Equivalent to run_pulse_train followed by reduction of the records (see
    the regression test pinning bit-identical agreement), but the Linear /
    no-window case runs on plain floats so long scans stay cheap.
    """
    fwd0, rev0 = fuse.fwd, fuse.rev
    r_init = fuse_read_resistance(fuse)
    fast = (_is_linear(fuse)
            and isinstance(fwd0.window, NoWindow)
            and isinstance(rev0.window, NoWindow))
    if fast:
        rf, rr = fwd0.r, rev0.r
        f_par, f_b = fwd0.params, fwd0.bounds
        r_par, r_b = rev0.params, rev0.bounds
        r_min, min_idx = r_init, -1
        for k in range(count):
            v_x = _closed_form_vx(rf, rr, amplitude) if amplitude != 0.0 else 0.0
            rf = f_b.clamp(rf + switching_delta(f_par, v_x))
            rr = r_b.clamp(rr + switching_delta(r_par, v_x - amplitude))
            r = rf + rr
            if r < r_min:
                r_min, min_idx = r, k
        end = fuse.with_resistances(rf, rr)
        r_fin = rf + rr
    else:
        end = fuse
        r_min, min_idx = r_init, -1
        r_fin = r_init
        for k in range(count):
            end, rec = apply_fuse_pulse(end, amplitude, pulse_index=k)
            r_fin = rec.r_fuse
            if rec.r_fuse < r_min:
                r_min, min_idx = rec.r_fuse, k
    return end, TrainSummary(
        amplitude=amplitude, count=count, r_initial=r_init, r_min=r_min,
        min_index=min_idx, r_final=r_fin,
        net_fwd=end.fwd.r - fwd0.r, net_rev=end.rev.r - rev0.r)

"""Single-memristor behavioural model.

A device is described by a four-parameter switching function (per-pulse
resistance change vs. pulse amplitude), hard resistive-state bounds, an
optional state-dependent window that scales switchability near the bounds,
and an I-V model used for read-out and divider calculations.

Conventions: ohms, volts, amperes throughout.  The switching function is
normalised per single pulse (pulse width is carried as metadata only).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

_V_RANGE = 5.0  # operating voltage range over which I-V monotonicity is enforced


@dataclass(frozen=True)
class SwitchingParams:
    """Piecewise-quadratic switching function parameters.

    delta_r(v) = a_plus  * (v - v_th_plus)**2   for v > v_th_plus
               = 0                              for v_th_minus <= v <= v_th_plus
               = a_minus * (v - v_th_minus)**2  for v < v_th_minus

    a_plus is positive (forward bias raises resistance), a_minus negative.
    The open interval (v_th_minus, v_th_plus) is the dead zone.
    """

    a_plus: float
    a_minus: float
    v_th_plus: float
    v_th_minus: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(x) for x in
                   (self.a_plus, self.a_minus, self.v_th_plus, self.v_th_minus)):
            raise ValueError("switching parameters must be finite")
        if self.a_plus <= 0:
            raise ValueError(f"a_plus must be > 0, got {self.a_plus}")
        if self.a_minus >= 0:
            raise ValueError(f"a_minus must be < 0, got {self.a_minus}")
        if not (self.v_th_minus < 0 < self.v_th_plus):
            raise ValueError("thresholds must satisfy v_th_minus < 0 < v_th_plus")


@dataclass(frozen=True)
class StateBounds:
    """Operational resistive-state floor and ceiling (ohm)."""

    r_floor: float
    r_ceiling: float

    def __post_init__(self) -> None:
        if not (0 < self.r_floor < self.r_ceiling):
            raise ValueError(
                f"bounds must satisfy 0 < r_floor < r_ceiling, got "
                f"[{self.r_floor}, {self.r_ceiling}]")

    @property
    def span(self) -> float:
        return self.r_ceiling - self.r_floor

    def clamp(self, r: float) -> float:
        return min(self.r_ceiling, max(self.r_floor, r))


def _check_monotone_iv(c3: float) -> None:
    # dI/dV of (v + c3*v^3)/r is (1 + 3*c3*v^2)/r; sample it across the
    # operating range rather than trusting the endpoint algebra.
    for i in range(201):
        v = -_V_RANGE + i * (2 * _V_RANGE / 200)
        if 1.0 + 3.0 * c3 * v * v <= 0.0:
            raise ValueError(
                f"I-V not strictly increasing over |V| <= {_V_RANGE} V (c3={c3})")


@dataclass(frozen=True)
class Linear:
    """Ohmic I-V: I = V / R."""


@dataclass(frozen=True)
class OddPolynomial:
    """Odd-cubic I-V: I = V/R + c3 * V**3 / R (c3 in 1/V^2)."""

    c3: float

    def __post_init__(self) -> None:
        _check_monotone_iv(self.c3)


@dataclass(frozen=True)
class Asymmetric:
    """Polarity-asymmetric cubic I-V: separate c3 for V >= 0 and V < 0."""

    c3_fwd: float
    c3_rev: float

    def __post_init__(self) -> None:
        _check_monotone_iv(self.c3_fwd)
        _check_monotone_iv(self.c3_rev)


IVModel = Linear | OddPolynomial | Asymmetric


@dataclass(frozen=True)
class NoWindow:
    """Identity window: switchability independent of resistive state."""

    def multiplier(self, r: float, bounds: StateBounds, raw_delta: float) -> float:
        return 1.0


@dataclass(frozen=True)
class LinearBoundary:
    """Window that fades switchability linearly toward the approached bound.

    The multiplier is (r_ceiling - r)/span for resistance-increasing pulses
    and (r - r_floor)/span for decreasing ones, so it reaches 0 exactly at
    the bound being approached.
    """

    def multiplier(self, r: float, bounds: StateBounds, raw_delta: float) -> float:
        if raw_delta > 0:
            return (bounds.r_ceiling - r) / bounds.span
        if raw_delta < 0:
            return (r - bounds.r_floor) / bounds.span
        return 1.0


WindowFunction = NoWindow | LinearBoundary


@dataclass(frozen=True)
class MemristorState:
    """Immutable snapshot of one device: resistance plus its model pieces."""

    r: float
    bounds: StateBounds
    params: SwitchingParams
    iv: IVModel = field(default_factory=Linear)
    window: WindowFunction = field(default_factory=NoWindow)

    def __post_init__(self) -> None:
        if not (self.bounds.r_floor <= self.r <= self.bounds.r_ceiling):
            raise ValueError(
                f"r={self.r} outside bounds [{self.bounds.r_floor}, "
                f"{self.bounds.r_ceiling}]")

    def with_r(self, r: float) -> "MemristorState":
        return replace(self, r=r)


def switching_delta(params: SwitchingParams, v_b: float) -> float:
    """Per-pulse resistance change (ohm) for a pulse of amplitude v_b (V).

    Zero inside the dead zone [v_th_minus, v_th_plus], continuous everywhere
    (exactly zero at both thresholds).
    """
    if not math.isfinite(v_b):
        raise ValueError(f"pulse amplitude must be finite, got {v_b}")
    if v_b > params.v_th_plus:
        d = v_b - params.v_th_plus
        return params.a_plus * d * d
    if v_b < params.v_th_minus:
        d = v_b - params.v_th_minus
        return params.a_minus * d * d
    return 0.0


def effective_delta(state: MemristorState, v_b: float) -> float:
    """switching_delta scaled by the window multiplier at the current state."""
    raw = switching_delta(state.params, v_b)
    return raw * state.window.multiplier(state.r, state.bounds, raw)


def device_current(iv: IVModel, r: float, v: float) -> float:
    """Current (A) through a device of resistance r at bias v."""
    if r <= 0:
        raise ValueError(f"resistance must be positive, got {r}")
    if isinstance(iv, Linear):
        return v / r
    if isinstance(iv, OddPolynomial):
        return (v + iv.c3 * v ** 3) / r
    c3 = iv.c3_fwd if v >= 0 else iv.c3_rev
    return (v + c3 * v ** 3) / r


def apply_pulse(state: MemristorState, v_b: float) -> MemristorState:
    """Apply one pulse at amplitude v_b; clamp the new resistance to bounds."""
    return state.with_r(state.bounds.clamp(state.r + effective_delta(state, v_b)))


def read_resistance(state: MemristorState, v_read: float = 0.2) -> float:
    """Static resistance at the standardised read-out voltage (default +0.2 V).

    For a Linear I-V this is state.r exactly; otherwise v_read / I(v_read),
    which differs from r whenever the cubic terms are nonzero.
    """
    if v_read == 0:
        raise ValueError("read-out voltage must be nonzero")
    if isinstance(state.iv, Linear):
        return state.r
    return v_read / device_current(state.iv, state.r, v_read)

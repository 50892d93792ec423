"""Switching load-line analysis.

For a fixed fuse bias v_b, plotting each device's per-pulse switching rate
against the divider voltage v_x gives the two "switching load lines":
delta_fwd(v_x) and delta_rev(-(v_b - v_x)).  Their geometry explains the fuse
dynamics: the interval where both rates are negligible is the bottleneck that
shapes dip-and-recovery, the signed drift of v_x quantifies how the divider
point migrates pulse-to-pulse, and zeros of that drift are fixed points the
ensemble can converge to or flee from.  Amplitude scans locate operating
regimes (dip-and-recovery, single-device control) empirically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .device import Linear, SwitchingParams, effective_delta, switching_delta
from .fuse import FuseState, apply_fuse_pulse, solve_divider, summarize_train

DeltaCurve = Callable[[float], float]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def cubic_sensitivity(a: float, c: float = 0.0) -> DeltaCurve:
    """Synthetic odd switching plot delta(v) = a * v * (v**2 - c**2).

    With c = 0 this is the plain cubic a*v**3.  A positive c makes the plot
    non-monotonic with sensitivity nulls at +/-c, the shape under which the
    two load lines can touch or cross and create fixed points.
    """
    def delta(v: float) -> float:
        return a * v * (v * v - c * c)
    return delta


def _as_delta(params_or_curve: SwitchingParams | DeltaCurve) -> DeltaCurve:
    if isinstance(params_or_curve, SwitchingParams):
        p = params_or_curve
        return lambda v: switching_delta(p, v)
    if callable(params_or_curve):
        return params_or_curve
    raise TypeError(f"expected SwitchingParams or callable, got {params_or_curve!r}")


@dataclass(frozen=True)
class CurvePair:
    """A fuse reduced to its two switching curves and frozen resistances."""

    delta_fwd: DeltaCurve
    delta_rev: DeltaCurve
    r_fwd: float
    r_rev: float


def _as_pair(fuse: FuseState | CurvePair) -> CurvePair:
    if isinstance(fuse, CurvePair):
        return fuse
    fwd, rev = fuse.fwd, fuse.rev
    return CurvePair(delta_fwd=lambda v: effective_delta(fwd, v),
                     delta_rev=lambda v: effective_delta(rev, v),
                     r_fwd=fwd.r, r_rev=rev.r)


@dataclass(frozen=True)
class LoadLine:
    v_b: float
    grid: np.ndarray
    delta_fwd: np.ndarray
    delta_rev: np.ndarray
    _fwd: DeltaCurve = field(repr=False, compare=False)
    _rev: DeltaCurve = field(repr=False, compare=False)

    def rates_at(self, v_x: float) -> tuple[float, float]:
        """(fwd, rev) switching rates at divider voltage v_x."""
        return self._fwd(v_x), self._rev(-(self.v_b - v_x))


@dataclass(frozen=True)
class Bottleneck:
    """Maximal v_x intervals where both switching rates stay below epsilon."""

    intervals: tuple[tuple[float, float], ...]
    epsilon: float


@dataclass(frozen=True)
class FixedPoint:
    v_x_star: float
    kind: str    # "attractor" | "repeller" | "marginal"
    basis: str   # "drift-zero" | "curve-crossing"


@dataclass(frozen=True)
class FixedPointScan:
    points: tuple[FixedPoint, ...]
    degenerate_bias: bool = False


def build_load_line(fwd_params: SwitchingParams | DeltaCurve,
                    rev_params: SwitchingParams | DeltaCurve,
                    v_b: float, n_samples: int = 501) -> LoadLine:
    """Sample both switching curves against v_x over [min(0, v_b), max(0, v_b)]."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    fwd = _as_delta(fwd_params)
    rev = _as_delta(rev_params)
    grid = np.linspace(min(0.0, v_b), max(0.0, v_b), n_samples)
    d_fwd = np.array([fwd(u) for u in grid])
    d_rev = np.array([rev(-(v_b - u)) for u in grid])
    return LoadLine(v_b=v_b, grid=grid, delta_fwd=d_fwd, delta_rev=d_rev,
                    _fwd=fwd, _rev=rev)


def _bisect_edge(pred, lo: float, hi: float, tol: float = 1e-9) -> float:
    """Boundary of a predicate between a sample where it holds and one where not."""
    inside_lo = pred(lo)
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == inside_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_bottleneck(load_line: LoadLine, epsilon: float = 1.0) -> Bottleneck:
    """Maximal intervals where max(|delta_fwd|, |delta_rev|) < epsilon.

    Interval ends falling between grid samples are sharpened by bisection on
    the underlying curves, so a vanishing epsilon recovers the analytic
    dead-zone intersection rather than a grid-quantised estimate.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    ll = load_line
    below = np.maximum(np.abs(ll.delta_fwd), np.abs(ll.delta_rev)) < epsilon

    def pred(u: float) -> bool:
        f, r = ll.rates_at(u)
        return max(abs(f), abs(r)) < epsilon

    intervals: list[tuple[float, float]] = []
    n = len(ll.grid)
    i = 0
    while i < n:
        if not below[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and below[j + 1]:
            j += 1
        lo = ll.grid[i] if i == 0 else _bisect_edge(pred, ll.grid[i], ll.grid[i - 1])
        hi = ll.grid[j] if j == n - 1 else _bisect_edge(pred, ll.grid[j], ll.grid[j + 1])
        intervals.append((float(min(lo, hi)), float(max(lo, hi))))
        i = j + 1
    return Bottleneck(intervals=tuple(intervals), epsilon=epsilon)


def _drift_formula(pair: CurvePair, v_b: float, v_x: float) -> float:
    d_f = pair.delta_fwd(v_x)
    d_r = pair.delta_rev(-(v_b - v_x))
    total = pair.r_fwd + pair.r_rev
    return v_b * (pair.r_rev * d_f - pair.r_fwd * d_r) / (total * total)


def drift_at(fuse: FuseState | CurvePair, v_b: float, v_x: float) -> float:
    """Instantaneous drift of v_x (V/pulse) at a prescribed divider voltage.

    Resistances are frozen at their current values; this is the first-order
    load-line picture used for fixed-point analysis, valid per-pulse when the
    deltas are small against the resistances.
    """
    return _drift_formula(_as_pair(fuse), v_b, v_x)


def drift(fuse: FuseState, v_b: float) -> float:
    """Per-pulse drift of the divider voltage at the fuse's own operating point.

    Linear I-V uses the closed form v_b * (r_rev*dR_fwd - r_fwd*dR_rev) /
    (r_fwd + r_rev)**2 with the deltas taken at the current v_x; any other
    I-V falls back to differencing solve_divider across one applied pulse.
    """
    if isinstance(fuse.fwd.iv, Linear) and isinstance(fuse.rev.iv, Linear):
        v_x = solve_divider(fuse, v_b)
        return _drift_formula(_as_pair(fuse), v_b, v_x)
    v_x0 = solve_divider(fuse, v_b)
    stepped, _ = apply_fuse_pulse(fuse, v_b)
    return solve_divider(stepped, v_b) - v_x0


def _bisect_root(f, lo: float, hi: float, f_lo: float, tol: float) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_lo < 0) != (f_mid < 0):
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def _golden_min_abs(f, lo: float, hi: float, iters: int = 80) -> float:
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = abs(f(x1)), abs(f(x2))
    for _ in range(iters):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = abs(f(x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = abs(f(x2))
    return 0.5 * (lo + hi)


def find_fixed_points(fuse: FuseState | CurvePair, v_b: float,
                      basis: str = "drift-zero", n_grid: int = 2001,
                      v_tol: float = 1e-6) -> FixedPointScan:
    """Isolated fixed points of the divider voltage at frozen resistances.

    basis "drift-zero" takes zeros of drift_at (the mechanistic condition);
    basis "curve-crossing" takes v_x where the two load lines intersect,
    delta_fwd(v_x) = delta_rev(-(v_b - v_x)).  The two differ whenever the
    crossing happens at a nonzero rate with unequal resistances, which is why
    both are offered and every result is tagged with its basis.

    Roots are isolated by a sign-change scan refined by bisection; a
    negative-going zero is an attractor, positive-going a repeller.  Zeros
    the profile only touches (no sign change) are located by minimising |f|
    and classified marginal.  Intervals where the profile vanishes
    identically (both devices dead) are bottleneck territory, not isolated
    fixed points, and are skipped.  v_b = 0 is degenerate: every v_x is
    trivially stationary, so the scan is flagged instead of enumerated.
    """
    if basis not in ("drift-zero", "curve-crossing"):
        raise ValueError(f"unknown basis {basis!r}")
    if v_b == 0.0:
        return FixedPointScan(points=(), degenerate_bias=True)
    pair = _as_pair(fuse)
    if basis == "drift-zero":
        def f(u: float) -> float:
            return _drift_formula(pair, v_b, u)
    else:
        def f(u: float) -> float:
            return pair.delta_fwd(u) - pair.delta_rev(-(v_b - u))

    grid = np.linspace(min(0.0, v_b), max(0.0, v_b), n_grid)
    vals = np.array([f(u) for u in grid])
    scale = float(np.max(np.abs(vals)))
    if scale == 0.0:
        return FixedPointScan(points=(), degenerate_bias=True)

    points: list[FixedPoint] = []
    root_tol = min(v_tol * 1e-3, 1e-9)
    for i in range(n_grid - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            if 0 < i < n_grid - 1 and vals[i - 1] != 0.0 and vals[i + 1] != 0.0:
                prev, nxt = vals[i - 1], vals[i + 1]
                if prev > 0 > nxt:
                    kind = "attractor"
                elif prev < 0 < nxt:
                    kind = "repeller"
                else:
                    kind = "marginal"
                points.append(FixedPoint(float(grid[i]), kind, basis))
        elif a * b < 0:
            root = _bisect_root(f, float(grid[i]), float(grid[i + 1]), a, root_tol)
            points.append(FixedPoint(root, "attractor" if a > 0 else "repeller",
                                     basis))
    # tangent zeros: local minima of |f| that dip far below the profile scale
    for i in range(1, n_grid - 1):
        if vals[i] == 0.0 or vals[i - 1] * vals[i + 1] < 0:
            continue
        if abs(vals[i]) <= abs(vals[i - 1]) and abs(vals[i]) <= abs(vals[i + 1]) \
                and abs(vals[i]) < 1e-3 * scale:
            u0 = _golden_min_abs(f, float(grid[i - 1]), float(grid[i + 1]))
            if abs(f(u0)) < 1e-9 * scale and \
                    all(abs(u0 - p.v_x_star) > 10 * v_tol for p in points):
                points.append(FixedPoint(u0, "marginal", basis))
    points.sort(key=lambda p: p.v_x_star)
    return FixedPointScan(points=tuple(points), degenerate_bias=False)


@dataclass(frozen=True)
class ScanTolerances:
    """Qualification thresholds for scan_amplitudes (harness knobs, not physics)."""

    dip_floor: float = 0.0        # ohm; dip depth must exceed this
    recovery_frac: float = 0.05   # final may sit below initial by this fraction
    isolation_frac: float = 0.01  # inert device may move by this fraction of range
    move_floor: float = 100.0     # ohm; active device must move more than this


@dataclass(frozen=True)
class ScanResult:
    amplitude: float
    dip_depth: float
    recovery: float      # final - initial fuse resistance
    total_dR_fwd: float  # net signed change of the forward device
    total_dR_rev: float
    qualifies: bool


def scan_amplitudes(fuse_template: FuseState,
                    initial_state: tuple[float, float] | None,
                    amplitude_grid, pulse_budget: int, criterion: str,
                    tolerances: ScanTolerances | None = None) -> list[ScanResult]:
    """Simulate each amplitude from a common initial state and grade it.

    criterion "dip-recovery" passes amplitudes whose trajectory dips by more
    than dip_floor yet ends within recovery_frac of the initial resistance;
    "selective-fwd" / "selective-rev" pass amplitudes that move the named
    device by more than move_floor while the other stays within
    isolation_frac of its range.
    """
    amps = list(amplitude_grid)
    if not amps:
        raise ValueError("amplitude grid is empty")
    if criterion not in ("dip-recovery", "selective-fwd", "selective-rev"):
        raise ValueError(f"unknown criterion {criterion!r}")
    tol = tolerances or ScanTolerances()
    base = fuse_template
    if initial_state is not None:
        base = base.with_resistances(*initial_state)

    out: list[ScanResult] = []
    for amplitude in amps:
        _, s = summarize_train(base, float(amplitude), pulse_budget)
        dip = s.r_initial - s.r_min
        recovery = s.r_final - s.r_initial
        if criterion == "dip-recovery":
            ok = dip > tol.dip_floor and recovery >= -tol.recovery_frac * s.r_initial
        elif criterion == "selective-fwd":
            ok = (abs(s.net_rev) < tol.isolation_frac * base.rev.bounds.span
                  and abs(s.net_fwd) > tol.move_floor)
        else:
            ok = (abs(s.net_fwd) < tol.isolation_frac * base.fwd.bounds.span
                  and abs(s.net_rev) > tol.move_floor)
        out.append(ScanResult(amplitude=float(amplitude), dip_depth=dip,
                              recovery=recovery, total_dR_fwd=s.net_fwd,
                              total_dR_rev=s.net_rev, qualifies=ok))
    return out

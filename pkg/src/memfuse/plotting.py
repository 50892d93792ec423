"""Figure rendering for the CLI report path (PNG files next to the CSVs)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .detector import DetectionEvent
from .fuse import Trajectory
from .loadline import Bottleneck, FixedPointScan, LoadLine, ScanResult


def plot_trajectory(traj: Trajectory, path) -> None:
    idx = [r.pulse_index for r in traj.records]
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
    ax1.plot(idx, [r.r_fuse for r in traj.records], lw=1.0, color="tab:blue")
    ax1.set_ylabel("r_fuse (ohm)")
    ax1.grid(alpha=0.3)
    ax2.plot(idx, [r.r_fwd for r in traj.records], lw=1.0, label="r_fwd")
    ax2.plot(idx, [r.r_rev for r in traj.records], lw=1.0, label="r_rev")
    ax2.set_xlabel("pulse index")
    ax2.set_ylabel("device r (ohm)")
    ax2.legend(loc="best")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_loadline(ll: LoadLine, path, bottleneck: Bottleneck | None = None,
                  fixed_points: FixedPointScan | None = None) -> None:
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(ll.grid, ll.delta_fwd, label="delta_fwd")
    ax.plot(ll.grid, ll.delta_rev, label="delta_rev")
    ax.axhline(0.0, color="k", lw=0.5)
    if bottleneck:
        for lo, hi in bottleneck.intervals:
            ax.axvspan(lo, hi, color="0.85", zorder=0)
    if fixed_points:
        for p in fixed_points.points:
            ax.axvline(p.v_x_star, color="tab:red", ls="--", lw=0.8)
            ax.annotate(p.kind, (p.v_x_star, 0), textcoords="offset points",
                        xytext=(3, 12), fontsize=8, color="tab:red")
    ax.set_xlabel("v_x (V)")
    ax.set_ylabel("delta R (ohm/pulse)")
    ax.set_title(f"switching load line, v_b = {ll.v_b:g} V")
    ax.legend(loc="best")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_scan(results: list[ScanResult], path) -> None:
    amps = [r.amplitude for r in results]
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(amps, [r.dip_depth for r in results], "o-", ms=3, label="dip depth")
    ax.plot(amps, [r.recovery for r in results], "s-", ms=3, label="recovery")
    good = [r.amplitude for r in results if r.qualifies]
    if good:
        ax.plot(good, [0.0] * len(good), "^", color="tab:green", ms=7,
                label="qualifies", zorder=5)
    ax.set_xlabel("amplitude (V)")
    ax.set_ylabel("ohm")
    ax.legend(loc="best")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_sensitivity(samples, path, fit=None) -> None:
    vs = [s.v for s in samples]
    ds = [s.delta_r for s in samples]
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(vs, ds, "o", ms=3, label="samples")
    if fit is not None and fit.params is not None:
        from .device import switching_delta
        import numpy as np
        grid = np.linspace(min(vs), max(vs), 400)
        ax.plot(grid, [switching_delta(fit.params, v) for v in grid],
                lw=1.0, label="fit")
    ax.set_xlabel("pulse amplitude (V)")
    ax.set_ylabel("delta R (ohm/pulse)")
    ax.legend(loc="best")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_detections(traj: Trajectory, detections: list[DetectionEvent], path) -> None:
    idx = [r.pulse_index for r in traj.records]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(idx, [r.r_fuse for r in traj.records], lw=1.0, label="r_fuse")
    for d in detections:
        ax.axvline(d.pulse_index, color="tab:red", ls="--", lw=0.8)
    if detections:
        ax.plot([d.pulse_index for d in detections],
                [d.r_fuse_at_detection for d in detections], "v",
                color="tab:red", ms=8, label="detection")
    ax.set_xlabel("pulse index")
    ax.set_ylabel("r_fuse (ohm)")
    ax.legend(loc="best")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)

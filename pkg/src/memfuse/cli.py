"""Command-line front end.

Subcommands: characterize, fit, loadline, simulate, scan, detect.  Options
come from an optional JSON config (flat keys mirroring the library types)
with command-line flags taking precedence.  All runs are deterministic;
every CSV starts with a comment line holding the resolved configuration.
`--plot` additionally renders PNG figures next to the delimited outputs.

Exit codes: 0 success, 2 usage, 3 bad config, 4 malformed CSV,
5 divider solver failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .calibration import (FitError, SensitivitySample, fit_switching_params,
                          preset, run_characterization)
from .detector import DetectorConfig, run_detector
from .device import (Asymmetric, Linear, LinearBoundary, MemristorState,
                     NoWindow, OddPolynomial)
from .fuse import FuseState, PulseTrain, SolverError, run_pulse_train, saturate
from .loadline import (ScanTolerances, build_load_line, find_bottleneck,
                       find_fixed_points, scan_amplitudes)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_CSV = 4
EXIT_SOLVER = 5


class ConfigError(ValueError):
    pass


def _error_line(kind: str, message: str) -> None:
    print(f"memfuse-error kind={kind} detail={message}", file=sys.stderr)


def _parse_range(spec) -> list[float]:
    """'start:stop:step' or [start, stop, step] -> inclusive grid."""
    if isinstance(spec, str):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be start:stop:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
    elif isinstance(spec, (list, tuple)) and len(spec) == 3:
        start, stop, step = (float(p) for p in spec)
    else:
        raise ConfigError(f"bad range spec {spec!r}")
    if step == 0 or (stop - start) * step < 0:
        raise ConfigError(f"range {spec!r} does not advance toward its stop")
    n = int(round((stop - start) / step))
    return [round(start + k * step, 12) for k in range(n + 1)]


def _parse_train(spec) -> PulseTrain:
    """'AMPxCOUNT' (e.g. 1.3x5000) or [amp, count]."""
    if isinstance(spec, str):
        try:
            amp_s, count_s = spec.rsplit("x", 1)
            return PulseTrain(float(amp_s), int(count_s))
        except ValueError as exc:
            raise ConfigError(f"bad train spec {spec!r} (want AMPxCOUNT)") from exc
    if isinstance(spec, (list, tuple)) and len(spec) == 2:
        return PulseTrain(float(spec[0]), int(spec[1]))
    raise ConfigError(f"bad train spec {spec!r}")


def _iv_from_config(spec):
    if spec in (None, "linear"):
        return Linear()
    if isinstance(spec, dict):
        try:
            if "c3_fwd" in spec or "c3_rev" in spec:
                return Asymmetric(c3_fwd=float(spec.get("c3_fwd", 0.0)),
                                  c3_rev=float(spec.get("c3_rev", 0.0)))
            if "c3" in spec:
                return OddPolynomial(c3=float(spec["c3"]))
        except ValueError as exc:
            raise ConfigError(f"invalid I-V model: {exc}") from exc
    raise ConfigError(f"bad iv spec {spec!r}")


def _window_from_config(spec):
    if spec in (None, "none"):
        return NoWindow()
    if spec == "linear-boundary":
        return LinearBoundary()
    raise ConfigError(f"bad window spec {spec!r}")


def _device_from_config(spec, iv, window, r=None) -> MemristorState:
    from .device import StateBounds, SwitchingParams
    if isinstance(spec, str):
        try:
            p = preset(spec)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        params, bounds, base = p.params, p.bounds, p.base_r
    elif isinstance(spec, dict):
        try:
            params = SwitchingParams(
                a_plus=float(spec["a_plus"]), a_minus=float(spec["a_minus"]),
                v_th_plus=float(spec["v_th_plus"]),
                v_th_minus=float(spec["v_th_minus"]))
            bounds = StateBounds(r_floor=float(spec["r_floor"]),
                                 r_ceiling=float(spec["r_ceiling"]))
            base = float(spec.get("base_r", 0.5 * (bounds.r_floor
                                                   + bounds.r_ceiling)))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"invalid device spec {spec!r}: {exc}") from exc
    else:
        raise ConfigError(f"bad device spec {spec!r}")
    try:
        return MemristorState(r=base if r is None else float(r),
                              bounds=bounds, params=params, iv=iv, window=window)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _fuse_from_config(cfg) -> FuseState:
    iv = _iv_from_config(cfg.get("iv"))
    window = _window_from_config(cfg.get("window"))
    fuse = FuseState(
        fwd=_device_from_config(cfg.get("fwd", "M2"), iv, window,
                                cfg.get("r_fwd")),
        rev=_device_from_config(cfg.get("rev", "M1"), iv, window,
                                cfg.get("r_rev")))
    initial = cfg.get("initial")
    if initial in (None, "base"):
        return fuse
    if initial == "saturated-positive":
        return saturate(fuse, +1)
    if initial == "saturated-negative":
        return saturate(fuse, -1)
    raise ConfigError(f"bad initial state {initial!r}")


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _merge(cfg: dict, args: argparse.Namespace, keys: list[str]) -> dict:
    """Start from the config file, let non-None CLI flags win."""
    out = dict(cfg)
    for key in keys:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            out[key] = val
    return out


def _outdir(cfg) -> Path:
    out = Path(cfg.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- commands

def _cmd_characterize(args) -> int:
    cfg = _merge(_load_config(args.config), args,
                 ["device", "ramp", "pulses_per_train", "noise", "seed", "out"])
    name = cfg.get("device", "M1")
    iv = _iv_from_config(cfg.get("iv"))
    window = _window_from_config(cfg.get("window"))
    dev = _device_from_config(name, iv, window, cfg.get("r"))
    ramp = _parse_range(cfg.get("ramp", "-2.0:2.5:0.05"))
    ppt = int(cfg.get("pulses_per_train", 1))
    noise = float(cfg.get("noise", 0.0))
    seed = int(cfg.get("seed", 0))
    samples = run_characterization(dev, ramp, pulses_per_train=ppt)
    if noise > 0.0:
        rng = np.random.default_rng(seed)
        samples = [SensitivitySample(s.v, s.delta_r + rng.uniform(-noise, noise))
                   for s in samples]
    meta = {"device": name if isinstance(name, str) else "custom",
            "ramp": f"{ramp[0]:g}:{ramp[-1]:g}:{len(ramp)}",
            "pulses_per_train": ppt, "noise": noise, "seed": seed}
    out = _outdir(cfg)
    io.write_sensitivity_csv(out / "sensitivity.csv", samples, "characterize", meta)
    if args.plot:
        from . import plotting
        plotting.plot_sensitivity(samples, out / "sensitivity.png")
    print(f"wrote {out / 'sensitivity.csv'} ({len(samples)} samples)")
    return EXIT_OK


def _cmd_fit(args) -> int:
    cfg = _merge(_load_config(args.config), args, ["input", "out"])
    path = cfg.get("input")
    if path is None:
        raise ConfigError("fit requires --input sensitivity CSV")
    samples = io.read_sensitivity_csv(path)
    try:
        fit = fit_switching_params(samples)
    except FitError as exc:
        raise ConfigError(f"fit failed: {exc}") from exc
    out = _outdir(cfg)
    io.write_fit_json(out / "fit.json", fit)
    if args.plot:
        from . import plotting
        plotting.plot_sensitivity(samples, out / "fit.png", fit=fit)
    print(f"wrote {out / 'fit.json'} (rss={fit.rss:.6g})")
    return EXIT_OK


def _cmd_loadline(args) -> int:
    cfg = _merge(_load_config(args.config), args,
                 ["vb", "epsilon", "n_samples", "basis", "out"])
    fuse = _fuse_from_config(cfg)
    v_b = float(cfg.get("vb", 1.0))
    epsilon = float(cfg.get("epsilon", 1.0))
    n = int(cfg.get("n_samples", 501))
    basis = cfg.get("basis", "drift-zero")
    ll = build_load_line(fuse.fwd.params, fuse.rev.params, v_b, n_samples=n)
    bn = find_bottleneck(ll, epsilon=epsilon)
    try:
        fps = find_fixed_points(fuse, v_b, basis=basis)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    meta = {"vb": v_b, "epsilon": epsilon, "n_samples": n, "basis": basis,
            "r_fwd": fuse.fwd.r, "r_rev": fuse.rev.r}
    out = _outdir(cfg)
    io.write_loadline_csv(out / "loadline.csv", ll, "loadline", meta)
    report = {
        "v_b": v_b, "epsilon": epsilon,
        "bottleneck": [list(iv) for iv in bn.intervals],
        "fixed_points": [{"v_x_star": p.v_x_star, "kind": p.kind,
                          "basis": p.basis} for p in fps.points],
        "degenerate_bias": fps.degenerate_bias,
    }
    (out / "loadline_report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n")
    if args.plot:
        from . import plotting
        plotting.plot_loadline(ll, out / "loadline.png", bottleneck=bn,
                               fixed_points=fps)
    print(f"wrote {out / 'loadline.csv'}; bottleneck intervals: "
          f"{len(bn.intervals)}, fixed points: {len(fps.points)}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = _merge(_load_config(args.config), args, ["out"])
    if args.train:
        cfg["trains"] = args.train
    trains = [_parse_train(t) for t in cfg.get("trains", [])]
    if not trains:
        raise ConfigError("simulate requires at least one train "
                          "(config 'trains' or --train AMPxCOUNT)")
    fuse = _fuse_from_config(cfg)
    end, traj = run_pulse_train(fuse, trains)
    meta = {"trains": ";".join(f"{t.amplitude:g}x{t.count}" for t in trains),
            "r_fwd0": fuse.fwd.r, "r_rev0": fuse.rev.r,
            "initial": cfg.get("initial", "base")}
    out = _outdir(cfg)
    io.write_trajectory_csv(out / "trajectory.csv", traj, "simulate", meta)
    if args.plot:
        from . import plotting
        plotting.plot_trajectory(traj, out / "trajectory.png")
    print(f"wrote {out / 'trajectory.csv'} ({len(traj.records)} pulses, "
          f"final r_fuse={traj.records[-1].r_fuse:.6g})")
    return EXIT_OK


def _cmd_scan(args) -> int:
    cfg = _merge(_load_config(args.config), args,
                 ["amplitudes", "pulse_budget", "criterion", "dip_floor",
                  "move_floor", "out"])
    fuse = _fuse_from_config(cfg)
    if "amplitudes" not in cfg:
        raise ConfigError("scan requires an amplitude grid "
                          "(config 'amplitudes' or --amplitudes start:stop:step)")
    amps = (_parse_range(cfg["amplitudes"])
            if isinstance(cfg["amplitudes"], (str, tuple)) or
            (isinstance(cfg["amplitudes"], list) and len(cfg["amplitudes"]) == 3
             and not isinstance(cfg["amplitudes"][0], (list, tuple)))
            else [float(a) for a in cfg["amplitudes"]])
    budget = int(cfg.get("pulse_budget", 5000))
    criterion = cfg.get("criterion", "dip-recovery")
    tol = ScanTolerances(
        dip_floor=float(cfg.get("dip_floor", 0.0)),
        recovery_frac=float(cfg.get("recovery_frac", 0.05)),
        isolation_frac=float(cfg.get("isolation_frac", 0.01)),
        move_floor=float(cfg.get("move_floor", 100.0)))
    try:
        results = scan_amplitudes(fuse, None, amps, budget, criterion,
                                  tolerances=tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    meta = {"criterion": criterion, "pulse_budget": budget,
            "amplitudes": f"{amps[0]:g}..{amps[-1]:g}/{len(amps)}",
            "r_fwd0": fuse.fwd.r, "r_rev0": fuse.rev.r,
            "dip_floor": tol.dip_floor, "move_floor": tol.move_floor}
    out = _outdir(cfg)
    io.write_scan_csv(out / "scan.csv", results, "scan", meta)
    if args.plot:
        from . import plotting
        plotting.plot_scan(results, out / "scan.png")
    n_ok = sum(r.qualifies for r in results)
    print(f"wrote {out / 'scan.csv'} ({n_ok}/{len(results)} amplitudes qualify)")
    return EXIT_OK


def _cmd_detect(args) -> int:
    cfg = _merge(_load_config(args.config), args,
                 ["events", "rel_drop_threshold", "arm_after", "refractory",
                  "out"])
    path = cfg.get("events")
    if path is None:
        raise ConfigError("detect requires --events CSV")
    events = io.read_events_csv(path)
    fuse = _fuse_from_config(cfg)
    try:
        det_cfg = DetectorConfig(
            rel_drop_threshold=float(cfg.get("rel_drop_threshold", 0.03)),
            arm_after=int(cfg.get("arm_after", 10)),
            refractory=int(cfg.get("refractory", 50)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    traj, detections = run_detector(fuse, events, det_cfg)
    meta = {"events": str(path), "n_events": len(events),
            "rel_drop_threshold": det_cfg.rel_drop_threshold,
            "arm_after": det_cfg.arm_after, "refractory": det_cfg.refractory}
    out = _outdir(cfg)
    io.write_detections_csv(out / "detections.csv", detections, "detect", meta)
    io.write_trajectory_csv(out / "detect_trajectory.csv", traj, "detect", meta)
    if args.plot:
        from . import plotting
        plotting.plot_detections(traj, detections, out / "detections.png")
    print(f"wrote {out / 'detections.csv'} ({len(detections)} detections)")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON config file (flat keys)")
    sp.add_argument("--out", help="output directory (default .)")
    sp.add_argument("--plot", action="store_true",
                    help="also render PNG figures next to the CSV outputs")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="memfuse",
        description="Analogue memristive fuse simulation and analysis")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("characterize", help="ramp a device, emit its switching plot")
    sp.add_argument("--device", help="preset name (M1, M2)")
    sp.add_argument("--ramp", help="amplitude ramp start:stop:step")
    sp.add_argument("--pulses-per-train", type=int)
    sp.add_argument("--noise", type=float, help="uniform +/- noise on deltas (ohm)")
    sp.add_argument("--seed", type=int, help="RNG seed for --noise")
    _add_common(sp)
    sp.set_defaults(func=_cmd_characterize)

    sp = sub.add_parser("fit", help="fit switching parameters to a sensitivity CSV")
    sp.add_argument("--input", help="sensitivity CSV (v,delta_r[,weight])")
    _add_common(sp)
    sp.set_defaults(func=_cmd_fit)

    sp = sub.add_parser("loadline", help="load line, bottleneck and fixed points")
    sp.add_argument("--vb", type=float, help="fuse bias (V)")
    sp.add_argument("--epsilon", type=float, help="bottleneck rate threshold")
    sp.add_argument("--n-samples", type=int)
    sp.add_argument("--basis", choices=["drift-zero", "curve-crossing"])
    _add_common(sp)
    sp.set_defaults(func=_cmd_loadline)

    sp = sub.add_parser("simulate", help="run pulse trains, emit the trajectory")
    sp.add_argument("--train", action="append", metavar="AMPxCOUNT",
                    help="repeatable, e.g. --train 1.3x5000 --train -2.7x1500")
    _add_common(sp)
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("scan", help="grade an amplitude grid against a criterion")
    sp.add_argument("--amplitudes", help="grid start:stop:step")
    sp.add_argument("--pulse-budget", type=int)
    sp.add_argument("--criterion",
                    choices=["dip-recovery", "selective-fwd", "selective-rev"])
    sp.add_argument("--dip-floor", type=float)
    sp.add_argument("--move-floor", type=float)
    _add_common(sp)
    sp.set_defaults(func=_cmd_scan)

    sp = sub.add_parser("detect", help="stream events through the step detector")
    sp.add_argument("--events", help="events CSV (header: amplitude)")
    sp.add_argument("--rel-drop-threshold", type=float)
    sp.add_argument("--arm-after", type=int)
    sp.add_argument("--refractory", type=int)
    _add_common(sp)
    sp.set_defaults(func=_cmd_detect)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        _error_line("config", str(exc))
        return EXIT_CONFIG
    except io.CsvFormatError as exc:
        _error_line("csv", str(exc))
        return EXIT_CSV
    except SolverError as exc:
        _error_line("solver", str(exc))
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

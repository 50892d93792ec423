"""File formats: delimited outputs with reproducibility headers, JSON fits.

Every CSV starts with a single `#` comment line recording the tool version
and the resolved configuration that produced it, so identical inputs yield
byte-identical files.  Numbers are written with 6 significant digits.
"""
from __future__ import annotations

import json
from pathlib import Path

from . import __version__
from .calibration import FitResult, SensitivitySample
from .detector import DetectionEvent
from .fuse import Trajectory
from .loadline import LoadLine, ScanResult


class CsvFormatError(ValueError):
    """Input CSV does not match the expected schema."""


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def meta_line(command: str, config: dict) -> str:
    parts = [f"{k}={_fmt(config[k])}" for k in sorted(config)]
    return f"# memfuse {__version__} {command} " + " ".join(parts)


def _write_csv(path, columns: list[str], rows, command: str, config: dict) -> None:
    lines = [meta_line(command, config), ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_trajectory_csv(path, traj: Trajectory, command: str, config: dict) -> None:
    _write_csv(path, ["pulse_index", "v_b", "v_x", "r_fwd", "r_rev", "r_fuse"],
               ((r.pulse_index, r.v_b, r.v_x, r.r_fwd, r.r_rev, r.r_fuse)
                for r in traj.records),
               command, config)


def write_loadline_csv(path, ll: LoadLine, command: str, config: dict) -> None:
    _write_csv(path, ["v_x", "delta_fwd", "delta_rev"],
               zip(ll.grid.tolist(), ll.delta_fwd.tolist(), ll.delta_rev.tolist()),
               command, config)


def write_scan_csv(path, results: list[ScanResult], command: str, config: dict) -> None:
    _write_csv(path, ["amplitude", "dip_depth", "recovery",
                      "total_dR_fwd", "total_dR_rev", "qualifies"],
               ((r.amplitude, r.dip_depth, r.recovery,
                 r.total_dR_fwd, r.total_dR_rev, r.qualifies) for r in results),
               command, config)


def write_sensitivity_csv(path, samples: list[SensitivitySample],
                          command: str, config: dict) -> None:
    if any(s.weight != 1.0 for s in samples):
        _write_csv(path, ["v", "delta_r", "weight"],
                   ((s.v, s.delta_r, s.weight) for s in samples),
                   command, config)
    else:
        _write_csv(path, ["v", "delta_r"],
                   ((s.v, s.delta_r) for s in samples), command, config)


def write_detections_csv(path, detections: list[DetectionEvent],
                         command: str, config: dict) -> None:
    _write_csv(path, ["pulse_index", "r_fuse", "running_max"],
               ((d.pulse_index, d.r_fuse_at_detection, d.running_max)
                for d in detections),
               command, config)


def write_fit_json(path, fit: FitResult) -> None:
    doc = {
        "a_plus": fit.a_plus,
        "a_minus": fit.a_minus,
        "v_th_plus": fit.v_th_plus,
        "v_th_minus": fit.v_th_minus,
        "rss": fit.rss,
        "n_samples": fit.n_samples,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _data_lines(path) -> list[list[str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CsvFormatError(f"cannot read {path}: {exc}") from exc
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([cell.strip() for cell in line.split(",")])
    if not rows:
        raise CsvFormatError(f"{path}: no header row")
    return rows


def read_events_csv(path) -> list[float]:
    """Event-stream input: single `amplitude` column of signed volts."""
    rows = _data_lines(path)
    if rows[0] != ["amplitude"]:
        raise CsvFormatError(f"{path}: expected header 'amplitude', got {rows[0]}")
    out = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 1:
            raise CsvFormatError(f"{path}:{i}: expected 1 column, got {len(row)}")
        try:
            out.append(float(row[0]))
        except ValueError as exc:
            raise CsvFormatError(f"{path}:{i}: bad amplitude {row[0]!r}") from exc
    return out


def read_sensitivity_csv(path) -> list[SensitivitySample]:
    """Sensitivity input: `v,delta_r` with an optional third `weight` column."""
    rows = _data_lines(path)
    header = rows[0]
    if header not in (["v", "delta_r"], ["v", "delta_r", "weight"]):
        raise CsvFormatError(
            f"{path}: expected header 'v,delta_r[,weight]', got {header}")
    out = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CsvFormatError(
                f"{path}:{i}: expected {len(header)} columns, got {len(row)}")
        try:
            vals = [float(x) for x in row]
        except ValueError as exc:
            raise CsvFormatError(f"{path}:{i}: bad number in {row}") from exc
        weight = vals[2] if len(vals) == 3 else 1.0
        out.append(SensitivitySample(v=vals[0], delta_r=vals[1], weight=weight))
    return out

"""memfuse: simulation and analysis of analogue memristive fuses.

A memristive fuse is a pair of gradually switching memristors connected
anti-serially.  The package models single devices (switching function,
resistive-state bounds, window functions, I-V models), solves the fuse's
internal voltage divider, simulates pulse-train dynamics, analyses switching
load lines (bottlenecks, drift, fixed points), calibrates model parameters
from sensitivity data, and runs the fuse as a polarity-step detector.
"""

__version__ = "0.1.0"

from .device import (Asymmetric, IVModel, Linear, LinearBoundary,
                     MemristorState, NoWindow, OddPolynomial, StateBounds,
                     SwitchingParams, WindowFunction, apply_pulse,
                     device_current, effective_delta, read_resistance,
                     switching_delta)
from .fuse import (FuseState, PulseTrain, SolverError, StepRecord,
                   Trajectory, TrainSummary, apply_fuse_pulse,
                   fuse_read_resistance, run_pulse_train, saturate,
                   solve_divider, summarize_train)
from .loadline import (Bottleneck, CurvePair, FixedPoint, FixedPointScan,
                       LoadLine, ScanResult, ScanTolerances, build_load_line,
                       cubic_sensitivity, drift, drift_at, find_bottleneck,
                       find_fixed_points, scan_amplitudes)
from .calibration import (DevicePreset, FitError, FitResult,
                          SensitivitySample, fit_switching_params, preset,
                          run_characterization)
from .detector import DetectionEvent, DetectorConfig, run_detector
from .io import CsvFormatError

__all__ = [
    "__version__",
    # device
    "SwitchingParams", "StateBounds", "MemristorState", "IVModel", "Linear",
    "OddPolynomial", "Asymmetric", "WindowFunction", "NoWindow",
    "LinearBoundary", "switching_delta", "effective_delta", "device_current",
    "apply_pulse", "read_resistance",
    # fuse
    "FuseState", "PulseTrain", "StepRecord", "Trajectory", "TrainSummary",
    "SolverError", "solve_divider", "apply_fuse_pulse", "run_pulse_train",
    "fuse_read_resistance", "saturate", "summarize_train",
    # loadline
    "LoadLine", "Bottleneck", "FixedPoint", "FixedPointScan", "CurvePair",
    "ScanResult", "ScanTolerances", "build_load_line", "find_bottleneck",
    "drift", "drift_at", "find_fixed_points", "scan_amplitudes",
    "cubic_sensitivity",
    # calibration
    "SensitivitySample", "DevicePreset", "FitResult", "FitError", "preset",
    "run_characterization", "fit_switching_params",
    # detector
    "DetectorConfig", "DetectionEvent", "run_detector",
    # io
    "CsvFormatError",
]

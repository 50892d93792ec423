"""Polarity-step detection with a fuse as the sensing element.

A long run of same-polarity pulses parks the fuse at a high ensemble
resistance; the first pulses of the opposite polarity carve a sharp dip.
The detector streams signed pulse amplitudes through a fuse, tracks the
running maximum of the read-out resistance, and flags any drop below a
relative threshold of that maximum.
"""
from __future__ import annotations

from dataclasses import dataclass

from .fuse import FuseState, PulseTrain, StepRecord, Trajectory, apply_fuse_pulse


@dataclass(frozen=True)
class DetectorConfig:
    """rel_drop_threshold: fractional drop from the running max that fires a
    detection; arm_after: consecutive same-polarity pulses required before the
    detector arms (once armed it stays armed); refractory: pulses after a
    detection during which further detections are suppressed and the baseline
    re-anchors to the current read-out, so one physical step is reported once.
    """

    rel_drop_threshold: float = 0.03
    arm_after: int = 10
    refractory: int = 50

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_drop_threshold < 1.0):
            raise ValueError("rel_drop_threshold must be in (0, 1)")
        if self.arm_after < 0:
            raise ValueError("arm_after must be >= 0")
        if self.refractory < 0:
            raise ValueError("refractory must be >= 0")


@dataclass(frozen=True)
class DetectionEvent:
    pulse_index: int
    r_fuse_at_detection: float
    running_max: float


def _group_trains(events: list[float]) -> tuple[PulseTrain, ...]:
    trains: list[PulseTrain] = []
    for amp in events:
        if trains and trains[-1].amplitude == amp:
            last = trains[-1]
            trains[-1] = PulseTrain(last.amplitude, last.count + 1, last.width)
        else:
            trains.append(PulseTrain(amp, 1))
    return tuple(trains)


def run_detector(fuse: FuseState, events,
                 config: DetectorConfig | None = None,
                 ) -> tuple[Trajectory, list[DetectionEvent]]:
    """Stream signed amplitudes through the fuse and report resistance steps.

    Arming waits for arm_after consecutive pulses of one polarity so the
    baseline forms on a settled stream.  While armed, a read-out below
    (1 - rel_drop_threshold) * running_max emits a DetectionEvent; the
    running max then restarts from the dip and, for the refractory window,
    follows the read-out directly (recovering or not) so the tail of the
    same step cannot re-trigger.
    """
    cfg = config or DetectorConfig()
    events = [float(a) for a in events]
    records: list[StepRecord] = []
    detections: list[DetectionEvent] = []

    state = fuse
    armed = cfg.arm_after == 0
    streak = 0
    last_sign: int | None = None
    running_max: float | None = None
    refractory_until = -1

    for k, amp in enumerate(events):
        sign = 1 if amp > 0 else (-1 if amp < 0 else 0)
        streak = streak + 1 if sign == last_sign else 1
        last_sign = sign
        state, rec = apply_fuse_pulse(state, amp, pulse_index=k)
        records.append(rec)
        r = rec.r_fuse
        if not armed:
            if streak >= cfg.arm_after:
                armed = True
                running_max = r
            continue
        if running_max is None:       # armed from pulse zero (arm_after == 0)
            running_max = r
            continue
        if k <= refractory_until:
            running_max = r
        elif r < (1.0 - cfg.rel_drop_threshold) * running_max:
            detections.append(DetectionEvent(
                pulse_index=k, r_fuse_at_detection=r, running_max=running_max))
            running_max = r
            refractory_until = k + cfg.refractory
        elif r > running_max:
            running_max = r

    traj = Trajectory(initial=fuse, records=tuple(records),
                      trains=_group_trains(events))
    return traj, detections

"""Head-orientation to velocity/cursor command mapping.

A calibrated reference orientation defines a deadzone band, a
proportional band, and a saturation band per axis.  Angle differences
are taken on the circle (shortest signed arc) so the mapping behaves
across the +/-180 degree seam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class NotCalibratedError(RuntimeError):
    """A control-mode command was requested before initialization."""


def angle_delta_deg(theta: float, theta_i: float) -> float:
    """Shortest signed arc from theta_i to theta, in degrees."""
    return math.remainder(theta - theta_i, 360.0)


@dataclass(frozen=True)
class OrientationSample:
    roll: float   # deg
    pitch: float  # deg
    yaw: float    # deg
    timestamp: float  # ms

    def axis(self, name: str) -> float:
        return {"roll": self.roll, "pitch": self.pitch, "yaw": self.yaw}[name]


@dataclass(frozen=True)
class Calibration:
    """Reference orientation captured when a control mode is initialized."""

    roll: float
    pitch: float
    yaw: float

    @staticmethod
    def from_sample(sample: OrientationSample) -> "Calibration":
        return Calibration(sample.roll, sample.pitch, sample.yaw)

    def axis(self, name: str) -> float:
        return {"roll": self.roll, "pitch": self.pitch, "yaw": self.yaw}[name]


def calibrate(sample: OrientationSample) -> Calibration:
    return Calibration.from_sample(sample)


@dataclass(frozen=True)
class ThresholdConfig:
    t_low: float = 10.0          # deg, deadzone half-width
    t_high: float = 35.0         # deg, saturation half-width
    cursor_t_high: float = 12.0  # deg, cursor position full-scale

    def __post_init__(self):
        if not 0 < self.t_low < self.t_high:
            raise ValueError("need 0 < t_low < t_high")


@dataclass(frozen=True)
class ActuatorLimits:
    base_forward: float = 0.3   # m/s
    base_rotation: float = 0.3  # rad/s
    lift: float = 0.26          # m/s
    extension: float = 0.13     # m/s
    wrist: float = 0.3          # rad/s
    gripper: float = 2.0        # rad/s

    def limit(self, actuator: str) -> float:
        return getattr(self, actuator)

    def __post_init__(self):
        for v in (self.base_forward, self.base_rotation, self.lift,
                  self.extension, self.wrist, self.gripper):
            if v <= 0:
                raise ValueError("actuator limits must be positive")


# Per-submode (head axis, actuator, sign) pairs.
AxisMap = tuple[tuple[str, str, float], ...]


@dataclass(frozen=True)
class AxisAssignment:
    """Which head axis drives which actuator in each robot submode."""

    drive: AxisMap = (("pitch", "base_forward", 1.0), ("yaw", "base_rotation", 1.0))
    arm: AxisMap = (("pitch", "lift", 1.0), ("yaw", "extension", 1.0))
    wrist: AxisMap = (("pitch", "gripper", 1.0), ("yaw", "wrist", 1.0))
    cursor: AxisMap = (("pitch", "vy", 1.0), ("yaw", "vx", -1.0))

    def for_submode(self, submode: str) -> AxisMap:
        return {"drive": self.drive, "arm": self.arm, "wrist": self.wrist}[submode]

    def __post_init__(self):
        for m in (self.drive, self.arm, self.wrist, self.cursor):
            axes = [axis for axis, _, _ in m]
            if len(axes) != len(set(axes)):
                raise ValueError("a head axis may drive at most one actuator")


#: Alternate preset for users with restricted yaw motion.
PITCH_ROLL_ASSIGNMENT = AxisAssignment(
    drive=(("pitch", "base_forward", 1.0), ("roll", "base_rotation", 1.0)),
    arm=(("pitch", "lift", 1.0), ("roll", "extension", 1.0)),
    wrist=(("pitch", "gripper", 1.0), ("roll", "wrist", 1.0)),
    cursor=(("pitch", "vy", 1.0), ("roll", "vx", -1.0)),
)

AXIS_PRESETS = {
    "pitch-yaw": AxisAssignment(),
    "pitch-roll": PITCH_ROLL_ASSIGNMENT,
}


def axis_velocity(theta: float, theta_i: float, v_max: float,
                  thr: ThresholdConfig) -> float:
    """Piecewise velocity for one axis: zero inside the deadzone,
    proportional between the thresholds, saturated at v_max beyond.

    Continuous, odd about theta_i, and monotone in the angle offset.
    """
    delta = angle_delta_deg(theta, theta_i)
    mag = abs(delta)
    if mag < thr.t_low:
        return 0.0
    k = v_max / (thr.t_high - thr.t_low)
    return math.copysign(min(v_max, k * (mag - thr.t_low)), delta)


def map_to_command(sample: OrientationSample, cal: Calibration | None,
                   submode: str, assign: AxisAssignment,
                   limits: ActuatorLimits, thr: ThresholdConfig):
    """Velocity command for the active robot submode; only the two
    assigned actuators can be nonzero."""
    from .kinematics import JointVelocityCommand

    if cal is None:
        raise NotCalibratedError("control session is not initialized")
    fields = {}
    for axis, actuator, sign in assign.for_submode(submode):
        v = axis_velocity(sample.axis(axis), cal.axis(axis),
                          limits.limit(actuator), thr)
        fields[actuator] = sign * v
    return JointVelocityCommand(**fields)


@dataclass(frozen=True)
class CursorConfig:
    max_speed: float = 600.0  # screen-units/s, velocity style
    x_range: tuple[float, float] = (0.0, 1920.0)
    y_range: tuple[float, float] = (0.0, 1080.0)
    # Optional exponential smoothing of emitted velocities, 0 = off.
    smoothing: float = 0.0


def cursor_velocity(sample: OrientationSample, cal: Calibration | None,
                    cursor: CursorConfig, thr: ThresholdConfig,
                    assign: AxisAssignment = AxisAssignment()) -> tuple[float, float]:
    """Screen-space cursor velocity (vx, vy) from head orientation."""
    if cal is None:
        raise NotCalibratedError("cursor session is not initialized")
    out = {"vx": 0.0, "vy": 0.0}
    for axis, channel, sign in assign.cursor:
        out[channel] = sign * axis_velocity(sample.axis(axis), cal.axis(axis),
                                            cursor.max_speed, thr)
    return out["vx"], out["vy"]


def _position_axis(theta: float, theta_i: float, p_low: float, p_high: float,
                   t_high: float) -> float:
    delta = angle_delta_deg(theta, theta_i)
    p = p_low + (delta + t_high) * (p_high - p_low) / (2.0 * t_high)
    return min(max(p, p_low), p_high)


def cursor_position(sample: OrientationSample, cal: Calibration | None,
                    cursor: CursorConfig, thr: ThresholdConfig,
                    assign: AxisAssignment = AxisAssignment()) -> tuple[float, float]:
    """Direct head-angle to cursor-position interpolation, clamped to
    the screen rectangle."""
    if cal is None:
        raise NotCalibratedError("cursor session is not initialized")
    out = {"vx": (cursor.x_range[0] + cursor.x_range[1]) / 2.0,
           "vy": (cursor.y_range[0] + cursor.y_range[1]) / 2.0}
    for axis, channel, sign in assign.cursor:
        lo, hi = cursor.x_range if channel == "vx" else cursor.y_range
        theta = sample.axis(axis)
        theta_i = cal.axis(axis)
        if sign < 0:
            # Mirror the axis so the sign convention matches velocity mode.
            theta, theta_i = theta_i, theta
        out[channel] = _position_axis(theta, theta_i, lo, hi, thr.cursor_t_high)
    return out["vx"], out["vy"]

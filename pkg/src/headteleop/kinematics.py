"""Kinematic model of the nonholonomic mobile manipulator.

The robot is a differential-drive base carrying a vertical lift, a
horizontal telescoping arm that extends to the robot's right, and a
yaw wrist with a gripper at its tip.  All operations here are pure
functions; state integration is an explicit Euler step at the fixed
control rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

TAU = 2.0 * math.pi


class SingularityError(ValueError):
    """Raised when an undamped pseudo-inverse hits a singular matrix."""


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    r = math.remainder(a, TAU)
    if r <= -math.pi:
        r += TAU
    return r


@dataclass(frozen=True)
class RobotGeometry:
    """Link geometry and joint ranges. Defaults are desk-scale values."""

    arm_mount_offset: float = 0.14  # m, base origin to arm root, to the right
    gripper_length: float = 0.17    # m, wrist axis to grasp point
    lift_range: tuple[float, float] = (0.0, 1.10)       # m
    extension_range: tuple[float, float] = (0.0, 0.52)  # m
    wrist_range: tuple[float, float] = (-math.pi / 2, math.pi / 2)  # rad
    gripper_range: tuple[float, float] = (0.0, 1.0)     # rad aperture

    def __post_init__(self):
        if self.arm_mount_offset < 0 or self.gripper_length < 0:
            raise ValueError("offsets must be >= 0")
        for name in ("lift_range", "extension_range", "wrist_range", "gripper_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} must satisfy min < max")


@dataclass(frozen=True)
class RobotState:
    """Base pose plus arm joint positions."""

    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0   # rad, (-pi, pi]
    lift: float = 0.0      # m
    extension: float = 0.0  # m
    wrist: float = 0.0     # rad
    gripper: float = 0.0   # rad aperture

    def clamped(self, geom: RobotGeometry) -> "RobotState":
        return replace(
            self,
            heading=wrap_angle(self.heading),
            lift=min(max(self.lift, geom.lift_range[0]), geom.lift_range[1]),
            extension=min(max(self.extension, geom.extension_range[0]),
                          geom.extension_range[1]),
            wrist=min(max(self.wrist, geom.wrist_range[0]), geom.wrist_range[1]),
            gripper=min(max(self.gripper, geom.gripper_range[0]),
                        geom.gripper_range[1]),
        )


@dataclass(frozen=True)
class JointVelocityCommand:
    """Commanded joint velocities. The gripper channel sits outside the
    5-vector used by the differential kinematics."""

    base_forward: float = 0.0   # m/s
    base_rotation: float = 0.0  # rad/s
    lift: float = 0.0           # m/s
    extension: float = 0.0      # m/s
    wrist: float = 0.0          # rad/s
    gripper: float = 0.0        # rad/s

    def as_vector(self) -> np.ndarray:
        """The controllable 5-vector [v, w, lift, ext, wrist]."""
        return np.array([self.base_forward, self.base_rotation, self.lift,
                         self.extension, self.wrist])

    @staticmethod
    def from_vector(u: np.ndarray, gripper: float = 0.0) -> "JointVelocityCommand":
        return JointVelocityCommand(float(u[0]), float(u[1]), float(u[2]),
                                    float(u[3]), float(u[4]), gripper)


ZERO_COMMAND = JointVelocityCommand()


@dataclass(frozen=True)
class EndEffectorPose:
    position: tuple[float, float, float]  # world frame, m
    planar_orientation: float             # world gripper pointing angle, rad


def forward_kinematics(state: RobotState, geom: RobotGeometry) -> EndEffectorPose:
    """World-frame grasp-point position and planar gripper direction.

    The arm extends perpendicular to the drive heading, to the robot's
    right; the wrist rotates the gripper segment about the vertical.
    """
    arm_dir = state.heading - math.pi / 2.0
    grip_dir = arm_dir + state.wrist
    reach = geom.arm_mount_offset + state.extension
    px = state.x + reach * math.cos(arm_dir) + geom.gripper_length * math.cos(grip_dir)
    py = state.y + reach * math.sin(arm_dir) + geom.gripper_length * math.sin(grip_dir)
    return EndEffectorPose((px, py, state.lift), wrap_angle(grip_dir))


def jacobian(state: RobotState, geom: RobotGeometry) -> np.ndarray:
    """6x5 matrix mapping [v, w, lift, ext, wrist] velocities to the
    end-effector twist (3 linear + 3 angular) in the robot base frame."""
    reach = geom.arm_mount_offset + state.extension
    L = geom.gripper_length
    c, s = math.cos(state.wrist), math.sin(state.wrist)
    J = np.zeros((6, 5))
    J[0, 0] = 1.0
    J[0, 1] = reach + L * c
    J[1, 1] = L * s
    J[2, 2] = 1.0
    J[1, 3] = -1.0
    J[0, 4] = L * c
    J[1, 4] = L * s
    J[5, 1] = 1.0
    J[5, 4] = 1.0
    return J


def damped_pseudo_inverse(J: np.ndarray, damping: float) -> np.ndarray:
    """Right pseudo-inverse J^T (J J^T + damping^2 I)^-1.

    With damping 0 this is the Moore-Penrose pseudo-inverse for
    full-row-rank J; a singular system with damping 0 raises
    SingularityError.
    """
    if damping < 0:
        raise ValueError("damping must be >= 0")
    J = np.asarray(J, dtype=float)
    m = J.shape[0]
    A = J @ J.T + (damping * damping) * np.eye(m)
    if damping == 0.0 and (not np.all(np.isfinite(A)) or np.linalg.cond(A) > 1e12):
        raise SingularityError("J J^T is singular; use damping > 0")
    return J.T @ np.linalg.inv(A)


def integrate(state: RobotState, cmd: JointVelocityCommand, dt: float,
              geom: RobotGeometry) -> RobotState:
    """Euler step of the unicycle base plus linear joint advances, with
    every joint clamped to its range and the heading renormalized."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    nxt = RobotState(
        x=state.x + cmd.base_forward * math.cos(state.heading) * dt,
        y=state.y + cmd.base_forward * math.sin(state.heading) * dt,
        heading=state.heading + cmd.base_rotation * dt,
        lift=state.lift + cmd.lift * dt,
        extension=state.extension + cmd.extension * dt,
        wrist=state.wrist + cmd.wrist * dt,
        gripper=state.gripper + cmd.gripper * dt,
    )
    return nxt.clamped(geom)

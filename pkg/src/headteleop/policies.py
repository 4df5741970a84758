"""Scripted operator policies for closed-loop pipeline runs.

A policy emulates a human operator at the message level: it watches
snapshots and emits head-pose and click messages.  The operator aims
at a *perceived* grasp point that may carry a fixed lateral error,
which is how imperfect depth perception is modeled in paired
assisted/unassisted comparison runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ServerConfig
from .kinematics import forward_kinematics, wrap_angle
from .pipeline import TickPipeline
from .sim import Scenario


def angle_for_velocity(v: float, v_max: float, thr) -> float:
    """Invert the deadzone/proportional mapping: the head angle offset
    that produces velocity v for an actuator with limit v_max."""
    if v == 0.0:
        return 0.0
    frac = min(abs(v) / v_max, 1.0)
    return math.copysign(thr.t_low + frac * (thr.t_high - thr.t_low), v)


@dataclass(frozen=True)
class TaskStep:
    object_id: str
    grasp_aim: tuple[float, float, float]  # perceived grasp point
    place_zone: tuple[float, float]        # zone center to release over


class ScriptedOperator:
    """Drive-up, align, grasp, transport, release; optionally with
    driver assistance toggled on before the alignment phase."""

    APPROACH_REACH = 0.45  # m from base to grasp point along the arm axis

    def __init__(self, config: ServerConfig, steps: list[TaskStep],
                 use_assist: bool):
        self.config = config
        self.steps = steps
        self.use_assist = use_assist
        self.t = 0
        self.pitch = 0.0
        self.yaw = 0.0

    # -- low level ---------------------------------------------------------

    def _step(self, extra=None):
        msgs = [{"type": "head_pose", "roll_deg": 0.0, "pitch_deg": self.pitch,
                 "yaw_deg": self.yaw, "t_ms": self.t * self.config.dt * 1000.0}]
        if extra:
            msgs += extra
        snap = yield msgs
        self.t += 1
        return snap

    def _click_msg(self, action):
        return {"type": "click", "action": action,
                "t_ms": self.t * self.config.dt * 1000.0}

    def _gesture(self, count):
        self.pitch = self.yaw = 0.0
        snap = None
        for i in range(count):
            snap = yield from self._step([self._click_msg("press")])
            snap = yield from self._step([])
            snap = yield from self._step([self._click_msg("release")])
            if i < count - 1:
                for _ in range(2):
                    snap = yield from self._step([])
        for _ in range(10):  # let the sequence settle and the gesture land
            snap = yield from self._step([])
        return snap

    # -- control phases ----------------------------------------------------

    def _drive_to(self, snap, target_xy, final_heading, tol=0.01,
                  heading_tol=0.005):
        thr = self.config.thresholds
        lim = self.config.limits
        while True:
            r = snap["robot"]
            dx = target_xy[0] - r["x"]
            dy = target_xy[1] - r["y"]
            dist = math.hypot(dx, dy)
            if dist > tol:
                err = wrap_angle(math.atan2(dy, dx) - r["heading"])
                v = min(1.0 * dist, lim.base_forward) if abs(err) < 0.15 else 0.0
                w = max(-lim.base_rotation, min(2.0 * err, lim.base_rotation))
            else:
                err = wrap_angle(final_heading - r["heading"])
                if abs(err) < heading_tol:
                    break
                v = 0.0
                w = max(-lim.base_rotation, min(2.0 * err, lim.base_rotation))
            self.pitch = angle_for_velocity(v, lim.base_forward, thr)
            self.yaw = angle_for_velocity(w, lim.base_rotation, thr)
            snap = yield from self._step()
        self.pitch = self.yaw = 0.0
        snap = yield from self._step()
        return snap

    def _arm_align(self, snap, aim, tol=0.004, max_ticks=1200):
        geom = self.config.geometry
        thr = self.config.thresholds
        lim = self.config.limits
        for _ in range(max_ticks):
            r = snap["robot"]
            rx = math.sin(r["heading"])
            ry = -math.cos(r["heading"])
            lateral = (aim[0] - r["x"]) * rx + (aim[1] - r["y"]) * ry
            d_target = lateral - geom.arm_mount_offset - geom.gripper_length
            d_target = min(max(d_target, geom.extension_range[0]),
                           geom.extension_range[1])
            e_d = d_target - r["extension"]
            e_z = aim[2] - r["lift"]
            if abs(e_d) < tol and abs(e_z) < tol:
                break
            self.pitch = angle_for_velocity(
                max(-lim.lift, min(2.0 * e_z, lim.lift)), lim.lift, thr)
            self.yaw = angle_for_velocity(
                max(-lim.extension, min(2.0 * e_d, lim.extension)),
                lim.extension, thr)
            snap = yield from self._step()
        self.pitch = self.yaw = 0.0
        snap = yield from self._step()
        return snap

    def _squeeze(self, snap, object_id, close_ticks=200):
        """Hold the gripper closed; with assistance active this is also
        where the alignment controller finishes the job."""
        thr = self.config.thresholds
        for _ in range(close_ticks):
            if snap["attached_object"] == object_id:
                break
            self.pitch = -thr.t_high  # full-speed close
            self.yaw = 0.0
            snap = yield from self._step()
        self.pitch = 0.0
        snap = yield from self._step()
        return snap

    def _release(self, snap, ticks=8):
        thr = self.config.thresholds
        for _ in range(ticks):
            self.pitch = thr.t_high  # open
            self.yaw = 0.0
            snap = yield from self._step()
        self.pitch = 0.0
        snap = yield from self._step()
        return snap

    # -- the full run ------------------------------------------------------

    def run(self):
        geom = self.config.geometry
        snap = yield from self._step()
        snap = yield from self._gesture(1)   # idle -> robot control (drive)
        snap = yield from self._gesture(1)   # initialization click
        assist_on = False
        for step_no, task in enumerate(self.steps):
            aim = task.grasp_aim
            stage_xy = (aim[0], aim[1] + self.APPROACH_REACH)
            snap = yield from self._drive_to(snap, stage_xy, 0.0)
            if self.use_assist and not assist_on:
                snap = yield from self._gesture(3)  # assistance on (day6)
                assist_on = True
            snap = yield from self._gesture(1)      # drive -> arm
            snap = yield from self._arm_align(snap, aim)
            snap = yield from self._gesture(1)      # arm -> wrist
            attempts = 0
            while snap["attached_object"] != task.object_id:
                snap = yield from self._squeeze(snap, task.object_id)
                if snap["attached_object"] == task.object_id:
                    break
                attempts += 1  # misaligned: reopen and try again, forever
                snap = yield from self._release(snap, ticks=4)
            snap = yield from self._gesture(1)      # wrist -> drive
            reach = (geom.arm_mount_offset + snap["robot"]["extension"]
                     + geom.gripper_length)
            place_xy = (task.place_zone[0], task.place_zone[1] + reach)
            snap = yield from self._drive_to(snap, place_xy, 0.0)
            snap = yield from self._gesture(1)      # drive -> arm
            snap = yield from self._gesture(1)      # arm -> wrist
            snap = yield from self._release(snap)
            if step_no < len(self.steps) - 1:
                snap = yield from self._gesture(1)  # wrist -> drive
        while True:  # task done from the operator's side; idle out
            self.pitch = self.yaw = 0.0
            snap = yield from self._step()


def operator_for_scenario(config: ServerConfig, scenario: Scenario,
                          aim_error: tuple[float, float] = (0.0, 0.0),
                          use_assist: bool = False) -> ScriptedOperator:
    """Build the grasp-and-place plan for a built-in scenario, offsetting
    every perceived grasp point by the fixed planar aim error."""
    steps = []
    zone_for = {"fetch_redbull": {"can1": "drop"},
                "two_cups": {"cup1": "table_end", "cup2": "table_end"},
                "soiled_towel": {"towel1": "basket"},
                "blanket_tissue_trash_lite": {"blanket1": "foot_of_bed",
                                              "tissue1": "trash"}}
    mapping = zone_for.get(scenario.name)
    if mapping is None:
        raise ValueError(f"no scripted plan for scenario {scenario.name!r}")
    for oid, zone_name in mapping.items():
        obj = scenario.world.object_by_id(oid)
        aim = (obj.position[0] + aim_error[0], obj.position[1] + aim_error[1],
               obj.position[2])
        steps.append(TaskStep(oid, aim, scenario.zones[zone_name].center))
    return ScriptedOperator(config, steps, use_assist)


def run_scripted(config: ServerConfig, scenario: Scenario,
                 operator: ScriptedOperator, max_ticks: int,
                 log_writer=None):
    """Run a policy closed-loop against the pipeline.

    Returns (completion tick or None, pipeline).
    """
    pipeline = TickPipeline(config, scenario, log_writer=log_writer)
    gen = operator.run()
    msgs = gen.send(None)
    for tick in range(max_ticks):
        snap = pipeline.tick(msgs)
        if snap["completed"]:
            return tick, pipeline
        try:
            msgs = gen.send(snap)
        except StopIteration:
            msgs = []
    return None, pipeline

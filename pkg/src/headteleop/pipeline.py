"""The authoritative tick pipeline: input -> modes -> mapping ->
assistance -> simulation -> log record + snapshot.

One instance owns all mutable session state and is driven at the
configured rate, either by the network service or headlessly from a
scripted input file.  Each tick consumes the pending inbound messages
and produces exactly one snapshot.
"""

from __future__ import annotations

import hashlib
import json

from . import assist as assist_mod
from .config import ServerConfig
from .kinematics import ZERO_COMMAND, JointVelocityCommand, forward_kinematics
from .mapping import (Calibration, NotCalibratedError, OrientationSample,
                      cursor_position, cursor_velocity, map_to_command)
from .modes import (GestureRecognizer, MalformedClickStreamError, Mode,
                    ModeState, ClickEvent, transition)
from .protocol import PROTOCOL_VERSION, canonical_json
from .sim import Scenario, check_completion, step


class InputScriptError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"input script line {line}: {reason}")
        self.line = line


def command_to_dict(cmd: JointVelocityCommand) -> dict:
    return {"v": cmd.base_forward, "omega": cmd.base_rotation,
            "lift": cmd.lift, "extension": cmd.extension,
            "wrist": cmd.wrist, "gripper": cmd.gripper}


def robot_to_dict(robot) -> dict:
    return {"x": robot.x, "y": robot.y, "heading": robot.heading,
            "lift": robot.lift, "extension": robot.extension,
            "wrist": robot.wrist, "gripper": robot.gripper}


def world_digest(world) -> str:
    doc = {"robot": robot_to_dict(world.robot),
           "objects": [{"id": o.id, "position": list(o.position)}
                       for o in world.objects],
           "attached": world.attached_object,
           "tick": world.tick}
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


class TickPipeline:
    def __init__(self, config: ServerConfig, scenario: Scenario,
                 log_writer=None):
        self.config = config
        self.scenario = scenario
        self.log_writer = log_writer
        self.world = scenario.world
        self.mode = ModeState()
        self.recognizer = GestureRecognizer(config.timing)
        self.calibration: Calibration | None = None
        self.latest_sample: OrientationSample | None = None
        self.last_pose_tick: int | None = None
        self.queries: tuple[str, ...] = tuple(scenario.queries)
        self.cursor_style = "velocity"
        cx = (config.cursor.x_range[0] + config.cursor.x_range[1]) / 2
        cy = (config.cursor.y_range[0] + config.cursor.y_range[1]) / 2
        self.cursor_xy = (cx, cy)
        self.completed = False
        self.tick_index = 0
        self.last_record: dict | None = None
        self.last_snapshot: dict | None = None
        self._smoothed = None

    # -- message handling -------------------------------------------------

    def _handle_messages(self, messages):
        cfg = self.config
        t_ms = self.tick_index * cfg.dt * 1000.0
        gestures = list(self.recognizer.advance(t_ms))
        pose = None
        clicks = []
        aux = []
        announcements = []
        reset = False
        for msg in messages:
            mtype = msg["type"]
            if mtype == "head_pose":
                pose = msg  # latest wins within a tick
            elif mtype == "click":
                clicks.append({"action": msg["action"], "t_ms": msg["t_ms"]})
                try:
                    gestures += self.recognizer.feed(
                        ClickEvent(msg["action"], msg["t_ms"]))
                except MalformedClickStreamError as exc:
                    announcements.append(f"click stream error: {exc}")
            elif mtype == "query":
                self.queries = tuple(msg["labels"])
                aux.append({"type": "query", "labels": list(msg["labels"])})
                announcements.append(
                    "queries set: " + (", ".join(msg["labels"]) or "(none)"))
            elif mtype == "reset":
                reset = True
                aux.append({"type": "reset"})
            elif mtype == "cursor_target":
                self.cursor_style = msg["style"]
                aux.append({"type": "cursor_target", "style": msg["style"]})
                announcements.append(f"cursor {msg['style']} control")
        gestures += self.recognizer.advance(t_ms)
        return pose, clicks, aux, gestures, announcements, reset

    def _apply_reset(self):
        self.world = self.scenario.world
        self.calibration = None
        self.mode = ModeState()
        self.recognizer.reset()

    def _apply_gestures(self, gestures, announcements):
        calibrated_now = 0
        for gesture in gestures:
            prev = self.mode
            self.mode, effects = transition(self.mode, gesture,
                                            self.config.bindings)
            for effect in effects:
                if effect.kind == "calibrate":
                    sample = self.latest_sample or OrientationSample(0, 0, 0, 0)
                    self.calibration = Calibration.from_sample(sample)
                    calibrated_now += 1
                    if self.latest_sample is None:
                        announcements.append(
                            "initialized at neutral orientation (no head pose yet)")
                elif effect.kind == "announce":
                    announcements.append(effect.message)
            if prev.mode is not self.mode.mode and not self.mode.calibrated:
                self.calibration = None  # calibration is per control session
        return calibrated_now

    # -- command computation ----------------------------------------------

    def _input_fresh(self) -> bool:
        if self.latest_sample is None or self.last_pose_tick is None:
            return False
        age = (self.tick_index - self.last_pose_tick) * self.config.dt
        return age <= self.config.input_timeout_s

    def _smooth(self, cmd: JointVelocityCommand) -> JointVelocityCommand:
        a = self.config.smoothing
        if a <= 0:
            return cmd
        prev = self._smoothed or ZERO_COMMAND
        vec = (1 - a) * cmd.as_vector() + a * prev.as_vector()
        grip = (1 - a) * cmd.gripper + a * prev.gripper
        out = JointVelocityCommand.from_vector(vec, grip)
        self._smoothed = out
        return out

    def _compute_command(self):
        cfg = self.config
        intent = assist_mod.EMPTY_INTENT
        if self.mode.mode is Mode.ROBOT and self.mode.calibrated \
                and self._input_fresh():
            try:
                u_h = map_to_command(self.latest_sample, self.calibration,
                                     self.mode.submode, cfg.axis_assignment,
                                     cfg.limits, cfg.thresholds)
            except NotCalibratedError:
                return ZERO_COMMAND, intent
            u_h = self._smooth(u_h)
            if self.mode.assist_enabled:
                goals = assist_mod.detect_objects(self.world, list(self.queries),
                                                  cfg.assist)
                ee = forward_kinematics(self.world.robot, cfg.geometry)
                intent = assist_mod.infer_intent(goals, ee.position, cfg.assist)
                cmd = assist_mod.assist_command(self.world.robot, intent, u_h,
                                               cfg.assist, cfg.geometry,
                                               cfg.limits)
                return cmd, intent
            return u_h, intent
        return ZERO_COMMAND, intent

    def _update_cursor(self):
        cfg = self.config
        if not (self.mode.mode is Mode.CURSOR and self.mode.calibrated
                and self._input_fresh()):
            return
        if self.cursor_style == "position":
            self.cursor_xy = cursor_position(self.latest_sample, self.calibration,
                                             cfg.cursor, cfg.thresholds,
                                             cfg.axis_assignment)
        else:
            vx, vy = cursor_velocity(self.latest_sample, self.calibration,
                                     cfg.cursor, cfg.thresholds,
                                     cfg.axis_assignment)
            x = self.cursor_xy[0] + vx * cfg.dt
            y = self.cursor_xy[1] + vy * cfg.dt
            x = min(max(x, cfg.cursor.x_range[0]), cfg.cursor.x_range[1])
            y = min(max(y, cfg.cursor.y_range[0]), cfg.cursor.y_range[1])
            self.cursor_xy = (x, y)

    # -- the tick ----------------------------------------------------------

    def tick(self, messages: list[dict]) -> dict:
        cfg = self.config
        (pose, clicks, aux, gestures,
         announcements, reset) = self._handle_messages(messages)
        if reset:
            self._apply_reset()
            announcements.append("session reset")
        if pose is not None:
            self.latest_sample = OrientationSample(
                pose["roll_deg"], pose["pitch_deg"], pose["yaw_deg"],
                pose["t_ms"])
            self.last_pose_tick = self.tick_index
        calibrated_now = self._apply_gestures(gestures, announcements)

        cmd, intent = self._compute_command()
        self._update_cursor()
        self.world = step(self.world, cmd, cfg.dt, cfg.geometry,
                          self.scenario.bounds)
        if not self.completed and check_completion(self.scenario, self.world):
            self.completed = True
            announcements.append("task complete")

        record = self._build_record(pose, clicks, aux, cmd, intent,
                                    calibrated_now, reset, announcements)
        self.last_record = record
        if self.log_writer is not None:
            self.log_writer.append(record)
        snapshot = self._build_snapshot(cmd, intent, announcements)
        self.last_snapshot = snapshot
        self.tick_index += 1
        return snapshot

    def _build_record(self, pose, clicks, aux, cmd, intent, calibrated_now,
                      reset, announcements) -> dict:
        pose_doc = None
        if pose is not None:
            pose_doc = {"roll": pose["roll_deg"], "pitch": pose["pitch_deg"],
                        "yaw": pose["yaw_deg"], "t_ms": pose["t_ms"]}
        rec = {"tick": self.tick_index,
               "t_ms": self.tick_index * self.config.dt * 1000.0,
               "pose": pose_doc,
               "clicks": clicks,
               "mode": self._mode_doc(),
               "cmd": command_to_dict(cmd),
               "robot": robot_to_dict(self.world.robot),
               "digest": world_digest(self.world),
               "alpha": intent.confidence,
               "g_star": intent.g_star,
               "calibrated_now": calibrated_now,
               "reset": reset,
               "completed": self.completed,
               "announcements": announcements}
        if aux:
            rec["aux"] = aux
        return rec

    def _mode_doc(self) -> dict:
        return {"mode": self.mode.mode.value,
                "submode": self.mode.submode,
                "calibrated": self.mode.calibrated,
                "assist_enabled": self.mode.assist_enabled,
                "cursor_style": self.cursor_style}

    def _build_snapshot(self, cmd, intent, announcements) -> dict:
        snap = {"protocol_version": PROTOCOL_VERSION,
                "tick": self.tick_index,
                "scenario": self.scenario.name,
                "mode": self._mode_doc(),
                "command": command_to_dict(cmd),
                "robot": robot_to_dict(self.world.robot),
                "objects": [{"id": o.id, "label": o.label,
                             "position": list(o.position),
                             "graspable": o.graspable}
                            for o in self.world.objects],
                "attached_object": self.world.attached_object,
                "assist": {"enabled": self.mode.assist_enabled,
                           "alpha": intent.confidence,
                           "g_star": intent.g_star,
                           "probabilities": intent.probabilities},
                "cursor": ({"x": self.cursor_xy[0], "y": self.cursor_xy[1],
                            "style": self.cursor_style}
                           if self.mode.mode is Mode.CURSOR else None),
                "queries": list(self.queries),
                "completed": self.completed,
                "announcements": announcements}
        return snap


def run_headless(config: ServerConfig, input_path, scenario=None,
                 log_writer=None, extra_ticks: int = 0):
    """Drive the pipeline from a scripted input file (one JSON object
    per line: {"tick": N, "messages": [...]}, ticks ascending).

    Returns (final snapshot, pipeline).
    """
    from .protocol import ProtocolError, parse_inbound
    from .sim import load_scenario

    per_tick: dict[int, list[dict]] = {}
    max_tick = -1
    with open(input_path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputScriptError(lineno, f"invalid JSON: {exc}")
            if not isinstance(entry, dict) or "tick" not in entry:
                raise InputScriptError(lineno, "expected {'tick': N, 'messages': [...]}")
            tick = entry["tick"]
            if not isinstance(tick, int) or tick < 0 or tick < max_tick:
                raise InputScriptError(lineno, "ticks must be ascending integers")
            msgs = entry.get("messages", [])
            if not isinstance(msgs, list):
                raise InputScriptError(lineno, "'messages' must be a list")
            parsed = []
            for msg in msgs:
                try:
                    parsed.append(parse_inbound(msg))
                except ProtocolError as exc:
                    raise InputScriptError(lineno, str(exc))
            per_tick.setdefault(tick, []).extend(parsed)
            max_tick = max(max_tick, tick)

    if scenario is None:
        scenario = load_scenario(config.scenario)
    pipeline = TickPipeline(config, scenario, log_writer=log_writer)
    snapshot = pipeline._build_snapshot(ZERO_COMMAND, assist_mod.EMPTY_INTENT, [])
    for tick in range(max_tick + 1 + extra_ticks):
        snapshot = pipeline.tick(per_tick.get(tick, []))
    return snapshot, pipeline

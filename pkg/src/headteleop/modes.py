"""Click-gesture recognition and the operational-mode state machine.

Gestures are single / double / triple / N-or-more clicks and a press
held past a threshold.  Bindings map (current mode, gesture) pairs to
transitions; three presets cover the binding revisions used on days
1, 3, and 6, and custom bindings can be loaded from configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum


class MalformedClickStreamError(ValueError):
    """Press/release events out of order; the recognizer resets."""


@dataclass(frozen=True)
class ClickEvent:
    action: str        # "press" | "release"
    timestamp: float   # ms


class GestureKind(Enum):
    SINGLE = "single"
    DOUBLE = "double"
    TRIPLE = "triple"
    MULTI = "multi"   # 4+ clicks; matches threshold bindings only
    HOLD = "hold"


@dataclass(frozen=True)
class ClickGesture:
    kind: GestureKind
    count: int

    @staticmethod
    def from_count(count: int) -> "ClickGesture":
        kind = {1: GestureKind.SINGLE, 2: GestureKind.DOUBLE,
                3: GestureKind.TRIPLE}.get(count, GestureKind.MULTI)
        return ClickGesture(kind, count)


HOLD_GESTURE = ClickGesture(GestureKind.HOLD, 0)


@dataclass(frozen=True)
class GestureTiming:
    multi_click_gap: float = 400.0   # ms between clicks of one sequence
    hold_threshold: float = 600.0    # ms of press for a hold
    sequence_settle: float = 400.0   # ms of silence before a sequence emits

    def __post_init__(self):
        if min(self.multi_click_gap, self.hold_threshold,
               self.sequence_settle) <= 0:
            raise ValueError("timing windows must be positive")


class GestureRecognizer:
    """Causal click-pattern recognizer driven by events plus time.

    feed() ingests press/release events; advance(now) emits any gesture
    whose settle or hold window has elapsed by `now`.  A hold during an
    in-progress multi-click sequence cancels the sequence.
    """

    def __init__(self, timing: GestureTiming = GestureTiming()):
        self.timing = timing
        self._pressed = False
        self._press_t = 0.0
        self._hold_emitted = False
        self._count = 0
        self._last_release = 0.0

    def reset(self):
        self._pressed = False
        self._hold_emitted = False
        self._count = 0

    def advance(self, now: float) -> list[ClickGesture]:
        out: list[ClickGesture] = []
        if self._pressed and not self._hold_emitted:
            if now - self._press_t >= self.timing.hold_threshold:
                self._hold_emitted = True
                self._count = 0
                out.append(HOLD_GESTURE)
        elif not self._pressed and self._count > 0:
            if now - self._last_release >= self.timing.sequence_settle:
                out.append(ClickGesture.from_count(self._count))
                self._count = 0
        return out

    def feed(self, event: ClickEvent) -> list[ClickGesture]:
        out = self.advance(event.timestamp)
        if event.action == "press":
            if self._pressed:
                self.reset()
                raise MalformedClickStreamError("press while already pressed")
            if self._count > 0 and \
                    event.timestamp - self._last_release > self.timing.multi_click_gap:
                # Settle should have fired already; be safe and flush.
                out.append(ClickGesture.from_count(self._count))
                self._count = 0
            self._pressed = True
            self._press_t = event.timestamp
            self._hold_emitted = False
        elif event.action == "release":
            if not self._pressed:
                self.reset()
                raise MalformedClickStreamError("release without press")
            self._pressed = False
            if not self._hold_emitted:
                self._count += 1
                self._last_release = event.timestamp
            self._hold_emitted = False
        else:
            raise MalformedClickStreamError(f"unknown click action {event.action!r}")
        return out


def classify_gesture(events: list[ClickEvent],
                     timing: GestureTiming = GestureTiming()) -> list[ClickGesture]:
    """Run a finite event stream through the recognizer and flush."""
    rec = GestureRecognizer(timing)
    out: list[ClickGesture] = []
    last_t = 0.0
    for ev in events:
        out += rec.feed(ev)
        last_t = ev.timestamp
    out += rec.advance(last_t + timing.hold_threshold + timing.sequence_settle + 1)
    return out


class Mode(Enum):
    IDLE = "idle"
    ROBOT = "robot"
    CURSOR = "cursor"


SUBMODE_CYCLE = ("drive", "arm", "wrist")


@dataclass(frozen=True)
class ModeState:
    mode: Mode = Mode.IDLE
    submode: str = "drive"          # meaningful in ROBOT
    calibrated: bool = False        # meaningful in ROBOT / CURSOR
    assist_enabled: bool = False    # meaningful in ROBOT
    cursor_style: str = "velocity"  # meaningful in CURSOR


class Action(Enum):
    TO_ROBOT = "to_robot"
    TO_CURSOR = "to_cursor"
    TO_IDLE = "to_idle"
    CYCLE_SUBMODE = "cycle_submode"
    TOGGLE_ASSIST = "toggle_assist"


# Binding patterns: exact counts "1" "2" "3", thresholds "2+" "3+", "hold".
@dataclass(frozen=True)
class ClickBindings:
    name: str
    table: dict[tuple[str, str], Action] = field(default_factory=dict)

    def __post_init__(self):
        for ctx, _pat in self.table:
            if ctx not in ("idle", "robot", "cursor", "any"):
                raise ValueError(f"unknown binding context {ctx!r}")

    def resolve(self, mode: Mode, gesture: ClickGesture) -> Action | None:
        ctx = mode.value
        if gesture.kind is GestureKind.HOLD:
            patterns = ["hold"]
        else:
            patterns = []
            if gesture.count <= 3:
                patterns.append(str(gesture.count))
            if gesture.count >= 3:
                patterns.append("3+")
            if gesture.count >= 2:
                patterns.append("2+")
        # Exact patterns outrank thresholds; the current mode outranks "any".
        for pat in patterns:
            for c in (ctx, "any"):
                action = self.table.get((c, pat))
                if action is not None:
                    return action
        return None


PRESET_BINDINGS = {
    "day1": ClickBindings("day1", {
        ("idle", "3"): Action.TO_ROBOT,
        ("idle", "2"): Action.TO_CURSOR,
        ("any", "3+"): Action.TO_IDLE,
        ("robot", "1"): Action.CYCLE_SUBMODE,
        ("robot", "hold"): Action.TOGGLE_ASSIST,
    }),
    "day3": ClickBindings("day3", {
        ("idle", "1"): Action.TO_ROBOT,
        ("idle", "2+"): Action.TO_CURSOR,
        ("any", "hold"): Action.TO_IDLE,
        ("robot", "1"): Action.CYCLE_SUBMODE,
        ("robot", "2+"): Action.TOGGLE_ASSIST,
    }),
    "day6": ClickBindings("day6", {
        ("idle", "1"): Action.TO_ROBOT,
        ("idle", "3"): Action.TO_CURSOR,
        ("any", "hold"): Action.TO_IDLE,
        ("robot", "1"): Action.CYCLE_SUBMODE,
        ("robot", "3"): Action.TOGGLE_ASSIST,
    }),
}


@dataclass(frozen=True)
class Effect:
    kind: str          # "announce" | "calibrate" | "ignored"
    message: str = ""


def transition(state: ModeState, gesture: ClickGesture,
               bindings: ClickBindings) -> tuple[ModeState, list[Effect]]:
    """Apply one gesture to the mode state.

    The first single click inside an uncalibrated control mode is
    consumed as the initialization click: it captures the reference
    orientation and does not also cycle submodes.
    """
    if (state.mode in (Mode.ROBOT, Mode.CURSOR) and not state.calibrated
            and gesture.kind is GestureKind.SINGLE):
        nxt = replace(state, calibrated=True)
        return nxt, [Effect("calibrate"),
                     Effect("announce", f"{_describe(nxt)} initialized")]

    action = bindings.resolve(state.mode, gesture)
    if action is None:
        return state, [Effect("ignored",
                              f"no binding for {gesture.kind.value} in "
                              f"{state.mode.value} mode")]
    if action is Action.TO_ROBOT:
        # Fresh entry: uncalibrated, drive submode, assistance disarmed.
        nxt = replace(state, mode=Mode.ROBOT, submode="drive",
                      calibrated=False, assist_enabled=False)
        return nxt, [Effect("announce", "robot control: drive (click to initialize)")]
    if action is Action.TO_CURSOR:
        nxt = replace(state, mode=Mode.CURSOR, calibrated=False)
        return nxt, [Effect("announce", "cursor control (click to initialize)")]
    if action is Action.TO_IDLE:
        nxt = replace(state, mode=Mode.IDLE, calibrated=False)
        return nxt, [Effect("announce", "idle")]
    if action is Action.CYCLE_SUBMODE:
        if state.mode is not Mode.ROBOT:
            return state, [Effect("ignored", "submode cycle outside robot control")]
        i = SUBMODE_CYCLE.index(state.submode)
        nxt = replace(state, submode=SUBMODE_CYCLE[(i + 1) % 3])
        return nxt, [Effect("announce", f"robot control: {nxt.submode}")]
    if action is Action.TOGGLE_ASSIST:
        if state.mode is not Mode.ROBOT:
            return state, [Effect("ignored", "assist toggle outside robot control")]
        nxt = replace(state, assist_enabled=not state.assist_enabled)
        word = "on" if nxt.assist_enabled else "off"
        return nxt, [Effect("announce", f"driver assistance {word}")]
    raise AssertionError(action)


def _describe(state: ModeState) -> str:
    if state.mode is Mode.ROBOT:
        return f"robot control: {state.submode}"
    if state.mode is Mode.CURSOR:
        return "cursor control"
    return "idle"

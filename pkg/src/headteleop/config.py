"""Service configuration: defaults, YAML config file, CLI overrides."""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field, replace

import yaml

from .assist import AssistConfig
from .kinematics import RobotGeometry
from .mapping import AXIS_PRESETS, ActuatorLimits, AxisAssignment, CursorConfig, \
    ThresholdConfig
from .modes import PRESET_BINDINGS, ClickBindings, GestureTiming
from .protocol import canonical_json


@dataclass(frozen=True)
class ServerConfig:
    rate_hz: float = 20.0
    bindings_preset: str = "day6"
    axis_preset: str = "pitch-yaw"
    scenario: str = "fetch_redbull"
    scenario_file: str | None = None
    listen_host: str = "127.0.0.1"
    listen_port: int = 8765
    log_dir: str = "logs"
    # Staleness failsafe: zero command after this long without head pose.
    input_timeout_s: float = 0.5
    smoothing: float = 0.0  # exponential smoothing of user commands, 0 = off
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    limits: ActuatorLimits = field(default_factory=ActuatorLimits)
    assist: AssistConfig = field(default_factory=AssistConfig)
    geometry: RobotGeometry = field(default_factory=RobotGeometry)
    timing: GestureTiming = field(default_factory=GestureTiming)
    cursor: CursorConfig = field(default_factory=CursorConfig)

    def __post_init__(self):
        if self.rate_hz <= 0:
            raise ValueError("rate_hz must be > 0")
        if self.bindings_preset not in PRESET_BINDINGS:
            raise ValueError(f"unknown bindings preset {self.bindings_preset!r}")
        if self.axis_preset not in AXIS_PRESETS:
            raise ValueError(f"unknown axis preset {self.axis_preset!r}")

    @property
    def dt(self) -> float:
        return 1.0 / self.rate_hz

    @property
    def bindings(self) -> ClickBindings:
        return PRESET_BINDINGS[self.bindings_preset]

    @property
    def axis_assignment(self) -> AxisAssignment:
        return AXIS_PRESETS[self.axis_preset]

    def digest(self) -> str:
        """Stable digest of everything that affects the tick pipeline."""
        doc = dataclasses.asdict(self)
        return hashlib.sha256(canonical_json(doc).encode()).hexdigest()[:16]


_SUB_CONFIGS = {
    "thresholds": ThresholdConfig,
    "limits": ActuatorLimits,
    "assist": AssistConfig,
    "geometry": RobotGeometry,
    "timing": GestureTiming,
    "cursor": CursorConfig,
}

_TUPLE_FIELDS = {"lift_range", "extension_range", "wrist_range", "gripper_range",
                 "kp_mask", "gains", "x_range", "y_range"}


def config_from_dict(doc: dict) -> ServerConfig:
    kwargs = {}
    valid = {f.name for f in dataclasses.fields(ServerConfig)}
    for key, value in doc.items():
        if key not in valid:
            raise ValueError(f"unknown config key {key!r}")
        if key in _SUB_CONFIGS:
            sub = {k: tuple(v) if k in _TUPLE_FIELDS else v
                   for k, v in value.items()}
            kwargs[key] = _SUB_CONFIGS[key](**sub)
        else:
            kwargs[key] = value
    return ServerConfig(**kwargs)


def load_config(path: str) -> ServerConfig:
    with open(path) as f:
        doc = yaml.safe_load(f) or {}
    return config_from_dict(doc)


def apply_cli_overrides(cfg: ServerConfig, args) -> ServerConfig:
    updates = {}
    if getattr(args, "scenario", None):
        updates["scenario"] = args.scenario
    if getattr(args, "bindings", None):
        updates["bindings_preset"] = args.bindings
    if getattr(args, "axis", None):
        updates["axis_preset"] = args.axis
    if getattr(args, "rate", None):
        updates["rate_hz"] = args.rate
    if getattr(args, "log_dir", None):
        updates["log_dir"] = args.log_dir
    if getattr(args, "listen", None):
        host, _, port = args.listen.rpartition(":")
        updates["listen_host"] = host or "127.0.0.1"
        updates["listen_port"] = int(port)
    return replace(cfg, **updates) if updates else cfg

"""Session recording, persistence, deterministic replay, and metrics.

Log format: newline-delimited JSON.  The first line is a header with
the format version, the configuration digest, and the scenario name;
every following line is one per-tick record.  Records are serialized
canonically so a correct replay reproduces the file byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .protocol import canonical_json

FORMAT_VERSION = 1
FLUSH_EVERY_TICKS = 20  # at least once per second at 20 Hz


class OutOfOrderTickError(ValueError):
    pass


class ReplayDivergenceError(RuntimeError):
    def __init__(self, tick: int, detail: str = ""):
        super().__init__(f"replay diverged at tick {tick}" +
                         (f": {detail}" if detail else ""))
        self.tick = tick


class LogFormatError(ValueError):
    pass


def record_to_line(record: dict) -> str:
    return canonical_json(record)


class SessionLogWriter:
    """Single-writer append-only log; one record per tick."""

    def __init__(self, stream, config_digest: str, scenario: str):
        self._stream = stream
        self._last_tick = -1
        header = {"format_version": FORMAT_VERSION,
                  "config_digest": config_digest,
                  "scenario": scenario}
        self._stream.write(record_to_line(header) + "\n")
        self._stream.flush()

    @classmethod
    def open_path(cls, path, config_digest: str, scenario: str):
        return cls(open(path, "w"), config_digest, scenario)

    def append(self, record: dict):
        tick = record["tick"]
        if tick != self._last_tick + 1:
            raise OutOfOrderTickError(
                f"expected tick {self._last_tick + 1}, got {tick}")
        self._last_tick = tick
        self._stream.write(record_to_line(record) + "\n")
        if tick % FLUSH_EVERY_TICKS == 0:
            self._stream.flush()

    def close(self):
        self._stream.flush()
        self._stream.close()


@dataclass(frozen=True)
class SessionLog:
    header: dict
    records: list[dict]
    lines: list[str]  # raw record lines, for byte-level comparison


def read_log(path) -> SessionLog:
    with open(path) as f:
        raw = f.read().splitlines()
    if not raw:
        raise LogFormatError("empty log file: missing header")
    header = json.loads(raw[0])
    if header.get("format_version") != FORMAT_VERSION:
        raise LogFormatError(f"unsupported format_version "
                             f"{header.get('format_version')!r}")
    records = [json.loads(line) for line in raw[1:]]
    for i, rec in enumerate(records):
        if rec["tick"] != i:
            raise LogFormatError(f"non-contiguous tick at line {i + 2}")
    return SessionLog(header, records, raw[1:])


@dataclass(frozen=True)
class SessionMetrics:
    completion_time: float | None  # s, absent if never completed
    mode_switch_count: int
    calibration_count: int
    reset_count: int
    base_distance_traveled: float  # m
    assist_active_fraction: float  # of ticks

    def as_dict(self) -> dict:
        return {"completion_time": self.completion_time,
                "mode_switch_count": self.mode_switch_count,
                "calibration_count": self.calibration_count,
                "reset_count": self.reset_count,
                "base_distance_traveled": self.base_distance_traveled,
                "assist_active_fraction": self.assist_active_fraction}


def compute_metrics(log: SessionLog, rate_hz: float = 20.0) -> SessionMetrics:
    records = log.records
    completion = None
    switches = 0
    calibrations = 0
    resets = 0
    distance = 0.0
    assist_ticks = 0
    prev_mode = None
    prev_xy = None
    for rec in records:
        mode = (rec["mode"]["mode"], rec["mode"]["submode"]
                if rec["mode"]["mode"] == "robot" else None)
        if prev_mode is not None and mode != prev_mode:
            switches += 1
        prev_mode = mode
        calibrations += rec.get("calibrated_now", 0)
        if rec.get("reset"):
            resets += 1
        if rec["mode"].get("assist_enabled"):
            assist_ticks += 1
        xy = (rec["robot"]["x"], rec["robot"]["y"])
        if prev_xy is not None:
            distance += math.dist(prev_xy, xy)
        prev_xy = xy
        if completion is None and rec.get("completed"):
            completion = rec["tick"] / rate_hz
    frac = assist_ticks / len(records) if records else 0.0
    return SessionMetrics(completion, switches, calibrations, resets,
                          distance, frac)


def metrics_to_csv(metrics: SessionMetrics) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    d = metrics.as_dict()
    writer.writerow(d.keys())
    writer.writerow(d.values())
    return buf.getvalue()


def replay(log_path, config, scenario=None):
    """Re-run a recorded session through the full pipeline and verify
    that every regenerated record matches the file byte for byte.

    Returns (final WorldState, recomputed SessionMetrics).
    """
    from .pipeline import TickPipeline  # deferred: pipeline imports session
    from .sim import load_scenario

    log = read_log(log_path)
    if log.header["config_digest"] != config.digest():
        raise ReplayDivergenceError(-1, "configuration digest mismatch")
    if scenario is None:
        scenario = load_scenario(log.header["scenario"])
    elif scenario.name != log.header["scenario"]:
        raise ReplayDivergenceError(-1, "scenario mismatch")

    pipeline = TickPipeline(config, scenario)
    for line, rec in zip(log.lines, log.records):
        messages = _messages_from_record(rec)
        pipeline.tick(messages)
        regenerated = record_to_line(pipeline.last_record)
        if regenerated != line:
            raise ReplayDivergenceError(rec["tick"])
    return pipeline.world, compute_metrics(log, config.rate_hz)


def _messages_from_record(rec: dict) -> list[dict]:
    messages = []
    if rec["pose"] is not None:
        p = rec["pose"]
        messages.append({"type": "head_pose", "roll_deg": p["roll"],
                         "pitch_deg": p["pitch"], "yaw_deg": p["yaw"],
                         "t_ms": p["t_ms"]})
    for click in rec["clicks"]:
        messages.append({"type": "click", "action": click["action"],
                         "t_ms": click["t_ms"]})
    messages.extend(rec.get("aux", []))
    return messages

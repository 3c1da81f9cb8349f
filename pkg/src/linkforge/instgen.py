"""Seeded random instances and the on-disk instance / schedule documents."""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .model import (
    Assignment,
    GroundAntenna,
    Instance,
    Satellite,
    SatelliteAntenna,
    Schedule,
    StructuralError,
    Task,
    TimeWindow,
)

FORMAT_VERSION = 1
SCHEDULE_VERSION = 1

# one child seed per sampled quantity; append new names at the end only
_STREAMS = ("pair", "length", "start", "duration", "profit", "feed_switch")


class ConfigError(ValueError):
    pass


class InstanceFormatError(ValueError):
    """Malformed instance or schedule document."""


class UnsupportedVersionError(InstanceFormatError):
    pass


@dataclass(frozen=True)
class GenParams:
    task_count: int
    horizon: int = 86400
    n_satellites: int = 8
    n_stations: int = 3
    antennas_per_station: int = 2
    pass_length_range: tuple[int, int] = (300, 900)
    duration_mean: float = 50.0
    duration_std: float = 40.0
    profit_mean: float = 15.0
    profit_std: float = 8.0
    setup_time: int = 10
    min_overlap: int = 8
    switch_interval: int = 30
    fs_pair_rate: float = 0.3
    seed: int = 0

    def check(self) -> None:
        if self.task_count < 1:
            raise ConfigError("task_count must be >= 1")
        if min(self.n_satellites, self.n_stations, self.antennas_per_station) < 1:
            raise ConfigError("resource counts must be >= 1")
        lo, hi = self.pass_length_range
        if lo < 1 or hi < lo:
            raise ConfigError(f"bad pass_length_range {self.pass_length_range}")
        if hi > self.horizon:
            raise ConfigError("pass length exceeds the horizon")
        if self.duration_std < 0 or self.profit_std < 0:
            raise ConfigError("standard deviations must be >= 0")
        if self.profit_mean - self.profit_std * math.sqrt(3) <= 0:
            raise ConfigError("profit distribution must stay positive")
        if min(self.setup_time, self.min_overlap, self.switch_interval) < 0:
            raise ConfigError("tau, delta and phi must be >= 0")
        if not 0 <= self.fs_pair_rate <= 1:
            raise ConfigError("fs_pair_rate must lie in [0, 1]")
        if self.fs_pair_rate > 0 and lo <= self.min_overlap + 10:
            raise ConfigError("passes too short for feed-switch pairs")


def _streams(seed: int) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(len(_STREAMS))
    return {name: np.random.default_rng(c) for name, c in zip(_STREAMS, children)}


def _sample_duration(rng, mean, std, upper):
    """Normal duration resampled (not clamped) into [1, upper]."""
    if std == 0:
        return int(min(max(round(mean), 1), upper))
    for _ in range(10_000):
        d = int(round(rng.normal(mean, std)))
        if 1 <= d <= upper:
            return d
    raise ConfigError("cannot sample a duration that fits the window")


def generate(params: GenParams) -> Instance:
    params.check()
    rs = _streams(params.seed)
    n_sat = params.n_satellites
    n_gnd = params.n_stations * params.antennas_per_station
    sats = tuple(Satellite(s, (2 * s, 2 * s + 1), params.min_overlap) for s in range(n_sat))
    ants = tuple(SatelliteAntenna(2 * s + k, s, params.setup_time)
                 for s in range(n_sat) for k in (0, 1))
    gnds = tuple(GroundAntenna(g, g // params.antennas_per_station, params.switch_interval)
                 for g in range(n_gnd))
    half_width = params.profit_std * math.sqrt(3)
    p_lo, p_hi = params.profit_mean - half_width, params.profit_mean + half_width
    len_lo, len_hi = params.pass_length_range
    need = params.min_overlap + 10

    windows, tasks = [], []
    prev = None
    for k in range(params.task_count):
        chain = rs["feed_switch"].random() < params.fs_pair_rate
        length = int(rs["length"].integers(len_lo, len_hi + 1))
        if chain and prev is not None and n_gnd > 1:
            sat_ant = prev.sat_antenna ^ 1
            g = int(rs["pair"].integers(n_gnd - 1))
            gnd = g if g < prev.ground_antenna else g + 1
            evt = int(rs["start"].integers(prev.evt + 1, prev.lvt - need + 1))
            evt = min(evt, params.horizon - length)
        else:
            sat_ant = int(rs["pair"].integers(2 * n_sat))
            gnd = int(rs["pair"].integers(n_gnd))
            evt = int(rs["start"].integers(0, params.horizon - length + 1))
        w = TimeWindow(k, sat_ant, gnd, evt, evt + length)
        d = _sample_duration(rs["duration"], params.duration_mean, params.duration_std, length)
        rate = float(rs["profit"].uniform(p_lo, p_hi))
        windows.append(w)
        tasks.append(Task(k, k, d, rate))
        prev = w
    return Instance(params.horizon, sats, ants, gnds, tuple(windows), tuple(tasks))


def instance_to_dict(instance: Instance, params: dict | None = None) -> dict:
    if params is None:
        params = {
            "tau": instance.sat_antennas[0].setup_time if instance.sat_antennas else 0,
            "delta": instance.satellites[0].min_overlap if instance.satellites else 0,
            "phi": instance.ground_antennas[0].switch_interval if instance.ground_antennas else 0,
        }
    return {
        "version": FORMAT_VERSION,
        "horizon": instance.horizon,
        "params": params,
        "satellites": [
            {"id": s.id, "min_overlap": s.min_overlap,
             "antennas": [{"id": a, "setup_time": instance.sat_antenna(a).setup_time}
                          for a in s.antennas]}
            for s in instance.satellites
        ],
        "ground_antennas": [asdict(g) for g in instance.ground_antennas],
        "windows": [asdict(w) for w in instance.windows],
        "tasks": [asdict(t) for t in instance.tasks],
    }


def dumps(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=1) + "\n"


def save(instance: Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(instance))


def _field(obj, key, kind, ctx, default=None):
    if key not in obj:
        if default is not None:
            return default
        raise InstanceFormatError(f"{ctx}: missing field '{key}'")
    value = obj[key]
    if kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise InstanceFormatError(f"{ctx}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def _parse_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}") from None


def instance_from_dict(doc) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level must be an object")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"unsupported instance format version {version!r}")
    params = _field(doc, "params", dict, "instance")
    tau = _field(params, "tau", int, "params")
    delta = _field(params, "delta", int, "params")
    phi = _field(params, "phi", int, "params")
    horizon = _field(doc, "horizon", int, "instance")

    sats, ants = [], []
    for k, s in enumerate(_field(doc, "satellites", list, "instance")):
        ctx = f"satellites[{k}]"
        sid = _field(s, "id", int, ctx)
        antennas = _field(s, "antennas", list, ctx)
        if len(antennas) != 2:
            raise InstanceFormatError(f"{ctx}.antennas: expected 2 entries")
        ids = []
        for j, a in enumerate(antennas):
            actx = f"{ctx}.antennas[{j}]"
            ids.append(_field(a, "id", int, actx))
            ants.append(SatelliteAntenna(ids[-1], sid, _field(a, "setup_time", int, actx, tau)))
        sats.append(Satellite(sid, tuple(ids), _field(s, "min_overlap", int, ctx, delta)))
    gnds = []
    for k, g in enumerate(_field(doc, "ground_antennas", list, "instance")):
        ctx = f"ground_antennas[{k}]"
        gnds.append(GroundAntenna(_field(g, "id", int, ctx), _field(g, "station_id", int, ctx),
                                  _field(g, "switch_interval", int, ctx, phi)))
    windows = []
    for k, w in enumerate(_field(doc, "windows", list, "instance")):
        ctx = f"windows[{k}]"
        evt, lvt = _field(w, "evt", int, ctx), _field(w, "lvt", int, ctx)
        if not evt < lvt:
            raise InstanceFormatError(f"{ctx}: lvt ({lvt}) must exceed evt ({evt})")
        windows.append(TimeWindow(_field(w, "id", int, ctx), _field(w, "sat_antenna", int, ctx),
                                  _field(w, "ground_antenna", int, ctx), evt, lvt))
    tasks = []
    for k, t in enumerate(_field(doc, "tasks", list, "instance")):
        ctx = f"tasks[{k}]"
        tasks.append(Task(_field(t, "id", int, ctx), _field(t, "window", int, ctx),
                          _field(t, "min_duration", int, ctx),
                          float(_field(t, "profit_rate", float, ctx))))
    try:
        return Instance(horizon, tuple(sats), tuple(ants), tuple(gnds), tuple(windows),
                        tuple(tasks))
    except StructuralError as e:
        raise InstanceFormatError(str(e)) from None


def loads(text: str, source: str = "<string>") -> Instance:
    try:
        return instance_from_dict(_parse_json(text, source))
    except StructuralError as e:
        raise InstanceFormatError(f"{source}: {e}") from None


def load(path) -> Instance:
    with open(path) as fh:
        return loads(fh.read(), os.fspath(path))


def schedule_to_dict(schedule: Schedule, instance: Instance) -> dict:
    rows = []
    for a in schedule.assignments:
        rows.append({
            "task": a.task,
            "window": instance.task(a.task).window,
            "mode": "feed_switch" if a.is_feed_switch else "regular",
            "predecessor": -1 if a.predecessor is None else a.predecessor,
            "start": a.start,
            "end": a.end,
        })
    return {"version": SCHEDULE_VERSION, "profit": schedule.profit, "assignments": rows}


def save_schedule(schedule: Schedule, instance: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(schedule_to_dict(schedule, instance), fh, indent=1)
        fh.write("\n")


@dataclass
class ScheduleDocument:
    """A schedule read from disk together with the profit it claims."""

    schedule: Schedule
    claimed_profit: float
    window_mismatches: list[int] = field(default_factory=list)


def load_schedule(path, instance: Instance) -> ScheduleDocument:
    with open(path) as fh:
        doc = _parse_json(fh.read(), os.fspath(path))
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level must be an object")
    if doc.get("version") != SCHEDULE_VERSION:
        raise UnsupportedVersionError(f"unsupported schedule version {doc.get('version')!r}")
    claimed = float(_field(doc, "profit", float, "schedule"))
    items, mismatched = [], []
    for k, row in enumerate(_field(doc, "assignments", list, "schedule")):
        ctx = f"assignments[{k}]"
        mode = _field(row, "mode", str, ctx)
        pred = _field(row, "predecessor", int, ctx)
        if mode not in ("regular", "feed_switch") or (mode == "regular") != (pred == -1):
            raise InstanceFormatError(f"{ctx}: inconsistent mode {mode!r} / predecessor {pred}")
        task = _field(row, "task", int, ctx)
        window = _field(row, "window", int, ctx)
        instance.task(task)
        if instance.task(task).window != window:
            mismatched.append(task)
        items.append(Assignment(task, _field(row, "start", int, ctx), _field(row, "end", int, ctx),
                                None if pred == -1 else pred))
    return ScheduleDocument(Schedule.build(items, instance), claimed, mismatched)

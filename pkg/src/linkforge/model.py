"""Domain entities, the profit objective and the constraint validator.

All times are integer seconds. Feed-switch executions are not separate task
records: an :class:`Assignment` whose ``predecessor`` is set is a feed-switch
successor of that task.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np


class StructuralError(ValueError):
    """Dangling reference or malformed structure (not a constraint violation)."""


@dataclass(frozen=True)
class SatelliteAntenna:
    id: int
    satellite_id: int
    setup_time: int  # attitude adjustment, tau

    def __post_init__(self):
        if self.setup_time < 0:
            raise StructuralError(f"antenna {self.id}: setup_time < 0")


@dataclass(frozen=True)
class Satellite:
    id: int
    antennas: tuple[int, int]
    min_overlap: int  # feed-switch window overlap, Delta

    def __post_init__(self):
        if len(self.antennas) != 2:
            raise StructuralError(f"satellite {self.id}: needs exactly two antennas")
        if self.min_overlap < 0:
            raise StructuralError(f"satellite {self.id}: min_overlap < 0")


@dataclass(frozen=True)
class GroundAntenna:
    id: int
    station_id: int
    switch_interval: int  # phi

    def __post_init__(self):
        if self.switch_interval < 0:
            raise StructuralError(f"ground antenna {self.id}: switch_interval < 0")


@dataclass(frozen=True)
class TimeWindow:
    id: int
    sat_antenna: int
    ground_antenna: int
    evt: int
    lvt: int

    @property
    def length(self) -> int:
        return self.lvt - self.evt


@dataclass(frozen=True)
class Task:
    id: int
    window: int
    min_duration: int
    profit_rate: float

    def __post_init__(self):
        if self.min_duration <= 0:
            raise StructuralError(f"task {self.id}: min_duration must be > 0")
        if not self.profit_rate > 0:
            raise StructuralError(f"task {self.id}: profit_rate must be > 0")


@dataclass(frozen=True)
class Assignment:
    task: int
    start: int
    end: int
    predecessor: int | None = None  # None: regular mode

    @property
    def is_feed_switch(self) -> bool:
        return self.predecessor is not None

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Schedule:
    """Decoded task assignments, at most one per task."""

    assignments: tuple[Assignment, ...]
    profit: float
    by_task: Mapping[int, Assignment] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_task = {}
        for a in self.assignments:
            if a.task in by_task:
                raise StructuralError(f"task {a.task} assigned more than once")
            by_task[a.task] = a
        object.__setattr__(self, "by_task", by_task)

    @classmethod
    def build(cls, assignments: Iterable[Assignment], instance: "Instance") -> "Schedule":
        items = tuple(sorted(assignments, key=lambda a: (a.start, a.task)))
        return cls(items, profit_of_assignments(items, instance))

    def __len__(self) -> int:
        return len(self.assignments)

    def without(self, task: int, instance: "Instance") -> "Schedule":
        return Schedule.build((a for a in self.assignments if a.task != task), instance)


@dataclass(frozen=True)
class Instance:
    """Immutable problem data. Lookup tables are derived on construction."""

    horizon: int
    satellites: tuple[Satellite, ...]
    sat_antennas: tuple[SatelliteAntenna, ...]
    ground_antennas: tuple[GroundAntenna, ...]
    windows: tuple[TimeWindow, ...]
    tasks: tuple[Task, ...]

    def __post_init__(self):
        self._index("satellite", self.satellites)
        self._index("sat_antenna", self.sat_antennas)
        self._index("ground_antenna", self.ground_antennas)
        self._index("window", self.windows)
        self._index("task", self.tasks)
        for s in self.satellites:
            for a in s.antennas:
                ant = self._lookup("sat_antenna", a, f"satellite {s.id}")
                if ant.satellite_id != s.id:
                    raise StructuralError(f"antenna {a} does not belong to satellite {s.id}")
        for a in self.sat_antennas:
            self._lookup("satellite", a.satellite_id, f"antenna {a.id}")
        for w in self.windows:
            self._lookup("sat_antenna", w.sat_antenna, f"window {w.id}")
            self._lookup("ground_antenna", w.ground_antenna, f"window {w.id}")
            if not 0 <= w.evt < w.lvt <= self.horizon:
                raise StructuralError(
                    f"window {w.id}: need 0 <= evt < lvt <= horizon, got [{w.evt}, {w.lvt}]"
                )
        for t in self.tasks:
            self._lookup("window", t.window, f"task {t.id}")

    def _index(self, kind, items):
        table = {}
        for item in items:
            if item.id in table:
                raise StructuralError(f"duplicate {kind} id {item.id}")
            table[item.id] = item
        object.__setattr__(self, f"_{kind}_by_id", table)

    def _lookup(self, kind, key, ctx):
        try:
            return getattr(self, f"_{kind}_by_id")[key]
        except KeyError:
            raise StructuralError(f"{ctx}: unknown {kind} {key}") from None

    def task(self, task_id: int) -> Task:
        return self._lookup("task", task_id, "lookup")

    def window(self, window_id: int) -> TimeWindow:
        return self._lookup("window", window_id, "lookup")

    def satellite(self, satellite_id: int) -> Satellite:
        return self._lookup("satellite", satellite_id, "lookup")

    def sat_antenna(self, antenna_id: int) -> SatelliteAntenna:
        return self._lookup("sat_antenna", antenna_id, "lookup")

    def ground_antenna(self, antenna_id: int) -> GroundAntenna:
        return self._lookup("ground_antenna", antenna_id, "lookup")

    def task_window(self, task_id: int) -> TimeWindow:
        return self.window(self.task(task_id).window)

    def task_satellite(self, task_id: int) -> int:
        return self.sat_antenna(self.task_window(task_id).sat_antenna).satellite_id

    @property
    def task_ids(self) -> list[int]:
        return [t.id for t in self.tasks]

    def __len__(self) -> int:
        return len(self.tasks)

    def feed_switch_compatible(self, first: int, second: int) -> bool:
        """Whether ``second`` could be chained after ``first`` in feed-switch mode."""
        w1, w2 = self.task_window(first), self.task_window(second)
        a1, a2 = self.sat_antenna(w1.sat_antenna), self.sat_antenna(w2.sat_antenna)
        if a1.satellite_id != a2.satellite_id or a1.id == a2.id:
            return False
        if w1.ground_antenna == w2.ground_antenna:
            return False
        overlap = min(w1.lvt, w2.lvt) - max(w1.evt, w2.evt)
        return overlap >= self.satellite(a1.satellite_id).min_overlap

    def feed_switch_pairs(self) -> list[tuple[int, int]]:
        """Unordered task pairs that admit a feed-switch chain."""
        by_sat: dict[int, list[int]] = {}
        for t in self.tasks:
            by_sat.setdefault(self.task_satellite(t.id), []).append(t.id)
        pairs = []
        for ids in by_sat.values():
            ids.sort(key=lambda i: self.task_window(i).evt)
            for k, a in enumerate(ids):
                lvt = self.task_window(a).lvt
                for b in ids[k + 1:]:
                    if self.task_window(b).evt >= lvt:
                        break
                    if self.feed_switch_compatible(a, b):
                        pairs.append((a, b))
        return pairs


def profit_of_assignments(assignments: Iterable[Assignment], instance: Instance) -> float:
    # fsum: exact rounding, so the result does not depend on assignment order
    return math.fsum(float(a.end - a.start) * instance.task(a.task).profit_rate
                     for a in assignments)


def profit_of(schedule: Schedule, instance: Instance) -> float:
    """Regular plus feed-switch profit: each assignment at its own task's rate."""
    return profit_of_assignments(schedule.assignments, instance)


def profit_upper_bound(instance: Instance, tasks: Iterable[int] | None = None) -> float:
    ids = instance.task_ids if tasks is None else tasks
    total = 0.0
    for i in ids:
        t = instance.task(i)
        total += t.profit_rate * instance.window(t.window).length
    return total


@dataclass(frozen=True)
class Violation:
    tag: str
    assignments: tuple[int, ...]
    slack: float

    def __str__(self) -> str:
        ids = ",".join(str(i) for i in self.assignments)
        return f"{self.tag}[{ids}] slack={self.slack:g}"


# Constraint tags. Keys are stable identifiers used in reports.
CONSTRAINTS = {
    "start_before_end": "start strictly earlier than end",
    "window_start": "start inside the visible window",
    "window_end": "end inside the visible window",
    "min_duration": "duration at least the task's minimum",
    "satellite_exclusive": "a satellite links through one antenna at a time",
    "ground_exclusive": "a ground antenna serves one satellite antenna at a time",
    "setup_gap": "attitude adjustment gap between consecutive satellite tasks",
    "switch_interval": "switching interval between consecutive ground antenna tasks",
    "fs_resources": "feed-switch pair on one satellite, different antennas and ground antennas",
    "fs_overlap": "feed-switch windows overlap by the minimum overlap time",
    "fs_continuity": "feed-switch successor starts exactly at predecessor end",
    "fs_orphan": "feed-switch predecessor is scheduled",
}


def _exclusive(items, tag, out):
    """Overlap sweep over (start, end, task) sorted by start."""
    reach_end, reach_task = None, None
    for st, et, task in items:
        if reach_end is not None and st < reach_end:
            out.append(Violation(tag, (reach_task, task), st - reach_end))
        if reach_end is None or et > reach_end:
            reach_end, reach_task = et, task


def validate(schedule: Schedule, instance: Instance) -> list[Violation]:
    """Every violated constraint of ``schedule``; an empty list means feasible.

    Raises :class:`StructuralError` if an assignment references a task, or a
    feed-switch predecessor, that does not exist in ``instance``.
    """
    out: list[Violation] = []
    by_task = schedule.by_task
    info = {}
    for a in schedule.assignments:
        task = instance.task(a.task)
        w = instance.window(task.window)
        ant = instance.sat_antenna(w.sat_antenna)
        if a.predecessor is not None:
            instance.task(a.predecessor)
        info[a.task] = (w, ant)

        if a.start >= a.end:
            out.append(Violation("start_before_end", (a.task,), a.end - a.start))
        if a.start < w.evt:
            out.append(Violation("window_start", (a.task,), a.start - w.evt))
        if a.end > w.lvt:
            out.append(Violation("window_end", (a.task,), w.lvt - a.end))
        if a.end - a.start < task.min_duration:
            out.append(Violation("min_duration", (a.task,), a.end - a.start - task.min_duration))

    sat_lines: dict[int, list] = {}
    gnd_lines: dict[int, list] = {}
    for a in schedule.assignments:
        w, ant = info[a.task]
        sat_lines.setdefault(ant.satellite_id, []).append((a.start, a.end, a.task))
        gnd_lines.setdefault(w.ground_antenna, []).append((a.start, a.end, a.task))

    for line in sat_lines.values():
        line.sort()
        _exclusive(line, "satellite_exclusive", out)
        for (_, pe, pt), (ns, _, nt) in zip(line, line[1:]):
            nxt = by_task[nt]
            if nxt.predecessor == pt:
                continue  # checked with the feed-switch rules below
            if nxt.predecessor is not None and nxt.predecessor not in by_task:
                continue  # orphan, reported once below
            tau = info[pt][1].setup_time
            if ns - pe < tau:
                out.append(Violation("setup_gap", (pt, nt), ns - pe - tau))

    for gid, line in gnd_lines.items():
        line.sort()
        _exclusive(line, "ground_exclusive", out)
        phi = instance.ground_antenna(gid).switch_interval
        for (_, pe, pt), (ns, _, nt) in zip(line, line[1:]):
            if ns - pe < phi:
                out.append(Violation("switch_interval", (pt, nt), ns - pe - phi))

    for a in schedule.assignments:
        if a.predecessor is None:
            continue
        prev = by_task.get(a.predecessor)
        if prev is None:
            out.append(Violation("fs_orphan", (a.task,), 0))
            continue
        w, ant = info[a.task]
        pw, pant = info[prev.task]
        ids = (prev.task, a.task)
        if (
            pant.satellite_id != ant.satellite_id
            or pant.id == ant.id
            or pw.ground_antenna == w.ground_antenna
        ):
            out.append(Violation("fs_resources", ids, 0))
        overlap = min(w.lvt, pw.lvt) - max(w.evt, pw.evt)
        delta = instance.satellite(ant.satellite_id).min_overlap
        if overlap < delta:
            out.append(Violation("fs_overlap", ids, overlap - delta))
        if a.start != prev.end:
            out.append(Violation("fs_continuity", ids, a.start - prev.end))
    return out


def is_feasible(schedule: Schedule, instance: Instance) -> bool:
    return not validate(schedule, instance)


@dataclass(frozen=True)
class TaskArrays:
    """Column view of an instance, indexed by task position (0..n-1)."""

    ids: np.ndarray
    sat: np.ndarray
    slot: np.ndarray  # 0/1: which of the satellite's two antennas
    ant: np.ndarray
    gnd: np.ndarray
    evt: np.ndarray
    lvt: np.ndarray
    min_dur: np.ndarray
    rate: np.ndarray
    tau: np.ndarray  # per satellite antenna index
    phi: np.ndarray  # per ground antenna index
    delta: np.ndarray  # per satellite index
    position: Mapping[int, int]


def task_arrays(instance: Instance) -> TaskArrays:
    """Dense integer encoding consumed by the decoder kernel (cached)."""
    cached = instance.__dict__.get("_arrays")
    if cached is not None:
        return cached
    sat_idx = {s.id: k for k, s in enumerate(instance.satellites)}
    ant_idx = {a.id: k for k, a in enumerate(instance.sat_antennas)}
    gnd_idx = {g.id: k for k, g in enumerate(instance.ground_antennas)}
    n = len(instance.tasks)
    cols = {k: np.empty(n, dtype=np.int64) for k in
            ("ids", "sat", "slot", "ant", "gnd", "evt", "lvt", "min_dur")}
    rate = np.empty(n, dtype=np.float64)
    for k, t in enumerate(instance.tasks):
        w = instance.window(t.window)
        a = instance.sat_antenna(w.sat_antenna)
        cols["ids"][k] = t.id
        cols["sat"][k] = sat_idx[a.satellite_id]
        cols["slot"][k] = instance.satellite(a.satellite_id).antennas.index(a.id)
        cols["ant"][k] = ant_idx[a.id]
        cols["gnd"][k] = gnd_idx[w.ground_antenna]
        cols["evt"][k] = w.evt
        cols["lvt"][k] = w.lvt
        cols["min_dur"][k] = t.min_duration
        rate[k] = t.profit_rate
    arrays = TaskArrays(
        rate=rate,
        tau=np.array([a.setup_time for a in instance.sat_antennas], dtype=np.int64),
        phi=np.array([g.switch_interval for g in instance.ground_antennas], dtype=np.int64),
        delta=np.array([s.min_overlap for s in instance.satellites], dtype=np.int64),
        position={int(i): k for k, i in enumerate(cols["ids"])},
        **cols,
    )
    object.__setattr__(instance, "_arrays", arrays)
    return arrays


def make_instance(
    horizon: int,
    tasks: Sequence[dict],
    n_satellites: int = 1,
    n_ground: int = 2,
    setup_time: int = 10,
    min_overlap: int = 8,
    switch_interval: int = 30,
) -> Instance:
    """Small hand-built instances for examples and tests.

    Each task dict carries ``sat``, ``ant`` (0 or 1), ``gnd``, ``evt``, ``lvt``,
    ``d``, ``p`` and optionally ``id``. Satellite ``s`` owns antennas ``2s`` and
    ``2s + 1``; ground antenna ``g`` sits on its own station.
    """
    sats = tuple(Satellite(s, (2 * s, 2 * s + 1), min_overlap) for s in range(n_satellites))
    ants = tuple(
        SatelliteAntenna(2 * s + k, s, setup_time) for s in range(n_satellites) for k in (0, 1)
    )
    gnds = tuple(GroundAntenna(g, g, switch_interval) for g in range(n_ground))
    windows, items = [], []
    for k, row in enumerate(tasks):
        tid = row.get("id", k)
        windows.append(TimeWindow(tid, 2 * row["sat"] + row["ant"], row["gnd"],
                                  row["evt"], row["lvt"]))
        items.append(Task(tid, tid, row["d"], row["p"]))
    return Instance(horizon, sats, ants, gnds, tuple(windows), tuple(items))

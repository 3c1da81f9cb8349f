"""Exhaustive references for tiny instances.

``permutation_oracle`` enumerates every chromosome and keeps the best decoded
profit. ``placement_oracle`` ignores the decoder entirely: it searches task
subsets, modes and start/end times on a grid, using :func:`validate` as the
only feasibility test. ``replay_greedy`` re-derives the decoder's choice for a
single chromosome by brute-force enumeration, again through :func:`validate`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .decode import decode, decode_profit
from .model import Assignment, Instance, Schedule, validate


class OracleLimitError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    best_profit: float
    best_permutation: np.ndarray
    enumerated: int
    best_schedule: Schedule


def permutation_oracle(instance: Instance, limit: int = 8, feed_switch: bool = True) -> OracleResult:
    n = len(instance)
    if n > limit:
        raise OracleLimitError(f"{n} tasks exceeds the permutation oracle limit of {limit}")
    ids = np.asarray(instance.task_ids, dtype=np.int64)
    best, best_perm, count = -math.inf, ids, 0
    for perm in itertools.permutations(range(n)):
        genes = ids[list(perm)]
        value = decode_profit(genes, instance, feed_switch)
        count += 1
        if value > best:
            best, best_perm = value, genes
    schedule = decode(best_perm, instance, feed_switch)
    return OracleResult(schedule.profit, best_perm, count, schedule)


def _feasible(assignments, instance, ignore=()):
    sched = Schedule.build(assignments, instance)
    return not [v for v in validate(sched, instance) if v.tag not in ignore]


def replay_greedy(chromosome, instance: Instance, feed_switch: bool = True,
                  step: int = 1) -> Schedule:
    """Brute-force re-derivation of the greedy decoder's output.

    For each gene, every start time on the grid and every feed-switch
    predecessor is tried; the longest end time is found by bisection, which
    is valid because shortening the newest task never breaks feasibility.
    Ties go to the earliest start, then to regular mode.
    """
    placed: list[Assignment] = []
    for gene in np.asarray(chromosome).tolist():
        task = instance.task(gene)
        w = instance.window(task.window)
        modes = [None]
        if feed_switch:
            modes += [a.task for a in placed]
        best = None  # (duration, -start, regular?) maximised
        for mode in modes:
            if mode is None:
                starts = range(w.evt, w.lvt, step)
            else:
                starts = [next(a.end for a in placed if a.task == mode)]
            for s in starts:
                if not w.evt <= s < w.lvt:
                    continue

                def ok(e, s=s, mode=mode):
                    return _feasible(placed + [Assignment(gene, s, e, mode)], instance,
                                     ignore=("min_duration",))

                if not ok(s + 1):
                    continue
                lo, hi = s + 1, w.lvt
                while lo < hi:
                    mid = (lo + hi + 1) // 2
                    if ok(mid):
                        lo = mid
                    else:
                        hi = mid - 1
                key = (lo - s, -s, mode is None)
                if best is None or key > best[0]:
                    best = (key, Assignment(gene, s, lo, mode))
        if best is not None and best[0][0] >= task.min_duration:
            placed.append(best[1])
    return Schedule.build(placed, instance)


@dataclass(frozen=True)
class PlacementResult:
    best_profit: float
    best_schedule: Schedule
    nodes: int


def _grid(lo, hi, step):
    first = -(-lo // step) * step
    return range(first, hi + 1, step)


def placement_oracle(instance: Instance, time_step: int = 1, limit: int = 4,
                     feed_switch: bool = True) -> PlacementResult:
    """Best feasible profit over all schedules whose times lie on the grid."""
    n = len(instance)
    if n > limit:
        raise OracleLimitError(f"{n} tasks exceeds the placement oracle limit of {limit}")
    order = sorted(instance.task_ids, key=lambda i: (instance.task_window(i).evt, i))
    ub = [0.0] * (n + 1)
    for k in range(n - 1, -1, -1):
        t = instance.task(order[k])
        ub[k] = ub[k + 1] + t.profit_rate * instance.window(t.window).length

    options = []
    for tid in order:
        t = instance.task(tid)
        w = instance.window(t.window)
        modes = [None]
        if feed_switch:
            modes += [o for o in order if o != tid and instance.feed_switch_compatible(o, tid)]
        opts = []
        grid = list(_grid(w.evt, w.lvt, time_step))
        for mode in modes:
            for s in grid:
                for e in grid:
                    if e - s >= t.min_duration:
                        opts.append(((e - s) * t.profit_rate, Assignment(tid, s, e, mode)))
        opts.sort(key=lambda o: (-o[0], o[1].start, o[1].predecessor is not None))
        options.append(opts)

    best = [-1.0, ()]
    nodes = [0]
    pair_cache: dict = {}

    def pair_ok(p, a):
        # every constraint involves at most two assignments, so a pair that
        # fails on its own can never sit inside a feasible schedule
        key = (p, a)
        if key not in pair_cache:
            pair_cache[key] = _feasible([p, a], instance, ignore=("fs_orphan",))
        return pair_cache[key]

    def dfs(k, placed, profit):
        nodes[0] += 1
        if profit + ub[k] <= best[0]:
            return
        if k == n:
            if _feasible(placed, instance):
                # profit + ub[n] > best, so this is a strict improvement
                best[0], best[1] = profit, tuple(placed)
            return
        for value, a in options[k]:
            if profit + value + ub[k + 1] <= best[0]:
                break
            if a.predecessor is not None:
                pa = next((p for p in placed if p.task == a.predecessor), None)
                if pa is not None and pa.end != a.start:
                    continue
            if all(pair_ok(p, a) for p in placed):
                dfs(k + 1, placed + [a], profit + value)
        dfs(k + 1, placed, profit)

    dfs(0, [], 0.0)
    schedule = Schedule.build(best[1], instance)
    return PlacementResult(schedule.profit, schedule, nodes[0])

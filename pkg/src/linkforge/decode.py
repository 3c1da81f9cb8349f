"""Permutation chromosomes and the greedy maximum-allocation decoder.

A chromosome is a 1-D integer array holding every task id exactly once. The
decoder walks it left to right and gives each task the longest contiguous
placement still free on its satellite and its ground antenna, either as a
regular task or chained to a just-finished task on the satellite's other
antenna (feed switching). Tasks whose best placement is shorter than their
minimum duration are skipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import Assignment, Instance, Schedule, StructuralError, task_arrays


def random_chromosome(instance: Instance, rng: np.random.Generator) -> np.ndarray:
    if not len(instance):
        raise StructuralError("instance has no tasks")
    return rng.permutation(np.asarray(instance.task_ids, dtype=np.int64))


def free_intervals(timeline, window, gap_before=0, gap_after=0):
    """Maximal sub-intervals of ``window`` that keep clear of every booked block.

    ``timeline`` is a sorted list of non-overlapping ``(start, end)`` blocks. A
    candidate ``[s, e]`` is free when each block ending before it ends at least
    ``gap_before`` earlier and each block starting after it starts at least
    ``gap_after`` later.
    """
    lo_w, hi_w = window
    out = []
    cursor = lo_w
    for start, end in timeline:
        lo, hi = start - gap_after, end + gap_before
        if lo >= hi_w:
            break
        if hi <= cursor:
            continue
        if lo > cursor:
            out.append((cursor, lo))
        cursor = hi
    if cursor < hi_w:
        out.append((cursor, hi_w))
    return out


@njit(cache=True)
def _insert(buf, off, cnt, item, st):
    k = cnt
    while k > 0 and st[buf[off + k - 1]] > st[item]:
        buf[off + k] = buf[off + k - 1]
        k -= 1
    buf[off + k] = item


@njit(cache=True)
def _decode_kernel(order, sat, slot, ant, gnd, evt, lvt, min_dur, tau, phi, delta,
                   sat_off, gnd_off, feed_switch):
    n = evt.shape[0]
    st = np.full(n, -1, np.int64)
    et = np.full(n, -1, np.int64)
    pred = np.full(n, -1, np.int64)
    best_at_turn = np.zeros(n, np.int64)
    sat_buf = np.empty(n, np.int64)
    gnd_buf = np.empty(n, np.int64)
    sat_cnt = np.zeros(sat_off.shape[0] - 1, np.int64)
    gnd_cnt = np.zeros(gnd_off.shape[0] - 1, np.int64)
    sf_s = np.empty(n + 1, np.int64)
    sf_e = np.empty(n + 1, np.int64)
    gf_s = np.empty(n + 1, np.int64)
    gf_e = np.empty(n + 1, np.int64)
    tau_max = 0
    for k in range(tau.shape[0]):
        if tau[k] > tau_max:
            tau_max = tau[k]

    for turn in range(order.shape[0]):
        i = order[turn]
        s, g = sat[i], gnd[i]
        w_lo, w_hi = evt[i], lvt[i]
        tau_i = tau[ant[i]]
        phi_g = phi[g]
        so, sc = sat_off[s], sat_cnt[s]
        go, gc = gnd_off[g], gnd_cnt[g]

        # satellite free pieces: block x forbids (st[x] - tau_i, et[x] + tau[x])
        lo_k, hi_k = 0, sc
        while lo_k < hi_k:
            mid = (lo_k + hi_k) // 2
            if et[sat_buf[so + mid]] + tau_max <= w_lo:
                lo_k = mid + 1
            else:
                hi_k = mid
        first_sat = lo_k
        ns = 0
        cursor = w_lo
        for k in range(first_sat, sc):
            x = sat_buf[so + k]
            lo = st[x] - tau_i
            if lo >= w_hi:
                break
            hi = et[x] + tau[ant[x]]
            if hi <= cursor:
                continue
            if lo > cursor:
                sf_s[ns] = cursor
                sf_e[ns] = lo
                ns += 1
            cursor = hi
        if cursor < w_hi:
            sf_s[ns] = cursor
            sf_e[ns] = w_hi
            ns += 1

        # ground free pieces: block x forbids (st[x] - phi, et[x] + phi)
        lo_k, hi_k = 0, gc
        while lo_k < hi_k:
            mid = (lo_k + hi_k) // 2
            if et[gnd_buf[go + mid]] + phi_g <= w_lo:
                lo_k = mid + 1
            else:
                hi_k = mid
        nf = 0
        cursor = w_lo
        for k in range(lo_k, gc):
            x = gnd_buf[go + k]
            lo = st[x] - phi_g
            if lo >= w_hi:
                break
            hi = et[x] + phi_g
            if hi <= cursor:
                continue
            if lo > cursor:
                gf_s[nf] = cursor
                gf_e[nf] = lo
                nf += 1
            cursor = hi
        if cursor < w_hi:
            gf_s[nf] = cursor
            gf_e[nf] = w_hi
            nf += 1

        best_dur, best_st, best_pred = 0, -1, -1
        a, b = 0, 0
        while a < ns and b < nf:
            lo = max(sf_s[a], gf_s[b])
            hi = min(sf_e[a], gf_e[b])
            if hi - lo > best_dur:
                best_dur, best_st = hi - lo, lo
            if sf_e[a] < gf_e[b]:
                a += 1
            else:
                b += 1

        if feed_switch:
            lo_k, hi_k = 0, sc
            while lo_k < hi_k:
                mid = (lo_k + hi_k) // 2
                if et[sat_buf[so + mid]] < w_lo:
                    lo_k = mid + 1
                else:
                    hi_k = mid
            for k in range(lo_k, sc):
                x = sat_buf[so + k]
                t = et[x]
                if t >= w_hi:
                    break
                if slot[x] == slot[i] or gnd[x] == g:
                    continue
                if min(lvt[x], w_hi) - max(evt[x], w_lo) < delta[s]:
                    continue
                end = w_hi
                if k + 1 < sc:
                    nxt = st[sat_buf[so + k + 1]] - tau_i
                    if nxt < end:
                        end = nxt
                if end <= t:
                    continue
                found = False
                for j in range(nf):
                    if gf_s[j] <= t < gf_e[j]:
                        if gf_e[j] < end:
                            end = gf_e[j]
                        found = True
                        break
                if not found:
                    continue
                dur = end - t
                if dur > best_dur or (dur == best_dur and dur > 0 and t < best_st):
                    best_dur, best_st, best_pred = dur, t, x

        best_at_turn[turn] = best_dur
        if best_dur >= min_dur[i]:
            st[i] = best_st
            et[i] = best_st + best_dur
            pred[i] = best_pred
            _insert(sat_buf, so, sc, i, st)
            sat_cnt[s] = sc + 1
            _insert(gnd_buf, go, gc, i, st)
            gnd_cnt[g] = gc + 1
    return st, et, pred, best_at_turn


@dataclass(frozen=True)
class _Layout:
    sat_off: np.ndarray
    gnd_off: np.ndarray
    sorted_ids: np.ndarray
    sorter: np.ndarray
    identity: bool


def _layout(instance: Instance) -> _Layout:
    cached = instance.__dict__.get("_layout")
    if cached is not None:
        return cached
    arr = task_arrays(instance)
    sat_off = np.zeros(len(arr.delta) + 1, np.int64)
    np.cumsum(np.bincount(arr.sat, minlength=len(arr.delta)), out=sat_off[1:])
    gnd_off = np.zeros(len(arr.phi) + 1, np.int64)
    np.cumsum(np.bincount(arr.gnd, minlength=len(arr.phi)), out=gnd_off[1:])
    sorter = np.argsort(arr.ids, kind="stable")
    layout = _Layout(
        sat_off=sat_off,
        gnd_off=gnd_off,
        sorted_ids=arr.ids[sorter],
        sorter=sorter,
        identity=bool(np.array_equal(arr.ids, np.arange(len(arr.ids)))),
    )
    object.__setattr__(instance, "_layout", layout)
    return layout


def positions(genes, instance: Instance, check: bool = True) -> np.ndarray:
    """Map task ids to dense task positions."""
    genes = np.asarray(genes, dtype=np.int64)
    lay = _layout(instance)
    if lay.identity:
        pos = genes
    else:
        idx = np.searchsorted(lay.sorted_ids, genes)
        idx = np.clip(idx, 0, len(lay.sorted_ids) - 1)
        if check and not np.array_equal(lay.sorted_ids[idx], genes):
            raise StructuralError("chromosome references unknown task ids")
        pos = lay.sorter[idx]
    if check:
        n = len(instance)
        if genes.ndim != 1 or len(genes) != n:
            raise StructuralError(f"chromosome length {genes.size} != task count {n}")
        if not np.array_equal(np.sort(pos), np.arange(n)):
            raise StructuralError("chromosome is not a permutation of the task ids")
    return pos


def _run(genes, instance, feed_switch, check):
    arr = task_arrays(instance)
    lay = _layout(instance)
    order = positions(genes, instance, check=check)
    return _decode_kernel(order, arr.sat, arr.slot, arr.ant, arr.gnd, arr.evt, arr.lvt,
                          arr.min_dur, arr.tau, arr.phi, arr.delta,
                          lay.sat_off, lay.gnd_off, feed_switch)


def decode(chromosome, instance: Instance, feed_switch: bool = True) -> Schedule:
    """Decode a permutation of task ids into a feasible schedule."""
    st, et, pred, _ = _run(chromosome, instance, feed_switch, True)
    ids = task_arrays(instance).ids
    items = []
    for k in np.flatnonzero(st >= 0):
        p = int(pred[k])
        items.append(Assignment(int(ids[k]), int(st[k]), int(et[k]),
                                None if p < 0 else int(ids[p])))
    return Schedule.build(items, instance)


def decode_profit(chromosome, instance: Instance, feed_switch: bool = True,
                  check: bool = False) -> float:
    """Profit of the decoded schedule without materialising it."""
    st, et, _, _ = _run(chromosome, instance, feed_switch, check)
    mask = st >= 0
    return math.fsum(((et[mask] - st[mask]) * task_arrays(instance).rate[mask]).tolist())


@dataclass(frozen=True)
class Turn:
    task: int
    best_duration: int  # longest placement available at this task's turn
    placed: bool


def decode_trace(chromosome, instance: Instance, feed_switch: bool = True):
    """Decode and also report, per gene, the best placement length seen at its turn.

    Used to audit skipped tasks: replaying the prefix schedule must show no
    placement of at least the task's minimum duration.
    """
    st, et, pred, best = _run(chromosome, instance, feed_switch, True)
    genes = np.asarray(chromosome, dtype=np.int64)
    order = positions(genes, instance)
    turns = [Turn(int(genes[k]), int(best[k]), bool(st[order[k]] >= 0))
             for k in range(len(genes))]
    return decode(chromosome, instance, feed_switch), turns

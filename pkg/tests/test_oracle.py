import numpy as np
import pytest

from linkforge.decode import decode
from linkforge.model import make_instance, validate
from linkforge.oracle import OracleLimitError, permutation_oracle, placement_oracle

from conftest import contended


def test_single_task():
    inst = make_instance(1000, [dict(sat=0, ant=0, gnd=0, evt=0, lvt=50, d=5, p=2.0)])
    res = permutation_oracle(inst)
    assert res.enumerated == 1
    assert res.best_profit == 100.0


def test_disjoint_tasks_order_irrelevant():
    inst = make_instance(3000, [
        dict(sat=0, ant=0, gnd=0, evt=0, lvt=100, d=10, p=1.0),
        dict(sat=1, ant=0, gnd=1, evt=500, lvt=700, d=10, p=2.0),
        dict(sat=2, ant=1, gnd=2, evt=1000, lvt=1050, d=10, p=3.0),
    ], n_satellites=3, n_ground=3)
    res = permutation_oracle(inst)
    assert res.enumerated == 6
    assert res.best_profit == 100 + 400 + 150
    rng = np.random.default_rng(0)
    for _ in range(6):
        assert decode(rng.permutation(3), inst).profit == res.best_profit


def test_oracle_dominates_random_orders():
    inst = contended(5, 3, horizon=500, pass_range=(40, 150))
    res = permutation_oracle(inst)
    assert res.enumerated == 120
    assert validate(res.best_schedule, inst) == []
    rng = np.random.default_rng(1)
    for _ in range(50):
        assert decode(rng.permutation(inst.task_ids), inst).profit <= res.best_profit


def test_limits():
    inst = contended(9, 0)
    with pytest.raises(OracleLimitError):
        permutation_oracle(inst)
    with pytest.raises(OracleLimitError):
        placement_oracle(inst)


@pytest.mark.parametrize("seed", range(6))
def test_placement_dominates_permutation(seed):
    # windows stay short: the placement search grows with the fourth power of their length
    inst = contended(3, seed, horizon=80, pass_range=(19, 30), fs_pair_rate=0.5,
                     duration_mean=10, duration_std=6, min_overlap=4)
    perm = permutation_oracle(inst)
    place = placement_oracle(inst)
    assert validate(place.best_schedule, inst) == []
    assert place.best_profit >= perm.best_profit - 1e-9


def test_feed_switch_strictly_helps(fs_instance):
    with_fs = permutation_oracle(fs_instance)
    without = permutation_oracle(fs_instance, feed_switch=False)
    assert with_fs.best_profit == 200.0
    assert without.best_profit == 110.0
    assert placement_oracle(fs_instance).best_profit == 200.0
    assert placement_oracle(fs_instance, feed_switch=False).best_profit == 110.0


def test_relabelling_invariance():
    inst = contended(5, 8, horizon=500, pass_range=(40, 150))
    rows = []
    for t in inst.tasks:
        w = inst.window(t.window)
        sat = inst.sat_antenna(w.sat_antenna)
        rows.append(dict(sat=sat.satellite_id, ant=w.sat_antenna % 2, gnd=w.ground_antenna,
                         evt=w.evt, lvt=w.lvt, d=t.min_duration, p=t.profit_rate))
    base = make_instance(inst.horizon, rows, n_ground=2)
    relabelled = make_instance(inst.horizon, [dict(r, id=100 - k) for k, r in enumerate(rows)],
                               n_ground=2)
    assert permutation_oracle(base).best_profit == permutation_oracle(inst).best_profit
    assert permutation_oracle(relabelled).best_profit == permutation_oracle(base).best_profit

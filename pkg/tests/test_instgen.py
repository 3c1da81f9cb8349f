import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linkforge.instgen import (
    ConfigError,
    GenParams,
    InstanceFormatError,
    UnsupportedVersionError,
    dumps,
    generate,
    instance_to_dict,
    load,
    loads,
)

GOLDEN = Path(__file__).parent / "data" / "golden_instance.json"
GOLDEN_PARAMS = GenParams(6, horizon=3600, n_satellites=2, n_stations=2, seed=2024)


def check_invariants(inst, params):
    assert len(inst) == params.task_count
    assert len({t.id for t in inst.tasks}) == len(inst.tasks)
    lo, hi = params.pass_length_range
    for t in inst.tasks:
        w = inst.window(t.window)
        assert 0 <= w.evt < w.lvt <= params.horizon
        assert lo <= w.length <= hi
        assert 1 <= t.min_duration <= w.length
        assert t.profit_rate > 0
        assert inst.sat_antenna(w.sat_antenna).satellite_id < params.n_satellites
        assert 0 <= w.ground_antenna < params.n_stations * params.antennas_per_station


def test_hundred_tasks_seed_42():
    p = GenParams(100, seed=42)
    check_invariants(generate(p), p)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 300), seed=st.integers(0, 2**32 - 1),
       sats=st.integers(1, 10), stations=st.integers(1, 4))
def test_generated_invariants(n, seed, sats, stations):
    p = GenParams(n, n_satellites=sats, n_stations=stations, seed=seed)
    check_invariants(generate(p), p)


def test_deterministic_bytes():
    p = GenParams(200, seed=9)
    assert dumps(generate(p)) == dumps(generate(p))
    assert dumps(generate(p)) != dumps(generate(GenParams(200, seed=10)))


def test_profit_rate_moments():
    inst = generate(GenParams(100_000, seed=1))
    rates = np.array([t.profit_rate for t in inst.tasks])
    assert abs(rates.mean() - 15) < 0.1
    assert abs(rates.std() - 8) < 0.1
    assert rates.min() >= 15 - 8 * math.sqrt(3)
    assert rates.max() <= 15 + 8 * math.sqrt(3)


def test_feed_switch_pairs_present():
    for seed in range(10):
        inst = generate(GenParams(100, seed=seed))
        assert len(list(inst.feed_switch_pairs())) >= 1


def test_round_trip():
    inst = generate(GenParams(150, seed=3))
    again = loads(dumps(inst))
    assert again == inst
    assert dumps(again) == dumps(inst)


def test_golden_file():
    text = GOLDEN.read_text()
    assert dumps(generate(GOLDEN_PARAMS)) == text
    assert load(GOLDEN) == generate(GOLDEN_PARAMS)


def test_rejects_inverted_window():
    doc = instance_to_dict(generate(GOLDEN_PARAMS))
    doc["windows"][2]["lvt"] = doc["windows"][2]["evt"] - 1
    with pytest.raises(InstanceFormatError, match=r"windows\[2\]"):
        loads(json.dumps(doc))


def test_truncated_file_reports_position():
    text = GOLDEN.read_text()
    with pytest.raises(InstanceFormatError, match=r"line \d+ column \d+"):
        loads(text[: len(text) // 2])


def test_wrong_field_type():
    doc = instance_to_dict(generate(GOLDEN_PARAMS))
    doc["tasks"][3]["min_duration"] = "ten"
    with pytest.raises(InstanceFormatError, match=r"tasks\[3\]\.min_duration: expected int"):
        loads(json.dumps(doc))


def test_unknown_version():
    doc = instance_to_dict(generate(GOLDEN_PARAMS))
    doc["version"] = 99
    with pytest.raises(UnsupportedVersionError):
        loads(json.dumps(doc))


@pytest.mark.parametrize("bad", [
    dict(task_count=0),
    dict(task_count=5, pass_length_range=(900, 300)),
    dict(task_count=5, profit_std=20.0),
    dict(task_count=5, fs_pair_rate=1.5),
    dict(task_count=5, horizon=100),
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        generate(GenParams(**bad))

import numpy as np
import pytest

from linkforge.instgen import GenParams, generate
from linkforge.model import make_instance


def contended(task_count, seed, horizon=1200, pass_range=(60, 200), **kw):
    """Few resources, short horizon: windows collide often."""
    base = dict(n_satellites=1, n_stations=1, antennas_per_station=2,
                pass_length_range=pass_range, horizon=horizon, seed=seed)
    base.update(kw)
    return generate(GenParams(task_count, **base))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fs_instance():
    """Two tasks that fit together only as a feed-switch chain.

    Regular mode would need the attitude gap (10 s) between them, leaving the
    second task 94 s where it needs 95 s; chaining at t=100 uses the 10 s
    window overlap (>= 8 s) instead.
    """
    return make_instance(300, [
        dict(sat=0, ant=0, gnd=0, evt=0, lvt=100, d=96, p=1.0),
        dict(sat=0, ant=1, gnd=1, evt=90, lvt=200, d=95, p=1.0),
    ])


# one (criterion, title, passed, detail) row per acceptance check, printed at the end
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {k}. {title}: {detail}")

import time

import numpy as np
import pytest

import sirswitch as sw
from sirswitch.presets import p1, p2, p3, p4, p5


@pytest.fixture(scope="session")
def params_p1():
    return p1()


@pytest.fixture(scope="session")
def params_p2():
    return p2()


@pytest.fixture(scope="session")
def params_p3():
    return p3()


@pytest.fixture(scope="session")
def params_p4():
    return p4()


@pytest.fixture(scope="session")
def params_p5():
    return p5()


@pytest.fixture(scope="session")
def start():
    return sw.Point(80.0, 10.0)


# the depth-6 default cloud is the single most expensive object in the suite;
# build it once and share between the limit-set invariants and acceptance
@pytest.fixture(scope="session")
def build_timings():
    return {}


@pytest.fixture(scope="session")
def p1_cloud6(params_p1, build_timings):
    t0 = time.monotonic()
    cloud = sw.attractor_cloud(params_p1, depth=6, times_per_level=24, t_max=50.0)
    build_timings["p1_cloud6"] = time.monotonic() - t0
    return cloud


@pytest.fixture(scope="session")
def p1_ensemble_2000(params_p1, start):
    return [
        sw.simulate(params_p1, start, sw.EnvState.PLUS, 2000.0, seed=s) for s in range(20)
    ]


@pytest.fixture(scope="session")
def p1_runs_1e4(params_p1, start):
    return [
        sw.simulate(params_p1, start, sw.EnvState.PLUS, 1e4, seed=s) for s in range(20)
    ]


@pytest.fixture(scope="session")
def p2_runs_1e4(params_p2, start):
    return [
        sw.simulate(params_p2, start, sw.EnvState.PLUS, 1e4, seed=s) for s in range(20)
    ]


def tail_mask(traj, window):
    t = traj.sample_times
    return t >= t[-1] - window


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)

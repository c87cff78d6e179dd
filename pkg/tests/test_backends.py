"""Bitwise agreement between the numba and pure Python kernel backends.

The kernels use only +,-,*,/ (no fastmath), so IEEE semantics pin every
intermediate; stay_sweep calls exp and is compared on its verdict only.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from sirswitch import active_backend, get_kernels

py = get_kernels("python")
try:
    nb = get_kernels("numba")
except ImportError:  # pragma: no cover
    nb = None

needs_numba = pytest.mark.skipif(nb is None, reason="numba unavailable")

P1_PLUS = (0.04, 1.0, 0.5, 100.0)


def test_active_backend_known():
    assert active_backend() in ("numba", "python")


def test_get_kernels_unknown():
    with pytest.raises(ValueError):
        get_kernels("fortran")


def test_env_var_selects_python_backend():
    env = dict(os.environ, SIRSWITCH_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "import sirswitch; print(sirswitch.active_backend())"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_env_var_rejects_unknown_backend():
    env = dict(os.environ, SIRSWITCH_BACKEND="cuda")
    out = subprocess.run(
        [sys.executable, "-c", "import sirswitch"],
        env=env,
        capture_output=True,
        text=True,
    )
    assert out.returncode != 0
    assert "SIRSWITCH_BACKEND" in out.stderr


@needs_numba
def test_rk4_span_bitwise():
    a, b, c, N = P1_PLUS
    for dur in (0.37, 5.0, 50.0):
        rp = py.rk4_span(a, b, c, N, 80.0, 10.0, dur, 1e-3, 1e-7)
        rn = nb.rk4_span(a, b, c, N, 80.0, 10.0, dur, 1e-3, 1e-7)
        assert rp == rn


@needs_numba
def test_integrate_schedule_bitwise():
    a, b, c, N = P1_PLUS
    times = np.array([0.0, 0.1, 0.25, 1.0, 2.5, 7.0])
    seg_env = np.array([0, 1, 0, 0, 1], dtype=np.int8)
    args = (a, b, c, 0.02, 1.0, 0.5, N, 80.0, 10.0, times, seg_env, 1e-3, 1e-7)
    outs = []
    for kern in (py, nb):
        out_s = np.empty(times.size)
        out_i = np.empty(times.size)
        status = kern.integrate_schedule(*args, out_s, out_i)
        assert status == -1
        outs.append((out_s, out_i))
    assert np.array_equal(outs[0][0], outs[1][0])
    assert np.array_equal(outs[0][1], outs[1][1])


@needs_numba
def test_flow_marks_bitwise():
    a, b, c, N = P1_PLUS
    marks = np.array([0.5, 1.5, 4.0, 12.0])
    outs = []
    for kern in (py, nb):
        out = np.empty((marks.size, 2))
        status = kern.flow_marks(a, b, c, N, 80.0, 10.0, marks, 1e-3, 1e-7, out)
        assert status == -1
        outs.append(out)
    assert np.array_equal(outs[0], outs[1])


@needs_numba
def test_expand_cloud_bitwise():
    a, b, c, N = P1_PLUS
    rng = np.random.default_rng(7)
    parents = np.stack(
        (10.0 + 60.0 * rng.random(40), 1.0 + 20.0 * rng.random(40)), axis=1
    )
    marks = np.array([0.01, 0.3, 2.0, 9.0, 50.0])
    outs = []
    for kern in (py, nb):
        out = np.empty((parents.shape[0], marks.size, 2))
        status = kern.expand_cloud(a, b, c, N, parents, marks, 1e-3, 1e-7, out)
        assert status == -1
        outs.append(out)
    assert np.array_equal(outs[0], outs[1])


@needs_numba
def test_expand_cloud_matches_flow_marks():
    # the batched kernel must reproduce the one-parent kernel exactly
    a, b, c, N = P1_PLUS
    rng = np.random.default_rng(11)
    parents = np.stack(
        (10.0 + 60.0 * rng.random(8), 1.0 + 20.0 * rng.random(8)), axis=1
    )
    marks = np.array([0.01, 0.3, 2.0, 9.0, 50.0])
    out = np.empty((parents.shape[0], marks.size, 2))
    assert py.expand_cloud(a, b, c, N, parents, marks, 1e-3, 1e-7, out) == -1
    for r in range(parents.shape[0]):
        single = np.empty((marks.size, 2))
        status = py.flow_marks(
            a, b, c, N, parents[r, 0], parents[r, 1], marks, 1e-3, 1e-7, single
        )
        assert status == -1
        assert np.array_equal(out[r], single)


@needs_numba
def test_stay_sweep_verdict_agreement(params_p1):
    from sirswitch import region_g, sample_region
    from sirswitch.dynamics import DOMAIN_TOL

    g = region_g(params_p1)
    md = g.metadata
    starts = sample_region(g, 50, seed=5)
    args = (
        params_p1.plus.a, params_p1.plus.b, params_p1.plus.c, params_p1.N,
        starts, 20.0, 1e-3, DOMAIN_TOL * params_p1.N,
        md["s_min"], md["epsilon0"], md["k"], md["knee_s"], md["i_min"], md["i_cap"],
        1e-6 * params_p1.N,
    )
    assert py.stay_sweep(*args) == nb.stay_sweep(*args)


@needs_numba
def test_simulation_identical_across_backends(params_p1, start, monkeypatch):
    # end-to-end: a full switched trajectory is bitwise identical
    import sirswitch._backend as backend_mod
    import sirswitch.switched as switched_mod
    from sirswitch import EnvState, simulate

    results = []
    for name in ("python", "numba"):
        monkeypatch.setattr(backend_mod, "kernels", get_kernels(name))
        monkeypatch.setattr(switched_mod, "kernels", get_kernels(name))
        traj = simulate(params_p1, start, EnvState.PLUS, 50.0, seed=13)
        results.append(traj.points)
    assert np.array_equal(results[0], results[1])

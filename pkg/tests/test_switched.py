import numpy as np
import pytest

from sirswitch import (
    EnvState,
    InvalidParameterError,
    Point,
    flow,
    reconstruct_removed,
    sample_path,
    simulate,
    simulate_time_average,
    stationary_probabilities,
    switch_samples,
    time_average,
)


def test_simulate_matches_flow_between_switches(params_p1, start):
    # up to the first jump the trajectory is the deterministic plus-flow;
    # compare against flow() truncated to the same sub-horizon
    path = sample_path(params_p1.rates, EnvState.PLUS, 10.0, seed=0)
    t1 = float(path.jump_times[0])
    horizon = 0.5 * t1
    traj = simulate(params_p1, start, EnvState.PLUS, horizon, seed=0)
    assert traj.switch_indices.size == 0
    end = flow(params_p1.plus, params_p1.N, start, horizon)
    assert traj.points[-1, 0] == end.s
    assert traj.points[-1, 1] == end.i


def test_sample_grid_and_jumps(params_p1, start):
    traj = simulate(params_p1, start, EnvState.PLUS, 50.0, seed=3)
    t = traj.sample_times
    assert t[0] == 0.0 and t[-1] == 50.0
    assert np.all(np.diff(t) > 0)
    # every multiple of the sample interval below the horizon is present
    grid = np.arange(0, 501) * 0.1
    assert np.all(np.isin(np.round(grid, 10), np.round(t, 10)))
    # every jump inside the horizon is a sample
    path = sample_path(params_p1.rates, EnvState.PLUS, 50.0, seed=3)
    taus = path.jump_times[path.jump_times < 50.0]
    assert np.all(np.isin(taus, t))
    assert np.array_equal(t[traj.switch_indices], taus)


def test_states_are_cadlag(params_p1, start):
    traj = simulate(params_p1, start, EnvState.PLUS, 50.0, seed=3)
    states = traj.states
    sw = traj.switch_indices
    assert states[0] == int(EnvState.PLUS)
    # the state recorded at a jump is the post-jump environment
    for k, idx in enumerate(sw):
        assert states[idx] == (int(EnvState.PLUS) + k + 1) % 2
        assert states[idx - 1] == (int(EnvState.PLUS) + k) % 2
    # constant between consecutive jumps
    bounds = np.concatenate(([0], sw, [states.size]))
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        assert np.all(states[lo:hi] == states[lo])


def test_trajectory_stays_in_triangle(params_p1, start):
    traj = simulate(params_p1, start, EnvState.PLUS, 200.0, seed=7)
    N = params_p1.N
    assert np.all(traj.S >= 0.0) and np.all(traj.I >= 0.0)
    assert np.all(traj.S + traj.I <= N + 1e-9 * N)
    r = reconstruct_removed(traj)
    assert np.all(r >= -1e-9 * N)
    assert np.allclose(traj.S + traj.I + r, N, atol=1e-9 * N)


def test_simulate_deterministic(params_p1, start):
    a = simulate(params_p1, start, EnvState.PLUS, 20.0, seed=11)
    b = simulate(params_p1, start, EnvState.PLUS, 20.0, seed=11)
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.sample_times, b.sample_times)
    c = simulate(params_p1, start, EnvState.PLUS, 20.0, seed=11, replica=1)
    assert not np.array_equal(a.points, c.points)


def test_time_average_constant_is_one(params_p1, start):
    traj = simulate(params_p1, start, EnvState.PLUS, 20.0, seed=11)
    assert time_average(traj, lambda pt, env: 1.0) == pytest.approx(1.0, abs=1e-14)


def test_time_average_env_indicator(params_p1, start):
    # plus-state indicator settles at the stationary probability; the
    # trapezoid rule smears each jump, so agreement with the exact
    # occupation fraction is O(sample_interval), not machine precision
    traj = simulate(params_p1, start, EnvState.PLUS, 1.0e4, seed=5)
    frac = time_average(traj, lambda pt, env: 1.0 if env is EnvState.PLUS else 0.0)
    p = stationary_probabilities(params_p1.rates)[0]
    assert abs(frac - p) < 0.02
    path = sample_path(params_p1.rates, EnvState.PLUS, 1.0e4, seed=5)
    from sirswitch import occupation_fraction

    plus_frac = occupation_fraction(path, EnvState.PLUS)
    assert abs(frac - plus_frac) < 0.01


def test_streaming_average_matches_in_memory(params_p1, start):
    traj = simulate(params_p1, start, EnvState.PLUS, 50.0, seed=9)
    obs = lambda pt, env: pt.i
    direct = time_average(traj, obs)
    streamed = simulate_time_average(
        params_p1, start, EnvState.PLUS, 50.0, obs, seed=9, window_samples=64
    )
    assert abs(direct - streamed) < 1e-10 * max(1.0, abs(direct))


def test_switch_samples_split():
    from sirswitch import ModelParams, EnvParams, SwitchRates

    params = ModelParams(
        plus=EnvParams(0.04, 1.0, 0.5),
        minus=EnvParams(0.02, 1.0, 0.5),
        N=100.0,
        rates=SwitchRates(1.0, 1.0),
    )
    # pick a seed/horizon with at least 3 jumps
    horizon = 10.0
    path = sample_path(params.rates, EnvState.PLUS, horizon, seed=0)
    n_jumps = int(np.sum(path.jump_times < horizon))
    assert n_jumps >= 3
    traj = simulate(params, Point(80.0, 10.0), EnvState.PLUS, horizon, seed=0)
    ss = switch_samples(traj)
    assert ss.odd_switch_points.shape[0] == (n_jumps + 1) // 2
    assert ss.even_switch_points.shape[0] == n_jumps // 2
    all_pts = traj.points[traj.switch_indices]
    assert np.array_equal(ss.odd_switch_points, all_pts[0::2])
    assert np.array_equal(ss.even_switch_points, all_pts[1::2])


def test_simulate_rejects_bad_inputs(params_p1, start):
    with pytest.raises(InvalidParameterError):
        simulate(params_p1, Point(0.0, 10.0), EnvState.PLUS, 10.0)
    with pytest.raises(InvalidParameterError):
        simulate(params_p1, Point(60.0, 40.0), EnvState.PLUS, 10.0)
    with pytest.raises(InvalidParameterError):
        simulate(params_p1, start, EnvState.PLUS, 10.0, sample_interval=0.0)
    with pytest.raises(InvalidParameterError):
        simulate(params_p1, start, EnvState.PLUS, 10.0, step=-1.0)
    with pytest.raises(InvalidParameterError):
        simulate(params_p1, start, EnvState.PLUS, -5.0)


def test_sample_cap_guard(params_p1, start):
    with pytest.raises(InvalidParameterError):
        simulate(params_p1, start, EnvState.PLUS, 1e6, sample_interval=1e-2)

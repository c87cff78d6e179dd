"""The switched SIRS process: deterministic flows glued at telegraph jump times."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._backend import kernels
from .dynamics import DOMAIN_TOL, DEFAULT_STEP, ModelParams, Point
from .errors import InvalidParameterError, NumericalInstabilityError
from .telegraph import EnvState, SwitchPath, sample_path

DEFAULT_SAMPLE_INTERVAL = 0.1
MAX_SAMPLES = 10_000_000


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-stamped samples of (env, S, I) along one realization.

    Samples sit on the uniform grid plus every jump time; `states` holds the
    EnvState value per sample, cadlag (a sample at a jump carries the new
    environment). The state is constant between consecutive switch indices.
    """

    sample_times: np.ndarray
    states: np.ndarray
    points: np.ndarray
    switch_indices: np.ndarray
    params: ModelParams
    seed: int
    replica: int
    step: float
    sample_interval: float
    initial_env: EnvState
    horizon: float

    @property
    def S(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def I(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def n_samples(self) -> int:
        return int(self.sample_times.size)

    def point_at(self, index: int) -> Point:
        return Point(float(self.points[index, 0]), float(self.points[index, 1]))


@dataclass(frozen=True, eq=False)
class SwitchSamples:
    """The embedded chain at jump times, split by parity of the jump index (from 1)."""

    odd_switch_points: np.ndarray
    even_switch_points: np.ndarray


def _event_schedule(
    horizon: float, sample_interval: float, switch_times: np.ndarray
) -> np.ndarray:
    """Sorted unique times: uniform grid, jumps before the horizon, 0 and horizon."""
    n_grid = int(np.floor(horizon / sample_interval + 1e-9))
    grid = np.arange(n_grid + 1, dtype=np.float64) * sample_interval
    grid = grid[grid <= horizon]
    taus = switch_times[switch_times < horizon]
    times = np.unique(np.concatenate((grid, taus, np.array([horizon]))))
    # a grid point a hair under the horizon would create a useless sliver segment
    if times.size >= 2 and times[-1] - times[-2] < 1e-9 * sample_interval:
        times = np.delete(times, times.size - 2)
    return times


def _integrate(
    params: ModelParams,
    start: Point,
    times: np.ndarray,
    seg_env: np.ndarray,
    step: float,
) -> np.ndarray:
    out_s = np.empty(times.size)
    out_i = np.empty(times.size)
    status = kernels.integrate_schedule(
        params.plus.a, params.plus.b, params.plus.c,
        params.minus.a, params.minus.b, params.minus.c,
        params.N, float(start[0]), float(start[1]),
        times, seg_env, float(step), DOMAIN_TOL * params.N, out_s, out_i,
    )
    if status >= 0:
        raise NumericalInstabilityError(
            f"trajectory left the triangle beyond tolerance in the segment starting "
            f"at t={times[status]:.6g}; reduce step={step}"
        )
    return np.stack((out_s, out_i), axis=1)


def _check_start(start: Point, N: float) -> Point:
    s, i = float(start[0]), float(start[1])
    if not (s > 0.0 and i > 0.0 and s + i < N):
        raise InvalidParameterError(
            f"start {(s, i)} must lie strictly inside the triangle (s>0, i>0, s+i<N)"
        )
    return Point(s, i)


def simulate(
    params: ModelParams,
    start: Point,
    initial_env: EnvState,
    horizon: float,
    step: float = DEFAULT_STEP,
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL,
    seed: int = 0,
    replica: int = 0,
) -> Trajectory:
    """Simulate the switched system, sampling on the grid and at every jump.

    The integrator is truncated at each jump time so switches are hit exactly;
    the terminal point of one environment's flow seeds the next.
    """
    start = _check_start(start, params.N)
    if sample_interval <= 0.0 or not np.isfinite(sample_interval):
        raise InvalidParameterError(f"sample_interval must be > 0, got {sample_interval}")
    if step <= 0.0 or not np.isfinite(step):
        raise InvalidParameterError(f"step must be > 0, got {step}")
    initial_env = EnvState(initial_env)
    path = sample_path(params.rates, initial_env, horizon, seed, replica)
    taus = path.jump_times[path.jump_times < horizon]
    times = _event_schedule(horizon, sample_interval, path.jump_times)
    if times.size > MAX_SAMPLES:
        raise InvalidParameterError(
            f"trajectory would hold {times.size} samples (cap {MAX_SAMPLES}); "
            "increase sample_interval or use simulate_time_average"
        )
    jumps_before = np.searchsorted(taus, times, side="right")
    states = ((int(initial_env) + jumps_before) % 2).astype(np.int8)
    points = _integrate(params, start, times, states[:-1], step)
    switch_indices = np.searchsorted(times, taus)
    return Trajectory(
        sample_times=times,
        states=states,
        points=points,
        switch_indices=switch_indices,
        params=params,
        seed=int(seed),
        replica=int(replica),
        step=float(step),
        sample_interval=float(sample_interval),
        initial_env=initial_env,
        horizon=float(horizon),
    )


def time_average(traj: Trajectory, observable: Callable[[Point, EnvState], float]) -> float:
    """Trapezoidal time-average of observable(point, env) over the whole trajectory."""
    n = traj.n_samples
    if n < 2:
        raise InvalidParameterError("time_average needs at least 2 samples")
    pts = traj.points
    sts = traj.states
    vals = np.fromiter(
        (observable(Point(pts[k, 0], pts[k, 1]), EnvState(int(sts[k]))) for k in range(n)),
        dtype=np.float64,
        count=n,
    )
    t = traj.sample_times
    return float(np.trapezoid(vals, t) / (t[-1] - t[0]))


def simulate_time_average(
    params: ModelParams,
    start: Point,
    initial_env: EnvState,
    horizon: float,
    observable: Callable[[Point, EnvState], float],
    step: float = DEFAULT_STEP,
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL,
    seed: int = 0,
    replica: int = 0,
    window_samples: int = 1 << 20,
) -> float:
    """Streaming simulate + time_average without storing the trajectory.

    Integrates the same event schedule as simulate() window by window (window
    edges on the uniform grid), so on overlapping horizons the two code paths
    agree to round-off.
    """
    start = _check_start(start, params.N)
    if sample_interval <= 0.0 or not np.isfinite(sample_interval):
        raise InvalidParameterError(f"sample_interval must be > 0, got {sample_interval}")
    initial_env = EnvState(initial_env)
    path = sample_path(params.rates, initial_env, horizon, seed, replica)
    taus = path.jump_times[path.jump_times < horizon]
    n_grid = int(np.floor(horizon / sample_interval + 1e-9))
    e0 = int(initial_env)

    total = 0.0
    s, i = float(start[0]), float(start[1])
    k_lo = 0
    while True:
        k_hi = min(k_lo + window_samples, n_grid)
        t_lo = k_lo * sample_interval
        grid = np.arange(k_lo, k_hi + 1, dtype=np.float64) * sample_interval
        grid = grid[grid <= horizon]
        last = k_hi >= n_grid
        t_hi = horizon if last else grid[-1]
        in_win = taus[(taus > t_lo) & (taus < t_hi)]
        times = np.unique(np.concatenate((grid, in_win, np.array([t_hi]))))
        if last and times.size >= 2 and times[-1] - times[-2] < 1e-9 * sample_interval:
            times = np.delete(times, times.size - 2)
        jumps_before = np.searchsorted(taus, times, side="right")
        states = ((e0 + jumps_before) % 2).astype(np.int8)
        pts = _integrate(params, Point(s, i), times, states[:-1], step)
        vals = np.fromiter(
            (
                observable(Point(pts[k, 0], pts[k, 1]), EnvState(int(states[k])))
                for k in range(times.size)
            ),
            dtype=np.float64,
            count=times.size,
        )
        total += float(np.trapezoid(vals, times))
        s, i = float(pts[-1, 0]), float(pts[-1, 1])
        if last:
            break
        k_lo = k_hi
    return total / horizon


def switch_samples(traj: Trajectory) -> SwitchSamples:
    """Points of the embedded chain at jump times tau_1, tau_2, ..., split by parity."""
    pts = traj.points[traj.switch_indices]
    return SwitchSamples(odd_switch_points=pts[0::2], even_switch_points=pts[1::2])


def reconstruct_removed(traj: Trajectory) -> np.ndarray:
    """R(t) = N - S(t) - I(t) per sample."""
    return traj.params.N - traj.points[:, 0] - traj.points[:, 1]

"""Occupation-measure histograms and total-variation diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ModelParams, Point
from .errors import InvalidParameterError, NotApplicableError
from .switched import Trajectory, simulate
from .telegraph import EnvState
from .threshold import is_proportional, persistence_threshold

DEFAULT_BINS = 50


@dataclass(frozen=True, eq=False)
class Histogram:
    """Time-weighted occupation measure on a bins_s x bins_i grid per environment.

    mass has shape (2, bins_s, bins_i), indexed by EnvState value first, and
    sums to one over everything.
    """

    edges_s: np.ndarray
    edges_i: np.ndarray
    mass: np.ndarray
    total_time: float

    @property
    def bins_s(self) -> int:
        return int(self.edges_s.size - 1)

    @property
    def bins_i(self) -> int:
        return int(self.edges_i.size - 1)

    def env_marginal(self) -> tuple[float, float]:
        return float(self.mass[0].sum()), float(self.mass[1].sum())


def _same_grid(h1: Histogram, h2: Histogram) -> bool:
    return np.array_equal(h1.edges_s, h2.edges_s) and np.array_equal(h1.edges_i, h2.edges_i)


def _bin_window(
    traj: Trajectory,
    t_lo: float,
    t_hi: float,
    bins_s: int,
    bins_i: int,
    binning: str,
) -> Histogram:
    if bins_s < 1 or bins_i < 1:
        raise InvalidParameterError("bin counts must be >= 1")
    t = traj.sample_times
    j0 = int(np.searchsorted(t, t_lo, side="left"))
    j1 = int(np.searchsorted(t, t_hi, side="right")) - 1
    if j1 - j0 < 1:
        raise InvalidParameterError(
            f"window [{t_lo}, {t_hi}] holds fewer than two samples; nothing to weight"
        )
    durations = np.diff(t[j0 : j1 + 1])
    if binning == "left":
        anchors = traj.points[j0:j1]
    elif binning == "midpoint":
        anchors = 0.5 * (traj.points[j0:j1] + traj.points[j0 + 1 : j1 + 1])
    else:
        raise InvalidParameterError(f"binning must be 'left' or 'midpoint', got {binning!r}")
    envs = traj.states[j0:j1].astype(np.int64)
    N = traj.params.N
    ks = np.clip((anchors[:, 0] / N * bins_s).astype(np.int64), 0, bins_s - 1)
    ki = np.clip((anchors[:, 1] / N * bins_i).astype(np.int64), 0, bins_i - 1)
    mass = np.zeros((2, bins_s, bins_i))
    np.add.at(mass, (envs, ks, ki), durations)
    total = float(t[j1] - t[j0])
    mass /= total
    return Histogram(
        edges_s=np.linspace(0.0, N, bins_s + 1),
        edges_i=np.linspace(0.0, N, bins_i + 1),
        mass=mass,
        total_time=total,
    )


def default_burn_in(traj_or_params, horizon: float) -> float:
    """10% of the horizon, but at least 100 mean holding times."""
    params = traj_or_params.params if isinstance(traj_or_params, Trajectory) else traj_or_params
    return max(0.1 * horizon, 100.0 * params.rates.mean_holding_time())


def occupation_histogram(
    traj: Trajectory,
    burn_in: float | None = None,
    bins_s: int = DEFAULT_BINS,
    bins_i: int = DEFAULT_BINS,
    binning: str = "left",
) -> Histogram:
    """Histogram of post-burn-in segment durations, binned at segment left endpoints."""
    if burn_in is None:
        burn_in = default_burn_in(traj, traj.horizon)
    if burn_in < 0.0:
        raise InvalidParameterError(f"burn_in must be >= 0, got {burn_in}")
    if traj.horizon <= burn_in:
        raise InvalidParameterError(
            f"horizon {traj.horizon} must exceed burn_in {burn_in}"
        )
    return _bin_window(traj, burn_in, traj.horizon, bins_s, bins_i, binning)


def total_variation(h1: Histogram, h2: Histogram) -> float:
    """Half the L1 distance between the two mass vectors; requires identical grids."""
    if not _same_grid(h1, h2):
        raise InvalidParameterError("total variation needs histograms on identical grids")
    return float(0.5 * np.abs(h1.mass - h2.mass).sum())


def boundary_mass(h: Histogram, margin: float) -> float:
    """Mass in bins touching the strips {s < margin} or {i < margin}."""
    s_strip = h.edges_s[:-1] < margin
    i_strip = h.edges_i[:-1] < margin
    inner = h.mass[:, ~s_strip, :]
    return float(h.mass[:, s_strip, :].sum() + inner[:, :, i_strip].sum())


def merge_histograms(histograms: list[Histogram]) -> Histogram:
    """Time-weighted merge; bin-wise addition with one final normalization."""
    if not histograms:
        raise InvalidParameterError("nothing to merge")
    first = histograms[0]
    raw = np.zeros_like(first.mass)
    total = 0.0
    for h in histograms:
        if not _same_grid(first, h):
            raise InvalidParameterError("merge needs histograms on identical grids")
        raw += h.mass * h.total_time
        total += h.total_time
    return Histogram(
        edges_s=first.edges_s.copy(),
        edges_i=first.edges_i.copy(),
        mass=raw / total,
        total_time=total,
    )


@dataclass(frozen=True, eq=False)
class DiagnosticTable:
    """Pairwise TV distances between per-start histograms at each checkpoint."""

    checkpoints: np.ndarray
    pairs: list[tuple[int, int]]
    tv: np.ndarray  # shape (len(pairs), len(checkpoints))
    monotone_trend: bool


def convergence_diagnostic(
    params: ModelParams,
    starts: list[Point],
    horizon: float,
    checkpoints: list[float],
    seed_base: int,
    bins_s: int = 30,
    bins_i: int = 30,
    initial_env: EnvState = EnvState.PLUS,
    step: float = 1e-3,
    sample_interval: float = 0.1,
) -> DiagnosticTable:
    """TV distances between occupation histograms started from different points.

    All starts share one switching realization (seed_base), so identical
    starts give exactly zero TV and different starts expose the coupling that
    the stationary limit forgets the initial condition.
    """
    lam = persistence_threshold(params)
    if lam <= 0.0:
        raise NotApplicableError(
            f"convergence diagnostic needs a positive threshold, got {lam}"
        )
    if is_proportional(params):
        raise NotApplicableError(
            "proportional parameters collapse to a common equilibrium; "
            "the stationary law is a point mass there"
        )
    if len(starts) < 2:
        raise InvalidParameterError("need at least two starts to compare")
    cps = np.asarray(sorted(float(c) for c in checkpoints))
    if cps.size == 0 or cps[0] <= 0.0 or cps[-1] > horizon:
        raise InvalidParameterError("checkpoints must be positive and within the horizon")
    for c in cps:
        if default_burn_in(params, c) >= c:
            raise InvalidParameterError(
                f"checkpoint {c} is shorter than its burn-in "
                f"{default_burn_in(params, c)}; push checkpoints later"
            )
    trajs = [
        simulate(params, Point(*st), initial_env, horizon,
                 step=step, sample_interval=sample_interval, seed=seed_base)
        for st in starts
    ]
    pairs = [(i, j) for i in range(len(starts)) for j in range(i + 1, len(starts))]
    tv = np.empty((len(pairs), cps.size))
    for ci, c in enumerate(cps):
        hists = [
            _bin_window(tr, default_burn_in(params, c), c, bins_s, bins_i, "left")
            for tr in trajs
        ]
        for pi, (i, j) in enumerate(pairs):
            tv[pi, ci] = total_variation(hists[i], hists[j])
    monotone = bool(np.all(tv[:, -1] < tv[:, 0])) if cps.size >= 2 else True
    return DiagnosticTable(checkpoints=cps, pairs=pairs, tv=tv, monotone_trend=monotone)


def write_histogram_csv(h: Histogram, path) -> None:
    """Export as `env,s_lo,s_hi,i_lo,i_hi,mass` rows (17 significant digits)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("env,s_lo,s_hi,i_lo,i_hi,mass\n")
        for e in (0, 1):
            sym = EnvState(e).symbol
            for a in range(h.bins_s):
                for b in range(h.bins_i):
                    fh.write(
                        f"{sym},{h.edges_s[a]:.17g},{h.edges_s[a + 1]:.17g},"
                        f"{h.edges_i[b]:.17g},{h.edges_i[b + 1]:.17g},{h.mass[e, a, b]:.17g}\n"
                    )

"""Point-cloud approximation of the omega-limit set and its empirical metrics.

The cloud is the breadth-first set of alternating flow compositions applied
to the plus equilibrium: level 1 flows with the minus system, level 2 with
plus, and so on, each level evaluated on a geometric grid of durations.
Points are deduplicated on a fixed spatial grid, separately per parity of the
applied-flow count during the search (a cell reached with the same parity
again evolves identically) and once more across parities at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.spatial import cKDTree

from ._backend import kernels
from .dynamics import (
    DOMAIN_TOL,
    DEFAULT_STEP,
    ModelParams,
    Point,
    equilibrium,
    has_endemic_equilibrium,
)
from .errors import InvalidParameterError, NotApplicableError, NumericalInstabilityError
from .geometry import Region, sample_region
from .switched import Trajectory
from .threshold import persistence_threshold

DEDUP_CELL = 1e-4  # dedup grid resolution, relative to N
T_MIN = 1e-2  # shortest flow duration in the default geometric grid


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    generation_depth: int
    time_grid: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.points.shape[0])


def _as_points(obj) -> np.ndarray:
    pts = obj.points if isinstance(obj, PointCloud) else np.asarray(obj, dtype=np.float64)
    pts = np.atleast_2d(pts)
    if pts.size == 0:
        raise InvalidParameterError("empty point set")
    if pts.shape[1] != 2:
        raise InvalidParameterError(f"expected (n, 2) points, got shape {pts.shape}")
    return pts


def _cell_keys(pts: np.ndarray, cell: float) -> np.ndarray:
    k = np.floor(pts / cell).astype(np.int64)
    return (k[:, 0] << 32) + k[:, 1]


def attractor_cloud(
    params: ModelParams,
    depth: int = 6,
    times_per_level: int = 24,
    t_max: float = 50.0,
    step: float = DEFAULT_STEP,
    time_grid: np.ndarray | None = None,
    batch_size: int = 20_000,
) -> PointCloud:
    """Breadth-first alternating-flow compositions from the plus equilibrium.

    time_grid overrides the default geometric duration grid (values in
    [1e-2, t_max]); durations of zero are allowed and act as the identity.
    metadata["level_counts"] gives surviving points per level; the first
    sum(level_counts[:d+1]) rows of points form exactly the depth-d cloud.
    """
    lam = persistence_threshold(params)
    if lam <= 0.0:
        raise NotApplicableError(f"attractor cloud needs a positive threshold, got {lam}")
    if not has_endemic_equilibrium(params.plus, params.N):
        raise NotApplicableError("the plus system has no positive equilibrium")
    if depth < 0:
        raise InvalidParameterError(f"depth must be >= 0, got {depth}")
    if time_grid is None:
        if times_per_level < 1:
            raise InvalidParameterError(f"times_per_level must be >= 1, got {times_per_level}")
        if t_max < T_MIN:
            raise InvalidParameterError(f"t_max must be >= {T_MIN}, got {t_max}")
        if times_per_level == 1:
            marks = np.array([t_max])
        else:
            expo = np.arange(times_per_level) / (times_per_level - 1)
            marks = T_MIN * (t_max / T_MIN) ** expo
    else:
        marks = np.unique(np.asarray(time_grid, dtype=np.float64))
        if marks.size == 0 or marks[0] < 0.0:
            raise InvalidParameterError("time_grid must hold nonnegative durations")
    N = params.N
    cell = DEDUP_CELL * N
    tol = DOMAIN_TOL * N
    seed_pt = equilibrium(params.plus, N)

    pool_keys: tuple[set, set] = (set(), set())
    frontier = np.array([[seed_pt.s, seed_pt.i]])
    pool_keys[0].add(int(_cell_keys(frontier, cell)[0]))
    collected = [frontier.copy()]

    for level in range(1, depth + 1):
        env = params.minus if level % 2 == 1 else params.plus
        parity = level % 2
        new_chunks = []
        for lo in range(0, frontier.shape[0], batch_size):
            parents = frontier[lo : lo + batch_size]
            out = np.empty((parents.shape[0], marks.size, 2))
            status = kernels.expand_cloud(
                env.a, env.b, env.c, N, parents, marks, float(step), tol, out
            )
            if status >= 0:
                raise NumericalInstabilityError(
                    f"cloud expansion left the triangle from parent "
                    f"({parents[status, 0]:.6g}, {parents[status, 1]:.6g})"
                )
            children = out.reshape(-1, 2)
            keys = _cell_keys(children, cell)
            uniq, first = np.unique(keys, return_index=True)
            seen = pool_keys[parity]
            fresh = [j for u, j in zip(uniq, first) if int(u) not in seen]
            if fresh:
                seen.update(int(k) for k in keys[fresh])
                new_chunks.append(children[fresh])
        if not new_chunks:
            frontier = np.empty((0, 2))
            break
        frontier = np.concatenate(new_chunks)
        collected.append(frontier)

    merged = np.concatenate(collected)
    # final dedup across parities, first-discovered point wins
    keys = _cell_keys(merged, cell)
    _, order = np.unique(keys, return_index=True)
    kept = np.sort(order)
    points = merged[kept]
    # surviving points per level; points[:sum(level_counts[:d+1])] is exactly
    # the depth-d cloud, since dedup keeps first discoveries
    offsets = np.cumsum([chunk.shape[0] for chunk in collected])
    bounds = np.searchsorted(kept, offsets)
    level_counts = np.diff(np.concatenate(([0], bounds)))
    level_counts = np.concatenate(
        (level_counts, np.zeros(depth + 1 - level_counts.size, dtype=np.int64))
    )
    return PointCloud(
        points=points,
        generation_depth=depth,
        time_grid=marks,
        metadata={
            "seed_point": (seed_pt.s, seed_pt.i),
            "lambda": lam,
            "step": step,
            "level_counts": [int(v) for v in level_counts],
        },
    )


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two point sets in the (s, i) plane."""
    pa = _as_points(a)
    pb = _as_points(b)
    d_ab = cKDTree(pb).query(pa, workers=-1)[0].max()
    d_ba = cKDTree(pa).query(pb, workers=-1)[0].max()
    return float(max(d_ab, d_ba))


def absorption_time(traj: Trajectory, cloud: PointCloud, tube_radius: float) -> float | None:
    """First sample time after which the trajectory never strays from the cloud.

    Returns None when the tail has not been captured by the tube before the
    horizon.
    """
    pts = _as_points(cloud)
    if tube_radius <= 0.0:
        raise InvalidParameterError(f"tube_radius must be > 0, got {tube_radius}")
    dist = cKDTree(pts).query(traj.points, workers=-1)[0]
    outside = np.nonzero(dist > tube_radius)[0]
    if outside.size == 0:
        return float(traj.sample_times[0])
    last_out = int(outside[-1])
    if last_out == traj.n_samples - 1:
        return None
    return float(traj.sample_times[last_out + 1])


def uniform_entry_time(
    params: ModelParams,
    region_j: Region,
    delta2: float,
    probe_count: int = 100,
    step: float = DEFAULT_STEP,
    check_interval: float = 0.05,
    horizon_cap: float = 1e4,
    probe_seed: int = 0,
) -> float:
    """Worst-case time for the plus flow to pull region_j probes into the
    delta2 ball around the plus equilibrium and keep them there.

    Each probe is integrated until its candidate entry time T has been
    followed by max(10*T, 1) units with every checkpoint inside the ball.
    """
    if delta2 <= 0.0:
        raise InvalidParameterError(f"delta2 must be > 0, got {delta2}")
    if not has_endemic_equilibrium(params.plus, params.N):
        raise NotApplicableError("the plus system has no positive equilibrium")
    eq = equilibrium(params.plus, params.N)
    probes = sample_region(region_j, probe_count, probe_seed)
    env = params.plus
    tol = DOMAIN_TOL * params.N
    block = 20.0
    nb = int(round(block / check_interval))
    marks = np.arange(1, nb + 1) * check_interval
    worst = 0.0
    for pidx in range(probes.shape[0]):
        s, i = float(probes[pidx, 0]), float(probes[pidx, 1])
        t0 = 0.0
        # most recent checkpoint outside the ball; the start counts as one
        last_out = 0.0 if np.hypot(s - eq.s, i - eq.i) > delta2 else -np.inf
        out = np.empty((nb, 2))
        while True:
            entry = 0.0 if last_out < 0.0 else last_out + check_interval
            if t0 >= entry + max(10.0 * entry, 1.0):
                worst = max(worst, entry)
                break
            if t0 >= horizon_cap:
                raise NumericalInstabilityError(
                    f"probe ({probes[pidx, 0]:.6g}, {probes[pidx, 1]:.6g}) did not settle "
                    f"into the {delta2} ball within the {horizon_cap} cap"
                )
            status = kernels.flow_marks(env.a, env.b, env.c, params.N, s, i, marks,
                                        float(step), tol, out)
            if status >= 0:
                raise NumericalInstabilityError("entry-time probe left the triangle")
            d = np.hypot(out[:, 0] - eq.s, out[:, 1] - eq.i)
            bad = np.nonzero(d > delta2)[0]
            if bad.size:
                last_out = t0 + float(marks[bad[-1]])
            s, i = float(out[-1, 0]), float(out[-1, 1])
            t0 += block
    return worst


def write_cloud_csv(cloud: PointCloud, path) -> None:
    """Export cloud points as `s,i` rows (17 significant digits)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("s,i\n")
        for s, i in cloud.points:
            fh.write(f"{s:.17g},{i:.17g}\n")

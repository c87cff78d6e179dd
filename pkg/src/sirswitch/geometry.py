"""Invariant regions of the switched SIRS system.

The quadrangle absorbs the triangle's interior; the curve-bounded regions
add the exponential lower boundary that keeps I away from zero. The proofs
only assert existence of the constants (S_min, epsilon0, k, m); here they get
constructive witnesses that are re-verified after the fact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ._backend import kernels
from .dynamics import DOMAIN_TOL, DEFAULT_STEP, ModelParams, Point
from .errors import InvalidParameterError, NotApplicableError, NumericalInstabilityError
from .threshold import persistence_threshold

GRID_RESOLUTION = 200
CURVE_POINTS = 1000
# slack for the empirical invariance sweeps, relative to N
MEMBERSHIP_TOL = 1e-6


class RegionKind(enum.Enum):
    TRIANGLE = "Triangle"
    QUADRANGLE = "Quadrangle"
    CURVE_BOUNDED_G = "CurveBoundedG"
    CURVE_BOUNDED_K = "CurveBoundedK"
    NEIGHBORHOOD = "Neighborhood"


@dataclass(frozen=True, eq=False)
class Region:
    """Closed region in the (s, i) plane with an exact membership test.

    `boundary` is a closed polyline (last vertex repeats the first) used for
    export and plotting; membership uses the defining inequalities directly,
    so the polyline resolution never affects contains().
    """

    kind: RegionKind
    boundary: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    def contains(self, pt: Point, tol: float = 0.0) -> bool:
        s, i = float(pt[0]), float(pt[1])
        md = self.metadata
        if self.kind is RegionKind.TRIANGLE:
            return s >= -tol and i >= -tol and s + i <= md["N"] + tol
        if self.kind is RegionKind.NEIGHBORHOOD:
            cs, ci = md["center"]
            return math.hypot(s - cs, i - ci) <= md["radius"] + tol
        if not (
            s >= md["s_min"] - tol
            and i >= -tol
            and i <= md["i_cap"] + tol
            and s + i <= md["N"] + tol
        ):
            return False
        if self.kind is RegionKind.QUADRANGLE:
            return True
        # curve-bounded: exponential floor left of the knee, flat floor beyond
        if s <= md["knee_s"]:
            floor = md["epsilon0"] * math.exp(-md["k"] * (s - md["s_min"]))
        else:
            floor = md["i_min"]
        return i >= floor - tol

    def bounding_box(self) -> tuple[float, float, float, float]:
        b = self.boundary
        return (
            float(b[:, 0].min()),
            float(b[:, 0].max()),
            float(b[:, 1].min()),
            float(b[:, 1].max()),
        )


def triangle(N: float) -> Region:
    boundary = np.array([(0.0, 0.0), (N, 0.0), (0.0, N), (0.0, 0.0)])
    return Region(RegionKind.TRIANGLE, boundary, {"N": N})


def neighborhood(center: Point, radius: float, n_arc: int = 64) -> Region:
    if radius < 0.0:
        raise InvalidParameterError(f"radius must be >= 0, got {radius}")
    theta = np.linspace(0.0, 2.0 * np.pi, n_arc + 1)
    boundary = np.stack(
        (center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)), axis=1
    )
    return Region(
        RegionKind.NEIGHBORHOOD, boundary,
        {"center": (float(center[0]), float(center[1])), "radius": float(radius)},
    )


def choose_s_min(params: ModelParams) -> tuple[float, float]:
    """Susceptible floor S_min and the positive margin m that certifies it.

    S_min is half the largest value allowed by
        -N*a(+-)*S_min + c(+-)*(b(+)/(2a(+)) - S_min) > m > 0,
    and m is the left-hand side minimum over both environments at that S_min.
    """
    N = params.N
    if params.plus.b / params.plus.a >= N:
        raise NotApplicableError(
            "susceptible floor needs b(+)/a(+) < N; this parameter set has no endemic system"
        )
    half_c = params.plus.b / (2.0 * params.plus.a)
    bounds = [
        (env.c * half_c) / (N * env.a + env.c) for env in (params.plus, params.minus)
    ]
    s_min = 0.5 * min(bounds)
    m = min(
        -N * env.a * s_min + env.c * (half_c - s_min) for env in (params.plus, params.minus)
    )
    if not m > 0.0:
        raise InvalidParameterError(f"susceptible floor margin came out nonpositive: m={m}")
    return s_min, m


def quadrangle_abcd(params: ModelParams) -> Region:
    """The absorbing quadrangle A=(S_min,0), B=(S_min,i_cap), C=(b(+)/2a(+),i_cap), D=(N,0)."""
    s_min, m = choose_s_min(params)
    N = params.N
    half_c = params.plus.b / (2.0 * params.plus.a)
    i_cap = N - half_c
    boundary = np.array(
        [(s_min, 0.0), (s_min, i_cap), (half_c, i_cap), (N, 0.0), (s_min, 0.0)]
    )
    return Region(
        RegionKind.QUADRANGLE,
        boundary,
        {"N": N, "s_min": s_min, "i_cap": i_cap, "m": m},
    )


def _positivity_scan(
    env_list: list, N: float, s_hi: float, i_hi: float, resolution: int
) -> float:
    """Min over the lattice (0, s_hi] x (0, i_hi] of ds/dt for every listed environment."""
    s = s_hi * (np.arange(1, resolution + 1) / resolution)
    i = i_hi * (np.arange(1, resolution + 1) / resolution)
    ss, ii = np.meshgrid(s, i, indexing="ij")
    worst = np.inf
    for env in env_list:
        ds = -env.a * ss * ii + env.c * (N - ss - ii)
        worst = min(worst, float(ds.min()))
    return worst

def _slope_scan(
    env_list: list, N: float, s_hi: float, i_hi: float, resolution: int
) -> float:
    """Max over the lattice of (b - a*s)/(ds/dt); the caller adds the safety margin."""
    s = s_hi * (np.arange(1, resolution + 1) / resolution)
    i = i_hi * (np.arange(1, resolution + 1) / resolution)
    ss, ii = np.meshgrid(s, i, indexing="ij")
    best = -np.inf
    for env in env_list:
        ds = -env.a * ss * ii + env.c * (N - ss - ii)
        best = max(best, float(((env.b - env.a * ss) / ds).max()))
    return best


def _default_epsilon0(env_list: list, N: float, knee: float, i_cap: float) -> float:
    # half the level at which ds/dt stays positive at the worst lattice corner (knee, eps)
    bounds = [env.c * (N - knee) / (env.a * knee + env.c) for env in env_list]
    return min(0.5 * min(bounds), 0.5 * i_cap)


def _curve_region(
    params: ModelParams,
    kind: RegionKind,
    env_list: list,
    knee: float,
    epsilon0: float | None,
    resolution: int,
    what: str,
) -> Region:
    N = params.N
    s_min, m = choose_s_min(params)
    half_c = params.plus.b / (2.0 * params.plus.a)
    i_cap = N - half_c
    if epsilon0 is None:
        epsilon0 = _default_epsilon0(env_list, N, knee, i_cap)
    if not 0.0 < epsilon0 <= i_cap:
        raise InvalidParameterError(f"{what}={epsilon0} must lie in (0, {i_cap}]")
    worst = _positivity_scan(env_list, N, knee, epsilon0, resolution)
    if not worst > 0.0:
        raise InvalidParameterError(
            f"no valid {what}: ds/dt reaches {worst:.3g} on the strip below {what}={epsilon0}; "
            "pick a smaller value"
        )
    k = 1.2 * _slope_scan(env_list, N, knee, epsilon0, resolution)
    if not k > 0.0:
        raise InvalidParameterError(f"curve slope scan returned k={k}; expected positive")
    i_min = epsilon0 * math.exp(-k * (knee - s_min))
    s_curve = np.linspace(s_min, knee, CURVE_POINTS)
    i_curve = epsilon0 * np.exp(-k * (s_curve - s_min))
    boundary = np.concatenate(
        (
            np.stack((s_curve, i_curve), axis=1),
            np.array(
                [(N - i_min, i_min), (half_c, i_cap), (s_min, i_cap), (s_min, epsilon0)]
            ),
        )
    )
    return Region(
        kind,
        boundary,
        {
            "N": N,
            "s_min": s_min,
            "m": m,
            "i_cap": i_cap,
            "epsilon0": epsilon0,
            "k": k,
            "knee_s": knee,
            "i_min": i_min,
        },
    )


def region_g(
    params: ModelParams,
    epsilon0: float | None = None,
    resolution: int = GRID_RESOLUTION,
) -> Region:
    """Quadrangle cut from below by the curve i = epsilon0*exp(-k(s - S_min)).

    The curve runs from (S_min, epsilon0) to s = b(-)/a(-); right of that the
    floor is the constant i_min. Requires both systems endemic.
    """
    knee = params.minus.b / params.minus.a
    if knee >= params.N:
        raise NotApplicableError(
            "region G needs b(-)/a(-) < N (both systems endemic); use region_k instead"
        )
    return _curve_region(
        params, RegionKind.CURVE_BOUNDED_G, [params.plus, params.minus], knee,
        epsilon0, resolution, "epsilon0",
    )


def sample_region(region: Region, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic rejection sample of `count` points from the region."""
    rng = np.random.default_rng(seed)
    if region.kind is RegionKind.NEIGHBORHOOD:
        cs, ci = region.metadata["center"]
        r = region.metadata["radius"] * np.sqrt(rng.random(count))
        th = 2.0 * np.pi * rng.random(count)
        return np.stack((cs + r * np.cos(th), ci + r * np.sin(th)), axis=1)
    lo_s, hi_s, lo_i, hi_i = region.bounding_box()
    out = np.empty((count, 2))
    have = 0
    attempts = 0
    while have < count:
        attempts += 1
        if attempts > 1000:
            raise InvalidParameterError("region rejection sampling failed to fill the quota")
        draw = rng.random((count, 2))
        cand_s = lo_s + (hi_s - lo_s) * draw[:, 0]
        cand_i = lo_i + (hi_i - lo_i) * draw[:, 1]
        for sv, iv in zip(cand_s, cand_i):
            if have == count:
                break
            if region.contains(Point(sv, iv)):
                out[have, 0] = sv
                out[have, 1] = iv
                have += 1
    return out


def _verify_plus_invariance(
    params: ModelParams,
    region: Region,
    probes: int,
    probe_seed: int,
    duration: float,
    step: float,
) -> None:
    starts = sample_region(region, probes, probe_seed)
    md = region.metadata
    bad = kernels.stay_sweep(
        params.plus.a, params.plus.b, params.plus.c, params.N,
        starts, float(duration), float(step), DOMAIN_TOL * params.N,
        md["s_min"], md["epsilon0"], md["k"], md["knee_s"], md["i_min"], md["i_cap"],
        MEMBERSHIP_TOL * params.N,
    )
    if bad >= 0:
        raise NumericalInstabilityError(
            f"invariance sweep failed: the plus flow left the region from start "
            f"({starts[bad, 0]:.6g}, {starts[bad, 1]:.6g})"
        )


def region_k(
    params: ModelParams,
    delta1: float | None = None,
    verify: bool = True,
    probes: int = 500,
    probe_seed: int = 0,
    verify_duration: float = 100.0,
    step: float = DEFAULT_STEP,
    resolution: int = GRID_RESOLUTION,
) -> Region:
    """Compact recurrence set: region G itself when both systems are endemic,
    otherwise the analogous curve-bounded region of the plus system alone.

    With verify=True (the default) the plus-system construction is certified
    by flowing 500 sampled interior starts for `verify_duration` and requiring
    they never leave (slack 1e-6*N).
    """
    lam = persistence_threshold(params)
    if lam <= 0.0:
        raise NotApplicableError(f"recurrence region needs a positive threshold, got {lam}")
    if params.minus.b / params.minus.a < params.N:
        return region_g(params, resolution=resolution)
    knee = params.plus.b / params.plus.a
    if delta1 is None:
        from .threshold import occupation_lower_bound

        rho = occupation_lower_bound(params)
        half_c = params.plus.b / (2.0 * params.plus.a)
        delta1 = min(rho, _default_epsilon0([params.plus], params.N, knee, params.N - half_c))
    region = _curve_region(
        params, RegionKind.CURVE_BOUNDED_K, [params.plus], knee, delta1, resolution, "delta1"
    )
    if verify:
        _verify_plus_invariance(params, region, probes, probe_seed, verify_duration, step)
    return region


def degeneracy_curve_residual(params: ModelParams, pt: Point) -> float:
    """Determinant pairing of the two vector fields at pt; zero iff they are parallel.

    Vanishes identically when the parameter sets are proportional, and its
    zero set is the quadratic curve where the fields align.
    """
    s, i = float(pt[0]), float(pt[1])
    fp_s = -params.plus.a * s * i + params.plus.c * (params.N - s - i)
    fm_s = -params.minus.a * s * i + params.minus.c * (params.N - s - i)
    gp = params.plus.a * s - params.plus.b
    gm = params.minus.a * s - params.minus.b
    return fp_s * gm - fm_s * gp


def write_polyline_csv(region: Region, path) -> None:
    """Export the boundary polyline as `s,i` rows (17 significant digits)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("s,i\n")
        for s, i in region.boundary:
            fh.write(f"{s:.17g},{i:.17g}\n")

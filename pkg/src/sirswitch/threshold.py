"""Persistence threshold, regime classification, and empirical verdicts."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dynamics import ModelParams, Point, basic_reproduction_number, equilibrium
from .errors import InvalidParameterError, NotApplicableError, UnresolvedThresholdError
from .switched import Trajectory
from .telegraph import stationary_probabilities

PROPORTIONALITY_TOL = 1e-12


class Classification(enum.Enum):
    EXTINCTION = "Extinction"
    PERSISTENT = "Persistent"
    PERMANENT = "Permanent"
    DEGENERATE_COMMON_EQUILIBRIUM = "DegenerateCommonEquilibrium"


class Verdict(enum.Enum):
    EXTINCT_OBSERVED = "ExtinctObserved"
    PERSISTENT_OBSERVED = "PersistentObserved"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class RegimeReport:
    lambda_value: float
    r0_plus: float
    r0_minus: float
    classification: Classification
    predicted_limit: Point | None


def persistence_threshold(params: ModelParams) -> float:
    """The switching-weighted growth rate p*(a(+)N - b(+)) + q*(a(-)N - b(-)).

    Negative means extinction of the infection, positive means persistence.
    """
    p, q = stationary_probabilities(params.rates)
    return p * (params.plus.a * params.N - params.plus.b) + q * (
        params.minus.a * params.N - params.minus.b
    )


def occupation_lower_bound(params: ModelParams) -> float:
    """Asymptotic lower bound rho on the long-run mean of I when the threshold is positive:
    rho = c_min * lambda / ((a_max*N + c_max) * a_max).
    """
    lam = persistence_threshold(params)
    if lam <= 0.0:
        raise NotApplicableError(f"occupation bound needs a positive threshold, got {lam}")
    a_max = max(params.plus.a, params.minus.a)
    c_min = min(params.plus.c, params.minus.c)
    c_max = max(params.plus.c, params.minus.c)
    return c_min * lam / ((a_max * params.N + c_max) * a_max)


def is_proportional(params: ModelParams, tol: float = PROPORTIONALITY_TOL) -> bool:
    """True when a, b, c share one ratio between the environments (parallel fields)."""
    ratios = (
        params.plus.a / params.minus.a,
        params.plus.b / params.minus.b,
        params.plus.c / params.minus.c,
    )
    scale = max(abs(r) for r in ratios)
    return max(ratios) - min(ratios) <= tol * scale


def classify(params: ModelParams) -> RegimeReport:
    """Regime per the threshold sign, the degeneracy test, and the b/a ratios."""
    lam = persistence_threshold(params)
    p, q = stationary_probabilities(params.rates)
    scale = abs(p * (params.plus.a * params.N - params.plus.b)) + abs(
        q * (params.minus.a * params.N - params.minus.b)
    )
    if abs(lam) <= 1e-12 * max(scale, np.finfo(float).tiny):
        raise UnresolvedThresholdError(
            "persistence threshold is numerically zero; the model gives no verdict there"
        )
    r0p = basic_reproduction_number(params.plus, params.N)
    r0m = basic_reproduction_number(params.minus, params.N)
    if lam < 0.0:
        cls = Classification.EXTINCTION
        limit: Point | None = Point(params.N, 0.0)
    elif is_proportional(params):
        cls = Classification.DEGENERATE_COMMON_EQUILIBRIUM
        limit = equilibrium(params.plus, params.N)
    elif r0p > 1.0 and r0m > 1.0:
        # both b/a below N: permanence regime
        cls = Classification.PERMANENT
        limit = None
    else:
        cls = Classification.PERSISTENT
        limit = None
    return RegimeReport(
        lambda_value=lam,
        r0_plus=r0p,
        r0_minus=r0m,
        classification=cls,
        predicted_limit=limit,
    )


def _default_window(params: ModelParams) -> float:
    return 100.0 * params.rates.mean_holding_time()


def persistence_verdict(
    traj: Trajectory,
    extinction_threshold: float | None = None,
    window: float | None = None,
) -> Verdict:
    """Empirical tail classification of one trajectory.

    ExtinctObserved when I stays below the threshold over the final window;
    PersistentObserved when I reaches 10x the threshold there and S stays
    above half the susceptible floor (floor check skipped when the floor
    construction does not apply).
    """
    params = traj.params
    if extinction_threshold is None:
        extinction_threshold = 1e-6 * params.N
    if window is None:
        window = _default_window(params)
    if traj.horizon < 2.0 * window:
        raise InvalidParameterError(
            f"trajectory horizon {traj.horizon} shorter than twice the window {window}"
        )
    t = traj.sample_times
    tail = t >= t[-1] - window
    i_tail = traj.I[tail]
    if i_tail.max() < extinction_threshold:
        return Verdict.EXTINCT_OBSERVED
    if i_tail.max() >= 10.0 * extinction_threshold:
        from .geometry import choose_s_min

        try:
            s_min, _ = choose_s_min(params)
        except NotApplicableError:
            return Verdict.PERSISTENT_OBSERVED
        if traj.S[tail].min() >= 0.5 * s_min:
            return Verdict.PERSISTENT_OBSERVED
    return Verdict.INCONCLUSIVE


def permanence_bounds(
    ensemble: list[Trajectory], tail_fraction: float = 0.5
) -> tuple[float, float, float, float]:
    """Extremes of I and S over the tail of every trajectory: (i_lo, i_hi, s_lo, s_hi).

    Positive i_lo across an ensemble is the empirical footprint of permanence.
    """
    if not ensemble:
        raise InvalidParameterError("ensemble must be nonempty")
    if not 0.0 < tail_fraction <= 1.0:
        raise InvalidParameterError(f"tail_fraction must be in (0, 1], got {tail_fraction}")
    i_lo = np.inf
    i_hi = -np.inf
    s_lo = np.inf
    s_hi = -np.inf
    for traj in ensemble:
        mh = traj.params.rates.mean_holding_time()
        if tail_fraction * traj.horizon <= 10.0 * mh:
            raise InvalidParameterError(
                "tail too short: need tail_fraction*horizon above 10 mean holding times"
            )
        tail = traj.sample_times >= traj.sample_times[-1] - tail_fraction * traj.horizon
        i_seg = traj.I[tail]
        s_seg = traj.S[tail]
        i_lo = min(i_lo, float(i_seg.min()))
        i_hi = max(i_hi, float(i_seg.max()))
        s_lo = min(s_lo, float(s_seg.min()))
        s_hi = max(s_hi, float(s_seg.max()))
    return i_lo, i_hi, s_lo, s_hi

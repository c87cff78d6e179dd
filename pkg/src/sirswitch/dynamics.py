"""Frozen-environment SIRS dynamics on the reduced (S, I) plane.

The removed class is eliminated through R = N - S - I, leaving
    ds/dt = -a*s*i + c*(N - s - i)
    di/dt = (a*s - b)*i
on the triangle {s >= 0, i >= 0, s + i <= N}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._backend import kernels
from .errors import InvalidParameterError, NumericalInstabilityError
from .telegraph import SwitchRates

DEFAULT_STEP = 1e-3
# round-off slack for triangle membership, relative to N
DOMAIN_TOL = 1e-9


class Point(NamedTuple):
    s: float
    i: float


@dataclass(frozen=True)
class EnvParams:
    """Rates of one frozen environment: transmission a, recovery b, immunity loss c."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0.0:
                raise InvalidParameterError(f"rate {name} must be finite and > 0, got {v}")


@dataclass(frozen=True)
class ModelParams:
    """Both environments plus population size and switching rates.

    Labels are normalized at construction so that b(+)/a(+) <= b(-)/a(-);
    when the inputs violate that ordering the environment labels are swapped
    (including alpha and beta, so the physical process is unchanged) and
    `relabeled` is set.
    """

    plus: EnvParams
    minus: EnvParams
    N: float
    rates: SwitchRates
    relabeled: bool = False

    def __post_init__(self) -> None:
        if not np.isfinite(self.N) or self.N <= 0.0:
            raise InvalidParameterError(f"population size N must be finite and > 0, got {self.N}")
        if self.plus.b / self.plus.a > self.minus.b / self.minus.a:
            object.__setattr__(self, "relabeled", True)
            plus, minus = self.minus, self.plus
            object.__setattr__(self, "plus", plus)
            object.__setattr__(self, "minus", minus)
            object.__setattr__(
                self, "rates", SwitchRates(alpha=self.rates.beta, beta=self.rates.alpha)
            )

    def env(self, state) -> EnvParams:
        return self.plus if int(state) == 0 else self.minus


def in_triangle(pt: Point, N: float, tol: float | None = None) -> bool:
    """Membership in the closed triangle, with round-off slack tol (default 1e-9*N)."""
    if tol is None:
        tol = DOMAIN_TOL * N
    s, i = pt
    return s >= -tol and i >= -tol and s + i <= N + tol


def vector_field(params: EnvParams, N: float, pt: Point) -> tuple[float, float]:
    """Right-hand side (ds/dt, di/dt) of the reduced system at pt."""
    s, i = pt
    return (-params.a * s * i + params.c * (N - s - i), (params.a * s - params.b) * i)


def has_endemic_equilibrium(params: EnvParams, N: float) -> bool:
    return N > params.b / params.a


def equilibrium(params: EnvParams, N: float) -> Point:
    """Positive equilibrium (b/a, c(N - b/a)/(b + c)) when N > b/a, else (N, 0)."""
    s_star = params.b / params.a
    if N > s_star:
        return Point(s_star, params.c * (N - s_star) / (params.b + params.c))
    return Point(N, 0.0)


def basic_reproduction_number(params: EnvParams, N: float) -> float:
    return N * params.a / params.b


def flow(
    params: EnvParams,
    N: float,
    start: Point,
    duration: float,
    step: float = DEFAULT_STEP,
) -> Point:
    """Fixed-step RK4 semiflow of one frozen environment.

    The last partial step is shortened to land exactly on `duration`; the
    state is clamped back into the triangle when round-off pushes it out by
    less than 1e-9*N, and anything worse raises (reduce the step).
    """
    if duration < 0.0 or not np.isfinite(duration):
        raise InvalidParameterError(f"duration must be finite and >= 0, got {duration}")
    if step <= 0.0 or not np.isfinite(step):
        raise InvalidParameterError(f"step must be finite and > 0, got {step}")
    if not in_triangle(start, N):
        raise InvalidParameterError(f"start {tuple(start)} outside the triangle for N={N}")
    s, i, ok = kernels.rk4_span(
        params.a, params.b, params.c, N, float(start[0]), float(start[1]),
        float(duration), float(step), DOMAIN_TOL * N,
    )
    if not ok:
        raise NumericalInstabilityError(
            f"flow left the triangle beyond tolerance near (s={s:.6g}, i={i:.6g}); "
            f"reduce step={step}"
        )
    return Point(s, i)

"""Two-state continuous-time Markov chain that drives the environment switching."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

_JUMP_CAP = 10_000_000


class EnvState(enum.IntEnum):
    """Environment label. PLUS selects the plus-system rates, MINUS the minus-system."""

    PLUS = 0
    MINUS = 1

    @property
    def symbol(self) -> str:
        return "+" if self is EnvState.PLUS else "-"

    @classmethod
    def from_symbol(cls, sym: str) -> "EnvState":
        if sym == "+":
            return cls.PLUS
        if sym == "-":
            return cls.MINUS
        raise InvalidParameterError(f"unknown environment symbol {sym!r}, expected '+' or '-'")

    def flipped(self) -> "EnvState":
        return EnvState.MINUS if self is EnvState.PLUS else EnvState.PLUS


@dataclass(frozen=True)
class SwitchRates:
    """Transition intensities: alpha leaves PLUS, beta leaves MINUS."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0.0:
                raise InvalidParameterError(f"switch rate {name} must be finite and > 0, got {v}")

    def rate_out_of(self, state: EnvState) -> float:
        return self.alpha if state is EnvState.PLUS else self.beta

    def mean_holding_time(self) -> float:
        # plain average of the two expected holding lengths; used for burn-in defaults
        return 0.5 * (1.0 / self.alpha + 1.0 / self.beta)


@dataclass(frozen=True, eq=False)
class SwitchPath:
    """Realized telegraph trajectory: alternating exponential holding times.

    The state during the n-th holding interval (0-based) is `initial_state`
    flipped n times; the retained prefix always covers `horizon`.
    """

    initial_state: EnvState
    holding_times: np.ndarray
    horizon: float
    _jump_times: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ht = np.asarray(self.holding_times, dtype=np.float64)
        object.__setattr__(self, "holding_times", ht)
        if ht.size and ht.min() <= 0.0:
            raise InvalidParameterError("holding times must be strictly positive")
        object.__setattr__(self, "_jump_times", np.cumsum(ht))
        total = self._jump_times[-1] if ht.size else 0.0
        if total < self.horizon:
            raise InvalidParameterError("holding times do not cover the horizon")

    @property
    def jump_times(self) -> np.ndarray:
        return self._jump_times

    @property
    def n_jumps(self) -> int:
        return int(self.holding_times.size)

    def state_during(self, interval_index: int) -> EnvState:
        return EnvState((int(self.initial_state) + interval_index) % 2)


def stationary_probabilities(rates: SwitchRates) -> tuple[float, float]:
    """Stationary law (p, q) of the chain: p = beta/(alpha+beta), q as complement."""
    p = rates.beta / (rates.alpha + rates.beta)
    return p, 1.0 - p


def _rng_for(seed: int, replica: int) -> np.random.Generator:
    if not isinstance(seed, (int, np.integer)):
        raise InvalidParameterError(f"seed must be an integer, got {type(seed).__name__}")
    if not isinstance(replica, (int, np.integer)) or replica < 0:
        raise InvalidParameterError(f"replica index must be a nonnegative integer, got {replica}")
    # independent streams per (seed, replica); seed folded into 64 bits
    return np.random.default_rng(np.random.SeedSequence([int(seed) % (1 << 64), int(replica)]))


def sample_path(
    rates: SwitchRates,
    initial: EnvState,
    horizon: float,
    seed: int,
    replica: int = 0,
) -> SwitchPath:
    """Draw alternating Exp(alpha)/Exp(beta) holding times until the horizon is covered.

    Inverse-CDF sampling sigma = -ln(U)/rate with U in (0, 1]; deterministic
    for fixed (seed, replica).
    """
    if not np.isfinite(horizon) or horizon <= 0.0:
        raise InvalidParameterError(f"horizon must be finite and > 0, got {horizon}")
    initial = EnvState(initial)
    rng = _rng_for(seed, replica)
    r0 = rates.rate_out_of(initial)
    r1 = rates.rate_out_of(initial.flipped())

    max_rate = max(r0, r1)
    chunk = int(min(max(64.0, horizon * max_rate * 1.2 + 16.0), 1 << 20))
    pieces: list[np.ndarray] = []
    total = 0.0
    count = 0
    while total < horizon:
        if count > _JUMP_CAP:
            raise InvalidParameterError(
                f"switch count exceeded the {_JUMP_CAP} jump cap before reaching the horizon"
            )
        u = 1.0 - rng.random(chunk)  # in (0, 1]
        idx = np.arange(count, count + chunk)
        rate = np.where(idx % 2 == 0, r0, r1)
        sig = -np.log(u) / rate
        # U == 1.0 would give a zero holding time; redraw those draws
        bad = sig <= 0.0
        while bad.any():
            u2 = 1.0 - rng.random(int(bad.sum()))
            sig[bad] = -np.log(u2) / rate[bad]
            bad = sig <= 0.0
        csum = total + np.cumsum(sig)
        hit = np.searchsorted(csum, horizon, side="left")
        if hit < chunk:
            pieces.append(sig[: hit + 1])
            count += hit + 1
            total = csum[hit]
            break
        pieces.append(sig)
        count += chunk
        total = csum[-1]
    holding = np.concatenate(pieces) if pieces else np.empty(0)
    if holding.size > _JUMP_CAP:
        raise InvalidParameterError(
            f"switch count exceeded the {_JUMP_CAP} jump cap before reaching the horizon"
        )
    return SwitchPath(initial_state=initial, holding_times=holding, horizon=float(horizon))


def occupation_fraction(path: SwitchPath, state: EnvState) -> float:
    """Fraction of [0, horizon] spent in `state`."""
    if path.holding_times.size == 0:
        raise InvalidParameterError("empty switch path")
    state = EnvState(state)
    tau = np.concatenate(([0.0], np.minimum(path.jump_times, path.horizon)))
    durations = np.diff(tau)
    parity = np.arange(durations.size) % 2
    want = 0 if state is path.initial_state else 1
    return float(durations[parity == want].sum() / path.horizon)

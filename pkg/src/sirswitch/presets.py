"""Canonical parameter sets and the CLI scenario presets.

P1: both systems endemic (threshold 2.0, permanence regime).
P2: endemic plus disease-free minus (threshold 1.4, persistence only).
P3: same shape but threshold -0.15 (extinction).
P4: proportional parameters (minus = 2x plus), common equilibrium (25, 25).
P5: neither system endemic (threshold -0.2, the b(+)/a(+) >= N corollary).
"""

from __future__ import annotations

from .dynamics import EnvParams, ModelParams, Point
from .telegraph import SwitchRates


def p1() -> ModelParams:
    return ModelParams(
        plus=EnvParams(a=0.04, b=1.0, c=0.5),
        minus=EnvParams(a=0.02, b=1.0, c=0.5),
        N=100.0,
        rates=SwitchRates(alpha=1.0, beta=1.0),
    )


def p2() -> ModelParams:
    return ModelParams(
        plus=EnvParams(a=0.04, b=1.0, c=0.5),
        minus=EnvParams(a=0.008, b=1.0, c=0.5),
        N=100.0,
        rates=SwitchRates(alpha=1.0, beta=1.0),
    )


def p3() -> ModelParams:
    return ModelParams(
        plus=EnvParams(a=0.012, b=1.0, c=0.5),
        minus=EnvParams(a=0.005, b=1.0, c=0.5),
        N=100.0,
        rates=SwitchRates(alpha=1.0, beta=1.0),
    )


def p4() -> ModelParams:
    return ModelParams(
        plus=EnvParams(a=0.04, b=1.0, c=0.5),
        minus=EnvParams(a=0.08, b=2.0, c=1.0),
        N=100.0,
        rates=SwitchRates(alpha=1.0, beta=1.0),
    )


def p5() -> ModelParams:
    return ModelParams(
        plus=EnvParams(a=0.008, b=1.0, c=0.5),
        minus=EnvParams(a=0.008, b=1.0, c=0.5),
        N=100.0,
        rates=SwitchRates(alpha=1.0, beta=1.0),
    )


PARAM_SETS = {"P1": p1, "P2": p2, "P3": p3, "P4": p4, "P5": p5}

DEFAULT_START = Point(80.0, 10.0)


def preset_config(name: str) -> dict:
    """Scenario config dict for the named preset (JSON-ready)."""
    base = {
        "schema_version": 1,
        "start": {"s": 80.0, "i": 10.0},
        "initial_env": "+",
        "step": 0.001,
        "sample_interval": 0.1,
        "seed": 1,
        "replicas": 1,
    }
    if name == "example1":
        params = p1()
        extra = {
            "horizon": 2000.0,
            "analyses": ["classify", "simulate", "regions", "gamma", "stationary",
                         "diagnostics"],
            "gamma_options": {"depth": 4, "times_per_level": 12, "t_max": 50.0},
            "diagnostics_options": {
                "starts": [[80.0, 10.0], [10.0, 80.0]],
                "checkpoints": [500.0, 1000.0, 2000.0],
            },
        }
    elif name == "example2":
        params = p2()
        extra = {
            "horizon": 2000.0,
            "analyses": ["classify", "simulate", "regions", "gamma", "stationary"],
            "gamma_options": {"depth": 4, "times_per_level": 12, "t_max": 50.0},
        }
    elif name == "example3":
        params = p3()
        extra = {
            "horizon": 5000.0,
            "analyses": ["classify", "simulate", "gamma", "stationary"],
        }
    else:
        raise KeyError(f"unknown preset {name!r}; choose example1, example2 or example3")
    cfg = dict(base)
    cfg["params"] = {
        "plus": {"a": params.plus.a, "b": params.plus.b, "c": params.plus.c},
        "minus": {"a": params.minus.a, "b": params.minus.b, "c": params.minus.c},
        "N": params.N,
        "rates": {"alpha": params.rates.alpha, "beta": params.rates.beta},
    }
    cfg.update(extra)
    return cfg


PRESET_NAMES = ("example1", "example2", "example3")

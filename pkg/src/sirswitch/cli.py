"""Command-line front end: scenario configs, analysis pipeline, artifacts.

Subcommands: run <config.json>, validate <config.json>,
preset <example1|example2|example3> --out <dir>. Exit codes: 0 success,
2 config parse error, 3 precondition violation, 4 numerical instability.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import geometry, limitset, stationary
from ._backend import active_backend
from .dynamics import EnvParams, ModelParams, Point
from .errors import (
    InvalidParameterError,
    NotApplicableError,
    NumericalInstabilityError,
    UnresolvedThresholdError,
)
from .presets import PRESET_NAMES, preset_config
from .switched import simulate
from .telegraph import EnvState, SwitchRates, stationary_probabilities
from .threshold import classify, persistence_verdict
from .stationary import default_burn_in

OUTPUT_DIR_ENV = "SIRSWITCH_OUTPUT_DIR"
ANALYSES = ("classify", "simulate", "regions", "gamma", "stationary", "diagnostics")
SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_INSTABILITY = 4


@dataclass(frozen=True)
class GammaOptions:
    depth: int = 6
    times_per_level: int = 24
    t_max: float = 50.0
    tube_radius: float = 1.0


@dataclass(frozen=True)
class StationaryOptions:
    bins_s: int = 50
    bins_i: int = 50
    burn_in: float | None = None


@dataclass(frozen=True)
class RegionsOptions:
    epsilon0: float | None = None
    delta1: float | None = None


@dataclass(frozen=True)
class DiagnosticsOptions:
    starts: tuple = ()
    checkpoints: tuple = ()
    bins_s: int = 30
    bins_i: int = 30


@dataclass(frozen=True)
class ScenarioConfig:
    params: ModelParams
    start: Point
    initial_env: EnvState
    horizon: float
    seed: int
    analyses: tuple
    step: float = 1e-3
    sample_interval: float = 0.1
    replicas: int = 1
    output_dir: str | None = None
    gamma_options: GammaOptions = dc_field(default_factory=GammaOptions)
    stationary_options: StationaryOptions = dc_field(default_factory=StationaryOptions)
    regions_options: RegionsOptions = dc_field(default_factory=RegionsOptions)
    diagnostics_options: DiagnosticsOptions = dc_field(default_factory=DiagnosticsOptions)


class ConfigParseError(Exception):
    """Structural config problem (wrong type, unknown key, missing field)."""


def _diag(path: str, message: str) -> dict:
    return {"path": path, "message": message}


def _reject_unknown(d: dict, allowed, path: str) -> None:
    for key in d:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ConfigParseError(f"unknown config key {where!r}")


def _need(d: dict, key: str, path: str):
    if key not in d:
        where = f"{path}.{key}" if path else key
        raise ConfigParseError(f"missing required config key {where!r}")
    return d[key]


def _as_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigParseError(f"{where} must be a number, got {type(value).__name__}")
    return float(value)


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigParseError(f"{where} must be an integer, got {type(value).__name__}")
    return value


def _as_mapping(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigParseError(f"{where} must be an object, got {type(value).__name__}")
    return value


def _read_structure(raw: dict) -> dict:
    """Structural walk: types, required keys, unknown-key rejection.

    Returns plain parsed values; value-level (semantic) violations are left
    to validate()/run(), which report them as precondition failures.
    """
    raw = _as_mapping(raw, "config")
    _reject_unknown(
        raw,
        (
            "schema_version", "params", "start", "initial_env", "horizon", "step",
            "sample_interval", "seed", "replicas", "analyses", "output_dir",
            "gamma_options", "stationary_options", "regions_options",
            "diagnostics_options",
        ),
        "",
    )
    version = _need(raw, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise ConfigParseError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")

    pd = _as_mapping(_need(raw, "params", ""), "params")
    _reject_unknown(pd, ("plus", "minus", "N", "rates"), "params")
    envs = {}
    for label in ("plus", "minus"):
        ed = _as_mapping(_need(pd, label, "params"), f"params.{label}")
        _reject_unknown(ed, ("a", "b", "c"), f"params.{label}")
        envs[label] = {
            k: _as_number(_need(ed, k, f"params.{label}"), f"params.{label}.{k}")
            for k in ("a", "b", "c")
        }
    n_val = _as_number(_need(pd, "N", "params"), "params.N")
    rd = _as_mapping(_need(pd, "rates", "params"), "params.rates")
    _reject_unknown(rd, ("alpha", "beta"), "params.rates")
    alpha = _as_number(_need(rd, "alpha", "params.rates"), "params.rates.alpha")
    beta = _as_number(_need(rd, "beta", "params.rates"), "params.rates.beta")

    sd = _as_mapping(_need(raw, "start", ""), "start")
    _reject_unknown(sd, ("s", "i"), "start")
    start = Point(
        _as_number(_need(sd, "s", "start"), "start.s"),
        _as_number(_need(sd, "i", "start"), "start.i"),
    )

    env_sym = _need(raw, "initial_env", "")
    if env_sym not in ("+", "-"):
        raise ConfigParseError(f"initial_env must be '+' or '-', got {env_sym!r}")

    analyses_raw = _need(raw, "analyses", "")
    if not isinstance(analyses_raw, list) or not analyses_raw:
        raise ConfigParseError("analyses must be a nonempty list")
    for name in analyses_raw:
        if name not in ANALYSES:
            raise ConfigParseError(f"unknown analysis {name!r}; valid: {', '.join(ANALYSES)}")
    analyses = tuple(a for a in ANALYSES if a in analyses_raw)

    horizon = _as_number(_need(raw, "horizon", ""), "horizon")
    seed = _as_int(_need(raw, "seed", ""), "seed")
    step = _as_number(raw.get("step", 1e-3), "step")
    sample_interval = _as_number(raw.get("sample_interval", 0.1), "sample_interval")
    replicas = _as_int(raw.get("replicas", 1), "replicas")
    output_dir = raw.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigParseError("output_dir must be a string")

    gd = _as_mapping(raw.get("gamma_options", {}), "gamma_options")
    _reject_unknown(gd, ("depth", "times_per_level", "t_max", "tube_radius"), "gamma_options")
    gamma_opts = GammaOptions(
        depth=_as_int(gd.get("depth", 6), "gamma_options.depth"),
        times_per_level=_as_int(gd.get("times_per_level", 24), "gamma_options.times_per_level"),
        t_max=_as_number(gd.get("t_max", 50.0), "gamma_options.t_max"),
        tube_radius=_as_number(gd.get("tube_radius", 1.0), "gamma_options.tube_radius"),
    )
    std = _as_mapping(raw.get("stationary_options", {}), "stationary_options")
    _reject_unknown(std, ("bins_s", "bins_i", "burn_in"), "stationary_options")
    burn_in = std.get("burn_in")
    stationary_opts = StationaryOptions(
        bins_s=_as_int(std.get("bins_s", 50), "stationary_options.bins_s"),
        bins_i=_as_int(std.get("bins_i", 50), "stationary_options.bins_i"),
        burn_in=None if burn_in is None else _as_number(burn_in, "stationary_options.burn_in"),
    )
    rgd = _as_mapping(raw.get("regions_options", {}), "regions_options")
    _reject_unknown(rgd, ("epsilon0", "delta1"), "regions_options")
    eps0 = rgd.get("epsilon0")
    delta1 = rgd.get("delta1")
    regions_opts = RegionsOptions(
        epsilon0=None if eps0 is None else _as_number(eps0, "regions_options.epsilon0"),
        delta1=None if delta1 is None else _as_number(delta1, "regions_options.delta1"),
    )
    dgd = _as_mapping(raw.get("diagnostics_options", {}), "diagnostics_options")
    _reject_unknown(dgd, ("starts", "checkpoints", "bins_s", "bins_i"), "diagnostics_options")
    dg_starts = dgd.get("starts", [])
    if not isinstance(dg_starts, list):
        raise ConfigParseError("diagnostics_options.starts must be a list of [s, i] pairs")
    starts = []
    for idx, entry in enumerate(dg_starts):
        if not isinstance(entry, list) or len(entry) != 2:
            raise ConfigParseError(
                f"diagnostics_options.starts[{idx}] must be an [s, i] pair"
            )
        starts.append(
            (
                _as_number(entry[0], f"diagnostics_options.starts[{idx}][0]"),
                _as_number(entry[1], f"diagnostics_options.starts[{idx}][1]"),
            )
        )
    dg_cps = dgd.get("checkpoints", [])
    if not isinstance(dg_cps, list):
        raise ConfigParseError("diagnostics_options.checkpoints must be a list of times")
    checkpoints = tuple(
        _as_number(c, f"diagnostics_options.checkpoints[{i}]") for i, c in enumerate(dg_cps)
    )
    diagnostics_opts = DiagnosticsOptions(
        starts=tuple(starts),
        checkpoints=checkpoints,
        bins_s=_as_int(dgd.get("bins_s", 30), "diagnostics_options.bins_s"),
        bins_i=_as_int(dgd.get("bins_i", 30), "diagnostics_options.bins_i"),
    )

    return {
        "envs": envs,
        "n": n_val,
        "alpha": alpha,
        "beta": beta,
        "start": start,
        "env_sym": env_sym,
        "horizon": horizon,
        "seed": seed,
        "step": step,
        "sample_interval": sample_interval,
        "replicas": replicas,
        "output_dir": output_dir,
        "analyses": analyses,
        "gamma": gamma_opts,
        "stationary": stationary_opts,
        "regions": regions_opts,
        "diagnostics": diagnostics_opts,
    }


def _param_value_paths(st: dict) -> list[str]:
    """Config paths of model parameters that fail the finite-positive rule."""
    bad = []
    for label in ("plus", "minus"):
        for k, v in st["envs"][label].items():
            if not (math.isfinite(v) and v > 0.0):
                bad.append(f"params.{label}.{k}")
    if not (math.isfinite(st["n"]) and st["n"] > 0.0):
        bad.append("params.N")
    if not (math.isfinite(st["alpha"]) and st["alpha"] > 0.0):
        bad.append("params.rates.alpha")
    if not (math.isfinite(st["beta"]) and st["beta"] > 0.0):
        bad.append("params.rates.beta")
    return bad


class _SemanticConfigError(Exception):
    """Carries config paths whose values violate domain preconditions."""

    def __init__(self, paths: list[str]):
        super().__init__("invalid parameter values: " + ", ".join(paths))
        self.paths = paths


def parse_config(raw: dict) -> ScenarioConfig:
    """Parse a config dict into domain objects.

    Structural problems raise ConfigParseError; parameter values the domain
    constructors would reject raise with the offending config paths instead,
    so the CLI can report them as precondition failures.
    """
    st = _read_structure(raw)
    bad = _param_value_paths(st)
    if bad:
        raise _SemanticConfigError(bad)
    params = ModelParams(
        plus=EnvParams(**st["envs"]["plus"]),
        minus=EnvParams(**st["envs"]["minus"]),
        N=st["n"],
        rates=SwitchRates(alpha=st["alpha"], beta=st["beta"]),
    )
    return ScenarioConfig(
        params=params,
        start=st["start"],
        initial_env=EnvState.from_symbol(st["env_sym"]),
        horizon=st["horizon"],
        seed=st["seed"],
        analyses=st["analyses"],
        step=st["step"],
        sample_interval=st["sample_interval"],
        replicas=st["replicas"],
        output_dir=st["output_dir"],
        gamma_options=st["gamma"],
        stationary_options=st["stationary"],
        regions_options=st["regions"],
        diagnostics_options=st["diagnostics"],
    )


def serialize_config(cfg: ScenarioConfig) -> dict:
    """Canonical JSON-ready dict; parse_config(serialize_config(c)) == c."""
    p = cfg.params
    out = {
        "schema_version": SCHEMA_VERSION,
        "params": {
            "plus": {"a": p.plus.a, "b": p.plus.b, "c": p.plus.c},
            "minus": {"a": p.minus.a, "b": p.minus.b, "c": p.minus.c},
            "N": p.N,
            "rates": {"alpha": p.rates.alpha, "beta": p.rates.beta},
        },
        "start": {"s": cfg.start.s, "i": cfg.start.i},
        "initial_env": cfg.initial_env.symbol,
        "horizon": cfg.horizon,
        "step": cfg.step,
        "sample_interval": cfg.sample_interval,
        "seed": cfg.seed,
        "replicas": cfg.replicas,
        "analyses": list(cfg.analyses),
        "gamma_options": {
            "depth": cfg.gamma_options.depth,
            "times_per_level": cfg.gamma_options.times_per_level,
            "t_max": cfg.gamma_options.t_max,
            "tube_radius": cfg.gamma_options.tube_radius,
        },
        "stationary_options": {
            "bins_s": cfg.stationary_options.bins_s,
            "bins_i": cfg.stationary_options.bins_i,
            "burn_in": cfg.stationary_options.burn_in,
        },
        "regions_options": {
            "epsilon0": cfg.regions_options.epsilon0,
            "delta1": cfg.regions_options.delta1,
        },
        "diagnostics_options": {
            "starts": [[s, i] for s, i in cfg.diagnostics_options.starts],
            "checkpoints": list(cfg.diagnostics_options.checkpoints),
            "bins_s": cfg.diagnostics_options.bins_s,
            "bins_i": cfg.diagnostics_options.bins_i,
        },
    }
    if cfg.output_dir is not None:
        out["output_dir"] = cfg.output_dir
    return out


def validate(raw: dict) -> list[dict]:
    """Every violated precondition as {path, message}; empty iff run() would start."""
    try:
        st = _read_structure(raw)
    except ConfigParseError as exc:
        return [_diag("", str(exc))]

    bad_params = _param_value_paths(st)
    diags = [_diag(p, "value must be a finite number > 0") for p in bad_params]
    params: ModelParams | None = None
    if not bad_params:
        params = ModelParams(
            plus=EnvParams(**st["envs"]["plus"]),
            minus=EnvParams(**st["envs"]["minus"]),
            N=st["n"],
            rates=SwitchRates(alpha=st["alpha"], beta=st["beta"]),
        )

    n_val = st["n"]
    s, i = st["start"]
    if not (s > 0.0 and i > 0.0 and s + i < n_val):
        diags.append(_diag("start", "start must lie strictly inside the triangle"))
    if not (math.isfinite(st["horizon"]) and st["horizon"] > 0.0):
        diags.append(_diag("horizon", "horizon must be finite and > 0"))
    if not (math.isfinite(st["step"]) and st["step"] > 0.0):
        diags.append(_diag("step", "step must be finite and > 0"))
    if not (math.isfinite(st["sample_interval"]) and st["sample_interval"] > 0.0):
        diags.append(_diag("sample_interval", "sample_interval must be finite and > 0"))
    if st["replicas"] < 1:
        diags.append(_diag("replicas", "replicas must be >= 1"))
    gamma_opts = st["gamma"]
    if gamma_opts.depth < 0:
        diags.append(_diag("gamma_options.depth", "depth must be >= 0"))
    if gamma_opts.times_per_level < 1:
        diags.append(_diag("gamma_options.times_per_level", "must be >= 1"))
    if gamma_opts.t_max < limitset.T_MIN:
        diags.append(_diag("gamma_options.t_max", f"must be >= {limitset.T_MIN}"))
    if gamma_opts.tube_radius <= 0.0:
        diags.append(_diag("gamma_options.tube_radius", "must be > 0"))
    for name in ("bins_s", "bins_i"):
        if getattr(st["stationary"], name) < 1:
            diags.append(_diag(f"stationary_options.{name}", "must be >= 1"))
        if getattr(st["diagnostics"], name) < 1:
            diags.append(_diag(f"diagnostics_options.{name}", "must be >= 1"))
    if st["regions"].epsilon0 is not None and st["regions"].epsilon0 <= 0.0:
        diags.append(_diag("regions_options.epsilon0", "must be > 0 when set"))
    if st["regions"].delta1 is not None and st["regions"].delta1 <= 0.0:
        diags.append(_diag("regions_options.delta1", "must be > 0 when set"))

    valid_horizon = math.isfinite(st["horizon"]) and st["horizon"] > 0.0
    if "stationary" in st["analyses"]:
        burn = st["stationary"].burn_in
        if burn is not None and burn < 0.0:
            diags.append(_diag("stationary_options.burn_in", "must be >= 0 when set"))
        elif valid_horizon and params is not None:
            if burn is None:
                burn = default_burn_in(params, st["horizon"])
            if burn >= st["horizon"]:
                diags.append(
                    _diag(
                        "stationary_options.burn_in",
                        f"burn-in {burn} must stay below the horizon {st['horizon']}",
                    )
                )
    if "diagnostics" in st["analyses"]:
        opts = st["diagnostics"]
        if len(opts.starts) < 2:
            diags.append(_diag("diagnostics_options.starts", "need at least two starts"))
        for idx, (ds, di) in enumerate(opts.starts):
            if not (ds > 0.0 and di > 0.0 and ds + di < n_val):
                diags.append(
                    _diag(
                        f"diagnostics_options.starts[{idx}]",
                        "start must lie strictly inside the triangle",
                    )
                )
        if not opts.checkpoints:
            diags.append(_diag("diagnostics_options.checkpoints", "need at least one"))
        elif valid_horizon:
            for idx, c in enumerate(opts.checkpoints):
                if not 0.0 < c <= st["horizon"]:
                    diags.append(
                        _diag(
                            f"diagnostics_options.checkpoints[{idx}]",
                            "checkpoints must be positive and within the horizon",
                        )
                    )
                elif params is not None and default_burn_in(params, c) >= c:
                    diags.append(
                        _diag(
                            f"diagnostics_options.checkpoints[{idx}]",
                            f"checkpoint {c} is shorter than its burn-in",
                        )
                    )
    if not diags and params is not None:
        try:
            classify(params)
        except UnresolvedThresholdError as exc:
            diags.append(_diag("params", str(exc)))
    return diags


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    return obj


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2)
        fh.write("\n")


def _write_trajectory_csv(traj, path: Path) -> None:
    is_switch = np.zeros(traj.n_samples, dtype=np.int8)
    is_switch[traj.switch_indices] = 1
    N = traj.params.N
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,env,S,I,R,is_switch\n")
        t = traj.sample_times
        st = traj.states
        pts = traj.points
        for k in range(traj.n_samples):
            s_val = pts[k, 0]
            i_val = pts[k, 1]
            sym = "+" if st[k] == 0 else "-"
            fh.write(
                f"{t[k]:.17g},{sym},{s_val:.17g},{i_val:.17g},"
                f"{N - s_val - i_val:.17g},{is_switch[k]}\n"
            )


def _write_regions_csv(regions: dict, path: Path) -> None:
    # combined export: one leading name column ahead of the s,i polylines
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("region,s,i\n")
        for name, region in regions.items():
            for s, i in region.boundary:
                fh.write(f"{name},{s:.17g},{i:.17g}\n")


def _region_summary(region: geometry.Region) -> dict:
    md = {k: v for k, v in region.metadata.items()}
    return {"kind": region.kind.value, "vertices": region.boundary.shape[0], **md}


def _tail_stats(traj, window: float) -> dict:
    t = traj.sample_times
    tail = t >= t[-1] - window
    return {
        "window": window,
        "i_min": float(traj.I[tail].min()),
        "i_max": float(traj.I[tail].max()),
        "s_min": float(traj.S[tail].min()),
        "s_max": float(traj.S[tail].max()),
        "final": {"t": float(t[-1]), "s": float(traj.S[-1]), "i": float(traj.I[-1])},
    }


def run_scenario(cfg: ScenarioConfig, out_dir: Path) -> dict:
    """Execute the requested analyses in dependency order and write artifacts.

    Returns the summary dict (also written to summary.json). Raises domain
    errors; exit-code mapping happens in the CLI wrapper.
    """
    problems = validate(serialize_config(cfg))
    if problems:
        raise InvalidParameterError(
            "; ".join(f"{d['path']}: {d['message']}" for d in problems)
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    params = cfg.params
    report = classify(params)
    p_stat, q_stat = stationary_probabilities(params.rates)
    summary: dict = {
        "schema_version": SCHEMA_VERSION,
        "backend": active_backend(),
        "config": serialize_config(cfg),
        "classification": {
            "lambda": report.lambda_value,
            "r0_plus": report.r0_plus,
            "r0_minus": report.r0_minus,
            "classification": report.classification.value,
            "predicted_limit": None
            if report.predicted_limit is None
            else [report.predicted_limit.s, report.predicted_limit.i],
            "stationary_probabilities": [p_stat, q_stat],
            "relabeled": params.relabeled,
        },
        "artifacts": {},
        "skipped": {},
    }
    lam = report.lambda_value

    trajectories = []
    if "simulate" in cfg.analyses or "stationary" in cfg.analyses:
        for r in range(cfg.replicas):
            trajectories.append(
                simulate(
                    params, cfg.start, cfg.initial_env, cfg.horizon,
                    step=cfg.step, sample_interval=cfg.sample_interval,
                    seed=cfg.seed, replica=r,
                )
            )

    if "simulate" in cfg.analyses:
        replicas_summary = []
        for r, traj in enumerate(trajectories):
            name = f"trajectory_{r}.csv"
            _write_trajectory_csv(traj, out_dir / name)
            window = min(100.0 * params.rates.mean_holding_time(), cfg.horizon / 2.0)
            entry = {
                "replica": r,
                "seed": cfg.seed,
                "n_samples": traj.n_samples,
                "n_switches": int(traj.switch_indices.size),
                "tail": _tail_stats(traj, window),
                "file": name,
            }
            try:
                entry["verdict"] = persistence_verdict(traj).value
            except InvalidParameterError as exc:
                entry["verdict"] = None
                entry["verdict_note"] = str(exc)
            replicas_summary.append(entry)
        summary["replicas"] = replicas_summary
        summary["artifacts"]["trajectories"] = [e["file"] for e in replicas_summary]

    if "regions" in cfg.analyses:
        regions: dict = {}
        region_info: dict = {}
        try:
            quad = geometry.quadrangle_abcd(params)
            regions["quadrangle_abcd"] = quad
            region_info["quadrangle_abcd"] = _region_summary(quad)
        except NotApplicableError as exc:
            region_info["quadrangle_abcd"] = {"skipped": str(exc)}
        try:
            reg_g = geometry.region_g(params, epsilon0=cfg.regions_options.epsilon0)
            regions["region_g"] = reg_g
            region_info["region_g"] = _region_summary(reg_g)
        except NotApplicableError as exc:
            region_info["region_g"] = {"skipped": str(exc)}
        try:
            reg_k = geometry.region_k(
                params, delta1=cfg.regions_options.delta1, step=cfg.step
            )
            regions["region_k"] = reg_k
            region_info["region_k"] = _region_summary(reg_k)
        except NotApplicableError as exc:
            region_info["region_k"] = {"skipped": str(exc)}
        if regions:
            _write_regions_csv(regions, out_dir / "regions.csv")
            summary["artifacts"]["regions"] = "regions.csv"
        summary["regions"] = region_info

    if "gamma" in cfg.analyses:
        if lam <= 0.0:
            summary["skipped"]["gamma"] = (
                f"threshold {lam} is not positive: the attractor cloud is undefined"
            )
        else:
            g = cfg.gamma_options
            cloud = limitset.attractor_cloud(
                params, depth=g.depth, times_per_level=g.times_per_level,
                t_max=g.t_max, step=cfg.step,
            )
            limitset.write_cloud_csv(cloud, out_dir / "gamma.csv")
            gamma_summary = {
                "points": cloud.size,
                "depth": cloud.generation_depth,
                "times_per_level": g.times_per_level,
                "t_max": g.t_max,
                "file": "gamma.csv",
            }
            if trajectories:
                t_abs = limitset.absorption_time(trajectories[0], cloud, g.tube_radius)
                gamma_summary["absorption"] = {
                    "tube_radius": g.tube_radius,
                    "absorbed": t_abs is not None,
                    "time": t_abs,
                }
            summary["gamma"] = gamma_summary
            summary["artifacts"]["gamma"] = "gamma.csv"

    if "stationary" in cfg.analyses:
        if lam <= 0.0:
            summary["skipped"]["stationary"] = (
                f"threshold {lam} is not positive: no interior stationary law to estimate"
            )
        else:
            so = cfg.stationary_options
            burn = so.burn_in
            if burn is None:
                burn = default_burn_in(params, cfg.horizon)
            hists = [
                stationary.occupation_histogram(tr, burn, so.bins_s, so.bins_i)
                for tr in trajectories
            ]
            merged = stationary.merge_histograms(hists)
            stationary.write_histogram_csv(merged, out_dir / "histogram.csv")
            margin = 1e-2 * params.N
            env_marg = merged.env_marginal()
            mean_i = float(
                sum(
                    np.trapezoid(tr.I[tr.sample_times >= burn],
                                 tr.sample_times[tr.sample_times >= burn])
                    / (tr.sample_times[-1] - burn)
                    for tr in trajectories
                )
                / len(trajectories)
            )
            summary["stationary"] = {
                "burn_in": burn,
                "bins": [so.bins_s, so.bins_i],
                "total_time": merged.total_time,
                "env_marginal": list(env_marg),
                "boundary_mass": stationary.boundary_mass(merged, margin),
                "boundary_margin": margin,
                "mean_infected": mean_i,
                "file": "histogram.csv",
            }
            summary["artifacts"]["histogram"] = "histogram.csv"

    if "diagnostics" in cfg.analyses:
        do = cfg.diagnostics_options
        try:
            table = stationary.convergence_diagnostic(
                params,
                [Point(*st) for st in do.starts],
                cfg.horizon,
                list(do.checkpoints),
                seed_base=cfg.seed,
                bins_s=do.bins_s,
                bins_i=do.bins_i,
                initial_env=cfg.initial_env,
                step=cfg.step,
                sample_interval=cfg.sample_interval,
            )
            summary["diagnostics"] = {
                "checkpoints": table.checkpoints.tolist(),
                "pairs": [list(p) for p in table.pairs],
                "tv": table.tv.tolist(),
                "monotone_trend": table.monotone_trend,
            }
        except NotApplicableError as exc:
            summary["skipped"]["diagnostics"] = str(exc)

    summary["artifacts"]["summary"] = "summary.json"
    _write_json(out_dir / "summary.json", summary)
    return summary


def _resolve_out_dir(explicit: str | None, cfg: ScenarioConfig) -> Path:
    if explicit:
        return Path(explicit)
    if cfg.output_dir:
        return Path(cfg.output_dir)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env)
    return Path("sirswitch_out")


def _apply_overrides(raw: dict, args) -> dict:
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.horizon is not None:
        raw["horizon"] = args.horizon
    if args.replicas is not None:
        raw["replicas"] = args.replicas
    return raw


def _emit_error(kind: str, message: str, diagnostics: list | None = None) -> None:
    payload = {"error": {"type": kind, "message": message}}
    if diagnostics:
        payload["error"]["diagnostics"] = diagnostics
    print(json.dumps(_jsonable(payload), indent=2))


def _load_raw(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _run_from_raw(raw: dict, out_flag: str | None) -> int:
    try:
        cfg = parse_config(raw)
    except _SemanticConfigError as exc:
        _emit_error(
            "precondition", str(exc),
            [_diag(p, "value must be a finite number > 0") for p in exc.paths],
        )
        return EXIT_PRECONDITION
    except ConfigParseError as exc:
        _emit_error("parse", str(exc))
        return EXIT_PARSE
    problems = validate(raw)
    if problems:
        _emit_error("precondition", "config violates preconditions", problems)
        return EXIT_PRECONDITION
    out_dir = _resolve_out_dir(out_flag, cfg)
    try:
        summary = run_scenario(cfg, out_dir)
    except (InvalidParameterError, NotApplicableError, UnresolvedThresholdError) as exc:
        _emit_error("precondition", str(exc))
        return EXIT_PRECONDITION
    except NumericalInstabilityError as exc:
        _emit_error("instability", str(exc))
        return EXIT_INSTABILITY
    print(
        json.dumps(
            _jsonable(
                {
                    "output_dir": str(out_dir),
                    "classification": summary["classification"]["classification"],
                    "lambda": summary["classification"]["lambda"],
                    "artifacts": summary["artifacts"],
                    "skipped": summary["skipped"],
                }
            ),
            indent=2,
        )
    )
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        raw = _load_raw(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        _emit_error("parse", f"cannot read config {args.config}: {exc}")
        return EXIT_PARSE
    if not isinstance(raw, dict):
        _emit_error("parse", "config root must be a JSON object")
        return EXIT_PARSE
    return _run_from_raw(_apply_overrides(raw, args), args.out)


def cmd_validate(args) -> int:
    try:
        raw = _load_raw(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        _emit_error("parse", f"cannot read config {args.config}: {exc}")
        return EXIT_PARSE
    if not isinstance(raw, dict):
        _emit_error("parse", "config root must be a JSON object")
        return EXIT_PARSE
    print(json.dumps(_jsonable(validate(raw)), indent=2))
    return EXIT_OK


def cmd_preset(args) -> int:
    try:
        raw = preset_config(args.name)
    except KeyError as exc:
        _emit_error("parse", str(exc))
        return EXIT_PARSE
    raw = _apply_overrides(raw, args)
    out_dir = Path(args.out) if args.out else _resolve_out_dir(None, parse_config(raw))
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "config.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(raw), fh, indent=2)
        fh.write("\n")
    return _run_from_raw(raw, str(out_dir))


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sirswitch",
        description="SIRS epidemics under two-state random switching: "
        "simulation and analysis scenarios",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario config")
    run_p.add_argument("config", help="path to a scenario config JSON file")
    validate_p = sub.add_parser("validate", help="report config precondition violations")
    validate_p.add_argument("config", help="path to a scenario config JSON file")
    preset_p = sub.add_parser("preset", help="write and run a named example scenario")
    preset_p.add_argument("name", choices=PRESET_NAMES)

    for p in (run_p, preset_p):
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument(
            "--horizon", type=float, default=None, help="override the config horizon"
        )
        p.add_argument(
            "--replicas", type=int, default=None, help="override the config replica count"
        )
        p.add_argument("--out", default=None, help="output directory")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "validate":
            return cmd_validate(args)
        return cmd_preset(args)
    except Exception as exc:  # last-resort guard so the CLI always reports JSON
        _emit_error("internal", f"{type(exc).__name__}: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

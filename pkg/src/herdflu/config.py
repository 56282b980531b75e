"""Flat key = value run configuration.

One assignment per line, `#` starts a comment, blank lines are ignored.
Every key is optional; omitted keys fall back to the baseline scenario.
Keys:

    model parameters   lambda mu beta_s beta_a beta_b k sigma nu gamma
                       delta d omega_s omega_a epsilon
    noise intensities  sig_s sig_e sig_is sig_ia sig_b
    initial state      s0 e0 is0 ia0 r0 b0
    time grid          t_end dt
    ensemble           n_paths seed

Unknown keys, duplicates and malformed numbers are rejected with the
offending line number. Values must be finite; n_paths and seed must be
integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .integrate import SimConfig
from .model import (
    BASELINE_PARAMS,
    DEFAULT_NOISE,
    NOISE_KEYS,
    PARAM_KEYS,
    HerdState,
    ModelParams,
    NoiseIntensities,
)
from .sensitivity import ParamRanges

DEFAULT_N_PATHS = 100
DEFAULT_SEED = 0

_INIT_KEYS = ("s0", "e0", "is0", "ia0", "r0", "b0")
_SIM_KEYS = ("t_end", "dt")
_INT_KEYS = ("n_paths", "seed")

CONFIG_KEYS = (
    tuple(PARAM_KEYS) + tuple(NOISE_KEYS) + _INIT_KEYS + _SIM_KEYS + _INT_KEYS
)


class ConfigError(ValueError):
    """Malformed or inconsistent configuration text."""


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs."""

    params: ModelParams
    noise: NoiseIntensities
    init: HerdState
    sim: SimConfig
    n_paths: int
    seed: int


def _parse_assignments(
    text: str, allowed: tuple[str, ...], n_values: int = 1
) -> dict[str, tuple[list[str], int]]:
    """Shared line parser: {key: (value tokens, line number)}."""
    seen: dict[str, tuple[list[str], int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, rhs = line.partition("=")
        key = key.strip()
        tokens = rhs.replace(",", " ").split()
        if key not in allowed:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} (first set on line "
                f"{seen[key][1]})"
            )
        if len(tokens) != n_values:
            raise ConfigError(
                f"line {lineno}: {key!r} expects {n_values} value(s), "
                f"got {len(tokens)}"
            )
        seen[key] = (tokens, lineno)
    return seen


def _float(key: str, token: str, lineno: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ConfigError(
            f"line {lineno}: value for {key!r} is not a number: {token!r}"
        ) from None
    if not math.isfinite(v):
        raise ConfigError(f"line {lineno}: value for {key!r} must be finite")
    return v


def _int(key: str, token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ConfigError(
            f"line {lineno}: value for {key!r} is not an integer: {token!r}"
        ) from None


def parse_config(text: str) -> RunConfig:
    """Parse configuration text into a validated RunConfig.

    Field-level invariant violations (negative rates, dt > t_end, ...)
    are reported against the line that set the offending key.
    """
    seen = _parse_assignments(text, CONFIG_KEYS)
    values: dict[str, float | int] = {}
    lines: dict[str, int] = {}
    for key, (tokens, lineno) in seen.items():
        if key in _INT_KEYS:
            values[key] = _int(key, tokens[0], lineno)
        else:
            values[key] = _float(key, tokens[0], lineno)
        lines[key] = lineno

    def build(factory, kwargs, involved):
        try:
            return factory(**kwargs)
        except ValueError as exc:
            at = [f"{k} (line {lines[k]})" for k in involved if k in lines]
            where = f" [set via {', '.join(at)}]" if at else ""
            raise ConfigError(f"{exc}{where}") from None

    p_kw = {
        field: values.get(key, getattr(BASELINE_PARAMS, field))
        for key, field in PARAM_KEYS.items()
    }
    params = build(ModelParams, p_kw, tuple(PARAM_KEYS))

    n_kw = {
        field: values.get(key, getattr(DEFAULT_NOISE, field))
        for key, field in NOISE_KEYS.items()
    }
    noise = build(NoiseIntensities, n_kw, tuple(NOISE_KEYS))

    init_defaults = {
        "s0": params.lambda_recruit / params.mu - 1.0,
        "e0": 1.0,
        "is0": 0.0,
        "ia0": 0.0,
        "r0": 0.0,
        "b0": 0.0,
    }
    i_kw = dict(
        zip(
            ("s", "e", "i_s", "i_a", "r", "b"),
            (values.get(k, init_defaults[k]) for k in _INIT_KEYS),
        )
    )
    init = build(HerdState, i_kw, _INIT_KEYS)

    s_kw = {
        "t_end": values.get("t_end", 500.0),
        "dt": values.get("dt", 0.01),
    }
    sim = build(SimConfig, s_kw, _SIM_KEYS)

    n_paths = int(values.get("n_paths", DEFAULT_N_PATHS))
    if n_paths < 1:
        raise ConfigError(
            f"n_paths must be >= 1, got {n_paths} (line {lines.get('n_paths', '?')})"
        )
    seed = int(values.get("seed", DEFAULT_SEED))
    if not 0 <= seed < 2 ** 64:
        raise ConfigError(
            f"seed must lie in [0, 2**64), got {seed} (line {lines.get('seed', '?')})"
        )
    return RunConfig(
        params=params, noise=noise, init=init, sim=sim, n_paths=n_paths, seed=seed
    )


def load_config(path: str | None) -> RunConfig:
    """RunConfig from a file, or all defaults when `path` is None."""
    if path is None:
        return parse_config("")
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def parse_ranges(text: str) -> ParamRanges:
    """Parse `key = low high` lines into ParamRanges for sensitivity runs."""
    seen = _parse_assignments(text, tuple(PARAM_KEYS), n_values=2)
    bounds = {}
    for key, (tokens, lineno) in seen.items():
        lo = _float(key, tokens[0], lineno)
        hi = _float(key, tokens[1], lineno)
        try:
            ParamRanges({key: (lo, hi)})
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        bounds[key] = (lo, hi)
    if not bounds:
        raise ConfigError("ranges file defines no parameters")
    return ParamRanges(bounds)

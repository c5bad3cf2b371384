"""Configuration documents for the command-line tools.

The format is flat ``key = value`` lines; ``#`` starts a comment and blank
lines are ignored.  Unknown keys, duplicate keys, type mismatches and
invariant violations are all reported with the offending key and line.  A
document containing ``axis1_*``/``axis2_*`` keys describes a sweep,
otherwise a single run.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, fields
from typing import TextIO

from .engine import InitialStateSpec, ModelParams, Strategy
from .sweep import PARAM_AXES, SweepAxis, SweepSpec
from .syncmetrics import WindowSpec

__all__ = ["ConfigError", "RunConfig", "SweepConfig", "parse_config", "format_config"]


class ConfigError(ValueError):
    """Malformed or invalid configuration document."""


_RUN_FLOAT_KEYS = ("g_se", "g_ss", "omega1", "omega2", "dt_s", "temp1", "temp2")
_ANGLE_KEYS = ("theta1", "phi1", "theta2", "phi2")
_RUN_INT_KEYS = ("n_collisions", "window_width", "window_overlap")
_AXIS_KEYS = tuple(
    f"{block}_{part}" for block in ("axis1", "axis2") for part in ("name", "min", "max", "count")
)
_RUN_KEYS = frozenset(
    _RUN_FLOAT_KEYS
    + _ANGLE_KEYS
    + _RUN_INT_KEYS
    + ("gamma", "gamma_frac", "strategy", "observable_axis", "output_dir", "temp_pairs")
)
_SWEEP_KEYS = _RUN_KEYS.union(_AXIS_KEYS) - {"temp_pairs"}

_ANGLE_DEFAULTS = {
    "theta1": math.pi / 4,
    "phi1": 0.0,
    "theta2": math.pi / 4,
    "phi2": 0.0,
}


@dataclass(frozen=True)
class RunConfig:
    """One trajectory run: model parameters, initial state, window, output."""

    g_se: float
    g_ss: float
    omega1: float
    omega2: float
    dt_s: float
    gamma: float
    temp1: float
    temp2: float
    strategy: Strategy
    n_collisions: int
    window_width: int
    window_overlap: int
    theta1: float = _ANGLE_DEFAULTS["theta1"]
    phi1: float = 0.0
    theta2: float = _ANGLE_DEFAULTS["theta2"]
    phi2: float = 0.0
    observable_axis: str = "x"
    output_dir: str = "."
    temp_pairs: tuple[tuple[float, float], ...] | None = None

    def model_params(self) -> ModelParams:
        return ModelParams(
            g_se=self.g_se,
            g_ss=self.g_ss,
            omega1=self.omega1,
            omega2=self.omega2,
            dt_s=self.dt_s,
            gamma=self.gamma,
            temp1=self.temp1,
            temp2=self.temp2,
            strategy=self.strategy,
        )

    def initial_state(self) -> InitialStateSpec:
        return InitialStateSpec(
            theta1=self.theta1, phi1=self.phi1, theta2=self.theta2, phi2=self.phi2
        )

    def window(self) -> WindowSpec:
        return WindowSpec(width=self.window_width, overlap=self.window_overlap)


@dataclass(frozen=True)
class SweepConfig:
    """A run configuration plus the two grid axes."""

    base: RunConfig
    axis1: SweepAxis
    axis2: SweepAxis

    def sweep_spec(self) -> SweepSpec:
        return SweepSpec(
            axis1=self.axis1,
            axis2=self.axis2,
            base=self.base.model_params(),
            init=self.base.initial_state(),
            n_max=self.base.n_collisions,
            window=self.base.window(),
        )


def _tokenize(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: missing key before '='")
        if not value:
            raise ConfigError(f"line {lineno}: key {key!r} has no value")
        if key in entries:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} (first seen on line {entries[key][1]})"
            )
        entries[key] = (value, lineno)
    return entries


class _Extractor:
    def __init__(self, entries: dict[str, tuple[str, int]], diag: TextIO) -> None:
        self.entries = dict(entries)
        self.diag = diag

    def pop_raw(self, key: str) -> tuple[str, int] | None:
        return self.entries.pop(key, None)

    def _convert(self, key: str, kind: str):
        found = self.pop_raw(key)
        if found is None:
            return None
        value, lineno = found
        try:
            if kind == "float":
                return float(value)
            if kind == "int":
                return int(value)
        except ValueError:
            raise ConfigError(
                f"line {lineno}: key {key!r} expects a{'n integer' if kind == 'int' else ' number'},"
                f" got {value!r}"
            ) from None
        return value

    def require(self, key: str, kind: str):
        out = self._convert(key, kind)
        if out is None:
            raise ConfigError(f"missing required key {key!r}")
        return out

    def optional(self, key: str, kind: str, default):
        out = self._convert(key, kind)
        if out is None:
            print(f"applied default: {key} = {default}", file=self.diag)
            return default
        return out


def _parse_strategy(value: str, lineno: int) -> Strategy:
    try:
        return Strategy(value.lower())
    except ValueError:
        raise ConfigError(
            f"line {lineno}: strategy must be 'keep' or 'erase', got {value!r}"
        ) from None


def _parse_temp_pairs(value: str, lineno: int) -> tuple[tuple[float, float], ...]:
    pairs = []
    for chunk in value.split(";"):
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 2:
            raise ConfigError(
                f"line {lineno}: temp_pairs entries must be 'T1,T2' separated by ';', got {chunk.strip()!r}"
            )
        try:
            t1, t2 = float(parts[0]), float(parts[1])
        except ValueError:
            raise ConfigError(
                f"line {lineno}: temp_pairs entry {chunk.strip()!r} is not a pair of numbers"
            ) from None
        if t1 < 0 or t2 < 0:
            raise ConfigError(f"line {lineno}: temperatures must be non-negative")
        pairs.append((t1, t2))
    return tuple(pairs)


def _extract_gamma(ex: _Extractor) -> float:
    gamma = ex.pop_raw("gamma")
    frac = ex.pop_raw("gamma_frac")
    if gamma is not None and frac is not None:
        raise ConfigError(
            f"line {frac[1]}: give either 'gamma' (radians) or 'gamma_frac' "
            "(multiples of pi/2), not both"
        )
    if gamma is not None:
        value, lineno = gamma
        try:
            out = float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: key 'gamma' expects a number, got {value!r}") from None
    elif frac is not None:
        value, lineno = frac
        try:
            out = float(value) * math.pi / 2
        except ValueError:
            raise ConfigError(
                f"line {lineno}: key 'gamma_frac' expects a number, got {value!r}"
            ) from None
    else:
        raise ConfigError("missing required key 'gamma' (or 'gamma_frac')")
    if not 0.0 <= out <= math.pi / 2:
        raise ConfigError(f"line {lineno}: gamma must lie in [0, pi/2], got {out}")
    return out


def _extract_axis(ex: _Extractor, block: str, lines: dict[str, int]) -> SweepAxis:
    raw_name = ex.pop_raw(f"{block}_name")
    if raw_name is None:
        raise ConfigError(f"missing required key '{block}_name'")
    name, name_line = raw_name
    if name not in PARAM_AXES:
        raise ConfigError(
            f"line {name_line}: {block}_name must be one of {PARAM_AXES}, got {name!r}"
        )
    lo = ex.require(f"{block}_min", "float")
    hi = ex.require(f"{block}_max", "float")
    count_line = lines.get(f"{block}_count", 0)
    count = ex.require(f"{block}_count", "int")
    if count < 1:
        raise ConfigError(f"line {count_line}: {block}_count must be at least 1, got {count}")
    return SweepAxis(name=name, start=lo, stop=hi, count=count)


def parse_config(text: str, diag: TextIO | None = None) -> RunConfig | SweepConfig:
    """Parse a configuration document into a run or sweep configuration.

    Applied defaults are echoed to ``diag`` (stderr unless given).
    """
    diag = sys.stderr if diag is None else diag
    entries = _tokenize(text)
    is_sweep = any(k in entries for k in _AXIS_KEYS)
    known = _SWEEP_KEYS if is_sweep else _RUN_KEYS
    for key, (_, lineno) in entries.items():
        if key not in known:
            kind = "sweep" if is_sweep else "run"
            raise ConfigError(f"line {lineno}: unknown key {key!r} for a {kind} configuration")
    lines = {key: lineno for key, (_, lineno) in entries.items()}
    ex = _Extractor(entries, diag)

    gamma = _extract_gamma(ex)
    floats = {key: ex.require(key, "float") for key in _RUN_FLOAT_KEYS}
    ints = {key: ex.require(key, "int") for key in _RUN_INT_KEYS}
    strategy_raw = ex.pop_raw("strategy")
    if strategy_raw is None:
        raise ConfigError("missing required key 'strategy'")
    strategy = _parse_strategy(*strategy_raw)
    angles = {key: ex.optional(key, "float", _ANGLE_DEFAULTS[key]) for key in _ANGLE_KEYS}
    axis = ex.optional("observable_axis", "str", "x")
    if axis not in ("x", "y", "z"):
        raise ConfigError(
            f"line {lines.get('observable_axis', 0)}: observable_axis must be x, y or z, got {axis!r}"
        )
    output_dir = ex.optional("output_dir", "str", ".")
    temp_pairs = None
    raw_pairs = ex.pop_raw("temp_pairs")
    if raw_pairs is not None:
        temp_pairs = _parse_temp_pairs(*raw_pairs)

    if floats["dt_s"] <= 0:
        raise ConfigError(f"line {lines['dt_s']}: dt_s must be positive, got {floats['dt_s']}")
    for key in ("temp1", "temp2"):
        if floats[key] < 0:
            raise ConfigError(f"line {lines[key]}: {key} must be non-negative")
    if ints["n_collisions"] < 1:
        raise ConfigError(f"line {lines['n_collisions']}: n_collisions must be at least 1")
    try:
        WindowSpec(width=ints["window_width"], overlap=ints["window_overlap"])
    except ValueError as exc:
        raise ConfigError(f"line {lines['window_overlap']}: {exc}") from None
    if ints["n_collisions"] < ints["window_width"]:
        raise ConfigError(
            f"line {lines['window_width']}: window_width exceeds n_collisions "
            f"({ints['window_width']} > {ints['n_collisions']})"
        )

    run = RunConfig(
        gamma=gamma,
        strategy=strategy,
        observable_axis=axis,
        output_dir=output_dir,
        temp_pairs=temp_pairs,
        **floats,
        **ints,
        **angles,
    )
    if not is_sweep:
        return run

    if axis != "x":
        raise ConfigError(
            f"line {lines['observable_axis']}: sweeps correlate the x-axis "
            "expectations; observable_axis must be x"
        )
    axis1 = _extract_axis(ex, "axis1", lines)
    axis2 = _extract_axis(ex, "axis2", lines)
    if axis1.name == axis2.name:
        raise ConfigError(
            f"line {lines['axis2_name']}: axis names must differ, both are {axis1.name!r}"
        )
    return SweepConfig(base=run, axis1=axis1, axis2=axis2)


def _fmt_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(config: RunConfig | SweepConfig) -> str:
    """Serialize a configuration; re-parsing the text yields an equal config."""
    run = config.base if isinstance(config, SweepConfig) else config
    lines = []
    for f in fields(RunConfig):
        value = getattr(run, f.name)
        if f.name == "strategy":
            lines.append(f"strategy = {value.value}")
        elif f.name == "temp_pairs":
            if value is not None:
                body = "; ".join(f"{_fmt_value(t1)},{_fmt_value(t2)}" for t1, t2 in value)
                lines.append(f"temp_pairs = {body}")
        else:
            lines.append(f"{f.name} = {_fmt_value(value)}")
    if isinstance(config, SweepConfig):
        for block, ax in (("axis1", config.axis1), ("axis2", config.axis2)):
            lines.append(f"{block}_name = {ax.name}")
            lines.append(f"{block}_min = {_fmt_value(ax.start)}")
            lines.append(f"{block}_max = {_fmt_value(ax.stop)}")
            lines.append(f"{block}_count = {ax.count}")
    return "\n".join(lines) + "\n"

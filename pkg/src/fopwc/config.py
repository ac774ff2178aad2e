"""Run configuration shared by the CLI subcommands.

A config file is flat INI text with a single ``[run]`` section whose keys
are the field names below, e.g.::

    [run]
    b = 1.25
    q = 0.98
    h = 0.002
    t_end = 100
    x0 = 1, 2, 0, 0.1
    variant = la
    epsilon = 1e-6

Command-line flags override file values.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import regularize as reg
from .sprott import DEFAULT_X0, RhsVariant, SystemParams

__all__ = ["RunConfig", "ConfigError", "load_config_file", "parse_x0"]


class ConfigError(ValueError):
    pass


def parse_x0(text) -> tuple:
    if isinstance(text, (tuple, list)):
        vals = [float(v) for v in text]
    else:
        vals = [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]
    if len(vals) != 4:
        raise ConfigError(f"x0 needs 4 comma-separated numbers, got {text!r}")
    return tuple(vals)


@dataclass
class RunConfig:
    a: float = 1.0
    b: float = 1.25
    q: float = 0.98
    h: float = 0.002
    t_end: float = 100.0
    x0: tuple = DEFAULT_X0
    variant: str = "la"
    delta: float = 1e-6
    epsilon: float = 1e-6
    abs_epsilon: Optional[float] = None
    corrector_iters: int = 1
    renorm_interval: int = 10
    transient_fraction: float = 0.8
    out: Optional[str] = None
    format: str = "csv"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        try:
            self.params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        self.x0 = parse_x0(self.x0)
        if not self.h > 0:
            raise ConfigError("h must be positive")
        if not self.t_end > 0:
            raise ConfigError("t_end must be positive")
        if self.h > self.t_end:
            raise ConfigError("h must not exceed t_end")
        if self.variant not in ("wa", "ga", "la"):
            raise ConfigError(f"variant must be wa, ga or la, got {self.variant!r}")
        if not self.delta > 0 or not self.epsilon > 0:
            raise ConfigError("delta and epsilon must be positive")
        if self.abs_epsilon is not None and not self.abs_epsilon > 0:
            raise ConfigError("abs_epsilon must be positive")
        if self.corrector_iters < 1 or self.renorm_interval < 1:
            raise ConfigError("corrector_iters and renorm_interval must be >= 1")
        if not (0.0 <= self.transient_fraction < 1.0):
            raise ConfigError("transient_fraction must lie in [0, 1)")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")

    def params(self) -> SystemParams:
        return SystemParams(a=self.a, b=self.b, q=self.q)

    def rhs_variant(self) -> RhsVariant:
        mod = reg.Exact() if self.abs_epsilon is None else reg.Quadratic(self.abs_epsilon)
        if self.variant == "wa":
            return RhsVariant.wa(mod)
        if self.variant == "ga":
            return RhsVariant.ga(self.delta, mod)
        return RhsVariant.la(self.epsilon, mod)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["x0"] = list(self.x0)
        if not d["extra"]:
            d.pop("extra")
        return d

    @classmethod
    def from_sources(cls, file_values: dict, overrides: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)} - {"extra"}
        merged: dict = {}
        for src in (file_values, overrides):
            for k, v in src.items():
                if v is None:
                    continue
                if k not in names:
                    raise ConfigError(f"unknown config key {k!r}")
                merged[k] = v
        kinds = {f.name: f.type for f in dataclasses.fields(cls)}
        for k, v in list(merged.items()):
            merged[k] = _coerce(k, kinds[k], v)
        return cls(**merged)


def _coerce(name, kind, value):
    if name == "x0":
        return parse_x0(value)
    kind = str(kind)
    try:
        if "int" in kind:
            return int(value)
        if "float" in kind:
            return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {name}: {value!r}") from exc
    return str(value)


def load_config_file(path) -> dict:
    parser = configparser.ConfigParser()
    text = Path(path).read_text()
    parser.read_string(text)
    if not parser.has_section("run"):
        raise ConfigError(f"{path}: missing [run] section")
    return {k.replace("-", "_"): v for k, v in parser.items("run")}

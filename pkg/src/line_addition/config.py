"""Configuration files in the ``key:value`` format and their typed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Mapping

from .errors import ConfigError, MalformedLine, MissingKey, UnknownCostMode, UnknownKey


class Regression(str, Enum):
    """Functional form applied to (total cost, total efficiency)."""

    LINEAR_LINEAR = "linear-linear"
    LINEAR_LOG = "linear-log"
    LOG_LINEAR = "log-linear"
    LOG_LOG = "log-log"

    @property
    def cost_is_log(self) -> bool:
        return self.value.startswith("log")

    @property
    def efficiency_is_log(self) -> bool:
        return self.value.endswith("log")


class WeightMode(str, Enum):
    ADJUSTMENT = "adjustment"
    RAW = "raw"


def _real(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError("nan")
    return value


def _enum(kind: type[Enum]) -> Callable[[str], Enum]:
    def parse(text: str) -> Enum:
        return kind(text)

    return parse


def _string(text: str) -> str:
    if not text:
        raise ValueError("empty value")
    return text


def parse_kv_config(
    text: str,
    schema: Mapping[str, Callable[[str], Any]],
    optional: Mapping[str, Callable[[str], Any]] | None = None,
) -> dict[str, Any]:
    """Parse ``key:value`` lines against ``schema`` (required keys) and ``optional``.

    Blank lines are skipped and whitespace around keys and values is ignored.
    """
    optional = optional or {}
    result: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise MalformedLine(f"line {lineno}: expected key:value, got {raw!r}")
        parser = schema.get(key) or optional.get(key)
        if parser is None:
            raise UnknownKey(f"line {lineno}: unknown key {key!r}")
        if key in result:
            raise MalformedLine(f"line {lineno}: duplicate key {key!r}")
        try:
            result[key] = parser(value)
        except ValueError:
            raise MalformedLine(f"line {lineno}: bad value {value!r} for {key!r}") from None
    missing = [k for k in schema if k not in result]
    if missing:
        raise MissingKey(f"missing keys: {', '.join(missing)}")
    return result


CONSTRUCTION_KEYS: dict[str, Callable[[str], Any]] = {
    "p-max": _real,
    "max-length": _real,
    "min-length": _real,
    "corridor-height": _real,
    "demand-adjustment-weight": _real,
    "target-efficiency": _real,
}

EFFICIENCY_KEYS: dict[str, Callable[[str], Any]] = {
    "cost-mode": _string,
    "line-regression": _enum(Regression),
    "regression": _enum(Regression),
    "transfer-weight": _real,
    "station-weight": _real,
    "distance-weight": _real,
    "adjustment-weight": _real,
}

EFFICIENCY_OPTIONAL_KEYS: dict[str, Callable[[str], Any]] = {
    "efficiency-exponent": _real,
    "weight-mode": _enum(WeightMode),
    "unreachable-penalty": _real,
}


@dataclass(frozen=True)
class LineConstructionConfig:
    rho_max: float
    max_length: float
    min_length: float
    corridor_height: float
    demand_adjustment_weight: float
    target_efficiency: float

    def __post_init__(self) -> None:
        if not 0 < self.min_length <= self.max_length:
            raise ConfigError("need 0 < min-length <= max-length")
        if not self.rho_max > 1:
            raise ConfigError("p-max must exceed 1")
        if not self.corridor_height > 0:
            raise ConfigError("corridor-height must be positive")
        if not self.demand_adjustment_weight >= 0:
            raise ConfigError("demand-adjustment-weight must be non-negative")

    @classmethod
    def from_text(cls, text: str) -> LineConstructionConfig:
        v = parse_kv_config(text, CONSTRUCTION_KEYS)
        return cls(
            rho_max=v["p-max"],
            max_length=v["max-length"],
            min_length=v["min-length"],
            corridor_height=v["corridor-height"],
            demand_adjustment_weight=v["demand-adjustment-weight"],
            target_efficiency=v["target-efficiency"],
        )

    @classmethod
    def from_file(cls, path: str | Path) -> LineConstructionConfig:
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class EfficiencyConfig:
    """Path and network evaluation settings.

    The four weights hold the values as written in the config file. In the
    default ``adjustment`` mode each one is added to a baseline of 1.0, so a
    file value of -0.5 gives an effective weight of 0.5.
    """

    transfer_weight: float = 0.0
    station_weight: float = 0.0
    distance_weight: float = 0.0
    adjustment_weight: float = 0.0
    efficiency_exponent: float = 4.0
    cost_mode: str = "state-average-DC"
    regression: Regression = Regression.LINEAR_LINEAR
    line_regression: Regression = Regression.LINEAR_LINEAR
    weight_mode: WeightMode = WeightMode.ADJUSTMENT
    unreachable_penalty: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "regression", Regression(self.regression))
        object.__setattr__(self, "line_regression", Regression(self.line_regression))
        object.__setattr__(self, "weight_mode", WeightMode(self.weight_mode))
        for name in ("w_t", "w_s", "w_d"):
            if getattr(self, name) < 0:
                raise ConfigError(f"effective weight {name} is negative")
        if not self.w_a > 0:
            raise ConfigError("effective adjustment weight must be positive")
        if self.unreachable_penalty is not None and self.unreachable_penalty < 0:
            raise ConfigError("unreachable-penalty must be non-negative")

    def _effective(self, value: float) -> float:
        return value if self.weight_mode is WeightMode.RAW else 1.0 + value

    @property
    def w_t(self) -> float:
        return self._effective(self.transfer_weight)

    @property
    def w_s(self) -> float:
        return self._effective(self.station_weight)

    @property
    def w_d(self) -> float:
        return self._effective(self.distance_weight)

    @property
    def w_a(self) -> float:
        return self._effective(self.adjustment_weight)

    @classmethod
    def from_text(cls, text: str) -> EfficiencyConfig:
        v = parse_kv_config(text, EFFICIENCY_KEYS, EFFICIENCY_OPTIONAL_KEYS)
        return cls(
            transfer_weight=v["transfer-weight"],
            station_weight=v["station-weight"],
            distance_weight=v["distance-weight"],
            adjustment_weight=v["adjustment-weight"],
            efficiency_exponent=v.get("efficiency-exponent", 4.0),
            cost_mode=v["cost-mode"],
            regression=v["regression"],
            line_regression=v["line-regression"],
            weight_mode=v.get("weight-mode", WeightMode.ADJUSTMENT),
            unreachable_penalty=v.get("unreachable-penalty"),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> EfficiencyConfig:
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


class CostTable(dict):
    """Construction cost per mile (dollars) by cost-mode name."""

    def __init__(self, entries: Mapping[str, float] | None = None) -> None:
        super().__init__()
        for mode, value in (entries or {}).items():
            value = float(value)
            if not value > 0 or math.isinf(value):
                raise ConfigError(f"cost for {mode!r} must be positive and finite")
            self[mode] = value

    def per_mile(self, mode: str) -> float:
        try:
            return self[mode]
        except KeyError:
            raise UnknownCostMode(f"unknown cost mode {mode!r}") from None

    @classmethod
    def from_text(cls, text: str) -> CostTable:
        entries: dict[str, float] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            key, sep, value = line.partition(":")
            key = key.strip()
            if not sep or not key:
                raise MalformedLine(f"line {lineno}: expected key:value, got {raw!r}")
            try:
                entries[key] = _real(value.strip())
            except ValueError:
                raise MalformedLine(f"line {lineno}: bad cost {value.strip()!r}") from None
        return cls(entries)

    @classmethod
    def from_file(cls, path: str | Path) -> CostTable:
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

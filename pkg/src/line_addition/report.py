"""Plain-text run reports."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algorithm import RunResult
from .core import Network


def fmt(value: float) -> str:
    """Shortest text that reads back as exactly ``value``."""
    return repr(float(value))


@dataclass(frozen=True)
class RunReport:
    runtime_minutes: int
    old_efficiency: float
    new_efficiency: float
    line_stations: tuple[str, ...]
    runtime_seconds: float = 0.0

    @property
    def improvement(self) -> float:
        return self.new_efficiency - self.old_efficiency

    @property
    def percentage_improvement(self) -> float:
        return self.improvement / self.old_efficiency * 100

    @classmethod
    def from_result(cls, result: RunResult, net: Network) -> RunReport:
        return cls(
            runtime_minutes=int(result.runtime_seconds // 60),
            old_efficiency=result.old_efficiency,
            new_efficiency=result.new_efficiency,
            line_stations=tuple(net.station(s).name for s in result.line.stations),
            runtime_seconds=result.runtime_seconds,
        )


def line_rows(stations: Sequence[str]) -> list[str]:
    return [f"{a} -> {b}" for a, b in zip(stations, stations[1:])]


def metrics_block(report: RunReport) -> list[str]:
    return [
        f"Total algorithm runtime in minutes: {report.runtime_minutes}",
        f"Old network efficiency: {fmt(report.old_efficiency)}",
        f"New network efficiency: {fmt(report.new_efficiency)}",
        f"Improvement: {fmt(report.improvement)}",
        f"Percentage improvement: {fmt(report.percentage_improvement)}%",
    ]


def render(report: RunReport) -> str:
    return "\n".join(["Line:", *line_rows(report.line_stations), "", "Metrics:", *metrics_block(report)]) + "\n"

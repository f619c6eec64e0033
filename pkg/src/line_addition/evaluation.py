"""Efficiency arithmetic for paths, lines and whole networks.

Every quantity here is a cost-like measure: lower is better.
"""

from __future__ import annotations

import math
from typing import Iterable

from .config import CostTable, EfficiencyConfig, Regression
from .core import DemandMatrix, Line, Network, line_length
from .errors import DegenerateGeometry, DegeneratePath, NonPositiveLogOperand, UnreachablePair
from .pathfinder import Path, PathStrategy, Router


def construction_cost(r: Line, costs: CostTable, mode: str) -> float:
    return costs.per_mile(mode) * line_length(r)


def path_complexity(p: Path, cfg: EfficiencyConfig) -> float:
    if p.station_count < 2:
        raise DegeneratePath("complexity needs a path with at least two stations")
    return p.transfers * cfg.w_t + (p.station_count - 2) * cfg.w_s + p.distance * cfg.w_d


def path_efficiency(p: Path, l_star: float, cfg: EfficiencyConfig) -> float:
    """(complexity / (crow-fly distance * w_a)) ** exponent; 1.0 is a perfect direct ride."""
    if not l_star > 0:
        raise DegenerateGeometry(f"crow-fly distance must be positive, got {l_star}")
    return (path_complexity(p, cfg) / (l_star * cfg.w_a)) ** cfg.efficiency_exponent


def pair_efficiency(router: Router, origin: str, destination: str, cfg: EfficiencyConfig) -> float:
    """Path efficiency of the best route, or the configured penalty if there is none."""
    p = router.path(origin, destination)
    if p is None:
        if cfg.unreachable_penalty is None:
            raise UnreachablePair(f"no route between {origin!r} and {destination!r}")
        return cfg.unreachable_penalty
    return path_efficiency(p, router.net.crow_fly(origin, destination), cfg)


def total_efficiency_with(router: Router, d: DemandMatrix, cfg: EfficiencyConfig) -> float:
    """Demand-weighted sum of path efficiencies, summed in sorted pair order."""
    demand = d.items()
    router.sweep_all({min(pair) for pair, _ in demand})
    total = 0.0
    for (o, dest), flow in demand:
        total += pair_efficiency(router, o, dest, cfg) * flow
    return total


def total_efficiency(
    net: Network,
    extra_lines: Iterable[Line],
    d: DemandMatrix,
    cfg: EfficiencyConfig,
    strategy: PathStrategy = PathStrategy.SHORTEST,
) -> float:
    return total_efficiency_with(Router(net, extra_lines, strategy), d, cfg)


def _transform(value: float, use_log: bool, what: str) -> float:
    if not use_log:
        return value
    if not value > 0:
        raise NonPositiveLogOperand(f"cannot take the log of {what} = {value!r}")
    return math.log(value)


def combine(cost: float, efficiency: float, scheme: Regression) -> float:
    """Apply a regression scheme to (total cost, total efficiency)."""
    scheme = Regression(scheme)
    return _transform(cost, scheme.cost_is_log, "total construction cost") * _transform(
        efficiency, scheme.efficiency_is_log, "total efficiency"
    )


def total_cost(lines: Iterable[Line], costs: CostTable, mode: str) -> float:
    return math.fsum(construction_cost(r, costs, mode) for r in lines)


def network_efficiency_with(
    router: Router, d: DemandMatrix, cfg: EfficiencyConfig, costs: CostTable
) -> float:
    lines = router.net.lines + router.graph.extra_lines
    cost = total_cost(lines, costs, cfg.cost_mode)
    return combine(cost, total_efficiency_with(router, d, cfg), cfg.regression)


def network_efficiency(
    net: Network,
    extra_lines: Iterable[Line],
    d: DemandMatrix,
    cfg: EfficiencyConfig,
    costs: CostTable,
    strategy: PathStrategy = PathStrategy.SHORTEST,
) -> float:
    """Regression scheme applied to (cost of all lines, total efficiency)."""
    return network_efficiency_with(Router(net, extra_lines, strategy), d, cfg, costs)


def isolated_network(r: Line, net: Network) -> Network:
    """A network holding only the stations and edges of ``r`` and ``r`` itself."""
    on_line = set(r.stations)
    return Network.build(
        stations=[s for s in net.stations.values() if s.id in on_line],
        edges=r.edges,
        lines=[r],
        coordinate_system=net.coordinate_system,
    )


def line_efficiency(
    r: Line,
    net: Network,
    d: DemandMatrix,
    cfg: EfficiencyConfig,
    costs: CostTable,
) -> float:
    """Network efficiency of ``r`` evaluated as if it were the whole network."""
    if not r.edges:
        raise ValueError("line efficiency needs a non-empty line")
    alone = isolated_network(r, net)
    local = d.restricted_to(r.stations)
    cost = construction_cost(r, costs, cfg.cost_mode)
    efficiency = total_efficiency(alone, (), local, cfg, PathStrategy.SHORTEST)
    return combine(cost, efficiency, cfg.line_regression)

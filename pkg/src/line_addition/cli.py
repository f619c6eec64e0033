"""Command-line front end: ``line-addition {add-line,evaluate,path,export-map}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import datafiles
from .algorithm import line_addition
from .config import CostTable, EfficiencyConfig, LineConstructionConfig
from .errors import LineAdditionError
from .evaluation import (
    combine,
    pair_efficiency,
    path_complexity,
    total_cost,
    total_efficiency_with,
)
from .geojson import export_geojson
from .pathfinder import PathStrategy, Router
from .report import RunReport, fmt, render

log = logging.getLogger("line_addition")

STRATEGIES = {"shortest": PathStrategy.SHORTEST, "min-transfer": PathStrategy.MIN_TRANSFER}


def default_costs_path() -> Path:
    return Path(str(resources.files("line_addition") / "data" / "costs.txt"))


def _add_network_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--network", required=True, type=Path, help="directory holding stations.csv, edges.csv, lines.csv")


def _add_eval_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--demand", required=required, type=Path, help="demand.csv")
    p.add_argument("--efficiency-config", required=required, type=Path)
    p.add_argument("--costs", type=Path, default=None, help="cost table (default: bundled placeholder)")
    p.add_argument("--strategy", choices=sorted(STRATEGIES), default="shortest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="line-addition", description="Add one line to an existing transit network.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("add-line", help="run the line addition algorithm")
    _add_network_args(p)
    _add_eval_args(p)
    p.add_argument("--construction-config", required=True, type=Path)
    p.add_argument("--out-map", type=Path, help="write a GeoJSON map here")

    p = sub.add_parser("evaluate", help="network efficiency of the existing network")
    _add_network_args(p)
    _add_eval_args(p)

    p = sub.add_parser("path", help="show the best path between two stations")
    _add_network_args(p)
    p.add_argument("origin")
    p.add_argument("destination")
    p.add_argument("--strategy", choices=sorted(STRATEGIES), default="shortest")
    p.add_argument("--efficiency-config", type=Path, help="weights for complexity (default: all baseline)")

    p = sub.add_parser("export-map", help="write a GeoJSON map of the network and a line")
    _add_network_args(p)
    p.add_argument("--line", required=True, help="comma separated station ids of the new line")
    p.add_argument("--out", required=True, type=Path)
    return parser


def _costs(path: Path | None) -> CostTable:
    return CostTable.from_file(path or default_costs_path())


def _write_map(net, line, path: Path) -> None:
    path.write_text(json.dumps(export_geojson(net, line), indent=2) + "\n", encoding="utf-8")


def cmd_add_line(args: argparse.Namespace) -> int:
    net = datafiles.load_network(args.network)
    demand = datafiles.load_demand(args.demand, net)
    lcfg = LineConstructionConfig.from_file(args.construction_config)
    ecfg = EfficiencyConfig.from_file(args.efficiency_config)
    result = line_addition(net, demand, ecfg, lcfg, _costs(args.costs), STRATEGIES[args.strategy])
    report = RunReport.from_result(result, net)
    sys.stdout.write(render(report))
    log.info("Total algorithm runtime in seconds: %s", fmt(result.runtime_seconds))
    if args.out_map:
        _write_map(net, result.line, args.out_map)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    net = datafiles.load_network(args.network)
    demand = datafiles.load_demand(args.demand, net)
    ecfg = EfficiencyConfig.from_file(args.efficiency_config)
    costs = _costs(args.costs)
    router = Router(net, (), STRATEGIES[args.strategy])
    cost = total_cost(net.lines, costs, ecfg.cost_mode)
    efficiency = total_efficiency_with(router, demand, ecfg)
    value = combine(cost, efficiency, ecfg.regression)
    print(f"Network efficiency: {fmt(value)}")
    print(f"Total efficiency: {fmt(efficiency)}")
    print(f"Total construction cost: {fmt(cost)}")
    return 0


def cmd_path(args: argparse.Namespace) -> int:
    net = datafiles.load_network(args.network)
    ecfg = EfficiencyConfig.from_file(args.efficiency_config) if args.efficiency_config else EfficiencyConfig()
    router = Router(net, (), STRATEGIES[args.strategy])
    p = router.path(args.origin, args.destination)
    if p is None:
        print(f"no path between {args.origin} and {args.destination}", file=sys.stderr)
        return 1
    print("Stations: " + " -> ".join(p.stations))
    for e_from, e_to, line_id in zip(p.stations, p.stations[1:], p.segment_lines):
        print(f"  {e_from} -> {e_to} on {line_id}")
    print(f"Distance: {fmt(p.distance)}")
    print(f"Transfers: {p.transfers}")
    if p.station_count >= 2:
        print(f"Complexity: {fmt(path_complexity(p, ecfg))}")
        print(f"Efficiency: {fmt(pair_efficiency(router, args.origin, args.destination, ecfg))}")
    return 0


def cmd_export_map(args: argparse.Namespace) -> int:
    net = datafiles.load_network(args.network)
    stations = [s.strip() for s in args.line.split(",") if s.strip()]
    for s in stations:
        net.station(s)
    if len(stations) < 2:
        raise ValueError("--line needs at least two stations")
    _write_map(net, net.line_through(stations, id="new"), args.out)
    return 0


COMMANDS = {
    "add-line": cmd_add_line,
    "evaluate": cmd_evaluate,
    "path": cmd_path,
    "export-map": cmd_export_map,
}


def _configure_logging(verbose: bool) -> None:
    # own handler on the package logger, bound to the current stderr
    for h in [h for h in log.handlers if getattr(h, "cli_owned", False)]:
        log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    handler.cli_owned = True  # type: ignore[attr-defined]
    log.addHandler(handler)
    log.setLevel(logging.DEBUG if verbose else logging.INFO)
    log.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        name = exc.filename or str(exc).removeprefix("file not found: ")
        print(f"error: file not found: {name}", file=sys.stderr)
    except (LineAdditionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())

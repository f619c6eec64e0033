"""Reading networks and demand from CSV files.

A network directory holds ``stations.csv``, ``edges.csv`` and ``lines.csv``.
Station coordinates are ``lat,lon`` (geographic) or ``x,y`` (planar miles);
the header decides which.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

from .core import CoordinateSystem, DemandMatrix, Edge, Line, Network, Station, crow_fly_distance, edge_key
from .errors import DataError


def _rows(path: Path, required: list[str]) -> tuple[list[str], list[dict[str, str]]]:
    if not path.is_file():
        raise FileNotFoundError(f"file not found: {path}")
    with path.open(newline="", encoding="utf-8-sig") as handle:
        reader = csv.DictReader(handle)
        header = [h.strip() for h in reader.fieldnames or []]
        missing = [c for c in required if c not in header]
        if missing:
            raise DataError(f"{path.name}: missing columns {', '.join(missing)}")
        rows = []
        for row in reader:
            rows.append({(k or "").strip(): (v or "").strip() for k, v in row.items()})
        return header, rows


def _number(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise DataError(f"{where}: not a number: {text!r}") from None


def read_stations(path: Path) -> tuple[list[Station], CoordinateSystem]:
    header, _ = _rows(path, ["id", "name", "transfer_eligible"])
    if "lat" in header and "lon" in header:
        system, cols = CoordinateSystem.GEOGRAPHIC, ("lat", "lon")
    elif "x" in header and "y" in header:
        system, cols = CoordinateSystem.PLANAR, ("x", "y")
    else:
        raise DataError(f"{path.name}: need lat,lon or x,y columns")
    _, rows = _rows(path, ["id", "name", *cols, "transfer_eligible"])
    stations = []
    for n, row in enumerate(rows, start=2):
        where = f"{path.name} line {n}"
        flag = row["transfer_eligible"]
        if flag not in ("0", "1"):
            raise DataError(f"{where}: transfer_eligible must be 0 or 1, got {flag!r}")
        if not row["id"]:
            raise DataError(f"{where}: empty station id")
        position = (_number(row[cols[0]], where), _number(row[cols[1]], where))
        stations.append(Station(row["id"], row["name"] or row["id"], position, flag == "1"))
    return stations, system


def load_network(directory: str | Path) -> Network:
    directory = Path(directory)
    stations, system = read_stations(directory / "stations.csv")
    by_id = {s.id: s for s in stations}

    def crow(a: str, b: str, where: str) -> float:
        try:
            return crow_fly_distance(by_id[a], by_id[b], system)
        except KeyError as missing:
            raise DataError(f"{where}: unknown station {missing.args[0]!r}") from None

    edges: dict[tuple[str, str], Edge] = {}
    _, rows = _rows(directory / "edges.csv", ["station_a", "station_b", "length"])
    for n, row in enumerate(rows, start=2):
        where = f"edges.csv line {n}"
        a, b = row["station_a"], row["station_b"]
        length = _number(row["length"], where) if row["length"] else crow(a, b, where)
        edges[edge_key(a, b)] = Edge(a, b, length)

    sequences: dict[str, list[tuple[int, str]]] = defaultdict(list)
    _, rows = _rows(directory / "lines.csv", ["line_id", "sequence", "station_id"])
    for n, row in enumerate(rows, start=2):
        where = f"lines.csv line {n}"
        try:
            position = int(row["sequence"])
        except ValueError:
            raise DataError(f"{where}: sequence must be an integer") from None
        sequences[row["line_id"]].append((position, row["station_id"]))

    lines = []
    for line_id, entries in sequences.items():
        entries.sort()
        order = [s for _, s in entries]
        if [p for p, _ in entries] != list(range(len(entries))):
            raise DataError(f"line {line_id!r}: sequence must run 0..n-1 without gaps")
        line_edges = []
        for a, b in zip(order, order[1:]):
            key = edge_key(a, b)
            if key not in edges:
                edges[key] = Edge(a, b, crow(a, b, f"line {line_id!r}"))
            line_edges.append(edges[key])
        lines.append(Line(line_edges, id=line_id))
    return Network.build(stations, edges.values(), lines, system)


def load_demand(path: str | Path, net: Network | None = None) -> DemandMatrix:
    path = Path(path)
    _, rows = _rows(path, ["origin", "destination", "demand"])
    entries: dict[tuple[str, str], float] = defaultdict(float)
    for n, row in enumerate(rows, start=2):
        where = f"{path.name} line {n}"
        o, d = row["origin"], row["destination"]
        if net is not None:
            for s in (o, d):
                if s not in net.stations:
                    raise DataError(f"{where}: unknown station {s!r}")
        entries[(o, d)] += _number(row["demand"], where)
    return DemandMatrix(entries)


def write_network(net: Network, directory: str | Path) -> None:
    """Write ``net`` in the three-file CSV layout read by :func:`load_network`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    cols = ["lat", "lon"] if net.coordinate_system is CoordinateSystem.GEOGRAPHIC else ["x", "y"]
    with (directory / "stations.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "name", *cols, "transfer_eligible"])
        for s in net.stations.values():
            w.writerow([s.id, s.name, repr(s.position[0]), repr(s.position[1]), int(s.transfer_eligible)])
    with (directory / "edges.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["station_a", "station_b", "length"])
        for e in net.edges.values():
            w.writerow([e.a, e.b, repr(e.length)])
    with (directory / "lines.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["line_id", "sequence", "station_id"])
        for r in net.lines:
            for n, s in enumerate(r.stations):
                w.writerow([r.id, n, s])


def write_demand(d: DemandMatrix, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["origin", "destination", "demand"])
        for (o, dest), value in d.items():
            w.writerow([o, dest, repr(value)])

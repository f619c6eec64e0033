"""Domain types for stations, edges, lines, networks and demand.

Everything here is immutable once built. Lines are edge sets that admit
exactly one ordering into a simple path; the ordering is derived from the
edges and used for geometry (length, circuity) and for display.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DataError, DegenerateGeometry, NotASimplePath, UnknownStation

EARTH_RADIUS_MILES = 3958.8


class CoordinateSystem(str, Enum):
    GEOGRAPHIC = "geographic"
    PLANAR = "planar"


@dataclass(frozen=True)
class Station:
    """A station. ``position`` is (lat, lon) in degrees or planar (x, y) in miles."""

    id: str
    name: str
    position: tuple[float, float]
    transfer_eligible: bool = True


def edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Edge:
    """Undirected connection; equality and hashing use the endpoints only."""

    a: str
    b: str
    length: float = field(compare=False)

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise DataError(f"edge endpoints must differ: {self.a!r}")
        if not self.length > 0:
            raise DataError(f"edge {self.a}-{self.b} has non-positive length {self.length}")
        if self.b < self.a:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @property
    def key(self) -> tuple[str, str]:
        return (self.a, self.b)

    def other(self, station: str) -> str:
        if station == self.a:
            return self.b
        if station == self.b:
            return self.a
        raise ValueError(f"{station!r} is not an endpoint of {self.a}-{self.b}")

    def __repr__(self) -> str:
        return f"Edge({self.a!r}, {self.b!r}, {self.length!r})"


def _order_edges(edges: frozenset[Edge]) -> tuple[str, ...]:
    if not edges:
        return ()
    adjacency: dict[str, list[Edge]] = defaultdict(list)
    for e in edges:
        adjacency[e.a].append(e)
        adjacency[e.b].append(e)
    if any(len(incident) > 2 for incident in adjacency.values()):
        raise NotASimplePath("edge set branches")
    terminals = sorted(s for s, incident in adjacency.items() if len(incident) == 1)
    if len(terminals) != 2:
        raise NotASimplePath("edge set is a cycle or is disconnected")
    order = [terminals[0]]
    prev: Edge | None = None
    while True:
        nxt = [e for e in adjacency[order[-1]] if e is not prev]
        if not nxt:
            break
        prev = nxt[0]
        order.append(prev.other(order[-1]))
    if len(order) != len(edges) + 1:
        raise NotASimplePath("edge set is disconnected")
    return tuple(order)


class Line:
    """A transit line as a set of edges forming one simple path.

    Equality is edge-set equality; ``id`` is a label only. ``stations`` runs
    from the terminal with the smaller id to the other terminal.
    """

    __slots__ = ("id", "edges", "_stations", "_by_key")

    def __init__(self, edges: Iterable[Edge], id: str = "") -> None:
        self.id = id
        self.edges = frozenset(edges)
        self._stations: tuple[str, ...] | None = None
        self._by_key = {e.key: e for e in self.edges}
        if len(self._by_key) != len(self.edges):
            raise NotASimplePath("duplicate edges")
        self._stations = _order_edges(self.edges)

    @property
    def stations(self) -> tuple[str, ...]:
        if self._stations is None:
            self._stations = _order_edges(self.edges)
        return self._stations

    @property
    def length(self) -> float:
        return line_length(self)

    @property
    def terminals(self) -> tuple[str, str] | None:
        s = self.stations
        return (s[0], s[-1]) if s else None

    def has_station(self, station: str) -> bool:
        return station in self.stations

    def edge(self, a: str, b: str) -> Edge | None:
        return self._by_key.get(edge_key(a, b))

    def ordered_edges(self) -> list[Edge]:
        s = self.stations
        return [self._by_key[edge_key(x, y)] for x, y in zip(s, s[1:])]

    def relabel(self, id: str) -> Line:
        return Line(self.edges, id=id)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Line):
            return NotImplemented
        return self.edges == other.edges

    def __hash__(self) -> int:
        return hash(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"Line({self.id!r}, {'-'.join(self.stations)})"


def crow_fly_distance(a: Station, b: Station, system: CoordinateSystem) -> float:
    """Straight-line distance in miles (great-circle in geographic mode)."""
    if system is CoordinateSystem.PLANAR:
        return math.hypot(a.position[0] - b.position[0], a.position[1] - b.position[1])
    lat1, lon1 = map(math.radians, a.position)
    lat2, lon2 = map(math.radians, b.position)
    h = (
        math.sin((lat2 - lat1) / 2) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    )
    return 2 * EARTH_RADIUS_MILES * math.asin(min(1.0, math.sqrt(h)))


def line_length(r: Line) -> float:
    return math.fsum(e.length for e in r.ordered_edges())


def line_union(r_i: Line, r_j: Line, id: str = "") -> Line:
    """Edge-set union; raises NotASimplePath if the result is not one simple path."""
    return Line(r_i.edges | r_j.edges, id=id or r_i.id)


def is_subset_line(r_i: Line, r_j: Line) -> bool:
    return r_i.edges <= r_j.edges


@dataclass(frozen=True)
class Network:
    """Immutable stations, edges and existing lines.

    Use :meth:`build` to construct one; it validates the cross references.
    """

    stations: Mapping[str, Station]
    edges: Mapping[tuple[str, str], Edge]
    lines: tuple[Line, ...]
    coordinate_system: CoordinateSystem = CoordinateSystem.PLANAR

    @classmethod
    def build(
        cls,
        stations: Iterable[Station],
        edges: Iterable[Edge],
        lines: Iterable[Line] = (),
        coordinate_system: CoordinateSystem | str = CoordinateSystem.PLANAR,
    ) -> Network:
        system = CoordinateSystem(coordinate_system)
        by_id: dict[str, Station] = {}
        for s in stations:
            if s.id in by_id:
                raise DataError(f"duplicate station id {s.id!r}")
            if system is CoordinateSystem.GEOGRAPHIC:
                lat, lon = s.position
                if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                    raise DataError(f"station {s.id!r} has invalid lat/lon {s.position}")
            by_id[s.id] = s
        by_key: dict[tuple[str, str], Edge] = {}
        for e in edges:
            for end in e.key:
                if end not in by_id:
                    raise DataError(f"edge {e.a}-{e.b} references unknown station {end!r}")
            if e.key in by_key:
                raise DataError(f"duplicate edge {e.a}-{e.b}")
            by_key[e.key] = e
        line_ids: set[str] = set()
        line_list = []
        for r in lines:
            if r.id in line_ids:
                raise DataError(f"duplicate line id {r.id!r}")
            line_ids.add(r.id)
            for e in r.edges:
                if by_key.get(e.key) is None:
                    raise DataError(f"line {r.id!r} uses edge {e.a}-{e.b} that is not in the network")
            line_list.append(r)
        return cls(
            stations=MappingProxyType(dict(sorted(by_id.items()))),
            edges=MappingProxyType(dict(sorted(by_key.items()))),
            lines=tuple(line_list),
            coordinate_system=system,
        )

    def station(self, station_id: str) -> Station:
        try:
            return self.stations[station_id]
        except KeyError:
            raise UnknownStation(f"unknown station {station_id!r}") from None

    def crow_fly(self, a: str, b: str) -> float:
        return crow_fly_distance(self.station(a), self.station(b), self.coordinate_system)

    def edge_between(self, a: str, b: str) -> Edge | None:
        return self.edges.get(edge_key(a, b))

    def connection(self, a: str, b: str) -> Edge:
        """The existing edge between a and b, or a new crow-fly one."""
        existing = self.edge_between(a, b)
        if existing is not None:
            return existing
        length = self.crow_fly(a, b)
        if length <= 0:
            raise DegenerateGeometry(f"stations {a!r} and {b!r} are co-located")
        return Edge(a, b, length)

    def line_through(self, stations: Sequence[str], id: str = "") -> Line:
        """Line visiting ``stations`` in order, reusing existing edges where present."""
        return Line((self.connection(x, y) for x, y in zip(stations, stations[1:])), id=id)

    def lines_at(self, station: str) -> Iterator[Line]:
        return (r for r in self.lines if r.has_station(station))

    def fingerprint(self) -> str:
        """Stable digest of the full network contents."""
        payload = {
            "system": self.coordinate_system.value,
            "stations": [
                [s.id, s.name, repr(s.position[0]), repr(s.position[1]), s.transfer_eligible]
                for s in self.stations.values()
            ],
            "edges": [[e.a, e.b, repr(e.length)] for e in self.edges.values()],
            "lines": [[r.id, list(r.stations)] for r in self.lines],
        }
        blob = json.dumps(payload, separators=(",", ":")).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


def circuity_factor(r: Line, v_i: str, v_j: str, net: Network) -> float:
    """Along-line distance between two stations of ``r`` over their crow-fly distance."""
    stations = r.stations
    try:
        p, q = stations.index(v_i), stations.index(v_j)
    except ValueError:
        raise ValueError(f"{v_i!r} and {v_j!r} must both lie on line {r.id!r}") from None
    if p == q:
        raise ValueError("circuity needs two distinct stations")
    if p > q:
        p, q = q, p
    edges = r.ordered_edges()
    along = math.fsum(e.length for e in edges[p:q])
    direct = net.crow_fly(v_i, v_j)
    if direct <= 0:
        raise DegenerateGeometry(f"stations {v_i!r} and {v_j!r} are co-located")
    return along / direct


def max_circuity(r: Line, net: Network) -> float:
    """Largest circuity factor over all station pairs of ``r`` (0.0 for empty lines)."""
    stations = r.stations
    cum = [0.0]
    for e in r.ordered_edges():
        cum.append(cum[-1] + e.length)
    worst = 0.0
    for p in range(len(stations)):
        for q in range(p + 1, len(stations)):
            direct = net.crow_fly(stations[p], stations[q])
            if direct <= 0:
                raise DegenerateGeometry(
                    f"stations {stations[p]!r} and {stations[q]!r} are co-located"
                )
            worst = max(worst, (cum[q] - cum[p]) / direct)
    return worst


@dataclass(frozen=True)
class ValidationReport:
    min_length_ok: bool
    max_length_ok: bool
    circuity_ok: bool

    @property
    def passed(self) -> bool:
        return self.min_length_ok and self.max_length_ok and self.circuity_ok

    @property
    def buildable(self) -> bool:
        """Constraints every line under construction must keep (L_min may be unmet)."""
        return self.max_length_ok and self.circuity_ok


def validate_line(r: Line, cfg, net: Network) -> ValidationReport:
    """Check ``r`` against ``cfg.min_length``, ``cfg.max_length`` and ``cfg.rho_max``."""
    length = line_length(r)
    try:
        circuity_ok = max_circuity(r, net) < cfg.rho_max
    except DegenerateGeometry:
        circuity_ok = False
    return ValidationReport(
        min_length_ok=length >= cfg.min_length,
        max_length_ok=length <= cfg.max_length,
        circuity_ok=circuity_ok,
    )


class DemandMatrix:
    """Directed origin-destination demand. Absent entries read as zero."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[tuple[str, str], float] | None = None) -> None:
        cleaned: dict[tuple[str, str], float] = {}
        for (o, d), value in (entries or {}).items():
            value = float(value)
            if not value >= 0 or math.isinf(value):
                raise DataError(f"demand {o}->{d} must be a finite non-negative number, got {value}")
            if o == d:
                if value:
                    raise DataError(f"demand from {o!r} to itself must be zero")
                continue
            if value:
                cleaned[(o, d)] = cleaned.get((o, d), 0.0) + value
        self._entries = dict(sorted(cleaned.items()))

    def get(self, origin: str, destination: str) -> float:
        return self._entries.get((origin, destination), 0.0)

    def __getitem__(self, pair: tuple[str, str]) -> float:
        return self.get(*pair)

    def both_ways(self, a: str, b: str) -> float:
        return self.get(a, b) + self.get(b, a)

    def items(self) -> list[tuple[tuple[str, str], float]]:
        """Positive entries in sorted pair order."""
        return list(self._entries.items())

    def stations(self) -> set[str]:
        return {s for pair in self._entries for s in pair}

    def restricted_to(self, stations: Iterable[str]) -> DemandMatrix:
        keep = set(stations)
        return DemandMatrix({k: v for k, v in self._entries.items() if k[0] in keep and k[1] in keep})

    def scaled(self, k: float) -> DemandMatrix:
        return DemandMatrix({key: v * k for key, v in self._entries.items()})

    def total(self) -> float:
        return math.fsum(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DemandMatrix):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self) -> str:
        return f"DemandMatrix({len(self._entries)} entries)"

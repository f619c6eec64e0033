"""Best-path queries through a network, optionally augmented with candidate lines.

Two strategies are available. ``SHORTEST`` minimises distance and then
labels the chosen edge sequence with lines so that transfers are minimal.
``MIN_TRANSFER`` searches the (station, line) product graph and minimises
(transfers, distance) lexicographically.

Ties are broken by the station sequence read from the endpoint with the
smaller id, so ``path(a, b)`` is always the reverse of ``path(b, a)``.
Travellers only ride edges served by some line.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .core import Edge, Line, Network, edge_key
from .errors import UncoveredEdge, UnknownStation

_TIE_SLACK = 1e-9


class PathStrategy(str, Enum):
    SHORTEST = "shortest"
    MIN_TRANSFER = "min-transfer"


@dataclass(frozen=True)
class Path:
    origin: str
    destination: str
    stations: tuple[str, ...]
    edges: tuple[Edge, ...]
    segment_lines: tuple[str, ...]
    transfers: int
    distance: float

    @property
    def station_count(self) -> int:
        return len(self.stations)

    def reversed(self) -> Path:
        return Path(
            origin=self.destination,
            destination=self.origin,
            stations=self.stations[::-1],
            edges=self.edges[::-1],
            segment_lines=self.segment_lines[::-1],
            transfers=self.transfers,
            distance=self.distance,
        )


def _label_edges(
    keys: Sequence[tuple[str, str]], cover: dict[tuple[str, str], tuple[str, ...]]
) -> tuple[tuple[str, ...], int]:
    options = []
    for key in keys:
        lines = cover.get(key)
        if not lines:
            raise UncoveredEdge(f"edge {key[0]}-{key[1]} is not served by any line")
        options.append(lines)
    if not options:
        return (), 0
    # suffix[k][line]: fewest label changes on edges k.. given edge k rides line
    suffix: list[dict[str, int]] = [{} for _ in options]
    suffix[-1] = {m: 0 for m in options[-1]}
    for k in range(len(options) - 2, -1, -1):
        nxt = suffix[k + 1]
        cheapest = min(nxt.values())
        suffix[k] = {m: min(cheapest + 1, nxt.get(m, cheapest + 1)) for m in options[k]}
    first = min(options[0], key=lambda m: (suffix[0][m], m))
    labels = [first]
    for k in range(1, len(options)):
        prev = labels[-1]
        labels.append(
            min(options[k], key=lambda m: ((m != prev) + suffix[k][m], m != prev, m))
        )
    transfers = sum(1 for x, y in zip(labels, labels[1:]) if x != y)
    return tuple(labels), transfers


def assign_lines(
    edge_seq: Sequence[Edge], lines_available: Iterable[Line]
) -> tuple[tuple[str, ...], int]:
    """Label each edge with a line so that the number of line changes is minimal.

    Returns the per-edge line ids and the resulting transfer count.
    """
    cover: dict[tuple[str, str], list[str]] = {}
    for r in lines_available:
        for e in r.edges:
            cover.setdefault(e.key, []).append(r.id)
    return _label_edges(
        [e.key for e in edge_seq], {k: tuple(sorted(v)) for k, v in cover.items()}
    )


class TransitGraph:
    """Ridable edges of a network plus extra lines, with their line coverage."""

    def __init__(self, net: Network, extra_lines: Iterable[Line] = ()) -> None:
        self.net = net
        self.extra_lines = tuple(extra_lines)
        lines = net.lines + self.extra_lines
        ids = [r.id for r in lines]
        if len(set(ids)) != len(ids):
            raise ValueError("line ids must be unique across network and extra lines")
        cover: dict[tuple[str, str], list[str]] = {}
        edges: dict[tuple[str, str], Edge] = {}
        for r in lines:
            for e in r.edges:
                cover.setdefault(e.key, []).append(r.id)
                edges.setdefault(e.key, net.edges.get(e.key, e))
        self.cover = {k: tuple(sorted(v)) for k, v in cover.items()}
        self.edges = edges
        adjacency: dict[str, list[tuple[str, Edge]]] = {s: [] for s in net.stations}
        for e in edges.values():
            adjacency[e.a].append((e.b, e))
            adjacency[e.b].append((e.a, e))
        for nbrs in adjacency.values():
            nbrs.sort(key=lambda item: item[0])
        self.adjacency = adjacency
        self._line_index = {line_id: n for n, line_id in enumerate(sorted(ids))}
        scale = 1.0
        for e in edges.values():
            direct = net.crow_fly(e.a, e.b)
            if direct <= 0:
                scale = 0.0
                break
            scale = min(scale, e.length / direct)
        # crow-fly times the worst edge stretch never overestimates: admissible and consistent
        self.heuristic_scale = scale

    def build_path(self, stations: Sequence[str]) -> Path:
        keys = [edge_key(x, y) for x, y in zip(stations, stations[1:])]
        labels, transfers = _label_edges(keys, self.cover)
        edges = tuple(self.edges[k] for k in keys)
        distance = 0.0
        for e in edges:
            distance += e.length
        return Path(
            origin=stations[0],
            destination=stations[-1],
            stations=tuple(stations),
            edges=edges,
            segment_lines=labels,
            transfers=transfers,
            distance=distance,
        )

    def shortest_search(
        self, source: str, target: str | None = None
    ) -> dict[str, tuple[float, tuple[str, ...]]]:
        """Best (distance, station sequence) label per reached station.

        With a target this is A* with a scaled crow-fly heuristic; without,
        plain Dijkstra to every station.
        """
        if target is None:
            h = lambda v: 0.0  # noqa: E731
        else:
            scale = self.heuristic_scale
            h = lambda v: scale * self.net.crow_fly(v, target)  # noqa: E731
        start = (source,)
        best: dict[str, tuple[float, tuple[str, ...]]] = {source: (0.0, start)}
        heap = [(h(source), 0.0, start)]
        while heap:
            f, g, seq = heapq.heappop(heap)
            u = seq[-1]
            if best[u] != (g, seq):
                continue
            if target is not None and target in best:
                bound = best[target][0]
                if f > bound + _TIE_SLACK * max(1.0, bound):
                    break
            for v, e in self.adjacency[u]:
                if v in seq:
                    continue
                label = (g + e.length, seq + (v,))
                current = best.get(v)
                if current is None or label < current:
                    best[v] = label
                    heapq.heappush(heap, (label[0] + h(v), label[0], label[1]))
        return best

    def transfer_search(
        self, source: str, target: str | None = None
    ) -> dict[str, tuple[int, float, tuple[str, ...]]]:
        """Best (transfers, distance, station sequence) label per reached station."""
        index = self._line_index
        start_state = (source, -1)
        best: dict[tuple[str, int], tuple[int, float, tuple[str, ...]]] = {
            start_state: (0, 0.0, (source,))
        }
        heap = [(0, 0.0, (source,), -1)]
        found: dict[str, tuple[int, float, tuple[str, ...]]] = {}
        while heap:
            t, g, seq, riding = heapq.heappop(heap)
            u = seq[-1]
            if best[(u, riding)] != (t, g, seq):
                continue
            if u not in found:
                found[u] = (t, g, seq)
                if u == target:
                    break
            for v, e in self.adjacency[u]:
                if v in seq:
                    continue
                for line_id in self.cover[e.key]:
                    m = index[line_id]
                    label = (t + (riding != -1 and m != riding), g + e.length, seq + (v,))
                    current = best.get((v, m))
                    if current is None or label < current:
                        best[(v, m)] = label
                        heapq.heappush(heap, (label[0], label[1], label[2], m))
        return found


def _trivial(station: str) -> Path:
    return Path(station, station, (station,), (), (), 0, 0.0)


class Router:
    """Memoised best-path queries over one fixed set of extra lines.

    Build a new router whenever the extra lines change.
    """

    def __init__(
        self,
        net: Network,
        extra_lines: Iterable[Line] = (),
        strategy: PathStrategy = PathStrategy.SHORTEST,
    ) -> None:
        self.graph = TransitGraph(net, extra_lines)
        self.net = net
        self.strategy = PathStrategy(strategy)
        self._cache: dict[tuple[str, str], Path | None] = {}
        self._swept: set[str] = set()

    def _check(self, station: str) -> None:
        if station not in self.net.stations:
            raise UnknownStation(f"unknown station {station!r}")

    def _sequences(self, source: str, target: str | None) -> dict[str, tuple[str, ...]]:
        if self.strategy is PathStrategy.SHORTEST:
            labels = self.graph.shortest_search(source, target)
            return {v: label[1] for v, label in labels.items()}
        labels = self.graph.transfer_search(source, target)
        return {v: label[2] for v, label in labels.items()}

    def path(self, origin: str, destination: str) -> Path | None:
        self._check(origin)
        self._check(destination)
        if origin == destination:
            return _trivial(origin)
        lo, hi = sorted((origin, destination))
        key = (lo, hi)
        if key not in self._cache:
            seq = self._sequences(lo, hi).get(hi)
            self._cache[key] = None if seq is None else self.graph.build_path(seq)
        found = self._cache[key]
        if found is None or origin == lo:
            return found
        return found.reversed()

    def sweep(self, source: str) -> None:
        """Compute and cache every canonical path starting at ``source``."""
        self._check(source)
        if source in self._swept:
            return
        sequences = self._sequences(source, None)
        for target in self.net.stations:
            if target > source and (source, target) not in self._cache:
                seq = sequences.get(target)
                self._cache[(source, target)] = (
                    None if seq is None else self.graph.build_path(seq)
                )
        self._swept.add(source)

    def sweep_all(self, stations: Iterable[str] | None = None) -> None:
        for s in sorted(set(self.net.stations if stations is None else stations)):
            self.sweep(s)


def best_path(
    net: Network,
    extra_lines: Iterable[Line],
    v_i: str,
    v_j: str,
    strategy: PathStrategy = PathStrategy.SHORTEST,
) -> Path | None:
    """Best path from ``v_i`` to ``v_j``; ``None`` when they are not connected."""
    return Router(net, extra_lines, strategy).path(v_i, v_j)

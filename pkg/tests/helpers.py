"""Builders and brute-force oracles shared by the test modules.

The oracles here deliberately avoid the package's search and labelling code:
paths come from plain DFS enumeration, transfers from trying every labelling.
"""

from __future__ import annotations

import itertools
import math
import random
from typing import Iterable, Mapping, Sequence

from line_addition.core import DemandMatrix, Edge, Line, Network, Station, edge_key


def build_net(
    coords: Mapping[str, tuple[float, float]],
    lines: Mapping[str, Sequence[str]],
    ineligible: Iterable[str] = (),
    lengths: Mapping[tuple[str, str], float] | None = None,
    extra_edges: Iterable[tuple[str, str]] = (),
) -> Network:
    """Planar network; edge lengths default to Euclidean distance."""
    lengths = {edge_key(*k): v for k, v in (lengths or {}).items()}
    blocked = set(ineligible)
    stations = [Station(s, s, xy, s not in blocked) for s, xy in coords.items()]
    edges: dict[tuple[str, str], Edge] = {}

    def edge(a: str, b: str) -> Edge:
        key = edge_key(a, b)
        if key not in edges:
            length = lengths.get(key, math.dist(coords[a], coords[b]))
            edges[key] = Edge(a, b, length)
        return edges[key]

    built = [Line([edge(a, b) for a, b in zip(seq, seq[1:])], id=name) for name, seq in lines.items()]
    for a, b in extra_edges:
        edge(a, b)
    return Network.build(stations, edges.values(), built)


def random_network(
    rng: random.Random,
    n_stations: int,
    n_lines: int,
    stretch: float = 0.0,
    size: float = 10.0,
) -> Network:
    """Connected planar network whose lines cover every station.

    Later lines start on track shared with an earlier line, so some edges
    are served by several lines. ``stretch`` > 0 makes some edges longer
    than their crow-fly distance.
    """
    names = [f"s{k}" for k in range(n_stations)]
    coords: dict[str, tuple[float, float]] = {}
    for s in names:
        while True:
            p = (round(rng.uniform(0, size), 3), round(rng.uniform(0, size), 3))
            if all(math.dist(p, q) > 0.3 for q in coords.values()):
                coords[s] = p
                break
    uncovered = names[:]
    rng.shuffle(uncovered)
    lines: dict[str, list[str]] = {}
    for k in range(n_lines):
        remaining_lines = n_lines - k
        if k == 0:
            seq = [uncovered.pop()]
        else:
            base = lines[rng.choice(sorted(lines))]
            start = rng.randrange(len(base))
            shared = rng.randint(1, min(2, len(base) - start))
            seq = base[start : start + shared]
        take = len(uncovered) if remaining_lines == 1 else rng.randint(1, max(1, len(uncovered) - remaining_lines + 1))
        for _ in range(take):
            if uncovered:
                seq.append(uncovered.pop())
        pool = [s for s in names if s not in seq]
        if len(seq) < 2 or rng.random() < 0.3:
            if pool:
                pick = rng.choice(pool)
                seq.append(pick)
                if pick in uncovered:
                    uncovered.remove(pick)
        lines[f"L{k}"] = seq
    lengths = {}
    if stretch:
        for seq in lines.values():
            for a, b in zip(seq, seq[1:]):
                if rng.random() < 0.5:
                    lengths[edge_key(a, b)] = math.dist(coords[a], coords[b]) * (1 + rng.uniform(0, stretch))
    return build_net(coords, lines, lengths=lengths)


def random_demand(rng: random.Random, net: Network, density: float = 0.6, high: float = 10.0) -> DemandMatrix:
    ids = list(net.stations)
    entries = {}
    for a in ids:
        for b in ids:
            if a != b and rng.random() < density:
                entries[(a, b)] = round(rng.uniform(0.5, high), 2)
    return DemandMatrix(entries)


def ridable_edges(net: Network, extra: Iterable[Line] = ()) -> dict[tuple[str, str], tuple[float, list[str]]]:
    out: dict[tuple[str, str], tuple[float, list[str]]] = {}
    for r in tuple(net.lines) + tuple(extra):
        for e in r.edges:
            length = net.edges[e.key].length if e.key in net.edges else e.length
            out.setdefault(e.key, (length, []))[1].append(r.id)
    return out


def all_simple_paths(net: Network, a: str, b: str, extra: Iterable[Line] = ()) -> list[list[str]]:
    edges = ridable_edges(net, extra)
    adj: dict[str, set[str]] = {s: set() for s in net.stations}
    for x, y in edges:
        adj[x].add(y)
        adj[y].add(x)
    found = []

    def dfs(seq: list[str]) -> None:
        if seq[-1] == b:
            found.append(list(seq))
            return
        for nxt in sorted(adj[seq[-1]]):
            if nxt not in seq:
                seq.append(nxt)
                dfs(seq)
                seq.pop()

    dfs([a])
    return found


def exhaustive_transfers(keys: Sequence[tuple[str, str]], cover: Mapping[tuple[str, str], Sequence[str]]) -> int:
    best = math.inf
    for labels in itertools.product(*(cover[k] for k in keys)):
        best = min(best, sum(1 for x, y in zip(labels, labels[1:]) if x != y))
    return int(best) if keys else 0


def oracle_path(net: Network, a: str, b: str, strategy: str, extra: Iterable[Line] = ()):
    """(key, stations) of the best canonical path by full enumeration, or None."""
    extra = tuple(extra)
    lo, hi = sorted((a, b))
    edges = ridable_edges(net, extra)
    cover = {k: v[1] for k, v in edges.items()}
    best = None
    for seq in all_simple_paths(net, lo, hi, extra):
        keys = [edge_key(x, y) for x, y in zip(seq, seq[1:])]
        dist = 0.0
        for k in keys:
            dist += edges[k][0]
        transfers = exhaustive_transfers(keys, cover)
        key = (dist, tuple(seq)) if strategy == "shortest" else (transfers, dist, tuple(seq))
        if best is None or key < best[0]:
            best = (key, seq, dist, transfers)
    return best


def oracle_modified_demand(net, d, w, strategy="shortest"):
    """Per pair: find every trip whose enumerated best path contains the pair's best path."""
    best = {}
    for a, b in itertools.combinations(sorted(net.stations), 2):
        found = oracle_path(net, a, b, strategy)
        if found is not None:
            best[(a, b)] = found[1]
    lengths = {edge_key(*e.key): e.length for e in net.edges.values()}
    out = {}
    for (a, b), sub in best.items():
        total = d.get(a, b) + d.get(b, a)
        for (m, n), flow in d.items():
            lo, hi = sorted((m, n))
            if (lo, hi) not in best:
                continue
            trip = best[(lo, hi)] if m == lo else best[(lo, hi)][::-1]
            if len(trip) == len(sub):
                continue
            for piece in (sub, sub[::-1]):
                for start in range(len(trip) - len(piece) + 1):
                    if trip[start : start + len(piece)] == piece:
                        before = sum(lengths[edge_key(x, y)] for x, y in zip(trip[: start + 1], trip[1 : start + 1]))
                        tail = trip[start + len(piece) - 1 :]
                        after = sum(lengths[edge_key(x, y)] for x, y in zip(tail, tail[1:]))
                        total += flow / (1 + (before + after) * w)
        if total > 0:
            out[(a, b)] = total
    return out

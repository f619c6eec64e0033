"""Greedy construction of one new line for an existing network.

The loop repeatedly takes the station pair with the worst demand-weighted
path efficiency and either extends a line under construction towards it or
builds a fresh corridor line for it. It stops once a candidate meets every
constraint with a line efficiency under the target, or when no pairs remain,
and then returns the best valid candidate.
"""

from __future__ import annotations

import heapq
import logging
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .config import CostTable, EfficiencyConfig, LineConstructionConfig
from .core import (
    EARTH_RADIUS_MILES,
    CoordinateSystem,
    DemandMatrix,
    Line,
    Network,
    Station,
    is_subset_line,
    line_length,
    validate_line,
)
from .errors import DegenerateGeometry, LineAdditionError, NoFeasibleLine, NotASimplePath, UnreachablePair
from .evaluation import (
    construction_cost,
    line_efficiency,
    network_efficiency,
    network_efficiency_with,
    path_efficiency,
)
from .pathfinder import Path, PathStrategy, Router

log = logging.getLogger(__name__)

Pair = tuple[str, str]


def pair_key(a: str, b: str) -> Pair:
    return (a, b) if a < b else (b, a)


def demand_decay(excess: float, w: float) -> float:
    return 1.0 / (1.0 + excess * w)


def calculate_demand_weight(container: Path, sub_origin: str, sub_dest: str, w: float) -> float:
    """Weight of a containing trip's demand for the sub-path ``sub_origin``..``sub_dest``.

    ``excess`` is the distance the containing trip travels outside the sub-path.
    """
    stations = container.stations
    p, q = stations.index(sub_origin), stations.index(sub_dest)
    if p > q:
        raise ValueError("sub-path endpoints must appear in travel order")
    lengths = [e.length for e in container.edges]
    excess = math.fsum(lengths[:p]) + math.fsum(lengths[q:])
    return demand_decay(excess, w)


class EfficiencyMatrix:
    """Scores per unordered station pair with max-score lookup.

    ``stamps`` records which router produced each score so that repeated
    updates against the same router can be skipped.
    """

    def __init__(self) -> None:
        self.scores: dict[Pair, float] = {}
        self.modified_demand: dict[Pair, float] = {}
        self.stamps: dict[Pair, int] = {}
        self._heap: list[tuple[float, Pair, int]] = []
        self._version: dict[Pair, int] = {}

    def set(self, pair: Pair, score: float, stamp: int) -> None:
        version = self._version.get(pair, 0) + 1
        self._version[pair] = version
        self.scores[pair] = score
        self.stamps[pair] = stamp
        heapq.heappush(self._heap, (-score, pair, version))

    def worst(self) -> Pair:
        """Highest-score pair; ties go to the smaller pair."""
        while self._heap:
            _, pair, version = self._heap[0]
            if pair in self.scores and self._version[pair] == version:
                return pair
            heapq.heappop(self._heap)
        raise KeyError("efficiency matrix is empty")

    def remove(self, pair: Pair) -> None:
        self.scores.pop(pair, None)
        self.stamps.pop(pair, None)

    def __contains__(self, pair: object) -> bool:
        return pair in self.scores

    def __len__(self) -> int:
        return len(self.scores)

    def __bool__(self) -> bool:
        return bool(self.scores)

    def pairs(self) -> list[Pair]:
        return sorted(self.scores)


def _pair_efficiency(router: Router, pair: Pair, ecfg: EfficiencyConfig) -> float:
    a, b = pair
    p = router.path(a, b)
    if p is None:
        if ecfg.unreachable_penalty is None:
            raise UnreachablePair(f"no route between {a!r} and {b!r}")
        return ecfg.unreachable_penalty
    return path_efficiency(p, router.net.crow_fly(a, b), ecfg)


def modified_demand(router: Router, d: DemandMatrix, w: float) -> dict[Pair, float]:
    """Raw two-way demand per pair plus decayed demand of trips riding through it.

    A trip m->n contributes to pair {x, y} when the best path between x and y
    is a contiguous piece of the trip's best path (other than the whole trip).
    """
    router.sweep_all()
    result: dict[Pair, float] = defaultdict(float)
    for (o, dest), flow in d.items():
        result[pair_key(o, dest)] += flow
    for (m, n), flow in d.items():
        trip = router.path(m, n)
        if trip is None:
            continue
        seq = trip.stations
        cum = [0.0]
        for e in trip.edges:
            cum.append(cum[-1] + e.length)
        last = len(seq) - 1
        for a in range(last):
            for b in range(a + 1, last + 1):
                if a == 0 and b == last:
                    continue
                piece = router.path(seq[a], seq[b])
                if piece is not None and piece.stations == seq[a : b + 1]:
                    excess = cum[a] + (cum[last] - cum[b])
                    result[pair_key(seq[a], seq[b])] += flow * demand_decay(excess, w)
    return {k: v for k, v in sorted(result.items()) if v > 0}


def create_efficiency_matrix(
    net: Network,
    d: DemandMatrix,
    ecfg: EfficiencyConfig,
    lcfg: LineConstructionConfig,
    strategy: PathStrategy = PathStrategy.SHORTEST,
    router: Router | None = None,
    stamp: int = 0,
) -> EfficiencyMatrix:
    router = router or Router(net, (), strategy)
    matrix = EfficiencyMatrix()
    for pair, demand in modified_demand(router, d, lcfg.demand_adjustment_weight).items():
        matrix.modified_demand[pair] = demand
        matrix.set(pair, _pair_efficiency(router, pair, ecfg) * demand, stamp)
    return matrix


def update_efficiencies(
    matrix: EfficiencyMatrix, router: Router, ecfg: EfficiencyConfig, stamp: int
) -> int:
    """Refresh the worst pairs against ``router`` until the worst one is current.

    Returns the number of pairs recomputed.
    """
    recomputed = 0
    while matrix:
        pair = matrix.worst()
        if matrix.stamps[pair] == stamp:
            break
        score = _pair_efficiency(router, pair, ecfg) * matrix.modified_demand[pair]
        matrix.set(pair, score, stamp)
        recomputed += 1
        if matrix.worst() == pair:
            break
    return recomputed


def _local_xy(s: Station, origin: tuple[float, float], system: CoordinateSystem) -> tuple[float, float]:
    if system is CoordinateSystem.PLANAR:
        return s.position[0] - origin[0], s.position[1] - origin[1]
    lat0, lon0 = origin
    lat, lon = s.position
    x = EARTH_RADIUS_MILES * math.radians(lon - lon0) * math.cos(math.radians(lat0))
    y = EARTH_RADIUS_MILES * math.radians(lat - lat0)
    return x, y


def corridor_contains(
    v_i: Station,
    v_j: Station,
    s: Station,
    corridor_height: float,
    system: CoordinateSystem = CoordinateSystem.PLANAR,
) -> bool:
    """Whether ``s`` lies in the rhombus spanned between ``v_i`` and ``v_j``.

    The long diagonal is the segment v_i-v_j and the short diagonal is
    ``corridor_height`` times as long. The endpoints themselves never count.
    Geographic positions are projected onto a tangent plane at the midpoint.
    """
    if s.id in (v_i.id, v_j.id):
        return False
    mid = ((v_i.position[0] + v_j.position[0]) / 2, (v_i.position[1] + v_j.position[1]) / 2)
    ax, ay = _local_xy(v_i, mid, system)
    bx, by = _local_xy(v_j, mid, system)
    sx, sy = _local_xy(s, mid, system)
    dx, dy = bx - ax, by - ay
    span = math.hypot(dx, dy)
    if span == 0:
        raise DegenerateGeometry(f"stations {v_i.id!r} and {v_j.id!r} are co-located")
    along = (sx * dx + sy * dy) / span
    across = (sy * dx - sx * dy) / span
    return abs(along) / (span / 2) + abs(across) / (corridor_height * span / 2) <= 1.0


def _drop_loops(walk: Sequence[str]) -> list[str]:
    out: list[str] = []
    where: dict[str, int] = {}
    for s in walk:
        if s in where:
            cut = where[s]
            for dropped in out[cut + 1 :]:
                del where[dropped]
            del out[cut + 1 :]
            log.warning("corridor halves met at %s; dropped the duplicated segment", s)
        else:
            where[s] = len(out)
            out.append(s)
    return out


def corridor_walk(
    v_i: str,
    v_j: str,
    exclude: Iterable[str],
    net: Network,
    d: DemandMatrix,
    lcfg: LineConstructionConfig,
) -> list[str]:
    """Station sequence from ``v_i`` to ``v_j`` recruiting corridor stations recursively."""
    a, b = net.station(v_i), net.station(v_j)
    blocked = set(exclude) | {v_i, v_j}
    best: str | None = None
    best_demand = -math.inf
    for s in net.stations.values():
        if s.id in blocked or not s.transfer_eligible:
            continue
        if s.position == a.position or s.position == b.position:
            continue
        if not corridor_contains(a, b, s, lcfg.corridor_height, net.coordinate_system):
            continue
        demand = d.both_ways(v_i, s.id) + d.both_ways(s.id, v_j)
        if demand > best_demand:
            best, best_demand = s.id, demand
    if best is None:
        return [v_i, v_j]
    blocked.add(best)
    left = corridor_walk(v_i, best, blocked, net, d, lcfg)
    right = corridor_walk(best, v_j, blocked, net, d, lcfg)
    return _drop_loops(left + right[1:])


def construct_line(
    v_i: str,
    v_j: str,
    exclude: Iterable[str],
    net: Network,
    d: DemandMatrix,
    lcfg: LineConstructionConfig,
    id: str = "",
) -> Line:
    if v_i == v_j:
        raise ValueError("construct_line needs two distinct stations")
    return net.line_through(corridor_walk(v_i, v_j, exclude, net, d, lcfg), id=id)


def _buildable(r: Line, net: Network, lcfg: LineConstructionConfig) -> bool:
    return validate_line(r, lcfg, net).buildable


def add_to_line(
    v_new: str,
    r: Line,
    net: Network,
    d: DemandMatrix,
    lcfg: LineConstructionConfig,
) -> Line | None:
    """Cheapest insertion of ``v_new`` into ``r`` that keeps circuity and max length."""
    seq = list(r.stations)
    if v_new in seq:
        raise ValueError(f"{v_new!r} is already on line {r.id!r}")
    on_line = set(seq)
    best: Line | None = None
    best_length = math.inf
    for q in range(len(seq) + 1):
        if q == 0:
            walk = corridor_walk(v_new, seq[0], on_line, net, d, lcfg) + seq[1:]
        elif q == len(seq):
            walk = seq[:-1] + corridor_walk(seq[-1], v_new, on_line, net, d, lcfg)
        else:
            first = corridor_walk(seq[q - 1], v_new, on_line, net, d, lcfg)
            second = corridor_walk(v_new, seq[q], on_line | set(first), net, d, lcfg)
            walk = seq[: q - 1] + first + second[1:] + seq[q + 1 :]
        if len(set(walk)) != len(walk):
            continue
        candidate = net.line_through(walk, id=r.id)
        length = line_length(candidate)
        if length < best_length and _buildable(candidate, net, lcfg):
            best, best_length = candidate, length
    return best


def join_line(r_i: Line, r_j: Line, net: Network, lcfg: LineConstructionConfig) -> Line | None:
    """Union of two lines whose ends overlap, if it is a valid longer line."""
    a, b = r_i.stations, r_j.stations
    overlap = 0
    for x in (a, a[::-1]):
        for y in (b, b[::-1]):
            for n in range(min(len(x), len(y)), overlap, -1):
                if x[-n:] == y[:n]:
                    overlap = n
                    break
    if overlap == 0 or overlap >= len(a) or overlap >= len(b):
        return None
    try:
        joined = Line(r_i.edges | r_j.edges, id=r_i.id)
    except NotASimplePath:
        return None
    return joined if _buildable(joined, net, lcfg) else None


def remove_subset_lines(cands: Sequence[Line], net: Network) -> list[Line]:
    """Drop candidates contained in another candidate or in an existing line.

    Of two identical candidates the earlier one is kept.
    """
    kept = []
    for n, r in enumerate(cands):
        if any(is_subset_line(r, existing) for existing in net.lines):
            continue
        covered = False
        for m, other in enumerate(cands):
            if m == n or not is_subset_line(r, other):
                continue
            if r.edges != other.edges or m < n:
                covered = True
                break
        if not covered:
            kept.append(r)
    return kept


class LineScorer:
    """Memoised line efficiencies; ``None`` when the line's efficiency is undefined."""

    def __init__(
        self,
        net: Network,
        d: DemandMatrix,
        ecfg: EfficiencyConfig,
        lcfg: LineConstructionConfig,
        costs: CostTable,
    ) -> None:
        self.net, self.d, self.ecfg, self.lcfg, self.costs = net, d, ecfg, lcfg, costs
        self._memo: dict[frozenset, float | None] = {}

    def valid(self, r: Line) -> bool:
        return bool(r.edges) and validate_line(r, self.lcfg, self.net).passed

    def efficiency(self, r: Line) -> float | None:
        if r.edges not in self._memo:
            try:
                value: float | None = line_efficiency(r, self.net, self.d, self.ecfg, self.costs)
            except LineAdditionError:
                value = None
            self._memo[r.edges] = value
        return self._memo[r.edges]


def target_efficiency_satisfied(cands: Iterable[Line], scorer: LineScorer) -> bool:
    target = scorer.lcfg.target_efficiency
    for r in cands:
        if scorer.valid(r):
            value = scorer.efficiency(r)
            if value is not None and value < target:
                return True
    return False


def find_best_line(cands: Iterable[Line], scorer: LineScorer) -> Line:
    """Valid candidate with the lowest line efficiency.

    Ties go to the cheaper line, then to the smaller terminal ids.
    """
    ranked = []
    for r in cands:
        if not scorer.valid(r):
            continue
        value = scorer.efficiency(r)
        if value is None:
            continue
        cost = construction_cost(r, scorer.costs, scorer.ecfg.cost_mode)
        ranked.append(((value, cost, r.stations[0], r.stations[-1]), r))
    if not ranked:
        raise NoFeasibleLine("no candidate line satisfies the length and circuity constraints")
    return min(ranked, key=lambda item: item[0])[1]


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    pair: Pair
    action: str
    candidate_count: int


@dataclass
class RunResult:
    line: Line
    old_efficiency: float
    new_efficiency: float
    runtime_seconds: float
    initial_pairs: int
    iterations: list[IterationRecord] = field(default_factory=list)
    candidates: list[Line] = field(default_factory=list)

    @property
    def improvement(self) -> float:
        return self.new_efficiency - self.old_efficiency

    @property
    def percentage_improvement(self) -> float:
        return self.improvement / self.old_efficiency * 100


class _Ids:
    def __init__(self, taken: Iterable[str]) -> None:
        self.taken = set(taken)
        self.n = 0

    def __call__(self) -> str:
        while True:
            self.n += 1
            name = f"candidate-{self.n}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def line_addition(
    net: Network,
    d: DemandMatrix,
    ecfg: EfficiencyConfig,
    lcfg: LineConstructionConfig,
    costs: CostTable,
    strategy: PathStrategy = PathStrategy.SHORTEST,
) -> RunResult:
    """Run the greedy loop and return the chosen line with before/after efficiency."""
    started = time.perf_counter()
    strategy = PathStrategy(strategy)
    costs.per_mile(ecfg.cost_mode)
    new_id = _Ids(r.id for r in net.lines)
    scorer = LineScorer(net, d, ecfg, lcfg, costs)

    stamp = 0
    base_router = Router(net, (), strategy)
    matrix = create_efficiency_matrix(net, d, ecfg, lcfg, strategy, router=base_router, stamp=stamp)
    initial_pairs = len(matrix)
    cands: list[Line] = []
    records: list[IterationRecord] = []

    while matrix and not target_efficiency_satisfied(cands, scorer):
        v_i, v_j = matrix.worst()
        produced: list[Line] = []
        action = "skip"
        eligible = net.station(v_i).transfer_eligible and net.station(v_j).transfer_eligible
        if eligible:
            inserted: Line | None = None
            replaced: Line | None = None
            for anchor, other in ((v_i, v_j), (v_j, v_i)):
                holders = [r for r in cands if r.has_station(anchor)]
                if not holders:
                    continue
                options = []
                for r in holders:
                    if r.has_station(other):
                        continue
                    grown = add_to_line(other, r, net, d, lcfg)
                    if grown is not None:
                        options.append((line_length(grown), len(options), grown, r))
                if options:
                    _, _, inserted, replaced = min(options, key=lambda o: o[:2])
                break
            if inserted is not None:
                inserted = inserted.relabel(new_id())
                cands[cands.index(replaced)] = inserted
                produced.append(inserted)
                action = "insert"
                for r_k in list(cands):
                    if r_k is inserted:
                        continue
                    joined = join_line(r_k, inserted, net, lcfg)
                    if joined is not None and joined not in cands:
                        joined = joined.relabel(new_id())
                        cands.append(joined)
                        produced.append(joined)
                        action = "insert+join"
            else:
                fresh = construct_line(v_i, v_j, (), net, d, lcfg, id=new_id())
                if not _buildable(fresh, net, lcfg):
                    fresh = net.line_through([v_i, v_j], id=fresh.id)
                    if not _buildable(fresh, net, lcfg):
                        fresh = None
                if fresh is not None:
                    cands.append(fresh)
                    produced.append(fresh)
                    action = "construct"

        for r in produced:
            on_line = r.stations
            for p in range(len(on_line)):
                for q in range(p + 1, len(on_line)):
                    matrix.remove(pair_key(on_line[p], on_line[q]))
        matrix.remove((v_i, v_j))
        cands = remove_subset_lines(cands, net)
        records.append(IterationRecord(len(records) + 1, (v_i, v_j), action, len(cands)))
        log.debug("iteration %d: %s-%s %s (%d candidates)", len(records), v_i, v_j, action, len(cands))
        if matrix:
            stamp += 1
            update_efficiencies(matrix, Router(net, cands, strategy), ecfg, stamp)

    best = find_best_line(cands, scorer)
    old = network_efficiency_with(base_router, d, ecfg, costs)
    new = network_efficiency(net, (best,), d, ecfg, costs, strategy)
    return RunResult(
        line=best,
        old_efficiency=old,
        new_efficiency=new,
        runtime_seconds=time.perf_counter() - started,
        initial_pairs=initial_pairs,
        iterations=records,
        candidates=list(cands),
    )

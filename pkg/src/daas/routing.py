"""Shortest-path search over the skyway under distance or weather-time cost.

Weather is frozen at the query slot; re-planning across slots is the
simulator's job. Ties are broken by fewer hops, then by the
lexicographically smaller node sequence, so results are fully deterministic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum

from .errors import SlotOutOfRange, UnknownEdge
from .skyway import SkywayNetwork, bearing, heuristic, neighbors
from .weather import SPEED_CAP_FACTOR, SafetyLimits, WeatherSeries, adjusted_speed, gating_ok


class CostMode(Enum):
    DISTANCE = "distance"
    WEATHER_TIME = "time"


class HeuristicMode(Enum):
    ZERO = "zero"
    ADMISSIBLE = "admissible"
    # Time heuristic scaled by nominal instead of maximum speed; overestimates
    # under tailwinds, so A* may return a suboptimal route.
    PAPER_NOMINAL = "paper"


@dataclass(frozen=True)
class RoutePlan:
    node_sequence: list[int]
    total_distance_km: float
    total_duration_s: float
    # (a, b, distance_km, v_adj_ms, duration_s) per traversed edge
    per_leg: list[tuple[int, int, float, float, float]]

    def to_dict(self) -> dict:
        return {
            "node_sequence": list(self.node_sequence),
            "total_distance_km": self.total_distance_km,
            "total_duration_s": self.total_duration_s,
            "per_leg": [
                {
                    "a": a,
                    "b": b,
                    "distance_km": d,
                    "v_adj_ms": v,
                    "duration_s": t,
                }
                for a, b, d, v, t in self.per_leg
            ],
        }


@dataclass(frozen=True)
class ComparisonReport:
    dijkstra: RoutePlan | None
    astar: RoutePlan | None
    delta_distance_km: float | None
    delta_duration_s: float | None

    def to_dict(self) -> dict:
        return {
            "dijkstra": self.dijkstra.to_dict() if self.dijkstra else None,
            "astar": self.astar.to_dict() if self.astar else None,
            "delta_distance_km": self.delta_distance_km,
            "delta_duration_s": self.delta_duration_s,
        }


def _check_slot(series: WeatherSeries, slot: int) -> None:
    if not 0 <= slot < series.slot_count:
        raise SlotOutOfRange(slot, series.slot_count)


def traverse_edge(
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    a: int,
    b: int,
    distance_km: float,
    v_nominal: float,
    blocked: frozenset[int],
) -> tuple[float, float] | None:
    """(v_adj_ms, duration_s) for flying a->b in the given slot, or None if gated.

    Gating looks at both endpoint samples; speed uses the departure endpoint.
    """
    if a in blocked or b in blocked:
        return None
    sample_a = series.sample(slot, a)
    sample_b = series.sample(slot, b)
    if not (gating_ok(sample_a, limits) and gating_ok(sample_b, limits)):
        return None
    sta, stb = net.station(a), net.station(b)
    if sta.x_km == stb.x_km and sta.y_km == stb.y_km:
        # Co-located stations: no along-track wind component to speak of.
        beta = 0.0
    else:
        beta = bearing((sta.x_km, sta.y_km), (stb.x_km, stb.y_km))
    v_adj = adjusted_speed(v_nominal, sample_a, beta, limits)
    if v_adj is None:
        return None
    return v_adj, distance_km * 1000.0 / v_adj


def edge_cost(
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    mode: CostMode,
    edge: tuple[int, int],
    v_nominal: float,
    blocked: frozenset[int] = frozenset(),
) -> float | None:
    """Cost of traversing edge (a, b), or None when impassable in this slot."""
    _check_slot(series, slot)
    a, b = edge
    distance_km = net.edge_distance(a, b)
    if distance_km is None:
        raise UnknownEdge(a, b)
    traversal = traverse_edge(net, series, slot, limits, a, b, distance_km, v_nominal, blocked)
    if traversal is None:
        return None
    if mode is CostMode.DISTANCE:
        return distance_km
    return traversal[1]


def _single_node_plan(node: int) -> RoutePlan:
    return RoutePlan(node_sequence=[node], total_distance_km=0.0, total_duration_s=0.0, per_leg=[])


def plan_for_path(
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    v_nominal: float,
    nodes: list[int],
    blocked: frozenset[int] = frozenset(),
) -> RoutePlan | None:
    """Build a RoutePlan along an explicit node sequence; None if any edge is gated."""
    _check_slot(series, slot)
    if len(nodes) == 1:
        net.station(nodes[0])
        return _single_node_plan(nodes[0])
    per_leg: list[tuple[int, int, float, float, float]] = []
    total_d = total_t = 0.0
    for a, b in zip(nodes, nodes[1:]):
        distance_km = net.edge_distance(a, b)
        if distance_km is None:
            raise UnknownEdge(a, b)
        traversal = traverse_edge(net, series, slot, limits, a, b, distance_km, v_nominal, blocked)
        if traversal is None:
            return None
        v_adj, duration = traversal
        per_leg.append((a, b, distance_km, v_adj, duration))
        total_d += distance_km
        total_t += duration
    return RoutePlan(
        node_sequence=list(nodes),
        total_distance_km=total_d,
        total_duration_s=total_t,
        per_leg=per_leg,
    )


def _heuristic_fn(net, goal, mode: CostMode, h: HeuristicMode, v_nominal: float):
    if h is HeuristicMode.ZERO:
        return lambda n: 0.0
    if mode is CostMode.DISTANCE:
        return lambda n: heuristic(net, n, goal)
    if h is HeuristicMode.ADMISSIBLE:
        # v_adj never exceeds the cap, so this never overestimates time.
        return lambda n: heuristic(net, n, goal) * 1000.0 / (SPEED_CAP_FACTOR * v_nominal)
    return lambda n: heuristic(net, n, goal) * 1000.0 / v_nominal


def _search(
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    mode: CostMode,
    v_nominal: float,
    src: int,
    dst: int,
    h_fn,
    blocked: frozenset[int],
) -> RoutePlan | None:
    """Best-first search settling each node at first pop.

    Heap keys are (g + h, hops, path), which realises the fewer-hops then
    lexicographic tie-break; with h == 0 this is plain Dijkstra.
    """
    _check_slot(series, slot)
    net.station(src)
    net.station(dst)
    if src == dst:
        return _single_node_plan(src)
    if src in blocked or dst in blocked:
        return None

    heap: list[tuple[float, int, tuple[int, ...], float]] = [(h_fn(src), 0, (src,), 0.0)]
    settled: set[int] = set()
    while heap:
        _, hops, path, g = heapq.heappop(heap)
        node = path[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == dst:
            return plan_for_path(net, series, slot, limits, v_nominal, list(path), blocked)
        for nbr, distance_km in neighbors(net, node):
            if nbr in settled or nbr in path:
                continue
            traversal = traverse_edge(net, series, slot, limits, node, nbr, distance_km, v_nominal, blocked)
            if traversal is None:
                continue
            step = distance_km if mode is CostMode.DISTANCE else traversal[1]
            g2 = g + step
            heapq.heappush(heap, (g2 + h_fn(nbr), hops + 1, path + (nbr,), g2))
    return None


def dijkstra(
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    mode: CostMode,
    v_nominal: float,
    src: int,
    dst: int,
    blocked: frozenset[int] = frozenset(),
) -> RoutePlan | None:
    """Minimum-cost route under the chosen mode, or None when disconnected."""
    return _search(net, series, slot, limits, mode, v_nominal, src, dst, lambda n: 0.0, blocked)


def astar(
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    mode: CostMode,
    v_nominal: float,
    src: int,
    dst: int,
    h: HeuristicMode = HeuristicMode.ADMISSIBLE,
    blocked: frozenset[int] = frozenset(),
) -> RoutePlan | None:
    """A* route; with an ADMISSIBLE heuristic the cost matches dijkstra."""
    h_fn = _heuristic_fn(net, dst, mode, h, v_nominal)
    return _search(net, series, slot, limits, mode, v_nominal, src, dst, h_fn, blocked)


def compare_routes(
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    v_nominal: float,
    src: int,
    dst: int,
    mode: CostMode = CostMode.WEATHER_TIME,
    h: HeuristicMode = HeuristicMode.PAPER_NOMINAL,
) -> ComparisonReport:
    """Run both algorithms on the same query and report the deltas (A* - Dijkstra)."""
    d_plan = dijkstra(net, series, slot, limits, mode, v_nominal, src, dst)
    a_plan = astar(net, series, slot, limits, mode, v_nominal, src, dst, h)
    delta_d = delta_t = None
    if d_plan is not None and a_plan is not None:
        delta_d = a_plan.total_distance_km - d_plan.total_distance_km
        delta_t = a_plan.total_duration_s - d_plan.total_duration_s
    return ComparisonReport(
        dijkstra=d_plan, astar=a_plan,
        delta_distance_km=delta_d, delta_duration_s=delta_t,
    )

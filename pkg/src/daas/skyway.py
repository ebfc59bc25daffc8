"""Skyway network graph: stations, flight corridors, and the straight-line heuristic.

Coordinates are planar kilometres. Edges are undirected and must be at least
as long as the straight line between their endpoints, which keeps the
heuristic admissible for distance-cost searches.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DegenerateSegment, ParseError, UnknownStation, ValidationError

# Absolute slack allowed when checking distance_km >= straight-line length.
ADMISSIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class Station:
    id: int
    x_km: float
    y_km: float
    is_recharge: bool = False


@dataclass(frozen=True)
class Edge:
    a: int
    b: int
    distance_km: float

    def key(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


@dataclass
class SkywayNetwork:
    stations: list[Station]
    edges: list[Edge]
    _by_id: dict[int, Station] = field(init=False, repr=False)
    _adj: dict[int, list[tuple[int, float]]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._by_id = {s.id: s for s in self.stations}
        self._adj = {s.id: [] for s in self.stations}
        for e in self.edges:
            self._adj[e.a].append((e.b, e.distance_km))
            self._adj[e.b].append((e.a, e.distance_km))
        for lst in self._adj.values():
            lst.sort()

    def station(self, station_id: int) -> Station:
        try:
            return self._by_id[station_id]
        except KeyError:
            raise UnknownStation(station_id) from None

    def has_station(self, station_id: int) -> bool:
        return station_id in self._by_id

    def edge_distance(self, a: int, b: int) -> float | None:
        """Distance of the edge a-b, or None when the stations are not joined."""
        for nid, dist in self._adj.get(a, []):
            if nid == b:
                return dist
        return None

    def station_ids(self) -> list[int]:
        return sorted(self._by_id)


def euclidean(a: Station, b: Station) -> float:
    return math.hypot(a.x_km - b.x_km, a.y_km - b.y_km)


def validate_network(stations: list[Station], edges: list[Edge]) -> SkywayNetwork:
    """Check every structural invariant; raise ValidationError listing all violations."""
    violations: list[str] = []
    by_id: dict[int, Station] = {}
    for s in stations:
        if s.id < 0:
            violations.append(f"station id {s.id} is negative")
        if s.id in by_id:
            violations.append(f"duplicate station id {s.id}")
        if not (math.isfinite(s.x_km) and math.isfinite(s.y_km)):
            violations.append(f"station {s.id} has non-finite coordinates")
        by_id[s.id] = s

    seen_pairs: set[tuple[int, int]] = set()
    for e in edges:
        if e.a == e.b:
            violations.append(f"edge {e.a}-{e.b} is a self-loop")
            continue
        if e.a not in by_id or e.b not in by_id:
            violations.append(f"edge {e.a}-{e.b} references a missing station")
            continue
        key = (min(e.a, e.b), max(e.a, e.b))
        if key in seen_pairs:
            violations.append(f"duplicate edge between {key[0]} and {key[1]}")
        seen_pairs.add(key)
        straight = euclidean(by_id[e.a], by_id[e.b])
        if e.distance_km < straight - ADMISSIBILITY_TOL:
            violations.append(
                f"edge {e.a}-{e.b} distance {e.distance_km} shorter than straight line {straight:.6f}"
            )
        if not math.isfinite(e.distance_km):
            violations.append(f"edge {e.a}-{e.b} has non-finite distance")

    if violations:
        raise ValidationError(violations)
    return SkywayNetwork(stations=list(stations), edges=list(edges))


def load_network(path: str | Path) -> SkywayNetwork:
    """Load and validate a network JSON document.

    Edges without an explicit distance_km default to the straight-line
    distance between their endpoints.
    """
    try:
        with open(path, encoding="utf-8") as fp:
            doc = json.load(fp)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read network file {path}: {exc}") from exc
    return network_from_dict(doc)


def network_from_dict(doc: dict) -> SkywayNetwork:
    try:
        stations = [
            Station(
                id=int(s["id"]),
                x_km=float(s["x_km"]),
                y_km=float(s["y_km"]),
                is_recharge=bool(s.get("is_recharge", False)),
            )
            for s in doc["stations"]
        ]
        by_id = {s.id: s for s in stations}
        edges = []
        for e in doc.get("edges", []):
            a, b = int(e["a"]), int(e["b"])
            if "distance_km" in e and e["distance_km"] is not None:
                dist = float(e["distance_km"])
            elif a in by_id and b in by_id:
                dist = euclidean(by_id[a], by_id[b])
            else:
                dist = float("nan")
            edges.append(Edge(a=a, b=b, distance_km=dist))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed network document: {exc}") from exc
    return validate_network(stations, edges)


def network_to_dict(net: SkywayNetwork) -> dict:
    return {
        "stations": [
            {"id": s.id, "x_km": s.x_km, "y_km": s.y_km, "is_recharge": s.is_recharge}
            for s in net.stations
        ],
        "edges": [{"a": e.a, "b": e.b, "distance_km": e.distance_km} for e in net.edges],
    }


def heuristic(net: SkywayNetwork, n: int, g: int) -> float:
    """Straight-line distance (km) between stations n and g."""
    return euclidean(net.station(n), net.station(g))


def neighbors(net: SkywayNetwork, n: int) -> list[tuple[int, float]]:
    """(station id, distance_km) pairs adjacent to n, ascending by id."""
    net.station(n)
    return list(net._adj[n])


def bearing(frm: tuple[float, float], to: tuple[float, float]) -> float:
    """Travel bearing in degrees, clockwise from the +y axis, in [0, 360).

    bearing((0,0),(0,1)) == 0 (north), bearing((0,0),(1,0)) == 90 (east).
    """
    dx = to[0] - frm[0]
    dy = to[1] - frm[1]
    if dx == 0.0 and dy == 0.0:
        raise DegenerateSegment(f"identical points {frm}")
    return math.degrees(math.atan2(dx, dy)) % 360.0

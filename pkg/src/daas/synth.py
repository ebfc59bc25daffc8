"""Seeded generators for networks, weather series, and fleets.

The published experiments never shipped their data, so every documented run
here is reproduced from these generators plus a seed.
"""

from __future__ import annotations

import math
import random

from .fleet import Drone
from .skyway import Edge, SkywayNetwork, Station, validate_network
from .weather import WeatherSample, WeatherSeries


def gen_network(
    n_stations: int,
    seed: int,
    box_km: float = 30.0,
    k_nearest: int = 3,
    recharge_fraction: float = 0.4,
) -> SkywayNetwork:
    """Random connected network: k-nearest-neighbour edges plus component stitching.

    Edge distances are the straight line inflated by up to 25% (winding
    corridors), which keeps the admissibility invariant by construction.
    """
    if n_stations < 2:
        raise ValueError("need at least 2 stations")
    rng = random.Random(seed)
    stations = [
        Station(
            id=i,
            x_km=round(rng.uniform(0.0, box_km), 2),
            y_km=round(rng.uniform(0.0, box_km), 2),
            is_recharge=rng.random() < recharge_fraction,
        )
        for i in range(n_stations)
    ]

    def dist(a: Station, b: Station) -> float:
        return math.hypot(a.x_km - b.x_km, a.y_km - b.y_km)

    pairs: set[tuple[int, int]] = set()
    for s in stations:
        nearest = sorted(
            (o for o in stations if o.id != s.id), key=lambda o: (dist(s, o), o.id)
        )[:k_nearest]
        for o in nearest:
            pairs.add((min(s.id, o.id), max(s.id, o.id)))

    # Stitch components together via their closest station pairs.
    def components(edge_pairs: set[tuple[int, int]]) -> list[set[int]]:
        parent = {s.id: s.id for s in stations}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in edge_pairs:
            parent[find(a)] = find(b)
        groups: dict[int, set[int]] = {}
        for s in stations:
            groups.setdefault(find(s.id), set()).add(s.id)
        return sorted(groups.values(), key=min)

    comps = components(pairs)
    while len(comps) > 1:
        base = comps[0]
        best = None
        for other in comps[1:]:
            for a in sorted(base):
                for b in sorted(other):
                    d = dist(stations[a], stations[b])
                    if best is None or (d, a, b) < best:
                        best = (d, a, b)
        _, a, b = best
        pairs.add((min(a, b), max(a, b)))
        comps = components(pairs)

    edges = []
    for a, b in sorted(pairs):
        straight = dist(stations[a], stations[b])
        edges.append(Edge(a=a, b=b, distance_km=round(straight * (1.0 + rng.uniform(0.0, 0.25)), 3)))
    return validate_network(stations, edges)


def gen_weather(net: SkywayNetwork, slots: int, seed: int) -> WeatherSeries:
    """Seasonal-ish weather per (slot, station): mostly flyable, occasionally gated."""
    rng = random.Random(seed)
    samples: dict[tuple[int, int], WeatherSample] = {}
    for slot in range(slots):
        season = math.sin(2.0 * math.pi * (slot % 12) / 12.0)
        for station in net.station_ids():
            if rng.random() < 0.05:
                wind = rng.uniform(14.0, 24.0)  # gusty month, may exceed gating
            else:
                wind = rng.uniform(0.0, 12.0)
            precip = 0.0 if rng.random() < 0.75 else rng.uniform(0.1, 11.0)
            samples[(slot, station)] = WeatherSample(
                temperature_c=round(15.0 + 10.0 * season + rng.uniform(-3.0, 3.0), 2),
                wind_speed_ms=round(wind, 2),
                wind_direction_deg=round(rng.uniform(0.0, 359.9), 1),
                humidity_pct=round(rng.uniform(20.0, 95.0), 2),
                precipitation_mm=round(precip, 2),
            )
    return WeatherSeries(samples, slots)


def gen_fleet(net: SkywayNetwork, n_drones: int, seed: int) -> list[Drone]:
    """Drones homed at random stations with mildly varied capabilities."""
    rng = random.Random(seed)
    ids = net.station_ids()
    drones = []
    for i in range(n_drones):
        home = ids[rng.randrange(len(ids))]
        capacity = rng.choice([1200.0, 1500.0, 1800.0])
        drones.append(
            Drone(
                id=i,
                home_station=home,
                current_station=home,
                cruise_speed_ms=rng.choice([15.0, 18.0, 20.0, 22.0, 25.0]),
                battery_capacity_wh=capacity,
                battery_level_wh=capacity,
                payload_capacity_kg=rng.choice([10.0, 12.0, 15.0]),
                range_km=rng.choice([50.0, 60.0, 80.0]),
            )
        )
    return drones

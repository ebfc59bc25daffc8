"""Drone selection and multi-drone composition over a fleet snapshot.

"Best" means earliest completion (positioning plus delivery flight time),
tie-broken by lowest drone id. When no single drone can cover a request the
route is segmented greedily at recharge stations, longest servable prefix
first, backing off to shorter prefixes when the remaining suffix cannot be
covered; battery drain is tracked across segments so every returned leg
replays cleanly through the fleet module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import fleet as fleet_mod
from .errors import InfeasiblePlan, NoFeasibleDrone
from .fleet import Drone, DroneStatus, EnergyModel, energy_required
from .intake import StructuredRequest
from .routing import CostMode, RoutePlan, dijkstra, plan_for_path
from .skyway import SkywayNetwork
from .weather import SafetyLimits, WeatherSeries

NO_ROUTE = "no_route"


@dataclass(frozen=True)
class Leg:
    drone_id: int
    from_station: int
    to_station: int
    route: RoutePlan
    payload_kg: float
    depart_s: float
    arrive_s: float
    # Empty repositioning flight flown before the package is picked up.
    positioning: RoutePlan | None = None
    positioning_depart_s: float = 0.0


@dataclass(frozen=True)
class DeliveryPlan:
    request_id: int
    legs: list[Leg]
    handoff_stations: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "request_id": self.request_id,
            "handoff_stations": list(self.handoff_stations),
            "legs": [
                {
                    "drone_id": leg.drone_id,
                    "from_station": leg.from_station,
                    "to_station": leg.to_station,
                    "payload_kg": leg.payload_kg,
                    "depart_s": leg.depart_s,
                    "arrive_s": leg.arrive_s,
                    "route": leg.route.to_dict(),
                    "positioning": leg.positioning.to_dict() if leg.positioning else None,
                }
                for leg in self.legs
            ],
        }


@dataclass(frozen=True)
class Selection:
    drone_id: int
    positioning: RoutePlan | None
    delivery: RoutePlan
    total_duration_s: float


def _mission_reasons(drone: Drone, model: EnergyModel, legs: list[tuple[float, float]]) -> list[str]:
    """can_serve extended to a chain of (distance_km, payload_kg) legs."""
    reasons = []
    if drone.status is not DroneStatus.IDLE:
        reasons.append(fleet_mod.UNAVAILABLE)
    if any(p > drone.payload_capacity_kg for _, p in legs):
        reasons.append(fleet_mod.PAYLOAD_EXCEEDS_CAPACITY)
        return reasons
    if any(d > drone.range_km for d, _ in legs):
        reasons.append(fleet_mod.EXCEEDS_RANGE)
    total = sum(energy_required(model, drone, d, p) for d, p in legs)
    if drone.battery_level_wh < total * (1.0 + model.reserve_fraction):
        reasons.append(fleet_mod.INSUFFICIENT_BATTERY)
    return reasons


def _candidate(
    drone: Drone,
    pickup: int,
    delivery: RoutePlan,
    payload_kg: float,
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    model: EnergyModel,
) -> Selection | list[str]:
    """Selection for one drone against a fixed delivery route, or its failure reasons."""
    positioning = dijkstra(
        net, series, slot, limits, CostMode.WEATHER_TIME, drone.cruise_speed_ms,
        drone.current_station, pickup,
    )
    if positioning is None:
        return [NO_ROUTE]
    if positioning.total_distance_km == 0.0:
        positioning = None
    mission = []
    if positioning is not None:
        mission.append((positioning.total_distance_km, 0.0))
    mission.append((delivery.total_distance_km, payload_kg))
    reasons = _mission_reasons(drone, model, mission)
    if reasons:
        return reasons
    pos_t = positioning.total_duration_s if positioning else 0.0
    return Selection(
        drone_id=drone.id,
        positioning=positioning,
        delivery=delivery,
        total_duration_s=pos_t + delivery.total_duration_s,
    )


def _select_for_route(
    drones: list[Drone],
    pickup: int,
    destination: int,
    payload_kg: float,
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    model: EnergyModel,
    fixed_path: list[int] | None = None,
) -> tuple[Selection | None, dict[int, list[str]]]:
    """Best (earliest completion, lowest id) drone for pickup -> destination.

    With fixed_path the delivery must follow that node sequence; otherwise
    each drone gets its own optimal route at its own cruise speed.
    """
    best: Selection | None = None
    reasons: dict[int, list[str]] = {}
    for drone in sorted(drones, key=lambda d: d.id):
        if fixed_path is not None:
            delivery = plan_for_path(net, series, slot, limits, drone.cruise_speed_ms, fixed_path)
        else:
            delivery = dijkstra(
                net, series, slot, limits, CostMode.WEATHER_TIME, drone.cruise_speed_ms,
                pickup, destination,
            )
        if delivery is None:
            reasons[drone.id] = [NO_ROUTE]
            continue
        outcome = _candidate(drone, pickup, delivery, payload_kg, net, series, slot, limits, model)
        if isinstance(outcome, Selection):
            if best is None or outcome.total_duration_s < best.total_duration_s - 1e-12:
                best = outcome
        else:
            reasons[drone.id] = outcome
    return best, reasons


def select_drone(
    fleet: list[Drone],
    request: StructuredRequest,
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    model: EnergyModel,
) -> Selection:
    """Single best drone able to fly positioning plus the whole delivery."""
    net.station(request.start_node)
    net.station(request.destination_node)
    best, reasons = _select_for_route(
        fleet, request.start_node, request.destination_node, request.payload_kg,
        net, series, slot, limits, model,
    )
    if best is None:
        raise NoFeasibleDrone(reasons)
    return best


def _make_leg(selection: Selection, payload_kg: float, start_time_s: float) -> Leg:
    pos_t = selection.positioning.total_duration_s if selection.positioning else 0.0
    depart = start_time_s + pos_t
    return Leg(
        drone_id=selection.drone_id,
        from_station=selection.delivery.node_sequence[0],
        to_station=selection.delivery.node_sequence[-1],
        route=selection.delivery,
        payload_kg=payload_kg,
        depart_s=depart,
        arrive_s=depart + selection.delivery.total_duration_s,
        positioning=selection.positioning,
        positioning_depart_s=start_time_s,
    )


def _commit(working: dict[int, Drone], model: EnergyModel, leg: Leg) -> None:
    drone = working[leg.drone_id]
    if leg.positioning is not None:
        drone = fleet_mod.apply_flight(
            drone, model, leg.positioning.total_distance_km, 0.0,
            leg.positioning.total_duration_s, leg.positioning.node_sequence[-1],
        )
    drone = fleet_mod.apply_flight(
        drone, model, leg.route.total_distance_km, leg.payload_kg,
        leg.route.total_duration_s, leg.to_station,
    )
    working[leg.drone_id] = drone


def _cover(
    working: dict[int, Drone],
    from_node: int,
    destination: int,
    payload_kg: float,
    now_s: float,
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    model: EnergyModel,
    trace: list[str],
) -> list[Leg] | None:
    drones = list(working.values())
    whole, _ = _select_for_route(
        drones, from_node, destination, payload_kg, net, series, slot, limits, model,
    )
    if whole is not None:
        return [_make_leg(whole, payload_kg, now_s)]

    # Corridor for picking handoff points: the optimal path at the most
    # permissive (fastest) cruise speed in the fleet.
    if not drones:
        trace.append(f"{from_node}->{destination}: empty fleet")
        return None
    v_ref = max(d.cruise_speed_ms for d in drones)
    corridor = dijkstra(
        net, series, slot, limits, CostMode.WEATHER_TIME, v_ref, from_node, destination,
    )
    if corridor is None:
        trace.append(f"{from_node}->{destination}: no passable route")
        return None
    path = corridor.node_sequence
    handoff_idxs = [
        i for i in range(1, len(path) - 1) if net.station(path[i]).is_recharge
    ]
    for i in reversed(handoff_idxs):  # longest prefix first
        segment_path = path[: i + 1]
        seg_best, _ = _select_for_route(
            drones, from_node, path[i], payload_kg, net, series, slot, limits, model,
            fixed_path=segment_path,
        )
        if seg_best is None:
            trace.append(f"segment {from_node}->{path[i]}: no feasible drone")
            continue
        leg = _make_leg(seg_best, payload_kg, now_s)
        branch = dict(working)
        _commit(branch, model, leg)
        rest = _cover(
            branch, path[i], destination, payload_kg, leg.arrive_s,
            net, series, slot, limits, model, trace,
        )
        if rest is not None:
            return [leg] + rest
        trace.append(f"segment {from_node}->{path[i]}: suffix from {path[i]} failed")
    trace.append(f"{from_node}->{destination}: no servable prefix")
    return None


def compose(
    fleet: list[Drone],
    request: StructuredRequest,
    net: SkywayNetwork,
    series: WeatherSeries,
    slot: int,
    limits: SafetyLimits,
    model: EnergyModel,
    now_s: float = 0.0,
) -> DeliveryPlan:
    """Cover the request with one drone if possible, else chained segments."""
    net.station(request.start_node)
    net.station(request.destination_node)
    working = {d.id: d for d in fleet}
    trace: list[str] = []
    legs = _cover(
        working, request.start_node, request.destination_node, request.payload_kg,
        now_s, net, series, slot, limits, model, trace,
    )
    if legs is None:
        raise InfeasiblePlan(trace)
    return DeliveryPlan(
        request_id=request.request_id,
        legs=legs,
        handoff_stations=[leg.to_station for leg in legs[:-1]],
    )

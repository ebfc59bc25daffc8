"""Deterministic discrete-event fleet simulation over monthly weather slots.

Requests arrive at seeded times, get planned by the planner, and execute
edge by edge. At every node arrival the next edge is re-checked against the
then-current slot (weather gating plus injected disturbances); a gated edge
triggers a re-plan from that node, a dead end aborts the delivery with an
error message. Multi-drone plans hand the package over at recharge stations
and re-plan the remainder there. Identical config and seed give
byte-identical flight and event logs.
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from . import fleet as fleet_mod
from .errors import (
    ConfigError,
    DaasError,
    ParseError,
    SlotOutOfRange,
)
from .fleet import Drone, DroneStatus, EnergyModel, MaintenancePolicy, load_fleet
from .intake import StructuredRequest, load_corpus
from .planner import DeliveryPlan, compose
from .routing import CostMode, dijkstra, traverse_edge
from .skyway import SkywayNetwork, load_network
from .weather import SafetyLimits, WeatherSeries, load_weather_csv

FLIGHTS_FILENAME = "flights.jsonl"
EVENTS_FILENAME = "events.jsonl"
REPORT_FILENAME = "report.json"

DEFAULT_SLOT_DURATION_S = 2_592_000.0  # 30 days
MAX_SEGMENTS_PER_REQUEST = 50


class EventKind(Enum):
    REQUEST_ARRIVAL = "RequestArrival"
    LEG_DEPARTURE = "LegDeparture"
    LEG_ARRIVAL = "LegArrival"
    HANDOFF = "Handoff"
    RECHARGE_COMPLETE = "RechargeComplete"
    MAINTENANCE_START = "MaintenanceStart"
    MAINTENANCE_END = "MaintenanceEnd"
    ROUTE_DISTURBANCE = "RouteDisturbance"


_KIND_RANK = {kind: rank for rank, kind in enumerate(EventKind)}


@dataclass(frozen=True)
class SimEvent:
    time_s: float
    kind: EventKind
    payload: dict
    seq: int = 0

    def to_dict(self) -> dict:
        return {"time_s": self.time_s, "kind": self.kind.value, "seq": self.seq,
                "payload": self.payload}


@dataclass(frozen=True)
class FlightLogEntry:
    request_id: int
    drone_id: int | None
    leg_index: int
    from_station: int
    to_station: int
    depart_s: float
    arrive_s: float
    distance_km: float
    duration_s: float
    battery_remaining_wh: float
    status: str  # Completed | Aborted | Rerouted
    error_message: str | None = None

    def to_dict(self) -> dict:
        return {
            "request_id": self.request_id,
            "drone_id": self.drone_id,
            "leg_index": self.leg_index,
            "from": self.from_station,
            "to": self.to_station,
            "depart_s": self.depart_s,
            "arrive_s": self.arrive_s,
            "distance_km": self.distance_km,
            "duration_s": self.duration_s,
            "battery_remaining_wh": self.battery_remaining_wh,
            "status": self.status,
            "error_message": self.error_message,
        }


@dataclass(frozen=True)
class SimReport:
    requests_total: int
    requests_completed: int
    requests_failed: int
    completion_rate: float
    total_distance_km: float
    mean_delivery_duration_s: float
    per_slot: dict[str, dict]
    maintenance_events: int
    reroute_events: int

    def to_dict(self) -> dict:
        return {
            "requests_total": self.requests_total,
            "requests_completed": self.requests_completed,
            "requests_failed": self.requests_failed,
            "completion_rate": self.completion_rate,
            "total_distance_km": self.total_distance_km,
            "mean_delivery_duration_s": self.mean_delivery_duration_s,
            "per_slot": self.per_slot,
            "maintenance_events": self.maintenance_events,
            "reroute_events": self.reroute_events,
        }


@dataclass
class SimConfig:
    network_path: str
    weather_path: str
    fleet_path: str
    requests_path: str
    slot_duration_s: float = DEFAULT_SLOT_DURATION_S
    slot_count: int = 48
    seed: int = 0
    limits: SafetyLimits = field(default_factory=SafetyLimits)
    energy: EnergyModel = field(default_factory=EnergyModel)
    maintenance: MaintenancePolicy = field(default_factory=MaintenancePolicy)
    output_dir: str = "sim_out"
    charge_rate_wh_per_s: float = 1.0
    degrade_delta_per_cycle: float = 0.002
    # After a mission a drone below this fraction of effective capacity flies
    # itself to the nearest recharge station; 0 disables the behaviour.
    ferry_below_fraction: float = 0.6
    disturbances: list[tuple[int, int]] = field(default_factory=list)  # (slot, station)

    @classmethod
    def from_file(cls, path: str | Path) -> "SimConfig":
        try:
            with open(path, encoding="utf-8") as fp:
                doc = json.load(fp)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            return cls(
                network_path=doc["network_path"],
                weather_path=doc["weather_path"],
                fleet_path=doc["fleet_path"],
                requests_path=doc["requests_path"],
                slot_duration_s=float(doc.get("slot_duration_s", DEFAULT_SLOT_DURATION_S)),
                slot_count=int(doc.get("slot_count", 48)),
                seed=int(doc.get("seed", 0)),
                limits=SafetyLimits(**doc.get("limits", {})),
                energy=EnergyModel(**doc.get("energy", {})),
                maintenance=MaintenancePolicy(**doc.get("maintenance", {})),
                output_dir=doc.get("output_dir", "sim_out"),
                charge_rate_wh_per_s=float(doc.get("charge_rate_wh_per_s", 1.0)),
                degrade_delta_per_cycle=float(doc.get("degrade_delta_per_cycle", 0.002)),
                ferry_below_fraction=float(doc.get("ferry_below_fraction", 0.6)),
                disturbances=[(int(s), int(n)) for s, n in doc.get("disturbances", [])],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad config {path}: {exc}") from exc


FERRY_REQUEST_ID = 0  # flight-log request id for fleet-service ferry flights


@dataclass
class _Flight:
    """One scheduled flight: positioning, a package-carrying leg, or a ferry."""
    request_id: int
    drone_id: int
    nodes: list[int]  # planned node sequence, nodes[0] is the departure station
    payload_kg: float
    kind: str  # positioning | delivery | ferry
    leg_target: int  # the flight chain's end station (destination or handoff)
    # For positioning flights: the package route to fly once at the pickup.
    delivery_nodes: list[int] | None = None

    @property
    def is_delivery(self) -> bool:
        return self.kind == "delivery"


class Simulation:
    """Loads all inputs eagerly so file errors surface before any output is written."""

    def __init__(self, config: SimConfig):
        self.config = config
        if config.slot_duration_s <= 0:
            raise ConfigError(f"slot_duration_s must be positive, got {config.slot_duration_s}")
        if config.slot_count < 1:
            raise ConfigError(f"slot_count must be >= 1, got {config.slot_count}")
        self.net: SkywayNetwork = load_network(config.network_path)
        self.series: WeatherSeries = load_weather_csv(config.weather_path, self.net.station_ids())
        if config.slot_count > self.series.slot_count:
            raise ConfigError(
                f"slot_count {config.slot_count} exceeds weather series of {self.series.slot_count} slots"
            )
        self.initial_fleet: list[Drone] = load_fleet(config.fleet_path)
        for d in self.initial_fleet:
            self.net.station(d.current_station)
        self.requests: list[StructuredRequest] = [
            rec.structured for rec in load_corpus(config.requests_path)
        ]
        for req in self.requests:
            self.net.station(req.start_node)
            self.net.station(req.destination_node)
        self._pending_disturbances: list[tuple[int, int]] = []
        for slot, station in config.disturbances:
            self.inject_disturbance(slot, station)
        self._reset()

    # ---------------------------------------------------------------- state

    def _reset(self) -> None:
        self.drones: dict[int, Drone] = {d.id: d for d in self.initial_fleet}
        self.flight_entries: list[FlightLogEntry] = []
        self.events: list[SimEvent] = []
        self._heap: list[tuple[float, int, int, SimEvent]] = []
        self._seq = 0
        self._blocked: set[tuple[int, int]] = set()  # (slot, station)
        self._leg_index: dict[int, int] = {}
        self._segments: dict[int, int] = {}
        self._requests_by_id = {r.request_id: r for r in self.requests}
        # per-drone ledger for the conservation invariant
        self.energy_consumed_wh: dict[int, float] = {d.id: 0.0 for d in self.initial_fleet}
        self.energy_recharged_wh: dict[int, float] = {d.id: 0.0 for d in self.initial_fleet}

    def inject_disturbance(self, slot: int, station: int) -> None:
        """Close every corridor touching the station for the given slot."""
        if not 0 <= slot < self.config.slot_count:
            raise SlotOutOfRange(slot, self.config.slot_count)
        self.net.station(station)
        self._pending_disturbances.append((slot, station))

    def _slot_at(self, time_s: float) -> int:
        slot = int(time_s // self.config.slot_duration_s)
        return min(max(slot, 0), self.config.slot_count - 1)

    def _blocked_at(self, slot: int) -> frozenset[int]:
        return frozenset(st for sl, st in self._blocked if sl == slot)

    def _push(self, time_s: float, kind: EventKind, payload: dict) -> None:
        event = SimEvent(time_s=time_s, kind=kind, payload=payload, seq=self._seq)
        heapq.heappush(self._heap, (time_s, _KIND_RANK[kind], self._seq, event))
        self._seq += 1

    def _log_entry(self, entry: FlightLogEntry) -> None:
        self.flight_entries.append(entry)

    def _next_leg_index(self, request_id: int) -> int:
        idx = self._leg_index.get(request_id, 0)
        self._leg_index[request_id] = idx + 1
        return idx

    # ------------------------------------------------------------------ run

    def run(self) -> SimReport:
        self._reset()
        for slot, station in self._pending_disturbances:
            self._blocked.add((slot, station))
            self._push(
                slot * self.config.slot_duration_s,
                EventKind.ROUTE_DISTURBANCE,
                {"slot": slot, "station": station,
                 "message": f"station {station} closed for slot {slot}"},
            )

        rng = random.Random(self.config.seed)
        for req in self.requests:
            slot = rng.randrange(self.config.slot_count)
            offset = rng.uniform(0.0, self.config.slot_duration_s)
            self._push(
                slot * self.config.slot_duration_s + offset,
                EventKind.REQUEST_ARRIVAL,
                {"request_id": req.request_id, "start_node": req.start_node,
                 "destination_node": req.destination_node, "payload_kg": req.payload_kg},
            )

        while self._heap:
            _, _, _, event = heapq.heappop(self._heap)
            self.events.append(event)
            self._dispatch(event)

        report = _build_report(
            self.flight_entries,
            maintenance_events=sum(
                1 for e in self.events if e.kind is EventKind.MAINTENANCE_START
            ),
            slot_duration_s=self.config.slot_duration_s,
        )
        self._write_outputs(report)
        return report

    def _write_outputs(self, report: SimReport) -> None:
        out = Path(self.config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / FLIGHTS_FILENAME, "w", encoding="utf-8") as fp:
            for entry in self.flight_entries:
                fp.write(json.dumps(entry.to_dict()) + "\n")
        with open(out / EVENTS_FILENAME, "w", encoding="utf-8") as fp:
            for event in self.events:
                fp.write(json.dumps(event.to_dict()) + "\n")
        with open(out / REPORT_FILENAME, "w", encoding="utf-8") as fp:
            json.dump(report.to_dict(), fp, indent=2)
            fp.write("\n")

    # ------------------------------------------------------------- handlers

    def _dispatch(self, event: SimEvent) -> None:
        if event.kind is EventKind.REQUEST_ARRIVAL:
            req = self._requests_by_id[event.payload["request_id"]]
            self._start_segment(req, req.start_node, event.time_s)
        elif event.kind is EventKind.LEG_DEPARTURE:
            self._handle_departure(event)
        elif event.kind is EventKind.LEG_ARRIVAL:
            self._handle_arrival(event)
        elif event.kind is EventKind.HANDOFF:
            req = self._requests_by_id[event.payload["request_id"]]
            self._start_segment(req, event.payload["station"], event.time_s)
        elif event.kind is EventKind.RECHARGE_COMPLETE:
            self._handle_recharge_complete(event)
        elif event.kind is EventKind.MAINTENANCE_END:
            self._handle_maintenance_end(event)
        # MAINTENANCE_START and ROUTE_DISTURBANCE are pure markers.

    def _fail_request(self, request: StructuredRequest, from_node: int, time_s: float,
                      message: str) -> None:
        self._log_entry(FlightLogEntry(
            request_id=request.request_id,
            drone_id=None,
            leg_index=self._next_leg_index(request.request_id),
            from_station=from_node,
            to_station=request.destination_node,
            depart_s=time_s,
            arrive_s=time_s,
            distance_km=0.0,
            duration_s=0.0,
            battery_remaining_wh=0.0,
            status="Aborted",
            error_message=message,
        ))

    def _start_segment(self, request: StructuredRequest, from_node: int, time_s: float) -> None:
        """Plan from from_node to the destination and launch the first leg."""
        segments = self._segments.get(request.request_id, 0) + 1
        self._segments[request.request_id] = segments
        if segments > MAX_SEGMENTS_PER_REQUEST:
            self._fail_request(request, from_node, time_s,
                               f"exceeded {MAX_SEGMENTS_PER_REQUEST} segments")
            return
        slot = self._slot_at(time_s)
        snapshot = [self.drones[i] for i in sorted(self.drones)]
        remaining = request if from_node == request.start_node else replace(
            request, start_node=from_node
        )
        try:
            plan: DeliveryPlan = compose(
                snapshot, remaining, self.net, self.series, slot,
                self.config.limits, self.config.energy, now_s=time_s,
            )
        except DaasError as exc:
            self._fail_request(request, from_node, time_s, f"planning failed: {exc}")
            return
        leg = plan.legs[0]
        drone = self.drones[leg.drone_id]
        self.drones[leg.drone_id] = replace(drone, status=DroneStatus.ENROUTE)
        if leg.positioning is not None:
            flight = _Flight(request.request_id, leg.drone_id,
                             list(leg.positioning.node_sequence), 0.0, "positioning",
                             leg.to_station, list(leg.route.node_sequence))
        else:
            flight = _Flight(request.request_id, leg.drone_id,
                             list(leg.route.node_sequence), leg.payload_kg, "delivery",
                             leg.to_station)
        self._launch(flight, time_s)

    def _launch(self, flight: _Flight, time_s: float) -> None:
        self._push(time_s, EventKind.LEG_DEPARTURE, {
            "request_id": flight.request_id,
            "drone_id": flight.drone_id,
            "from": flight.nodes[0],
            "to": flight.nodes[-1],
            "kind": flight.kind,
            "_flight": flight,
        })

    def _handle_departure(self, event: SimEvent) -> None:
        flight: _Flight = event.payload["_flight"]
        event.payload.pop("_flight")
        drone = self.drones[flight.drone_id]
        target = flight.nodes[-1]

        # Walk the planned route edge by edge, re-checking gating against the
        # slot current at each node and re-planning around gated edges.
        node = flight.nodes[0]
        rest = flight.nodes[1:]
        t = event.time_s
        walked = replace(drone, status=DroneStatus.IDLE)
        distance = 0.0
        energy_used = 0.0
        rerouted = False
        error: str | None = None
        while node != target:
            nxt = rest[0]
            slot = self._slot_at(t)
            blocked = self._blocked_at(slot)
            dist = self.net.edge_distance(node, nxt)
            traversal = traverse_edge(
                self.net, self.series, slot, self.config.limits,
                node, nxt, dist, walked.cruise_speed_ms, blocked,
            )
            if traversal is None:
                alt = dijkstra(
                    self.net, self.series, slot, self.config.limits,
                    CostMode.WEATHER_TIME, walked.cruise_speed_ms, node, target,
                    blocked=blocked,
                )
                if alt is None:
                    error = f"no passable route from {node} to {target} in slot {slot}"
                    break
                rerouted = True
                rest = alt.node_sequence[1:]
                continue
            _, duration = traversal
            needed = fleet_mod.energy_required(
                self.config.energy, walked, dist, flight.payload_kg
            )
            if walked.battery_level_wh < needed - 1e-9:
                error = f"battery depleted at {node} ({walked.battery_level_wh:.1f} Wh left)"
                break
            walked = fleet_mod.apply_flight(
                walked, self.config.energy, dist, flight.payload_kg, duration, nxt
            )
            distance += dist
            energy_used += needed
            t += duration
            node = nxt
            rest = rest[1:]

        status = "Aborted" if error else ("Rerouted" if rerouted else "Completed")
        self._push(t, EventKind.LEG_ARRIVAL, {
            "request_id": flight.request_id,
            "drone_id": flight.drone_id,
            "at": node,
            "status": status,
            "_flight": flight,
            "_drone": walked,
            "_entry": FlightLogEntry(
                request_id=flight.request_id,
                drone_id=flight.drone_id,
                leg_index=self._next_leg_index(flight.request_id),
                from_station=flight.nodes[0],
                to_station=node,
                depart_s=event.time_s,
                arrive_s=t,
                distance_km=distance,
                duration_s=t - event.time_s,
                battery_remaining_wh=walked.battery_level_wh,
                status=status,
                error_message=error,
            ),
            "_energy": energy_used,
        })

    def _handle_arrival(self, event: SimEvent) -> None:
        flight: _Flight = event.payload.pop("_flight")
        walked: Drone = event.payload.pop("_drone")
        entry: FlightLogEntry = event.payload.pop("_entry")
        self.energy_consumed_wh[flight.drone_id] += event.payload.pop("_energy")
        self.drones[flight.drone_id] = walked
        self._log_entry(entry)
        if flight.kind == "ferry":
            self._after_mission(flight.drone_id, event.time_s)
            return
        request = self._requests_by_id[flight.request_id]

        if entry.status == "Aborted":
            self._after_mission(flight.drone_id, event.time_s)
            return
        if not flight.is_delivery:
            # Drone is at the pickup; the package leg starts immediately along
            # the composed route (the walk re-checks its edges anyway).
            self.drones[flight.drone_id] = replace(walked, status=DroneStatus.ENROUTE)
            self._launch(_Flight(
                flight.request_id, flight.drone_id, list(flight.delivery_nodes),
                request.payload_kg, "delivery", flight.leg_target,
            ), event.time_s)
            return

        # Package leg finished.
        self._after_mission(flight.drone_id, event.time_s)
        if entry.to_station == request.destination_node:
            return  # delivered
        self._push(event.time_s, EventKind.HANDOFF, {
            "request_id": flight.request_id,
            "station": entry.to_station,
        })

    def _after_mission(self, drone_id: int, time_s: float) -> None:
        """Maintenance and recharge checks once a drone has gone idle."""
        drone = self.drones[drone_id]
        drone, maint = fleet_mod.tick_maintenance(drone, self.config.maintenance, time_s)
        self.drones[drone_id] = drone
        if maint is not None and maint.kind == "start":
            self._push(time_s, EventKind.MAINTENANCE_START,
                       {"drone_id": drone_id, "until_s": maint.until_s})
            self._push(maint.until_s, EventKind.MAINTENANCE_END, {"drone_id": drone_id})
            return
        self._maybe_charge(drone_id, time_s)
        self._maybe_ferry(drone_id, time_s)

    def _maybe_charge(self, drone_id: int, time_s: float) -> None:
        drone = self.drones[drone_id]
        if drone.status is not DroneStatus.IDLE:
            return
        station = self.net.station(drone.current_station)
        deficit = drone.effective_capacity_wh - drone.battery_level_wh
        if not station.is_recharge or deficit <= 1e-9:
            return
        duration = deficit / self.config.charge_rate_wh_per_s
        self.drones[drone_id] = replace(drone, status=DroneStatus.CHARGING)
        self._push(time_s + duration, EventKind.RECHARGE_COMPLETE,
                   {"drone_id": drone_id, "dt_s": duration})

    def _maybe_ferry(self, drone_id: int, time_s: float) -> None:
        """Send a drained drone parked away from a pad to the nearest one."""
        drone = self.drones[drone_id]
        if drone.status is not DroneStatus.IDLE or self.config.ferry_below_fraction <= 0:
            return
        if self.net.station(drone.current_station).is_recharge:
            return
        if drone.battery_level_wh >= self.config.ferry_below_fraction * drone.effective_capacity_wh:
            return
        slot = self._slot_at(time_s)
        blocked = self._blocked_at(slot)
        best = None
        for station in self.net.stations:
            if not station.is_recharge:
                continue
            route = dijkstra(
                self.net, self.series, slot, self.config.limits,
                CostMode.WEATHER_TIME, drone.cruise_speed_ms,
                drone.current_station, station.id, blocked=blocked,
            )
            if route is None:
                continue
            key = (route.total_duration_s, station.id)
            if best is None or key < best[0]:
                best = (key, route)
        if best is None:
            return
        route = best[1]
        needed = fleet_mod.energy_required(
            self.config.energy, drone, route.total_distance_km, 0.0
        )
        if drone.battery_level_wh < needed:
            return  # stranded until conditions change
        self.drones[drone_id] = replace(drone, status=DroneStatus.ENROUTE)
        self._launch(_Flight(
            FERRY_REQUEST_ID, drone_id, list(route.node_sequence), 0.0, "ferry",
            route.node_sequence[-1],
        ), time_s)

    def _handle_recharge_complete(self, event: SimEvent) -> None:
        drone_id = event.payload["drone_id"]
        drone = replace(self.drones[drone_id], status=DroneStatus.IDLE)
        # Wear from past charge cycles lands now, while the battery is near
        # empty, so shrinking capacity never discards stored energy; any
        # residual clamp loss is booked as consumption to keep the ledger exact.
        wear_loss = 0.0
        cycles = drone.charge_cycles_accrued
        if cycles > 0.0:
            before_wear = drone.battery_level_wh
            drone = replace(
                fleet_mod.degrade(drone, cycles, self.config.degrade_delta_per_cycle),
                charge_cycles_accrued=0.0,
            )
            wear_loss = before_wear - drone.battery_level_wh
            self.energy_consumed_wh[drone_id] += wear_loss
        station = self.net.station(drone.current_station)
        before = drone.battery_level_wh
        drone = fleet_mod.recharge(
            drone, event.payload["dt_s"], self.config.charge_rate_wh_per_s, station
        )
        added = drone.battery_level_wh - before
        self.energy_recharged_wh[drone_id] += added
        self.drones[drone_id] = drone
        event.payload["energy_added_wh"] = added
        event.payload["wear_loss_wh"] = wear_loss
        event.payload["level_wh"] = drone.battery_level_wh

    def _handle_maintenance_end(self, event: SimEvent) -> None:
        drone_id = event.payload["drone_id"]
        drone, maint = fleet_mod.tick_maintenance(
            self.drones[drone_id], self.config.maintenance, event.time_s
        )
        self.drones[drone_id] = drone
        if maint is not None:
            event.payload["health"] = drone.battery_health
        self._maybe_charge(drone_id, event.time_s)


def run(config: SimConfig) -> SimReport:
    """Load inputs, run the whole horizon, write the three output files."""
    return Simulation(config).run()


# ------------------------------------------------------------------ reports


def _build_report(entries: list[FlightLogEntry], maintenance_events: int,
                  slot_duration_s: float) -> SimReport:
    by_request: dict[int, list[FlightLogEntry]] = {}
    for entry in entries:
        if entry.request_id == FERRY_REQUEST_ID:
            continue  # fleet-service flights count toward distance only
        by_request.setdefault(entry.request_id, []).append(entry)

    completed_ids = []
    failed_ids = []
    for request_id, request_entries in by_request.items():
        if any(e.status == "Aborted" for e in request_entries):
            failed_ids.append(request_id)
        else:
            completed_ids.append(request_id)

    total = len(by_request)
    durations = []
    for request_id in completed_ids:
        request_entries = by_request[request_id]
        durations.append(request_entries[-1].arrive_s - request_entries[0].depart_s)

    def rate(done: int, of: int) -> float:
        return 1.0 if of == 0 else done / of

    per_slot: dict[str, dict] = {}
    slot_of_request = {
        rid: int(recs[0].depart_s // slot_duration_s) for rid, recs in by_request.items()
    }
    for slot in sorted(set(slot_of_request.values())):
        ids = [rid for rid, s in slot_of_request.items() if s == slot]
        done = [rid for rid in ids if rid in set(completed_ids)]
        slot_durations = [
            by_request[rid][-1].arrive_s - by_request[rid][0].depart_s for rid in done
        ]
        per_slot[str(slot)] = {
            "requests_total": len(ids),
            "requests_completed": len(done),
            "requests_failed": len(ids) - len(done),
            "completion_rate": rate(len(done), len(ids)),
            "total_distance_km": sum(e.distance_km for rid in ids for e in by_request[rid]),
            "mean_delivery_duration_s": (
                sum(slot_durations) / len(slot_durations) if slot_durations else 0.0
            ),
        }

    return SimReport(
        requests_total=total,
        requests_completed=len(completed_ids),
        requests_failed=len(failed_ids),
        completion_rate=rate(len(completed_ids), total),
        total_distance_km=sum(e.distance_km for e in entries),
        mean_delivery_duration_s=sum(durations) / len(durations) if durations else 0.0,
        per_slot=per_slot,
        maintenance_events=maintenance_events,
        reroute_events=sum(1 for e in entries if e.status == "Rerouted"),
    )


def _parse_entry(doc: dict) -> FlightLogEntry:
    return FlightLogEntry(
        request_id=int(doc["request_id"]),
        drone_id=None if doc["drone_id"] is None else int(doc["drone_id"]),
        leg_index=int(doc["leg_index"]),
        from_station=int(doc["from"]),
        to_station=int(doc["to"]),
        depart_s=float(doc["depart_s"]),
        arrive_s=float(doc["arrive_s"]),
        distance_km=float(doc["distance_km"]),
        duration_s=float(doc["duration_s"]),
        battery_remaining_wh=float(doc["battery_remaining_wh"]),
        status=str(doc["status"]),
        error_message=doc.get("error_message"),
    )


def read_flight_log(path: str | Path) -> list[FlightLogEntry]:
    entries = []
    try:
        with open(path, encoding="utf-8") as fp:
            for lineno, line in enumerate(fp, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entries.append(_parse_entry(json.loads(line)))
                except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                    raise ParseError(f"{path}:{lineno}: bad flight entry: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read flight log {path}: {exc}") from exc
    return entries


def summarize(
    flight_log_path: str | Path,
    slot_duration_s: float = DEFAULT_SLOT_DURATION_S,
) -> SimReport:
    """Recompute the report from the written logs.

    Maintenance counts live in the event log, which sits next to the flight
    log under the run's fixed file names; when it is missing the count is 0.
    """
    entries = read_flight_log(flight_log_path)
    events_path = Path(flight_log_path).parent / EVENTS_FILENAME
    maintenance = 0
    if events_path.exists():
        with open(events_path, encoding="utf-8") as fp:
            for line in fp:
                line = line.strip()
                if not line:
                    continue
                try:
                    doc = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"{events_path}: bad event line: {exc}") from exc
                if doc.get("kind") == EventKind.MAINTENANCE_START.value:
                    maintenance += 1
    return _build_report(entries, maintenance_events=maintenance,
                         slot_duration_s=slot_duration_s)

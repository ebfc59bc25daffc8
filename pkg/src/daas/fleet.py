"""Drone state, the linear energy model, degradation, and maintenance.

All operations are pure: they take a Drone and return an updated copy, so
planners can work on snapshots while the simulator owns the live state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .errors import (
    InfeasibleLeg,
    NotAtRechargeStation,
    ParseError,
    PayloadExceedsCapacity,
    ValidationError,
)
from .skyway import Station

HEALTH_FLOOR = 0.5

# can_serve failure reasons
UNAVAILABLE = "unavailable"
PAYLOAD_EXCEEDS_CAPACITY = "payload_exceeds_capacity"
EXCEEDS_RANGE = "exceeds_range"
INSUFFICIENT_BATTERY = "insufficient_battery"


class DroneStatus(Enum):
    IDLE = "idle"
    ENROUTE = "enroute"
    CHARGING = "charging"
    MAINTENANCE = "maintenance"


@dataclass(frozen=True)
class EnergyModel:
    base_wh_per_km: float = 10.0
    payload_factor: float = 0.5
    reserve_fraction: float = 0.2

    def __post_init__(self) -> None:
        if self.base_wh_per_km <= 0 or self.payload_factor < 0 or not 0 <= self.reserve_fraction < 1:
            raise ValidationError([f"bad energy model {self}"])


@dataclass(frozen=True)
class MaintenancePolicy:
    hours_between_service: float = 100.0
    service_duration_s: float = 86_400.0
    health_restored_to: float = 1.0

    def __post_init__(self) -> None:
        if min(self.hours_between_service, self.service_duration_s, self.health_restored_to) <= 0:
            raise ValidationError([f"bad maintenance policy {self}"])


@dataclass(frozen=True)
class Drone:
    id: int
    home_station: int
    current_station: int
    cruise_speed_ms: float = 20.0
    battery_capacity_wh: float = 1200.0
    battery_health: float = 1.0
    battery_level_wh: float = 1200.0
    payload_capacity_kg: float = 12.0
    range_km: float = 60.0
    flight_hours: float = 0.0
    status: DroneStatus = DroneStatus.IDLE
    hours_since_service: float = 0.0
    maintenance_until_s: float | None = None
    charge_cycles_accrued: float = 0.0

    def __post_init__(self) -> None:
        problems = []
        if not HEALTH_FLOOR <= self.battery_health <= 1.0:
            problems.append(f"battery_health {self.battery_health} outside [{HEALTH_FLOOR}, 1.0]")
        if not -1e-9 <= self.battery_level_wh <= self.effective_capacity_wh + 1e-9:
            problems.append(
                f"battery_level_wh {self.battery_level_wh} outside [0, {self.effective_capacity_wh}]"
            )
        if self.payload_capacity_kg <= 0 or self.cruise_speed_ms <= 0 or self.range_km <= 0:
            problems.append("payload capacity, cruise speed and range must be positive")
        if problems:
            raise ValidationError([f"drone {self.id}: {p}" for p in problems])

    @property
    def effective_capacity_wh(self) -> float:
        return self.battery_capacity_wh * self.battery_health


def energy_required(model: EnergyModel, drone: Drone, distance_km: float, payload_kg: float) -> float:
    """Wh needed: base per km scaled linearly with relative payload."""
    if payload_kg > drone.payload_capacity_kg:
        raise PayloadExceedsCapacity(
            f"payload {payload_kg} kg exceeds drone {drone.id} capacity {drone.payload_capacity_kg} kg"
        )
    return model.base_wh_per_km * distance_km * (
        1.0 + model.payload_factor * payload_kg / drone.payload_capacity_kg
    )


def can_serve(drone: Drone, model: EnergyModel, distance_km: float, payload_kg: float) -> list[str]:
    """Empty list when the drone can fly the leg now; otherwise every failed reason."""
    reasons = []
    if drone.status is not DroneStatus.IDLE:
        reasons.append(UNAVAILABLE)
    if payload_kg > drone.payload_capacity_kg:
        reasons.append(PAYLOAD_EXCEEDS_CAPACITY)
        return reasons  # energy model undefined beyond capacity
    if distance_km > drone.range_km:
        reasons.append(EXCEEDS_RANGE)
    needed = energy_required(model, drone, distance_km, payload_kg)
    if drone.battery_level_wh < needed * (1.0 + model.reserve_fraction):
        reasons.append(INSUFFICIENT_BATTERY)
    return reasons


def apply_flight(
    drone: Drone,
    model: EnergyModel,
    distance_km: float,
    payload_kg: float,
    duration_s: float,
    to_station: int,
) -> Drone:
    """Commit a flown leg: drain battery, add hours, move, return to idle."""
    if drone.status in (DroneStatus.CHARGING, DroneStatus.MAINTENANCE):
        raise InfeasibleLeg(f"drone {drone.id} is {drone.status.value}")
    if payload_kg > drone.payload_capacity_kg or distance_km > drone.range_km:
        raise InfeasibleLeg(f"drone {drone.id} cannot fly {distance_km} km with {payload_kg} kg")
    needed = energy_required(model, drone, distance_km, payload_kg)
    if drone.battery_level_wh < needed - 1e-9:
        raise InfeasibleLeg(f"drone {drone.id} battery {drone.battery_level_wh} Wh < {needed} Wh")
    hours = duration_s / 3600.0
    return replace(
        drone,
        battery_level_wh=max(0.0, drone.battery_level_wh - needed),
        flight_hours=drone.flight_hours + hours,
        hours_since_service=drone.hours_since_service + hours,
        current_station=to_station,
        status=DroneStatus.IDLE,
    )


def recharge(drone: Drone, dt_s: float, charge_rate_wh_per_s: float, station: Station) -> Drone:
    """Charge for dt_s seconds, clamped to effective capacity.

    Each full-capacity-equivalent of energy taken on counts one charge cycle
    toward degradation (see degrade).
    """
    if station.id != drone.current_station or not station.is_recharge:
        raise NotAtRechargeStation(
            f"drone {drone.id} at station {drone.current_station}, not recharging at {station.id}"
        )
    new_level = min(drone.battery_level_wh + charge_rate_wh_per_s * dt_s, drone.effective_capacity_wh)
    added = max(0.0, new_level - drone.battery_level_wh)
    return replace(
        drone,
        battery_level_wh=new_level,
        charge_cycles_accrued=drone.charge_cycles_accrued + added / drone.battery_capacity_wh,
    )


def degrade(drone: Drone, cycles: float, delta_per_cycle: float) -> Drone:
    """Lower battery health by cycles * delta, floored, clamping charge to fit."""
    if delta_per_cycle < 0:
        raise ValueError(f"delta_per_cycle must be >= 0, got {delta_per_cycle}")
    health = max(HEALTH_FLOOR, drone.battery_health - cycles * delta_per_cycle)
    level = min(drone.battery_level_wh, drone.battery_capacity_wh * health)
    return replace(drone, battery_health=health, battery_level_wh=level)


@dataclass(frozen=True)
class MaintenanceEvent:
    drone_id: int
    kind: str  # "start" | "end"
    time_s: float
    until_s: float | None = None


def tick_maintenance(
    drone: Drone, policy: MaintenancePolicy, now_s: float
) -> tuple[Drone, MaintenanceEvent | None]:
    """Move the drone through the service cycle based on accumulated hours.

    An idle drone past the service interval enters maintenance for the policy
    duration; once the clock passes that point the drone comes back with
    restored health and a reset hours counter.
    """
    if drone.status is DroneStatus.MAINTENANCE:
        if drone.maintenance_until_s is not None and now_s >= drone.maintenance_until_s:
            restored = min(1.0, max(policy.health_restored_to, HEALTH_FLOOR))
            out = replace(
                drone,
                status=DroneStatus.IDLE,
                battery_health=restored,
                battery_level_wh=min(drone.battery_level_wh, drone.battery_capacity_wh * restored),
                hours_since_service=0.0,
                maintenance_until_s=None,
            )
            return out, MaintenanceEvent(drone.id, "end", now_s)
        return drone, None
    if drone.status is DroneStatus.IDLE and drone.hours_since_service >= policy.hours_between_service:
        until = now_s + policy.service_duration_s
        out = replace(drone, status=DroneStatus.MAINTENANCE, maintenance_until_s=until)
        return out, MaintenanceEvent(drone.id, "start", now_s, until_s=until)
    return drone, None


def load_fleet(path: str | Path) -> list[Drone]:
    """Load the fleet JSON: a list of drone records, defaults for omitted fields."""
    try:
        with open(path, encoding="utf-8") as fp:
            doc = json.load(fp)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read fleet file {path}: {exc}") from exc
    if not isinstance(doc, list):
        raise ParseError("fleet document must be a JSON list of drone records")
    drones = []
    for rec in doc:
        try:
            capacity = float(rec.get("battery_capacity_wh", 1200.0))
            health = float(rec.get("battery_health", 1.0))
            home = int(rec["home_station"])
            drones.append(
                Drone(
                    id=int(rec["id"]),
                    home_station=home,
                    current_station=int(rec.get("current_station", home)),
                    cruise_speed_ms=float(rec.get("cruise_speed_ms", 20.0)),
                    battery_capacity_wh=capacity,
                    battery_health=health,
                    battery_level_wh=float(rec.get("battery_level_wh", capacity * health)),
                    payload_capacity_kg=float(rec.get("payload_capacity_kg", 12.0)),
                    range_km=float(rec.get("range_km", 60.0)),
                    flight_hours=float(rec.get("flight_hours", 0.0)),
                    status=DroneStatus(rec.get("status", "idle")),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed drone record {rec}: {exc}") from exc
    ids = [d.id for d in drones]
    if len(set(ids)) != len(ids):
        raise ValidationError(["duplicate drone ids in fleet"])
    return drones


def fleet_to_json(drones: list[Drone]) -> list[dict]:
    return [
        {
            "id": d.id,
            "home_station": d.home_station,
            "current_station": d.current_station,
            "cruise_speed_ms": d.cruise_speed_ms,
            "battery_capacity_wh": d.battery_capacity_wh,
            "battery_health": d.battery_health,
            "battery_level_wh": d.battery_level_wh,
            "payload_capacity_kg": d.payload_capacity_kg,
            "range_km": d.range_km,
            "flight_hours": d.flight_hours,
            "status": d.status.value,
        }
        for d in drones
    ]

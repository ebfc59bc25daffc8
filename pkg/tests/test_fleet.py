import random
from dataclasses import replace

import pytest

from daas.errors import (
    InfeasibleLeg,
    NotAtRechargeStation,
    ParseError,
    PayloadExceedsCapacity,
    ValidationError,
)
from daas.fleet import (
    EXCEEDS_RANGE,
    INSUFFICIENT_BATTERY,
    PAYLOAD_EXCEEDS_CAPACITY,
    UNAVAILABLE,
    Drone,
    DroneStatus,
    EnergyModel,
    MaintenancePolicy,
    apply_flight,
    can_serve,
    degrade,
    energy_required,
    fleet_to_json,
    load_fleet,
    recharge,
    tick_maintenance,
)
from daas.skyway import Station

MODEL = EnergyModel(base_wh_per_km=10.0, payload_factor=0.5, reserve_fraction=0.2)


def make_drone(**kw):
    defaults = dict(
        id=0, home_station=0, current_station=0, cruise_speed_ms=20.0,
        battery_capacity_wh=1000.0, battery_health=1.0, battery_level_wh=1000.0,
        payload_capacity_kg=10.0, range_km=50.0,
    )
    defaults.update(kw)
    return Drone(**defaults)


def test_energy_required():
    d = make_drone()
    assert energy_required(MODEL, d, 10.0, 0.0) == pytest.approx(100.0)
    assert energy_required(MODEL, d, 10.0, 10.0) == pytest.approx(150.0)
    assert energy_required(MODEL, d, 0.0, 5.0) == 0.0
    with pytest.raises(PayloadExceedsCapacity):
        energy_required(MODEL, d, 10.0, 11.0)


def test_can_serve_happy_and_reasons():
    d = make_drone()
    assert can_serve(d, MODEL, 10.0, 1.0) == []
    assert can_serve(d, MODEL, 10.0, 11.0) == [PAYLOAD_EXCEEDS_CAPACITY]
    assert EXCEEDS_RANGE in can_serve(d, MODEL, 60.0, 1.0)
    # battery exactly equal to the raw need still fails the reserve rule
    exact = make_drone(battery_level_wh=100.0)
    assert can_serve(exact, MODEL, 10.0, 0.0) == [INSUFFICIENT_BATTERY]
    busy = make_drone(status=DroneStatus.ENROUTE)
    assert UNAVAILABLE in can_serve(busy, MODEL, 10.0, 1.0)
    under_maintenance = make_drone(status=DroneStatus.MAINTENANCE)
    assert UNAVAILABLE in can_serve(under_maintenance, MODEL, 10.0, 1.0)


def test_can_serve_monotone_in_battery_and_payload():
    rng = random.Random(11)
    for _ in range(300):
        cap = rng.uniform(200, 2000)
        level = rng.uniform(0, cap)
        d = make_drone(battery_capacity_wh=cap, battery_level_wh=level)
        dist = rng.uniform(0, 60)
        p = rng.uniform(0, 10)
        if can_serve(d, MODEL, dist, p) == []:
            richer = replace(d, battery_level_wh=min(cap, level + rng.uniform(0, cap)))
            assert can_serve(richer, MODEL, dist, p) == []
            assert can_serve(d, MODEL, dist, p * rng.uniform(0, 1)) == []


def test_apply_flight():
    d = make_drone(battery_level_wh=200.0, current_station=0)
    out = apply_flight(d, MODEL, 10.0, 0.0, 500.0, to_station=1)
    assert out.battery_level_wh == pytest.approx(100.0)
    assert out.flight_hours == pytest.approx(500.0 / 3600.0)
    assert out.flight_hours == pytest.approx(0.1389, abs=1e-4)
    assert out.current_station == 1
    assert out.status is DroneStatus.IDLE


def test_apply_flight_chain_conserves_energy():
    d = make_drone()
    legs = [(10.0, 2.0), (5.0, 0.0), (8.0, 7.5)]
    total = 0.0
    cur = d
    for dist, payload in legs:
        total += energy_required(MODEL, cur, dist, payload)
        cur = apply_flight(cur, MODEL, dist, payload, dist * 50.0, to_station=1)
    assert d.battery_level_wh - total == pytest.approx(cur.battery_level_wh, rel=1e-9)


def test_apply_flight_infeasible():
    d = make_drone(battery_level_wh=10.0)
    with pytest.raises(InfeasibleLeg):
        apply_flight(d, MODEL, 10.0, 0.0, 500.0, to_station=1)
    charging = make_drone(status=DroneStatus.CHARGING)
    with pytest.raises(InfeasibleLeg):
        apply_flight(charging, MODEL, 1.0, 0.0, 50.0, to_station=1)


RECHARGE_PAD = Station(id=0, x_km=0.0, y_km=0.0, is_recharge=True)
PLAIN_PAD = Station(id=0, x_km=0.0, y_km=0.0, is_recharge=False)


def test_recharge():
    d = make_drone(battery_level_wh=0.0, battery_capacity_wh=1000.0, battery_health=0.5)
    out = recharge(d, 600.0, 1.0, RECHARGE_PAD)
    assert out.battery_level_wh == pytest.approx(500.0)  # clamped to capacity * health
    assert recharge(d, 0.0, 1.0, RECHARGE_PAD).battery_level_wh == 0.0
    partial = recharge(make_drone(battery_level_wh=100.0), 200.0, 0.5, RECHARGE_PAD)
    assert partial.battery_level_wh == pytest.approx(200.0)


def test_recharge_requires_recharge_station():
    d = make_drone()
    with pytest.raises(NotAtRechargeStation):
        recharge(d, 10.0, 1.0, PLAIN_PAD)
    elsewhere = Station(id=5, x_km=1.0, y_km=1.0, is_recharge=True)
    with pytest.raises(NotAtRechargeStation):
        recharge(d, 10.0, 1.0, elsewhere)


def test_recharge_accrues_cycles():
    d = make_drone(battery_level_wh=0.0, battery_capacity_wh=1000.0)
    out = recharge(d, 500.0, 1.0, RECHARGE_PAD)
    assert out.charge_cycles_accrued == pytest.approx(0.5)


def test_degrade():
    d = make_drone()
    assert degrade(d, 10.0, 0.002).battery_health == pytest.approx(0.98)
    floored = make_drone(battery_health=0.5, battery_level_wh=400.0)
    assert degrade(floored, 100.0, 0.01).battery_health == 0.5
    full = make_drone(battery_level_wh=1000.0)
    worn = degrade(full, 50.0, 0.002)
    assert worn.battery_level_wh == pytest.approx(worn.effective_capacity_wh)


def test_tick_maintenance():
    policy = MaintenancePolicy(hours_between_service=100.0, service_duration_s=3600.0,
                               health_restored_to=1.0)
    fresh = make_drone(hours_since_service=99.9)
    out, event = tick_maintenance(fresh, policy, now_s=0.0)
    assert event is None and out.status is DroneStatus.IDLE

    due = make_drone(hours_since_service=100.1, battery_health=0.9, battery_level_wh=800.0)
    serviced, start = tick_maintenance(due, policy, now_s=10.0)
    assert start is not None and start.kind == "start" and start.until_s == pytest.approx(3610.0)
    assert serviced.status is DroneStatus.MAINTENANCE
    # unavailable while serviced
    assert UNAVAILABLE in can_serve(serviced, MODEL, 1.0, 0.0)
    still, nothing = tick_maintenance(serviced, policy, now_s=100.0)
    assert nothing is None and still.status is DroneStatus.MAINTENANCE
    done, end = tick_maintenance(serviced, policy, now_s=3610.0)
    assert end is not None and end.kind == "end"
    assert done.status is DroneStatus.IDLE
    assert done.battery_health == 1.0
    assert done.hours_since_service == 0.0


def test_battery_bounds_hold_under_random_operation_sequences():
    rng = random.Random(5)
    policy = MaintenancePolicy(hours_between_service=10.0, service_duration_s=100.0)
    for _ in range(100):
        cap = rng.uniform(400, 1500)
        d = make_drone(battery_capacity_wh=cap, battery_level_wh=cap)
        now = 0.0
        for _ in range(30):
            op = rng.randrange(4)
            if op == 0:
                dist = rng.uniform(0, 40)
                payload = rng.uniform(0, 10)
                if can_serve(d, MODEL, dist, payload) == []:
                    d = apply_flight(d, MODEL, dist, payload, dist * 50, to_station=0)
            elif op == 1 and d.status is DroneStatus.IDLE:
                d = recharge(d, rng.uniform(0, 2000), 1.0, RECHARGE_PAD)
            elif op == 2:
                d = degrade(d, rng.uniform(0, 5), 0.002)
            else:
                now += rng.uniform(0, 3600)
                d, _ = tick_maintenance(d, policy, now)
            assert 0.0 <= d.battery_level_wh <= d.effective_capacity_wh + 1e-9
            assert 0.5 <= d.battery_health <= 1.0


def test_drone_invariants_enforced():
    with pytest.raises(ValidationError):
        make_drone(battery_level_wh=2000.0)  # above capacity
    with pytest.raises(ValidationError):
        make_drone(battery_health=0.3)
    with pytest.raises(ValidationError):
        make_drone(payload_capacity_kg=0.0)


def test_fleet_json_round_trip(tmp_path):
    drones = [make_drone(id=1), make_drone(id=2, battery_capacity_wh=1500.0,
                                           battery_level_wh=1500.0)]
    path = tmp_path / "fleet.json"
    import json

    path.write_text(json.dumps(fleet_to_json(drones)))
    loaded = load_fleet(path)
    assert [d.id for d in loaded] == [1, 2]
    assert loaded[1].battery_capacity_wh == 1500.0


def test_fleet_defaults_and_errors(tmp_path):
    path = tmp_path / "fleet.json"
    path.write_text('[{"id": 3, "home_station": 7}]')
    (drone,) = load_fleet(path)
    assert drone.current_station == 7
    assert drone.battery_level_wh == drone.battery_capacity_wh
    assert drone.status is DroneStatus.IDLE

    path.write_text('{"not": "a list"}')
    with pytest.raises(ParseError):
        load_fleet(path)
    path.write_text('[{"id": 1, "home_station": 0}, {"id": 1, "home_station": 0}]')
    with pytest.raises(ValidationError):
        load_fleet(path)

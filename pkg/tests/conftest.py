from __future__ import annotations

from pathlib import Path

import pytest

from daas.skyway import SkywayNetwork, load_network
from daas.weather import WeatherSample, WeatherSeries

FIXTURES = Path(__file__).parent / "fixtures"

CALM = WeatherSample(temperature_c=15.0, wind_speed_ms=0.0, wind_direction_deg=0.0,
                     humidity_pct=50.0, precipitation_mm=0.0)


def uniform_series(net: SkywayNetwork, sample: WeatherSample = CALM, slots: int = 1) -> WeatherSeries:
    return WeatherSeries(
        {(slot, sid): sample for slot in range(slots) for sid in net.station_ids()},
        slots,
    )


@pytest.fixture
def diamond() -> SkywayNetwork:
    return load_network(FIXTURES / "diamond.json")


@pytest.fixture
def divergence_net() -> SkywayNetwork:
    return load_network(FIXTURES / "divergence.json")

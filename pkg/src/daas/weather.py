"""Weather ingestion, the along-track speed adjustment, and safety gating.

Wind direction uses the meteorological FROM convention: 135 means wind
blowing from the southeast. The wind therefore pushes toward WD + 180.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import MissingCell, ParseError, RangeError

# Hard cap on how much a tailwind may raise ground speed.
SPEED_CAP_FACTOR = 1.5

WEATHER_CSV_HEADER = [
    "slot",
    "station_id",
    "temperature_c",
    "wind_speed_ms",
    "wind_direction_deg",
    "humidity_pct",
    "precipitation_mm",
]


@dataclass(frozen=True)
class WeatherSample:
    temperature_c: float
    wind_speed_ms: float
    wind_direction_deg: float
    humidity_pct: float
    precipitation_mm: float

    def __post_init__(self) -> None:
        fields = (
            self.temperature_c,
            self.wind_speed_ms,
            self.wind_direction_deg,
            self.humidity_pct,
            self.precipitation_mm,
        )
        if not all(math.isfinite(v) for v in fields):
            raise RangeError(f"non-finite weather field in {fields}")
        if self.wind_speed_ms < 0:
            raise RangeError(f"wind_speed_ms {self.wind_speed_ms} < 0")
        if not 0 <= self.wind_direction_deg < 360:
            raise RangeError(f"wind_direction_deg {self.wind_direction_deg} outside [0, 360)")
        if not 0 <= self.humidity_pct <= 100:
            raise RangeError(f"humidity_pct {self.humidity_pct} outside [0, 100]")
        if self.precipitation_mm < 0:
            raise RangeError(f"precipitation_mm {self.precipitation_mm} < 0")


CALM = WeatherSample(
    temperature_c=15.0, wind_speed_ms=0.0, wind_direction_deg=0.0,
    humidity_pct=50.0, precipitation_mm=0.0,
)


@dataclass(frozen=True)
class SafetyLimits:
    max_wind_ms: float = 20.0
    max_precip_mm: float = 10.0
    min_ground_speed_ms: float = 1.0

    def __post_init__(self) -> None:
        if min(self.max_wind_ms, self.max_precip_mm, self.min_ground_speed_ms) <= 0:
            raise RangeError("safety limits must all be positive")


class WeatherSeries:
    """Immutable per-(slot, station) weather samples, slots contiguous from 0."""

    def __init__(self, samples: dict[tuple[int, int], WeatherSample], slot_count: int):
        self._samples = dict(samples)
        self.slot_count = slot_count

    def sample(self, slot: int, station_id: int) -> WeatherSample:
        try:
            return self._samples[(slot, station_id)]
        except KeyError:
            raise MissingCell(slot, station_id) from None

    def has(self, slot: int, station_id: int) -> bool:
        return (slot, station_id) in self._samples

    def items(self):
        return self._samples.items()


def load_weather_csv(path: str | Path, stations: list[int]) -> WeatherSeries:
    """Load the documented CSV format and verify every (slot, station) cell exists."""
    samples: dict[tuple[int, int], WeatherSample] = {}
    try:
        with open(path, newline="", encoding="utf-8") as fp:
            reader = csv.DictReader(fp)
            if reader.fieldnames != WEATHER_CSV_HEADER:
                raise ParseError(
                    f"unexpected weather CSV header {reader.fieldnames}, "
                    f"want {WEATHER_CSV_HEADER}"
                )
            for row in reader:
                try:
                    slot = int(row["slot"])
                    station = int(row["station_id"])
                    sample = WeatherSample(
                        temperature_c=float(row["temperature_c"]),
                        wind_speed_ms=float(row["wind_speed_ms"]),
                        wind_direction_deg=float(row["wind_direction_deg"]),
                        humidity_pct=float(row["humidity_pct"]),
                        precipitation_mm=float(row["precipitation_mm"]),
                    )
                except (TypeError, ValueError) as exc:
                    raise ParseError(f"bad weather row {row}: {exc}") from exc
                if slot < 0:
                    raise RangeError(f"negative slot {slot}")
                samples[(slot, station)] = sample
    except OSError as exc:
        raise ParseError(f"cannot read weather file {path}: {exc}") from exc

    slots = {slot for slot, _ in samples}
    slot_count = max(slots) + 1 if slots else 0
    if slots and slots != set(range(slot_count)):
        missing = sorted(set(range(slot_count)) - slots)
        raise ParseError(f"slot indices not contiguous from 0, missing {missing}")
    for slot in range(slot_count):
        for station in stations:
            if (slot, station) not in samples:
                raise MissingCell(slot, station)
    return WeatherSeries(samples, slot_count)


def write_weather_csv(path: str | Path, series: WeatherSeries) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp)
        writer.writerow(WEATHER_CSV_HEADER)
        for (slot, station), s in sorted(series.items()):
            writer.writerow([
                slot, station, s.temperature_c, s.wind_speed_ms,
                s.wind_direction_deg, s.humidity_pct, s.precipitation_mm,
            ])


def gating_ok(sample: WeatherSample, limits: SafetyLimits) -> bool:
    return sample.wind_speed_ms <= limits.max_wind_ms and sample.precipitation_mm <= limits.max_precip_mm


def adjusted_speed(
    v_nominal: float,
    sample: WeatherSample,
    travel_bearing_deg: float,
    limits: SafetyLimits,
) -> float | None:
    """Weather-adjusted ground speed in m/s, or None when flight is infeasible.

    The wind blows toward WD + 180, so its along-track component for a drone
    travelling on bearing beta is -WS * cos(WD - beta): a pure tailwind
    (WD - beta == 180) adds the full wind speed, a pure headwind subtracts it.
    The result is capped at 1.5 * v_nominal; anything below the minimum safe
    ground speed, or any sample failing gating, is infeasible.
    """
    if v_nominal <= 0:
        raise ValueError(f"v_nominal must be positive, got {v_nominal}")
    if not gating_ok(sample, limits):
        return None
    along_track = -sample.wind_speed_ms * math.cos(
        math.radians(sample.wind_direction_deg - travel_bearing_deg)
    )
    v_adj = min(v_nominal + along_track, SPEED_CAP_FACTOR * v_nominal)
    if v_adj < limits.min_ground_speed_ms:
        return None
    return v_adj


def edge_passable(sample_a: WeatherSample, sample_b: WeatherSample, limits: SafetyLimits) -> bool:
    """True iff both endpoint samples are within the safety thresholds."""
    return gating_ok(sample_a, limits) and gating_ok(sample_b, limits)

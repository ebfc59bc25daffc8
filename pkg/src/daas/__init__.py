"""Weather-aware drone delivery orchestration.

Free-text requests become structured tasks, routes are planned over a
skyway network under weather-adjusted costs, drones are selected or
composed per delivery, and a deterministic long-horizon simulation logs
every flight.
"""

from .errors import DaasError
from .fleet import Drone, DroneStatus, EnergyModel, MaintenancePolicy
from .intake import ExtractionResult, RequestRecord, StructuredRequest
from .planner import DeliveryPlan, Leg
from .routing import CostMode, HeuristicMode, RoutePlan
from .simulator import SimConfig, SimReport, Simulation
from .skyway import Edge, SkywayNetwork, Station
from .weather import SafetyLimits, WeatherSample, WeatherSeries

__all__ = [
    "DaasError",
    "Drone",
    "DroneStatus",
    "EnergyModel",
    "MaintenancePolicy",
    "ExtractionResult",
    "RequestRecord",
    "StructuredRequest",
    "DeliveryPlan",
    "Leg",
    "CostMode",
    "HeuristicMode",
    "RoutePlan",
    "SimConfig",
    "SimReport",
    "Simulation",
    "Edge",
    "SkywayNetwork",
    "Station",
    "SafetyLimits",
    "WeatherSample",
    "WeatherSeries",
]

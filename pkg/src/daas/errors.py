"""Exception types shared across the package."""

from __future__ import annotations


class DaasError(Exception):
    """Base class for all domain errors."""


class ParseError(DaasError):
    """Input document could not be parsed at all."""


class ValidationError(DaasError):
    """A loaded document violates one or more invariants.

    Carries every violation found, not just the first.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnknownStation(DaasError):
    def __init__(self, station_id: int):
        self.station_id = station_id
        super().__init__(f"unknown station id {station_id}")


class UnknownEdge(DaasError):
    def __init__(self, a: int, b: int):
        self.a, self.b = a, b
        super().__init__(f"no edge between stations {a} and {b}")


class DegenerateSegment(DaasError):
    """Bearing requested between identical points."""


class MissingCell(DaasError):
    def __init__(self, slot: int, station_id: int):
        self.slot, self.station_id = slot, station_id
        super().__init__(f"weather series missing (slot={slot}, station={station_id})")


class RangeError(DaasError):
    """A weather field is outside its documented range."""


class SlotOutOfRange(DaasError):
    def __init__(self, slot: int, slot_count: int):
        self.slot, self.slot_count = slot, slot_count
        super().__init__(f"slot {slot} outside series of {slot_count} slots")


class PayloadExceedsCapacity(DaasError):
    pass


class InfeasibleLeg(DaasError):
    """apply_flight called on a leg the drone cannot fly."""


class NotAtRechargeStation(DaasError):
    pass


class NetworkTooSmall(DaasError):
    pass


class LengthMismatch(DaasError):
    pass


class BackendUnavailable(DaasError):
    """LLM endpoint could not be reached."""


class BackendTimeout(DaasError):
    """LLM endpoint did not answer within the configured timeout."""


class MalformedReplyAfterRetries(DaasError):
    """LLM backend kept answering without a parseable key=value line."""

    def __init__(self, attempts: int, last_reply: str):
        self.attempts = attempts
        self.last_reply = last_reply
        super().__init__(f"no parseable reply after {attempts} attempts")


class NoFeasibleDrone(DaasError):
    """No drone in the snapshot can serve the request on its own.

    ``reasons`` maps drone id to the list of failed feasibility checks.
    """

    def __init__(self, reasons: dict[int, list[str]]):
        self.reasons = dict(reasons)
        detail = "; ".join(f"drone {d}: {', '.join(r)}" for d, r in sorted(self.reasons.items()))
        super().__init__(f"no feasible drone ({detail})" if detail else "no drones in fleet")


class InfeasiblePlan(DaasError):
    """Composition could not cover the route; ``trace`` names each blocked segment."""

    def __init__(self, trace: list[str]):
        self.trace = list(trace)
        super().__init__(" -> ".join(self.trace) if self.trace else "infeasible")


class ConfigError(DaasError):
    pass

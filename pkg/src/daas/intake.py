"""Free-text delivery requests: corpus generation, extraction, and evaluation.

The pattern extractor is the reproducible baseline; the HTTP backend client
lets any chat-completion endpoint be benchmarked through the same harness.
"""

from __future__ import annotations

import json
import os
import random
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .errors import (
    BackendTimeout,
    BackendUnavailable,
    ConfigError,
    LengthMismatch,
    MalformedReplyAfterRetries,
    NetworkTooSmall,
    ParseError,
    ValidationError,
)
from .skyway import SkywayNetwork


@dataclass(frozen=True)
class StructuredRequest:
    request_id: int
    start_node: int
    destination_node: int
    payload_kg: float

    def __post_init__(self) -> None:
        if self.start_node == self.destination_node:
            raise ValidationError([f"request {self.request_id}: start equals destination"])
        if self.payload_kg <= 0:
            raise ValidationError([f"request {self.request_id}: payload {self.payload_kg} <= 0"])


@dataclass(frozen=True)
class RequestRecord:
    structured: StructuredRequest
    free_text: str
    extras: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.free_text:
            raise ValidationError(["free_text must be non-empty"])


@dataclass(frozen=True)
class ExtractionResult:
    start_node: int | None = None
    destination_node: int | None = None
    payload_kg: float | None = None
    diagnostics: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "start_node": self.start_node,
            "destination_node": self.destination_node,
            "payload_kg": self.payload_kg,
            "diagnostics": [list(d) for d in self.diagnostics],
        }


@dataclass(frozen=True)
class EvalReport:
    per_field_accuracy: dict[str, float]
    structured_match: float
    exact_match: float

    def to_dict(self) -> dict:
        return {
            "per_field": dict(self.per_field_accuracy),
            "structured_match": self.structured_match,
            "exact_match": self.exact_match,
        }


# ---------------------------------------------------------------- generation

# Phrasing variants for the weight; {p} is the numeric payload.
_PAYLOAD_VARIANTS = [
    "{p}kg",
    "{p} kg",
    "{p} kilograms",
    "around {p} kilograms",
    "roughly {p} kilos",
    "{p} kilos",
]

# Each template takes {s} (start node), {d} (destination node) and {w}
# (payload phrase). Extras tag side requests carried in the text.
_TEMPLATES: list[tuple[str, list[str]]] = [
    ("Hi, please help me pick up my package from home at node {s} and deliver it "
     "to my workplace at node {d}. The box weighs {w}. Thanks!", []),
    ("Good afternoon! I'd like to request a delivery. The payload weighs {w} and "
     "the pickup is at node {s}. The drop-off location is node {d}. Could you "
     "confirm the exact drop-off time once it's done? Also, if possible, I'd like "
     "a picture of the package when it's delivered.", ["photo_confirmation"]),
    ("Hello, I need to schedule a delivery for a {w} package. The pickup is at "
     "node {s}, and it needs to be dropped off at node {d}. Could you also check "
     "the drone's battery before sending it out?", ["battery_check"]),
    ("Hey, can you send a drone to collect a parcel from node {s}? It should be "
     "delivered to node {d}. Weight is about {w}.", []),
    ("Morning! Package pickup at station {s}, drop-off at station {d}, weight {w}. "
     "Please handle before 5 pm.", []),
    ("I have a {w} box that starts at node {s} and must go to node {d}. No rush, "
     "anytime before 11 am tomorrow.", []),
    ("Please arrange delivery from station {s} to station {d}. The parcel "
     "weighs {w}.", []),
    ("New order: pick up at node {s}, deliver to node {d}. Payload {w}. Send your "
     "freshest battery, please.", ["battery_check"]),
    ("Could you grab my groceries from node {s}? Destination is node {d} and the "
     "bag weighs {w}.", []),
    ("Requesting a drone: starting point node {s}, destination node {d}, total "
     "weight {w}. A photo on delivery would be great.", ["photo_confirmation"]),
    ("Hi there. I need {w} moved from node {s} over to node {d} sometime after "
     "9 am.", []),
    ("Delivery request: a parcel of {w} is waiting at the pickup, node {s}. Take "
     "it to node {d}.", []),
    ("Please start at node {s} and drop off the package at node {d}. It's {w}, "
     "nothing fragile.", []),
    ("One more job: {w} of books, pickup node {s}, drop-off node {d}. Could the "
     "drone take a picture at the door?", ["photo_confirmation"]),
    ("Afternoon! Need a courier from node {s} headed to node {d} carrying {w}. "
     "Please make sure the battery is topped up first.", ["battery_check"]),
    ("Schedule this for me: the pickup is station {s}, then deliver the crate to "
     "station {d}. It weighs {w}.", []),
    ("We've got {w} of samples that need to travel from node {s} to node {d} "
     "before 3 pm if possible.", []),
    ("Drone needed! Start: node {s}. Destination: node {d}. Weight: {w}. Also "
     "please double-check the battery health before takeoff.", ["battery_check"]),
    ("Hello - small favour. Pickup at node {s}, then it goes to node {d}. It's "
     "{w}, maybe a touch more.", []),
    ("Can I book a delivery for tonight around 8 pm? Pickup location: node {s}. "
     "Drop-off: node {d}. The package weighs {w}.", []),
    ("This one's heavy - {w}. From station {s} straight to station {d}. Let me "
     "know when it's picked up.", []),
    ("Hi! Grandma's cookies (about {w}) need picking up from node {s} and "
     "dropping off at node {d} by 10 am.", []),
]


def generate_corpus(net: SkywayNetwork, n: int, seed: int) -> list[RequestRecord]:
    """n deterministic request records with free text drawn from the template pool."""
    ids = net.station_ids()
    if len(ids) < 2:
        raise NetworkTooSmall(f"need >= 2 stations, have {len(ids)}")
    rng = random.Random(seed)
    records = []
    for request_id in range(1, n + 1):
        start, dest = rng.sample(ids, 2)
        payload = round(rng.uniform(0.5, 10.0), 2)
        template, extras = _TEMPLATES[rng.randrange(len(_TEMPLATES))]
        weight_phrase = _PAYLOAD_VARIANTS[rng.randrange(len(_PAYLOAD_VARIANTS))].format(
            p=f"{payload:g}"
        )
        text = template.format(s=start, d=dest, w=weight_phrase)
        records.append(
            RequestRecord(
                structured=StructuredRequest(request_id, start, dest, payload),
                free_text=text,
                extras=list(extras),
            )
        )
    return records


def save_corpus(records: list[RequestRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        for rec in records:
            s = rec.structured
            fp.write(json.dumps({
                "request_id": s.request_id,
                "start_node": s.start_node,
                "destination_node": s.destination_node,
                "payload_kg": s.payload_kg,
                "free_text": rec.free_text,
            }) + "\n")


def load_corpus(path: str | Path) -> list[RequestRecord]:
    records = []
    try:
        with open(path, encoding="utf-8") as fp:
            for lineno, line in enumerate(fp, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    doc = json.loads(line)
                    records.append(
                        RequestRecord(
                            structured=StructuredRequest(
                                request_id=int(doc["request_id"]),
                                start_node=int(doc["start_node"]),
                                destination_node=int(doc["destination_node"]),
                                payload_kg=float(doc["payload_kg"]),
                            ),
                            free_text=str(doc["free_text"]),
                        )
                    )
                except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                    raise ParseError(f"{path}:{lineno}: bad corpus record: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read corpus {path}: {exc}") from exc
    return records


# ---------------------------------------------------------------- extraction

_NODE_RE = re.compile(r"\b(?:node|station)\s*#?\s*(\d+)\b", re.IGNORECASE)
_PAYLOAD_RE = re.compile(r"\b(\d+(?:\.\d+)?)\s*(?:kg|kilograms?|kilos?)\b", re.IGNORECASE)
_PICKUP_CUE_RE = re.compile(
    r"\bpick(?:ed|ing)?[\s-]*up\b|\bpickup\b|\bfrom\b|\bstart(?:s|ing|ed)?\b",
    re.IGNORECASE,
)
_DROP_CUE_RE = re.compile(
    r"\bdeliver(?:ed|ing|s)?\b|\bdrop(?:ped|ping)?[\s-]*off\b|\bdestination\b|\bto\b",
    re.IGNORECASE,
)


def _nearest_cue(text: str, before: int) -> str | None:
    """Role of the closest cue ending before position `before`, if any."""
    last_pick = last_drop = -1
    for m in _PICKUP_CUE_RE.finditer(text, 0, before):
        last_pick = m.end()
    for m in _DROP_CUE_RE.finditer(text, 0, before):
        last_drop = m.end()
    if last_pick < 0 and last_drop < 0:
        return None
    if last_pick == last_drop:
        return None
    return "start" if last_pick > last_drop else "destination"


def extract_pattern(text: str, net: SkywayNetwork) -> ExtractionResult:
    """Rule-based extraction of start, destination, and payload from free text.

    Node numerals must follow "node"/"station" and are role-assigned by the
    nearest preceding pickup/drop cue. Candidates are validated against the
    network; anything unresolved or ambiguous lands in diagnostics rather
    than being guessed.
    """
    diagnostics: list[tuple[str, str]] = []
    candidates: dict[str, set[int]] = {"start": set(), "destination": set()}
    for m in _NODE_RE.finditer(text):
        node_id = int(m.group(1))
        role = _nearest_cue(text, m.start())
        if role is None:
            diagnostics.append(("node", f"uncued_mention_{node_id}"))
            continue
        field_name = "start_node" if role == "start" else "destination_node"
        if not net.has_station(node_id):
            diagnostics.append((field_name, f"unknown_node_{node_id}"))
            continue
        candidates[role].add(node_id)

    start = dest = None
    if len(candidates["start"]) == 1:
        start = next(iter(candidates["start"]))
    elif len(candidates["start"]) > 1:
        diagnostics.append(("start_node", "ambiguous"))
    else:
        diagnostics.append(("start_node", "missing"))
    if len(candidates["destination"]) == 1:
        dest = next(iter(candidates["destination"]))
    elif len(candidates["destination"]) > 1:
        diagnostics.append(("destination_node", "ambiguous"))
    else:
        diagnostics.append(("destination_node", "missing"))
    if start is not None and dest is not None and start == dest:
        diagnostics.append(("start_node", "equals_destination"))
        start = dest = None

    payload = None
    pm = _PAYLOAD_RE.search(text)
    if pm is None:
        diagnostics.append(("payload_kg", "missing"))
    else:
        value = float(pm.group(1))
        if value > 0:
            payload = value
        else:
            diagnostics.append(("payload_kg", "nonpositive"))

    return ExtractionResult(
        start_node=start, destination_node=dest, payload_kg=payload,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------- llm client

_PROMPT = (
    "Extract the delivery request fields from the user message below. Reply "
    "with exactly one line of the form:\n"
    "start_node=<integer>, destination_node=<integer>, payload=<number>kg\n"
    "and nothing else.\n\nUser message: {text}"
)

_REPLY_RE = re.compile(
    r"start_node\s*=\s*(\d+)\s*,\s*destination_node\s*=\s*(\d+)\s*,\s*"
    r"payload\s*=\s*(\d+(?:\.\d+)?)\s*kg",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class BackendConfig:
    endpoint: str
    model: str
    api_key: str = ""
    timeout_s: float = 30.0
    max_retries: int = 2
    parallelism: int = 4

    @classmethod
    def from_env(cls) -> "BackendConfig":
        endpoint = os.environ.get("DAAS_LLM_ENDPOINT", "")
        if not endpoint:
            raise ConfigError("DAAS_LLM_ENDPOINT is not set")
        return cls(
            endpoint=endpoint,
            model=os.environ.get("DAAS_LLM_MODEL", ""),
            api_key=os.environ.get("DAAS_LLM_API_KEY", ""),
        )


def _reply_text(body: dict) -> str:
    try:
        choice = body["choices"][0]
    except (KeyError, IndexError, TypeError):
        return ""
    if isinstance(choice, dict):
        message = choice.get("message")
        if isinstance(message, dict) and isinstance(message.get("content"), str):
            return message["content"]
        if isinstance(choice.get("text"), str):
            return choice["text"]
    return ""


def validate_extraction(
    start: int | None, dest: int | None, payload: float | None, net: SkywayNetwork | None
) -> ExtractionResult:
    """Apply the same field validation the pattern extractor uses."""
    diagnostics: list[tuple[str, str]] = []
    if start is not None and net is not None and not net.has_station(start):
        diagnostics.append(("start_node", f"unknown_node_{start}"))
        start = None
    if dest is not None and net is not None and not net.has_station(dest):
        diagnostics.append(("destination_node", f"unknown_node_{dest}"))
        dest = None
    if start is not None and dest is not None and start == dest:
        diagnostics.append(("start_node", "equals_destination"))
        start = dest = None
    if payload is not None and payload <= 0:
        diagnostics.append(("payload_kg", "nonpositive"))
        payload = None
    return ExtractionResult(
        start_node=start, destination_node=dest, payload_kg=payload,
        diagnostics=diagnostics,
    )


def extract_llm(text: str, cfg: BackendConfig, net: SkywayNetwork | None = None) -> ExtractionResult:
    """Ask the configured chat-completion backend and validate its reply.

    Malformed replies are retried up to cfg.max_retries times before giving up.
    """
    request_body = {
        "model": cfg.model,
        "messages": [{"role": "user", "content": _PROMPT.format(text=text)}],
    }
    headers = {"Content-Type": "application/json"}
    if cfg.api_key:
        headers["Authorization"] = f"Bearer {cfg.api_key}"

    attempts = cfg.max_retries + 1
    last_reply = ""
    for _ in range(attempts):
        try:
            resp = requests.post(cfg.endpoint, json=request_body, headers=headers, timeout=cfg.timeout_s)
            resp.raise_for_status()
            body = resp.json()
        except requests.Timeout as exc:
            raise BackendTimeout(f"{cfg.endpoint}: {exc}") from exc
        except (requests.ConnectionError, requests.HTTPError, ValueError) as exc:
            raise BackendUnavailable(f"{cfg.endpoint}: {exc}") from exc
        last_reply = _reply_text(body)
        m = _REPLY_RE.search(last_reply)
        if m:
            return validate_extraction(int(m.group(1)), int(m.group(2)), float(m.group(3)), net)
    raise MalformedReplyAfterRetries(attempts, last_reply)


def extract_llm_many(
    texts: list[str], cfg: BackendConfig, net: SkywayNetwork | None = None
) -> list[ExtractionResult]:
    """Bounded-parallel extraction; results keep corpus order, failures become misses."""

    def one(text: str) -> ExtractionResult:
        try:
            return extract_llm(text, cfg, net)
        except (BackendUnavailable, BackendTimeout, MalformedReplyAfterRetries) as exc:
            return ExtractionResult(diagnostics=[("backend", str(exc))])

    with ThreadPoolExecutor(max_workers=max(1, cfg.parallelism)) as pool:
        return list(pool.map(one, texts))


# ---------------------------------------------------------------- evaluation

_FIELDS = ("start_node", "destination_node", "payload_kg")


def evaluate(preds: list[ExtractionResult], golds: list[StructuredRequest]) -> EvalReport:
    """Field-level accuracy of predictions against gold structured requests."""
    if len(preds) != len(golds):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(golds)} golds")
    if not golds:
        return EvalReport({f: 1.0 for f in _FIELDS}, 1.0, 1.0)

    correct = {f: 0 for f in _FIELDS}
    exact = 0
    fraction_sum = 0.0
    for pred, gold in zip(preds, golds):
        hits = 0
        if pred.start_node == gold.start_node:
            correct["start_node"] += 1
            hits += 1
        if pred.destination_node == gold.destination_node:
            correct["destination_node"] += 1
            hits += 1
        if pred.payload_kg is not None and abs(pred.payload_kg - gold.payload_kg) <= 1e-6:
            correct["payload_kg"] += 1
            hits += 1
        fraction_sum += hits / 3.0
        if hits == 3:
            exact += 1
    n = len(golds)
    return EvalReport(
        per_field_accuracy={f: correct[f] / n for f in _FIELDS},
        structured_match=fraction_sum / n,
        exact_match=exact / n,
    )


def split_corpus(
    records: list[RequestRecord], seed: int, test_size: int | None = None
) -> tuple[list[RequestRecord], list[RequestRecord]]:
    """Deterministic train/test split; by default one fifth held out (4000/1000 at n=5000)."""
    if test_size is None:
        test_size = len(records) // 5
    idx = list(range(len(records)))
    random.Random(seed).shuffle(idx)
    test_idx = set(idx[:test_size])
    train = [records[i] for i in range(len(records)) if i not in test_idx]
    test = [records[i] for i in range(len(records)) if i in test_idx]
    return train, test


def benchmark_backends(
    corpus: list[RequestRecord],
    backends: dict[str, object],
    seed: int = 0,
    test_size: int | None = None,
) -> dict[str, EvalReport]:
    """Evaluate every backend on the same held-out split.

    Backends map a name to a callable text -> ExtractionResult; a backend
    error on a row counts as a miss for that row, never an abort.
    """
    if not corpus:
        raise LengthMismatch("corpus is empty")
    _, test = split_corpus(corpus, seed, test_size)
    golds = [rec.structured for rec in test]
    table = {}
    for name, backend in backends.items():
        preds = []
        for rec in test:
            try:
                preds.append(backend(rec.free_text))
            except Exception as exc:  # per-row fault isolation
                preds.append(ExtractionResult(diagnostics=[("backend", str(exc))]))
        table[name] = evaluate(preds, golds)
    return table

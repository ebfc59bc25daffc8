"""Command-line entry point.

Structured JSON goes to stdout, human-readable notes to stderr. Exit codes:
0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import intake, synth
from .errors import DaasError
from .intake import BackendConfig, ExtractionResult
from .routing import CostMode, HeuristicMode, astar, compare_routes, dijkstra
from .simulator import DEFAULT_SLOT_DURATION_S, SimConfig, Simulation
from .skyway import load_network, network_to_dict
from .weather import SafetyLimits, load_weather_csv, write_weather_csv

_COST = {"distance": CostMode.DISTANCE, "time": CostMode.WEATHER_TIME}
_HEURISTIC = {"admissible": HeuristicMode.ADMISSIBLE, "paper": HeuristicMode.PAPER_NOMINAL}


def _emit(obj) -> None:
    print(json.dumps(obj))


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def cmd_route(args: argparse.Namespace) -> int:
    net = load_network(args.net)
    series = load_weather_csv(args.weather, net.station_ids())
    mode = _COST[args.cost]
    h = _HEURISTIC[args.heuristic]
    limits = SafetyLimits()
    common = (net, series, args.slot, limits, mode, args.speed, args.src, args.dst)
    if args.algo == "both":
        report = compare_routes(
            net, series, args.slot, limits, args.speed, args.src, args.dst,
            mode=mode, h=h,
        )
        if report.dijkstra is None or report.astar is None:
            _note(f"error: no route from {args.src} to {args.dst} in slot {args.slot}")
            return 1
        _emit(report.to_dict())
        return 0
    plan = dijkstra(*common) if args.algo == "dijkstra" else astar(*common, h=h)
    if plan is None:
        _note(f"error: no route from {args.src} to {args.dst} in slot {args.slot}")
        return 1
    _emit(plan.to_dict())
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.config:
        config = SimConfig.from_file(args.config)
    else:
        missing = [flag for flag, value in (
            ("--net", args.net), ("--weather", args.weather),
            ("--fleet", args.fleet), ("--requests", args.requests),
        ) if not value]
        if missing:
            _note(f"error: simulate needs --config or {', '.join(missing)}")
            return 2
        config = SimConfig(
            network_path=args.net,
            weather_path=args.weather,
            fleet_path=args.fleet,
            requests_path=args.requests,
            slot_duration_s=args.slot_duration,
            slot_count=args.slots,
            seed=args.seed,
            output_dir=args.out,
        )
    report = Simulation(config).run()
    _note(f"wrote flight and event logs under {config.output_dir}")
    _emit(report.to_dict())
    return 0


def cmd_gen_corpus(args: argparse.Namespace) -> int:
    net = load_network(args.net)
    records = intake.generate_corpus(net, args.count, args.seed)
    intake.save_corpus(records, args.out)
    _emit({"records": len(records), "out": args.out})
    return 0


def cmd_parse(args: argparse.Namespace) -> int:
    net = load_network(args.net)
    records = intake.load_corpus(args.infile)
    texts = [rec.free_text for rec in records]
    if args.backend == "pattern":
        results = [intake.extract_pattern(text, net) for text in texts]
    else:
        cfg = BackendConfig.from_env()
        results = intake.extract_llm_many(texts, cfg, net)
    lines = []
    for rec, res in zip(records, results):
        doc = {"request_id": rec.structured.request_id}
        doc.update(res.to_dict())
        lines.append(json.dumps(doc))
    with open(args.out, "w", encoding="utf-8") as fp:
        fp.write("\n".join(lines) + ("\n" if lines else ""))
    _emit({"records": len(lines), "out": args.out})
    return 0


def _load_predictions(path: str) -> list[ExtractionResult]:
    results = []
    with open(path, encoding="utf-8") as fp:
        for line in fp:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            results.append(ExtractionResult(
                start_node=doc.get("start_node"),
                destination_node=doc.get("destination_node"),
                payload_kg=doc.get("payload_kg"),
                diagnostics=[tuple(d) for d in doc.get("diagnostics", [])],
            ))
    return results


def cmd_eval(args: argparse.Namespace) -> int:
    preds = _load_predictions(args.pred)
    golds = [rec.structured for rec in intake.load_corpus(args.gold)]
    report = intake.evaluate(preds, golds)
    _emit(report.to_dict())
    return 0


def cmd_gen_net(args: argparse.Namespace) -> int:
    net = synth.gen_network(args.stations, args.seed)
    doc = network_to_dict(net)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            json.dump(doc, fp, indent=2)
            fp.write("\n")
        _emit({"stations": len(net.stations), "edges": len(net.edges), "out": args.out})
    else:
        _emit(doc)
    return 0


def cmd_gen_weather(args: argparse.Namespace) -> int:
    net = load_network(args.net)
    series = synth.gen_weather(net, args.slots, args.seed)
    if args.out:
        write_weather_csv(args.out, series)
        _emit({"slots": series.slot_count, "stations": len(net.stations), "out": args.out})
    else:
        import csv as _csv
        from .weather import WEATHER_CSV_HEADER
        writer = _csv.writer(sys.stdout)
        writer.writerow(WEATHER_CSV_HEADER)
        for (slot, station), s in sorted(series.items()):
            writer.writerow([slot, station, s.temperature_c, s.wind_speed_ms,
                             s.wind_direction_deg, s.humidity_pct, s.precipitation_mm])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="daas", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("route", help="plan a route with dijkstra, astar, or both")
    p.add_argument("--net", required=True)
    p.add_argument("--weather", required=True)
    p.add_argument("--slot", type=int, default=0)
    p.add_argument("--algo", choices=["dijkstra", "astar", "both"], default="both")
    p.add_argument("--cost", choices=sorted(_COST), default="time")
    p.add_argument("--heuristic", choices=sorted(_HEURISTIC), default="admissible")
    p.add_argument("--from", dest="src", type=int, required=True)
    p.add_argument("--to", dest="dst", type=int, required=True)
    p.add_argument("--speed", type=float, default=20.0)
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("simulate", help="run the fleet simulation")
    p.add_argument("--config")
    p.add_argument("--net")
    p.add_argument("--weather")
    p.add_argument("--fleet")
    p.add_argument("--requests")
    p.add_argument("--slots", type=int, default=48)
    p.add_argument("--slot-duration", type=float, default=DEFAULT_SLOT_DURATION_S)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="sim_out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-corpus", help="generate a free-text request corpus")
    p.add_argument("--net", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("parse", help="extract structured requests from a corpus")
    p.add_argument("--backend", choices=["pattern", "llm"], required=True)
    p.add_argument("--net", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="score predictions against a gold corpus")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen-net", help="generate a random connected network")
    p.add_argument("--stations", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_net)

    p = sub.add_parser("gen-weather", help="generate a weather CSV for a network")
    p.add_argument("--net", required=True)
    p.add_argument("--slots", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_weather)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DaasError as exc:
        _note(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

    congest-apsp gen random 32 --weights 1..1024 --seed 7 -o g.txt
    congest-apsp run --graph g.txt --mode apsp --check-oracle --stats-out s.json

Exit codes: 0 ok, 1 verification or oracle failure, 2 usage or IO error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

from .config import Config
from .driver import apsp, kssp, phase_budget_ratios, verify_distributed
from .errors import BadSpec, CongestError, GraphError, VerificationFailed
from .generators import SPECS, generate, parse_range
from .graph import WeightedDigraph, read_graph, serialize_graph

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MODES = ("apsp", "kssp", "phase-bench")


@dataclass
class ExperimentConfig:
    mode: str = "apsp"
    graph: str = ""
    seed: int = 0
    k: int | None = None
    sources: list = field(default_factory=list)
    h: int | None = None
    alpha: float = 1.0
    bandwidth_factor: int = 8
    weight_exponent: int = 2
    check_oracle: bool = False
    emit_distances: str | None = None
    stats_out: str | None = None
    inject_fault: str | None = None

    def algorithm_config(self) -> Config:
        return Config(alpha=self.alpha, bandwidth_factor=self.bandwidth_factor,
                      weight_exponent=self.weight_exponent, h=self.h)


class UsageError(Exception):
    pass


def load_graph(spec: str, seed: int, exponent: int = 2) -> WeightedDigraph:
    """A file path, or a generator spec `NAME:N[:LO..HI]` seeded with `seed`."""
    if os.path.exists(spec):
        return read_graph(spec, exponent=exponent)
    parts = spec.split(":")
    if parts[0] in SPECS and len(parts) in (2, 3):
        try:
            n = int(parts[1])
        except ValueError:
            raise BadSpec(f"bad node count in {spec!r}") from None
        lo, hi = parse_range(parts[2]) if len(parts) == 3 else (1, None)
        return generate(parts[0], n, lo, hi, seed=seed)
    raise UsageError(f"graph {spec!r} is neither a file nor a generator spec")


def parse_fault(text: str, n: int) -> tuple[str, int, int]:
    try:
        kind, s, t = text.split(":")
        s, t = int(s), int(t)
    except ValueError:
        raise UsageError(f"fault must look like inflate:S:T or deflate:S:T, got {text!r}") from None
    if kind not in ("inflate", "deflate") or not (0 <= s < n and 0 <= t < n):
        raise UsageError(f"bad fault {text!r}")
    return kind, s, t


def apply_fault(table: dict, kind: str, s: int, t: int) -> None:
    """Corrupt the entry dist(s, t) held by t."""
    if s not in table:
        raise UsageError(f"source {s} is not tracked")
    d = table[s][t]
    table[s][t] = d + 1 if kind == "inflate" else d - 1


def _distance_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(["inf" if x == math.inf else x for x in row])
    return buf.getvalue()


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def execute(cfg: ExperimentConfig) -> tuple[int, dict]:
    g = load_graph(cfg.graph, cfg.seed, cfg.weight_exponent)
    fault = parse_fault(cfg.inject_fault, g.n) if cfg.inject_fault else None
    conf = cfg.algorithm_config()
    if cfg.mode == "kssp":
        sources = sorted(set(cfg.sources))
        if not sources:
            raise UsageError("kssp needs --sources")
        if cfg.k is not None and cfg.k != len(sources):
            raise UsageError(f"--k {cfg.k} does not match {len(sources)} sources")
        if any(not 0 <= s < g.n for s in sources):
            raise UsageError("source outside the graph")
        run = kssp(g, sources, seed=cfg.seed, config=conf)
    elif cfg.mode in ("apsp", "phase-bench"):
        run = apsp(g, seed=cfg.seed, config=conf)
    else:
        raise UsageError(f"unknown mode {cfg.mode!r}")
    table = {s: list(row) for s, row in zip(run.sources, run.dist)}
    if fault:
        apply_fault(table, *fault)
    verdict = verify_distributed(run.engine, g, table, phase="final-verify")
    record = {"status": "ok", "mode": cfg.mode, "n": g.n, "seed": cfg.seed}
    stats = run.stats_json()
    code = EXIT_OK
    if not verdict.ok:
        code = EXIT_FAIL
        record.update(status="verification_failed", witnesses=[list(p) for p in verdict.witnesses])
    if cfg.check_oracle:
        from .oracle import dijkstra
        wrong = [[s, t] for s, row in table.items()
                 for t, (a, b) in enumerate(zip(row, dijkstra(g, s))) if a != b]
        if wrong:
            code = EXIT_FAIL
            record.setdefault("witnesses", [])
            record["status"] = "oracle_mismatch" if verdict.ok else record["status"]
            record["oracle_mismatches"] = wrong
    if cfg.mode == "phase-bench":
        stats["budget_ratios"] = phase_budget_ratios(run)
    stats["result"] = record
    if cfg.emit_distances:
        _write(cfg.emit_distances, _distance_csv(table[s] for s in run.sources))
    if cfg.stats_out:
        _write(cfg.stats_out, json.dumps(stats, sort_keys=True, indent=2) + "\n")
    return code, record


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="congest-apsp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a generated graph file")
    gen.add_argument("spec", choices=SPECS)
    gen.add_argument("n", type=int)
    gen.add_argument("--weights", default=None, help="LO..HI (default 1..n^2)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output", default="-")

    run = sub.add_parser("run", help="run a pipeline on a graph")
    run.add_argument("--graph", required=True, help="graph file or NAME:N[:LO..HI]")
    run.add_argument("--mode", choices=MODES, default="apsp")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--k", type=int)
    run.add_argument("--sources", default="", help="comma separated source IDs")
    run.add_argument("--h", type=int)
    run.add_argument("--alpha", type=float, default=1.0)
    run.add_argument("--bandwidth-factor", type=int, default=8)
    run.add_argument("--weight-exponent", type=int, default=2)
    run.add_argument("--check-oracle", action="store_true")
    run.add_argument("--emit-distances", metavar="CSV", help="distance matrix CSV ('-' for stdout)")
    run.add_argument("--stats-out", metavar="JSON", help="stats JSON ('-' for stdout)")
    run.add_argument("--inject-fault", metavar="KIND:S:T", help="corrupt one entry before verifying")
    return ap


def _gen(args) -> int:
    lo, hi = parse_range(args.weights) if args.weights else (1, None)
    g = generate(args.spec, args.n, lo, hi, seed=args.seed)
    _write(args.output, serialize_graph(g))
    return EXIT_OK


def _run(args) -> int:
    try:
        sources = [int(x) for x in args.sources.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --sources {args.sources!r}") from None
    cfg = ExperimentConfig(
        mode=args.mode, graph=args.graph, seed=args.seed, k=args.k, sources=sources, h=args.h,
        alpha=args.alpha, bandwidth_factor=args.bandwidth_factor,
        weight_exponent=args.weight_exponent, check_oracle=args.check_oracle,
        emit_distances=args.emit_distances, stats_out=args.stats_out,
        inject_fault=args.inject_fault)
    code, record = execute(cfg)
    if code != EXIT_OK:
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _gen(args) if args.command == "gen" else _run(args)
    except VerificationFailed as exc:
        print(json.dumps({"status": "verification_failed", "error": str(exc),
                          "witnesses": [list(w) for w in exc.witnesses]}), file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, BadSpec, GraphError, OSError) as exc:
        print(json.dumps({"status": "usage_error", "error": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except CongestError as exc:
        print(json.dumps({"status": "model_violation", "error": str(exc)}), file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

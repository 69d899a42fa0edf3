"""Command-line entry point: ``kplist <subcommand>``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import KplistError
from .generators import FAMILIES, generate
from .graph import read_edgelist, write_edgelist
from .harness import ExperimentConfig, bench_sweep, format_scaling, run_experiment
from .oracle import enumerate_cliques


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _pairs(items: list[str] | None, what: str) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise KplistError(f"{what} expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _value(v)
    return out


def parse_seeds(text: str) -> list[int]:
    """``"3"``, ``"0,2,5"`` or ``"0-49"`` (inclusive)."""
    seeds: list[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if "-" in chunk[1:]:
            lo, hi = chunk.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif chunk:
            seeds.append(int(chunk))
    return seeds


def _graph_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("graph")
    g.add_argument("--graph", help="edge-list file to read instead of generating")
    g.add_argument("--family", choices=FAMILIES)
    g.add_argument("--n", type=int, help="number of nodes")
    g.add_argument("--param", action="append", metavar="KEY=VALUE", help="generator parameter (repeatable)")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="experiment JSON; flags below override it")
    p.add_argument("--seeds", help="seed list such as 0-49 or 1,4,9")
    p.add_argument("--out", help="output directory")
    p.add_argument("--profile", choices=("desk", "faithful"))
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="constant override (repeatable)")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-oracle", action="store_true", help="skip the brute-force comparison")
    _graph_args(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kplist", description="CONGEST clique-listing simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated graph as an edge list")
    _graph_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="edge-list file")

    p = sub.add_parser("decompose", help="expander decomposition with validation")
    _common(p)

    p = sub.add_parser("partition-test", help="repeated random partitions against the edge bounds")
    _common(p)
    p.add_argument("--trials", type=int, help="use seeds 0..trials-1")
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--n1", type=int, help="nodes 0..n1-1 form the first side")
    p.add_argument("--n-bar", type=float)

    p = sub.add_parser("list", help="list all p-cliques")
    _common(p)
    p.add_argument("--algo", choices=("kp", "k4"), default="k4")
    p.add_argument("--p", type=int)

    p = sub.add_parser("sparse", help="list inside one cluster")
    _common(p)
    p.add_argument("--p", type=int, default=4)
    p.add_argument("--members", help="comma-separated cluster members (default: largest cluster)")
    p.add_argument("--precondition", choices=("full", "restricted", "unchecked"))

    p = sub.add_parser("bench", help="rounds against n with a fitted log-log slope")
    _common(p)
    p.add_argument("--p", type=int, default=4)
    p.add_argument("--n-list", help="comma-separated sizes")
    p.add_argument("--avg-degree-factor", type=float, help="average degree = factor * sqrt(n)")

    p = sub.add_parser("verify", help="compare a clique file against brute force")
    p.add_argument("--graph", required=True)
    p.add_argument("--cliques", required=True)
    p.add_argument("--p", type=int, required=True)
    return parser


def _experiment(args, algorithm: str) -> ExperimentConfig:
    data = json.loads(Path(args.config).read_text()) if args.config else {}
    data["algorithm"] = algorithm
    graph = dict(data.get("graph", {}))
    if args.graph:
        graph = {"path": args.graph}
    elif args.family:
        graph = {"family": args.family, "params": {}}
    if args.n is not None or args.param:
        params = dict(graph.get("params", {}))
        if args.n is not None:
            params["n"] = args.n
        params.update(_pairs(args.param, "--param"))
        graph["params"] = params
    data["graph"] = graph
    if args.seeds:
        data["seeds"] = parse_seeds(args.seeds)
    if args.out:
        data["output"] = args.out
    if args.profile:
        data["profile"] = args.profile
    if args.set:
        data["constants"] = {**data.get("constants", {}), **_pairs(args.set, "--set")}
    if args.workers:
        data["workers"] = args.workers
    if args.no_oracle:
        data["oracle"] = False
    return data


def _print_report(report) -> None:
    for r in report.seeds:
        status = "ok" if r.ok else "FAIL"
        bits = [f"seed {r.seed}: {status}", f"rounds={r.rounds}", f"found={r.found}"]
        if r.oracle_checked:
            bits.append(f"missing={r.missing} extra={r.extra}")
        if r.claim_failures:
            bits.append("claims failed: " + ",".join(r.claim_failures))
        if r.error:
            bits.append(r.error)
        print("  ".join(bits))
    print("all ok" if report.ok else "FAILED")


def _run(args) -> int:
    cmd = args.command
    if cmd == "generate":
        if not args.family:
            raise KplistError("generate needs --family")
        params = _pairs(args.param, "--param")
        if args.n is not None:
            params["n"] = args.n
        gen = generate(args.family, params, args.seed)
        meta = {"family": args.family, "params": params, "seed": args.seed, "planted": [list(c) for c in gen.planted]}
        write_edgelist(gen.graph, args.out, meta)
        print(f"wrote {gen.graph.n} nodes, {gen.graph.m} edges to {args.out}")
        return 0
    if cmd == "verify":
        g, _ = read_edgelist(args.graph)
        found = set()
        for line in Path(args.cliques).read_text().splitlines():
            if line.strip():
                found.add(tuple(sorted(int(x) for x in line.split())))
        want = enumerate_cliques(g, args.p)
        missing, extra = want - found, found - want
        print(f"expected {len(want)}, found {len(found)}, missing {len(missing)}, extra {len(extra)}")
        for c in sorted(missing)[:10]:
            print("missing", *c)
        for c in sorted(extra)[:10]:
            print("extra", *c)
        return 0 if not missing and not extra else 1

    algorithm = {
        "decompose": "decompose-only",
        "partition-test": "partition-test",
        "sparse": "sparse-only",
        "bench": "k4",
    }.get(cmd)
    if cmd == "list":
        algorithm = args.algo
    data = _experiment(args, algorithm)
    if cmd == "list":
        data["p"] = args.p if args.p is not None else data.get("p", 4 if args.algo == "k4" else 5)
    if cmd == "sparse":
        data["p"] = args.p
        sp = dict(data.get("sparse", {}))
        if args.members:
            sp["members"] = [int(x) for x in args.members.split(",")]
        if args.precondition:
            sp["precondition"] = args.precondition
        data["sparse"] = sp
    if cmd == "partition-test":
        if args.trials:
            data["seeds"] = list(range(args.trials))
        part = dict(data.get("partition", {}))
        for key in ("a", "b", "n1", "n_bar"):
            val = getattr(args, key)
            if val is not None:
                part[key] = val
        data["partition"] = part
    if cmd == "bench":
        data["p"] = args.p
        data["algorithm"] = "k4" if args.p == 4 else "kp"
        bench = dict(data.get("bench", {}))
        if args.n_list:
            bench["n_list"] = [int(x) for x in args.n_list.split(",")]
        if args.avg_degree_factor is not None:
            bench["avg_degree_factor"] = args.avg_degree_factor
        data["bench"] = bench
        report = bench_sweep(ExperimentConfig.from_dict(data))
        print(format_scaling(report))
        return 0
    report = run_experiment(ExperimentConfig.from_dict(data))
    _print_report(report)
    return 0 if report.ok else 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except KplistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

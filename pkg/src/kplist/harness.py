"""Experiment configuration, per-seed execution, reports and scaling sweeps."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable

import numpy as np

from . import k4, kp
from .config import Config
from .congest import RoundLedger
from .decomp import decompose, validate_decomposition
from .errors import InputError, KplistError
from .framework import ClaimLog
from .generators import generate
from .graph import Graph, read_edgelist
from .oracle import enumerate_cliques, qualifying_all
from .partition import check_conditions, conforming_spec, sample_partition, verify_bounds
from .sparse import ListingInstance, list_all

ALGORITHMS = ("kp", "k4", "sparse-only", "partition-test", "decompose-only")


@dataclass
class ExperimentConfig:
    """Everything one experiment needs; ``from_dict`` rejects unknown keys at every level."""

    graph: dict
    algorithm: str = "k4"
    p: int = 4
    profile: str | None = None
    constants: dict = field(default_factory=dict)
    seeds: list[int] = field(default_factory=lambda: [0])
    output: str | None = None
    workers: int = 1
    oracle: bool = True
    partition: dict = field(default_factory=dict)
    sparse: dict = field(default_factory=dict)
    bench: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InputError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if not isinstance(self.graph, dict) or not ({"family", "path"} & set(self.graph)):
            raise InputError("graph needs a 'family' (with 'params') or a 'path'")
        _only(self.graph, {"family", "params", "path"}, "graph")
        _only(self.partition, {"n1", "a", "b", "n_bar"}, "partition")
        _only(self.sparse, {"members", "precondition"}, "sparse")
        _only(self.bench, {"n_list", "avg_degree_factor", "avg_degree_exponent"}, "bench")
        if not self.seeds or not all(isinstance(s, int) for s in self.seeds):
            raise InputError("seeds must be a non-empty list of integers")
        if self.workers < 1:
            raise InputError("workers must be at least 1")
        if self.algorithm == "kp" and self.p < 5:
            raise InputError("the kp algorithm needs p >= 5")
        if self.algorithm == "k4" and self.p != 4:
            raise InputError("the k4 algorithm lists p = 4 only")
        self.config()

    def config(self) -> Config:
        base = {"p": self.p, **self.constants}
        if self.profile:
            return Config.profile(self.profile, **base)
        return Config.from_dict(base)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown experiment keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> ExperimentConfig:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)


def _only(d: dict, allowed: set, where: str) -> None:
    extra = set(d) - allowed
    if extra:
        raise InputError(f"unknown {where} keys: {sorted(extra)}")


def build_graph(spec: dict, seed: int) -> tuple[Graph, dict]:
    if "path" in spec:
        return read_edgelist(spec["path"])
    gen = generate(spec["family"], spec.get("params", {}), seed)
    return gen.graph, {**gen.meta, "planted": [list(c) for c in gen.planted]}


@dataclass
class SeedReport:
    seed: int
    ok: bool
    rounds: int = 0
    found: int = 0
    missing: int = 0
    extra: int = 0
    oracle_checked: bool = False
    claim_failures: list[str] = field(default_factory=list)
    error: str | None = None
    detail: dict = field(default_factory=dict)


@dataclass
class ExperimentReport:
    ok: bool
    seeds: list[SeedReport]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "seeds": [asdict(s) for s in self.seeds]}


def _write_cliques(path: Path, cliques) -> None:
    path.write_text("".join(" ".join(map(str, c)) + "\n" for c in sorted(cliques)))


def _write_rows(path: Path, rows: list[dict], header) -> None:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(header), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    path.write_text(buf.getvalue())


def _oracle_diff(rep: SeedReport, found: set, want: set) -> None:
    rep.oracle_checked = True
    rep.missing = len(want - found)
    rep.extra = len(found - want)
    if rep.missing or rep.extra:
        rep.detail["missing_sample"] = [list(c) for c in sorted(want - found)[:10]]
        rep.detail["extra_sample"] = [list(c) for c in sorted(found - want)[:10]]


def run_seed(exp: ExperimentConfig, seed: int) -> SeedReport:
    """Run one seed of the experiment and write its files when an output directory is set."""
    out = Path(exp.output) / f"seed_{seed}" if exp.output else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    rep = SeedReport(seed, False)
    cfg = exp.config().with_(strict_claims=False)
    ledger = RoundLedger()
    claims = ClaimLog(strict=False)
    try:
        g, _ = build_graph(exp.graph, seed)
        rep.detail["n"], rep.detail["m"] = g.n, g.m
        cliques: set | None = None
        if exp.algorithm in ("kp", "k4"):
            res = k4.run(g, seed, cfg) if exp.algorithm == "k4" else kp.run(g, exp.p, seed, cfg)
            ledger, claims, cliques = res.ledger, res.claims, res.cliques
            rep.detail["iterations"] = len(res.iterations)
            if exp.oracle and g.n <= cfg.oracle_cap:
                _oracle_diff(rep, cliques, enumerate_cliques(g, exp.p, cfg.oracle_cap))
        elif exp.algorithm == "sparse-only":
            inst = sparse_instance(g, exp, cfg, seed)
            res = list_all(inst, seed, ledger, precondition=exp.sparse.get("precondition", "unchecked"))
            cliques = res.cliques
            rep.detail.update(path=res.path, a=res.a, b=res.b, precondition_ok=res.precondition_ok)
            if exp.oracle:
                _oracle_diff(rep, cliques, qualifying_all(inst, cfg.oracle_cap))
        elif exp.algorithm == "partition-test":
            _partition_trial(g, exp, seed, claims, rep, out)
        else:
            _decompose_only(g, cfg, seed, ledger, claims, rep, out)
        rep.rounds = ledger.total_rounds
        rep.found = len(cliques) if cliques is not None else 0
        rep.claim_failures = sorted({f.claim for f in claims.failures()})
        rep.ok = not rep.claim_failures and not rep.missing and not rep.extra
        if out:
            ledger.write(out)
            claims.write(out / "claims.csv")
            if cliques is not None:
                _write_cliques(out / "cliques.txt", cliques)
    except KplistError as exc:
        rep.error = f"{type(exc).__name__}: {exc}"
        rep.ok = False
    if out:
        (out / "report.json").write_text(json.dumps(asdict(rep), indent=2, default=str))
    return rep


def sparse_instance(g: Graph, exp: ExperimentConfig, cfg: Config, seed: int) -> ListingInstance:
    """The listing task of one cluster: given members, or the largest cluster of a decomposition."""
    if "members" in exp.sparse:
        members = np.asarray(sorted(exp.sparse["members"]), dtype=np.int64)
    else:
        cl = decompose(g, cfg.phi_for(g.n), seed, cfg, nodes=g.active_nodes())
        members = max(cl.clusters, key=lambda c: (len(c), -int(c[0])))
    light, heavy, bad = kp.classify_outside(g, members, g.n, cfg.p)
    holdings, e_prime, e_bar = kp.gather_cross_edges(g, members, light, heavy, bad, g.n, cfg.p, RoundLedger(), cfg.B)
    inside = np.zeros(g.n, dtype=bool)
    inside[members] = True
    e = g.edges
    e_c = set(map(tuple, e[inside[e[:, 0]] & inside[e[:, 1]]].tolist()))
    return ListingInstance(g.n, members, e_c, e_bar, e_prime, holdings, cfg.p, cfg)


def _partition_trial(g, exp, seed, claims, rep, out) -> None:
    par = exp.partition
    n1 = par.get("n1", g.n // 2)
    spec = conforming_spec(g, range(n1), par.get("a", 2), par.get("b", 4), par.get("n_bar"))
    cond = check_conditions(spec)
    claims.check("partition_conditions", 0, len(cond.failed()), 0, detail=",".join(cond.failed()))
    part = sample_partition(spec, seed)
    report = verify_bounds(g, spec, part)
    claims.check("partition_bound_inside", 0, report.max1, report.bound1)
    claims.check("partition_bound_outside", 0, report.max2, report.bound2)
    claims.check("partition_bound_cross", 0, report.max12, report.bound12)
    rep.detail["bounds"] = report.row(seed)
    if out:
        _write_rows(out / "bounds.csv", [report.row(seed)], report.row(seed).keys())


def _decompose_only(g, cfg, seed, ledger, claims, rep, out) -> None:
    phi = cfg.phi_for(g.n)
    cl = decompose(g, phi, seed, cfg, nodes=g.active_nodes())
    ledger.charge("decomp", cl.charged_rounds)
    eps = cfg.epsilon_for(g.n)
    report = validate_decomposition(g, cl, eps, seed, strict=False)
    claims.check("decomposition_epsilon", 0, float(report.epsilon), eps)
    for f in report.failures:
        claims.check("decomposition_valid", 0, 1, 0, holds=False, detail=f)
    rep.detail.update(clusters=len(cl.clusters), epsilon=float(cl.achieved_epsilon), phi=None if cl.achieved_phi is None else float(cl.achieved_phi))
    if out:
        cl.save(out / "clustering.json")


def _run_seed_job(args) -> dict:
    data, seed = args
    return asdict(run_seed(ExperimentConfig.from_dict(data), seed))


def run_experiment(exp: ExperimentConfig) -> ExperimentReport:
    """Every seed, fanned out to ``workers`` processes; results come back sorted by seed."""
    jobs = [(exp.to_dict(), s) for s in exp.seeds]
    if exp.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=exp.workers) as pool:
            raw = list(pool.map(_run_seed_job, jobs))
        reports = [SeedReport(**r) for r in raw]
    else:
        reports = [run_seed(exp, s) for s in exp.seeds]
    reports.sort(key=lambda r: r.seed)
    result = ExperimentReport(all(r.ok for r in reports), reports)
    if exp.output:
        out = Path(exp.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "summary.json").write_text(json.dumps(result.to_dict(), indent=2, default=str))
        (out / "config.json").write_text(json.dumps(exp.to_dict(), indent=2))
    return result


# scaling sweeps

SCALING_FIELDS = (
    "n",
    "p",
    "seeds",
    "total_rounds",
    "rounds_over_polylog",
    "per_phase",
    "slope",
    "slope_over_polylog",
    "reference_slope",
    "slope_above_one",
)


def phase_group(label: str) -> str:
    """Collapse a ledger label to its top two dotted components, dropping any bracketed suffix."""
    head = label.split("[", 1)[0]
    return ".".join(head.split(".")[:2])


def fit_slope(ns, rounds) -> float | None:
    """Least-squares slope of log(rounds) against log(n); ``None`` with fewer than two distinct n."""
    ns = np.asarray(ns, dtype=float)
    rs = np.asarray(rounds, dtype=float)
    if len(set(ns.tolist())) < 2 or np.any(rs <= 0):
        return None
    return float(np.polyfit(np.log(ns), np.log(rs), 1)[0])


@dataclass
class ScalingReport:
    rows: list[dict]
    slope: float | None
    reference: float
    flagged: bool
    slope_over_polylog: float | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=SCALING_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r)
        return buf.getvalue()


def _sweep_params(exp: ExperimentConfig, n: int) -> dict:
    params = dict(exp.graph.get("params", {}))
    params["n"] = n
    if "avg_degree_factor" in exp.bench:
        params.pop("p_edge", None)
        params["avg_degree"] = exp.bench["avg_degree_factor"] * n ** exp.bench.get("avg_degree_exponent", 0.5)
    return params


def bench_sweep(
    exp: ExperimentConfig,
    cost: Callable[[int, int], tuple[int, dict]] | None = None,
) -> ScalingReport:
    """Total rounds per n over the seeds, with the fitted log-log slope against ``1 - 2/p``.

    ``cost(n, seed)`` replaces the real run with a synthetic cost model
    returning ``(total_rounds, per_phase)``.
    """
    n_list = exp.bench.get("n_list")
    if not n_list:
        raise InputError("bench needs bench.n_list")
    cfg = exp.config().with_(strict_claims=False)
    rows = []
    for n in n_list:
        totals, phases = [], {}
        for s in exp.seeds:
            if cost is not None:
                total, per = cost(n, s)
            else:
                g = generate(exp.graph["family"], _sweep_params(exp, n), s).graph
                res = k4.run(g, s, cfg) if exp.p == 4 else kp.run(g, exp.p, s, cfg)
                total, per = res.rounds, res.ledger.per_phase
            totals.append(total)
            for lab, r in per.items():
                key = phase_group(lab)
                phases[key] = phases.get(key, 0) + r
        k = len(exp.seeds)
        rows.append(
            {
                "n": n,
                "p": exp.p,
                "seeds": k,
                "total_rounds": float(np.mean(totals)),
                "rounds_over_polylog": float(np.mean(totals)) / cfg.kappa_route_for(n),
                "per_phase": json.dumps({lab: v / k for lab, v in sorted(phases.items())}),
            }
        )
    slope = fit_slope([r["n"] for r in rows], [r["total_rounds"] for r in rows])
    reduced = fit_slope([r["n"] for r in rows], [r["rounds_over_polylog"] for r in rows])
    reference = 1 - 2 / exp.p
    flagged = slope is not None and slope > 1.0
    for r in rows:
        r.update(
            slope="" if slope is None else round(slope, 4),
            slope_over_polylog="" if reduced is None else round(reduced, 4),
            reference_slope=reference,
            slope_above_one=flagged,
        )
    report = ScalingReport(rows, slope, reference, flagged, reduced)
    if exp.output:
        out = Path(exp.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "scaling.csv").write_text(report.to_csv())
        (out / "scaling.json").write_text(
            json.dumps(
                {
                    "slope": slope,
                    "slope_over_polylog": reduced,
                    "reference": reference,
                    "slope_above_one": flagged,
                    "rows": rows,
                },
                indent=2,
            )
        )
    return report


def format_scaling(report: ScalingReport) -> str:
    lines = [f"{'n':>6} {'rounds':>12}"]
    lines += [f"{r['n']:>6} {r['total_rounds']:>12.0f}" for r in report.rows]
    slope = "undefined" if report.slope is None else f"{report.slope:.3f}"
    lines.append(f"fitted slope {slope}; reference 1-2/p = {report.reference:.3f}")
    if report.slope_over_polylog is not None:
        lines.append(f"slope after dividing out the routing polylog factor {report.slope_over_polylog:.3f}")
    if report.flagged:
        lines.append("WARNING: slope above 1.0, worse than the trivial O(max degree) baseline")
    return "\n".join(lines)


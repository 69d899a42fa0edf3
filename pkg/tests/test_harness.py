from __future__ import annotations

import json

import pytest

from kplist.errors import InputError
from kplist.harness import (
    ExperimentConfig,
    bench_sweep,
    fit_slope,
    format_scaling,
    phase_group,
    run_experiment,
    run_seed,
)

ER = {"family": "erdos-renyi", "params": {"n": 40, "p_edge": 0.4}}


def exp(**kw) -> ExperimentConfig:
    return ExperimentConfig.from_dict({"graph": ER, **kw})


class TestConfig:
    @pytest.mark.parametrize(
        "data",
        [
            {"graph": ER, "algorithm": "bogus"},
            {"graph": {"params": {}}},
            {"graph": {**ER, "extra": 1}},
            {"graph": ER, "partition": {"c": 1}},
            {"graph": ER, "seeds": []},
            {"graph": ER, "workers": 0},
            {"graph": ER, "algorithm": "kp", "p": 4},
            {"graph": ER, "algorithm": "k4", "p": 5},
            {"graph": ER, "constants": {"W": 0}},
            {"graph": ER, "constants": {"nonsense": 1}},
            {"graph": ER, "unknown": True},
        ],
    )
    def test_rejected(self, data):
        with pytest.raises(InputError):
            ExperimentConfig.from_dict(data)

    def test_roundtrip(self, tmp_path):
        e = exp(seeds=[1, 2], constants={"beta": 3.0}, profile="faithful")
        path = tmp_path / "e.json"
        path.write_text(json.dumps(e.to_dict()))
        back = ExperimentConfig.load(path)
        assert back == e
        assert back.config().beta == 3.0


def test_k4_seed_writes_artifacts(tmp_path):
    rep = run_seed(exp(output=str(tmp_path)), 0)
    assert rep.ok and rep.oracle_checked and rep.missing == rep.extra == 0
    d = tmp_path / "seed_0"
    for name in ("ledger.csv", "ledger.json", "claims.csv", "cliques.txt", "report.json"):
        assert (d / name).exists()
    assert len((d / "cliques.txt").read_text().splitlines()) == rep.found


def test_kp_seed():
    rep = run_seed(exp(algorithm="kp", p=5), 3)
    assert rep.ok and rep.oracle_checked


def test_sparse_only_with_members():
    rep = run_seed(exp(algorithm="sparse-only", sparse={"members": list(range(20))}), 1)
    assert rep.ok and rep.oracle_checked
    assert rep.detail["path"] in ("smallK", "padded", "normal")


def test_sparse_only_default_cluster():
    assert run_seed(exp(algorithm="sparse-only"), 1).ok


def test_partition_trial(tmp_path):
    e = ExperimentConfig.from_dict(
        {"graph": {"family": "erdos-renyi", "params": {"n": 120, "p_edge": 0.3}}, "algorithm": "partition-test",
         "partition": {"n1": 50, "a": 2, "b": 3, "n_bar": 64}, "output": str(tmp_path)}
    )
    rep = run_seed(e, 0)
    assert rep.ok
    assert (tmp_path / "seed_0" / "bounds.csv").exists()


def test_decompose_only(tmp_path):
    e = ExperimentConfig.from_dict(
        {"graph": {"family": "two-expanders-bridged", "params": {"n": 40, "p_in": 0.6}}, "algorithm": "decompose-only",
         "output": str(tmp_path)}
    )
    rep = run_seed(e, 0)
    assert rep.ok, rep
    assert (tmp_path / "seed_0" / "clustering.json").exists()


def test_missing_graph_file_is_reported():
    rep = run_seed(ExperimentConfig.from_dict({"graph": {"path": "/nonexistent/graph.txt"}}), 0)
    assert not rep.ok


def test_experiment_parallel_matches_serial(tmp_path):
    serial = run_experiment(exp(seeds=[0, 1, 2]))
    par = run_experiment(exp(seeds=[2, 0, 1], workers=2, output=str(tmp_path)))
    assert [(r.seed, r.rounds, r.found) for r in serial.seeds] == [(r.seed, r.rounds, r.found) for r in par.seeds]
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["ok"] and [s["seed"] for s in summary["seeds"]] == [0, 1, 2]


@pytest.mark.parametrize(
    "label,group",
    [("k4.part3[C=1,C*=2]", "k4.part3"), ("k4.intra.sl.init", "k4.intra"), ("kp.prune", "kp.prune"), ("x", "x")],
)
def test_phase_group(label, group):
    assert phase_group(label) == group


def test_fit_slope():
    assert fit_slope([10, 100, 1000], [5, 50, 500]) == pytest.approx(1.0)
    assert fit_slope([10, 100], [1, 10 ** 0.5]) == pytest.approx(0.5)
    assert fit_slope([10, 10], [1, 2]) is None


def test_bench_with_synthetic_cost(tmp_path):
    e = exp(bench={"n_list": [64, 256, 1024]}, seeds=[0, 1], output=str(tmp_path))
    rep = bench_sweep(e, cost=lambda n, s: (int(n ** 0.5 * 10), {"k4.part1": int(n ** 0.5 * 10)}))
    assert rep.slope == pytest.approx(0.5, abs=0.01)
    assert rep.reference == 0.5 and not rep.flagged
    assert (tmp_path / "scaling.csv").read_text().startswith("n,p,seeds")
    assert "fitted slope 0.500" in format_scaling(rep)


def test_bench_flags_superlinear():
    e = exp(bench={"n_list": [64, 128]})
    rep = bench_sweep(e, cost=lambda n, s: (n * n, {}))
    assert rep.flagged and "WARNING" in format_scaling(rep)


def test_bench_needs_sizes():
    with pytest.raises(InputError):
        bench_sweep(exp())


def test_bench_real_run_small():
    e = ExperimentConfig.from_dict(
        {"graph": {"family": "erdos-renyi", "params": {}}, "bench": {"n_list": [24, 48], "avg_degree_factor": 2.0}}
    )
    rep = bench_sweep(e)
    assert len(rep.rows) == 2 and all(r["total_rounds"] > 0 for r in rep.rows)

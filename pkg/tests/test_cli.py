import csv
import shutil
import subprocess

import pytest
import yaml

from knightmon.cli import main
from knightmon.experiment import PLOT_HEADER, RESULTS_HEADER, ExperimentSpec, run_experiment
from knightmon.knight import PROGRESS_HEADER

GRAPH = "".join(f"{u} {v}\n" for u, v in [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (3, 7), (6, 7), (1, 5)])


@pytest.fixture
def graph(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text(GRAPH)
    return p


def run(graph, out, *extra):
    return main(["--graph", str(graph), "--out", str(out), "--samples", "400", "--epsilon", "0.15",
                 "--reps", "2", "--no-timing", *extra])


def test_results_schema(graph, tmp_path):
    out = tmp_path / "res.csv"
    assert run(graph, out, "--alpha", "2", "--beta", "2,0.5", "--k", "1,2") == 0
    rows = list(csv.reader(out.open()))
    assert ",".join(rows[0]) == "alpha,beta,k,rep,defender_value,iterations,gap,wall_ms"
    assert rows[0] == RESULTS_HEADER
    assert len(rows) == 1 + 4 * 3
    assert [r[3] for r in rows[1:4]] == ["0", "1", "mean"]
    assert {r[1] for r in rows[1:]} == {"2", "4"}
    for r in rows[1:]:
        assert 0 <= float(r[4]) <= 1 and r[7] == "0"
    plot = list(csv.reader((tmp_path / "res_plot.csv").open()))
    assert plot[0] == PLOT_HEADER and len(plot) == 5
    progress = sorted((tmp_path / "res_progress").iterdir())
    assert len(progress) == 8
    assert progress[0].read_text().splitlines()[0] == PROGRESS_HEADER


def test_timing_column_filled(graph, tmp_path):
    out = tmp_path / "res.csv"
    assert main(["--graph", str(graph), "--out", str(out), "--samples", "200", "--epsilon", "0.2",
                 "--reps", "1", "--alpha", "2", "--beta", "3"]) == 0
    rows = list(csv.reader(out.open()))
    assert int(rows[1][7]) >= 0


def test_config_file_with_overrides(graph, tmp_path):
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(yaml.safe_dump({"graph": str(graph), "alpha": [2], "beta": [2, 3], "k": [1],
                                   "samples": 300, "epsilon": 0.2, "reps": 1, "out": str(tmp_path / "a.csv")}))
    assert main(["--config", str(cfg), "--beta", "4", "--no-timing"]) == 0
    rows = list(csv.reader((tmp_path / "a.csv").open()))
    assert [r[1] for r in rows[1:]] == ["4", "4"]


def test_exit_codes(graph, tmp_path):
    assert main(["--alpha", "2"]) == 1
    assert run(tmp_path / "missing.txt", tmp_path / "o.csv") == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n2 2\n")
    assert run(bad, tmp_path / "o.csv") == 2
    assert run(graph, tmp_path / "o.csv", "--alpha", "99") == 1
    assert run(graph, tmp_path / "o.csv", "--k", "0") == 1
    with pytest.raises(SystemExit) as info:
        main(["--graph", str(graph), "--bogus"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["--graph", str(graph), "--alpha", "x"])
    assert info.value.code == 1
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("graph: g.txt\nunknown_key: 1\n")
    assert main(["--config", str(cfg)]) == 1


def test_repeat_runs_identical(graph, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(graph, a, "--alpha", "2", "--beta", "3", "--c2", "1") == 0
    assert run(graph, b, "--alpha", "2", "--beta", "3", "--c2", "1", "--workers", "4") == 0
    assert a.read_bytes() == b.read_bytes()


def test_spec_aliases_and_checks(graph):
    spec = ExperimentSpec.from_mapping({"graph": str(graph), "reps": 3, "max-iters": 7, "alpha": 0.25})
    assert spec.repetitions == 3 and spec.max_iterations == 7 and spec.alpha == [0.25]
    assert spec.cells(8) == [(2, 1, 1)]
    with pytest.raises(ValueError):
        ExperimentSpec(graph_path=str(graph), repetitions=0)


def test_run_experiment_returns_path(graph, tmp_path):
    spec = ExperimentSpec(graph_path=str(graph), alpha=[2], beta=[3], sample_count=200, epsilon=0.2,
                          repetitions=1, output_path=str(tmp_path / "sub" / "r.csv"), timing=False)
    out = run_experiment(spec)
    assert out.exists() and out.parent.name == "sub"


@pytest.mark.skipif(shutil.which("knight-monitor") is None, reason="console script not installed")
def test_console_script_help():
    res = subprocess.run(["knight-monitor", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "--graph" in res.stdout

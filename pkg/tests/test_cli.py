import json
import subprocess
import sys
from pathlib import Path

import pytest

from pirlab.cli import build_parser, main

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_CASES = [
    (["ptm", "--length", "8"], "ptm_8.txt"),
    (["hierarchy", "--length", "16"], "hierarchy_16.json"),
    (["geometry", "--length", "16", "--eps", "1", "--delta", "1"], "geometry_16.csv"),
    (["geometry", "--length", "8", "--eps", "1/2", "--delta", "3/2"], "geometry_8_half.csv"),
    (["predict", "--cp", "0"], "predict_0.txt"),
    (["predict", "--cp", "1"], "predict_1.txt"),
]


def invoke(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv, golden", GOLDEN_CASES)
def test_golden_outputs(capsys, argv, golden):
    code, out, _ = invoke(capsys, *argv)
    assert code == 0
    assert out.encode() == (GOLDEN / golden).read_bytes()


def test_ptm_prefix(capsys):
    assert invoke(capsys, "ptm", "--length", "8")[1] == "+--+-++-\n"


def test_hierarchy_level(capsys):
    _, out, _ = invoke(capsys, "hierarchy", "--length", "16")
    assert json.loads(out)["structural_level"] == 4


def test_hierarchy_with_integer_file(capsys, tmp_path):
    f = tmp_path / "ints.txt"
    f.write_text("10 7 5 2")
    _, out, _ = invoke(capsys, "hierarchy", "--signs", "+--+", "--integers", str(f))
    assert json.loads(out)["structural_level"] == 2


def test_predict_intercept(capsys):
    assert invoke(capsys, "predict", "--cp", "0")[1] == "0.33\n"


def test_usage_error_exit_2(capsys):
    code, _, err = invoke(capsys, "ptm", "--length", "zero")
    assert code == 2
    assert json.loads(err)["error"] == "usage"


def test_unknown_subcommand(capsys):
    assert invoke(capsys, "frobnicate")[0] == 2


def test_data_error_exit_1(capsys):
    code, _, err = invoke(capsys, "geometry", "--length", "16", "--max-level", "5")
    assert code == 1
    assert json.loads(err)["error"] == "LevelUnreachableError"


def test_missing_instance_exit_1(capsys, tmp_path):
    code, _, err = invoke(capsys, "tsp-run", "--instance", str(tmp_path / "nope.json"), "--v", "0.5")
    assert code == 1
    assert "message" in json.loads(err)


def test_render_svg(capsys, tmp_path):
    out = tmp_path / "p.svg"
    assert invoke(capsys, "render", "--length", "4", "--out", str(out))[0] == 0
    text = out.read_text()
    assert text.startswith("<?xml") and text.count('class="level"') == 3


def test_tsp_run_deterministic(capsys, tmp_path, monkeypatch):
    inst = tmp_path / "cities.json"
    inst.write_text(json.dumps({"coords": [[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 2]]}))
    runs = [invoke(capsys, "tsp-run", "--instance", str(inst), "--agents", "9", "--v", "0.4", "--seed", "3")[1]
            for _ in range(2)]
    assert runs[0] == runs[1]
    data = json.loads(runs[0])
    assert len(data["strategy_matrix"]) == 9 and data["config"]["seed"] == 3

    monkeypatch.setenv("PIRLAB_SEED", "3")
    via_env = invoke(capsys, "tsp-run", "--instance", str(inst), "--agents", "9", "--v", "0.4")[1]
    assert via_env == runs[0]


def test_sweep_and_fit_jobs_independent(capsys, tmp_path):
    common = ["--generate", "uniform_square", "--count", "3", "--n", "8", "--grid", "5",
              "--replicates", "3", "--agents", "6", "--seed", "1"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert invoke(capsys, "sweep", *common, "--out", str(a))[0] == 0
    assert invoke(capsys, "sweep", *common, "--out", str(b), "--jobs", "2")[0] == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == ["concavity.csv", "problems.csv", "sweep_000.csv", "sweep_001.csv", "sweep_002.csv"]
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()

    code, out, _ = invoke(capsys, "fit", "--problems", str(a / "problems.csv"))
    assert code == 0
    header, row = out.splitlines()
    assert header == "slope,intercept,r2,K" and row.endswith(",3")


def test_sweep_from_directory(capsys, tmp_path):
    d = tmp_path / "inst"
    d.mkdir()
    (d / "a.json").write_text(json.dumps({"coords": [[0, 0], [1, 0], [0, 1], [2, 2]]}))
    (d / "b.csv").write_text("0,1,2\n1,0,1.5\n2,1.5,0\n")
    out = tmp_path / "o"
    code, stdout, _ = invoke(capsys, "sweep", "--instances", str(d), "--grid", "3", "--replicates", "2",
                             "--agents", "4", "--out", str(out))
    assert code == 0
    assert stdout.splitlines()[0] == "id,name,n,C_p,v_star,C_A"
    assert len(stdout.splitlines()) == 3


def test_help_documents_every_subcommand():
    text = build_parser().format_help()
    for name in ("ptm", "hierarchy", "geometry", "render", "tsp-run", "sweep", "fit", "predict"):
        assert name in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pirlab", "ptm", "--length", "16"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout == "+--+-++--++-+--+\n"

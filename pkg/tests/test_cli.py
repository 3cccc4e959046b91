import json
import subprocess
import sys
import time

import numpy as np
import pytest

from boson_owf import BinningScheme, haar_random_unitary
from boson_owf.cli import main
from boson_owf.distribution import gap_census


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


@pytest.fixture(scope="module")
def ufile(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "u15.json"
    assert main(["unitary", "gen", "--M", "15", "--seed", "1", "--out", str(path)]) == 0
    return path


def test_unitary_gen_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    t = time.perf_counter()
    assert run(capsys, "unitary", "gen", "--M", 26, "--seed", 7, "--out", a)[0] == 0
    assert time.perf_counter() - t < 1.0
    run(capsys, "unitary", "gen", "--M", 26, "--seed", 7, "--out", b)
    assert a.read_bytes() == b.read_bytes()
    code, out = run(capsys, "unitary", "show", a)
    info = json.loads(out)
    assert code == 0 and info["M"] == 26 and info["unitarity_defect"] <= 1e-10


def test_unitary_corrupted(tmp_path, capsys, ufile):
    data = json.loads(ufile.read_text())
    data["entries"][0][1] = 0.5
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out = run(capsys, "unitary", "show", bad)
    assert code == 1 and json.loads(out)["error"] == "IntegrityError"


def test_missing_seed_is_usage_error(capsys, ufile):
    code, out = run(capsys, "sample", "--unitary", ufile, "--input-rank", 3, "--bins", 31, "--count", 10)
    assert code == 1 and json.loads(out)["error"] == "UsageError"
    code, out = run(capsys, "unitary", "gen", "--M", 4)
    assert code == 1


def test_bad_flags_are_usage_errors(capsys):
    code, out = run(capsys, "owf", "eval", "--bogus")
    assert code == 1 and json.loads(out)["error"] == "UsageError"
    code, out = run(capsys, "experiment", "fig6", "--seed", 1)
    assert code == 1 and "unknown experiment" in json.loads(out)["message"]


def test_sample_and_dist(tmp_path, capsys, ufile):
    out_path = tmp_path / "rec.txt"
    code, _ = run(capsys, "sample", "--unitary", ufile, "--input-rank", 3, "--bins", 31,
                  "--count", 1000, "--seed", 5, "--out", out_path)
    lines = out_path.read_text().splitlines()
    assert code == 0 and lines[0] == "# d=31" and len(lines) == 1001
    code, out = run(capsys, "dist", "--unitary", ufile, "--input-rank", 3, "--bins", 31, "--format", "csv")
    rows = out.splitlines()
    assert rows[0] == "bin,probability" and len(rows) == 32
    assert sum(float(r.split(",")[1]) for r in rows[1:]) == pytest.approx(1.0, abs=1e-12)
    code, out = run(capsys, "dist", "--unitary", ufile, "--input-rank", 3, "--format", "csv")
    assert out.splitlines()[0] == "rank,probability" and len(out.splitlines()) == 456


def test_mpb_end_and_abort(capsys, ufile):
    code, out = run(capsys, "mpb", "--unitary", ufile, "--input-rank", 3, "--bins", 31,
                    "--bootstraps", 500, "--round-size", 10**6, "--max-rounds", 20, "--seed", 1)
    assert code == 0 and json.loads(out)["status"] == "END"
    gaps = gap_census(haar_random_unitary(15, 1), 3, BinningScheme(31))
    hard = int(np.argmin(gaps))
    code, out = run(capsys, "mpb", "--unitary", ufile, "--input-rank", hard, "--bins", 31,
                    "--bootstraps", 200, "--round-size", 1000, "--max-rounds", 1, "--seed", 1)
    assert code == 2 and json.loads(out)["status"] == "ABORT"


def test_budget_flag_sets_rounds(capsys, ufile):
    gaps = gap_census(haar_random_unitary(15, 1), 3, BinningScheme(31))
    hard = int(np.argmin(gaps))
    code, out = run(capsys, "mpb", "--unitary", ufile, "--input-rank", hard, "--bins", 31,
                    "--bootstraps", 200, "--round-size", 1000, "--budget", 2500, "--seed", 1)
    assert code == 2 and json.loads(out)["rounds_used"] == 3


def test_owf_eval_exact_is_stable(capsys, ufile):
    outs = [run(capsys, "owf", "eval", "--unitary", ufile, "--bins", 51, "--input", 17)[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["trace"]["rounds"][0]["kappa"] == 17


def test_owf_table_and_census(tmp_path, capsys, ufile):
    t1, t3 = tmp_path / "t1.csv", tmp_path / "t3.csv"
    run(capsys, "owf", "table", "--unitary", ufile, "--bins", 51, "--out", t1, "--threads", 1)
    run(capsys, "owf", "table", "--unitary", ufile, "--bins", 51, "--out", t3, "--threads", 3)
    assert t1.read_bytes() == t3.read_bytes()
    assert t1.read_text().splitlines()[0] == "x,y"
    counts = tmp_path / "census.csv"
    code, out = run(capsys, "analyze", "census", "--unitary", ufile, "--bins", 51, "--csv", counts)
    rep = json.loads(out)
    assert code == 0 and rep["space_size"] == 455
    assert counts.read_text().splitlines()[0] == "y,count"


def test_analyze_tmin_and_cost(capsys):
    code, out = run(capsys, "analyze", "tmin", "--size", 2600, "--nu-max", 5, "--eta", 0.01)
    assert json.loads(out)["t_min"] == 1245
    code, out = run(capsys, "analyze", "cost", "--M", 441, "--N", 21, "--d", 51, "--nu-max", 100)
    assert code == 0 and json.loads(out)["exhaustive_leading"] > 0


def test_experiment_fig5_and_fig7(capsys):
    code, out = run(capsys, "experiment", "fig5", "--M", 15, "--N", 3, "--d", 31, "--unitaries", 3,
                    "--seed", 2000)
    rows = json.loads(out)
    assert code == 0 and [r["eps"] for r in rows] == [1e-5, 1e-4, 1e-3, 1e-2]
    assert all("q_max" in r for r in rows)
    code, out = run(capsys, "experiment", "fig7", "--M", 15, "--N", 3, "--d", 51, "--unitaries", 2,
                    "--seed", 1)
    data = json.loads(out)
    assert sum(data["occurrence"]) == 455 and len(data["per_unitary"]) == 2


SEEDED = [
    ["sample", "--unitary", "{u}", "--input-rank", "9", "--bins", "31", "--count", "2000", "--seed", "4"],
    ["mpb", "--unitary", "{u}", "--input-rank", "9", "--bins", "31", "--bootstraps", "1000",
     "--round-size", "20000", "--max-rounds", "5", "--seed", "4"],
    ["owf", "eval", "--unitary", "{u}", "--bins", "31", "--input", "40", "--mode", "sampled",
     "--bootstraps", "500", "--round-size", "100000", "--max-rounds", "20", "--seed", "4"],
    ["analyze", "birthday", "--unitary", "{u}", "--bins", "51", "--repetitions", "200", "--seed", "4"],
    ["experiment", "fig2", "--sample-sizes", "10000", "30000", "--runs", "4", "--bootstraps", "500",
     "--M", "15", "--input-rank", "9", "--seed", "4", "--format", "csv"],
]


@pytest.mark.parametrize("argv", SEEDED, ids=lambda a: "-".join(a[:2]))
def test_seeded_commands_are_byte_identical(capsys, ufile, argv):
    argv = [a.replace("{u}", str(ufile)) for a in argv]
    a = run(capsys, *argv, "--threads", "1")
    b = run(capsys, *argv, "--threads", "1")
    c = run(capsys, *argv, "--threads", "3")
    assert a == b == c


def test_module_entry_point(ufile):
    proc = subprocess.run([sys.executable, "-m", "boson_owf", "analyze", "tmin", "--size", "455",
                           "--nu-max", "5"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["t_min"] > 0

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from nearcurve.cli import main, parse_args


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count_json(capsys):
    code, out, _ = run(capsys, "count", "--interval", "0,1", "--Q", "2", "--delta", "3/10",
                       "--mode", "raw")
    rec = json.loads(out)
    assert code == 0 and out.count("\n") == 1
    assert list(rec)[:8] == ["mode", "Q", "delta", "count", "main_term", "ratio", "ties", "exact"]
    assert rec["count"] == 4 and rec["exact"] and rec["delta"] == "3/10"


def test_count_list(capsys):
    _, out, _ = run(capsys, "count", "--interval", "0,1", "--Q", "2", "--delta", "0.3",
                    "--mode", "reduced", "--list", "10")
    assert json.loads(out)["points"] == [[0, 0, 1, 0.0], [1, 1, 1, 0.0]]


def test_delta_rational_parsed_exactly():
    cfg = parse_args(["count", "--Q", "5", "--delta", "1/5"])
    assert cfg.options["delta"] == Fraction(1, 5)
    assert "--delta=1/5" in cfg.canonical()


@pytest.mark.parametrize("argv", [
    ["count", "--Q", "10", "--delta", "0.7"],
    ["count", "--Q", "10", "--delta", "0"],
    ["count", "--Q", "10"],
    ["count", "--curve", "spiral", "--Q", "10", "--delta", "0.1"],
    ["count", "--curve", "power:alpha=3", "--interval", "-1,1", "--Q", "10", "--delta", "0.1"],
    ["oscint", "--q", "10", "--method", "stationary", "--j", "4"],
    ["verify", "--only", "nonexistent"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


def test_delta_message(capsys):
    _, _, err = run(capsys, "count", "--Q", "10", "--delta", "0.7")
    assert "delta must lie in (0, 1/2]" in err


def test_resource_exit_3(capsys):
    code, _, err = run(capsys, "oscint", "--q", "1000000000")
    assert code == 3 and "cap" in err


def test_oscint_both(capsys):
    _, out, _ = run(capsys, "oscint", "--curve", "parabola:a=0.5,b=0,c=0", "--interval=-1,1",
                    "--q", "400", "--method", "both")
    rec = json.loads(out)
    assert rec["abs_diff"] < 0.02 and rec["x0"] == 0.0


def test_expsum_dual_et_discrepancy(capsys):
    _, out, _ = run(capsys, "expsum", "--interval", "0,1", "--q", "2")
    assert json.loads(out)["sum"] == pytest.approx([1.0, 0.0], abs=1e-12)
    _, out, _ = run(capsys, "dual", "--y", "3")
    assert json.loads(out)["fstar"] == pytest.approx(2.25)
    _, out, _ = run(capsys, "et-bound", "--sequence", "sqrt2", "--alpha", "0", "--beta", "0.5")
    rec = json.loads(out)
    assert rec["dominated"] and rec["N"] == 10_000
    _, out, _ = run(capsys, "discrepancy", "--Q", "2", "--interval", "0,1")
    assert json.loads(out)["N"] == 5


def test_sweep_csv_and_plot(capsys, tmp_path):
    svg = tmp_path / "a.svg"
    csv_path = tmp_path / "a.csv"
    code, out, _ = run(capsys, "sweep", "--experiment", "asymptotic", "--Q-list", "20,40,80",
                       "--plot", str(svg), "--out", str(csv_path), "--no-timing")
    assert code == 0 and out == ""
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("Q,delta,mode,count") and len(lines) == 4
    assert svg.read_text().startswith("<svg")


def test_sweep_reproducible(capsys):
    argv = ["sweep", "--experiment", "floor", "--Q-list", "100", "--delta-list", "1/1000000000,2/5"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b and a.splitlines()[1] == "100,1/1000000000,33,33,0"


def test_verify_only(capsys):
    code, out, _ = run(capsys, "verify", "--quick", "--only", "fresnel")
    assert code == 0 and out.startswith("PASS [12] fresnel")


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "nearcurve.cli", "count", "--Q", "3",
                          "--delta", "1/4"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["Q"] == 3

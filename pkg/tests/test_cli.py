from __future__ import annotations

import json
import subprocess
import sys

import pytest

from brodylab.cli import main, parse_complex, parse_region
from brodylab.errors import ParseError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, [json.loads(line) for line in out.out.splitlines() if line.strip()], out.err


def test_parse_helpers():
    assert parse_complex("1.5,-2") == complex(1.5, -2)
    assert parse_complex("3") == 3
    assert parse_region("disk:0,1,2").area == pytest.approx(4 * 3.141592653589793)
    with pytest.raises(ParseError):
        parse_region("hexagon:0,0,1")
    with pytest.raises(ParseError):
        parse_complex("a,b")


def test_eval_of_constant(capsys):
    code, recs, _ = run(capsys, "eval", "--curve", "corpus:constant", "--z", "0,0")
    assert code == 0 and recs[0]["value"] == 0
    assert recs[0]["params"]["command"] == "eval"


def test_energy_of_identity(capsys):
    code, recs, _ = run(capsys, "energy", "--curve", "corpus:identity", "--region", "disk:0,0,1")
    assert code == 0 and recs[0]["value"] == pytest.approx(0.5, abs=1e-9)


def test_constants(capsys):
    code, recs, _ = run(capsys, "constants")
    assert recs[0]["value"] == pytest.approx(0.6150198678198, abs=1e-9)


def test_glue_tile_on_constant(capsys):
    code, recs, _ = run(capsys, "glue", "tile", "--curve", "corpus:constant", "--R", "24", "--eps", "1e-3",
                        "--tau", "0.5", "--window", "3")
    tiles = [r for r in recs if r["op"] == "glue_tile"]
    assert code == 0 and len(tiles) == 9 and all(r["value"] == 3 for r in tiles)


def test_curve_file_argument(capsys, tmp_path):
    code, _, _ = run(capsys, "corpus", "--dump", str(tmp_path))
    assert code == 0
    code, recs, _ = run(capsys, "eval", "--curve", str(tmp_path / "identity.json"), "--z", "0")
    assert recs[0]["value"] == pytest.approx(1 / 3.141592653589793**0.5)


def test_precondition_exit_code(capsys):
    code, _, err = run(capsys, "glue", "once", "--curve", "corpus:exp", "--R", "6", "--p", "0,0")
    assert code == 2 and "PreconditionViolated" in err


def test_bad_input_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "eval", "--curve", str(tmp_path / "none.json"), "--z", "0")
    assert code == 2 and "ParseError" in err


def test_glue_once_report(capsys, tmp_path):
    out = tmp_path / "g.json"
    code, recs, _ = run(capsys, "glue", "once", "--curve", "corpus:constant", "--R", "6", "--p", "0,0",
                        "--save", str(out))
    assert code == 0 and recs[0]["value"] is True and out.exists()


def test_failed_bound_exit_code(capsys):
    code, recs, _ = run(capsys, "glue", "once", "--curve", "corpus:constant", "--R", "6", "--p", "0,0",
                        "--K", "10")
    assert code == 4 and recs[0]["value"] is False


def test_output_is_deterministic_across_threads(tmp_path):
    outs = []
    for threads in ("1", "4", "1"):
        path = tmp_path / f"out{threads}-{len(outs)}.jsonl"
        argv = ["nondeg", "--curve", "corpus:exp", "--R", "2", "--window", "csquare:0,0,8",
                "--window", "csquare:0,0,16", "--threads", threads, "--out", str(path)]
        assert main(argv) == 0
        text = path.read_text()
        outs.append(text.replace(f'"threads": {threads}', '"threads": T'))
    assert outs[0] == outs[1] == outs[2]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "brodylab", "eval", "--curve", "corpus:constant", "--z", "0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["value"] == 0

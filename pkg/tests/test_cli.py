import json
import subprocess
import sys

import pytest

import battery as B
from fredblock.cli import main
from fredblock.io import dumps, tuple_document
from fredblock.opmodel import ForwardShift, IdentityOp, op_to_json


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(dumps(doc))
        return str(path)

    out = {"shift": write("shift_fwd_1.json", {"schema": "fredblock/1", "op": op_to_json(ForwardShift(1))}),
           "bare_op": write("bare.json", op_to_json(B.HARMONIC)),
           "ident": write("ident.json", tuple_document((IdentityOp(), IdentityOp()))),
           "bad": str(tmp_path / "bad.json"), "dir": tmp_path}
    for name, diag in B.SCAN_TUPLES.items():
        out[name] = write(f"{name}.json", tuple_document(diag))
    (tmp_path / "bad.json").write_text("{not json")
    return out


def run(args, capsys):
    code = main(args)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_fred_data(files, capsys):
    code, out, _ = run(["fred-data", "--op", files["shift"], "--lambda", "0/1,0/1"], capsys)
    assert code == 0
    assert json.loads(out) == {"alpha": "0", "beta": "1", "range_closed": True}


def test_classify(files, capsys):
    code, out, _ = run(["classify", "--op", files["bare_op"], "--lambda", "0"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["spectra"]["sigma_e"] is True and doc["data"]["range_closed"] is False


def test_legacy_diff(files, capsys):
    code, out, _ = run(["legacy-diff", "--tuple", files["harmonic_pair"], "--grid", "-1..1:0.5"], capsys)
    rows = json.loads(out)["rows"]
    assert code == 0 and [(r["re"], r["im"], r["flag"]) for r in rows] == [("0", "0", "corrected-only")]


def test_scan_invertible(files, capsys):
    code, out, _ = run(["scan", "--tuple", files["ident"], "--grid", "-2..2:1", "--target", "E_sep"], capsys)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 26
    header = lines[0].split(",")
    lower = header.index("lower")
    flagged = [l.split(",")[:2] for l in lines[1:] if l.split(",")[lower] == "1"]
    assert flagged == [["1", "0"]]


def test_theorem_check_all(files, capsys):
    code, out, _ = run(["theorem-check", "--tuple", files["spread_backward"], "--lambda", "0"], capsys)
    verdicts = json.loads(out)["verdicts"]
    assert code == 0 and len(verdicts) == 15


def test_complete_verify_round_trip(files, capsys):
    model = str(files["dir"] / "model.json")
    code, _, _ = run(["complete", "--tuple", files["fwd_spread_bwd"], "--lambda", "0", "--target", "left-weyl",
                      "--out", model], capsys)
    assert code == 0
    doc = json.loads(open(model).read())
    assert doc["schema"] == "fredblock/1" and doc["prediction"]["strategy"] == "RowInterleave(2)"
    code, out, _ = run(["verify", "--model", model], capsys)
    res = json.loads(out)
    assert code == 0 and res["certificate"]["agrees"] and len(res["reports"]) == 4


def test_precondition_exit(files, capsys):
    code, _, err = run(["complete", "--tuple", files["harmonic_pair"], "--lambda", "0", "--target", "left-weyl"],
                       capsys)
    assert code == 2 and "(iii)(b) failed: R(D_n) is closed" in err


def test_resource_cap_exit(files, capsys):
    code, _, err = run(["scan", "--tuple", files["ident"], "--grid", "-2..2:0.001"], capsys)
    assert code == 3 and "cap" in err


@pytest.mark.parametrize("args", [
    ["fred-data", "--op", "missing.json", "--lambda", "0"],
    ["fred-data", "--op", "BAD", "--lambda", "0"],
    ["fred-data", "--op", "SHIFT", "--lambda", "x/y"],
    ["scan", "--tuple", "IDENT", "--grid", "1..0:1"],
    ["theorem-check", "--tuple", "IDENT", "--lambda", "0", "--theorem", "Nope"],
    ["verify", "--model", "IDENT", "--schedule", "8,4,2"],
])
def test_input_errors_exit_1(files, capsys, args):
    subst = {"BAD": files["bad"], "SHIFT": files["shift"], "IDENT": files["ident"]}
    code, _, err = run([subst.get(a, a) for a in args], capsys)
    assert code == 1 and err.startswith("error:")


@pytest.mark.parametrize("args", [["nonsense"], ["complete", "--tuple", "x.json", "--target", "sideways"], []])
def test_flag_errors_exit_1(args):
    with pytest.raises(SystemExit) as exc:
        main(args)
    assert exc.value.code == 1


def test_deterministic_bytes(files, capsys):
    args = ["scan", "--tuple", files["diag_mix"], "--grid", "-1..1:0.25", "--target", "AW_gen", "--format", "json"]
    _, first, _ = run(args, capsys)
    _, second, _ = run(args, capsys)
    assert first == second


def test_console_script(files):
    proc = subprocess.run([sys.executable, "-m", "fredblock.cli", "fred-data", "--op", files["shift"],
                           "--lambda", "0"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["beta"] == "1"

import json
import subprocess
import sys
from pathlib import Path

import pytest

from invcohom.cli import main, run
from invcohom.config import (ConfigError, build_tube, bundled_names, liouville_depth, load,
                             load_document, validate)

from make_goldens import GOLDEN, HASHED, command_for

SMALL = [n for n in bundled_names() if n not in HASHED]


def run_main(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, doc, name="doc.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


# goldens

@pytest.mark.parametrize("name", SMALL)
def test_json_report_matches_golden(name):
    text, code = run([command_for(name), name, "--json"])
    assert text == (GOLDEN / f"{name}.json").read_text()
    assert code == int((GOLDEN / f"{name}.exit").read_text())


@pytest.mark.parametrize("name", SMALL)
def test_text_report_matches_golden(name):
    text, _ = run([command_for(name), name])
    assert text == (GOLDEN / f"{name}.txt").read_text()


# documented examples

def test_su2_check():
    report = json.loads(run(["check", "su2", "--json"])[0])
    (sub,) = report["subalgebras"]
    assert sub["cohomology"] == [1, 0, 0, 1]
    assert sub["lemmas"] == {"sublaplacian_commutes": True, "bilinear_identity": True}
    assert sub["cartan"]["nonzero_residuals"] == 0
    assert report["verdict"] == "pass"


def test_abelian_check():
    report, code = run(["check", "abelian2", "--json"])
    assert code == 0
    assert json.loads(report)["subalgebras"][0]["cohomology"] == [1, 2, 1]


def test_tampered_check_exit_one(capsys):
    code, out, _ = run_main(["check", "su2_tampered", "--json"], capsys)
    assert code == 1
    assert json.loads(out)["jacobi"]["violating_triple"] == [1, 2, 3]


def test_affine_lemmas_skipped():
    report = json.loads(run(["check", "affine_line", "--json"])[0])
    assert report["ad_invariant"] is False
    assert report["subalgebras"][0]["lemmas"] == {"skipped": "metric not ad-invariant"}


def test_torus_verdicts():
    r = json.loads(run(["torus", "rational_line", "--json"])[0])
    assert r["verdict"] == "closed-range certificate (rational slope)"
    assert r["kernel_modes"] == [[-2, 4], [-1, 2], [0, 0], [1, -2], [2, -4]]
    r = json.loads(run(["torus", "identity2", "--json"])[0])
    assert r["verdict"] == "globally hypoelliptic pattern at truncation: kernel = constants"
    assert [row["dim"] for row in r["cohomology"]] == [1, 2, 1]
    r = json.loads(run(["torus", "liouville_line", "--json"])[0])
    assert r["verdict"] == "small-divisor witnesses at truncation (Liouville-type slope)"
    assert r["profile"]["witnesses"]


def test_torus_radius_override():
    r = json.loads(run(["torus", "rational_line", "--json", "--radius", "2", "--nu", "1"])[0])
    assert r["inputs"]["radius"] == 2 and r["inputs"]["profile_radius"] == 2
    assert r["kernel_modes"] == [[-1, 2], [0, 0], [1, -2]]


def test_tube_reports():
    r = json.loads(run(["tube", "tube_half", "--json"])[0])
    assert r["gamma"] == {"generators": [[2]], "rank": 1}
    assert all(row["agree"] for row in r["dichotomy"])
    assert r["verdict"] == "pass"
    r = json.loads(run(["tube", "tube_integer", "--json"])[0])
    # integral constants: every fiber mode is in the lattice
    assert r["gamma"] == {"generators": [[1]], "rank": r["inputs"]["m"]}


def test_non_closed_tube_exit_one(capsys):
    code, out, _ = run_main(["tube", "tube_not_closed", "--json"], capsys)
    assert code == 1
    err = json.loads(out)["error"]
    assert err["eta"] == [-1, -2]
    assert err["residual"] == [{"index": [1, 2], "value": {"re": "1", "im": "0"}}]


def test_timing_flag_only_adds_field():
    plain = json.loads(run(["check", "abelian1", "--json"])[0])
    timed = json.loads(run(["check", "abelian1", "--json", "--timing"])[0])
    assert "timing_seconds" in timed
    del timed["timing_seconds"]
    assert timed == plain


def test_jobs_do_not_change_reports():
    for name in ("rational_line", "liouville_line", "tube_sparse"):
        cmd = command_for(name)
        assert run([cmd, name, "--json"]) == run([cmd, name, "--json", "--jobs", "4"])


# input errors: exit 2, nothing on stdout

@pytest.mark.parametrize("doc", [
    {"kind": "algebra"},
    {"kind": "algebra", "dim": 2, "brackets": [[1, 2, 2, 1]]},
    {"kind": "algebra", "dim": 2, "brackets": [[1, 2, 2, "0.5"]]},
    {"kind": "algebra", "dim": 2, "metric": [["1", "2"], ["2", "1"]]},
    {"kind": "algebra", "dim": 4, "brackets": [[1, 2, 3, "1"], [2, 3, 1, "1"], [3, 1, 2, "1"]],
     "subalgebras": [{"name": "bad", "basis": [["1", "0", "0", "0"], ["0", "1", "0", "0"]]}]},
    {"kind": "algebra", "dim": 2, "extra": 1},
])
def test_bad_algebra_documents(tmp_path, capsys, doc):
    code, out, err = run_main(["check", write(tmp_path, doc)], capsys)
    assert code == 2 and out == "" and "input error" in err


@pytest.mark.parametrize("doc", [
    {"kind": "torus", "A": [["1", "1/0"]]},
    {"kind": "torus", "A": [["1", "2"], ["2", "4"]]},
    {"kind": "torus", "A": [["1", {"liouville": 12}]]},
    {"kind": "torus", "A": [["1", "1/2"]], "chain": {"q": 1, "count": 2}},
])
def test_bad_torus_documents(tmp_path, capsys, doc):
    code, out, _ = run_main(["torus", write(tmp_path, doc)], capsys)
    assert code == 2 and out == ""


@pytest.mark.parametrize("doc", [
    {"kind": "tube", "base": "sphere", "d": 1, "forms": [{"constant": ["1"]}]},
    {"kind": "tube", "base": "torus", "d": 1,
     "forms": [{"constant": ["0"], "modes": [{"eta": [1], "coeff": ["1"]}]}]},
    {"kind": "tube", "base": "torus", "d": 2, "forms": [{"constant": ["0"]}]},
])
def test_bad_tube_documents(tmp_path, capsys, doc):
    code, out, _ = run_main(["tube", write(tmp_path, doc)], capsys)
    assert code == 2 and out == ""


def test_wrong_kind_missing_file_and_bad_json(tmp_path, capsys):
    assert run_main(["torus", "su2"], capsys)[0] == 2
    assert run_main(["check", str(tmp_path / "missing.json")], capsys)[0] == 2
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert run_main(["check", str(p)], capsys)[0] == 2
    assert run_main(["torus", "rational_line", "--radius", "-1"], capsys)[0] == 2
    assert run_main(["check", "su2", "--jobs", "0"], capsys)[0] == 2


def test_user_file_roundtrip(tmp_path, capsys):
    doc = {"kind": "tube", "base": "torus", "d": 1,
           "forms": [{"constant": ["1/3"], "modes": [{"eta": [2], "coeff": [{"re": "1", "im": "1"}]},
                                                    {"eta": [-2], "coeff": [{"re": "1", "im": "-1"}]}]}],
           "radius": 3}
    code, out, _ = run_main(["tube", write(tmp_path, doc), "--json"], capsys)
    report = json.loads(out)
    assert code == 0
    assert report["gamma"]["generators"] == [[3]]
    assert report["normalization"][0]["psi"] == [
        {"eta": [-2], "value": {"re": "1/2", "im": "1/2"}},
        {"eta": [2], "value": {"re": "1/2", "im": "-1/2"}}]


# config helpers

def test_bundled_names_and_loading():
    names = bundled_names()
    assert {"su2", "rational_line", "tube_half", "liouville_pair"} <= set(names)
    for name in names:
        validate(load_document(name))
    assert liouville_depth(load("liouville_line")) == 3
    assert liouville_depth(load("rational_line")) is None


def test_validate_errors():
    with pytest.raises(ConfigError):
        validate([1, 2])
    with pytest.raises(ConfigError):
        validate({"kind": "mystery"})
    with pytest.raises(ConfigError, match="expected kind"):
        validate(load_document("su2"), "torus")


def test_duplicate_modes_rejected():
    doc = {"kind": "tube", "base": "torus", "d": 1,
           "forms": [{"constant": ["0"], "modes": [{"eta": [1], "coeff": ["1"]},
                                                   {"eta": [1], "coeff": ["1"]}]}]}
    with pytest.raises(ConfigError, match="twice"):
        build_tube(validate(doc))


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "invcohom.cli", "check", "su2_tampered"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "violating_triple" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "invcohom.cli", "tube", "nope.json"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stdout == ""

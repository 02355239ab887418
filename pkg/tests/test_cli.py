import json
import subprocess
import sys

import pytest

from ahsslab.cli import run
from ahsslab.data import data_path


def _json(argv):
    code, out, err = run(argv)
    assert code == 0, err
    return json.loads(out)


def test_cohomology_torus():
    rep = _json(["cohomology", data_path("torus")])
    assert rep["cohomology"] == {
        "0": {"rank": 1, "torsion": []},
        "1": {"rank": 2, "torsion": []},
        "2": {"rank": 1, "torsion": []},
    }


def test_cohomology_degree_and_coefficients():
    rep = _json(["cohomology", data_path("rp2"), "--coefficients", "Z/2", "--degree", "1"])
    assert rep["cohomology"] == {"1": {"rank": 0, "torsion": [2]}}


def test_ahss_ktheory_rp4():
    rep = _json(["ahss", data_path("rp4"), "--theory", "ktheory"])
    assert rep["unverified_cells"] == 0
    assert rep["honesty_flags"] == []
    assert rep["graded"]["0"] == [
        {"p": 0, "rank": 1, "torsion": []},
        {"p": 2, "rank": 0, "torsion": [2]},
        {"p": 4, "rank": 0, "torsion": [2]},
    ]
    assert all(e["cochain_zero"] for evs in rep["d3_evaluations"].values() for e in evs)


def test_ahss_ordinary_matches_cohomology():
    a = _json(["ahss", data_path("klein"), "--theory", "ordinary:Z"])
    c = _json(["cohomology", data_path("klein")])
    for n, entry in c["cohomology"].items():
        assert a["graded"][n] == [{"p": int(n), **entry}]
    assert a["notes"]


def test_verify_gysin():
    rep = _json(["verify-gysin", data_path("torus_meridian")])
    assert rep["verdict"] == "EQUAL"
    assert rep["pairings"]["pd"] == [0, 1]
    rep = _json(["verify-gysin", data_path("klein_circle"), "--theory", "ordinary:Z/2"])
    assert rep["verdict"] == "EQUAL"
    rep = _json(["verify-gysin", data_path("torus_meridian"), "--eta", "0"])
    assert rep["verdict"] == "TRIVIAL"


def test_text_format_either_position():
    code1, out1, _ = run(["--format", "text", "cohomology", data_path("s2")])
    code2, out2, _ = run(["cohomology", data_path("s2"), "--format", "text"])
    assert code1 == code2 == 0
    assert out1 == out2
    assert not out1.lstrip().startswith("{")


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert run(["cohomology", str(bad)])[0] == 2
    assert run(["cohomology", str(tmp_path / "missing.json")])[0] == 2
    assert run(["cohomology", data_path("s2"), "--coefficients", "Q"])[0] == 2
    rep = tmp_path / "rep.json"
    rep.write_text(json.dumps({"simplices": [["a", "a", "b"]]}))
    assert run(["cohomology", str(rep)])[0] == 3
    # no subcomplex to dualise
    assert run(["verify-gysin", data_path("torus")])[0] == 4
    # Z-orientation missing
    assert run(["verify-gysin", data_path("klein_circle"), "--theory", "ordinary:Z"])[0] == 4
    assert run(["ahss", data_path("s2"), "--theory", "Z"])[0] == 2
    nm = tmp_path / "wedge.json"
    nm.write_text(json.dumps({"simplices": [["a", "b", "c"], ["a", "d", "e"]], "subcomplex": {"simplices": [["a"]]}}))
    assert run(["verify-gysin", str(nm)])[0] == 3


def test_empty_complex(tmp_path):
    f = tmp_path / "empty.json"
    f.write_text(json.dumps({"simplices": []}))
    rep = _json(["cohomology", str(f)])
    assert rep["cohomology"] == {"0": {"rank": 0, "torsion": []}}


@pytest.mark.parametrize("argv", [
    ["cohomology", "rp2"],
    ["ahss", "rp2", "--theory", "ktheory"],
    ["verify-gysin", "torus_meridian"],
])
def test_deterministic_output(argv):
    argv = [argv[0], data_path(argv[1]), *argv[2:]]
    outs = [
        subprocess.run([sys.executable, "-m", "ahsslab.cli", *argv], capture_output=True, check=True).stdout
        for _ in range(2)
    ]
    assert outs[0] == outs[1]
    assert outs[0].endswith(b"\n")

import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

import oracles
from knotspec.cli import main
from knotspec.curves import load_curve, save_curve, torus_knot
from knotspec.spectrum import Spectrum

DOCS = Path(__file__).resolve().parent.parent / "docs"


def schema(name):
    return json.loads((DOCS / f"{name}.schema.json").read_text())


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("curves")
    (d / "seg.txt").write_text("open\n0 0 0\n1 0.2 0.1\n")
    save_curve(torus_knot(2, 3, 32), d / "trefoil32.txt")
    return d


def test_spectrum_open_segment(capsys, files, tmp_path):
    csv = tmp_path / "s.csv"
    code, out, _ = run(capsys, "spectrum-open", "--curve", files / "seg.txt", "--dirs", 100, "--seed", 7, "--csv", csv)
    assert code == 0
    obj = json.loads(out)
    jsonschema.validate(obj, schema("spectrum"))
    (e,) = obj["entries"]
    assert e["jones"] == "1*A^0" and e["p"] == 1.0 and e["knot_type"]
    assert csv.read_text().splitlines()[0].startswith("key,")
    assert obj["provenance"]["config"]["seed"] == 7 and obj["provenance"]["config"]["directions"] == 100


def test_spectrum_knot_trefoil(capsys, files, tmp_path):
    out_file = tmp_path / "k.json"
    code, _, err = run(capsys, "spectrum-knot", "--curve", files / "trefoil32.txt", "--h-frac", 0.05, "--bases", "all",
                       "--seed", 7, "--samples", 2, "--dirs", 100, "--out", out_file)
    assert code == 0
    text = out_file.read_text()
    obj = json.loads(text)
    jsonschema.validate(obj, schema("spectrum"))
    assert obj["knot_type_class"] is not None
    assert all(rec["knot_type_class"] == obj["knot_type_class"] for rec in obj["per_base"].values())
    s = Spectrum.loads(text)
    assert s.pkspec().entries
    assert s.dumps() == text  # round trip is byte-identical
    assert "output" not in obj["provenance"]["config"]


def test_compare_identical(capsys, files, tmp_path):
    a = tmp_path / "a.json"
    run(capsys, "spectrum-open", "--curve", "torus_knot:p=2,q=3,n=32", "--open-at", 0, "--dirs", 200, "--out", a)
    code, out, _ = run(capsys, "compare", a, a)
    obj = json.loads(out)
    jsonschema.validate(obj, schema("comparison"))
    assert code == 0 and obj["only_a"] == [] and obj["only_b"] == [] and obj["verdict"] == "not distinguished"


def test_compare_unknot_and_trefoil(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "spectrum-open", "--curve", "planar_ngon:n=16", "--open-at", 0, "--dirs", 200, "--out", a)
    run(capsys, "spectrum-open", "--curve", "torus_knot:p=2,q=3,n=32", "--open-at", 0, "--dirs", 200, "--out", b)
    code, out, _ = run(capsys, "compare", a, b, "--view", "pkspec")
    obj = json.loads(out)
    assert code == 0 and obj["verdict"] == "distinguished" and obj["only_b"]


def test_jones_and_closure_commands(capsys):
    code, out, _ = run(capsys, "jones", "--code", oracles.TREFOIL_CODE)
    obj = json.loads(out)
    assert code == 0 and obj["jones"] == "1*A^-4 + 1*A^-12 + -1*A^-16" and obj["writhe"] == 3
    assert obj["jones_t"] == {"1": 1, "3": 1, "4": -1}
    code, out, _ = run(capsys, "jones", "--curve", "torus_knot:p=2,q=3,n=32")
    assert json.loads(out)["jones"] == obj["jones"]
    code, out, _ = run(capsys, "closure", "--code", "o:U1+O2+O1+U2+", "--kind", "over")
    obj = json.loads(out)
    assert obj["closure"] == "c:O1+U2+O3+U1+O2+U3+" and obj["arc_crossings"] == 1
    code, out, _ = run(capsys, "closure", "--code", "o:U1+O2+O1+U2+", "--kind", "virtual")
    assert json.loads(out)["arc_crossings"] == 1


def test_height_command(capsys):
    code, out, _ = run(capsys, "height", "--code", "o:O1+O2-U1+U2-")
    obj = json.loads(out)
    assert code == 0 and obj["simplified"] == "o:" and obj["height_bound"] == 0 and obj["knot_type"]
    code, out, _ = run(capsys, "height", "--code", "o:U1+O2+O1+U2+")
    assert json.loads(out)["height_bound"] == 1


def test_quadrisecants_command(capsys):
    code, out, _ = run(capsys, "quadrisecants", "--curve", "torus_knot:p=2,q=3,n=32", "--genericity")
    obj = json.loads(out)
    jsonschema.validate(obj, schema("quadrisecants"))
    assert code == 0 and obj["summary"]["total"] == 3 and obj["summary"]["alternating"] == 3


def test_fmeasure_and_fgradient_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "fmeasure", "--curve", "planar_ngon:n=16", "--open-at", 0, "--dirs", 200, "--at", "1.5")
    obj = json.loads(out)
    assert code == 0 and obj["mean"] == {"0": "1"}
    vec = tmp_path / "v.txt"
    v = np.zeros((16, 3))
    v[:, 0] = 1
    np.savetxt(vec, v)
    code, out, _ = run(capsys, "fgradient", "--curve", "planar_ngon:n=16", "--vector", vec, "--dirs", 200)
    obj = json.loads(out)
    assert code == 0 and all(c == "0" for c in obj["derivative"].values())


def test_neighborhood_sample_and_gen_curve(capsys, tmp_path):
    code, out, _ = run(capsys, "neighborhood-sample", "--curve", "torus_knot:p=2,q=3,n=32", "--n", 3,
                       "--out-dir", tmp_path / "nb", "--seed", 2)
    obj = json.loads(out)
    assert code == 0 and len(obj["files"]) == 3
    for name in obj["files"]:
        c = load_curve(tmp_path / "nb" / name)
        assert not c.closed and c.n_vertices == 32
    out_file = tmp_path / "t.txt"
    code, _, _ = run(capsys, "gen-curve", "torus_knot:p=2,q=3,n=32", "--open-at", 4, "--out", out_file)
    assert code == 0 and load_curve(out_file).n_vertices == 32
    code, out, _ = run(capsys, "gen-curve", "3_1")
    assert code == 0 and out.splitlines()[1] == "closed"


@pytest.mark.parametrize("argv, status, err_code", [
    (["spectrum-open", "--curve", "nope.txt"], 1, "input_error"),
    (["spectrum-open", "--curve", "torus_knot:p=2,q=3,n=32"], 1, "input_error"),
    (["frobnicate"], 1, "input_error"),
    (["height", "--code", "o:O1+"], 1, "structural_error"),
    (["jones", "--code", "c:O1+U2+O3+U1+O2+U3+", "--cap", "2"], 2, "cap_exceeded"),
    (["spectrum-open", "--curve", "torus_knot:p=2,q=3,n=32", "--open-at", "5", "--seed", "7", "--strict"],
     3, "invariant_violation"),
])
def test_error_envelope_and_exit_status(capsys, argv, status, err_code):
    code, out, err = run(capsys, *argv)
    assert code == status and out == ""
    env = json.loads(err.strip().splitlines()[-1])
    assert env["error"]["code"] == err_code and env["error"]["message"]


def test_worker_flag_does_not_change_bytes(capsys, tmp_path):
    outs = []
    for w in (1, 2):
        f = tmp_path / f"w{w}.json"
        run(capsys, "spectrum-knot", "--curve", "torus_knot:p=2,q=3,n=32", "--bases", "0,1", "--samples", 2,
            "--dirs", 100, "--workers", w, "--out", f)
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]


def test_installed_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "knotspec.cli", "jones", "--code", "o:O1+U1+"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["jones"] == "1*A^0"

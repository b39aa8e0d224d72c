import json

import pytest

from ptquartic.cli import EXIT_OK, EXIT_SOLVER, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_n_max(capsys):
    code, out, _ = run(capsys, "spectrum", "--b", "0", "--J", "0", "--n-max", "4")
    assert code == EXIT_OK
    vals = [e["lambda"] for e in json.loads(out)["eigenvalues"]]
    assert len(vals) == 4 and all(v["im"] == 0 for v in vals)
    re = [v["re"] for v in vals]
    assert re == sorted(re)


def test_spectrum_box(capsys):
    code, out, _ = run(capsys, "spectrum", "--b", "1", "--J", "1", "--box", "-2,0,-1,1")
    assert code == EXIT_OK
    vals = [e["lambda"]["re"] for e in json.loads(out)["eigenvalues"]]
    assert vals == pytest.approx([-1.0], abs=1e-9)


@pytest.mark.parametrize("argv", [
    ["spectrum", "--b", "abc"],
    ["spectrum", "--b", "0", "--J", "nan"],
    ["spectrum", "--b", "0", "--J", "0", "--box", "1,2,3"],
    ["spectrum", "--b", "0", "--J", "0", "--box", "0,-1,0,1"],
    ["qes", "--J", "0"],
    ["qes", "--J", "1.5"],
    ["nevanlinna", "--b", "0", "--J", "0", "--lambda-index", "x1"],
    ["nevanlinna", "--b", "0", "--J", "0.5", "--lambda-index", "qes0"],
    ["charts", "--J", "1", "--m-max", "-1"],
    ["verify-all", "--only", "11"],
    ["bogus"],
    [],
])
def test_invalid_flags_exit_3(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_USAGE and out == "" and err


def test_bad_config_exit_3(capsys, tmp_path):
    f = tmp_path / "c.json"
    f.write_text('{"workers": 0}')
    code, _, err = run(capsys, "charts", "--J", "1", "--m-max", "1", "--config", str(f))
    assert code == EXIT_USAGE and "workers" in err


def test_qes_terms(capsys):
    code, out, _ = run(capsys, "qes", "--J", "1")
    data = json.loads(out)
    assert code == 0 and data["J"] == 1
    assert sorted((t["db"], t["dl"], t["coeff"]) for t in data["terms"]) == [(0, 1, "1"), (2, 0, "1")]


def test_qes_roots(capsys):
    code, out, _ = run(capsys, "qes", "--J", "2", "--b", "1")
    roots = [r["re"] for r in json.loads(out)["roots"]]
    assert code == 0 and roots == [1.0, -3.0]


def test_darboux_pass(capsys):
    code, out, _ = run(capsys, "darboux", "--J", "1", "--b", "1")
    data = json.loads(out)
    assert code == 0 and data["status"] == "PASS" and data["max_discrepancy"] < 1e-6


def test_darboux_collision_is_a_solver_error(capsys):
    code, out, err = run(capsys, "darboux", "--J", "2", "--b", "0")
    assert code == EXIT_SOLVER and out == "" and "collide" in err


def test_nevanlinna_level(capsys):
    code, out, _ = run(capsys, "nevanlinna", "--b", "0", "--J", "0", "--lambda-index", "0")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "integer_real_c" and 0 < data["A"] < 1


def test_nevanlinna_qes_index(capsys):
    code, out, _ = run(capsys, "nevanlinna", "--b", "1", "--J", "1", "--lambda-index", "qes0")
    assert code == 0 and json.loads(out)["verdict"] == "qes"


def test_nevanlinna_non_integer(capsys):
    code, out, _ = run(capsys, "nevanlinna", "--b", "0", "--J", "0.5", "--lambda-index", "0")
    assert code == 0 and json.loads(out)["verdict"] == "non_integer"


def test_charts_output_is_deterministic(capsys):
    _, a, _ = run(capsys, "charts", "--J", "1", "--m-max", "1")
    _, b, _ = run(capsys, "charts", "--J", "1", "--m-max", "1")
    assert a == b
    assert [c["symbol"] for c in json.loads(a)["charts"]] == [
        "L_{0,1}", "L_{1,1}", "R_{0,1}", "R_{1,1}"]


def test_trace_writes_csv_and_events(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("PTQUARTIC_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "trace", "--J", "0", "--b-range", "-2,2", "--branches", "3")
    data = json.loads(out)
    assert code == 0 and len(data["curves"]) == 3 and data["events"] == 0
    assert all(c["graph"] for c in data["curves"])
    first = (tmp_path / data["curves"][0]["file"]).read_text().splitlines()
    assert first[0] == "# J=0 branch=0" and first[1].startswith("-2,")
    ev = json.loads((tmp_path / data["events_file"]).read_text())
    assert ev["events"] == []


def test_verify_all_subset(capsys):
    code, out, err = run(capsys, "verify-all", "--only", "9")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert data["criteria"][0]["status"] == "PASS" and "[PASS]" in err


def test_module_entry_point():
    import subprocess
    import sys
    p = subprocess.run([sys.executable, "-m", "ptquartic", "qes", "--J", "2", "--b", "1"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["roots"][1]["re"] == -3.0

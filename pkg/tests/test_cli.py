import json
import subprocess
import sys

import pytest

from diracext.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


def test_classify_coulomb(capsys):
    code, rep, _ = run_json(capsys, "classify", "--nu", "0.95", "--mu", "0", "--lambda", "0")
    assert code == 0
    assert rep["schema"] == 1
    assert rep["d"] == 4
    triples = [(e["twice_j"], e["twice_mj"], e["k"]) for e in rep["index_set"]["entries"]]
    assert triples == [(1, -1, 1), (1, 1, 1), (1, -1, -1), (1, 1, -1)]


def test_classify_free_has_note(capsys):
    code, rep, _ = run_json(capsys, "classify")
    assert code == 0
    assert rep["d"] == 0
    assert rep["note"] == "essentially self-adjoint"


def test_classify_anomalous_coupling(capsys):
    _, rep, _ = run_json(capsys, "classify", "--lambda", "0.9")
    assert rep["d"] == 2
    ch = {c["k"]: c for c in rep["channels"]}
    assert ch[-1]["regime"] == "subcritical"
    assert ch[-1]["delta"] == pytest.approx(0.01, abs=1e-15)


def test_classify_csv(capsys):
    code, out, _ = run(capsys, "classify", "--nu", "0.95", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "k,delta,gamma,regime"


def test_distinguished_coulomb(capsys):
    code, rep, _ = run_json(capsys, "distinguished", "--nu", "-0.95")
    assert code == 0
    rel = rep["relation"]
    assert rel["d"] == 4
    k1 = [i for i, e in enumerate(rel["channels"]["entries"]) if e["k"] == 1]
    for i in k1:
        a, b = rel["A"][i][i][0], rel["B"][i][i][0]
        assert a / b == pytest.approx(1.381316, rel=1e-6)
    assert len(rep["unitary"]["U"]) == 4


@pytest.mark.parametrize(
    "argv, code, name",
    [
        (("distinguished", "--lambda", "1"), 4, "CriticalAnomalous"),
        (("distinguished", "--nu", "0.3"), 6, "NoDeficiency"),
        (("distinguished", "--nu", "1.5"), 3, "SupNormExceeded"),
        (("verify-inequalities", "--trials", "100", "--seed", "0", "--nu", "1.5"), 3, "SupNormExceeded"),
        (("spectrum", "--nu", "-0.5", "--k", "-1", "--window", "0,2"), 14, "EnergyOutsideGap"),
        (("spectrum", "--nu", "-0.95", "--k", "1"), 2, "InvalidParameters"),
        (("spectrum", "--nu", "-0.5", "--k", "-1", "--theta", "0"), 7, "EssentiallySelfAdjointChannel"),
        (("spectrum", "--nu", "-0.95", "--k", "1", "--relation", "0,0"), 8, "DegenerateRelation"),
    ],
)
def test_error_exit_codes(capsys, argv, code, name):
    got, out, err = run(capsys, *argv)
    assert got == code
    assert out == ""
    lines = err.strip().splitlines()
    assert len(lines) == 1
    payload = json.loads(lines[0])
    assert payload["error"] == name
    assert payload["exit_code"] == code


def test_bad_flag_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--k", "0"])
    assert exc.value.code == 2


def test_spectrum_hydrogen(capsys):
    code, rep, _ = run_json(capsys, "spectrum", "--nu", "-0.5", "--k", "-1", "--mass", "1", "--window", "0,1", "--max-count", "2")
    assert code == 0
    ev = rep["result"]["eigenvalues"]
    assert ev[0] == pytest.approx(0.75**0.5, rel=1e-6)
    assert ev[1] == pytest.approx(0.965926, rel=1e-6)


def test_spectrum_theta_dependence(capsys):
    _, a, _ = run_json(capsys, "spectrum", "--nu", "-0.95", "--k", "1", "--theta", "0", "--max-count", "1")
    _, b, _ = run_json(capsys, "spectrum", "--nu", "-0.95", "--k", "1", "--theta", "1.0", "--max-count", "1")
    assert abs(a["result"]["eigenvalues"][0] - b["result"]["eigenvalues"][0]) > 1e-3


def test_spectrum_empty_window(capsys):
    code, rep, _ = run_json(capsys, "spectrum", "--nu", "-0.5", "--k", "-1", "--window=-0.9,0.5")
    assert code == 0
    assert rep["result"]["eigenvalues"] == []


def test_spectrum_csv_and_out_file(capsys, tmp_path):
    path = tmp_path / "levels.csv"
    code, out, _ = run(capsys, "spectrum", "--nu", "-0.5", "--k", "-1", "--max-count", "1", "--format", "csv", "--out", str(path))
    assert code == 0 and out == ""
    lines = path.read_text().splitlines()
    assert lines[0] == "index,energy,error,match_defect,relation_residual"
    assert float(lines[1].split(",")[1]) == pytest.approx(0.75**0.5, rel=1e-9)


def test_verify_inequalities_on_sphere(capsys):
    code, rep, _ = run_json(capsys, "verify-inequalities", "--trials", "100", "--seed", "0", "--nu", "1", "--summary")
    assert code == 0
    assert rep["report"]["violations"] == 0
    assert rep["report"]["sharpness"]["strictly_decreasing"]


def test_verify_inequalities_single_draw(capsys):
    code, rep, _ = run_json(capsys, "verify-inequalities", "--trials", "1", "--seed", "7")
    assert code == 0
    assert {d["draw"] for d in rep["report"]["draws"]} == {0}


def test_pretty_output(capsys):
    code, out, _ = run(capsys, "distinguished", "--nu", "-0.95", "--format", "pretty")
    assert code == 0
    assert out.startswith("distinguished: nu=-0.95")


def test_repeated_runs_are_byte_identical():
    argv = [sys.executable, "-m", "diracext", "verify-inequalities", "--trials", "5", "--seed", "3", "--nu", "0.5"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second
    assert json.loads(first)["schema"] == 1

import json
import subprocess
import sys

import pytest

from newton_osc.cli import main

XYZ = {"dim": 3, "terms": [{"alpha": [1, 1, 1], "coeff": 1}]}
DEG = {"dim": 3, "terms": [{"alpha": [2, 1, 1], "coeff": 1}, {"alpha": [1, 2, 1], "coeff": 1}]}


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, data in {"xyz": XYZ, "deg": DEG}.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(data))
        out[name] = str(p)
    out["dir"] = tmp_path
    return out


def run(argv, tmp_path, name="report.json"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_analyze_critical(files):
    code, rep = run(["analyze", "--phase", files["xyz"], "--exponents", "8/3,8/3,8/3"], files["dir"])
    assert code == 0
    est = rep["estimate"]
    assert (est["regime"], est["rate"], est["log_power"]) == ("critical", "1/4", 3)
    assert rep["inputs"]["exponents"] == "8/3,8/3,8/3"
    assert rep["nondegeneracy"]["status"] == "nondegenerate (numeric)"


def test_analyze_degenerate(files):
    code, rep = run(["analyze", "--phase", files["deg"], "--exponents", "inf,inf,inf"], files["dir"])
    assert code == 2
    assert abs(rep["nondegeneracy"]["witness"]["D_d S_F"]) < 1e-9


def test_analyze_invalid_exponents(files):
    code, rep = run(["analyze", "--phase", files["xyz"], "--exponents", "2,2,2"], files["dir"])
    assert code == 3
    assert rep["diagnostics"]["message"] == "neither hypothesis"


@pytest.mark.parametrize(
    "payload,needle",
    [
        ({"dim": 3}, "terms"),
        ({"dim": 3, "terms": [{"alpha": [1, 1], "coeff": 1}]}, "terms[0].alpha"),
        ("not json", "JSON"),
    ],
)
def test_malformed_phase(files, payload, needle, capsys):
    p = files["dir"] / "bad.json"
    p.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    code = main(["analyze", "--phase", str(p), "--exponents", "inf,inf,inf"])
    assert code == 1
    assert needle in capsys.readouterr().err


def test_malformed_exponents(files, capsys):
    code = main(["analyze", "--phase", files["xyz"], "--exponents", "inf,x,inf"])
    assert code == 1
    assert "--exponents" in capsys.readouterr().err


def test_wrong_exponent_count(files, capsys):
    assert main(["analyze", "--phase", files["xyz"], "--exponents", "inf,inf"]) == 1


def test_decay_fit_sharpness(files):
    code, rep = run(
        ["decay-fit", "--phase", files["xyz"], "--exponents", "inf,inf,inf", "--mode", "sharpness"],
        files["dir"],
    )
    sec = rep["numeric"]["sharpness"]
    assert code == 0 and sec["status"] == "pass"
    assert sec["csv"].startswith("lambda,")
    assert all(r["converged"] for r in sec["records"])


def test_decay_fit_dyadic(files):
    code, rep = run(
        [
            "decay-fit", "--phase", files["xyz"], "--exponents", "inf,inf,inf",
            "--mode", "dyadic-sum",
        ],
        files["dir"],
    )
    sec = rep["numeric"]["dyadic-sum"]
    assert sec["regime"] == "below-critical"
    assert abs(sec["fit"]["rate"] - 0.25) <= 0.05
    assert code == 0


def test_decay_fit_fixed_f_small_range(files):
    code, rep = run(
        [
            "decay-fit", "--phase", files["xyz"], "--exponents", "inf,inf,inf",
            "--mode", "fixed-f", "--lambda-min", "4", "--lambda-max", "64",
        ],
        files["dir"],
    )
    sec = rep["numeric"]["fixed-f"]
    assert sec["fit"]["rate"] >= 0.25 - 0.05
    assert code == 0


def test_sublevel_and_rerun_byte_identical(files):
    out1 = files["dir"] / "a.json"
    out2 = files["dir"] / "b.json"
    code = main(
        ["sublevel", "--phase", files["xyz"], "--samples", "200000", "--seed", "9", "--out", str(out1)]
    )
    assert code == 0
    assert main(["rerun", str(out1), "--out", str(out2)]) == code
    assert out1.read_bytes() == out2.read_bytes()


def test_rerun_analyze_byte_identical(files):
    out1 = files["dir"] / "a.json"
    out2 = files["dir"] / "b.json"
    main(["analyze", "--phase", files["xyz"], "--exponents", "8/3,8/3,8/3", "--out", str(out1)])
    main(["rerun", str(out1), "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_rerun_without_inputs(files):
    p = files["dir"] / "junk.json"
    p.write_text("{}")
    assert main(["rerun", str(p)]) == 1


def test_sublevel_bad_range(files):
    assert main(["sublevel", "--phase", files["xyz"], "--eps-min", "0.5", "--eps-max", "0.1"]) == 1


def test_threads_env_gives_same_report(files, monkeypatch):
    argv = ["decay-fit", "--phase", files["xyz"], "--exponents", "inf,inf,inf", "--mode", "sharpness"]
    _, a = run(argv, files["dir"], "one.json")
    monkeypatch.setenv("NEWTON_OSC_THREADS", "4")
    _, b = run(argv, files["dir"], "four.json")
    assert a == b


def test_module_entry_point(files):
    res = subprocess.run(
        [sys.executable, "-m", "newton_osc", "analyze", "--phase", files["xyz"], "--exponents", "inf,inf,inf"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["estimate"]["regime"] == "below-critical"

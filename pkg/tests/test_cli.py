import json

import pytest

from heatsharp.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_constants_json(capsys):
    code, out, _ = call(capsys, "constants", "--p", "4/3", "--q", "4/3")
    assert code == 0
    d = json.loads(out)
    assert d["r"] == "2" and d["beta"] == 1
    assert d["K"] == pytest.approx(d["C"] * d["alpha_q"])


def test_constants_contraction_endpoint(capsys):
    d = json.loads(call(capsys, "constants", "--p", "2", "--q", "1")[1])
    assert d["K"] == 1 and d["decay"] == 0
    assert d["beta_limit_only"] is True


def test_constants_indeterminate_and_infinite_beta(capsys):
    assert json.loads(call(capsys, "constants", "--p", "1", "--q", "1")[1])["beta"] == "indeterminate"
    assert json.loads(call(capsys, "constants", "--p", "1", "--q", "inf")[1])["beta"] == "inf"


def test_output_is_byte_identical(capsys):
    argv = ("sharpness", "--p", "3/2", "--q", "3/2", "--spec", '{"kind": "indicator", "lo": 0, "hi": 1}')
    a = call(capsys, *argv)[1]
    b = call(capsys, *argv)[1]
    assert a == b


def test_verify_equality(capsys):
    code, out, _ = call(capsys, "verify-equality", "--p", "3/2", "--q", "2")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["x"] for r in rows] == [0.1, 1, 10]
    assert all(abs(r["value"] - 1) <= 1e-10 for r in rows)


def test_verify_equality_endpoint_reports_stand_in(capsys):
    code, _, err = call(capsys, "verify-equality", "--p", "1", "--q", "3")
    assert code == 0
    assert "stand-in" in err


def test_sharpness_csv(capsys):
    code, out, _ = call(capsys, "sharpness", "--p", "4/3", "--q", "4/3", "--format", "csv",
                        "--spec", '{"kind": "gaussian_power", "t": 1, "beta": 1}', "--matched")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "abscissa,value,bound"
    assert len(lines) == 4


def test_sharpness_spec_from_file(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text('{"kind": "gaussian", "a": 1.0, "mu": 0.0, "tau": 0.5}')
    code, out, _ = call(capsys, "sharpness", "--p", "2", "--q", "2", "--spec", str(spec))
    assert code == 0
    assert json.loads(out)["verdict"] == "pass"


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = call(capsys, "constants", "--p", "2", "--q", "2", "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["r"] == "inf"


def test_evolve_csv(capsys):
    code, out, _ = call(capsys, "evolve", "--spec", '{"kind": "indicator", "lo": -1, "hi": 1}',
                        "--t", "0.5", "--x-lo", "-15", "--x-hi", "15", "--n", "301")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,value" and len(lines) == 302


def test_decay_fit_default_family(capsys):
    code, out, _ = call(capsys, "decay-fit", "--p", "3/2", "--q", "2")
    assert code == 0
    assert json.loads(out)["params"]["slope"] == pytest.approx(-0.25, abs=1e-3)


def test_blowup(capsys):
    code, out, _ = call(capsys, "blowup", "--p", "4/3", "--q", "4/3", "--gamma", "0.025")
    assert code == 0
    d = json.loads(out)
    assert d["verdict"] == "informational"
    assert d["params"]["unbounded_as_t_to_0"]


def test_counterexample_modes(capsys):
    code, out, _ = call(capsys, "counterexample", "--p", "2", "--s", "3/2")
    assert code == 0
    assert json.loads(out)["params"]["fitted_exponent"] == pytest.approx(0.25, abs=0.05)
    code, out, _ = call(capsys, "counterexample", "--p", "2", "--mode", "lower-bound", "--x", "50,100,200")
    assert code == 0
    assert all(r["value"] >= 0.45 for r in json.loads(out)["rows"])


def test_initial_condition(capsys):
    code, out, _ = call(capsys, "initial-condition", "--p", "2",
                        "--spec", '{"kind": "gaussian", "a": 1.0, "tau": 1.0}')
    assert code == 0
    assert json.loads(out)["rows"][0]["value"] < 1e-2


def test_pde_residual(capsys):
    code, out, _ = call(capsys, "pde-residual", "--spec", '{"kind": "gaussian", "a": 1.0, "tau": 1.0}')
    assert code == 0
    assert json.loads(out)["residual"] <= 1e-4


def test_failed_verdict_exits_one(capsys):
    # an impossible tolerance turns the residual check red
    code, out, _ = call(capsys, "pde-residual", "--spec", '{"kind": "gaussian", "a": 1.0}', "--tolerance", "1e-30")
    assert code == 1
    assert json.loads(out)["verdict"] == "fail"


def test_data_error_exits_one(capsys):
    code, _, err = call(capsys, "constants", "--p", "3", "--q", "3")
    assert code == 1
    assert "no admissible r" in err
    code, _, err = call(capsys, "sharpness", "--p", "2", "--q", "2", "--spec", '{"kind": "blob"}')
    assert code == 1
    assert "blob" in err


@pytest.mark.parametrize("argv", [
    ["constants", "--p", "0.5", "--q", "2"],
    ["constants", "--p", "2"],
    ["blowup", "--p", "2", "--q", "2", "--gamma", "0.1", "--t-min", "2", "--t-max", "1"],
    ["counterexample", "--p", "2"],
    ["sharpness", "--p", "2", "--q", "2", "--spec", "{not json"],
    ["nonsense"],
])
def test_usage_errors_exit_two(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        run(argv)
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert "error" in err

# -*- coding: utf-8 -*-
import csv
import io
import json

import pytest


@pytest.mark.parametrize("argv, name", [
    (["volume", "--field", "real", "--n", "3", "--format", "json"], "volume_real_3.json"),
    (["volume", "--field", "quaternion", "--n", "2", "--format", "json"], "volume_quaternion_2.json"),
    (["expected-det", "--field", "complex", "--n", "2", "--alpha", "1", "--format", "json"],
     "expected_det_complex_2.json"),
])
def test_json_output_matches_golden(run_cli, golden, argv, name):
    code, out, err = run_cli(*argv)
    assert code == 0, err
    assert json.loads(out) == golden(name)


def test_volume_text(run_cli):
    code, out, _ = run_cli("volume", "--field", "real", "--n", "3")
    assert code == 0
    assert out == "pi^2/240 ≈ 0.04112335167\n"


def test_volume_text_rational_and_complex(run_cli):
    assert run_cli("volume", "--field", "real", "--n", "1")[1] == "1\n"
    code, out, _ = run_cli("volume", "--field", "complex", "--n", "2")
    assert code == 0
    assert out.startswith("pi/6 ≈ 0.5235987756")


def test_volume_csv(run_cli):
    code, out, _ = run_cli("volume", "--field", "complex", "--n", "2", "--format", "csv", "--digits", "4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows == [{"field": "complex", "n": "2", "coeff_num": "1", "coeff_den": "6", "pi_pow": "1",
                     "decimal": "0.5236"}]


@pytest.mark.parametrize("field, expected", [("real", "0.125 (1/8)"), ("complex", "0.1 (1/10)")])
def test_expected_det_text(run_cli, field, expected):
    code, out, _ = run_cli("expected-det", "--field", field, "--n", "2", "--alpha", "1")
    assert code == 0
    assert out.strip() == expected


@pytest.mark.parametrize("argv", [
    ["volume", "--field", "real", "--n", "0"],
    ["volume", "--field", "octonion", "--n", "2"],
    ["volume", "--field", "real"],
    ["frobnicate"],
    ["expected-det", "--field", "real", "--n", "2", "--alpha", "-1"],
    ["qubit", "--metric", "sld", "--field", "quaternion"],
    ["qubit", "--metric", "nope"],
    ["estimate", "--field", "real", "--n", "2", "--samples", "100"],
    ["sample", "--field", "real", "--n", "2", "--count", "0"],
])
def test_bad_input_exits_with_two(run_cli, argv):
    code, out, err = run_cli(*argv)
    assert code == 2
    assert out == ""
    assert err.startswith("statevol: ")
    assert "Traceback" not in err


def test_failed_estimate_exits_with_three(run_cli):
    # no box sample is a 10 x 10 state
    code, _, err = run_cli("estimate", "--field", "real", "--n", "10", "--samples", "10000")
    assert code == 3
    assert "estimation failed" in err


def test_require_finite_exits_with_four(run_cli):
    code, out, err = run_cli("qubit", "--metric", "rld", "--require-finite")
    assert code == 4
    assert out == ""
    assert "infinite" in err


def test_classify_rld(run_cli):
    code, out, _ = run_cli("classify", "--metric", "rld", "--field", "complex")
    assert code == 0
    assert out.strip() == "infinite (exponent ≈ 1.50 at t→0)"


def test_classify_json(run_cli):
    code, out, _ = run_cli("classify", "--metric", "sld", "--field", "real", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["verdict"] == "finite"
    assert data["closed_form"] == "2*pi"
    assert data["rel_error"] < 1e-8


def test_qubit_identity_pullback(run_cli):
    code, out, _ = run_cli("qubit", "--pullback", "identity", "--field", "complex")
    assert code == 0
    assert out.startswith("1.48096097")
    assert "sqrt(2)*pi/3" in out


def test_qubit_measure(run_cli):
    code, out, _ = run_cli("qubit", "--measure", "point")
    assert code == 0
    assert out.startswith("9.869604")
    code, out, _ = run_cli("qubit", "--measure", "arcsine")
    assert code == 0
    assert out.startswith("infinite")


def test_qubit_measure_needs_complex_field(run_cli):
    code, _, err = run_cli("qubit", "--measure", "uniform", "--field", "real")
    assert code == 2
    assert "complex" in err


def test_qubit_radial(run_cli):
    code, out, _ = run_cli("qubit", "--metric", "km", "--radial", "--format", "json")
    assert code == 0
    assert json.loads(out)["closed_form"] == "2*pi^2"


def test_table_csv(run_cli):
    code, out, _ = run_cli("table", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 32
    assert {r["verdict"] for r in rows} == {"finite", "infinite"}
    assert not any("mismatch" in r["flags"] for r in rows)


def test_table_transpose(run_cli):
    code, out, _ = run_cli("table", "--transpose", "--format", "json")
    assert code == 0
    assert all(r["dichotomy"] for r in json.loads(out))


def test_sample_is_deterministic(run_cli):
    argv = ["sample", "--field", "complex", "--n", "3", "--count", "25", "--seed", "42"]
    first = run_cli(*argv)
    second = run_cli(*argv)
    assert first[0] == 0
    assert first[1] == second[1]
    lines = first[1].strip().splitlines()
    assert lines[0] == "a_11,a_22,a_33,a_12_re,a_12_im,a_13_re,a_13_im,a_23_re,a_23_im"
    assert len(lines) == 26
    assert run_cli(*argv[:-1], "43")[1] != first[1]


def test_sample_json_with_streams(run_cli):
    code, out, _ = run_cli("sample", "--field", "real", "--n", "2", "--count", "7", "--threads", "3",
                           "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["threads"] == 3
    assert len(data["samples"]) == 7
    for m in data["samples"]:
        assert m[0][0] + m[1][1] == pytest.approx(1.0)
        assert m[0][1] == m[1][0]


def test_estimate_json(run_cli):
    code, out, _ = run_cli("estimate", "--field", "real", "--n", "2", "--samples", "200000", "--seed", "1",
                           "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["n_samples"] == 200000
    assert abs(data["value"] - 0.7853981634) <= 3 * data["std_error"]
    assert data["seed"] == 1


def test_estimate_text_with_metric(run_cli):
    code, out, _ = run_cli("estimate", "--field", "complex", "--n", "2", "--samples", "20000", "--metric", "km")
    assert code == 0
    assert "20,000 samples" in out
    assert "seed 0, 1 stream)" in out


def test_environment_sets_defaults(run_cli):
    code, out, _ = run_cli("volume", "--field", "real", "--n", "2", environment={"STATEVOL_FORMAT": "json"})
    assert code == 0
    assert json.loads(out)["coeff_den"] == 4


def test_bad_environment_exits_with_two(run_cli):
    code, _, err = run_cli("volume", "--field", "real", "--n", "2", environment={"STATEVOL_THREADS": "0"})
    assert code == 2
    assert "invalid configuration" in err

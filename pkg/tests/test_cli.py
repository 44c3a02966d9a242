import math
import re

import pytest
import yaml
from hypothesis import given, strategies as st

from ikchain import cli
from ikchain.errors import ConfigParse, SizeGuard
from ikchain.suites import REGISTRY, suite_rng

EXPECTED_REGISTRY = [
    "qybe", "unitarity", "initial", "rtt", "exchange", "hamiltonian", "basis-count", "orthogonality",
    "completeness", "vanishing", "quasi-symmetry", "b1-action", "b2-action", "bethe-build", "bae-solve",
    "on-shell", "f-table", "expand", "inverse-trace", "inverse-local",
]


def write_config(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text)
    return str(path)


def strip_timing(text):
    return "\n".join(line for line in text.splitlines() if "timing_ms" not in line)


def test_registry_order():
    assert [s.name for s in REGISTRY] == EXPECTED_REGISTRY


@given(st.floats(allow_nan=False, allow_infinity=False), st.floats(allow_nan=False, allow_infinity=False))
def test_complex_round_trip_is_exact(re_part, im_part):
    z = complex(re_part, im_part)
    text = cli.dump_yaml({"z": z})
    back = yaml.safe_load(text)["z"]
    assert complex(back[0], back[1]) == z


def test_floats_use_seventeen_digits():
    text = cli.dump_yaml({"x": 0.1, "y": 1e-8, "z": 3.0})
    assert "x: 0.10000000000000001" in text
    assert "y: 1.0e-08" in text and "!!" not in text
    assert yaml.safe_load(text) == {"x": 0.1, "y": 1e-8, "z": 3.0}


def test_qybe_default_params(tmp_path, capsys):
    cfg = write_config(tmp_path, "suites: [qybe]\n")
    assert cli.main(["run", cfg, "--out", str(tmp_path / "out")]) == 0
    report = yaml.safe_load((tmp_path / "out" / "qybe.yaml").read_text())
    assert report["n_cases"] >= 100
    assert all(c["pass"] for c in report["cases"])
    assert all(c["pass"] == (c["residual"] < c["tolerance"]) for c in report["cases"])
    assert (tmp_path / "out" / "summary.yaml").exists()


def test_basis_suites_at_three_sites(tmp_path):
    cfg = write_config(tmp_path, "params: {n_sites: 3}\nsuites: [orthogonality, completeness]\n")
    assert cli.main(["run", cfg, "--out", str(tmp_path)]) == 0


def test_reports_are_deterministic(tmp_path):
    cfg = write_config(tmp_path, "params: {seed: 5}\nsuites: [unitarity, b2-action, on-shell]\n")
    for name in ("a", "b"):
        assert cli.main(["run", cfg, "--out", str(tmp_path / name)]) == 0
    for suite in ("unitarity", "b2-action", "on-shell", "summary"):
        a = (tmp_path / "a" / f"{suite}.yaml").read_bytes().decode()
        b = (tmp_path / "b" / f"{suite}.yaml").read_bytes().decode()
        assert strip_timing(a) == strip_timing(b)
        assert "\r" not in a


def test_seed_changes_reports(tmp_path):
    cfg = write_config(tmp_path, "suites: [unitarity]\n")
    cli.main(["run", cfg, "--out", str(tmp_path / "a")])
    cli.main(["run", cfg, "--out", str(tmp_path / "b"), "--seed", "9"])
    assert (tmp_path / "a" / "unitarity.yaml").read_text() != (tmp_path / "b" / "unitarity.yaml").read_text()


def test_suite_streams_are_independent():
    a = suite_rng("qybe", 3).uniform()
    b = suite_rng("unitarity", 3).uniform()
    assert a != b
    assert suite_rng("qybe", 3).uniform() == a


def test_size_guard_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, "params: {n_sites: 9}\nsuites: [qybe]\n")
    assert cli.main(["run", cfg, "--out", str(tmp_path)]) == 2
    assert "SizeGuard" in capsys.readouterr().err
    with pytest.raises(SizeGuard):
        cli.run(cli.config_from_dict({"params": {"n_sites": 9}}), tmp_path)


def test_config_errors_exit_two(tmp_path):
    assert cli.main(["run", write_config(tmp_path, "suites: [nope]\n")]) == 2
    assert cli.main(["run", write_config(tmp_path, "params: {eta: [0.0, 0.0]}\nsuites: [qybe]\n")]) == 2
    assert cli.main(["run", write_config(tmp_path, "params: [1, 2\n")]) == 2
    assert cli.main(["run", str(tmp_path / "missing.yaml")]) == 2
    with pytest.raises(ConfigParse):
        cli.config_from_dict({"params": {"eta": "abc"}})
    with pytest.raises(ConfigParse):
        cli.config_from_dict({"extra": 1})


def test_failing_tolerance_exits_one(tmp_path):
    cfg = write_config(tmp_path, "suites: [unitarity]\n")
    assert cli.main(["run", cfg, "--out", str(tmp_path), "--tolerance", "1e-30"]) == 1
    report = yaml.safe_load((tmp_path / "unitarity.yaml").read_text())
    assert not report["passed"]
    assert all(c["tolerance"] == 1e-30 for c in report["cases"])


def test_flag_overrides(tmp_path):
    cfg = write_config(tmp_path, "params: {n_sites: 1, theta: [[0.1, 0.0]]}\nsuites: [inverse-trace]\n")
    assert cli.main(["run", cfg, "--out", str(tmp_path), "--n-sites", "2", "--eta", "0.25,0.05"]) == 0
    report = yaml.safe_load((tmp_path / "inverse-trace.yaml").read_text())
    assert report["config_echo"]["n_sites"] == 2
    assert report["config_echo"]["eta"] == [0.25, 0.05]
    assert report["n_cases"] == 18


def test_output_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path / "env"))
    cfg = write_config(tmp_path, "suites: [initial]\noutput_path: elsewhere\n")
    assert cli.main(["run", cfg]) == 0
    assert (tmp_path / "env" / "initial.yaml").exists()


def test_bethe_settings_are_used(tmp_path):
    cfg = write_config(tmp_path, "suites: [on-shell]\nbethe:\n  n: 1\n  guesses: [[[0.1, 0.2]]]\n"
                                 "  sample_points: [[0.2, 0.1], [0.3, -0.1]]\n")
    assert cli.main(["run", cfg, "--out", str(tmp_path)]) == 0
    report = yaml.safe_load((tmp_path / "on-shell.yaml").read_text())
    assert len([c for c in report["cases"] if c["id"].startswith("spectrum")]) == 2


def test_list_and_describe(capsys):
    assert cli.main(["list-suites"]) == 0
    out = capsys.readouterr().out
    assert all(re.search(rf"^{re.escape(n)}\s", out, re.M) for n in EXPECTED_REGISTRY)
    assert cli.main(["describe", "b2-action"]) == 0
    assert "default tolerance" in capsys.readouterr().out
    assert cli.main(["describe", "nothing"]) == 2


def test_b2_report_records_adjudication(tmp_path):
    cfg = write_config(tmp_path, "suites: [b2-action]\n")
    cli.main(["run", cfg, "--out", str(tmp_path)])
    notes = yaml.safe_load((tmp_path / "b2-action.yaml").read_text())["notes"]
    assert notes["adjudicated_reading"] == "corrected"
    assert max(notes["losing_readings_worst"].values()) > 1e-3
    assert all(math.isfinite(v) for v in notes["losing_readings_worst"].values())

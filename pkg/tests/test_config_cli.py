import json
import os

import pytest

import shiftlab.cli as cli
from shiftlab.config import EXIT_CONFIG_ERROR, ConfigError, RunConfig


BASE = {
    "space": {"variant": "c0_Z"},
    "weight": {"kind": "two_sided", "plus": "2", "minus": "1/2"},
    "family": {"generator": "block", "P": 2, "gamma": 4, "sep_extra": 11, "horizon": 3000},
    "horizons": {"outer": 1500, "inner": 3000, "window": 3000},
    "check": {"form": "auto", "j_mode": "full"},
    "threads": 1,
}


def write_config(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def test_config_round_trip_identity():
    cfg = RunConfig(dict(BASE))
    text = cfg.to_json()
    again = RunConfig.from_json(text)
    assert again.to_json() == text


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig({"weigth": {}})


def test_config_rejects_bad_json():
    with pytest.raises(ConfigError):
        RunConfig.from_json("{not json")


def test_zero_mode_needs_invertible_weight():
    doc = dict(BASE)
    doc["weight"] = {"kind": "constant", "value": "2", "inf_abs": "0"}
    doc["check"] = {"j_mode": "zero"}
    with pytest.raises(ConfigError):
        RunConfig(doc).j_mode()


def test_cli_check_satisfied(tmp_path, capsys):
    doc = dict(BASE)
    doc["out"] = str(tmp_path / "run")
    code = cli.main(["check", "--config", write_config(tmp_path, doc)])
    assert code == 0
    out = capsys.readouterr().out
    assert "SatisfiedToHorizon" in out
    report = json.loads((tmp_path / "run" / "report.json").read_text())
    assert report["verdict"] == "SatisfiedToHorizon"
    assert report["exit_code"] == 0


def test_cli_check_violated_with_witness(tmp_path):
    doc = dict(BASE)
    doc["weight"] = {"kind": "constant", "value": "1"}
    doc["out"] = str(tmp_path / "run")
    code = cli.main(["check", "--config", write_config(tmp_path, doc)])
    assert code == 1
    report = json.loads((tmp_path / "run" / "report.json").read_text())
    assert report["witness"] is not None


def test_cli_check_inconclusive(tmp_path):
    doc = dict(BASE)
    doc["space"] = {"variant": "lp_Z", "p": 2.0}
    doc["out"] = str(tmp_path / "run")
    assert cli.main(["check", "--config", write_config(tmp_path, doc)]) == 2


def test_cli_reports_are_byte_deterministic(tmp_path):
    doc = dict(BASE)
    doc["out"] = str(tmp_path / "a")
    path = write_config(tmp_path, doc)
    assert cli.main(["check", "--config", path]) == 0
    first = (tmp_path / "a" / "report.json").read_bytes()
    first_csv = (tmp_path / "a" / "extrema.csv").read_bytes()
    assert cli.main(["check", "--config", path, "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "b" / "report.json").read_bytes() == first
    assert (tmp_path / "b" / "extrema.csv").read_bytes() == first_csv


def test_cli_config_error_exit_code(tmp_path):
    doc = {"weight": {"kind": "nope"}}
    assert cli.main(["check", "--config", write_config(tmp_path, doc)]) == EXIT_CONFIG_ERROR
    assert cli.main(["check", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG_ERROR


def test_cli_zero_mode_non_invertible_is_64(tmp_path):
    doc = dict(BASE)
    doc["weight"] = {"kind": "table", "entries": {"1": "2"},
                     "default": {"kind": "constant", "value": "2"}, "inf_abs": "0"}
    doc["check"] = {"j_mode": "zero"}
    doc["out"] = str(tmp_path / "run")
    assert cli.main(["check", "--config", write_config(tmp_path, doc)]) == EXIT_CONFIG_ERROR


def test_cli_family_and_density(tmp_path):
    doc = dict(BASE)
    doc["out"] = str(tmp_path / "fam")
    assert cli.main(["family", "--config", write_config(tmp_path, doc)]) == 0
    fam_txt = (tmp_path / "fam" / "family.txt").read_text()
    assert fam_txt.startswith("# shiftlab hitting-family v1")
    payload = json.loads((tmp_path / "fam" / "family.json").read_text())
    assert payload["separation"] == "pass"

    dens = {"set": {"kind": "multiples", "step": 100, "horizon": 100000},
            "out": str(tmp_path / "dens")}
    assert cli.main(["density", "--config", write_config(tmp_path, dens, "d.json")]) == 0
    d = json.loads((tmp_path / "dens" / "density.json").read_text())
    assert abs(d["upper"] - 0.01) < 1e-3


def test_cli_orbit_and_invert(tmp_path):
    doc = dict(BASE)
    doc["out"] = str(tmp_path / "orb")
    path = write_config(tmp_path, doc)
    assert cli.main(["orbit", "--config", path]) == 0
    orbit = json.loads((tmp_path / "orb" / "orbit.json").read_text())
    assert orbit["ok"] is True
    csv_text = (tmp_path / "orb" / "orbit.csv").read_text()
    assert csv_text.splitlines()[0] == "q,m,error,bound,truncation"

    assert cli.main(["invert", "--config", path, "--rational"]) == 0
    sym = json.loads((tmp_path / "orb" / "symmetry.json").read_text())
    assert sym["equal"] is True


def test_cli_orbit_zero_targets(tmp_path):
    doc = dict(BASE)
    doc["targets"] = {"vectors": [{}, {}]}
    doc["out"] = str(tmp_path / "z")
    assert cli.main(["orbit", "--config", write_config(tmp_path, doc)]) == 0
    orbit = json.loads((tmp_path / "z" / "orbit.json").read_text())
    assert orbit["per_q"]["1"]["max_error"] == 0.0


def test_cli_horizon_overrides(tmp_path):
    doc = dict(BASE)
    doc["out"] = str(tmp_path / "r")
    path = write_config(tmp_path, doc)
    assert cli.main(["check", "--config", path, "--horizon-outer", "1000"]) == 0
    report = json.loads((tmp_path / "r" / "report.json").read_text())
    assert report["horizons"]["outer"] == 1000


def test_cli_explicit_family_file(tmp_path):
    doc = dict(BASE)
    doc["out"] = str(tmp_path / "f1")
    path = write_config(tmp_path, doc)
    assert cli.main(["family", "--config", path]) == 0
    doc2 = dict(BASE)
    doc2["family"] = {"file": str(tmp_path / "f1" / "family.txt")}
    doc2["out"] = str(tmp_path / "f2")
    assert cli.main(["check", "--config", write_config(tmp_path, doc2, "r2.json")]) == 0

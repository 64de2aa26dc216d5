from __future__ import annotations

import json

import pytest

from twyangian import __version__, cli
from twyangian.cli import ConfigError, RunConfig, run
from twyangian.drinfeld import ExtractionError


@pytest.fixture
def sp_spec(tmp_path):
    path = tmp_path / "sp.json"
    path.write_text(json.dumps({"flavor": "sp", "n": 1, "gl": [["irrep", [1, -1]]]}))
    return str(path)


@pytest.fixture
def trivial_spec(tmp_path):
    path = tmp_path / "triv.json"
    path.write_text(json.dumps({"flavor": "o", "n": 1, "gl": []}))
    return str(path)


def test_verify_ternary_small_rank_passes():
    code, text = run(["verify", "--suite", "ternary", "--flavor", "sp", "--n", "1"])
    report = json.loads(text)
    assert code == 0 and report["verdict"] == "PASS"
    assert report["version"] == __version__ and len(report["config_hash"]) == 16


def test_verify_all_suites_rank_one_over_finite_field():
    code, text = run(["verify", "--n", "1", "--field", "Fp:101"])
    assert code == 0
    assert all(it["status"] == "PASS" for it in json.loads(text)["items"])


def test_characteristic_two_is_a_config_error():
    code, text = run(["verify", "--field", "Fp:2"])
    assert code == 2
    assert "characteristic 2" in json.loads(text)["error"]


def test_composite_modulus_is_a_config_error():
    code, _ = run(["verify", "--field", "Fp:9"])
    assert code == 2


def test_unknown_flag_is_a_config_error():
    code, _ = run(["verify", "--bogus"])
    assert code == 2


def test_missing_spec_file_is_a_config_error(tmp_path):
    code, _ = run(["drinfeld", "--spec", str(tmp_path / "nope.json")])
    assert code == 2


def test_drinfeld_of_trivial_module(trivial_spec):
    code, text = run(["drinfeld", "--spec", trivial_spec])
    assert code == 0
    assert json.loads(text)["drinfeld"]["P"] == [[1]]


def test_drinfeld_worked_symplectic_roundtrip(sp_spec):
    code, text = run(["drinfeld", "--spec", sp_spec, "--roundtrip"])
    report = json.loads(text)
    assert code == 0
    assert report["drinfeld"]["P"] == [[0, 0, 1, -2, 1]]
    assert report["roundtrip"]["fixed_point"] is True


def test_drinfeld_extraction_failure_exits_one(sp_spec, monkeypatch):
    def boom(spec, F=None):
        raise ExtractionError(2, "non-integer gap")

    monkeypatch.setattr(cli, "pipeline_extract", boom)
    code, text = run(["drinfeld", "--spec", sp_spec])
    report = json.loads(text)
    assert code == 1 and report["arrow"] == 2


def test_stability_skip_exits_three(sp_spec):
    code, text = run(["stability", "--spec", sp_spec, "--primes", "5"])
    assert code == 3
    assert json.loads(text)["panel"][0]["status"] == "skipped"


def test_stability_default_panel_passes(sp_spec):
    code, text = run(["stability", "--spec", sp_spec])
    assert code == 0 and json.loads(text)["verdict"] == "PASS"


def test_stability_accepts_rank_generic_spec(tmp_path):
    path = tmp_path / "rg.json"
    path.write_text(json.dumps({"flavor": "o", "parts": [-1], "gl": [["half", 2], ["tail", 1, 3]]}))
    code, _ = run(["stability", "--spec", str(path), "--primes", "101"])
    assert code == 0


def test_qdet_and_sdet_default_reports():
    for cmd in ("qdet", "sdet"):
        code, text = run([cmd, "--flavor", "sp", "--n", "1"])
        assert code == 0, text
    _, text = run(["sdet", "--flavor", "o", "--n", "1"])
    names = [it["name"] for it in json.loads(text)["items"]]
    assert any(name.startswith("alpha_N (N=") for name in names)


def test_sdet_over_finite_field_rank_two():
    code, _ = run(["sdet", "--field", "Fp:101", "--n", "2"])
    assert code == 0


def test_brauer_summary_and_gram():
    code, _ = run(["brauer", "--flavor", "o", "--n", "2"])
    assert code == 0
    code, text = run(["brauer", "--action", "gram", "--n", "2"])
    assert code == 0
    assert json.loads(text)["gram_determinant"] == ["0", "0", "0", "2", "-3", "0", "1"]


def test_brauer_compose_worked_example():
    A = json.dumps([["t5", "t4"], ["b2", "b3"], ["t3", "t1"], ["t2", "b1"]])
    B = json.dumps([["t3", "t2"], ["b3", "b5"], ["b1", "b2"], ["t1", "b4"]])
    code, text = run(["brauer", "--action", "compose", "--diagram", A, "--diagram", B])
    report = json.loads(text)
    assert code == 0 and (report["source"], report["target"]) == (5, 5)
    (term,) = report["terms"]
    assert term["coeff"] == ["0", "1"]
    assert sorted(map(sorted, term["diagram"])) == sorted(
        map(sorted, [["t5", "t4"], ["t3", "t1"], ["t2", "b4"], ["b3", "b5"], ["b1", "b2"]])
    )


def test_brauer_compose_needs_two_diagrams():
    code, _ = run(["brauer", "--action", "compose", "--diagram", "[]"])
    assert code == 2


def test_reports_are_byte_identical_across_runs(sp_spec):
    argv = ["drinfeld", "--spec", sp_spec, "--roundtrip"]
    assert run(argv) == run(argv)
    argv = ["brauer", "--flavor", "sp", "--n", "2", "--seed", "7"]
    assert run(argv) == run(argv)


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"command": "verify", "colour": "blue"})


def test_config_hash_ignores_output_path():
    a = RunConfig.from_dict({"command": "verify", "out": "a.json"})
    b = RunConfig.from_dict({"command": "verify", "out": "b.json"})
    c = RunConfig.from_dict({"command": "verify", "n": 2})
    assert a.hash() == b.hash() != c.hash()


def test_out_writes_report_file(tmp_path):
    out = tmp_path / "report.json"
    code, text = run(["brauer", "--action", "gram", "--n", "1", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text()) == json.loads(text)


def test_main_routes_config_errors_to_stderr(capsys):
    assert cli.main(["verify", "--field", "Fp:2"]) == 2
    captured = capsys.readouterr()
    assert captured.out == "" and "error" in captured.err

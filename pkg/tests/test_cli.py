import json

import pytest

from toeplitz_lab import cli, experiments

KEYS = {"experiment", "params", "results", "pass", "claim"}


def _run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


def test_json_schema(capsys):
    code, out = _run(capsys, "counterexample", "--json")
    assert code == 0
    report = json.loads(out.out)
    assert set(report) == KEYS
    assert report["claim"] == "non-inverse-witness"
    assert report["params"]["seed"] == 0


def test_table_output(capsys):
    code, out = _run(capsys, "wold", "--n", "64")
    assert code == 0
    assert out.out.startswith("wold [wold-wandering-subspace]")
    assert out.out.rstrip().endswith("overall: pass")


def test_out_file(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, _ = _run(capsys, "dichotomy", "--out", str(path))
    assert code == 0
    assert json.loads(path.read_text())["experiment"] == "dichotomy"


def test_skip_exit_code(capsys):
    code, out = _run(capsys, "factorize", "--eps", "1e-12")
    assert code == 0
    assert "overall: skipped" in out.out


def test_failure_exit_code(monkeypatch, capsys):
    def boom(cfg):
        raise ValueError("broken")

    monkeypatch.setitem(experiments.EXPERIMENTS, "wold", (boom, "wold-wandering-subspace"))
    code, out = _run(capsys, "wold")
    assert code == 1
    assert "overall: FAIL" in out.out


def test_config_error_exit_code(capsys):
    code, out = _run(capsys, "wold", "--n", "8")
    assert code == 2
    assert "config error" in out.err


def test_bad_seed_type_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["regular", "--seed", "abc"])
    assert info.value.code == 2


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["plot"])
    assert info.value.code == 2


def test_deterministic_output(capsys):
    _, first = _run(capsys, "regular", "--json", "--seed", "3")
    _, second = _run(capsys, "regular", "--json", "--seed", "3")
    assert first.out == second.out
    assert json.loads(first.out)["params"]["seed"] == 3


def test_all_at_small_n(capsys):
    code, out = _run(capsys, "all", "--n", "16", "--json")
    report = json.loads(out.out)
    assert len(report["results"]["summary"]) == 8
    assert code == experiments.exit_code(report)

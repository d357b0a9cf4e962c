import json

import pytest

from banditorch.cli import EXIT_INVALID, EXIT_OK, EXIT_RUNTIME, main
from banditorch.sim import BUILTIN_SCENARIOS


def write_config(tmp_path, **kw):
    cfg = dict(scenario="public-batch", agent="drone-public", horizon=3, seeds=[0], agent_params={"budget": 20})
    cfg.update(kw)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == EXIT_OK
    out = capsys.readouterr().out
    assert {ln.split("\t")[0] for ln in out.strip().split("\n")} == set(BUILTIN_SCENARIOS)


def test_validate_ok(tmp_path, capsys):
    assert main(["validate", "--config", write_config(tmp_path)]) == EXIT_OK
    assert capsys.readouterr().out == "ok\n"


@pytest.mark.parametrize("kw", [dict(horizon=0), dict(agent="drone-private"), dict(colour="red")])
def test_validate_rejects(tmp_path, capsys, kw):
    assert main(["validate", "--config", write_config(tmp_path, **kw)]) == EXIT_INVALID
    assert "invalid:" in capsys.readouterr().err


def test_missing_and_malformed_config(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "nope.json")]) == EXIT_INVALID
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad)]) == EXIT_INVALID


def test_run_to_stdout(tmp_path, capsys):
    assert main(["run", "--config", write_config(tmp_path), "--seed-override", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("t,scenario,agent,seed,")
    assert ",public-batch,drone-public,2," in out and '"R_T"' in out


def test_run_to_directory(tmp_path):
    out = tmp_path / "results"
    args = ["run", "--config", write_config(tmp_path), "--output", str(out), "--agent", "rule-based"]
    assert main(args) == EXIT_OK
    assert (out / "public-batch_rule-based_seed0.csv").is_file()
    assert json.loads((out / "public-batch_rule-based_summary.json").read_text())["agent"] == "rule-based"


def test_runtime_error(tmp_path, capsys):
    overrides = {"workload": {"generator": "file-replay", "path": str(tmp_path / "missing.txt")}}
    assert main(["run", "--config", write_config(tmp_path, scenario_overrides=overrides)]) == EXIT_RUNTIME
    assert "error:" in capsys.readouterr().err

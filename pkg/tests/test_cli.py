import csv
import io
import json

import pytest

from ftmd.cli import main, parse_grid
from ftmd.scenario_file import serialize_scenario
from ftmd.scenarios import table1, theorem5


@pytest.fixture
def table1_file(tmp_path):
    path = tmp_path / "table1.json"
    path.write_text(serialize_scenario(table1()))
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve(capsys, table1_file):
    code, out, _ = run_cli(capsys, "solve", "--scenario", table1_file, "--format", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["assignment"] == {"1": 3}
    assert doc["welfare"] == pytest.approx(129.0)
    assert doc["welfare_without"]["3"] == pytest.approx(110.0)


def test_run_is_seeded(capsys, table1_file):
    _, first, _ = run_cli(capsys, "run", "--scenario", table1_file, "--seed", "3", "--format", "csv")
    _, second, _ = run_cli(capsys, "run", "--scenario", table1_file, "--seed", "3", "--format", "csv")
    assert first == second
    rows = list(csv.reader(io.StringIO(first)))
    assert rows[0] == ["section", "key", "value"]
    assert ["assignment", "1", "3"] in rows


def test_simulate(capsys, table1_file):
    code, out, _ = run_cli(capsys, "simulate", "--scenario", table1_file, "--trials", "500", "--seed", "1",
                           "--format", "structured")
    assert code == 0
    sim = json.loads(out)["simulation"]
    assert sim["trials"] == 500
    assert set(sim["mean_utility"]) == {"0", "1", "2", "3"}


def test_demo_table1(capsys):
    code, out, _ = run_cli(capsys, "demo", "table1")
    assert code == 0
    assert "winner = 3" in out
    assert "optimal welfare without agent 3 = 110" in out
    assert "payment on success = 100" in out
    assert "payment on failure = -110" in out
    assert "truthful expected utility = 19" in out


def test_verify_exit_codes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--mechanism", "naive-gva", "--property", "ic")
    assert code == 1
    assert out.startswith("ic: FAIL")
    assert "declares c=(0) p=(1)" in out
    code, _, _ = run_cli(capsys, "verify", "--mechanism", "single", "--property", "nfr")
    assert code == 0


def test_verify_on_a_file(capsys, tmp_path):
    path = tmp_path / "t5.json"
    path.write_text(serialize_scenario(theorem5(1)))
    code, out, _ = run_cli(capsys, "verify", "--scenario", str(path), "--mechanism", "multi", "--property", "cr",
                           "--grid", "p=0,1;c=0,1", "--format", "structured")
    assert code in (0, 1)
    assert json.loads(out)[0]["property"] == "cr"


def test_gen_round_trips(capsys):
    code, out, _ = run_cli(capsys, "gen", "chain", "--k", "3", "--seed", "2")
    assert code == 0
    assert json.loads(out)["tasks"]["count"] == 3


def test_bad_input_exits_with_usage_code(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"tasks": ')
    code, _, err = run_cli(capsys, "solve", "--scenario", str(path))
    assert code == 2
    assert "line 1" in err
    assert run_cli(capsys, "solve")[0] == 2
    assert run_cli(capsys, "frobnicate")[0] == 2
    assert run_cli(capsys, "verify", "--grid", "q=1")[0] == 2


def test_parse_grid():
    grid = parse_grid("p=1,0;c=3")
    assert grid.prob_levels == (0.0, 1.0)
    assert grid.cost_levels == (3.0,)

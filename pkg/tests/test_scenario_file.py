import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from ftmd.model import Scenario, ScenarioError
from ftmd.scenario_file import ScenarioFormatError, parse_scenario, serialize_scenario
from ftmd.scenarios import generate, theorem3, theorem5

from randgen import random_dag, random_profile, random_valuation


def doc(**parts):
    base = {"tasks": {"count": 1, "values": [1]}, "agents": [{"cost": [0], "prob": [1]}]}
    base.update(parts)
    return json.dumps(base)


@pytest.mark.parametrize("name", ["table1", "theorem3", "theorem5", "parallel-links", "chain"])
def test_generated_scenarios_round_trip(name):
    s = generate(name)
    assert parse_scenario(serialize_scenario(s)) == s


def test_declared_types_are_written_only_when_they_differ():
    text = serialize_scenario(theorem5(1))
    agents = json.loads(text)["agents"]
    assert "declared_prob" not in agents[0]
    assert agents[1]["declared_prob"] == [1.0, 0.0]


def test_combinatorial_table_keys():
    table = json.loads(serialize_scenario(theorem3(10.0)))["tasks"]["table"]
    assert table == {"00": 0.0, "01": 0.0, "10": 0.0, "11": 10.0}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 4), st.integers(1, 3))
def test_random_round_trip(seed, t, n):
    rng = random.Random(seed)
    s = Scenario(random_valuation(rng, t), random_dag(rng, t), random_profile(rng, n, t), random_profile(rng, n, t))
    again = parse_scenario(serialize_scenario(s))
    assert again == s
    assert serialize_scenario(again) == serialize_scenario(s)


def test_syntax_errors_name_the_line():
    with pytest.raises(ScenarioFormatError, match="line 2 column"):
        parse_scenario('{"tasks": 1,\n "agents": [1,]}')


def test_missing_field():
    with pytest.raises(ScenarioFormatError, match="field agents"):
        parse_scenario('{"tasks": {"count": 1, "values": [1]}}')


def test_no_agents():
    with pytest.raises(ScenarioFormatError, match="n ≥ 1 required"):
        parse_scenario(doc(agents=[]))


def test_missing_empty_vector_value():
    text = json.dumps({"tasks": {"count": 2, "table": {"01": 1, "10": 1, "11": 2}},
                       "agents": [{"cost": [0, 0], "prob": [1, 1]}]})
    with pytest.raises(ScenarioFormatError, match="V\\(0…0\\) must be 0"):
        parse_scenario(text)


def test_invalid_probability():
    with pytest.raises(ScenarioError, match="probability out of \\[0,1\\] for task 1"):
        parse_scenario(doc(agents=[{"cost": [0], "prob": [2]}]))


def test_cycle():
    text = json.dumps({"tasks": {"count": 2, "values": [1, 1]},
                       "dependencies": [{"task": 1, "requires": 2}, {"task": 2, "requires": 1}],
                       "agents": [{"cost": [0, 0], "prob": [1, 1]}]})
    with pytest.raises(ScenarioError, match="dependency cycle"):
        parse_scenario(text)

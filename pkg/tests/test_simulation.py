import pytest

from ftmd.mechanisms import MechanismKind
from ftmd.model import (
    AdditiveValuation,
    AgentType,
    Assignment,
    DependencyDag,
    FTMDError,
    Scenario,
    TypeProfile,
)
from ftmd.scenarios import table1, theorem5
from ftmd.simulation import execute, monte_carlo, trial_seed


def test_execute_is_deterministic():
    s = table1()
    a = Assignment((3,))
    runs = [execute(a, s.true_types, s.dag, trial_seed(11, k)) for k in range(50)]
    again = [execute(a, s.true_types, s.dag, trial_seed(11, k)) for k in range(50)]
    assert runs == again
    assert {r.completed for r in runs} == {(0,), (1,)}


def test_draws_do_not_depend_on_visiting_order():
    profile = TypeProfile((AgentType((0, 0, 0), (0.5, 0.5, 0.5)),))
    a = Assignment((1, 1, 1))
    free = DependencyDag.empty(3)
    # same tasks, visited 3, 2, 1 only because of the edges
    reordered = DependencyDag.from_edges(3, [(1, 2), (2, 3)])
    for k in range(100):
        x = execute(a, profile, free, trial_seed(0, k))
        y = execute(a, profile, reordered, trial_seed(0, k))
        if y.attempted == {1, 2, 3}:
            assert x.completed == y.completed


def test_failed_prerequisite_stops_descendants():
    s = theorem5(1)
    # agent 2 truly never completes task 1
    a = Assignment((2, 1))
    for k in range(20):
        out = execute(a, s.true_types, s.dag, trial_seed(4, k))
        assert out.completed == (0, 0)
        assert out.attempted == {1}


def test_monte_carlo_is_reproducible():
    first = monte_carlo(MechanismKind.SINGLE_TASK, table1(), 2000, 7)
    second = monte_carlo(MechanismKind.SINGLE_TASK, table1(), 2000, 7)
    assert first == second
    assert first != monte_carlo(MechanismKind.SINGLE_TASK, table1(), 2000, 8)


def test_monte_carlo_means():
    report = monte_carlo(MechanismKind.SINGLE_TASK, table1(), 20000, 1)
    assert report.completion_frequency[0] == pytest.approx(0.9, abs=0.01)
    # utility is 40 or -170; sd about 63
    assert report.mean_utility[3] == pytest.approx(19.0, abs=2.0)
    assert report.mean_utility[1] == 0.0
    assert report.mean_center_utility == pytest.approx(110.0, abs=1e-9)


def test_certain_outcomes_have_no_spread():
    profile = TypeProfile((AgentType((1.0,), (1.0,)),))
    s = Scenario(AdditiveValuation((3.0,)), DependencyDag.empty(1), profile)
    report = monte_carlo(MechanismKind.SINGLE_TASK, s, 10, 0)
    assert report.std_utility[1] == 0.0
    assert report.mean_utility[1] == pytest.approx(2.0)


def test_trials_must_be_positive():
    with pytest.raises(FTMDError):
        monte_carlo(MechanismKind.SINGLE_TASK, table1(), 0, 0)

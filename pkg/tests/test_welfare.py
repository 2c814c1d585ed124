import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from ftmd.model import (
    DUMMY,
    AdditiveValuation,
    AgentType,
    Assignment,
    CombinatorialValuation,
    DependencyDag,
    ExecutionOutcome,
    FTMDError,
    TypeProfile,
)
from ftmd.welfare import (
    completion_distribution,
    expected_welfare,
    expected_welfare_others,
    feasible_outcomes,
    is_distribution,
    own_completion,
    realized_welfare,
    realized_welfare_others,
    substitute_completion,
)

from randgen import random_dag, random_profile, random_valuation


def coin_welfare(a, profile, v, dag):
    """Expected welfare from independent per-task coins, computed without the engine."""
    t = a.t
    total = 0.0
    for coins in product((0, 1), repeat=t):
        w = 1.0
        for j, coin in enumerate(coins, 1):
            p = profile.prob(a.owner(j), j)
            w *= p if coin else 1 - p
        done = [0] * t
        spent = 0.0
        for j in dag.topological_order:
            if a.owner(j) != DUMMY and all(done[k - 1] for k in dag.prereqs[j - 1]):
                spent += profile.cost(a.owner(j), j)
                done[j - 1] = coins[j - 1]
        total += w * (v(done) - spent)
    return total


@pytest.fixture
def chain_case():
    # task 2 requires task 1
    dag = DependencyDag.from_edges(2, [(2, 1)])
    profile = TypeProfile((AgentType((1, 9), (0.5, 0)), AgentType((9, 2), (0, 0.8))))
    return Assignment((1, 2)), profile, AdditiveValuation((3, 10)), dag


def test_chain_distribution(chain_case):
    a, profile, _, dag = chain_case
    dist = completion_distribution(a, profile, dag).as_dict()
    assert dist == pytest.approx({(0, 0): 0.5, (1, 0): 0.1, (1, 1): 0.4})


def test_chain_expected_welfare(chain_case):
    a, profile, v, dag = chain_case
    # 3*.5 + 10*.5*.8 - 1 - 2*.5
    assert expected_welfare(a, profile, v, dag) == pytest.approx(3.5, abs=1e-12)
    assert expected_welfare(a, profile, v, dag, method="enumerate") == pytest.approx(3.5, abs=1e-12)


def test_failed_prerequisite_costs_nothing(chain_case):
    a, profile, v, dag = chain_case
    out = ExecutionOutcome.from_completion(a, dag, (0, 0))
    assert realized_welfare(a, profile, out, v) == -1.0


def test_zero_probability_vectors_are_omitted():
    profile = TypeProfile((AgentType((0,), (1.0,)),))
    dist = completion_distribution(Assignment((1,)), profile, DependencyDag.empty(1))
    assert dist.support == (((1,), 1.0),)


def test_dummy_tasks_never_complete():
    profile = TypeProfile((AgentType((0, 0), (1, 1)),))
    dist = completion_distribution(Assignment((0, 1)), profile, DependencyDag.empty(2))
    assert dist.as_dict() == {(0, 1): 1.0}


def test_feasible_outcomes_cover_every_realization():
    dag = DependencyDag.from_edges(2, [(2, 1)])
    got = {o.completed for o in feasible_outcomes(Assignment((1, 1)), dag)}
    assert got == {(0, 0), (1, 0), (1, 1)}


def test_unknown_method():
    with pytest.raises(ValueError):
        expected_welfare(Assignment((0,)), TypeProfile((AgentType.zero(1),)), AdditiveValuation((1,)),
                         DependencyDag.empty(1), method="magic")


def test_substitute_completion():
    a = Assignment((1, 2))
    profile = TypeProfile((AgentType((3, 3), (0.5, 0.5)), AgentType((1, 1), (0.5, 0.5))))
    swapped = substitute_completion(1, a, profile, (1, 0))
    assert swapped[1] == AgentType((0, 0), (1, 0))
    assert swapped[2] == profile[2]
    with pytest.raises(FTMDError):
        substitute_completion(1, a, profile, (0, 1))


def test_welfare_of_others():
    v = AdditiveValuation((4, 6))
    a = Assignment((1, 2))
    profile = TypeProfile((AgentType((1, 0), (0.5, 0)), AgentType((0, 2), (0, 0.5))))
    dag = DependencyDag.empty(2)
    # agent 1 completed: 4 + 6*.5 - 2
    assert expected_welfare_others(1, a, profile, v, dag, (1, 0)) == pytest.approx(5.0)
    assert expected_welfare_others(1, a, profile, v, dag, (0, 0)) == pytest.approx(1.0)
    out = ExecutionOutcome.from_completion(a, dag, (1, 0))
    assert realized_welfare_others(1, a, profile, out, v) == 4 - 2
    assert own_completion(1, a, (1, 1)) == (1, 0)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 6), st.integers(1, 3))
def test_distribution_sums_to_one(seed, t, n):
    rng = random.Random(seed)
    dag = random_dag(rng, t)
    profile = random_profile(rng, n, t)
    a = Assignment(tuple(rng.randint(0, n) for _ in range(t)))
    assert is_distribution(completion_distribution(a, profile, dag))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 5), st.integers(1, 3))
def test_engine_matches_coin_oracle(seed, t, n):
    rng = random.Random(seed)
    dag = random_dag(rng, t)
    v = random_valuation(rng, t)
    profile = random_profile(rng, n, t)
    a = Assignment(tuple(rng.randint(0, n) for _ in range(t)))
    assert expected_welfare(a, profile, v, dag) == pytest.approx(coin_welfare(a, profile, v, dag), abs=1e-9)


def test_additive_table_agrees_with_additive_form():
    rng = random.Random(5)
    dag = random_dag(rng, 4)
    add = AdditiveValuation((1.0, 2.0, 3.0, 4.0))
    table = CombinatorialValuation.from_function(4, add)
    profile = random_profile(rng, 2, 4)
    for owners in product(range(3), repeat=4):
        a = Assignment(owners)
        assert expected_welfare(a, profile, add, dag) == pytest.approx(expected_welfare(a, profile, table, dag))

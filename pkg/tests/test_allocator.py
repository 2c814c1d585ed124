import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from ftmd import allocator
from ftmd.allocator import optimal_assignment, optimal_welfare_excluding
from ftmd.model import (
    AdditiveValuation,
    AgentType,
    Assignment,
    CombinatorialValuation,
    DependencyDag,
    EnumerationLimitError,
    TypeProfile,
)
from ftmd.scenarios import table1
from ftmd.welfare import expected_welfare

from randgen import random_dag, random_profile, random_valuation


def brute_force(profile, v, dag, exclude=()):
    """First owner vector (lexicographic, dummy lowest) within 1e-9 of the best."""
    agents = [k for k in range(profile.n + 1) if k not in exclude or k == 0]
    scored = [(owners, expected_welfare(Assignment(owners), profile, v, dag, method="enumerate"))
              for owners in product(agents, repeat=v.t)]
    best = max(w for _, w in scored)
    return next((o, w) for o, w in scored if w >= best - 1e-9)


def test_table1_allocation():
    s = table1()
    result = optimal_assignment(s.declared_types, s.valuation, s.dag)
    # 210*.9 - 60 beats 210*.5 - 30 and 210 - 100
    assert result.assignment.owners == (3,)
    assert result.welfare == pytest.approx(129.0, abs=1e-9)
    assert optimal_welfare_excluding(3, s.declared_types, s.valuation, s.dag) == pytest.approx(110.0, abs=1e-9)


def test_ties_go_to_the_lowest_owner_vector():
    same = AgentType((1.0,), (0.5,))
    profile = TypeProfile((same, same))
    result = optimal_assignment(profile, AdditiveValuation((10.0,)), DependencyDag.empty(1))
    assert result.assignment.owners == (1,)
    # zero surplus ties with leaving the task unassigned
    zero = TypeProfile((AgentType((5.0,), (0.5,)),))
    assert optimal_assignment(zero, AdditiveValuation((10.0,)), DependencyDag.empty(1)).assignment.owners == (0,)


def test_all_zero_probabilities_use_the_dummy():
    profile = TypeProfile((AgentType((0, 0), (0, 0)),) * 2)
    result = optimal_assignment(profile, AdditiveValuation((5, 5)), DependencyDag.empty(2))
    assert result.assignment.owners == (0, 0)
    assert result.welfare == 0.0


def test_excluded_agent_gets_nothing():
    s = table1()
    result = optimal_assignment(s.declared_types, s.valuation, s.dag, exclude={3})
    assert result.assignment.owners == (2,)


def test_budget():
    profile = TypeProfile((AgentType.zero(8),) * 9)
    with pytest.raises(EnumerationLimitError):
        optimal_assignment(profile, AdditiveValuation((1.0,) * 8), DependencyDag.empty(8))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 3), st.integers(1, 3))
def test_matches_brute_force(seed, t, n):
    rng = random.Random(seed)
    v = random_valuation(rng, t)
    dag = random_dag(rng, t)
    profile = random_profile(rng, n, t)
    exclude = {rng.randint(1, n)} if rng.random() < 0.5 else set()
    owners, welfare = brute_force(profile, v, dag, exclude)
    allocator.clear_cache()
    result = optimal_assignment(profile, v, dag, exclude)
    assert result.assignment.owners == owners
    assert result.welfare == pytest.approx(welfare, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 5), st.integers(1, 3))
def test_pruning_selects_the_enumerated_assignment(seed, t, n):
    rng = random.Random(seed)
    v = AdditiveValuation(tuple(float(rng.choice((0, 5, 10, rng.uniform(0, 10)))) for _ in range(t)))
    dag = random_dag(rng, t)
    profile = random_profile(rng, n, t)
    plain = optimal_assignment(profile, v, dag, prune=False)
    pruned = optimal_assignment(profile, v, dag, prune=True)
    assert pruned.assignment == plain.assignment
    assert pruned.welfare == pytest.approx(plain.welfare, abs=1e-9)


def test_pruning_requires_additive_values():
    v = CombinatorialValuation(1, (0.0, 1.0))
    with pytest.raises(ValueError):
        optimal_assignment(TypeProfile((AgentType.zero(1),)), v, DependencyDag.empty(1), prune=True)

"""Seeded random instances shared by the property and acceptance tests."""
from __future__ import annotations

import random
from itertools import product

from ftmd.mechanisms import MechanismKind
from ftmd.model import (
    AdditiveValuation,
    AgentType,
    CombinatorialValuation,
    DependencyDag,
    TypeProfile,
)

PROB_LEVELS = (0.0, 0.25, 0.5, 0.9, 1.0)


def random_prob(rng: random.Random) -> float:
    # mix grid levels (ties, 0 and 1) with arbitrary values
    return rng.choice(PROB_LEVELS) if rng.random() < 0.6 else round(rng.random(), 3)


def random_type(rng: random.Random, t: int, zero_cost: bool = False) -> AgentType:
    cost = tuple(0.0 if zero_cost else float(rng.choice((0, 1, 2, 5, rng.uniform(0, 8)))) for _ in range(t))
    return AgentType(cost, tuple(random_prob(rng) for _ in range(t)))


def random_profile(rng: random.Random, n: int, t: int, zero_cost: bool = False) -> TypeProfile:
    return TypeProfile(tuple(random_type(rng, t, zero_cost) for _ in range(n)))


def random_dag(rng: random.Random, t: int, density: float = 0.4) -> DependencyDag:
    # edges only point to lower ids, so the graph is acyclic
    edges = [(j, k) for j in range(2, t + 1) for k in range(1, j) if rng.random() < density]
    return DependencyDag.from_edges(t, edges)


def random_monotone_table(rng: random.Random, t: int) -> CombinatorialValuation:
    values: dict[tuple[int, ...], float] = {}
    for mu in sorted(product((0, 1), repeat=t), key=sum):
        if not any(mu):
            values[mu] = 0.0
            continue
        below = max(values[mu[:b] + (0,) + mu[b + 1:]] for b in range(t) if mu[b])
        values[mu] = below + rng.choice((0.0, float(rng.randint(0, 10)), rng.uniform(0, 10)))
    return CombinatorialValuation.from_function(t, lambda mu: values[tuple(mu)])


def random_valuation(rng: random.Random, t: int):
    if rng.random() < 0.5:
        return AdditiveValuation(tuple(float(rng.choice((0, rng.randint(1, 20), rng.uniform(0, 20))))
                                       for _ in range(t)))
    return random_monotone_table(rng, t)


def random_instance(rng: random.Random, max_t: int = 3, max_n: int = 3):
    """``(kind, v, dag, declared, true_others, agent, true_type)`` drawn from every mechanism."""
    t = rng.randint(1, max_t)
    n = rng.randint(1, max_n)
    kinds = [MechanismKind.MULTIPLE_TASK, MechanismKind.EQUILIBRIUM]
    if t == 1:
        kinds += [MechanismKind.SINGLE_TASK, MechanismKind.NAIVE_GVA]
    kind = rng.choice(kinds)
    zero_cost = kind is MechanismKind.NAIVE_GVA
    if kind is MechanismKind.NAIVE_GVA:
        v = AdditiveValuation((float(rng.randint(1, 100)),))
    else:
        v = random_valuation(rng, t)
    dag = random_dag(rng, t, density=0.0 if kind is MechanismKind.SINGLE_TASK else 0.5)
    declared = random_profile(rng, n, t, zero_cost)
    true_others = random_profile(rng, n, t, zero_cost)
    i = rng.randint(1, n)
    true_type = random_type(rng, t, zero_cost)
    return kind, v, dag, declared, true_others, i, true_type

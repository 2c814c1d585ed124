"""Built-in scenario generators: the worked instances and two network families."""
from __future__ import annotations

import random

from .model import (
    AdditiveValuation,
    AgentType,
    CombinatorialValuation,
    DependencyDag,
    FTMDError,
    Scenario,
    TypeProfile,
    require_valid,
)
from .verifier import Frame

# (cost, probability) of the three agents of the single-task example, V = 210
SINGLE_TASK_AGENTS = ((30.0, 0.5), (100.0, 1.0), (60.0, 0.9))
SINGLE_TASK_VALUE = 210.0

# Types for the dependency impossibility instances; task 2 requires task 1.
THETA_1 = AgentType(cost=(2, 1), prob=(1, 1))
THETA_1_PRIME = AgentType(cost=(2, 0), prob=(1, 0))
THETA_1_DOUBLE = AgentType(cost=(0, 4), prob=(1, 1))
THETA_2 = AgentType(cost=(1, 0), prob=(0, 0))
THETA_2_PRIME = AgentType(cost=(1, 0), prob=(1, 0))
THETA_EXTRA = AgentType(cost=(1, 1), prob=(0, 0))

DEPENDENCY_TYPES = {
    "theta_1": THETA_1,
    "theta_1'": THETA_1_PRIME,
    "theta_1''": THETA_1_DOUBLE,
    "theta_2": THETA_2,
    "theta_2'": THETA_2_PRIME,
    "theta_e": THETA_EXTRA,
}

_THEOREM5_INSTANCES = {
    1: ((THETA_1, THETA_2), (THETA_1, THETA_2_PRIME)),
    2: ((THETA_1_PRIME, THETA_2), (THETA_1, THETA_2_PRIME)),
    3: ((THETA_1_PRIME, THETA_2), (THETA_1_PRIME, THETA_2_PRIME)),
}


def table1() -> Scenario:
    types = TypeProfile(tuple(AgentType((c,), (p,)) for c, p in SINGLE_TASK_AGENTS))
    return require_valid(Scenario(AdditiveValuation((SINGLE_TASK_VALUE,)), DependencyDag.empty(1), types))


def _dependent_pair() -> tuple[AdditiveValuation, DependencyDag]:
    return AdditiveValuation((0.0, 5.0)), DependencyDag.from_edges(2, [(2, 1)])


def theorem5(instance: int) -> Scenario:
    """One of the three two-agent instances; true and declared types differ."""
    if instance not in _THEOREM5_INSTANCES:
        raise FTMDError(f"instance must be 1, 2 or 3 (got {instance})")
    true, declared = _THEOREM5_INSTANCES[instance]
    v, dag = _dependent_pair()
    return require_valid(Scenario(v, dag, TypeProfile(true), TypeProfile(declared)))


def theorem5_frame() -> Frame:
    """Dependency frame with each agent restricted to her types from the instances."""
    v, dag = _dependent_pair()
    return Frame(v, dag, 2, ((THETA_1, THETA_1_PRIME, THETA_1_DOUBLE), (THETA_2, THETA_2_PRIME)))


def theorem3(x: float) -> Scenario:
    """Two tasks, each completable only by its own agent; only both together are worth ``x``."""
    if not x > 0:
        raise FTMDError(f"x must be > 0 (got {x})")
    v = CombinatorialValuation.from_function(2, lambda mu: x if all(mu) else 0.0)
    agents = TypeProfile((AgentType((0, 0), (1, 0)), AgentType((0, 0), (0, 1))))
    return require_valid(Scenario(v, DependencyDag.empty(2), agents))


def parallel_links(n: int, value: float, seed: int) -> Scenario:
    """One link from S to T offered by ``n`` agents with random cost and reliability."""
    if n < 2:
        raise FTMDError(f"n must be >= 2 (got {n})")
    if not value > 0:
        raise FTMDError(f"value must be > 0 (got {value})")
    rng = random.Random(seed)
    agents = tuple(AgentType((round(rng.uniform(0, value / 2), 2),), (round(rng.uniform(0.5, 1.0), 2),))
                   for _ in range(n))
    return require_valid(Scenario(AdditiveValuation((value,)), DependencyDag.empty(1), TypeProfile(agents)))


def chain(k: int, seed: int) -> Scenario:
    """``k`` links in series (task ``j`` requires ``j - 1``), agent ``j`` able to carry link ``j`` only."""
    if k < 2:
        raise FTMDError(f"k must be >= 2 (got {k})")
    rng = random.Random(seed)
    values = [float(rng.randint(0, 3)) for _ in range(k - 1)] + [float(rng.randint(10, 20))]
    agents = []
    for j in range(k):
        cost = [0.0] * k
        prob = [0.0] * k
        cost[j] = float(rng.randint(1, 3))
        prob[j] = rng.choice((0.5, 0.75, 0.9, 1.0))
        agents.append(AgentType(tuple(cost), tuple(prob)))
    dag = DependencyDag.from_edges(k, [(j, j - 1) for j in range(2, k + 1)])
    return require_valid(Scenario(AdditiveValuation(tuple(values)), dag, TypeProfile(tuple(agents))))


def generate(name: str, **params) -> Scenario:
    """Dispatch by generator name: table1, theorem3, theorem5, parallel-links, chain."""
    key = name.lower().replace("_", "-")
    if key == "table1":
        return table1()
    if key == "theorem3":
        return theorem3(params.get("x", 10.0))
    if key == "theorem5":
        return theorem5(params.get("instance", 1))
    if key == "parallel-links":
        return parallel_links(params.get("n", 3), params.get("value", 100.0), params.get("seed", 0))
    if key == "chain":
        return chain(params.get("k", 3), params.get("seed", 0))
    raise FTMDError(f"unknown generator {name!r}")

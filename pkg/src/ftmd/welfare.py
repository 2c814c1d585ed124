"""Completion distributions and (expected) welfare of an assignment."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .model import (
    DUMMY,
    EPSILON,
    MAX_COMBINATORIAL_TASKS,
    AdditiveValuation,
    AgentType,
    Assignment,
    CompletionVector,
    DependencyDag,
    EnumerationLimitError,
    ExecutionOutcome,
    FTMDError,
    TypeProfile,
    Valuation,
)


@dataclass(frozen=True)
class CompletionDistribution:
    """Exact distribution over completion vectors, zero-probability vectors omitted."""

    support: tuple[tuple[CompletionVector, float], ...]

    def __iter__(self) -> Iterator[tuple[CompletionVector, float]]:
        return iter(self.support)

    def __len__(self):
        return len(self.support)

    def as_dict(self) -> dict[CompletionVector, float]:
        return dict(self.support)

    def total(self) -> float:
        return math.fsum(p for _, p in self.support)


@lru_cache(maxsize=1 << 16)
def completion_support(owners: tuple[int, ...], probs: tuple[float, ...],
                       dag: DependencyDag) -> tuple[tuple[CompletionVector, float, frozenset[int]], ...]:
    """``(mu, probability, attempted tasks)`` for every reachable completion vector.

    ``probs[j - 1]`` is the success probability of task ``j``'s owner on it.
    """
    t = len(owners)
    if t > MAX_COMBINATORIAL_TASKS:
        raise EnumerationLimitError(f"cannot enumerate completion vectors for t={t} > {MAX_COMBINATORIAL_TASKS}")
    branches: list[tuple[list[int], float, frozenset[int]]] = [([0] * t, 1.0, frozenset())]
    for j in dag.topological_order:
        owner = owners[j - 1]
        p = probs[j - 1]
        pre = dag.prereqs[j - 1]
        nxt = []
        for mu, q, tried in branches:
            if owner == DUMMY or not all(mu[k - 1] for k in pre):
                nxt.append((mu, q, tried))
                continue
            tried = tried | {j}
            if p > 0.0:
                done = mu.copy()
                done[j - 1] = 1
                nxt.append((done, q * p, tried))
            if p < 1.0:
                nxt.append((mu, q * (1.0 - p), tried))
        branches = nxt
    return tuple(sorted((tuple(mu), q, tried) for mu, q, tried in branches))


def completion_distribution(a: Assignment, profile: TypeProfile, dag: DependencyDag) -> CompletionDistribution:
    """Distribution of the completion vector when ``a`` is executed by agents of ``profile``.

    Tasks are visited in topological order; a task is attempted only when all of
    its prerequisites completed, and then succeeds with its owner's probability.
    Zero-probability vectors are left out.
    """
    probs = tuple(profile.prob(o, j) for j, o in enumerate(a.owners, 1))
    return CompletionDistribution(tuple((mu, q) for mu, q, _ in completion_support(a.owners, probs, dag)))


@lru_cache(maxsize=1 << 12)
def feasible_outcomes(a: Assignment, dag: DependencyDag) -> tuple[ExecutionOutcome, ...]:
    """Every outcome that some choice of true probabilities could produce."""
    half = tuple(0.0 if o == DUMMY else 0.5 for o in a.owners)
    return tuple(ExecutionOutcome(mu, tried) for mu, _, tried in completion_support(a.owners, half, dag))


def realized_welfare(a: Assignment, costs: TypeProfile, outcome: ExecutionOutcome, v: Valuation) -> float:
    """Value of completed tasks minus the costs of tasks actually attempted."""
    spent = sum(costs.cost(a.owner(j), j) for j in outcome.attempted)
    return v(outcome.completed) - spent


def _additive_expected_welfare(a: Assignment, profile: TypeProfile, v: AdditiveValuation,
                               dag: DependencyDag) -> float:
    p = [profile.prob(o, j) for j, o in enumerate(a.owners, 1)]
    total = 0.0
    for j, o in enumerate(a.owners, 1):
        if o == DUMMY:
            continue
        reach = 1.0
        for k in dag.ancestors(j):
            reach *= p[k - 1]
        total += v.values[j - 1] * reach * p[j - 1] - profile.cost(o, j) * reach
    return total


def _enumerated_expected_welfare(a: Assignment, profile: TypeProfile, v: Valuation,
                                 dag: DependencyDag) -> float:
    probs = tuple(profile.prob(o, j) for j, o in enumerate(a.owners, 1))
    total = 0.0
    for mu, q, tried in completion_support(a.owners, probs, dag):
        total += q * realized_welfare(a, profile, ExecutionOutcome(mu, tried), v)
    return total


def expected_welfare(a: Assignment, profile: TypeProfile, v: Valuation, dag: DependencyDag,
                     method: str = "auto") -> float:
    """Expected welfare of ``a`` when tasks are executed with the probabilities of ``profile``.

    ``method="auto"`` uses the closed form for additive valuations and full
    enumeration otherwise; ``method="enumerate"`` always enumerates.
    """
    if method not in ("auto", "enumerate"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and isinstance(v, AdditiveValuation):
        return _additive_expected_welfare(a, profile, v, dag)
    return _enumerated_expected_welfare(a, profile, v, dag)


def substitute_completion(i: int, a: Assignment, profile: TypeProfile, mu_i: Sequence[int]) -> TypeProfile:
    """Replace agent ``i``'s probabilities by the bits of ``mu_i`` and her costs by zero."""
    if len(mu_i) != a.t:
        raise FTMDError(f"mu_i has length {len(mu_i)}, expected {a.t}")
    for j, bit in enumerate(mu_i, 1):
        if bit and a.owner(j) != i:
            raise FTMDError(f"mu_i marks task {j}, which is not assigned to agent {i}")
    return profile.replace(i, AgentType((0.0,) * a.t, tuple(1.0 if b else 0.0 for b in mu_i)))


def own_completion(i: int, a: Assignment, mu: Sequence[int]) -> CompletionVector:
    """Agent ``i``'s completion vector: 1 exactly for her completed tasks."""
    return tuple(1 if (b and o == i) else 0 for b, o in zip(mu, a.owners))


def expected_welfare_others(i: int, a: Assignment, declared: TypeProfile, v: Valuation,
                            dag: DependencyDag, mu_i: Sequence[int]) -> float:
    """Expected welfare of everyone but agent ``i`` given that she completed exactly ``mu_i``."""
    return expected_welfare(a, substitute_completion(i, a, declared, mu_i), v, dag)


def realized_welfare_others(i: int, a: Assignment, declared: TypeProfile, outcome: ExecutionOutcome,
                            v: Valuation) -> float:
    """``V(mu)`` minus the declared costs of tasks other agents attempted."""
    spent = sum(declared.cost(a.owner(j), j) for j in outcome.attempted if a.owner(j) != i)
    return v(outcome.completed) - spent


def is_distribution(dist: CompletionDistribution) -> bool:
    return abs(dist.total() - 1.0) <= EPSILON and all(q >= 0 for _, q in dist)

"""Exact maximization of declared expected welfare over task assignments.

Ties are broken towards the lexicographically smallest owner vector (dummy
agent 0 first) among all assignments within ``EPSILON`` of the optimum.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .model import (
    DUMMY,
    EPSILON,
    AdditiveValuation,
    Assignment,
    DependencyDag,
    EnumerationLimitError,
    TypeProfile,
    Valuation,
)
from .welfare import expected_welfare

MAX_ASSIGNMENTS = 10 ** 7
# below this many leaves plain enumeration is cheaper than bounding
_PRUNE_THRESHOLD = 64


@dataclass(frozen=True)
class AllocationResult:
    assignment: Assignment
    welfare: float


def _candidates(n: int, exclude: frozenset[int]) -> tuple[int, ...]:
    return tuple(k for k in range(n + 1) if k not in exclude or k == DUMMY)


def _check_budget(n: int, t: int) -> None:
    if (n + 1) ** t > MAX_ASSIGNMENTS:
        raise EnumerationLimitError(f"(n+1)^t = {n + 1}^{t} exceeds the budget of {MAX_ASSIGNMENTS} assignments")


def _select(scored: list[tuple[tuple[int, ...], float]]) -> AllocationResult:
    best = max(w for _, w in scored)
    for owners, w in scored:
        if w >= best - EPSILON:
            return AllocationResult(Assignment(owners), w)
    raise AssertionError("unreachable")


def _plain(declared: TypeProfile, v: Valuation, dag: DependencyDag, agents: tuple[int, ...]) -> AllocationResult:
    scored = [(owners, expected_welfare(Assignment(owners), declared, v, dag))
              for owners in product(agents, repeat=v.t)]
    return _select(scored)


class _Bounder:
    """Upper bounds for partial assignments under an additive valuation."""

    def __init__(self, declared: TypeProfile, v: AdditiveValuation, dag: DependencyDag, agents: tuple[int, ...]):
        t = v.t
        self.v = v
        self.declared = declared
        self.dag = dag
        self.agents = agents
        # a task's term never exceeds its best stand-alone surplus (reach <= 1)
        self.optimistic = [
            max(max(0.0, v.values[j - 1] * declared.prob(k, j) - declared.cost(k, j)) for k in agents)
            for j in range(1, t + 1)]
        # depth (number of leading tasks fixed) at which task j's term is determined
        self.ready_at = [max(dag.ancestors(j) | {j}) for j in range(1, t + 1)]

    def term(self, owners: list[int], j: int) -> float:
        o = owners[j - 1]
        if o == DUMMY:
            return 0.0
        reach = 1.0
        for k in self.dag.ancestors(j):
            reach *= self.declared.prob(owners[k - 1], k)
        return self.v.values[j - 1] * reach * self.declared.prob(o, j) - self.declared.cost(o, j) * reach

    def bound(self, owners: list[int], depth: int) -> float:
        total = 0.0
        for j in range(1, self.v.t + 1):
            if self.ready_at[j - 1] <= depth:
                total += self.term(owners, j)
            else:
                total += self.optimistic[j - 1]
        return total


def _branch_and_bound(declared: TypeProfile, v: AdditiveValuation, dag: DependencyDag,
                      agents: tuple[int, ...]) -> AllocationResult:
    t = v.t
    bounder = _Bounder(declared, v, dag, agents)
    owners = [DUMMY] * t

    def leaf() -> float:
        return expected_welfare(Assignment(tuple(owners)), declared, v, dag)

    slack = 1e-12
    best = -float("inf")

    def maximize(depth: int) -> None:
        nonlocal best
        if depth == t:
            best = max(best, leaf())
            return
        for k in agents:
            owners[depth] = k
            if bounder.bound(owners, depth + 1) + slack * (1 + abs(best)) >= best:
                maximize(depth + 1)
        owners[depth] = DUMMY

    maximize(0)
    target = best - EPSILON

    def first(depth: int) -> AllocationResult | None:
        if depth == t:
            w = leaf()
            return AllocationResult(Assignment(tuple(owners)), w) if w >= target else None
        for k in agents:
            owners[depth] = k
            if bounder.bound(owners, depth + 1) + slack * (1 + abs(target)) >= target:
                found = first(depth + 1)
                if found is not None:
                    return found
        owners[depth] = DUMMY
        return None

    result = first(0)
    assert result is not None
    return result


@lru_cache(maxsize=1 << 18)
def _optimal(declared: TypeProfile, v: Valuation, dag: DependencyDag, exclude: frozenset[int],
             prune: bool | None) -> AllocationResult:
    _check_budget(declared.n, v.t)
    agents = _candidates(declared.n, exclude)
    if prune is None:
        prune = isinstance(v, AdditiveValuation) and len(agents) ** v.t > _PRUNE_THRESHOLD
    if prune:
        if not isinstance(v, AdditiveValuation):
            raise ValueError("branch-and-bound pruning requires an additive valuation")
        return _branch_and_bound(declared, v, dag, agents)
    return _plain(declared, v, dag, agents)


def optimal_assignment(declared: TypeProfile, v: Valuation, dag: DependencyDag,
                       exclude: frozenset[int] | set[int] = frozenset(),
                       prune: bool | None = None) -> AllocationResult:
    """Assignment maximizing declared expected welfare, agents in ``exclude`` left out.

    ``prune`` forces (True) or disables (False) branch-and-bound; by default it
    is used for additive valuations with many candidate assignments.
    """
    return _optimal(declared, v, dag, frozenset(exclude), prune)


def optimal_welfare_excluding(i: int, declared: TypeProfile, v: Valuation, dag: DependencyDag) -> float:
    """Best declared expected welfare when no task may go to agent ``i``."""
    return _optimal(declared, v, dag, frozenset((i,)), None).welfare


def clear_cache() -> None:
    _optimal.cache_clear()

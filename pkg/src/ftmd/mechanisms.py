"""Assignment and payment rules of the four mechanisms.

* ``SINGLE_TASK``: one task, the winner is paid ``V - W*_{-i}`` on success and
  ``-W*_{-i}`` on failure.
* ``MULTIPLE_TASK``: each assigned agent is paid the expected welfare of the
  others given her own completion vector, minus ``W*_{-i}``.
* ``EQUILIBRIUM``: like ``MULTIPLE_TASK`` but the first term is the others'
  realized welfare.
* ``NAIVE_GVA``: the straightforward Vickrey-style rule for zero-cost single
  tasks, paid ``(p_hat_winner - p_hat_second) * V`` regardless of the outcome.
  It is not incentive compatible and exists to be falsified.

``W*_{-i}`` is the optimal declared expected welfare without agent ``i``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

from .allocator import AllocationResult, optimal_assignment, optimal_welfare_excluding
from .model import (
    DUMMY,
    EPSILON,
    AgentType,
    Assignment,
    DependencyDag,
    ExecutionOutcome,
    FTMDError,
    Scenario,
    TypeProfile,
    Valuation,
)
from .welfare import (
    completion_support,
    expected_welfare_others,
    feasible_outcomes,
    own_completion,
    realized_welfare_others,
)


class MechanismKind(enum.Enum):
    SINGLE_TASK = "single"
    MULTIPLE_TASK = "multi"
    EQUILIBRIUM = "equilibrium"
    NAIVE_GVA = "naive-gva"

    @classmethod
    def parse(cls, name: str) -> "MechanismKind":
        try:
            return cls(name)
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown mechanism {name!r} (choose from {choices})") from None


class MechanismPreconditionError(FTMDError):
    pass


class InconsistentOutcomeError(FTMDError):
    pass


@dataclass(frozen=True)
class MechanismOutcome:
    assignment: Assignment
    outcome: ExecutionOutcome
    payments: dict[int, float]
    agent_utilities: dict[int, float]
    center_utility: float


def own_declaration_matters(kind: MechanismKind) -> bool:
    """Whether an agent's payment depends on her declaration beyond the assignment it induces."""
    return kind is MechanismKind.NAIVE_GVA


def check_preconditions(kind: MechanismKind, v: Valuation, *profiles: TypeProfile) -> None:
    if kind in (MechanismKind.SINGLE_TASK, MechanismKind.NAIVE_GVA) and v.t != 1:
        raise MechanismPreconditionError(f"{kind.value} mechanism requires exactly one task (t={v.t})")
    if kind is MechanismKind.NAIVE_GVA:
        for profile in profiles:
            if any(c != 0.0 for ty in profile for c in ty.cost):
                raise MechanismPreconditionError("naive-gva mechanism requires all costs to be zero")


def _naive_gva(declared: TypeProfile) -> AllocationResult:
    best, winner = 0.0, DUMMY
    for i in declared.agents():
        if declared.prob(i, 1) > best + EPSILON:
            best, winner = declared.prob(i, 1), i
    return AllocationResult(Assignment((winner,)), best)


@lru_cache(maxsize=1 << 18)
def _allocate(kind: MechanismKind, declared: TypeProfile, v: Valuation, dag: DependencyDag) -> AllocationResult:
    check_preconditions(kind, v, declared)
    if kind is MechanismKind.NAIVE_GVA:
        r = _naive_gva(declared)
        return AllocationResult(r.assignment, r.welfare * v.values[0])
    return optimal_assignment(declared, v, dag)


def assign(kind: MechanismKind, s: Scenario) -> AllocationResult:
    """Allocation chosen by ``kind`` from the declared types of ``s``."""
    check_preconditions(kind, s.valuation, s.true_types)
    return _allocate(kind, s.declared_types, s.valuation, s.dag)


def _second_probability(declared: TypeProfile, i: int) -> float:
    return max([0.0] + [declared.prob(k, 1) for k in declared.agents() if k != i])


def agent_payment(kind: MechanismKind, i: int, declared: TypeProfile, v: Valuation, dag: DependencyDag,
                  a: Assignment, outcome: ExecutionOutcome) -> float:
    """Payment to agent ``i`` (exactly 0 when she holds no task)."""
    if i == DUMMY or i not in a.owners:
        return 0.0
    if kind is MechanismKind.NAIVE_GVA:
        return (declared.prob(i, 1) - _second_probability(declared, i)) * v.values[0]
    without_i = optimal_welfare_excluding(i, declared, v, dag)
    if kind is MechanismKind.SINGLE_TASK:
        return (v((1,)) if outcome.completed[0] else 0.0) - without_i
    if kind is MechanismKind.MULTIPLE_TASK:
        # a task never attempted counts as not completed
        mu_i = own_completion(i, a, outcome.completed)
        return expected_welfare_others(i, a, declared, v, dag, mu_i) - without_i
    return realized_welfare_others(i, a, declared, outcome, v) - without_i


def check_outcome(a: Assignment, dag: DependencyDag, outcome: ExecutionOutcome) -> None:
    problems = outcome.problems(a, dag)
    if problems:
        raise InconsistentOutcomeError("; ".join(problems))


def payments(kind: MechanismKind, s: Scenario, a: Assignment, outcome: ExecutionOutcome) -> dict[int, float]:
    """Payments to the dummy agent and agents ``1..n`` for one realized outcome."""
    check_preconditions(kind, s.valuation, s.true_types, s.declared_types)
    check_outcome(a, s.dag, outcome)
    return {i: agent_payment(kind, i, s.declared_types, s.valuation, s.dag, a, outcome)
            for i in range(s.n + 1)}


def attempted_cost(i: int, a: Assignment, costs: TypeProfile, outcome: ExecutionOutcome) -> float:
    return sum(costs.cost(i, j) for j in outcome.attempted if a.owner(j) == i)


def run(kind: MechanismKind, s: Scenario, outcome: ExecutionOutcome) -> MechanismOutcome:
    """Assign, observe ``outcome``, pay; utilities are charged true costs of attempted tasks."""
    a = assign(kind, s).assignment
    pay = payments(kind, s, a, outcome)
    utilities = {i: pay[i] - attempted_cost(i, a, s.true_types, outcome) for i in pay}
    center = s.valuation(outcome.completed) - sum(pay.values())
    return MechanismOutcome(a, outcome, pay, utilities, center)


def _masked(kind: MechanismKind, i: int, declared: TypeProfile) -> TypeProfile:
    if own_declaration_matters(kind):
        return declared
    return declared.replace(i, AgentType.zero(declared.t))


@lru_cache(maxsize=1 << 18)
def _schedule(kind: MechanismKind, i: int, a: Assignment, declared: TypeProfile, v: Valuation,
              dag: DependencyDag) -> dict[tuple[int, ...], float]:
    return {o.completed: agent_payment(kind, i, declared, v, dag, a, o) for o in feasible_outcomes(a, dag)}


def payment_schedule(kind: MechanismKind, i: int, declared: TypeProfile, v: Valuation,
                     dag: DependencyDag) -> tuple[Assignment, dict[tuple[int, ...], float]]:
    """Agent ``i``'s payment for every feasible completion vector of the chosen assignment.

    Apart from the naive rule, a payment depends on the agent's own declaration
    only through the assignment, so schedules are shared across declarations.
    """
    a = _allocate(kind, declared, v, dag).assignment
    return a, _schedule(kind, i, a, _masked(kind, i, declared), v, dag)


def expected_utility_from_schedule(i: int, a: Assignment, schedule: dict[tuple[int, ...], float],
                                   true_profile: TypeProfile, dag: DependencyDag) -> float:
    probs = tuple(true_profile.prob(o, j) for j, o in enumerate(a.owners, 1))
    costs = true_profile[i].cost
    total = 0.0
    for mu, q, attempted in completion_support(a.owners, probs, dag):
        spent = sum(costs[j - 1] for j in attempted if a.owners[j - 1] == i)
        total += q * (schedule[mu] - spent)
    return total


def expected_utility(kind: MechanismKind, i: int, true_type: AgentType, declarations: TypeProfile,
                     v: Valuation, dag: DependencyDag, true_others: TypeProfile | None = None) -> float:
    """Exact expected utility of agent ``i`` with type ``true_type`` under ``declarations``.

    Outcomes are drawn from the true probabilities: ``true_type`` for agent
    ``i`` and ``true_others`` (default: the declarations) for everyone else.
    """
    check_preconditions(kind, v, declarations)
    a, schedule = payment_schedule(kind, i, declarations, v, dag)
    base = declarations if true_others is None else true_others
    return expected_utility_from_schedule(i, a, schedule, base.replace(i, true_type), dag)

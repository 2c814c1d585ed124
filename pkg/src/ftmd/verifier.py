"""Exhaustive property checks over discretized type spaces.

A passing check means no violation was found at the resolution of the grid,
not that the property holds for the continuous type space.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Sequence

from . import mechanisms
from .mechanisms import MechanismKind, expected_utility_from_schedule, payment_schedule
from .model import (
    DUMMY,
    EPSILON,
    AgentType,
    Assignment,
    DependencyDag,
    EnumerationLimitError,
    ExecutionOutcome,
    Scenario,
    TypeProfile,
    Valuation,
)
from .welfare import expected_welfare, feasible_outcomes

MAX_POINTS = 10 ** 6
MAX_ORACLE_TASKS = 10


class Property(enum.Enum):
    IC_DOMINANT = "ic"
    IC_EQUILIBRIUM = "ic-equilibrium"
    IR = "ir"
    IR_EQUILIBRIUM = "ir-equilibrium"
    CR = "cr"
    SE = "se"
    NFR = "nfr"


@dataclass(frozen=True)
class TypeGrid:
    """Per-task probability and cost levels; agent types are all combinations over tasks."""

    prob_levels: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    cost_levels: tuple[float, ...] = (0.0, 1.0, 2.0, 5.0)

    def __post_init__(self):
        probs = tuple(float(p) for p in self.prob_levels)
        costs = tuple(float(c) for c in self.cost_levels)
        for name, levels in (("prob_levels", probs), ("cost_levels", costs)):
            if not levels:
                raise ValueError(f"{name} must be nonempty")
            if len(set(levels)) != len(levels):
                raise ValueError(f"{name} contains duplicates")
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("probability levels must lie in [0, 1]")
        if any(not math.isfinite(c) or c < 0 for c in costs):
            raise ValueError("cost levels must be finite and >= 0")
        object.__setattr__(self, "prob_levels", tuple(sorted(probs)))
        object.__setattr__(self, "cost_levels", tuple(sorted(costs)))

    def types(self, t: int) -> tuple[AgentType, ...]:
        """All agent types, ordered lexicographically by ``(p_1, c_1, ..., p_t, c_t)``."""
        per_task = list(product(self.prob_levels, self.cost_levels))
        return tuple(AgentType(tuple(c for _, c in combo), tuple(p for p, _ in combo))
                     for combo in product(per_task, repeat=t))

    def describe(self) -> str:
        fmt = lambda xs: ",".join(f"{x:g}" for x in xs)
        return f"p in {{{fmt(self.prob_levels)}}}, c in {{{fmt(self.cost_levels)}}}"


@dataclass(frozen=True)
class Frame:
    """A scenario without types: valuation, dependencies and number of agents.

    ``type_spaces`` optionally pins agent ``k``'s candidate types to
    ``type_spaces[k - 1]`` instead of the grid.
    """

    valuation: Valuation
    dag: DependencyDag
    n: int
    type_spaces: tuple[tuple[AgentType, ...], ...] | None = None

    @property
    def t(self) -> int:
        return self.valuation.t

    @classmethod
    def from_scenario(cls, s: Scenario) -> "Frame":
        return cls(s.valuation, s.dag, s.n)

    def spaces(self, grid: TypeGrid) -> list[tuple[AgentType, ...]]:
        if self.type_spaces is not None:
            return [tuple(sp) for sp in self.type_spaces]
        return [grid.types(self.t)] * self.n


@dataclass(frozen=True)
class Counterexample:
    """A concrete violation; ``scenario`` carries the true types and the declarations that were used."""

    prop: Property
    scenario: Scenario
    agent: int
    true_type: AgentType | None = None
    deviation: AgentType | None = None
    truthful_utility: float | None = None
    deviant_utility: float | None = None
    outcome: ExecutionOutcome | None = None
    value: float | None = None

    @property
    def gain(self) -> float | None:
        if self.truthful_utility is None or self.deviant_utility is None:
            return None
        return self.deviant_utility - self.truthful_utility


@dataclass(frozen=True)
class PropertyCheck:
    prop: Property
    kind: MechanismKind
    passed: bool
    points: int
    resolution: str
    counterexample: Counterexample | None = None

    @property
    def result(self) -> str:
        return "pass" if self.passed else "fail"

    def summary(self) -> str:
        if self.passed:
            return (f"{self.prop.value}: pass ({self.kind.value}; no violation found at resolution "
                    f"{self.resolution}; {self.points} points)")
        return f"{self.prop.value}: FAIL ({self.kind.value}; {describe_counterexample(self.counterexample)})"


def _fmt_type(ty: AgentType) -> str:
    return "c=(" + ", ".join(f"{c:g}" for c in ty.cost) + ") p=(" + ", ".join(f"{p:g}" for p in ty.prob) + ")"


def describe_counterexample(cx: Counterexample | None) -> str:
    if cx is None:
        return "no counterexample"
    parts = [f"agent {cx.agent}"]
    if cx.true_type is not None:
        parts.append(f"true {_fmt_type(cx.true_type)}")
    if cx.deviation is not None:
        parts.append(f"declares {_fmt_type(cx.deviation)}")
    if cx.truthful_utility is not None:
        parts.append(f"truthful utility {cx.truthful_utility:.12g}")
    if cx.deviant_utility is not None:
        parts.append(f"deviant utility {cx.deviant_utility:.12g}")
    if cx.outcome is not None:
        parts.append("outcome mu=(" + ",".join(map(str, cx.outcome.completed)) + ")")
    if cx.value is not None:
        parts.append(f"value {cx.value:.12g}")
    return ", ".join(parts)


def _profile(i: int, theta_i: AgentType, others: Sequence[int], opp: Sequence[AgentType]) -> TypeProfile:
    types = [None] * (len(others) + 1)
    types[i - 1] = theta_i
    for k, ty in zip(others, opp):
        types[k - 1] = ty
    return TypeProfile(tuple(types))


def opponents_truth_matters(kind: MechanismKind, frame: Frame) -> bool:
    """Whether agent ``i``'s expected utility can depend on the others' true types.

    Without dependencies, the single and multiple task payments depend only on
    the agent's own completions and the naive rule on no completion at all.
    """
    return frame.dag.has_edges or kind is MechanismKind.EQUILIBRIUM


def _count(spaces: list[tuple[AgentType, ...]], sweep_truth: bool, equilibrium: bool) -> int:
    total = 0
    for i in range(len(spaces)):
        others = math.prod(len(sp) for k, sp in enumerate(spaces) if k != i)
        total += len(spaces[i]) * others * (others if sweep_truth and not equilibrium else 1)
    return total


def _budget(points: int, max_points: int) -> None:
    if points > max_points:
        raise EnumerationLimitError(f"sweep needs {points} points, budget is {max_points}")


@dataclass
class _Point:
    agent: int
    opp_decl: tuple[AgentType, ...]
    opp_true: tuple[AgentType, ...]
    true_type: AgentType
    truthful: float
    best: float = 0.0
    best_deviation: AgentType | None = None


def _agent_sweep(kind: MechanismKind, frame: Frame, spaces: list[tuple[AgentType, ...]],
                 equilibrium: bool, deviations: bool, epsilon: float) -> Iterator[_Point]:
    v, dag = frame.valuation, frame.dag
    sweep_truth = opponents_truth_matters(kind, frame) and not equilibrium
    matters = mechanisms.own_declaration_matters(kind)
    for i in range(1, frame.n + 1):
        others = [k for k in range(1, frame.n + 1) if k != i]
        own_space = spaces[i - 1]
        for opp_decl in product(*(spaces[k - 1] for k in others)):
            # deviations that induce the same payment rule share one schedule
            key_of: list[object] = []
            schedules: dict[object, tuple[Assignment, dict, int]] = {}
            for idx, theta in enumerate(own_space):
                declared = _profile(i, theta, others, opp_decl)
                a, table = payment_schedule(kind, i, declared, v, dag)
                key = (a, theta if matters else None)
                key_of.append(key)
                if key not in schedules:
                    schedules[key] = (a, table, idx)
            truths = product(*(spaces[k - 1] for k in others)) if sweep_truth else [opp_decl]
            for opp_true in truths:
                for idx, theta in enumerate(own_space):
                    true_profile = _profile(i, theta, others, opp_true)
                    a, table, _ = schedules[key_of[idx]]
                    truthful = expected_utility_from_schedule(i, a, table, true_profile, dag)
                    point = _Point(i, opp_decl, tuple(opp_true), theta, truthful, truthful)
                    if deviations and len(schedules) > 1:
                        found = [(expected_utility_from_schedule(i, a2, t2, true_profile, dag), first)
                                 for key, (a2, t2, first) in schedules.items() if key != key_of[idx]]
                        top = max(u for u, _ in found)
                        if top > truthful + epsilon:
                            first = min(f for u, f in found if u >= top - epsilon)
                            point.best = top
                            point.best_deviation = own_space[first]
                    yield point


def _ic_or_ir(prop: Property, kind: MechanismKind, frame: Frame, grid: TypeGrid, epsilon: float,
              max_points: int) -> PropertyCheck:
    equilibrium = prop in (Property.IC_EQUILIBRIUM, Property.IR_EQUILIBRIUM)
    is_ic = prop in (Property.IC_DOMINANT, Property.IC_EQUILIBRIUM)
    spaces = frame.spaces(grid)
    points = _count(spaces, opponents_truth_matters(kind, frame), equilibrium)
    _budget(points, max_points)
    for pt in _agent_sweep(kind, frame, spaces, equilibrium, is_ic, epsilon):
        violated = pt.best_deviation is not None if is_ic else pt.truthful < -epsilon
        if violated:
            others = [k for k in range(1, frame.n + 1) if k != pt.agent]
            truth = _profile(pt.agent, pt.true_type, others, pt.opp_true)
            declared_type = pt.best_deviation if is_ic else pt.true_type
            declared = _profile(pt.agent, declared_type, others, pt.opp_decl)
            cx = Counterexample(
                prop, Scenario(frame.valuation, frame.dag, truth, declared), pt.agent, pt.true_type,
                pt.best_deviation, pt.truthful, pt.best if is_ic else None)
            return PropertyCheck(prop, kind, False, points, grid.describe(), cx)
    return PropertyCheck(prop, kind, True, points, grid.describe())


def check_ic_dominant(kind: MechanismKind, frame: Frame, grid: TypeGrid = TypeGrid(),
                      epsilon: float = EPSILON, max_points: int = MAX_POINTS) -> PropertyCheck:
    """Truthful reporting is a best response to every grid declaration of the others.

    When the others' true types can matter (dependencies, or the realized-welfare
    rule) they are swept independently of their declarations.  At the first
    violating point the most profitable deviation is reported.
    """
    return _ic_or_ir(Property.IC_DOMINANT, kind, frame, grid, epsilon, max_points)


def check_ic_equilibrium(kind: MechanismKind, frame: Frame, grid: TypeGrid = TypeGrid(),
                         epsilon: float = EPSILON, max_points: int = MAX_POINTS) -> PropertyCheck:
    """Truthful reporting is a best response when every other agent is truthful."""
    return _ic_or_ir(Property.IC_EQUILIBRIUM, kind, frame, grid, epsilon, max_points)


def check_ir(kind: MechanismKind, frame: Frame, grid: TypeGrid = TypeGrid(), epsilon: float = EPSILON,
             max_points: int = MAX_POINTS, equilibrium: bool = False) -> PropertyCheck:
    prop = Property.IR_EQUILIBRIUM if equilibrium else Property.IR
    return _ic_or_ir(prop, kind, frame, grid, epsilon, max_points)


def _profiles(frame: Frame, grid: TypeGrid, max_points: int) -> tuple[int, Iterator[TypeProfile]]:
    spaces = frame.spaces(grid)
    points = math.prod(len(sp) for sp in spaces)
    _budget(points, max_points)
    return points, (TypeProfile(combo) for combo in product(*spaces))


def check_cr(kind: MechanismKind, frame: Frame, grid: TypeGrid = TypeGrid(), epsilon: float = EPSILON,
             max_points: int = MAX_POINTS) -> PropertyCheck:
    """Center utility is nonnegative for every feasible outcome of every declared profile."""
    v, dag = frame.valuation, frame.dag
    points, profiles = _profiles(frame, grid, max_points)
    for declared in profiles:
        a = mechanisms._allocate(kind, declared, v, dag).assignment
        tables = {i: payment_schedule(kind, i, declared, v, dag)[1] for i in a.assigned_agents()}
        for outcome in feasible_outcomes(a, dag):
            u_m = v(outcome.completed) - sum(tab[outcome.completed] for tab in tables.values())
            if u_m < -epsilon:
                cx = Counterexample(Property.CR, Scenario(v, dag, declared), DUMMY, outcome=outcome, value=u_m)
                return PropertyCheck(Property.CR, kind, False, points, grid.describe(), cx)
    return PropertyCheck(Property.CR, kind, True, points, grid.describe())


def brute_force_welfare(profile: TypeProfile, v: Valuation, dag: DependencyDag) -> float:
    return max(expected_welfare(Assignment(owners), profile, v, dag)
               for owners in product(range(profile.n + 1), repeat=v.t))


def check_se(kind: MechanismKind, frame: Frame, grid: TypeGrid = TypeGrid(), epsilon: float = EPSILON,
             max_points: int = MAX_POINTS) -> PropertyCheck:
    """With truthful agents the chosen assignment reaches the brute-force welfare optimum."""
    v, dag = frame.valuation, frame.dag
    points, profiles = _profiles(frame, grid, max_points)
    for profile in profiles:
        a = mechanisms._allocate(kind, profile, v, dag).assignment
        achieved = expected_welfare(a, profile, v, dag)
        best = brute_force_welfare(profile, v, dag)
        if achieved < best - epsilon:
            cx = Counterexample(Property.SE, Scenario(v, dag, profile), DUMMY, value=best - achieved)
            return PropertyCheck(Property.SE, kind, False, points, grid.describe(), cx)
    return PropertyCheck(Property.SE, kind, True, points, grid.describe())


def check_nfr(kind: MechanismKind, frame: Frame, grid: TypeGrid = TypeGrid(), epsilon: float = EPSILON,
              max_points: int = MAX_POINTS) -> PropertyCheck:
    """Agents without tasks are paid exactly zero in every feasible outcome (no tolerance)."""
    v, dag = frame.valuation, frame.dag
    points, profiles = _profiles(frame, grid, max_points)
    for declared in profiles:
        a = mechanisms._allocate(kind, declared, v, dag).assignment
        idle = [i for i in declared.agents() if i not in a.owners]
        for outcome in feasible_outcomes(a, dag):
            for i in idle:
                r = mechanisms.agent_payment(kind, i, declared, v, dag, a, outcome)
                if r != 0.0:
                    cx = Counterexample(Property.NFR, Scenario(v, dag, declared), i, outcome=outcome, value=r)
                    return PropertyCheck(Property.NFR, kind, False, points, grid.describe(), cx)
    return PropertyCheck(Property.NFR, kind, True, points, grid.describe())


def check(prop: Property, kind: MechanismKind, frame: Frame, grid: TypeGrid = TypeGrid(),
          epsilon: float = EPSILON, max_points: int = MAX_POINTS) -> PropertyCheck:
    if prop is Property.IC_DOMINANT:
        return check_ic_dominant(kind, frame, grid, epsilon, max_points)
    if prop is Property.IC_EQUILIBRIUM:
        return check_ic_equilibrium(kind, frame, grid, epsilon, max_points)
    if prop in (Property.IR, Property.IR_EQUILIBRIUM):
        return check_ir(kind, frame, grid, epsilon, max_points, equilibrium=prop is Property.IR_EQUILIBRIUM)
    return {Property.CR: check_cr, Property.SE: check_se, Property.NFR: check_nfr}[prop](
        kind, frame, grid, epsilon, max_points)


def brute_force_expected_utility(kind: MechanismKind, i: int, true_type: AgentType, declarations: TypeProfile,
                                 v: Valuation, dag: DependencyDag, true_others: TypeProfile | None = None) -> float:
    """Expected utility by enumerating every success/failure coin of every task.

    Each task gets an independent coin with its owner's true probability; the
    completion vector follows from the coins and the prerequisites, and the
    utility comes from ``mechanisms.run``.
    """
    t = v.t
    if t > MAX_ORACLE_TASKS:
        raise EnumerationLimitError(f"oracle enumerates 2^t coin vectors; t={t} > {MAX_ORACLE_TASKS}")
    truth = (declarations if true_others is None else true_others).replace(i, true_type)
    s = Scenario(v, dag, truth, declarations)
    owners = mechanisms.assign(kind, s).assignment.owners
    total = 0.0
    for coins in product((0, 1), repeat=t):
        weight = 1.0
        for j, (o, coin) in enumerate(zip(owners, coins), 1):
            p = truth.prob(o, j)
            weight *= p if coin else 1.0 - p
        if weight == 0.0:
            continue
        done = [0] * t
        tried = set()
        for j in dag.topological_order:
            if owners[j - 1] != DUMMY and all(done[k - 1] for k in dag.prereqs[j - 1]):
                tried.add(j)
                done[j - 1] = coins[j - 1]
        outcome = ExecutionOutcome(tuple(done), frozenset(tried))
        total += weight * mechanisms.run(kind, s, outcome).agent_utilities[i]
    return total


def recheck(cx: Counterexample, kind: MechanismKind, epsilon: float = EPSILON) -> bool:
    """Independently confirm that ``cx`` still violates its property."""
    s = cx.scenario
    if cx.prop in (Property.IC_DOMINANT, Property.IC_EQUILIBRIUM, Property.IR, Property.IR_EQUILIBRIUM):
        truthful_decl = s.declared_types.replace(cx.agent, cx.true_type)
        truthful = brute_force_expected_utility(kind, cx.agent, cx.true_type, truthful_decl,
                                                s.valuation, s.dag, s.true_types)
        if cx.prop in (Property.IR, Property.IR_EQUILIBRIUM):
            return truthful < -epsilon
        deviant = brute_force_expected_utility(kind, cx.agent, cx.true_type, s.declared_types,
                                               s.valuation, s.dag, s.true_types)
        return deviant > truthful + epsilon
    if cx.prop is Property.CR:
        return mechanisms.run(kind, s, cx.outcome).center_utility < -epsilon
    if cx.prop is Property.NFR:
        return mechanisms.run(kind, s, cx.outcome).payments[cx.agent] != 0.0
    a = mechanisms.assign(kind, s).assignment
    return expected_welfare(a, s.true_types, s.valuation, s.dag) < brute_force_welfare(
        s.true_types, s.valuation, s.dag) - epsilon

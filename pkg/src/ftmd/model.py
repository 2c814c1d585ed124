"""Domain types for allocating tasks to agents whose attempts may fail.

Tasks are numbered ``1..t`` and agents ``1..n``; agent ``0`` is the dummy agent
that holds every unallocated task and never completes anything.  Completion
vectors are tuples of 0/1 ints where position ``j - 1`` describes task ``j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

EPSILON = 1e-9
DUMMY = 0
MAX_COMBINATORIAL_TASKS = 16

CompletionVector = tuple[int, ...]


class FTMDError(Exception):
    """Base class for errors raised by this package."""


class ScenarioError(FTMDError):
    """A scenario failed validation."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class EnumerationLimitError(FTMDError):
    """An exact enumeration would exceed its configured budget."""


class UnknownTaskError(FTMDError, KeyError):
    pass


class CycleError(FTMDError):
    pass


@dataclass(frozen=True)
class AgentType:
    """Private type of one agent: attempt cost and success probability per task."""

    cost: tuple[float, ...]
    prob: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "cost", tuple(float(c) for c in self.cost))
        object.__setattr__(self, "prob", tuple(float(p) for p in self.prob))

    @classmethod
    def zero(cls, t: int) -> "AgentType":
        return cls((0.0,) * t, (0.0,) * t)

    @property
    def t(self) -> int:
        return len(self.cost)

    def problems(self, t: int | None = None) -> list[str]:
        out = []
        if len(self.cost) != len(self.prob):
            out.append(f"length mismatch: {len(self.cost)} costs vs {len(self.prob)} probabilities")
        if t is not None and (len(self.cost) != t or len(self.prob) != t):
            out.append(f"length mismatch: expected {t} entries per list")
        for j, c in enumerate(self.cost, 1):
            if not math.isfinite(c) or c < 0:
                out.append(f"cost for task {j} must be a finite value >= 0 (got {c})")
        for j, p in enumerate(self.prob, 1):
            if not (0.0 <= p <= 1.0):
                out.append(f"probability out of [0,1] for task {j} (got {p})")
        return out


@dataclass(frozen=True)
class TypeProfile:
    """Types of agents ``1..n`` (entry ``k`` of ``types`` is agent ``k + 1``).

    Indexing with ``0`` yields the dummy agent's all-zero type.
    """

    types: tuple[AgentType, ...]

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))

    @property
    def n(self) -> int:
        return len(self.types)

    @property
    def t(self) -> int:
        return self.types[0].t if self.types else 0

    def __getitem__(self, i: int) -> AgentType:
        if i == DUMMY:
            return AgentType.zero(self.t)
        if not 1 <= i <= self.n:
            raise KeyError(f"unknown agent {i}")
        return self.types[i - 1]

    def __iter__(self) -> Iterator[AgentType]:
        return iter(self.types)

    def agents(self) -> range:
        return range(1, self.n + 1)

    def prob(self, i: int, j: int) -> float:
        return 0.0 if i == DUMMY else self.types[i - 1].prob[j - 1]

    def cost(self, i: int, j: int) -> float:
        return 0.0 if i == DUMMY else self.types[i - 1].cost[j - 1]

    def others(self, i: int) -> dict[int, AgentType]:
        """The profile with agent ``i`` omitted, keyed by agent id."""
        return {k: ty for k, ty in enumerate(self.types, 1) if k != i}

    @classmethod
    def combine(cls, i: int, theta_i: AgentType, others: Mapping[int, AgentType]) -> "TypeProfile":
        merged = dict(others)
        merged[i] = theta_i
        ids = sorted(merged)
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError(f"agents must be exactly 1..{len(ids)}, got {ids}")
        return cls(tuple(merged[k] for k in ids))

    def replace(self, i: int, theta_i: AgentType) -> "TypeProfile":
        types = list(self.types)
        types[i - 1] = theta_i
        return TypeProfile(tuple(types))


@dataclass(frozen=True)
class AdditiveValuation:
    """Center's value is the sum of per-task values of completed tasks."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def t(self) -> int:
        return len(self.values)

    def __call__(self, mu: Sequence[int]) -> float:
        return sum(v for v, bit in zip(self.values, mu) if bit)

    def problems(self) -> list[str]:
        out = []
        for j, v in enumerate(self.values, 1):
            if not math.isfinite(v) or v < 0:
                out.append(f"value of task {j} must be a finite value >= 0 (got {v})")
        return out


def bitstring(mu: Sequence[int]) -> str:
    """Fixed-width key with task 1 leftmost."""
    return "".join("1" if b else "0" for b in mu)


def all_vectors(t: int) -> Iterator[CompletionVector]:
    return product((0, 1), repeat=t)


def _index(mu: Sequence[int]) -> int:
    idx = 0
    for b in mu:
        idx = (idx << 1) | (1 if b else 0)
    return idx


@dataclass(frozen=True, eq=False)
class CombinatorialValuation:
    """Explicit value for each of the ``2**t`` completion vectors.

    ``table[k]`` is the value of the vector whose bitstring (task 1 leftmost)
    is ``k`` written in binary.
    """

    t: int
    table: tuple[float, ...]

    def __post_init__(self):
        if self.t > MAX_COMBINATORIAL_TASKS:
            raise EnumerationLimitError(
                f"combinatorial valuations support at most {MAX_COMBINATORIAL_TASKS} tasks (got {self.t})")
        table = tuple(float(v) for v in self.table)
        if len(table) != 2 ** self.t:
            raise ValueError(f"value table needs {2 ** self.t} entries, got {len(table)}")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_function(cls, t: int, fn) -> "CombinatorialValuation":
        return cls(t, tuple(fn(mu) for mu in all_vectors(t)))

    @classmethod
    def from_mapping(cls, t: int, values: Mapping[str, float]) -> "CombinatorialValuation":
        table = [0.0] * (2 ** t)
        for key, v in values.items():
            table[int(key, 2)] = v
        return cls(t, tuple(table))

    def __call__(self, mu: Sequence[int]) -> float:
        return self.table[_index(mu)]

    def __eq__(self, other):
        if not isinstance(other, CombinatorialValuation):
            return NotImplemented
        return self.t == other.t and self.table == other.table

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.t, self.table))

    def problems(self) -> list[str]:
        out = []
        if self.table[0] != 0.0:
            out.append("V(0…0) must be 0")
        if any(not math.isfinite(v) or v < 0 for v in self.table):
            out.append("all values must be finite and >= 0")
        # checking single-bit raises suffices for monotonicity
        for k, v in enumerate(self.table):
            for b in range(self.t):
                up = k | (1 << b)
                if up != k and self.table[up] < v - EPSILON:
                    out.append(
                        f"valuation is not monotone: V({format(k, f'0{self.t}b')}) > "
                        f"V({format(up, f'0{self.t}b')})")
                    return out
        return out


Valuation = AdditiveValuation | CombinatorialValuation


@dataclass(frozen=True)
class DependencyDag:
    """Direct prerequisites per task: ``prereqs[j - 1]`` for task ``j``."""

    t: int
    prereqs: tuple[frozenset[int], ...] = ()

    def __post_init__(self):
        pre = tuple(frozenset(p) for p in self.prereqs) or tuple(frozenset() for _ in range(self.t))
        if len(pre) != self.t:
            raise ValueError(f"expected {self.t} prerequisite sets, got {len(pre)}")
        object.__setattr__(self, "prereqs", pre)

    @classmethod
    def empty(cls, t: int) -> "DependencyDag":
        return cls(t)

    @classmethod
    def from_edges(cls, t: int, edges: Iterable[tuple[int, int]]) -> "DependencyDag":
        """Build from ``(task, prerequisite)`` pairs."""
        pre: list[set[int]] = [set() for _ in range(t)]
        for j, k in edges:
            if not 1 <= j <= t:
                raise UnknownTaskError(j)
            pre[j - 1].add(k)
        return cls(t, tuple(frozenset(p) for p in pre))

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(j, k) for j, pre in enumerate(self.prereqs, 1) for k in sorted(pre)]

    @property
    def has_edges(self) -> bool:
        return any(self.prereqs)

    def problems(self) -> list[str]:
        out = []
        for j, pre in enumerate(self.prereqs, 1):
            if j in pre:
                out.append(f"task {j} depends on itself")
            for k in sorted(pre):
                if not 1 <= k <= self.t:
                    out.append(f"task {j} depends on unknown task {k}")
        if not out and self._order() is None:
            out.append("dependency cycle")
        return out

    def _order(self) -> tuple[int, ...] | None:
        done: set[int] = set()
        order = []
        while len(order) < self.t:
            ready = [j for j in range(1, self.t + 1)
                     if j not in done and self.prereqs[j - 1] <= done]
            if not ready:
                return None
            # ascending TaskId among ready tasks, one at a time
            done.add(ready[0])
            order.append(ready[0])
        return tuple(order)

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        order = self._order()
        if order is None:
            raise CycleError("dependency cycle")
        return order

    @cached_property
    def _ancestors(self) -> tuple[frozenset[int], ...]:
        anc: dict[int, frozenset[int]] = {}
        for j in self.topological_order:
            acc = set(self.prereqs[j - 1])
            for k in self.prereqs[j - 1]:
                acc |= anc[k]
            anc[j] = frozenset(acc)
        return tuple(anc[j] for j in range(1, self.t + 1))

    def ancestors(self, j: int) -> frozenset[int]:
        if not 1 <= j <= self.t:
            raise UnknownTaskError(j)
        return self._ancestors[j - 1]


def ancestor_closure(dag: DependencyDag, j: int) -> frozenset[int]:
    """All transitive prerequisites of task ``j`` (excluding ``j``)."""
    return dag.ancestors(j)


@dataclass(frozen=True)
class Assignment:
    """Owner of each task; ``owners[j - 1]`` is the agent holding task ``j``."""

    owners: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "owners", tuple(int(o) for o in self.owners))

    @property
    def t(self) -> int:
        return len(self.owners)

    def owner(self, j: int) -> int:
        return self.owners[j - 1]

    def tasks_of(self, i: int) -> tuple[int, ...]:
        return tuple(j for j, o in enumerate(self.owners, 1) if o == i)

    def assigned_agents(self) -> frozenset[int]:
        return frozenset(o for o in self.owners if o != DUMMY)

    def __str__(self):
        return " ".join(f"{j}->{o}" for j, o in enumerate(self.owners, 1))


@dataclass(frozen=True)
class ExecutionOutcome:
    """One realized run: which tasks were completed and which were attempted."""

    completed: CompletionVector
    attempted: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "completed", tuple(1 if b else 0 for b in self.completed))
        object.__setattr__(self, "attempted", frozenset(self.attempted))

    @classmethod
    def from_completion(cls, a: Assignment, dag: DependencyDag, mu: Sequence[int]) -> "ExecutionOutcome":
        """The unique outcome consistent with ``mu``: owned tasks whose prerequisites all completed."""
        return cls(tuple(mu), attempted_tasks(a, dag, mu))

    def problems(self, a: Assignment, dag: DependencyDag) -> list[str]:
        out = []
        if len(self.completed) != a.t:
            return [f"completion vector has length {len(self.completed)}, expected {a.t}"]
        expected = attempted_tasks(a, dag, self.completed)
        for j in range(1, a.t + 1):
            if self.completed[j - 1] and j not in self.attempted:
                out.append(f"task {j} completed but not attempted")
            if a.owner(j) == DUMMY and self.completed[j - 1]:
                out.append(f"task {j} is held by the dummy agent but completed")
            if (j in self.attempted) != (j in expected):
                why = "prerequisite not completed" if j in self.attempted else "prerequisites completed"
                out.append(f"task {j}: attempted={j in self.attempted} inconsistent ({why})")
        return out


def attempted_tasks(a: Assignment, dag: DependencyDag, mu: Sequence[int]) -> frozenset[int]:
    return frozenset(
        j for j in range(1, a.t + 1)
        if a.owner(j) != DUMMY and all(mu[k - 1] for k in dag.prereqs[j - 1]))


@dataclass(frozen=True)
class Scenario:
    """A full problem instance; ``declared_types`` defaults to the true types."""

    valuation: Valuation
    dag: DependencyDag
    true_types: TypeProfile
    declared_types: TypeProfile = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.declared_types is None:
            object.__setattr__(self, "declared_types", self.true_types)

    @property
    def t(self) -> int:
        return self.valuation.t

    @property
    def n(self) -> int:
        return self.true_types.n

    def with_declared(self, declared: TypeProfile) -> "Scenario":
        return Scenario(self.valuation, self.dag, self.true_types, declared)


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_scenario(s: Scenario) -> ValidationResult:
    """Collect every violated invariant of ``s`` (never raises for bad data)."""
    out: list[str] = []
    t = s.valuation.t
    if t < 1:
        out.append("t ≥ 1 required")
    out.extend(s.valuation.problems())
    if s.dag.t != t:
        out.append(f"dependency graph covers {s.dag.t} tasks, valuation covers {t}")
    out.extend(s.dag.problems())
    for label, profile in (("true", s.true_types), ("declared", s.declared_types)):
        if profile.n < 1:
            out.append(f"n ≥ 1 required ({label} types)")
        for i, ty in enumerate(profile, 1):
            out.extend(f"agent {i} ({label}): {p}" for p in ty.problems(t))
    if s.declared_types.n != s.true_types.n:
        out.append(f"declared types cover {s.declared_types.n} agents, true types {s.true_types.n}")
    # keep order stable, drop repeats
    return ValidationResult(tuple(dict.fromkeys(out)))


def require_valid(s: Scenario) -> Scenario:
    result = validate_scenario(s)
    if not result.ok:
        raise ScenarioError(result.violations)
    return s

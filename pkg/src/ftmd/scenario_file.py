"""JSON scenario documents.

Example::

    {
      "tasks": {"count": 2, "values": [0.0, 5.0]},
      "dependencies": [{"task": 2, "requires": 1}],
      "agents": [
        {"cost": [2.0, 1.0], "prob": [1.0, 1.0]},
        {"cost": [1.0, 0.0], "prob": [0.0, 0.0],
         "declared_cost": [1.0, 0.0], "declared_prob": [1.0, 0.0]}
      ]
    }

A combinatorial valuation replaces ``values`` with ``table``, an object keyed
by fixed-width bitstrings (task 1 leftmost) listing all ``2**count`` vectors.
"""
from __future__ import annotations

import json
import math
from typing import Any

from .model import (
    MAX_COMBINATORIAL_TASKS,
    AdditiveValuation,
    AgentType,
    CombinatorialValuation,
    DependencyDag,
    FTMDError,
    Scenario,
    TypeProfile,
    all_vectors,
    bitstring,
    require_valid,
)


class ScenarioFormatError(FTMDError):
    """Malformed document; the message names the line or field at fault."""


def _field(doc: Any, key: str, where: str, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise ScenarioFormatError(f"field {where}{key}: missing")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ScenarioFormatError(f"field {where}{key}: expected {getattr(kind, '__name__', kind)}")
    return value


def _numbers(values: Any, where: str, length: int) -> tuple[float, ...]:
    if not isinstance(values, list) or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in values):
        raise ScenarioFormatError(f"field {where}: expected a list of numbers")
    if len(values) != length:
        raise ScenarioFormatError(f"field {where}: expected {length} entries, got {len(values)}")
    return tuple(float(x) for x in values)


def _valuation(tasks: Any):
    t = _field(tasks, "count", "tasks.", int)
    if isinstance(t, bool) or t < 1:
        raise ScenarioFormatError("field tasks.count: t ≥ 1 required")
    has_values, has_table = "values" in tasks, "table" in tasks
    if has_values == has_table:
        raise ScenarioFormatError("field tasks: give exactly one of 'values' or 'table'")
    if has_values:
        return AdditiveValuation(_numbers(tasks["values"], "tasks.values", t))
    if t > MAX_COMBINATORIAL_TASKS:
        raise ScenarioFormatError(f"field tasks.table: at most {MAX_COMBINATORIAL_TASKS} tasks supported")
    table = _field(tasks, "table", "tasks.", dict)
    for key, value in table.items():
        if len(key) != t or set(key) - {"0", "1"}:
            raise ScenarioFormatError(f"field tasks.table[{key!r}]: keys must be {t}-character bitstrings")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioFormatError(f"field tasks.table[{key!r}]: expected a number")
    zero = "0" * t
    if zero not in table:
        raise ScenarioFormatError(f"field tasks.table: V(0…0) must be 0 (entry {zero!r} missing)")
    missing = [bitstring(mu) for mu in all_vectors(t) if bitstring(mu) not in table]
    if missing:
        raise ScenarioFormatError(f"field tasks.table: missing entries {missing[:4]}")
    return CombinatorialValuation.from_mapping(t, {k: float(v) for k, v in table.items()})


def _dag(deps: Any, t: int) -> DependencyDag:
    if not isinstance(deps, list):
        raise ScenarioFormatError("field dependencies: expected a list")
    edges = []
    for idx, edge in enumerate(deps):
        where = f"dependencies[{idx}]."
        j = _field(edge, "task", where, int)
        k = _field(edge, "requires", where, int)
        for name, x in (("task", j), ("requires", k)):
            if isinstance(x, bool) or not 1 <= x <= t:
                raise ScenarioFormatError(f"field {where}{name}: unknown task {x}")
        edges.append((j, k))
    return DependencyDag.from_edges(t, edges)


def scenario_from_dict(doc: Any) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioFormatError("document must be a JSON object")
    v = _valuation(_field(doc, "tasks", "", dict))
    t = v.t
    dag = _dag(doc.get("dependencies", []), t)
    agents = _field(doc, "agents", "", list)
    if not agents:
        raise ScenarioFormatError("field agents: n ≥ 1 required")
    true, declared = [], []
    for i, agent in enumerate(agents, 1):
        where = f"agents[{i - 1}]."
        cost = _numbers(_field(agent, "cost", where), where + "cost", t)
        prob = _numbers(_field(agent, "prob", where), where + "prob", t)
        d_cost = _numbers(agent["declared_cost"], where + "declared_cost", t) if "declared_cost" in agent else cost
        d_prob = _numbers(agent["declared_prob"], where + "declared_prob", t) if "declared_prob" in agent else prob
        true.append(AgentType(cost, prob))
        declared.append(AgentType(d_cost, d_prob))
    return require_valid(Scenario(v, dag, TypeProfile(tuple(true)), TypeProfile(tuple(declared))))


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(doc)


def _num(x: float) -> float:
    if not math.isfinite(x):
        raise FTMDError(f"cannot serialize non-finite number {x}")
    return float(x)


def scenario_to_dict(s: Scenario) -> dict:
    v = s.valuation
    if isinstance(v, AdditiveValuation):
        tasks = {"count": v.t, "values": [_num(x) for x in v.values]}
    else:
        tasks = {"count": v.t, "table": {bitstring(mu): _num(v(mu)) for mu in all_vectors(v.t)}}
    agents = []
    for true, decl in zip(s.true_types, s.declared_types):
        entry = {"cost": [_num(c) for c in true.cost], "prob": [_num(p) for p in true.prob]}
        if decl.cost != true.cost:
            entry["declared_cost"] = [_num(c) for c in decl.cost]
        if decl.prob != true.prob:
            entry["declared_prob"] = [_num(p) for p in decl.prob]
        agents.append(entry)
    return {
        "tasks": tasks,
        "dependencies": [{"task": j, "requires": k} for j, k in s.dag.edges],
        "agents": agents,
    }


def serialize_scenario(s: Scenario) -> str:
    """Canonical text: fixed key order, declared lists only where they differ from the truth."""
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"

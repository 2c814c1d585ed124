"""Seeded stochastic execution and Monte Carlo aggregation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mechanisms import MechanismKind, MechanismOutcome, assign, run
from .model import DUMMY, Assignment, DependencyDag, ExecutionOutcome, FTMDError, Scenario, TypeProfile


@dataclass(frozen=True)
class MonteCarloReport:
    kind: MechanismKind
    trials: int
    seed: int
    mean_utility: dict[int, float]
    std_utility: dict[int, float]
    mean_center_utility: float
    completion_frequency: tuple[float, ...]


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, trial])


def _draws(seed, t: int) -> np.ndarray:
    # one uniform per task id, so results do not depend on the visiting order
    return np.random.default_rng(seed).random(t)


def execute(a: Assignment, true_types: TypeProfile, dag: DependencyDag, seed) -> ExecutionOutcome:
    """Run ``a`` once: tasks in topological order, skipped when a prerequisite failed."""
    u = _draws(seed, a.t)
    completed = [0] * a.t
    attempted = set()
    for j in dag.topological_order:
        owner = a.owner(j)
        if owner == DUMMY or not all(completed[k - 1] for k in dag.prereqs[j - 1]):
            continue
        attempted.add(j)
        if u[j - 1] < true_types.prob(owner, j):
            completed[j - 1] = 1
    return ExecutionOutcome(tuple(completed), frozenset(attempted))


def monte_carlo(kind: MechanismKind, s: Scenario, trials: int, seed: int) -> MonteCarloReport:
    """Average ``run`` over ``trials`` seeded executions under the true types."""
    if trials < 1:
        raise FTMDError("trials >= 1 required")
    a = assign(kind, s).assignment
    agents = range(s.n + 1)
    utilities = np.empty((trials, s.n + 1))
    center = np.empty(trials)
    done = np.zeros(s.t)
    # run() is a deterministic function of the outcome
    seen: dict[ExecutionOutcome, MechanismOutcome] = {}
    for trial in range(trials):
        outcome = execute(a, s.true_types, s.dag, trial_seed(seed, trial))
        problems = outcome.problems(a, s.dag)
        if problems:
            raise FTMDError(f"trial {trial}: " + "; ".join(problems))
        result = seen.get(outcome)
        if result is None:
            result = seen[outcome] = run(kind, s, outcome)
        utilities[trial] = [result.agent_utilities[i] for i in agents]
        center[trial] = result.center_utility
        done += outcome.completed
    means = utilities.mean(axis=0)
    stds = utilities.std(axis=0, ddof=1) if trials > 1 else np.zeros(s.n + 1)
    return MonteCarloReport(
        kind=kind,
        trials=trials,
        seed=seed,
        mean_utility={i: float(means[i]) for i in agents},
        std_utility={i: float(stds[i]) for i in agents},
        mean_center_utility=float(center.mean()),
        completion_frequency=tuple(float(x) for x in done / trials),
    )

"""Payment mechanisms for allocating tasks to agents who may fail."""
from .allocator import AllocationResult, optimal_assignment, optimal_welfare_excluding
from .mechanisms import MechanismKind, MechanismOutcome, assign, expected_utility, payments, run
from .model import (
    DUMMY,
    EPSILON,
    AdditiveValuation,
    AgentType,
    Assignment,
    CombinatorialValuation,
    DependencyDag,
    ExecutionOutcome,
    Scenario,
    TypeProfile,
    ancestor_closure,
    validate_scenario,
)
from .simulation import execute, monte_carlo
from .welfare import completion_distribution, expected_welfare, expected_welfare_others, realized_welfare

__version__ = "0.1.0"

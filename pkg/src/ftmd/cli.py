"""Command line interface: ``ftmd solve|run|simulate|verify|demo|gen``.

Exit status is 0 on success, 1 when a verified property fails and 2 on usage
or validation errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import mechanisms, scenarios, verifier
from .allocator import optimal_assignment, optimal_welfare_excluding
from .mechanisms import MechanismKind
from .model import (
    EPSILON,
    AdditiveValuation,
    AgentType,
    DependencyDag,
    ExecutionOutcome,
    FTMDError,
    Scenario,
    TypeProfile,
)
from .report import FORMATS, RunReport, render
from .scenario_file import parse_scenario, serialize_scenario
from .simulation import execute, monte_carlo
from .verifier import Frame, Property, TypeGrid
from .welfare import completion_distribution

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

PROPERTY_SETS = {
    MechanismKind.SINGLE_TASK: (Property.IC_DOMINANT, Property.IR, Property.CR, Property.SE, Property.NFR),
    MechanismKind.MULTIPLE_TASK: (Property.IC_DOMINANT, Property.IR, Property.CR, Property.SE, Property.NFR),
    MechanismKind.EQUILIBRIUM: (Property.IC_EQUILIBRIUM, Property.IR_EQUILIBRIUM, Property.SE, Property.NFR),
    MechanismKind.NAIVE_GVA: (Property.IC_DOMINANT, Property.IR, Property.CR, Property.SE, Property.NFR),
}


class UsageError(FTMDError):
    pass


def parse_levels(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad level list {text!r}") from None


def parse_grid(text: str) -> TypeGrid:
    """``"p=0,0.5,1;c=0,1,2"`` (either part may be omitted)."""
    probs, costs = TypeGrid().prob_levels, TypeGrid().cost_levels
    for part in text.split(";"):
        if not part.strip():
            continue
        key, _, levels = part.partition("=")
        key = key.strip().lower()
        if key in ("p", "prob"):
            probs = parse_levels(levels)
        elif key in ("c", "cost"):
            costs = parse_levels(levels)
        else:
            raise UsageError(f"unknown grid component {key!r} (use p=... and c=...)")
    try:
        return TypeGrid(probs, costs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def default_frame(kind: MechanismKind) -> Frame:
    if kind in (MechanismKind.SINGLE_TASK, MechanismKind.NAIVE_GVA):
        return Frame(AdditiveValuation((100.0,)), DependencyDag.empty(1), 2)
    if kind is MechanismKind.EQUILIBRIUM:
        return Frame(AdditiveValuation((0.0, 5.0)), DependencyDag.from_edges(2, [(2, 1)]), 2)
    return Frame(AdditiveValuation((10.0, 10.0)), DependencyDag.empty(2), 2)


def load_scenario(path: str) -> Scenario:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_scenario(text)


def _kind(args, s: Scenario | None = None) -> MechanismKind:
    if args.mechanism:
        return MechanismKind.parse(args.mechanism)
    if s is not None and s.t == 1:
        return MechanismKind.SINGLE_TASK
    return MechanismKind.MULTIPLE_TASK


def _need_scenario(args) -> Scenario:
    if not args.scenario:
        raise UsageError("--scenario FILE is required")
    return load_scenario(args.scenario)


def cmd_solve(args) -> int:
    s = _need_scenario(args)
    result = optimal_assignment(s.declared_types, s.valuation, s.dag)
    without = {i: optimal_welfare_excluding(i, s.declared_types, s.valuation, s.dag) for i in s.declared_types.agents()}
    if args.format == "structured":
        doc = {"assignment": {str(j): o for j, o in enumerate(result.assignment.owners, 1)},
               "welfare": result.welfare,
               "welfare_without": {str(i): w for i, w in without.items()}}
        print(json.dumps(doc, indent=2))
    elif args.format == "csv":
        print("section,key,value")
        for j, o in enumerate(result.assignment.owners, 1):
            print(f"assignment,{j},{o}")
        print(f"welfare,,{result.welfare!r}")
        for i, w in without.items():
            print(f"welfare_without,{i},{w!r}")
    else:
        print("task  agent")
        for j, o in enumerate(result.assignment.owners, 1):
            print(f"{j:>4}  {o:>5}")
        print(f"declared expected welfare: {result.welfare:.10g}")
        for i, w in without.items():
            print(f"optimal welfare without agent {i}: {w:.10g}")
    return EXIT_OK


def cmd_run(args) -> int:
    s = _need_scenario(args)
    kind = _kind(args, s)
    a = mechanisms.assign(kind, s).assignment
    outcome = execute(a, s.true_types, s.dag, args.seed)
    print(render(RunReport(kind, result=mechanisms.run(kind, s, outcome)), args.format), end="")
    return EXIT_OK


def cmd_simulate(args) -> int:
    s = _need_scenario(args)
    kind = _kind(args, s)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    report = monte_carlo(kind, s, args.trials, args.seed)
    owners = mechanisms.assign(kind, s).assignment.owners
    print(render(RunReport(kind, simulation=report, assignment=owners), args.format), end="")
    return EXIT_OK


def _check_to_dict(c: verifier.PropertyCheck) -> dict:
    doc = {"property": c.prop.value, "mechanism": c.kind.value, "result": c.result,
           "points": c.points, "resolution": c.resolution}
    cx = c.counterexample
    if cx is not None:
        typ = lambda ty: None if ty is None else {"cost": list(ty.cost), "prob": list(ty.prob)}
        doc["counterexample"] = {
            "agent": cx.agent,
            "true_type": typ(cx.true_type),
            "deviation": typ(cx.deviation),
            "truthful_utility": cx.truthful_utility,
            "deviant_utility": cx.deviant_utility,
            "outcome": None if cx.outcome is None else list(cx.outcome.completed),
            "value": cx.value,
            "scenario": json.loads(serialize_scenario(cx.scenario)),
        }
    return doc


def cmd_verify(args) -> int:
    s = load_scenario(args.scenario) if args.scenario else None
    kind = _kind(args, s)
    frame = Frame.from_scenario(s) if s is not None else default_frame(kind)
    if args.grid:
        grid = parse_grid(args.grid)
    elif kind is MechanismKind.NAIVE_GVA:
        grid = TypeGrid(cost_levels=(0.0,))
    else:
        grid = TypeGrid()
    props = PROPERTY_SETS[kind] if args.property == "all" else (Property(args.property),)
    checks = [verifier.check(p, kind, frame, grid, args.epsilon) for p in props]
    if args.format == "structured":
        print(json.dumps([_check_to_dict(c) for c in checks], indent=2))
    elif args.format == "csv":
        print("property,mechanism,result,points,agent,truthful_utility,deviant_utility,value")
        for c in checks:
            cx = c.counterexample
            fields = [c.prop.value, c.kind.value, c.result, c.points]
            fields += ["", "", "", ""] if cx is None else [
                cx.agent, *("" if x is None else repr(x) for x in (cx.truthful_utility, cx.deviant_utility, cx.value))]
            print(",".join(map(str, fields)))
    else:
        for c in checks:
            print(c.summary())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def _demo_table1() -> list[str]:
    kind = MechanismKind.SINGLE_TASK
    s = scenarios.table1()
    a = mechanisms.assign(kind, s)
    winner = a.assignment.owner(1)
    without = optimal_welfare_excluding(winner, s.declared_types, s.valuation, s.dag)
    ok = mechanisms.run(kind, s, ExecutionOutcome.from_completion(a.assignment, s.dag, (1,)))
    bad = mechanisms.run(kind, s, ExecutionOutcome.from_completion(a.assignment, s.dag, (0,)))
    eu = mechanisms.expected_utility(kind, winner, s.true_types[winner], s.declared_types, s.valuation, s.dag)
    return [
        "single task example, V = 210",
        "agent      c      p",
        *(f"{i:>5} {ty.cost[0]:>6g} {ty.prob[0]:>6g}" for i, ty in enumerate(s.true_types, 1)),
        f"winner = {winner}",
        f"declared expected welfare = {a.welfare:.10g}",
        f"optimal welfare without agent {winner} = {without:.10g}",
        f"payment on success = {ok.payments[winner]:.10g}",
        f"payment on failure = {bad.payments[winner]:.10g}",
        f"utility on success = {ok.agent_utilities[winner]:.10g}",
        f"utility on failure = {bad.agent_utilities[winner]:.10g}",
        f"truthful expected utility = {eu:.10g}",
    ]


def naive_gva_instance() -> tuple[Scenario, AgentType, AgentType]:
    """True p = 0.9 against an opponent declaring 0.5, V = 100, zero costs."""
    truth = AgentType((0.0,), (0.9,))
    opponent = AgentType((0.0,), (0.5,))
    s = Scenario(AdditiveValuation((100.0,)), DependencyDag.empty(1), TypeProfile((truth, opponent)))
    return s, truth, AgentType((0.0,), (1.0,))


def _demo_gva() -> list[str]:
    kind = MechanismKind.NAIVE_GVA
    s, truth, lie = naive_gva_instance()
    honest = mechanisms.expected_utility(kind, 1, truth, s.declared_types, s.valuation, s.dag)
    deviant = mechanisms.expected_utility(kind, 1, truth, s.declared_types.replace(1, lie), s.valuation, s.dag)
    check = verifier.check_ic_dominant(kind, default_frame(kind), TypeGrid(cost_levels=(0.0,)))
    return [
        "naive GVA, zero costs, V = 100, agent 1 true p = 0.9, agent 2 declares p = 0.5",
        f"truthful expected utility (declare 0.9) = {honest:.10g}",
        f"deviant expected utility (declare 1) = {deviant:.10g}",
        f"gain from lying = {deviant - honest:.10g}",
        "grid check: " + check.summary(),
    ]


def _demo_theorem3() -> list[str]:
    kind = MechanismKind.MULTIPLE_TASK
    s = scenarios.theorem3(10.0)
    a = mechanisms.assign(kind, s).assignment
    result = mechanisms.run(kind, s, ExecutionOutcome.from_completion(a, s.dag, (1, 1)))
    frame = Frame.from_scenario(s)
    lines = [
        "combinatorial V: both tasks worth x = 10, nothing else; agent k can only complete task k",
        f"assignment: {a}",
        f"payments when both tasks complete: R_1 = {result.payments[1]:.10g}, R_2 = {result.payments[2]:.10g}",
        f"center utility = {result.center_utility:.10g}",
    ]
    for prop in (Property.CR, Property.IC_DOMINANT, Property.IR, Property.SE, Property.NFR):
        lines.append(verifier.check(prop, kind, frame).summary())
    return lines


def _demo_theorem5() -> list[str]:
    kind = MechanismKind.MULTIPLE_TASK
    lines = ["task 2 requires task 1, V(task 2) = 5, V(task 1) = 0"]
    names = {ty: name for name, ty in scenarios.DEPENDENCY_TYPES.items()}
    for inst in (1, 2, 3):
        s = scenarios.theorem5(inst)
        a = mechanisms.assign(kind, s).assignment
        dist = completion_distribution(a, s.true_types, s.dag)
        eu = mechanisms.expected_utility(kind, 1, s.true_types[1], s.declared_types, s.valuation, s.dag, s.true_types)
        lines.append(
            f"instance {inst}: true ({names[s.true_types[1]]}, {names[s.true_types[2]]}), declared "
            f"({names[s.declared_types[1]]}, {names[s.declared_types[2]]}); assignment {a}; "
            "mu distribution {" + ", ".join(f"({','.join(map(str, mu))}): {q:g}" for mu, q in dist)
            + f"}}; agent 1 expected utility {eu:.10g}")
    check = verifier.check_ic_dominant(kind, scenarios.theorem5_frame())
    lines.append("IC check on the type table: " + check.summary())
    cx = check.counterexample
    if cx is not None:
        lines.append(f"deviation {names.get(cx.true_type, '?')} -> {names.get(cx.deviation, '?')}, "
                     f"gain {cx.gain:.10g}, re-verified by brute force: {verifier.recheck(cx, kind)}")
    return lines


DEMOS = {"table1": _demo_table1, "gva-failure": _demo_gva, "theorem3": _demo_theorem3, "theorem5": _demo_theorem5}


def cmd_demo(args) -> int:
    print("\n".join(DEMOS[args.name]()))
    return EXIT_OK


def cmd_gen(args) -> int:
    params = {k: getattr(args, k) for k in ("x", "instance", "n", "value", "seed", "k")
              if getattr(args, k) is not None}
    print(serialize_scenario(scenarios.generate(args.name, **params)), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file ('-' for stdin)")
    common.add_argument("--mechanism", choices=[k.value for k in MechanismKind])
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--epsilon", type=float, default=EPSILON)

    parser = argparse.ArgumentParser(prog="ftmd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="optimal assignment and declared welfare")
    p = sub.add_parser("run", parents=[common], help="one seeded execution with payments")
    p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo over seeded executions")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("verify", parents=[common], help="exhaustive property check over a type grid")
    p.add_argument("--property", default="all", choices=["all"] + [q.value for q in Property])
    p.add_argument("--grid", help='type grid, e.g. "p=0,0.5,1;c=0,1,2"')
    p = sub.add_parser("demo", parents=[common], help="reproduce a worked instance")
    p.add_argument("name", choices=sorted(DEMOS))
    p = sub.add_parser("gen", parents=[common], help="emit a generated scenario file")
    p.add_argument("name", choices=["table1", "theorem3", "theorem5", "parallel-links", "chain"])
    p.add_argument("--x", type=float)
    p.add_argument("--instance", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--value", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int)
    return parser


COMMANDS = {"solve": cmd_solve, "run": cmd_run, "simulate": cmd_simulate, "verify": cmd_verify,
            "demo": cmd_demo, "gen": cmd_gen}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (FTMDError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

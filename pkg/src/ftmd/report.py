"""Rendering of run and simulation reports as text, CSV or JSON."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .mechanisms import MechanismKind, MechanismOutcome
from .simulation import MonteCarloReport

FORMATS = ("text", "csv", "structured")


@dataclass(frozen=True)
class RunReport:
    kind: MechanismKind
    result: MechanismOutcome | None = None
    simulation: MonteCarloReport | None = None
    assignment: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        out: dict = {"mechanism": self.kind.value}
        owners = self.assignment
        if self.result is not None:
            owners = self.result.assignment.owners
        if owners is not None:
            out["assignment"] = {str(j): o for j, o in enumerate(owners, 1)}
        if self.result is not None:
            r = self.result
            out["completed"] = list(r.outcome.completed)
            out["attempted"] = sorted(r.outcome.attempted)
            out["payments"] = {str(i): x for i, x in r.payments.items()}
            out["utilities"] = {str(i): x for i, x in r.agent_utilities.items()}
            out["center_utility"] = r.center_utility
        if self.simulation is not None:
            m = self.simulation
            out["simulation"] = {
                "trials": m.trials,
                "seed": m.seed,
                "mean_utility": {str(i): x for i, x in m.mean_utility.items()},
                "std_utility": {str(i): x for i, x in m.std_utility.items()},
                "mean_center_utility": m.mean_center_utility,
                "completion_frequency": list(m.completion_frequency),
            }
        return out


def _rows(report: RunReport) -> list[tuple[str, str, object]]:
    d = report.to_dict()
    rows: list[tuple[str, str, object]] = [("mechanism", "", d["mechanism"])]
    for section in ("assignment", "payments", "utilities"):
        rows += [(section, k, v) for k, v in d.get(section, {}).items()]
    if "completed" in d:
        rows += [("completed", str(j), b) for j, b in enumerate(d["completed"], 1)]
        rows += [("attempted", str(j), 1) for j in d["attempted"]]
        rows.append(("center_utility", "", d["center_utility"]))
    sim = d.get("simulation")
    if sim:
        rows += [("trials", "", sim["trials"]), ("seed", "", sim["seed"])]
        rows += [("mean_utility", k, v) for k, v in sim["mean_utility"].items()]
        rows += [("std_utility", k, v) for k, v in sim["std_utility"].items()]
        rows.append(("mean_center_utility", "", sim["mean_center_utility"]))
        rows += [("completion_frequency", str(j), f) for j, f in enumerate(sim["completion_frequency"], 1)]
    return rows


def to_csv(report: RunReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "key", "value"])
    for section, key, value in _rows(report):
        w.writerow([section, key, repr(value) if isinstance(value, float) else value])
    return buf.getvalue()


def to_structured(report: RunReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def _g(x: float) -> str:
    return f"{x:.10g}"


def to_text(report: RunReport) -> str:
    d = report.to_dict()
    lines = [f"mechanism: {d['mechanism']}"]
    if "assignment" in d:
        lines.append("task  agent")
        lines += [f"{j:>4}  {o:>5}" for j, o in d["assignment"].items()]
    if "completed" in d:
        lines.append("completed: (" + ", ".join(map(str, d["completed"])) + ")")
        lines.append("attempted: {" + ", ".join(map(str, d["attempted"])) + "}")
        lines.append("agent      payment      utility")
        for i in d["payments"]:
            lines.append(f"{i:>5} {_g(d['payments'][i]):>12} {_g(d['utilities'][i]):>12}")
        lines.append(f"center utility: {_g(d['center_utility'])}")
    sim = d.get("simulation")
    if sim:
        lines.append(f"trials: {sim['trials']}  seed: {sim['seed']}")
        lines.append("agent  mean utility   std utility")
        for i in sim["mean_utility"]:
            lines.append(f"{i:>5} {_g(sim['mean_utility'][i]):>13} {_g(sim['std_utility'][i]):>13}")
        lines.append(f"mean center utility: {_g(sim['mean_center_utility'])}")
        lines.append("completion frequency: (" + ", ".join(_g(f) for f in sim["completion_frequency"]) + ")")
    return "\n".join(lines) + "\n"


def render(report: RunReport, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(report)
    if fmt == "structured":
        return to_structured(report)
    return to_text(report)

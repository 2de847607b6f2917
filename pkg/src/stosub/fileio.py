"""JSON document formats for instances, constraints, policies, and reports.

Instances round-trip bit-exactly: probabilities are serialized as "p/q"
rational strings and floats go through JSON's shortest-round-trip repr, so
``load(save(x)) == x`` holds on the nose.
"""

from __future__ import annotations

import json
from pathlib import Path

from .constraints import (
    Constraint,
    ExplicitFamily,
    Knapsack,
    PartitionMatroid,
    UniformMatroid,
)
from .errors import InputError
from .independence import GammaWitness, IndependenceReport, KappaWitness
from .model import (
    ExplicitTable,
    Instance,
    JointDistribution,
    Realization,
    UtilityFunction,
    WeightedCoverage,
    _as_fraction,
)
from .policies import Pick, Policy, PolicyNode, STOP


def _require(mapping: dict, key: str, context: str):
    try:
        return mapping[key]
    except (KeyError, TypeError):
        raise InputError(f"{context} is missing the {key!r} field") from None


def instance_to_dict(instance: Instance) -> dict:
    doc = {
        "items": list(instance.items),
        "states": list(instance.states),
        "distribution": [
            {"assignment": realization.as_dict(), "prob": str(prob)}
            for realization, prob in instance.distribution.entries
        ],
        "utility": utility_to_dict(instance.utility),
    }
    return doc


def utility_to_dict(utility: UtilityFunction) -> dict:
    if isinstance(utility, WeightedCoverage):
        coverage: dict[str, dict[str, list[str]]] = {}
        for (item, state), covered in utility.coverage:
            coverage.setdefault(item, {})[state] = list(covered)
        return {
            "kind": utility.kind,
            "targets": list(utility.targets),
            "weights": dict(zip(utility.targets, utility.weights)),
            "coverage": coverage,
        }
    return {
        "kind": utility.kind,
        "ground": [list(p) for p in utility.ground],
        "table": [
            {"pairs": [list(p) for p in subset], "value": value}
            for subset, value in utility.entries
        ],
    }


def utility_from_dict(doc: dict) -> UtilityFunction:
    kind = _require(doc, "kind", "utility")
    if kind == "weighted-coverage":
        coverage = {}
        for item, by_state in _require(doc, "coverage", "utility").items():
            for state, covered in by_state.items():
                coverage[(item, state)] = tuple(covered)
        return WeightedCoverage.build(
            targets=tuple(_require(doc, "targets", "utility")),
            weights=_require(doc, "weights", "utility"),
            coverage=coverage,
        )
    if kind == "explicit-table":
        return ExplicitTable(
            ground=tuple(tuple(p) for p in _require(doc, "ground", "utility")),
            entries=tuple(
                (tuple(tuple(p) for p in entry["pairs"]), float(entry["value"]))
                for entry in _require(doc, "table", "utility")
            ),
        )
    raise InputError(f"unknown utility kind {kind!r}")


def instance_from_dict(doc: dict) -> Instance:
    entries = []
    for row in _require(doc, "distribution", "instance"):
        assignment = _require(row, "assignment", "distribution entry")
        prob = _require(row, "prob", "distribution entry")
        entries.append((Realization.from_dict(assignment), _as_fraction(str(prob))))
    return Instance(
        items=tuple(_require(doc, "items", "instance")),
        states=tuple(_require(doc, "states", "instance")),
        distribution=JointDistribution(tuple(entries)),
        utility=utility_from_dict(_require(doc, "utility", "instance")),
    )


def constraint_to_dict(constraint: Constraint) -> dict:
    if isinstance(constraint, UniformMatroid):
        return {"kind": "uniform", "k": constraint.rank}
    if isinstance(constraint, PartitionMatroid):
        return {
            "kind": "partition",
            "blocks": [list(b) for b in constraint.blocks],
            "capacities": list(constraint.capacities),
        }
    if isinstance(constraint, Knapsack):
        doc = {
            "kind": "knapsack",
            "costs": dict(constraint.costs),
            "budget": constraint.budget,
        }
        if constraint.alpha is not None:
            doc["alpha"] = constraint.alpha
        return doc
    if isinstance(constraint, ExplicitFamily):
        doc = {
            "kind": "explicit",
            "feasible_sets": [list(s) for s in constraint.feasible_sets],
        }
        if not constraint.downward_closed:
            doc["downward_closed"] = False
        if constraint.alpha is not None:
            doc["alpha"] = constraint.alpha
        return doc
    raise InputError(f"unknown constraint type {type(constraint).__name__}")


def constraint_from_dict(doc: dict) -> Constraint:
    kind = _require(doc, "kind", "constraint")
    if kind == "uniform":
        return UniformMatroid(rank=int(_require(doc, "k", "uniform constraint")))
    if kind == "partition":
        return PartitionMatroid(
            blocks=tuple(
                tuple(b) for b in _require(doc, "blocks", "partition constraint")
            ),
            capacities=tuple(_require(doc, "capacities", "partition constraint")),
        )
    if kind == "knapsack":
        return Knapsack(
            costs=tuple(_require(doc, "costs", "knapsack constraint").items()),
            budget=float(_require(doc, "budget", "knapsack constraint")),
            alpha=doc.get("alpha"),
        )
    if kind == "explicit":
        return ExplicitFamily(
            feasible_sets=tuple(
                tuple(s) for s in _require(doc, "feasible_sets", "explicit constraint")
            ),
            downward_closed=bool(doc.get("downward_closed", True)),
            alpha=doc.get("alpha"),
        )
    raise InputError(f"unknown constraint kind {kind!r}")


def policy_to_obj(policy: Policy):
    def encode(node: PolicyNode):
        if not isinstance(node, Pick):
            return "stop"
        return {
            "item": node.item,
            "branches": {state: encode(child) for state, child in node.branches},
        }

    return encode(policy.root)


def policy_from_obj(obj) -> Policy:
    def decode(node) -> PolicyNode:
        if node == "stop":
            return STOP
        item = _require(node, "item", "policy node")
        branches = _require(node, "branches", "policy node")
        return Pick(
            item=item,
            branches=tuple((state, decode(child)) for state, child in branches.items()),
        )

    return Policy(root=decode(obj))


def independence_report_to_dict(report: IndependenceReport) -> dict:
    witness = report.witness
    if isinstance(witness, KappaWitness):
        witness_doc = {
            "item": witness.item,
            "base": list(witness.base),
            "observed": list(witness.observed_items),
            "observation": witness.observation.as_dict(),
        }
    elif isinstance(witness, GammaWitness):
        witness_doc = {
            "item": witness.item,
            "observed": list(witness.observed_items),
            "observation": witness.observation.as_dict(),
            "observation_alt": witness.observation_alt.as_dict(),
        }
    else:
        witness_doc = None
    return {
        "value": str(report.value),
        "clamped": str(report.clamped),
        "ratios_examined": report.ratios_examined,
        "witness": witness_doc,
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save_instance(instance: Instance, path: str | Path):
    Path(path).write_text(dumps(instance_to_dict(instance)))


def load_document(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path} must contain a JSON object")
    return doc


def load_instance(path: str | Path) -> Instance:
    return instance_from_dict(load_document(path))


def load_instance_and_constraint(path: str | Path) -> tuple[Instance, Constraint | None]:
    """Instance files may embed an optional constraint block."""
    doc = load_document(path)
    constraint = (
        constraint_from_dict(doc["constraint"]) if "constraint" in doc else None
    )
    return instance_from_dict(doc), constraint

"""Experiment orchestration: scenarios, the end-to-end pipeline, and reports.

A scenario names an instance source (a file or a seeded generator spec), a
constraint, an ascent config, and an experiment kind.  The pipeline computes
the independence measures, runs the ascent and the matroid rounding, queries
the exact adaptive and non-adaptive oracles, and checks the bound flags
against oracle values.

Reports are reproducible byte for byte from (scenario file, seeds): rows
keep declaration order, floats use shortest-round-trip repr, and wall-clock
timings deliberately stay out of the report artifacts.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from pathlib import Path

from . import fileio
from .constraints import Constraint, alpha_for, MATROID_KINDS
from .errors import InputError
from .generators import common_cause_2, generate_common_cause, generate_product
from .greedy import GreedyConfig, lower_bound_certificate, run
from .independence import (
    IndependenceReport,
    adaptivity_gap_bound,
    gamma,
    kappa,
    ratio_bound,
)
from .model import Instance, expected_set_value
from .multilinear import multilinear_value
from .policies import (
    best_nonadaptive,
    optimal_adaptive,
    virtual_nonadaptive_value,
)
from .rounding import pipage_round

EXPERIMENT_KINDS = (
    "ratio-check",
    "adaptivity-gap",
    "independence-profile",
    "certificate",
)

EXACT_TOL = 1e-9


@dataclass(frozen=True)
class InstanceSpec:
    """Where a scenario's instance comes from; generators are seed-determined."""

    generator: str | None = None
    path: str | None = None
    m: int = 2
    states: int = 2
    worlds: int = 2
    seed: int = 0

    def resolve(self, base_dir: Path | None = None) -> Instance:
        if (self.generator is None) == (self.path is None):
            raise InputError("instance spec needs exactly one of generator or path")
        if self.path is not None:
            path = Path(self.path)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return fileio.load_instance(path)
        if self.generator == "common-cause-2":
            return common_cause_2()
        if self.generator == "common-cause":
            return generate_common_cause(self.m, self.states, self.worlds, self.seed)
        if self.generator == "product":
            return generate_product(
                self.m, states_per_item=self.states, seed=self.seed
            )
        raise InputError(f"unknown generator {self.generator!r}")


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    instance: InstanceSpec
    constraint: Constraint
    greedy: GreedyConfig = field(default_factory=GreedyConfig)
    rounding_seeds: int = 2000
    rounding_base_seed: int = 0

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise InputError(f"experiment kind must be one of {EXPERIMENT_KINDS}")
        if self.rounding_seeds < 1:
            raise InputError("rounding_seeds must be at least 1")


@dataclass(frozen=True)
class ReportRow:
    name: str
    kind: str
    m: int
    kappa_raw: str | None = None
    kappa: float | None = None
    gamma_raw: str | None = None
    gamma: float | None = None
    opt_adaptive: float | None = None
    best_nonadaptive: float | None = None
    fractional_value: float | None = None
    rounded_mean: float | None = None
    rounded_se: float | None = None
    bound_inner: float | None = None
    alpha: float | None = None
    virtual_value: float | None = None
    flag_inner: str | None = None
    flag_rounding: str | None = None
    flag_virtual: str | None = None
    notes: str = ""

    @property
    def all_flags_ok(self) -> bool:
        return all(
            f in (None, "pass", "vacuous")
            for f in (self.flag_inner, self.flag_rounding, self.flag_virtual)
        )


@dataclass(frozen=True)
class Report:
    rows: tuple[ReportRow, ...]

    @property
    def all_ok(self) -> bool:
        return all(row.all_flags_ok for row in self.rows)


def _independence(instance: Instance) -> tuple[IndependenceReport, IndependenceReport]:
    return kappa(instance), gamma(instance)


def _rounding_average(
    instance: Instance, constraint: Constraint, point, seeds: int, base_seed: int
) -> tuple[float, float]:
    values = []
    for offset in range(seeds):
        chosen = pipage_round(instance, constraint, point, base_seed + offset)
        values.append(expected_set_value(instance, chosen))
    mean = statistics.fmean(values)
    if seeds > 1 and max(values) > min(values):
        se = statistics.stdev(values) / seeds**0.5
    else:
        se = 0.0
    return mean, se


def run_pipeline(scenario: Scenario, base_dir: Path | None = None) -> ReportRow:
    """Execute one scenario end to end; stage failures land in ``notes``."""
    instance = scenario.instance.resolve(base_dir)
    row: dict = {"name": scenario.name, "kind": scenario.kind, "m": instance.m}
    notes: list[str] = []

    kappa_report, gamma_report = _independence(instance)
    kappa_clamped = float(kappa_report.clamped)
    gamma_clamped = float(gamma_report.clamped)
    row.update(
        kappa_raw=str(kappa_report.value),
        kappa=kappa_clamped,
        gamma_raw=str(gamma_report.value),
        gamma=gamma_clamped,
    )
    if scenario.kind == "independence-profile":
        return ReportRow(**row, notes=";".join(notes))

    policy, opt_value = optimal_adaptive(instance, scenario.constraint)
    _, best_fixed = best_nonadaptive(instance, scenario.constraint)
    virtual = virtual_nonadaptive_value(instance, scenario.constraint, policy)
    row.update(
        opt_adaptive=opt_value, best_nonadaptive=best_fixed, virtual_value=virtual
    )
    threshold = gamma_clamped / (1.0 + gamma_clamped) if gamma_clamped > 0 else 0.0
    row["flag_virtual"] = (
        "pass" if virtual >= threshold * opt_value - EXACT_TOL else "fail"
    )

    if scenario.kind == "adaptivity-gap":
        if gamma_clamped > 0:
            notes.append(f"gap_bound={adaptivity_gap_bound(gamma_clamped)!r}")
        else:
            notes.append("gap bound undefined (gamma = 0)")
        return ReportRow(**row, notes=";".join(notes))

    trajectory = run(instance, scenario.constraint, scenario.greedy)
    fractional = multilinear_value(instance, trajectory.final)
    row["fractional_value"] = fractional

    if scenario.kind == "certificate":
        certificate = lower_bound_certificate(
            instance, scenario.constraint, trajectory, opt_value, kappa_clamped
        )
        row["flag_inner"] = "pass" if certificate.ok else (
            "vacuous" if certificate.sampled else "fail"
        )
        notes.append(f"certificate_rounds={len(certificate.rounds)}")
        if certificate.sampled and certificate.violations:
            notes.append(f"sampled_violations={certificate.violations}")
        return ReportRow(**row, notes=";".join(notes))

    # ratio-check: inner bound, rounding bound, and the virtual-policy bound.
    if kappa_clamped <= 0:
        row["flag_inner"] = "vacuous"
        notes.append("degenerate kappa")
        inner = None
    else:
        inner = ratio_bound(kappa_clamped, instance.m, alpha=1.0)
        row["bound_inner"] = inner
        if inner <= 0:
            row["flag_inner"] = "vacuous"
        else:
            row["flag_inner"] = (
                "pass"
                if fractional >= inner * opt_value - EXACT_TOL
                else "fail"
            )

    if scenario.constraint.kind in MATROID_KINDS:
        alpha = alpha_for(scenario.constraint)
        row["alpha"] = alpha
        mean, se = _rounding_average(
            instance,
            scenario.constraint,
            trajectory.final,
            scenario.rounding_seeds,
            scenario.rounding_base_seed,
        )
        row.update(rounded_mean=mean, rounded_se=se)
        if inner is None or inner <= 0:
            row["flag_rounding"] = "vacuous"
        else:
            row["flag_rounding"] = (
                "pass"
                if mean >= alpha * inner * opt_value - 4.0 * se - EXACT_TOL
                else "fail"
            )
    else:
        notes.append("no rounding scheme for this constraint kind")

    return ReportRow(**row, notes=";".join(notes))


def run_suite(scenarios: list[Scenario], base_dir: Path | None = None) -> Report:
    return Report(rows=tuple(run_pipeline(s, base_dir) for s in scenarios))


TSV_COLUMNS = (
    "name",
    "kind",
    "m",
    "kappa_raw",
    "kappa",
    "gamma_raw",
    "gamma",
    "opt_adaptive",
    "best_nonadaptive",
    "fractional_value",
    "rounded_mean",
    "rounded_se",
    "bound_inner",
    "alpha",
    "virtual_value",
    "flag_inner",
    "flag_rounding",
    "flag_virtual",
    "notes",
)


def _cell(value) -> str:
    if value is None or value == "":
        return "-"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_to_tsv(report: Report) -> str:
    lines = ["\t".join(TSV_COLUMNS)]
    for row in report.rows:
        lines.append("\t".join(_cell(getattr(row, col)) for col in TSV_COLUMNS))
    return "\n".join(lines) + "\n"


def report_to_dict(report: Report) -> dict:
    return {
        "rows": [
            {col: getattr(row, col) for col in TSV_COLUMNS} for row in report.rows
        ]
    }


def scenario_from_dict(doc: dict) -> Scenario:
    instance_doc = doc.get("instance")
    if not isinstance(instance_doc, dict):
        raise InputError(f"scenario {doc.get('name')!r} needs an instance spec")
    spec = InstanceSpec(
        generator=instance_doc.get("generator"),
        path=instance_doc.get("path"),
        m=int(instance_doc.get("m", 2)),
        states=int(instance_doc.get("states", 2)),
        worlds=int(instance_doc.get("worlds", 2)),
        seed=int(instance_doc.get("seed", 0)),
    )
    greedy_doc = doc.get("greedy", {})
    config = GreedyConfig(
        delta=float(greedy_doc.get("delta", 0.05)),
        weight_mode=greedy_doc.get("weight_mode", "exact"),
        sample_count=greedy_doc.get("sample_count", "auto"),
        seed=int(greedy_doc.get("seed", 0)),
        weight_variant=greedy_doc.get("weight_variant", "optimistic"),
    )
    constraint_doc = doc.get("constraint")
    if constraint_doc is None:
        raise InputError(f"scenario {doc.get('name')!r} needs a constraint")
    return Scenario(
        name=str(doc.get("name", "unnamed")),
        kind=str(doc.get("kind", "ratio-check")),
        instance=spec,
        constraint=fileio.constraint_from_dict(constraint_doc),
        greedy=config,
        rounding_seeds=int(doc.get("rounding_seeds", 2000)),
        rounding_base_seed=int(doc.get("rounding_base_seed", 0)),
    )


def load_scenarios(path: str | Path) -> list[Scenario]:
    doc = fileio.load_document(path)
    rows = doc.get("scenarios")
    if not isinstance(rows, list) or not rows:
        raise InputError(f"{path} must contain a non-empty 'scenarios' list")
    return [scenario_from_dict(row) for row in rows]


def write_report(report: Report, out_dir: str | Path) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tsv_path = out / "report.tsv"
    json_path = out / "report.json"
    tsv_path.write_text(report_to_tsv(report))
    json_path.write_text(fileio.dumps(report_to_dict(report)))
    return tsv_path, json_path

"""Downward-closed constraint families, their polytopes, and the ascent LP.

Four kinds are supported: uniform matroids, partition matroids, knapsacks,
and explicit set families.  The per-round LP maximizes a nonnegative linear
objective over the relaxation polytope of the family; for the matroid kinds
the optimum is an integral greedy vertex, for knapsacks it is the classic
density-ordered fractional greedy, and for explicit families it is the best
listed set.

Explicit families are downward-closed by default.  Passing
``downward_closed=False`` admits prefix-closed families that are not
downward-closed (feasibility of a sequence then means every prefix's item
set is listed), which the adaptive-policy oracles support as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .errors import ConfigurationError, InputError, UnsupportedKindError
from .multilinear import FractionalPoint


@dataclass(frozen=True)
class UniformMatroid:
    """All sets of at most ``rank`` items."""

    rank: int

    kind = "uniform"

    def __post_init__(self):
        if self.rank < 0:
            raise InputError("rank must be nonnegative")


@dataclass(frozen=True)
class PartitionMatroid:
    """Per-block cardinality caps over a partition of the ground items."""

    blocks: tuple[tuple[str, ...], ...]
    capacities: tuple[int, ...]

    kind = "partition"

    def __post_init__(self):
        if len(self.blocks) != len(self.capacities):
            raise InputError("one capacity per block required")
        seen: set[str] = set()
        canon = []
        for block, cap in zip(self.blocks, self.capacities):
            block = tuple(block)
            if cap < 0:
                raise InputError("capacities must be nonnegative")
            for item in block:
                if item in seen:
                    raise InputError(f"item {item!r} appears in two blocks")
                seen.add(item)
            canon.append(block)
        object.__setattr__(self, "blocks", tuple(canon))
        object.__setattr__(self, "capacities", tuple(int(c) for c in self.capacities))

    def block_of(self, item: str) -> int:
        for b, block in enumerate(self.blocks):
            if item in block:
                return b
        raise InputError(f"item {item!r} not covered by any block")


@dataclass(frozen=True)
class Knapsack:
    """Sets whose total cost stays within the budget.

    The relaxation polytope is the box intersected with the budget halfspace,
    whose vertices may have one fractional coordinate.  ``alpha`` is the
    declared rounding-loss factor used in bound formulas; no rounding scheme
    for knapsacks is implemented here.
    """

    costs: tuple[tuple[str, float], ...]
    budget: float
    alpha: float | None = None

    kind = "knapsack"

    def __post_init__(self):
        canon = []
        seen = set()
        for item, cost in sorted(self.costs):
            if item in seen:
                raise InputError(f"duplicate cost for item {item!r}")
            seen.add(item)
            cost = float(cost)
            if not math.isfinite(cost) or cost < 0:
                raise InputError("costs must be finite and nonnegative")
            canon.append((item, cost))
        object.__setattr__(self, "costs", tuple(canon))
        if not math.isfinite(self.budget) or self.budget < 0:
            raise InputError("budget must be finite and nonnegative")
        if self.alpha is not None and not 0 < self.alpha <= 1:
            raise InputError("alpha must lie in (0, 1]")

    def cost_of(self, item: str) -> float:
        for it, cost in self.costs:
            if it == item:
                return cost
        raise InputError(f"no cost declared for item {item!r}")


@dataclass(frozen=True)
class ExplicitFamily:
    """An explicitly listed family of feasible item sets."""

    feasible_sets: tuple[tuple[str, ...], ...]
    downward_closed: bool = True
    alpha: float | None = None

    kind = "explicit"

    def __post_init__(self):
        canon = tuple(sorted({tuple(sorted(set(s))) for s in self.feasible_sets}))
        object.__setattr__(self, "feasible_sets", canon)
        members = {frozenset(s) for s in canon}
        if frozenset() not in members:
            raise InputError("explicit families must contain the empty set")
        if self.downward_closed:
            for s in members:
                for item in s:
                    if s - {item} not in members:
                        raise InputError(
                            f"family is not downward-closed: {sorted(s - {item})} "
                            f"missing below {sorted(s)}"
                        )
        if self.alpha is not None and not 0 < self.alpha <= 1:
            raise InputError("alpha must lie in (0, 1]")

    def members(self) -> frozenset[frozenset[str]]:
        cache = getattr(self, "_members_cache", None)
        if cache is None:
            cache = frozenset(frozenset(s) for s in self.feasible_sets)
            object.__setattr__(self, "_members_cache", cache)
        return cache


Constraint = Union[UniformMatroid, PartitionMatroid, Knapsack, ExplicitFamily]

MATROID_KINDS = ("uniform", "partition")


@dataclass(frozen=True)
class LPSolution:
    """Optimum of the per-round LP; ``vertex_set`` is set when it is integral."""

    point: FractionalPoint
    objective: float
    vertex_set: tuple[str, ...] | None


def is_feasible(constraint: Constraint, items: Iterable[str]) -> bool:
    """Membership of an item set in the family."""
    chosen = set(items)
    if isinstance(constraint, UniformMatroid):
        return len(chosen) <= constraint.rank
    if isinstance(constraint, PartitionMatroid):
        for block, cap in zip(constraint.blocks, constraint.capacities):
            if len(chosen & set(block)) > cap:
                return False
        uncovered = chosen - {i for b in constraint.blocks for i in b}
        if uncovered:
            raise InputError(f"items {sorted(uncovered)} not covered by any block")
        return True
    if isinstance(constraint, Knapsack):
        return sum(constraint.cost_of(i) for i in chosen) <= constraint.budget
    if isinstance(constraint, ExplicitFamily):
        return frozenset(chosen) in constraint.members()
    raise UnsupportedKindError(f"unknown constraint type {type(constraint).__name__}")


def is_prefix_feasible(constraint: Constraint, sequence: Iterable[str]) -> bool:
    """True when every prefix of the pick sequence is a feasible set.

    For downward-closed kinds this coincides with feasibility of the full
    set; for non-downward-closed explicit families the prefixes genuinely
    matter.
    """
    seq = list(sequence)
    if len(set(seq)) != len(seq):
        raise InputError("sequence repeats an item")
    prefix: set[str] = set()
    for item in seq:
        prefix.add(item)
        if not is_feasible(constraint, prefix):
            return False
    return True


def _clamped(weights: Mapping[str, float]) -> dict[str, float]:
    # Negative estimated weights never help in a down-monotone polytope.
    out = {}
    for item, w in weights.items():
        w = float(w)
        if not math.isfinite(w):
            raise InputError(f"weight of {item!r} is not finite")
        out[item] = max(0.0, w)
    return out


def _greedy_pick(order: list[str], weights: dict[str, float], cap: int) -> list[str]:
    ranked = sorted(order, key=lambda it: (-weights[it], order.index(it)))
    return [it for it in ranked if weights[it] > 0][:cap]


def lp_maximize(constraint: Constraint, weights: Mapping[str, float]) -> LPSolution:
    """Maximize a nonnegative linear objective over the relaxation polytope.

    Ties are broken by the order items appear in ``weights``, so callers that
    pass instance-ordered mappings get reproducible vertices.
    """
    weights = _clamped(weights)
    order = list(weights)

    def indicator(selected: Iterable[str]) -> FractionalPoint:
        chosen = set(selected)
        return FractionalPoint(
            tuple(order), tuple(1.0 if it in chosen else 0.0 for it in order)
        )

    if isinstance(constraint, UniformMatroid):
        chosen = _greedy_pick(order, weights, constraint.rank)
        return LPSolution(
            point=indicator(chosen),
            objective=sum(weights[i] for i in chosen),
            vertex_set=tuple(sorted(chosen)),
        )

    if isinstance(constraint, PartitionMatroid):
        chosen: list[str] = []
        for block, cap in zip(constraint.blocks, constraint.capacities):
            in_block = [it for it in order if it in block]
            chosen.extend(_greedy_pick(in_block, weights, cap))
        uncovered = set(order) - {i for b in constraint.blocks for i in b}
        if uncovered:
            raise InputError(f"items {sorted(uncovered)} not covered by any block")
        return LPSolution(
            point=indicator(chosen),
            objective=sum(weights[i] for i in chosen),
            vertex_set=tuple(sorted(chosen)),
        )

    if isinstance(constraint, Knapsack):
        coords = {it: 0.0 for it in order}
        objective = 0.0
        free = [it for it in order if constraint.cost_of(it) == 0 and weights[it] > 0]
        for it in free:
            coords[it] = 1.0
            objective += weights[it]
        remaining = constraint.budget
        costly = [
            it for it in order if constraint.cost_of(it) > 0 and weights[it] > 0
        ]
        costly.sort(key=lambda it: (-weights[it] / constraint.cost_of(it), order.index(it)))
        for it in costly:
            cost = constraint.cost_of(it)
            if cost <= remaining:
                coords[it] = 1.0
                objective += weights[it]
                remaining -= cost
            else:
                if remaining > 0:
                    frac = remaining / cost
                    coords[it] = frac
                    objective += weights[it] * frac
                break
        integral = all(v in (0.0, 1.0) for v in coords.values())
        return LPSolution(
            point=FractionalPoint(tuple(order), tuple(coords[it] for it in order)),
            objective=objective,
            vertex_set=tuple(sorted(it for it, v in coords.items() if v == 1.0))
            if integral
            else None,
        )

    if isinstance(constraint, ExplicitFamily):
        best_set: tuple[str, ...] = ()
        best_value = 0.0
        for candidate in constraint.feasible_sets:
            unknown = [i for i in candidate if i not in weights]
            if unknown:
                continue
            value = sum(weights[i] for i in candidate)
            if value > best_value or (value == best_value and candidate < best_set):
                best_value = value
                best_set = candidate
        return LPSolution(
            point=indicator(best_set), objective=best_value, vertex_set=best_set
        )

    raise UnsupportedKindError(f"unknown constraint type {type(constraint).__name__}")


def alpha_for(constraint: Constraint) -> float:
    """Rounding-loss factor for the constraint kind.

    Matroid kinds round losslessly.  Knapsack and explicit kinds carry a
    declared factor because no rounding scheme for them is implemented.
    """
    if isinstance(constraint, (UniformMatroid, PartitionMatroid)):
        return 1.0
    if isinstance(constraint, (Knapsack, ExplicitFamily)):
        if constraint.alpha is None:
            raise ConfigurationError(
                f"{constraint.kind} constraints need a configured alpha"
            )
        return constraint.alpha
    raise UnsupportedKindError(f"unknown constraint type {type(constraint).__name__}")


def point_in_polytope(
    constraint: Constraint, x: FractionalPoint, tol: float = 1e-9
) -> bool:
    """Closed-form membership test in the relaxation polytope.

    Explicit families have no closed form here; testing hull membership for
    them requires an LP solver and is out of scope.
    """
    if any(v < -tol or v > 1 + tol for v in x.values):
        return False
    if isinstance(constraint, UniformMatroid):
        return sum(x.values) <= constraint.rank + tol
    if isinstance(constraint, PartitionMatroid):
        coords = x.as_dict()
        uncovered = set(coords) - {i for b in constraint.blocks for i in b}
        if uncovered:
            raise InputError(f"items {sorted(uncovered)} not covered by any block")
        return all(
            sum(coords.get(i, 0.0) for i in block) <= cap + tol
            for block, cap in zip(constraint.blocks, constraint.capacities)
        )
    if isinstance(constraint, Knapsack):
        return (
            sum(constraint.cost_of(i) * v for i, v in x.as_dict().items())
            <= constraint.budget + tol
        )
    raise UnsupportedKindError(
        f"no closed-form polytope membership for kind {constraint.kind!r}"
    )

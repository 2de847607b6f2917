"""Items, states, joint priors, and submodular utilities over (item, state) pairs.

An :class:`Instance` bundles a ground set of items, a finite state alphabet,
an explicit joint distribution over full state realizations, and a monotone
submodular utility defined on sets of (item, state) pairs.  Probabilities are
exact rationals throughout so that conditioning and the independence
diagnostics can distinguish true zeros from rounding; utility values are
plain floats.

Expected values exposed here (``expected_set_value`` and friends) are
computed in exact rational arithmetic internally and rounded once on the way
out, which makes algebraically equal expectations compare equal as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

from .errors import CapacityError, ConditioningError, InputError

Pair = tuple[str, str]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational number: {value!r}") from exc
    raise InputError(
        f"probabilities must be exact rationals, got {type(value).__name__}"
    )


@dataclass(frozen=True)
class Realization:
    """An assignment of states to items; partial when the domain is a subset."""

    pairs: tuple[Pair, ...]

    def __post_init__(self):
        items = [item for item, _ in self.pairs]
        if len(set(items)) != len(items):
            raise InputError("realization assigns an item more than once")
        ordered = tuple(sorted(self.pairs))
        object.__setattr__(self, "pairs", ordered)

    @classmethod
    def from_dict(cls, assignment: Mapping[str, str]) -> "Realization":
        return cls(tuple(assignment.items()))

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(item for item, _ in self.pairs)

    def state_of(self, item: str) -> str:
        for it, state in self.pairs:
            if it == item:
                return state
        raise InputError(f"item {item!r} not assigned in this realization")

    def restrict(self, items: Iterable[str]) -> "Realization":
        keep = set(items)
        missing = keep - self.domain
        if missing:
            raise InputError(f"cannot restrict to unassigned items {sorted(missing)}")
        return Realization(tuple(p for p in self.pairs if p[0] in keep))

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    def consistent_with(self, partial: "Realization") -> bool:
        """True when this realization agrees with ``partial`` on its domain."""
        own = dict(self.pairs)
        return all(own.get(item) == state for item, state in partial.pairs)


EMPTY_REALIZATION = Realization(())


@dataclass(frozen=True)
class JointDistribution:
    """Explicit support of full realizations with exact rational probabilities."""

    entries: tuple[tuple[Realization, Fraction], ...]

    def __post_init__(self):
        if not self.entries:
            raise InputError("distribution support is empty")
        normalized = []
        seen = set()
        domain = self.entries[0][0].domain
        total = Fraction(0)
        for realization, prob in self.entries:
            prob = _as_fraction(prob)
            if prob < 0:
                raise InputError("probabilities must be nonnegative")
            if realization.domain != domain:
                raise InputError("all realizations in a support must share one domain")
            if realization in seen:
                raise InputError(f"duplicate realization {realization.as_dict()}")
            seen.add(realization)
            total += prob
            normalized.append((realization, prob))
        if total != 1:
            raise InputError(f"probabilities sum to {total}, expected exactly 1")
        object.__setattr__(self, "entries", tuple(normalized))

    @property
    def domain(self) -> frozenset[str]:
        return self.entries[0][0].domain

    def support(self) -> tuple[Realization, ...]:
        return tuple(r for r, _ in self.entries)

    def probability_of(self, partial: Realization) -> Fraction:
        """Exact probability that the random realization agrees with ``partial``."""
        return sum(
            (p for r, p in self.entries if r.consistent_with(partial)), Fraction(0)
        )


@dataclass(frozen=True)
class ConditionalDistribution:
    """Marginal of one item's state given a positive-probability partial observation."""

    item: str
    conditioning: Realization
    marginal: tuple[tuple[str, Fraction], ...]

    def __post_init__(self):
        total = sum((p for _, p in self.marginal), Fraction(0))
        if total != 1:
            raise InputError("conditional marginal must sum to exactly 1")

    def probability(self, state: str) -> Fraction:
        for s, p in self.marginal:
            if s == state:
                return p
        return Fraction(0)


def condition(
    distribution: JointDistribution, item: str, observed: Realization
) -> ConditionalDistribution:
    """Bayes-restrict the support to ``observed`` and marginalize onto ``item``.

    Raises :class:`ConditioningError` when the observation has probability
    zero, which signals an unreachable branch rather than a bad instance.
    """
    if item in observed.domain:
        raise InputError(f"cannot condition {item!r} on an observation of itself")
    if item not in distribution.domain:
        raise InputError(f"unknown item {item!r}")
    weights: dict[str, Fraction] = {}
    total = Fraction(0)
    for realization, prob in distribution.entries:
        if prob == 0 or not realization.consistent_with(observed):
            continue
        state = realization.state_of(item)
        weights[state] = weights.get(state, Fraction(0)) + prob
        total += prob
    if total == 0:
        raise ConditioningError(
            f"observation {observed.as_dict()} has probability zero"
        )
    marginal = tuple(
        (state, weights[state] / total) for state in sorted(weights) if weights[state]
    )
    return ConditionalDistribution(item=item, conditioning=observed, marginal=marginal)


@dataclass(frozen=True)
class WeightedCoverage:
    """Weighted coverage utility: each (item, state) covers a subset of targets.

    Monotone and submodular by construction.  ``coverage`` must be total over
    the instance's item/state product when used inside an :class:`Instance`.
    """

    targets: tuple[str, ...]
    weights: tuple[float, ...]
    coverage: tuple[tuple[Pair, tuple[str, ...]], ...]

    kind = "weighted-coverage"

    def __post_init__(self):
        if len(set(self.targets)) != len(self.targets):
            raise InputError("duplicate targets")
        if len(self.weights) != len(self.targets):
            raise InputError("one weight per target required")
        for w in self.weights:
            if not math.isfinite(w) or w < 0:
                raise InputError("target weights must be finite and nonnegative")
        index = {t: i for i, t in enumerate(self.targets)}
        canon = []
        seen = set()
        for pair, covered in sorted(self.coverage):
            if pair in seen:
                raise InputError(f"duplicate coverage entry for {pair}")
            seen.add(pair)
            unknown = [t for t in covered if t not in index]
            if unknown:
                raise InputError(f"coverage of {pair} names unknown targets {unknown}")
            canon.append((pair, tuple(sorted(set(covered)))))
        object.__setattr__(self, "coverage", tuple(canon))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    @classmethod
    def build(
        cls,
        targets: Iterable[str],
        weights: Mapping[str, float],
        coverage: Mapping[Pair, Iterable[str]],
    ) -> "WeightedCoverage":
        targets = tuple(targets)
        return cls(
            targets=targets,
            weights=tuple(float(weights[t]) for t in targets),
            coverage=tuple((pair, tuple(ts)) for pair, ts in coverage.items()),
        )

    def _cover_map(self) -> dict[Pair, frozenset[int]]:
        cache = getattr(self, "_cover_cache", None)
        if cache is None:
            index = {t: i for i, t in enumerate(self.targets)}
            cache = {
                pair: frozenset(index[t] for t in covered)
                for pair, covered in self.coverage
            }
            object.__setattr__(self, "_cover_cache", cache)
        return cache

    def evaluate(self, pairs: Iterable[Pair]) -> float:
        cover = self._cover_map()
        covered: set[int] = set()
        for pair in pairs:
            try:
                covered |= cover[tuple(pair)]
            except KeyError:
                raise InputError(f"unknown (item, state) pair {pair}") from None
        return sum(self.weights[i] for i in covered)


@dataclass(frozen=True)
class ExplicitTable:
    """Utility given by an explicit value for every subset of the ground pairs."""

    ground: tuple[Pair, ...]
    entries: tuple[tuple[tuple[Pair, ...], float], ...]

    kind = "explicit-table"

    CONSTRUCTION_CAP = 16

    def __post_init__(self):
        ground = tuple(sorted(set(self.ground)))
        if len(ground) != len(self.ground):
            raise InputError("duplicate ground pairs")
        if len(ground) > self.CONSTRUCTION_CAP:
            raise CapacityError(
                f"explicit tables support at most {self.CONSTRUCTION_CAP} ground pairs"
            )
        object.__setattr__(self, "ground", ground)
        table: dict[frozenset[Pair], float] = {}
        for subset, value in self.entries:
            key = frozenset(tuple(p) for p in subset)
            if not key <= set(ground):
                raise InputError(f"table subset {sorted(key)} outside the ground set")
            if key in table:
                raise InputError(f"duplicate table entry for {sorted(key)}")
            value = float(value)
            if not math.isfinite(value) or value < 0:
                raise InputError("table values must be finite and nonnegative")
            table[key] = value
        if len(table) != 1 << len(ground):
            raise InputError(
                f"table must cover all {1 << len(ground)} subsets, got {len(table)}"
            )
        canon = tuple(
            (tuple(sorted(key)), table[key])
            for key in sorted(table, key=lambda k: (len(k), tuple(sorted(k))))
        )
        object.__setattr__(self, "entries", canon)
        object.__setattr__(self, "_table_cache", table)

    @classmethod
    def from_function(cls, ground: Iterable[Pair], fn) -> "ExplicitTable":
        ground = tuple(sorted(set(ground)))
        entries = []
        for mask in range(1 << len(ground)):
            subset = tuple(g for i, g in enumerate(ground) if mask >> i & 1)
            entries.append((subset, float(fn(frozenset(subset)))))
        return cls(ground=ground, entries=tuple(entries))

    def evaluate(self, pairs: Iterable[Pair]) -> float:
        key = frozenset(tuple(p) for p in pairs)
        try:
            return self._table_cache[key]
        except KeyError:
            raise InputError(f"pairs {sorted(key)} outside the table's ground set") from None


UtilityFunction = Union[WeightedCoverage, ExplicitTable]


def evaluate(utility: UtilityFunction, pairs: Iterable[Pair]) -> float:
    """Value of a set of (item, state) pairs. Duplicate items union their coverage."""
    return utility.evaluate(pairs)


@dataclass(frozen=True)
class UtilityReport:
    monotone: bool
    submodular: bool
    witness: tuple | None
    note: str = ""


def validate_utility(
    utility: UtilityFunction,
    ground: Iterable[Pair] | None = None,
    cap: int = 14,
    tol: float = 1e-12,
) -> UtilityReport:
    """Exhaustively check monotonicity and submodularity on explicit tables.

    Coverage utilities are monotone submodular by construction and return a
    trivially valid report.  The check walks all (subset, element) and
    (subset, element, element) combinations, so the ground set is capped.
    """
    if isinstance(utility, WeightedCoverage):
        return UtilityReport(
            monotone=True,
            submodular=True,
            witness=None,
            note="weighted coverage is monotone submodular by construction",
        )
    pairs = tuple(sorted(set(ground))) if ground is not None else utility.ground
    n = len(pairs)
    if n > cap:
        raise CapacityError(f"ground set of {n} pairs exceeds the validation cap {cap}")

    def value(mask: int) -> float:
        return utility.evaluate(p for i, p in enumerate(pairs) if mask >> i & 1)

    values = [value(mask) for mask in range(1 << n)]

    def monotone_witness():
        for mask in range(1 << n):
            for i in range(n):
                if mask >> i & 1:
                    continue
                if values[mask | 1 << i] < values[mask] - tol:
                    return (
                        "monotone",
                        tuple(p for j, p in enumerate(pairs) if mask >> j & 1),
                        pairs[i],
                        values[mask],
                        values[mask | 1 << i],
                    )
        return None

    def submodular_witness():
        # Pairwise diminishing returns characterize submodularity.
        for mask in range(1 << n):
            for i in range(n):
                if mask >> i & 1:
                    continue
                gain_i = values[mask | 1 << i] - values[mask]
                for j in range(i + 1, n):
                    if mask >> j & 1:
                        continue
                    with_j = mask | 1 << j
                    if values[with_j | 1 << i] - values[with_j] > gain_i + tol:
                        return (
                            "submodular",
                            tuple(p for k, p in enumerate(pairs) if mask >> k & 1),
                            pairs[i],
                            pairs[j],
                            gain_i,
                            values[with_j | 1 << i] - values[with_j],
                        )
        return None

    mono = monotone_witness()
    sub = submodular_witness()
    return UtilityReport(
        monotone=mono is None,
        submodular=sub is None,
        witness=mono if mono is not None else sub,
    )


@dataclass(frozen=True)
class Instance:
    """Immutable problem instance: items, states, joint prior, and utility."""

    items: tuple[str, ...]
    states: tuple[str, ...]
    distribution: JointDistribution
    utility: UtilityFunction

    def __post_init__(self):
        if not self.items:
            raise InputError("at least one item required")
        if not self.states:
            raise InputError("at least one state required")
        if len(set(self.items)) != len(self.items):
            raise InputError("duplicate items")
        if len(set(self.states)) != len(self.states):
            raise InputError("duplicate states")
        item_set, state_set = set(self.items), set(self.states)
        if self.distribution.domain != item_set:
            raise InputError("distribution domain must equal the item set")
        for realization, _ in self.distribution.entries:
            for _, state in realization.pairs:
                if state not in state_set:
                    raise InputError(f"realization uses unknown state {state!r}")
        all_pairs = {(i, s) for i in self.items for s in self.states}
        if isinstance(self.utility, WeightedCoverage):
            covered = {pair for pair, _ in self.utility.coverage}
            missing = all_pairs - covered
            if missing:
                raise InputError(
                    f"coverage map missing {len(missing)} (item, state) pairs, "
                    f"e.g. {sorted(missing)[0]}"
                )
        else:
            if set(self.utility.ground) != all_pairs:
                raise InputError("table ground set must equal items x states")

    @property
    def m(self) -> int:
        return len(self.items)

    def item_index(self, item: str) -> int:
        try:
            return self.items.index(item)
        except ValueError:
            raise InputError(f"unknown item {item!r}") from None

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise InputError(f"unknown state {state!r}") from None


class _Evaluator:
    """Per-instance caches of exact expected values keyed by item bitmask.

    Memo writes are idempotent (pure functions of the key), so concurrent use
    from multiple threads at worst recomputes a value.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        self.m = instance.m
        item_pos = {item: i for i, item in enumerate(instance.items)}
        self.support: list[tuple[tuple[int, ...], Fraction]] = []
        for realization, prob in instance.distribution.entries:
            states = [0] * self.m
            for item, state in realization.pairs:
                states[item_pos[item]] = instance.state_index(state)
            self.support.append((tuple(states), prob))
        self._pair_values: dict[frozenset[tuple[int, int]], tuple[float, Fraction]] = {}
        self._set_values: dict[int, Fraction] = {}
        self._state_values: dict[tuple[int, int, int], Fraction] = {}

    def pair_value(self, key: frozenset[tuple[int, int]]) -> tuple[float, Fraction]:
        hit = self._pair_values.get(key)
        if hit is None:
            items, states = self.instance.items, self.instance.states
            raw = self.instance.utility.evaluate(
                (items[i], states[s]) for i, s in key
            )
            hit = (raw, Fraction(raw))
            self._pair_values[key] = hit
        return hit

    def set_value_exact(self, mask: int) -> Fraction:
        hit = self._set_values.get(mask)
        if hit is None:
            bits = [i for i in range(self.m) if mask >> i & 1]
            total = Fraction(0)
            for states, prob in self.support:
                if prob == 0:
                    continue
                key = frozenset((i, states[i]) for i in bits)
                total += prob * self.pair_value(key)[1]
            hit = total
            self._set_values[mask] = hit
        return hit

    def set_value(self, mask: int) -> float:
        return float(self.set_value_exact(mask))

    def state_value_exact(self, mask: int, item: int, state: int) -> Fraction:
        """Expected utility of the realized pairs of ``mask`` plus a pinned pair."""
        key3 = (mask, item, state)
        hit = self._state_values.get(key3)
        if hit is None:
            bits = [i for i in range(self.m) if mask >> i & 1]
            total = Fraction(0)
            for states, prob in self.support:
                if prob == 0:
                    continue
                key = frozenset((i, states[i]) for i in bits) | {(item, state)}
                total += prob * self.pair_value(key)[1]
            hit = total
            self._state_values[key3] = hit
        return hit

    def state_value(self, mask: int, item: int, state: int) -> float:
        return float(self.state_value_exact(mask, item, state))

    def mask_of(self, items: Iterable[str]) -> int:
        mask = 0
        for item in items:
            mask |= 1 << self.instance.item_index(item)
        return mask


@lru_cache(maxsize=64)
def _evaluator(instance: Instance) -> _Evaluator:
    return _Evaluator(instance)


def expected_set_value(instance: Instance, items: Iterable[str]) -> float:
    """Expected utility of picking ``items``, the prior averaging their states."""
    ev = _evaluator(instance)
    return ev.set_value(ev.mask_of(items))


def expected_set_value_exact(instance: Instance, items: Iterable[str]) -> Fraction:
    ev = _evaluator(instance)
    return ev.set_value_exact(ev.mask_of(items))


def marginal(instance: Instance, base: Iterable[str], item: str) -> float:
    """Expected gain of adding ``item`` to the picked set ``base``."""
    ev = _evaluator(instance)
    base_mask = ev.mask_of(base)
    bit = 1 << instance.item_index(item)
    if base_mask & bit:
        raise InputError(f"item {item!r} already in the base set")
    return float(ev.set_value_exact(base_mask | bit) - ev.set_value_exact(base_mask))


def state_marginal(
    instance: Instance, base: Iterable[str], item: str, state: str
) -> float:
    """Expected gain of adding ``item`` pinned to ``state``, the base still random."""
    ev = _evaluator(instance)
    base_mask = ev.mask_of(base)
    i = instance.item_index(item)
    if base_mask >> i & 1:
        raise InputError(f"item {item!r} already in the base set")
    s = instance.state_index(state)
    return float(ev.state_value_exact(base_mask, i, s) - ev.set_value_exact(base_mask))

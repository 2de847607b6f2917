"""Multilinear extension of the expected set value, exact and sampled.

The extension of a set function w is sum over subsets S of w(S) times the
probability that an independent inclusion draw with the given coordinates
produces exactly S.  Below the exact cap everything is enumerated; the
sampled estimators exist for larger ground sets and for exercising the
estimation path of the ascent algorithm.

All expected set values come from the model module's exact tables, so an
indicator vector reproduces ``expected_set_value`` bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import CapacityError, InputError
from .model import Instance, _evaluator

EXACT_CAP = 16

_COORD_TOL = 1e-9


@dataclass(frozen=True)
class FractionalPoint:
    """A vector in [0,1]^m keyed by item name."""

    items: tuple[str, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(set(self.items)) != len(self.items):
            raise InputError("duplicate items in fractional point")
        if len(self.items) != len(self.values):
            raise InputError("one coordinate per item required")
        cleaned = []
        for item, v in zip(self.items, self.values):
            v = float(v)
            if not math.isfinite(v) or v < -_COORD_TOL or v > 1 + _COORD_TOL:
                raise InputError(f"coordinate {item}={v} outside [0, 1]")
            cleaned.append(min(1.0, max(0.0, v)))
        object.__setattr__(self, "values", tuple(cleaned))

    @classmethod
    def from_dict(cls, coords: Mapping[str, float]) -> "FractionalPoint":
        return cls(tuple(coords), tuple(coords.values()))

    @classmethod
    def zeros(cls, items: Iterable[str]) -> "FractionalPoint":
        items = tuple(items)
        return cls(items, (0.0,) * len(items))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.items, self.values))

    def value_of(self, item: str) -> float:
        try:
            return self.values[self.items.index(item)]
        except ValueError:
            raise InputError(f"unknown item {item!r}") from None

    def replace(self, item: str, value: float) -> "FractionalPoint":
        try:
            i = self.items.index(item)
        except ValueError:
            raise InputError(f"unknown item {item!r}") from None
        vals = list(self.values)
        vals[i] = value
        return FractionalPoint(self.items, tuple(vals))

    def zero_out(self, item: str) -> "FractionalPoint":
        """Copy with the coordinate of ``item`` forced to 0."""
        return self.replace(item, 0.0)

    def with_one(self, item: str) -> "FractionalPoint":
        return self.replace(item, 1.0)


@dataclass(frozen=True)
class Estimate:
    mean: float
    sample_count: int
    std_error: float
    seed: int


def _aligned(instance: Instance, x: FractionalPoint) -> list[float]:
    if set(x.items) != set(instance.items):
        raise InputError("fractional point items do not match the instance")
    coords = x.as_dict()
    return [coords[item] for item in instance.items]


def _check_cap(instance: Instance, cap: int):
    if instance.m > cap:
        raise CapacityError(
            f"exact enumeration over {instance.m} items exceeds the cap {cap}"
        )


def multilinear_value(
    instance: Instance, x: FractionalPoint, cap: int = EXACT_CAP
) -> float:
    """Exact multilinear extension value at ``x``."""
    _check_cap(instance, cap)
    ev = _evaluator(instance)
    xv = _aligned(instance, x)
    m = instance.m
    total = 0.0
    for mask in range(1 << m):
        p = 1.0
        for j in range(m):
            p *= xv[j] if mask >> j & 1 else 1.0 - xv[j]
            if p == 0.0:
                break
        if p == 0.0:
            continue
        total += p * ev.set_value(mask)
    return total


def _base_weight(instance: Instance, xv: list[float], e: int, cap: int) -> float:
    _check_cap(instance, cap)
    ev = _evaluator(instance)
    m = instance.m
    bit = 1 << e
    total = 0.0
    for mask in range(1 << m):
        if mask & bit:
            continue
        p = 1.0
        for j in range(m):
            if j == e:
                continue
            p *= xv[j] if mask >> j & 1 else 1.0 - xv[j]
            if p == 0.0:
                break
        if p == 0.0:
            continue
        total += p * (ev.set_value(mask | bit) - ev.set_value(mask))
    return total


def optimistic_weight(
    instance: Instance, x: FractionalPoint, item: str, cap: int = EXACT_CAP
) -> float:
    """Expected marginal of ``item`` over a draw that excludes its own coordinate.

    Equals the standard marginal weight at the point with the item's
    coordinate zeroed, and never falls below the standard weight.
    """
    e = instance.item_index(item)
    return _base_weight(instance, _aligned(instance, x), e, cap)


def standard_weight(
    instance: Instance, x: FractionalPoint, item: str, cap: int = EXACT_CAP
) -> float:
    """Expected marginal of ``item`` over an inclusion draw at ``x``.

    Computed as (1 - x_e) times the optimistic weight, which is an exact
    identity of the two enumerations.
    """
    e = instance.item_index(item)
    xv = _aligned(instance, x)
    return (1.0 - xv[e]) * _base_weight(instance, xv, e, cap)


def state_weight(
    instance: Instance,
    x: FractionalPoint,
    item: str,
    state: str,
    cap: int = EXACT_CAP,
) -> float:
    """Expected gain of pinning ``item`` to ``state`` on top of a draw at ``x``."""
    _check_cap(instance, cap)
    ev = _evaluator(instance)
    xv = _aligned(instance, x)
    e = instance.item_index(item)
    s = instance.state_index(state)
    m = instance.m
    total = 0.0
    for mask in range(1 << m):
        p = 1.0
        for j in range(m):
            p *= xv[j] if mask >> j & 1 else 1.0 - xv[j]
            if p == 0.0:
                break
        if p == 0.0:
            continue
        total += p * (ev.state_value(mask, e, s) - ev.set_value(mask))
    return total


def estimation_sample_count(delta: float, m: int) -> int:
    """Number of samples the estimation schedule prescribes for step size delta."""
    if not 0 < delta <= 1:
        raise InputError(f"delta must lie in (0, 1], got {delta}")
    if m < 1:
        raise InputError("m must be at least 1")
    return math.ceil(10.0 / delta**2 * (1.0 + math.log(m)))


def _stream_rng(seed: int, stream: tuple[int, ...]) -> np.random.Generator:
    # spawn_key makes (seed, stream) -> draws a pure function, so parallel and
    # serial runs agree.
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=stream))


def _sample_masks(
    rng: np.random.Generator, xv: list[float], n: int, skip: int | None = None
) -> list[int]:
    m = len(xv)
    probs = np.asarray(xv)
    if skip is not None:
        probs = probs.copy()
        probs[skip] = 0.0
    include = rng.random((n, m)) < probs
    weights = 1 << np.arange(m, dtype=np.int64)
    return [int(v) for v in include @ weights]


def _summarize(values: list[float], seed: int) -> Estimate:
    n = len(values)
    first = values[0]
    if all(v == first for v in values):
        return Estimate(mean=first, sample_count=n, std_error=0.0, seed=seed)
    arr = np.asarray(values)
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(n))
    return Estimate(mean=mean, sample_count=n, std_error=se, seed=seed)


def multilinear_estimate(
    instance: Instance,
    x: FractionalPoint,
    sample_count: int,
    seed: int,
    stream: tuple[int, ...] = (),
) -> Estimate:
    """Monte-Carlo estimate of the multilinear value via independent draws."""
    if sample_count < 1:
        raise InputError("sample_count must be at least 1")
    ev = _evaluator(instance)
    xv = _aligned(instance, x)
    rng = _stream_rng(seed, stream)
    masks = _sample_masks(rng, xv, sample_count)
    return _summarize([ev.set_value(mask) for mask in masks], seed)


def optimistic_weight_estimate(
    instance: Instance,
    x: FractionalPoint,
    item: str,
    sample_count: int,
    seed: int,
    stream: tuple[int, ...] = (),
) -> Estimate:
    """Paired Monte-Carlo estimate of the optimistic weight.

    Each sample draws one set excluding the item and differences the value
    with and without it, which keeps the estimator unbiased at lower variance
    than two independent value estimates.
    """
    if sample_count < 1:
        raise InputError("sample_count must be at least 1")
    ev = _evaluator(instance)
    xv = _aligned(instance, x)
    e = instance.item_index(item)
    bit = 1 << e
    rng = _stream_rng(seed, stream)
    masks = _sample_masks(rng, xv, sample_count, skip=e)
    diffs = [ev.set_value(mask | bit) - ev.set_value(mask) for mask in masks]
    return _summarize(diffs, seed)

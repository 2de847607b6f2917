"""Independent brute-force oracles used to check the library's fast paths.

Everything here enumerates directly over item names, the raw support, and
``utility.evaluate``; none of it touches the library's cached evaluators or
bitmask tables, so agreement is meaningful.
"""

import itertools
from fractions import Fraction

from stosub import (
    ExplicitFamily,
    Knapsack,
    PartitionMatroid,
    UniformMatroid,
    is_feasible,
)


def pairs_of(realization, items):
    return [(i, realization.state_of(i)) for i in items]


def direct_value(instance, pair_set) -> Fraction:
    """Exact utility of a set of (item, state) pairs."""
    return Fraction(instance.utility.evaluate(pair_set))


def direct_set_value(instance, items) -> Fraction:
    """Exact expected value of an item set, straight off the support."""
    total = Fraction(0)
    for realization, prob in instance.distribution.entries:
        total += prob * direct_value(instance, pairs_of(realization, items))
    return total


def direct_state_value(instance, items, item, state) -> Fraction:
    total = Fraction(0)
    for realization, prob in instance.distribution.entries:
        pairs = set(pairs_of(realization, items)) | {(item, state)}
        total += prob * direct_value(instance, pairs)
    return total


def direct_multilinear(instance, coords) -> float:
    """Double enumeration over subsets and the support."""
    total = 0.0
    for r in range(len(instance.items) + 1):
        for subset in itertools.combinations(instance.items, r):
            p = 1.0
            for item in instance.items:
                p *= coords[item] if item in subset else 1.0 - coords[item]
            total += p * float(direct_set_value(instance, subset))
    return total


def direct_conditional(instance, item, observed: dict) -> list:
    """State marginal of ``item`` given an observation, or [] if unreachable."""
    weights: dict = {}
    total = Fraction(0)
    for realization, prob in instance.distribution.entries:
        if prob == 0:
            continue
        if any(realization.state_of(i) != s for i, s in observed.items()):
            continue
        state = realization.state_of(item)
        weights[state] = weights.get(state, Fraction(0)) + prob
        total += prob
    if total == 0:
        return []
    return [(s, w / total) for s, w in sorted(weights.items())]


def _subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _observations(instance, observed_items):
    """Distinct positive-probability observations of the given items."""
    seen = {}
    for realization, prob in instance.distribution.entries:
        if prob == 0:
            continue
        key = tuple((i, realization.state_of(i)) for i in sorted(observed_items))
        seen[key] = seen.get(key, Fraction(0)) + prob
    return [dict(k) for k, p in sorted(seen.items()) if p > 0]


def brute_kappa(instance) -> Fraction:
    """First independence degree by definition-level enumeration."""
    best = None
    for e in instance.items:
        rest = [i for i in instance.items if i != e]
        for base in _subsets(rest):
            num = direct_set_value(instance, set(base) | {e}) - direct_set_value(
                instance, base
            )
            state_gain = {
                s: direct_state_value(instance, base, e, s)
                - direct_set_value(instance, base)
                for s in instance.states
            }
            for observed in _subsets(rest):
                for observation in _observations(instance, observed):
                    cond = direct_conditional(instance, e, observation)
                    den = sum((q * state_gain[s] for s, q in cond), Fraction(0))
                    if den == 0:
                        ratio = Fraction(1) if num == 0 else None
                    else:
                        ratio = num / den
                    if ratio is not None and (best is None or ratio < best):
                        best = ratio
    return best


def brute_gamma(instance) -> Fraction:
    """Second independence degree by definition-level enumeration."""
    best = None
    for e in instance.items:
        rest = [i for i in instance.items if i != e]
        for observed in _subsets(rest):
            observations = _observations(instance, observed)
            for obs_a in observations:
                for obs_b in observations:
                    base = {(i, s) for i, s in obs_a.items()} | {
                        (i, s) for i, s in obs_b.items()
                    }
                    base_value = direct_value(instance, base)
                    gain = {
                        s: direct_value(instance, base | {(e, s)}) - base_value
                        for s in instance.states
                    }
                    num = sum(
                        (q * gain[s] for s, q in direct_conditional(instance, e, obs_a)),
                        Fraction(0),
                    )
                    den = sum(
                        (q * gain[s] for s, q in direct_conditional(instance, e, obs_b)),
                        Fraction(0),
                    )
                    if den == 0:
                        ratio = Fraction(1) if num == 0 else None
                    else:
                        ratio = num / den
                    if ratio is not None and (best is None or ratio < best):
                        best = ratio
    return best


def enumerate_rank2_policies(instance, constraint):
    """All decision trees that pick at most two items under the constraint.

    Only meant for tiny instances; used to cross-check the adaptive oracle.
    Yields (value, policy-description) with the value computed directly.
    """
    from stosub import Policy, STOP, pick

    policies = [Policy(root=STOP)]
    for first in instance.items:
        if not is_feasible(constraint, {first}):
            continue
        second_choices = [STOP] + [
            pick(second, {s: STOP for s in instance.states})
            for second in instance.items
            if second != first and is_feasible(constraint, {first, second})
        ]
        for combo in itertools.product(second_choices, repeat=len(instance.states)):
            policies.append(
                Policy(root=pick(first, dict(zip(instance.states, combo))))
            )
    return policies


def direct_policy_value(instance, policy) -> Fraction:
    """Evaluate a policy straight off the support without library caches."""
    from stosub import Pick

    total = Fraction(0)
    for realization, prob in instance.distribution.entries:
        node = policy.root
        picked = []
        while isinstance(node, Pick):
            picked.append(node.item)
            node = node.child(realization.state_of(node.item))
        total += prob * direct_value(instance, pairs_of(realization, picked))
    return total


def lp_vertex_oracle(constraint, weights) -> float:
    """Best objective over explicitly enumerated polytope vertices."""
    items = list(weights)

    def value_of(chosen):
        return sum(weights[i] for i in chosen)

    if isinstance(constraint, (UniformMatroid, PartitionMatroid, ExplicitFamily)):
        best = 0.0
        for subset in _subsets(items):
            if is_feasible(constraint, subset):
                best = max(best, value_of(subset))
        return best
    if isinstance(constraint, Knapsack):
        # Vertices of the box-plus-budget polytope: 0/1 points inside the
        # budget, plus points with one fractional coordinate that make the
        # budget tight.
        best = 0.0
        for subset in _subsets(items):
            cost = sum(constraint.cost_of(i) for i in subset)
            if cost <= constraint.budget:
                best = max(best, value_of(subset))
            for extra in items:
                if extra in subset:
                    continue
                c = constraint.cost_of(extra)
                if c <= 0:
                    continue
                frac = (constraint.budget - cost) / c
                if 0 < frac < 1:
                    best = max(best, value_of(subset) + frac * weights[extra])
        return best
    raise AssertionError(f"no oracle for {constraint!r}")

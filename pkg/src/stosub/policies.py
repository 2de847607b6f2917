"""Adaptive policies as decision trees, plus exact small-instance oracles.

A policy is a tree whose internal nodes pick an item and branch on its
observed state; leaves stop.  Everything here is evaluated exactly over the
explicit support: policy values, the optimal adaptive policy via backward
induction over observation histories, the best non-adaptive set, and the
virtual non-adaptive value obtained by steering the tree with a fresh draw
while scoring the true one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .constraints import Constraint, ExplicitFamily, is_feasible, is_prefix_feasible
from .errors import CapacityError, DegenerateBoundError, InputError, PolicyError
from .model import Instance, Realization, _evaluator
from .multilinear import FractionalPoint, multilinear_value, optimistic_weight


@dataclass(frozen=True)
class Stop:
    pass


@dataclass(frozen=True)
class Pick:
    item: str
    branches: tuple[tuple[str, "PolicyNode"], ...]

    def __post_init__(self):
        states = [s for s, _ in self.branches]
        if len(set(states)) != len(states):
            raise PolicyError(f"node for {self.item!r} branches twice on one state")
        object.__setattr__(self, "branches", tuple(sorted(self.branches)))

    def child(self, state: str) -> "PolicyNode | None":
        for s, node in self.branches:
            if s == state:
                return node
        return None


PolicyNode = Union[Stop, Pick]

STOP = Stop()


def pick(item: str, branches: Mapping[str, PolicyNode]) -> Pick:
    return Pick(item=item, branches=tuple(branches.items()))


@dataclass(frozen=True)
class Policy:
    """A decision tree; no item may repeat along any root-to-leaf path."""

    root: PolicyNode

    def __post_init__(self):
        def walk(node, seen):
            if isinstance(node, Stop):
                return
            if node.item in seen:
                raise PolicyError(f"item {node.item!r} repeats along a path")
            for _, child in node.branches:
                walk(child, seen | {node.item})

        walk(self.root, frozenset())

    @property
    def depth(self) -> int:
        def deep(node) -> int:
            if isinstance(node, Stop):
                return 0
            return 1 + max((deep(c) for _, c in node.branches), default=0)

        return deep(self.root)

    def item_sequences(self) -> list[tuple[str, ...]]:
        """Every root-to-leaf pick sequence (branch-complete paths)."""
        out: list[tuple[str, ...]] = []

        def walk(node, prefix):
            if isinstance(node, Stop) or not node.branches:
                out.append(prefix + ((node.item,) if isinstance(node, Pick) else ()))
                return
            for _, child in node.branches:
                walk(child, prefix + (node.item,))

        walk(self.root, ())
        return out


STOP_POLICY = Policy(root=STOP)


@dataclass(frozen=True)
class PolicyValue:
    value: float
    per_realization: tuple[tuple[Realization, frozenset[str], float], ...]


def _walk(policy: Policy, realization: Realization) -> tuple[str, ...]:
    node = policy.root
    picked: list[str] = []
    while isinstance(node, Pick):
        state = realization.state_of(node.item)
        child = node.child(state)
        if child is None:
            raise PolicyError(
                f"policy has no branch for {node.item!r} in state {state!r}"
            )
        picked.append(node.item)
        node = child
    return tuple(picked)


def evaluate_policy(instance: Instance, policy: Policy) -> PolicyValue:
    """Exact expected utility of a policy over the support."""
    ev = _evaluator(instance)
    total = Fraction(0)
    rows = []
    for realization, prob in instance.distribution.entries:
        if prob == 0:
            continue
        picked = _walk(policy, realization)
        key = frozenset(
            (instance.item_index(i), instance.state_index(realization.state_of(i)))
            for i in picked
        )
        raw, exact = ev.pair_value(key)
        total += prob * exact
        rows.append((realization, frozenset(picked), raw))
    return PolicyValue(value=float(total), per_realization=tuple(rows))


def policy_is_feasible(policy: Policy, constraint: Constraint) -> bool:
    return all(
        is_prefix_feasible(constraint, seq) for seq in policy.item_sequences()
    )


def optimal_adaptive(
    instance: Instance,
    constraint: Constraint,
    max_items: int = 5,
    max_support: int = 64,
) -> tuple[Policy, float]:
    """Exact optimal adaptive policy by backward induction over histories.

    Histories are keyed by the observed (item, state) pairs for
    downward-closed kinds, and by the full pick sequence for explicit
    families that are not downward-closed.  Ties prefer picking over
    stopping and lower item index among picks.
    """
    if instance.m > max_items:
        raise CapacityError(
            f"adaptive oracle over {instance.m} items exceeds the cap {max_items}"
        )
    if len(instance.distribution.entries) > max_support:
        raise CapacityError(
            f"support of {len(instance.distribution.entries)} exceeds the cap "
            f"{max_support}"
        )
    ev = _evaluator(instance)
    by_sequence = isinstance(constraint, ExplicitFamily) and not constraint.downward_closed
    memo: dict = {}

    def solve(sequence: tuple[int, ...], observed: frozenset) -> tuple[Fraction, int | None]:
        key = (sequence, observed) if by_sequence else observed
        hit = memo.get(key)
        if hit is not None:
            return hit
        stop_value = ev.pair_value(observed)[1]
        matching = [
            (states, prob)
            for states, prob in ev.support
            if prob > 0 and all(states[i] == s for i, s in observed)
        ]
        total = sum((p for _, p in matching), Fraction(0))
        picked_items = {i for i, _ in observed}
        best_value, best_item = stop_value, None
        for e in range(instance.m):
            if e in picked_items:
                continue
            # Prefixes of the current sequence were checked on earlier
            # extensions, so feasibility of the extended set suffices.
            names = [instance.items[i] for i in sequence] + [instance.items[e]]
            if not is_feasible(constraint, set(names)):
                continue
            weights: dict[int, Fraction] = {}
            for states, prob in matching:
                weights[states[e]] = weights.get(states[e], Fraction(0)) + prob
            value = Fraction(0)
            for state, w in sorted(weights.items()):
                child_value, _ = solve(sequence + (e,), observed | {(e, state)})
                value += w / total * child_value
            if value > best_value or (value == best_value and best_item is None):
                best_value, best_item = value, e
        memo[key] = (best_value, best_item)
        return best_value, best_item

    def build(sequence: tuple[int, ...], observed: frozenset) -> PolicyNode:
        key = (sequence, observed) if by_sequence else observed
        _, item = memo[key]
        if item is None:
            return STOP
        branches = {}
        for states, prob in ev.support:
            if prob == 0 or any(states[i] != s for i, s in observed):
                continue
            state = states[item]
            if instance.states[state] not in branches:
                branches[instance.states[state]] = build(
                    sequence + (item,), observed | {(item, state)}
                )
        return pick(instance.items[item], branches)

    value, _ = solve((), frozenset())
    policy = Policy(root=build((), frozenset()))
    return policy, float(value)


def best_nonadaptive(
    instance: Instance, constraint: Constraint, max_items: int = 20
) -> tuple[frozenset[str], float]:
    """Best feasible fixed set by exhaustive enumeration."""
    if instance.m > max_items:
        raise CapacityError(
            f"enumeration over {instance.m} items exceeds the cap {max_items}"
        )
    ev = _evaluator(instance)
    best_value: Fraction | None = None
    candidates: list[tuple[str, ...]] = []
    for mask in range(1 << instance.m):
        items = frozenset(
            instance.items[i] for i in range(instance.m) if mask >> i & 1
        )
        if not is_feasible(constraint, items):
            continue
        value = ev.set_value_exact(mask)
        if best_value is None or value > best_value:
            best_value = value
            candidates = [tuple(sorted(items))]
        elif value == best_value:
            candidates.append(tuple(sorted(items)))
    if best_value is None:
        raise InputError("constraint admits no feasible set, not even the empty one")
    return frozenset(min(candidates)), float(best_value)


def virtual_nonadaptive_value(
    instance: Instance, constraint: Constraint, policy: Policy
) -> float:
    """Expected value of steering the tree with a fresh virtual draw.

    The virtual draw fixes which items get picked; an independent true draw
    supplies the states that are scored.  Exact double enumeration over the
    support.
    """
    if not policy_is_feasible(policy, constraint):
        raise PolicyError("policy has an infeasible pick sequence")
    ev = _evaluator(instance)
    total = Fraction(0)
    for virtual, p_virtual in instance.distribution.entries:
        if p_virtual == 0:
            continue
        picked = _walk(policy, virtual)
        picked_idx = [instance.item_index(i) for i in picked]
        for true_states, p_true in ev.support:
            if p_true == 0:
                continue
            key = frozenset((i, true_states[i]) for i in picked_idx)
            total += p_virtual * p_true * ev.pair_value(key)[1]
    return float(total)


def policy_pick_probabilities(instance: Instance, policy: Policy) -> FractionalPoint:
    """Per-item probability of being picked; a point in the constraint polytope
    whenever the policy is feasible."""
    probs = {item: Fraction(0) for item in instance.items}
    for realization, prob in instance.distribution.entries:
        if prob == 0:
            continue
        for item in _walk(policy, realization):
            probs[item] += prob
    return FractionalPoint(
        tuple(instance.items), tuple(float(probs[i]) for i in instance.items)
    )


@dataclass(frozen=True)
class UpperBoundCheck:
    lhs: float
    rhs: float
    holds: bool


def optimal_upper_bound_check(
    instance: Instance,
    policy: Policy,
    x: FractionalPoint,
    kappa,
    tol: float = 1e-9,
) -> UpperBoundCheck:
    """Check that the policy value is at most the multilinear value at ``x``
    plus 1/kappa times the pick-probability-weighted optimistic weights."""
    kappa = float(kappa)
    if kappa <= 0:
        raise DegenerateBoundError("check is undefined for kappa = 0")
    lhs = evaluate_policy(instance, policy).value
    picks = policy_pick_probabilities(instance, policy)
    rhs = multilinear_value(instance, x) + (1.0 / kappa) * sum(
        picks.value_of(item) * optimistic_weight(instance, x, item)
        for item in instance.items
    )
    return UpperBoundCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs + tol)

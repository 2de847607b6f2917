from fractions import Fraction

import pytest

from stosub import (
    Instance,
    JointDistribution,
    Realization,
    WeightedCoverage,
    common_cause_2,
    generate_product,
)


@pytest.fixture
def cc2():
    return common_cause_2()


@pytest.fixture
def product3():
    return generate_product(3, states_per_item=2, seed=1)


def make_single_item(values: dict[str, float], probs: dict[str, Fraction]) -> Instance:
    """One item whose state determines a scalar value through disjoint coverage."""
    states = tuple(sorted(values))
    targets = tuple(f"t_{s}" for s in states)
    return Instance(
        items=("e",),
        states=states,
        distribution=JointDistribution(
            tuple(
                (Realization((("e", s),)), Fraction(probs[s])) for s in states
            )
        ),
        utility=WeightedCoverage.build(
            targets=targets,
            weights={f"t_{s}": values[s] for s in states},
            coverage={("e", s): (f"t_{s}",) for s in states},
        ),
    )


def make_modular(weights: dict[str, float]) -> Instance:
    """Independent deterministic items, each covering its own private target."""
    items = tuple(sorted(weights))
    return Instance(
        items=items,
        states=("on",),
        distribution=JointDistribution(
            ((Realization(tuple((i, "on") for i in items)), Fraction(1)),)
        ),
        utility=WeightedCoverage.build(
            targets=tuple(f"t_{i}" for i in items),
            weights={f"t_{i}": weights[i] for i in items},
            coverage={(i, "on"): (f"t_{i}",) for i in items},
        ),
    )


@pytest.fixture
def modular3():
    return make_modular({"a": 5.0, "b": 3.0, "c": 1.0})

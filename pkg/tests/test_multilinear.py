import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import stosub as ss
from conftest import make_modular
from helpers import direct_multilinear, direct_set_value, direct_state_value


def grid_points(instance, count, seed):
    import random

    rng = random.Random(seed)
    points = []
    for _ in range(count):
        points.append(
            ss.FractionalPoint(
                tuple(instance.items),
                tuple(rng.random() for _ in instance.items),
            )
        )
    return points


class TestExactValue:
    def test_zero_point(self, cc2):
        assert ss.multilinear_value(cc2, ss.FractionalPoint.zeros(cc2.items)) == 0.0

    def test_all_ones_is_full_set(self, cc2):
        ones = ss.FractionalPoint(cc2.items, (1.0, 1.0))
        assert ss.multilinear_value(cc2, ones) == ss.expected_set_value(
            cc2, set(cc2.items)
        )

    def test_indicator_reproduces_set_value_exactly(self, product3):
        for mask in range(8):
            chosen = {product3.items[i] for i in range(3) if mask >> i & 1}
            x = ss.FractionalPoint(
                product3.items,
                tuple(1.0 if i in chosen else 0.0 for i in product3.items),
            )
            assert ss.multilinear_value(product3, x) == ss.expected_set_value(
                product3, chosen
            )

    def test_modular_linearity(self, modular3):
        x = ss.FractionalPoint(modular3.items, (0.25, 0.5, 0.75))
        expected = 0.25 * 5.0 + 0.5 * 3.0 + 0.75 * 1.0
        assert ss.multilinear_value(modular3, x) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_against_double_enumeration(self, seed):
        inst = ss.generate_common_cause(3, 2, 3, seed)
        for x in grid_points(inst, 4, seed):
            got = ss.multilinear_value(inst, x)
            want = direct_multilinear(inst, x.as_dict())
            assert got == pytest.approx(want, abs=1e-12)

    def test_capacity(self):
        inst = make_modular({f"i{k:02d}": 1.0 for k in range(17)})
        with pytest.raises(ss.CapacityError):
            ss.multilinear_value(inst, ss.FractionalPoint.zeros(inst.items))

    def test_monotone_in_each_coordinate(self, cc2):
        base = ss.FractionalPoint(cc2.items, (0.3, 0.6))
        for item in cc2.items:
            lower = ss.multilinear_value(cc2, base)
            higher = ss.multilinear_value(cc2, base.replace(item, 0.9))
            assert higher >= lower - 1e-12


class TestEstimate:
    def test_indicator_is_exact_with_zero_error(self, cc2):
        x = ss.FractionalPoint(cc2.items, (1.0, 0.0))
        est = ss.multilinear_estimate(cc2, x, sample_count=50, seed=3)
        assert est.mean == ss.expected_set_value(cc2, {"a"})
        assert est.std_error == 0.0

    def test_zero_point(self, cc2):
        est = ss.multilinear_estimate(
            cc2, ss.FractionalPoint.zeros(cc2.items), sample_count=10, seed=0
        )
        assert est.mean == 0.0 and est.std_error == 0.0

    def test_unbiased_against_exact(self, cc2):
        x = ss.FractionalPoint(cc2.items, (0.5, 0.5))
        exact = ss.multilinear_value(cc2, x)
        means, ses = [], []
        for seed in range(100):
            est = ss.multilinear_estimate(cc2, x, sample_count=200, seed=seed)
            means.append(est.mean)
            ses.append(est.std_error)
        grand = sum(means) / len(means)
        combined = math.sqrt(sum(se**2 for se in ses)) / len(ses)
        assert abs(grand - exact) <= 4 * combined

    def test_reproducible(self, cc2):
        x = ss.FractionalPoint(cc2.items, (0.4, 0.7))
        a = ss.multilinear_estimate(cc2, x, 100, seed=9)
        b = ss.multilinear_estimate(cc2, x, 100, seed=9)
        assert a == b
        c = ss.multilinear_estimate(cc2, x, 100, seed=10)
        assert c.mean != a.mean or c.std_error != a.std_error


class TestWeights:
    def test_standard_zero_when_saturated(self, cc2):
        x = ss.FractionalPoint(cc2.items, (1.0, 0.4))
        assert ss.standard_weight(cc2, x, "a") == 0.0

    def test_zero_point_weights_are_singletons(self, cc2):
        zeros = ss.FractionalPoint.zeros(cc2.items)
        for item in cc2.items:
            expected = ss.expected_set_value(cc2, {item})
            assert ss.standard_weight(cc2, zeros, item) == pytest.approx(expected)
            assert ss.optimistic_weight(cc2, zeros, item) == pytest.approx(expected)

    def test_optimistic_equals_standard_at_zero_coordinate(self, cc2):
        x = ss.FractionalPoint(cc2.items, (0.0, 0.8))
        assert ss.optimistic_weight(cc2, x, "a") == ss.standard_weight(cc2, x, "a")

    def test_excision_at_saturated_coordinate(self, cc2):
        x = ss.FractionalPoint(cc2.items, (1.0, 0.0))
        assert ss.optimistic_weight(cc2, x, "a") == ss.expected_set_value(cc2, {"a"})
        assert ss.standard_weight(cc2, x, "a") == 0.0

    @pytest.mark.parametrize("seed", range(4))
    def test_dominance_and_excision_identity(self, seed):
        inst = ss.generate_common_cause(3, 2, 4, seed)
        for x in grid_points(inst, 5, seed + 100):
            for item in inst.items:
                optimistic = ss.optimistic_weight(inst, x, item)
                standard = ss.standard_weight(inst, x, item)
                assert optimistic >= standard - 1e-12
                assert standard == pytest.approx(
                    (1.0 - x.value_of(item)) * optimistic, abs=1e-12
                )

    @pytest.mark.parametrize("seed", range(3))
    def test_standard_weight_matches_value_difference(self, seed):
        inst = ss.generate_product(3, states_per_item=2, seed=seed)
        for x in grid_points(inst, 4, seed):
            for item in inst.items:
                oracle = ss.multilinear_value(
                    inst, x.with_one(item)
                ) - ss.multilinear_value(inst, x)
                assert ss.standard_weight(inst, x, item) == pytest.approx(
                    oracle, abs=1e-12
                )

    def test_optimistic_weight_matches_zeroed_difference(self, cc2):
        x = ss.FractionalPoint(cc2.items, (0.6, 0.3))
        for item in cc2.items:
            zeroed = x.zero_out(item)
            oracle = ss.multilinear_value(
                cc2, zeroed.with_one(item)
            ) - ss.multilinear_value(cc2, zeroed)
            assert ss.optimistic_weight(cc2, x, item) == pytest.approx(
                oracle, abs=1e-12
            )


class TestStateWeight:
    def test_zero_point(self, cc2):
        assert ss.state_weight(
            cc2, ss.FractionalPoint.zeros(cc2.items), "a", "good"
        ) == pytest.approx(2.0)

    def test_indicator_matches_state_marginal(self, cc2):
        x = ss.FractionalPoint(cc2.items, (1.0, 0.0))
        assert ss.state_weight(cc2, x, "b", "good") == pytest.approx(
            ss.state_marginal(cc2, {"a"}, "b", "good")
        )

    def test_brute_force_double_enumeration(self, cc2):
        x = ss.FractionalPoint(cc2.items, (0.3, 0.7))
        total = 0.0
        for mask in range(4):
            subset = {cc2.items[i] for i in range(2) if mask >> i & 1}
            p = 1.0
            for i, item in enumerate(cc2.items):
                p *= x.values[i] if item in subset else 1.0 - x.values[i]
            gain = float(
                direct_state_value(cc2, subset, "b", "good")
                - direct_set_value(cc2, subset)
            )
            total += p * gain
        assert ss.state_weight(cc2, x, "b", "good") == pytest.approx(total, abs=1e-12)


class TestSampleSchedule:
    def test_plug_in(self):
        assert ss.estimation_sample_count(1.0, 1) == 10

    def test_schedule_step_for_two_items(self):
        # ceil(10 * 36**2 * (1 + ln 2)) = ceil(21943.187...) = 21944
        delta = 1.0 / (9 * 2 * 2)
        assert ss.estimation_sample_count(delta, 2) == 21944

    def test_tenth_step_four_items(self):
        assert ss.estimation_sample_count(0.1, 4) == 2387

    def test_single_item_ninth(self):
        assert ss.estimation_sample_count(1.0 / 9.0, 1) == 810

    def test_rejects_bad_delta(self):
        with pytest.raises(ss.InputError):
            ss.estimation_sample_count(0.0, 3)


class TestOptimisticEstimate:
    def test_deterministic_point_is_exact(self, cc2):
        x = ss.FractionalPoint(cc2.items, (1.0, 0.0))
        est = ss.optimistic_weight_estimate(cc2, x, "a", 40, seed=5)
        assert est.mean == ss.expected_set_value(cc2, {"a"})
        assert est.std_error == 0.0

    def test_unbiased_against_exact(self, cc2):
        x = ss.FractionalPoint(cc2.items, (0.5, 0.5))
        exact = ss.optimistic_weight(cc2, x, "b")
        means, ses = [], []
        for seed in range(100):
            est = ss.optimistic_weight_estimate(cc2, x, "b", 150, seed=seed)
            means.append(est.mean)
            ses.append(est.std_error)
        grand = sum(means) / len(means)
        combined = math.sqrt(sum(se**2 for se in ses)) / len(ses)
        assert abs(grand - exact) <= 4 * combined

    def test_stream_key_changes_draws(self, cc2):
        x = ss.FractionalPoint(cc2.items, (0.5, 0.5))
        a = ss.optimistic_weight_estimate(cc2, x, "b", 100, seed=1, stream=(0, 0))
        b = ss.optimistic_weight_estimate(cc2, x, "b", 100, seed=1, stream=(0, 1))
        assert a != b


class TestFractionalPoint:
    def test_zero_out(self):
        x = ss.FractionalPoint(("a", "b"), (0.3, 0.9))
        assert x.zero_out("a").as_dict() == {"a": 0.0, "b": 0.9}
        assert x.as_dict() == {"a": 0.3, "b": 0.9}

    def test_out_of_range_rejected(self):
        with pytest.raises(ss.InputError):
            ss.FractionalPoint(("a",), (1.5,))

    def test_mismatched_items_rejected(self, cc2):
        x = ss.FractionalPoint(("a", "zz"), (0.5, 0.5))
        with pytest.raises(ss.InputError):
            ss.multilinear_value(cc2, x)


@given(
    seed=st.integers(min_value=0, max_value=500),
    coord=st.floats(min_value=0.0, max_value=1.0),
)
@settings(max_examples=25, deadline=None)
def test_value_stays_within_range(seed, coord):
    inst = ss.generate_product(2, states_per_item=2, seed=seed)
    x = ss.FractionalPoint(inst.items, (coord, 1.0 - coord))
    value = ss.multilinear_value(inst, x)
    full = ss.expected_set_value(inst, set(inst.items))
    assert -1e-12 <= value <= full + 1e-12

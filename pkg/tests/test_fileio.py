import json
from fractions import Fraction

import pytest

import stosub as ss
from stosub import fileio


class TestInstanceRoundTrip:
    def test_cc2(self, cc2, tmp_path):
        path = tmp_path / "cc2.json"
        fileio.save_instance(cc2, path)
        assert fileio.load_instance(path) == cc2

    @pytest.mark.parametrize("seed", range(4))
    def test_generated_instances(self, seed, tmp_path):
        inst = ss.generate_common_cause(3, 2, 4, seed)
        path = tmp_path / "inst.json"
        fileio.save_instance(inst, path)
        assert fileio.load_instance(path) == inst

    def test_awkward_floats_survive(self, tmp_path):
        inst = ss.Instance(
            items=("a",),
            states=("x",),
            distribution=ss.JointDistribution(
                ((ss.Realization((("a", "x"),)), Fraction(1)),)
            ),
            utility=ss.WeightedCoverage.build(
                targets=("t",), weights={"t": 0.1 + 0.2}, coverage={("a", "x"): ("t",)}
            ),
        )
        path = tmp_path / "float.json"
        fileio.save_instance(inst, path)
        loaded = fileio.load_instance(path)
        assert loaded == inst
        assert loaded.utility.weights[0] == 0.1 + 0.2

    def test_table_utility_round_trip(self, tmp_path):
        table = ss.ExplicitTable.from_function(
            [("a", "x"), ("a", "y")], lambda key: float(len(key)) / 3.0
        )
        inst = ss.Instance(
            items=("a",),
            states=("x", "y"),
            distribution=ss.JointDistribution(
                (
                    (ss.Realization((("a", "x"),)), Fraction(2, 7)),
                    (ss.Realization((("a", "y"),)), Fraction(5, 7)),
                )
            ),
            utility=table,
        )
        path = tmp_path / "table.json"
        fileio.save_instance(inst, path)
        assert fileio.load_instance(path) == inst

    def test_rational_probabilities_as_strings(self, cc2, tmp_path):
        path = tmp_path / "cc2.json"
        fileio.save_instance(cc2, path)
        doc = json.loads(path.read_text())
        assert doc["distribution"][0]["prob"] == "1/2"


class TestInstanceParsing:
    def test_bad_probability_string(self):
        doc = {
            "items": ["a"],
            "states": ["x"],
            "distribution": [{"assignment": {"a": "x"}, "prob": "one half"}],
            "utility": {
                "kind": "weighted-coverage",
                "targets": ["t"],
                "weights": {"t": 1.0},
                "coverage": {"a": {"x": ["t"]}},
            },
        }
        with pytest.raises(ss.InputError):
            fileio.instance_from_dict(doc)

    def test_missing_field(self):
        with pytest.raises(ss.InputError, match="missing"):
            fileio.instance_from_dict({"items": ["a"]})

    def test_unknown_utility_kind(self):
        with pytest.raises(ss.InputError, match="utility kind"):
            fileio.utility_from_dict({"kind": "mystery"})

    def test_not_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ss.InputError):
            fileio.load_instance(path)


class TestConstraintRoundTrip:
    @pytest.mark.parametrize(
        "constraint",
        [
            ss.UniformMatroid(rank=2),
            ss.PartitionMatroid(blocks=(("a",), ("b", "c")), capacities=(1, 1)),
            ss.Knapsack(costs=(("a", 3.0), ("b", 4.0)), budget=7.0, alpha=0.38),
            ss.ExplicitFamily(feasible_sets=((), ("a",))),
            ss.ExplicitFamily(
                feasible_sets=((), ("a",), ("a", "b")), downward_closed=False
            ),
        ],
    )
    def test_round_trip(self, constraint):
        assert (
            fileio.constraint_from_dict(fileio.constraint_to_dict(constraint))
            == constraint
        )

    def test_embedded_constraint(self, cc2, tmp_path):
        doc = fileio.instance_to_dict(cc2)
        doc["constraint"] = {"kind": "uniform", "k": 1}
        path = tmp_path / "with_constraint.json"
        path.write_text(fileio.dumps(doc))
        inst, constraint = fileio.load_instance_and_constraint(path)
        assert inst == cc2
        assert constraint == ss.UniformMatroid(rank=1)

    def test_unknown_kind(self):
        with pytest.raises(ss.InputError):
            fileio.constraint_from_dict({"kind": "mystery"})


class TestPolicyRoundTrip:
    def test_tree(self, cc2):
        policy, _ = ss.optimal_adaptive(cc2, ss.UniformMatroid(rank=2))
        obj = fileio.policy_to_obj(policy)
        assert fileio.policy_from_obj(obj) == policy

    def test_stop(self):
        assert fileio.policy_from_obj("stop") == ss.Policy(root=ss.STOP)


class TestIndependenceReportSerialization:
    def test_kappa_report(self, cc2):
        doc = fileio.independence_report_to_dict(ss.kappa(cc2))
        assert doc["value"] == "1/2"
        assert doc["clamped"] == "1/2"
        assert doc["witness"]["item"] == "a"
        assert doc["witness"]["observation"] == {"b": "good"}

    def test_gamma_report(self, cc2):
        doc = fileio.independence_report_to_dict(ss.gamma(cc2))
        assert doc["value"] == "1"
        assert "observation_alt" in doc["witness"]

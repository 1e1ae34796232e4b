import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xids.labeling import (
    AutoLabel,
    LabelRegistry,
    auto_label,
    purity_report,
)
from xids.shapley import Attribution


def make_attribution(columns, values):
    values = np.asarray(values, dtype=float)
    return Attribution(
        columns=tuple(columns),
        values=values,
        base_value=0.0,
        prediction=float(values.sum()),
        mode="sampled",
        n_coalitions=8,
    )


class TestAutoLabel:
    def test_alphabetized_hyphen_joined(self):
        attr = make_attribution(
            ["hot", "dst_host_serror_rate", "service", "duration"],
            [0.5, 0.9, 0.2, 0.01],
        )
        label = auto_label(attr, k=3)
        assert label.label == "dst_host_serror_rate-hot-service"
        assert not label.fallback_used

    def test_portsweep_pattern(self):
        attr = make_attribution(
            ["service", "src_bytes", "dst_host_same_srv_rate", "duration"],
            [0.4, 0.3, 0.6, 0.0],
        )
        assert auto_label(attr, k=3).label == "dst_host_same_srv_rate-service-src_bytes"

    def test_magnitude_tie_breaks_lexicographically(self):
        attr = make_attribution(["zeta", "alpha", "mid"], [0.2, 0.2, 0.9])
        label = auto_label(attr, k=2)
        # alpha and zeta tie for rank 2; alpha wins
        assert label.components == ("alpha", "mid")

    def test_negative_values_excluded_under_positive_ranking(self):
        attr = make_attribution(["a", "b", "c", "d"], [0.9, -0.8, 0.5, 0.1])
        label = auto_label(attr, k=3)
        assert "b" not in label.components

    def test_fallback_when_too_few_positive(self):
        attr = make_attribution(["a", "b", "c"], [0.4, -0.9, -0.2])
        label = auto_label(attr, k=3)
        assert label.fallback_used
        assert label.components == ("a", "b", "c")

    def test_abs_ranking_mode(self):
        attr = make_attribution(["a", "b", "c", "d"], [0.1, -0.9, 0.5, 0.2])
        label = auto_label(attr, k=2, rank_by="abs")
        assert label.components == ("b", "c")

    def test_too_few_columns_rejected(self):
        attr = make_attribution(["a", "b"], [0.1, 0.2])
        with pytest.raises(ValueError):
            auto_label(attr, k=3)

    def test_invalid_rank_by(self):
        attr = make_attribution(["a", "b", "c"], [1, 2, 3])
        with pytest.raises(ValueError):
            auto_label(attr, k=3, rank_by="weird")

    @settings(max_examples=30, deadline=None)
    @given(perm_seed=st.integers(min_value=0, max_value=999))
    def test_invariant_under_column_permutation(self, perm_seed):
        rng = np.random.default_rng(perm_seed)
        columns = ["c1", "c2", "c3", "c4", "c5"]
        values = rng.normal(size=5)
        order = rng.permutation(5)
        base = auto_label(make_attribution(columns, values), k=3)
        permuted = auto_label(
            make_attribution([columns[i] for i in order], values[order]), k=3
        )
        assert base.label == permuted.label

    @settings(max_examples=30, deadline=None)
    @given(
        scale=st.floats(min_value=1e-3, max_value=1e3, allow_nan=False),
        seed=st.integers(min_value=0, max_value=999),
    )
    def test_scale_invariance(self, scale, seed):
        rng = np.random.default_rng(seed)
        columns = ["c1", "c2", "c3", "c4"]
        values = rng.normal(size=4)
        a = auto_label(make_attribution(columns, values), k=3)
        b = auto_label(make_attribution(columns, values * scale), k=3)
        assert a.label == b.label

    def test_determinism(self):
        attr = make_attribution(["x", "y", "z", "w"], [0.3, 0.2, 0.5, 0.1])
        assert auto_label(attr, k=3) == auto_label(attr, k=3)


class TestAutoLabelInvariants:
    def test_component_count_enforced(self):
        with pytest.raises(ValueError):
            AutoLabel(label="a-b", components=("a", "b"), contributions={}, k=3)

    def test_sorted_enforced(self):
        with pytest.raises(ValueError):
            AutoLabel(label="b-a", components=("b", "a"), contributions={}, k=2)

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            AutoLabel(label="a-a", components=("a", "a"), contributions={}, k=2)


class TestLabelRegistry:
    def test_register_then_resolve(self):
        registry = LabelRegistry()
        registry.register("dst_host_same_srv_rate-service-src_bytes", "portsweep")
        res = registry.resolve("dst_host_same_srv_rate-service-src_bytes")
        assert res.is_known and res.analyst_label == "portsweep"

    def test_unseen_key_is_novel(self):
        assert LabelRegistry().resolve("nothing-here").kind == "novel"

    def test_near_miss_is_novel(self):
        registry = LabelRegistry()
        registry.register("a-b-c", "portsweep")
        assert registry.resolve("a-b-d").kind == "novel"

    def test_re_register_wins_and_keeps_history(self):
        registry = LabelRegistry()
        registry.register("a-b-c", "first", timestamp=1.0)
        registry.register("a-b-c", "second", timestamp=2.0)
        assert registry.resolve("a-b-c").analyst_label == "second"
        assert len(registry.history("a-b-c")) == 2

    def test_many_to_one_mapping(self):
        registry = LabelRegistry()
        registry.register("dst_host_same_srv_rate-service-src_bytes", "portsweep")
        registry.register("dst_host_same_src_port_rate-service-src_bytes", "portsweep")
        assert registry.resolve("dst_host_same_srv_rate-service-src_bytes").analyst_label == "portsweep"
        assert registry.resolve("dst_host_same_src_port_rate-service-src_bytes").analyst_label == "portsweep"

    def test_empty_analyst_label_rejected(self):
        with pytest.raises(ValueError):
            LabelRegistry().register("a-b-c", "")

    def test_resolve_does_not_mutate(self):
        registry = LabelRegistry()
        registry.register("a-b-c", "x")
        before = registry.to_dict()
        registry.resolve("a-b-c")
        registry.resolve("unknown")
        assert registry.to_dict() == before

    def test_journal_round_trip(self, tmp_path):
        path = tmp_path / "registry.jsonl"
        registry = LabelRegistry(path)
        registry.register("a-b-c", "portsweep", analyst="kim", note="bucket rename")
        registry.register("d-e-f", "neptune")
        registry.register("a-b-c", "portscan")
        reloaded = LabelRegistry(path)
        assert reloaded.to_dict() == registry.to_dict()
        assert len(reloaded.history("a-b-c")) == 2

    def test_journal_survives_torn_final_write(self, tmp_path):
        path = tmp_path / "registry.jsonl"
        registry = LabelRegistry(path)
        registry.register("a-b-c", "portsweep", timestamp=1.0)
        registry.register("d-e-f", "neptune", timestamp=2.0)
        with path.open("a", encoding="utf-8") as fh:
            fh.write('{"auto_label": "x-y-z", "analyst')  # simulated crash mid-write
        recovered = LabelRegistry(path)
        assert recovered.resolve("a-b-c").analyst_label == "portsweep"
        assert recovered.resolve("d-e-f").analyst_label == "neptune"
        assert recovered.resolve("x-y-z").kind == "novel"

    def test_autolabel_object_accepted_as_key(self):
        attr = make_attribution(["a", "b", "c"], [0.5, 0.4, 0.3])
        label = auto_label(attr, k=3)
        registry = LabelRegistry()
        registry.register(label, "teardrop")
        assert registry.resolve(label).analyst_label == "teardrop"


class TestPurityReport:
    def test_uniform_labels_pure(self):
        pairs = [("guess_passwd", "a-b-c")] * 5
        report = purity_report(pairs)
        assert report.per_attack["guess_passwd"].purity == 1.0
        assert report.per_attack["guess_passwd"].distinct_labels == 1

    def test_four_of_five_purity(self):
        pairs = [("portsweep", "a-b-c")] * 4 + [("portsweep", "a-b-d")]
        p = purity_report(pairs).per_attack["portsweep"]
        assert p.purity == pytest.approx(0.8)
        assert p.modal_label == "a-b-c"
        assert p.distinct_labels == 2

    def test_single_instance_trivially_pure(self):
        report = purity_report([("neptune", "x-y-z")])
        assert report.per_attack["neptune"].purity == 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            purity_report([])

    def test_mapping_table(self):
        pairs = [("a", "l1"), ("a", "l1"), ("a", "l2"), ("b", "l3")]
        report = purity_report(pairs)
        assert report.mapping["a"] == {"l1": 2, "l2": 1}
        assert report.mapping["b"] == {"l3": 1}

import numpy as np
import pytest

from xids.local_surrogate import (
    PrototypeSet,
    lime_explain,
    similar_instances,
)


def linear_scorer(weights, intercept=0.0):
    w = np.asarray(weights, dtype=float)
    return lambda X: np.atleast_2d(X) @ w + intercept


COLUMNS = ["c0", "c1", "c2", "c3"]


class TestLimeExplain:
    def test_recovers_single_active_column(self):
        f = linear_scorer([0.0, 3.0, 0.0, 0.0])
        x = np.full(4, 0.5)
        surrogate = lime_explain(f, x, COLUMNS, n_perturb=400, k=2, seed=1)
        assert surrogate.weights.get("c1", 0.0) == pytest.approx(3.0, abs=0.05)
        for col, w in surrogate.weights.items():
            if col != "c1":
                assert abs(w) < 0.05

    def test_sign_matches(self):
        f = linear_scorer([-2.0, 0.0, 0.0, 0.0])
        surrogate = lime_explain(f, np.full(4, 0.5), COLUMNS, n_perturb=300, k=1, seed=2)
        assert surrogate.weights["c0"] < 0

    def test_wide_kernel_approaches_plain_least_squares(self):
        w_true = np.array([1.0, -1.5, 0.5, 2.0])
        f = linear_scorer(w_true)
        x = np.full(4, 0.5)
        surrogate = lime_explain(
            f, x, COLUMNS, n_perturb=600, k=4, kernel_width=1e6, seed=3
        )
        recovered = np.array([surrogate.weights.get(c, 0.0) for c in COLUMNS])
        assert recovered == pytest.approx(w_true, abs=0.05)

    def test_deterministic_for_fixed_seed(self):
        f = linear_scorer([1.0, 2.0, 0.0, -1.0])
        x = np.full(4, 0.4)
        a = lime_explain(f, x, COLUMNS, n_perturb=200, k=3, seed=9)
        b = lime_explain(f, x, COLUMNS, n_perturb=200, k=3, seed=9)
        assert a == b

    def test_r2_high_on_linear_scorer(self):
        f = linear_scorer([1.0, -2.0, 0.5, 0.0])
        surrogate = lime_explain(f, np.full(4, 0.5), COLUMNS, n_perturb=300, k=4, seed=5)
        assert surrogate.r2 >= 0.99

    def test_sparsity_budget(self):
        f = linear_scorer([1.0, 1.0, 1.0, 1.0])
        surrogate = lime_explain(f, np.full(4, 0.5), COLUMNS, n_perturb=300, k=2, seed=7)
        assert len(surrogate.weights) <= 2

    def test_perturbation_floor(self):
        with pytest.raises(ValueError, match="10\\*k"):
            lime_explain(linear_scorer([1, 0, 0, 0]), np.zeros(4), COLUMNS, n_perturb=19, k=2)

    def test_onehot_group_resampled_from_marginals(self):
        columns = ["num", "cat_a", "cat_b"]
        train = np.array([[0.5, 1.0, 0.0]] * 8 + [[0.5, 0.0, 1.0]] * 2)

        def scorer(X):
            X = np.atleast_2d(X)
            return 2.0 * X[:, 1] - X[:, 2]

        surrogate = lime_explain(
            scorer, np.array([0.5, 1.0, 0.0]), columns,
            n_perturb=400, k=3, seed=11,
            onehot_groups=[(1, 2)], train_X=train,
        )
        assert surrogate.weights.get("cat_a", 0.0) > 0.5

    def test_degenerate_perturbations_error(self):
        # nothing to perturb: no numeric columns, no groups resampled
        with pytest.raises(ValueError, match="identical"):
            lime_explain(
                linear_scorer([1.0]), np.array([0.5]), ["c0"],
                n_perturb=100, k=1, seed=0, numeric_idx=[], noise_halfwidth=0.0,
            )


class TestSimilarInstances:
    def test_exact_match_ranks_first_with_weight_one(self):
        rng = np.random.default_rng(1)
        train = rng.uniform(size=(30, 4))
        x = train[13]
        protos = similar_instances(x, train, n=5)
        assert protos.prototypes[0].index == 13
        assert protos.prototypes[0].weight == pytest.approx(1.0)
        assert protos.prototypes[0].closeness == pytest.approx(np.ones(4))

    def test_weights_sorted_non_increasing(self):
        rng = np.random.default_rng(2)
        train = rng.uniform(size=(50, 4))
        protos = similar_instances(rng.uniform(size=4), train, n=10)
        weights = [p.weight for p in protos.prototypes]
        assert weights == sorted(weights, reverse=True)

    def test_n_larger_than_train_returns_all(self):
        rng = np.random.default_rng(3)
        train = rng.uniform(size=(4, 3))
        protos = similar_instances(rng.uniform(size=3), train, n=10)
        assert len(protos) == 4

    def test_labels_carried(self):
        train = np.array([[0.0, 0.0], [1.0, 1.0]])
        protos = similar_instances(np.zeros(2), train, n=2, labels=["normal", "neptune"])
        assert protos.prototypes[0].label == "normal"

    def test_closeness_in_unit_interval(self):
        rng = np.random.default_rng(4)
        train = rng.uniform(size=(20, 5))
        protos = similar_instances(rng.uniform(size=5), train, n=5)
        for p in protos.prototypes:
            assert p.closeness.min() >= 0.0 and p.closeness.max() <= 1.0

    def test_empty_train_rejected(self):
        with pytest.raises(ValueError):
            similar_instances(np.zeros(2), np.empty((0, 2)))

    def test_sorted_invariant_enforced(self):
        from xids.local_surrogate import Prototype

        bad = (
            Prototype(0, 0.2, np.zeros(1), np.ones(1)),
            Prototype(1, 0.9, np.zeros(1), np.ones(1)),
        )
        with pytest.raises(ValueError):
            PrototypeSet(prototypes=bad, kernel_width=1.0)

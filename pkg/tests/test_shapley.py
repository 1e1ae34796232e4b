import itertools
import math

import numpy as np
import pytest

from xids.shapley import (
    Attribution,
    Background,
    DimensionError,
    PlayerGrouping,
    exact_shapley,
    kernel_shap,
    kernel_weight,
    masked_eval,
    select_background,
    summarize,
)


def shapley_by_permutations(scorer, x, background):
    """Independent oracle: average marginal contribution over every player
    ordering. Only feasible for a handful of players."""
    m = len(x)
    phi = np.zeros(m)
    for perm in itertools.permutations(range(m)):
        present: set[int] = set()
        for i in perm:
            v_with = masked_eval(scorer, x, present | {i}, background)
            v_without = masked_eval(scorer, x, present, background)
            phi[i] += v_with - v_without
            present.add(i)
    return phi / math.factorial(m)


def linear_scorer(weights, intercept=0.0):
    w = np.asarray(weights, dtype=float)
    return lambda X: np.atleast_2d(X) @ w + intercept


@pytest.fixture
def bg_zero_2d():
    return Background(X=np.zeros((1, 2)))


class TestMaskedEval:
    def test_full_coalition_is_model_output(self, bg_zero_2d):
        f = linear_scorer([2.0, -1.0])
        x = np.array([1.0, 1.0])
        assert masked_eval(f, x, {0, 1}, bg_zero_2d) == pytest.approx(1.0)

    def test_empty_coalition_is_background_mean(self):
        f = linear_scorer([1.0, 1.0])
        bg = Background(X=np.array([[0.0, 0.0], [2.0, 2.0]]))
        assert masked_eval(f, np.array([5.0, 5.0]), set(), bg) == pytest.approx(2.0)

    def test_single_background_row_is_single_substitution(self):
        f = linear_scorer([1.0, 10.0])
        bg = Background(X=np.array([[3.0, 4.0]]))
        # coalition {0}: x0 kept, column 1 from background
        assert masked_eval(f, np.array([1.0, 1.0]), {0}, bg) == pytest.approx(1.0 + 40.0)


class TestExactShapley:
    def test_linear_closed_form(self, bg_zero_2d):
        # f(x) = 2 x0 - x1 at x=(1,1) against a zero background:
        # phi_i = w_i * (x_i - b_i) -> (2, -1), phi0 = 0
        attr = exact_shapley(linear_scorer([2.0, -1.0]), np.array([1.0, 1.0]), bg_zero_2d)
        assert attr.base_value == pytest.approx(0.0, abs=1e-12)
        assert attr.values == pytest.approx([2.0, -1.0], abs=1e-9)
        assert attr.mode == "exact"

    def test_linear_closed_form_general_background(self):
        rng = np.random.default_rng(11)
        w = rng.normal(size=5)
        x = rng.uniform(size=5)
        bg = Background(X=rng.uniform(size=(7, 5)))
        attr = exact_shapley(linear_scorer(w, intercept=0.3), x, bg)
        expected = w * (x - bg.X.mean(axis=0))
        assert attr.values == pytest.approx(expected, abs=1e-9)

    def test_matches_permutation_oracle_nonlinear(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(size=4)
        bg = Background(X=rng.uniform(size=(5, 4)))

        def scorer(X):
            X = np.atleast_2d(X)
            return X[:, 0] * X[:, 1] + np.sin(X[:, 2]) + 0.5 * X[:, 3] ** 2

        attr = exact_shapley(scorer, x, bg)
        oracle = shapley_by_permutations(scorer, x, bg)
        assert attr.values == pytest.approx(oracle, abs=1e-9)

    def test_dummy_axiom(self):
        rng = np.random.default_rng(5)
        bg = Background(X=rng.uniform(size=(6, 3)))
        f = linear_scorer([1.5, 0.0, -2.0])  # column 1 never read
        attr = exact_shapley(f, rng.uniform(size=3), bg)
        assert attr.values[1] == pytest.approx(0.0, abs=1e-12)

    def test_symmetry_axiom(self):
        bg = Background(X=np.zeros((1, 3)))

        def symmetric(X):
            X = np.atleast_2d(X)
            return X[:, 0] + X[:, 1] + X[:, 0] * X[:, 1] + 3.0 * X[:, 2]

        x = np.array([0.7, 0.7, 0.2])
        attr = exact_shapley(symmetric, x, bg)
        assert attr.values[0] == pytest.approx(attr.values[1], abs=1e-12)

    def test_linearity_axiom(self):
        rng = np.random.default_rng(9)
        x = rng.uniform(size=3)
        bg = Background(X=rng.uniform(size=(4, 3)))
        f = linear_scorer(rng.normal(size=3))

        def g(X):
            X = np.atleast_2d(X)
            return X[:, 0] * X[:, 2]

        def f_plus_g(X):
            return f(X) + g(X)

        phi_f = exact_shapley(f, x, bg).values
        phi_g = exact_shapley(g, x, bg).values
        phi_sum = exact_shapley(f_plus_g, x, bg).values
        assert phi_sum == pytest.approx(phi_f + phi_g, abs=1e-9)

    def test_local_accuracy(self):
        rng = np.random.default_rng(21)
        x = rng.uniform(size=6)
        bg = Background(X=rng.uniform(size=(8, 6)))

        def scorer(X):
            X = np.atleast_2d(X)
            return np.tanh(X.sum(axis=1)) + X[:, 0] * X[:, 5]

        attr = exact_shapley(scorer, x, bg)
        fx = scorer(x[None, :])[0]
        assert attr.base_value + attr.values.sum() == pytest.approx(fx, abs=1e-9)

    def test_dimension_guard(self):
        bg = Background(X=np.zeros((1, 21)))
        with pytest.raises(DimensionError):
            exact_shapley(linear_scorer(np.ones(21)), np.ones(21), bg)


class TestKernelWeight:
    def test_hand_values(self):
        assert kernel_weight(4, 1) == pytest.approx(0.25)
        assert kernel_weight(4, 2) == pytest.approx(0.125)
        assert kernel_weight(2, 1) == pytest.approx(0.5)

    @pytest.mark.parametrize("s", [0, 4, -1, 7])
    def test_trivial_sizes_rejected(self, s):
        with pytest.raises(ValueError):
            kernel_weight(4, s)


class TestKernelShap:
    def test_full_enumeration_matches_exact_linear(self, bg_zero_2d):
        f = linear_scorer([2.0, -1.0])
        x = np.array([1.0, 1.0])
        attr = kernel_shap(f, x, bg_zero_2d, n_coalitions=1000)
        assert attr.mode == "exact"
        assert attr.values == pytest.approx([2.0, -1.0], abs=1e-6)

    def test_full_enumeration_matches_exact_random_scorers(self):
        rng = np.random.default_rng(17)
        for m in (2, 3, 5, 8):
            x = rng.uniform(size=m)
            bg = Background(X=rng.uniform(size=(4, m)))
            w = rng.normal(size=m)
            q = rng.normal(size=m)

            def scorer(X, w=w, q=q):
                X = np.atleast_2d(X)
                return X @ w + (X ** 2) @ q + np.prod(X[:, :2], axis=1)

            exact = exact_shapley(scorer, x, bg)
            kernel = kernel_shap(scorer, x, bg, n_coalitions=2 ** m)
            assert kernel.values == pytest.approx(exact.values, abs=1e-6)

    def test_full_enumeration_matches_exact_at_twelve_players(self):
        rng = np.random.default_rng(41)
        m = 12
        x = rng.uniform(size=m)
        bg = Background(X=rng.uniform(size=(3, m)))

        def scorer(X):
            X = np.atleast_2d(X)
            return np.tanh(X.sum(axis=1)) + X[:, 0] * X[:, 6] - X[:, 11] ** 2

        exact = exact_shapley(scorer, x, bg)
        kernel = kernel_shap(scorer, x, bg, n_coalitions=2 ** m)
        assert np.max(np.abs(exact.values - kernel.values)) <= 1e-6

    def test_dummy_column_full_enumeration(self):
        rng = np.random.default_rng(23)
        bg = Background(X=rng.uniform(size=(5, 4)))
        f = linear_scorer([1.0, 0.0, 2.0, -3.0])
        attr = kernel_shap(f, rng.uniform(size=4), bg, n_coalitions=100)
        assert abs(attr.values[1]) <= 1e-6

    def test_sampled_mode_deterministic(self):
        rng = np.random.default_rng(29)
        m = 12
        x = rng.uniform(size=m)
        bg = Background(X=rng.uniform(size=(6, m)))
        f = linear_scorer(rng.normal(size=m))
        a = kernel_shap(f, x, bg, n_coalitions=64, seed=42)
        b = kernel_shap(f, x, bg, n_coalitions=64, seed=42)
        assert a.mode == "sampled"
        assert np.array_equal(a.values, b.values)

    def test_sampled_mode_local_accuracy(self):
        rng = np.random.default_rng(31)
        m = 15
        x = rng.uniform(size=m)
        bg = Background(X=rng.uniform(size=(10, m)))

        def scorer(X):
            X = np.atleast_2d(X)
            return np.exp(-np.sum((X - 0.5) ** 2, axis=1))

        attr = kernel_shap(scorer, x, bg, n_coalitions=80, seed=1)
        fx = scorer(x[None, :])[0]
        assert attr.base_value + attr.values.sum() == pytest.approx(fx, abs=1e-6)

    def test_sampled_close_to_exact_on_linear(self):
        # linear games are identified exactly by the constrained WLS
        rng = np.random.default_rng(37)
        m = 10
        w = rng.normal(size=m)
        x = rng.uniform(size=m)
        bg = Background(X=rng.uniform(size=(8, m)))
        attr = kernel_shap(linear_scorer(w), x, bg, n_coalitions=200, seed=3)
        expected = w * (x - bg.X.mean(axis=0))
        assert attr.values == pytest.approx(expected, abs=1e-6)

    def test_budget_floor(self):
        bg = Background(X=np.zeros((1, 6)))
        with pytest.raises(ValueError, match="M\\+2"):
            kernel_shap(linear_scorer(np.ones(6)), np.ones(6), bg, n_coalitions=7)

    def test_single_player(self):
        bg = Background(X=np.zeros((1, 1)))
        attr = kernel_shap(linear_scorer([3.0]), np.array([2.0]), bg)
        assert attr.values == pytest.approx([6.0])


class TestGrouping:
    def test_collapsed_game_sums_group_credit(self):
        # two columns acting as one one-hot group; the group player carries
        # the joint credit of both columns
        grouping = PlayerGrouping(names=("num", "cat"), column_groups=((0,), (1, 2)))
        bg = Background(X=np.array([[0.0, 0.0, 1.0]]))  # background: category B
        x = np.array([0.8, 1.0, 0.0])  # instance: category A

        def scorer(X):
            X = np.atleast_2d(X)
            return 2.0 * X[:, 0] + 3.0 * X[:, 1] - 1.0 * X[:, 2]

        attr = exact_shapley(scorer, x, bg, grouping=grouping)
        # switching cat from background B to instance A changes f by 3+1=4
        assert attr.values == pytest.approx([1.6, 4.0], abs=1e-9)
        assert attr.columns == ("num", "cat")

    def test_subset_players(self):
        grouping = PlayerGrouping.raw(["a", "b", "c"])
        sub = grouping.subset(["c", "a"])
        assert sub.names == ("c", "a")
        assert sub.column_groups == ((2,), (0,))
        with pytest.raises(KeyError):
            grouping.subset(["nope"])


class TestAttribution:
    def test_local_accuracy_enforced(self):
        with pytest.raises(ValueError, match="local accuracy"):
            Attribution(
                columns=("a", "b"), values=np.array([1.0, 1.0]), base_value=0.0,
                prediction=5.0, mode="sampled", n_coalitions=4,
            )

    def test_json_round_trip(self):
        attr = Attribution(
            columns=("a", "b"), values=np.array([1.0, 2.0]), base_value=0.5,
            prediction=3.5, mode="sampled", n_coalitions=8, seed=7,
        )
        again = Attribution.from_json(attr.to_json())
        assert again.as_dict() == attr.as_dict()
        assert again.seed == 7


class TestSelectBackground:
    def test_only_normal_rows_chosen(self):
        X = np.arange(20, dtype=float).reshape(10, 2)
        y = np.array([0, 1] * 5)
        bg = select_background(X, y, size=3, seed=0)
        assert bg.size == 3
        assert all(row[0] % 4 == 0 for row in bg.X)  # even rows are normal

    def test_no_normals_errors(self):
        with pytest.raises(ValueError):
            select_background(np.ones((3, 2)), np.ones(3), size=2, seed=0)


class TestSummarize:
    def _attr(self, cols, values):
        vals = np.asarray(values, dtype=float)
        return Attribution(
            columns=cols, values=vals, base_value=0.0, prediction=float(vals.sum()),
            mode="sampled", n_coalitions=4, inputs=np.zeros(len(cols)),
        )

    def test_single_attribution_orders_by_abs(self):
        s = summarize([self._attr(("a", "b", "c"), [0.1, -0.9, 0.5])])
        assert s.ordering == ("b", "c", "a")

    def test_tie_breaks_lexicographically(self):
        s = summarize([self._attr(("z", "a"), [0.5, -0.5])])
        assert s.ordering == ("a", "z")

    def test_all_zero(self):
        s = summarize([self._attr(("b", "a"), [0.0, 0.0])])
        assert s.ordering == ("a", "b")

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            summarize([])

    def test_mean_abs_over_set(self):
        s = summarize([
            self._attr(("a", "b"), [1.0, 0.0]),
            self._attr(("a", "b"), [-3.0, 0.0]),
        ])
        assert s.mean_abs["a"] == pytest.approx(2.0)
        assert s.points["a"] == [(0.0, 1.0), (0.0, -3.0)]

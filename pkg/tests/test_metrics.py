import numpy as np
import pytest
from sklearn import metrics as skm

from xids.metrics import classification_report


class TestAgainstSklearnOracle:
    @pytest.mark.parametrize("seed", range(5))
    def test_random_predictions_match_sklearn(self, seed):
        rng = np.random.default_rng(seed)
        y_true = rng.integers(0, 2, size=500)
        y_pred = rng.integers(0, 2, size=500)
        report = classification_report(y_true, y_pred)
        expected = skm.classification_report(y_true, y_pred, output_dict=True, zero_division=0)
        for c in (0, 1):
            assert report.per_class[c].precision == pytest.approx(expected[str(c)]["precision"])
            assert report.per_class[c].recall == pytest.approx(expected[str(c)]["recall"])
            assert report.per_class[c].f1 == pytest.approx(expected[str(c)]["f1-score"])
            assert report.per_class[c].support == expected[str(c)]["support"]
        assert report.accuracy == pytest.approx(expected["accuracy"])
        assert report.macro_f1 == pytest.approx(expected["macro avg"]["f1-score"])
        assert report.weighted_f1 == pytest.approx(expected["weighted avg"]["f1-score"])


class TestEdgeCases:
    def test_perfect_predictions(self):
        y = [0, 1, 0, 1, 1]
        report = classification_report(y, y)
        assert report.accuracy == 1.0
        for m in report.per_class.values():
            assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)

    def test_all_predicted_attack_on_balanced_data(self):
        y_true = [0] * 50 + [1] * 50
        y_pred = [1] * 100
        report = classification_report(y_true, y_pred)
        assert report.per_class[1].recall == 1.0
        assert report.per_class[1].precision == 0.5

    def test_supports_sum_to_total(self):
        rng = np.random.default_rng(9)
        y_true = rng.integers(0, 2, size=77)
        report = classification_report(y_true, rng.integers(0, 2, size=77))
        assert sum(m.support for m in report.per_class.values()) == report.total == 77

    def test_f1_is_harmonic_mean(self):
        rng = np.random.default_rng(13)
        y_true = rng.integers(0, 2, size=200)
        y_pred = rng.integers(0, 2, size=200)
        report = classification_report(y_true, y_pred)
        for m in report.per_class.values():
            if m.precision + m.recall:
                assert m.f1 == pytest.approx(
                    2 * m.precision * m.recall / (m.precision + m.recall)
                )

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            classification_report([], [])

    def test_mismatched_shapes_rejected(self):
        with pytest.raises(ValueError):
            classification_report([0, 1], [0])


class TestRendering:
    def test_text_layout(self):
        report = classification_report([0, 0, 1, 1], [0, 1, 1, 1])
        text = report.to_text()
        assert "precision" in text and "f1-score" in text and "support" in text
        assert "macro avg" in text and "weighted avg" in text

    def test_json_round_trips(self):
        import json

        report = classification_report([0, 1, 1], [0, 1, 0])
        doc = json.loads(report.to_json())
        assert doc["classes"]["1"]["support"] == 2
        assert doc["total"] == 3

import math
import random

import pytest

from oracles import sweep_oracle

from rumormatch import evaluation
from rumormatch.corpus import Label, LabeledTweet
from rumormatch.errors import (
    DegenerateLabelsError,
    NoRumorLabelsError,
    UnreachablePrecisionError,
)
from rumormatch.evaluation import (
    fixed_point_eval,
    identification_accuracy,
    operating_point,
    sweep,
    write_pr_curve,
)
from rumormatch.matchers import MatchResult


def rumor(tid, aid="a1"):
    return LabeledTweet(tweet_id=tid, label=Label.RUMOR, article_id=aid)


def nonrumor(tid):
    return LabeledTweet(tweet_id=tid, label=Label.NONRUMOR)


class TestSweep:
    def test_perfectly_separable(self):
        result = sweep({"r1": 0.9, "n1": 0.1}, [rumor("r1"), nonrumor("n1")])
        perfect = [p for p in result.points if p.precision == 1.0 and p.recall == 1.0]
        assert perfect
        assert result.max_f1_point.f1 == 1.0

    def test_inverted_scores(self):
        result = sweep({"r1": 0.1, "n1": 0.9}, [rumor("r1"), nonrumor("n1")])
        full_recall = [p for p in result.points if p.recall == 1.0]
        assert full_recall
        assert all(p.precision == 0.5 for p in full_recall)

    def test_six_tweet_fixture_hand_enumeration(self):
        # scores: r1 0.9, n1 0.8, r2 0.7, r3 0.5, n2 0.5, n3 0.2
        # thresholds (strict >): 0.9 -> 0P; 0.8 -> TP1 FP0; 0.7 -> TP1 FP1;
        # 0.5 -> TP2 FP1; 0.2 -> TP3 FP2; -inf -> TP3 FP3
        scores = {"r1": 0.9, "n1": 0.8, "r2": 0.7, "r3": 0.5, "n2": 0.5, "n3": 0.2}
        labels = [rumor("r1"), rumor("r2"), rumor("r3"),
                  nonrumor("n1"), nonrumor("n2"), nonrumor("n3")]
        result = sweep(scores, labels)
        got = [(p.threshold, p.tp, p.fp, p.fn) for p in result.points]
        assert got == [
            (0.9, 0, 0, 3),
            (0.8, 1, 0, 2),
            (0.7, 1, 1, 2),
            (0.5, 2, 1, 1),
            (0.2, 3, 2, 0),
            (float("-inf"), 3, 3, 0),
        ]
        # spot-check one point's derived values: threshold 0.5
        p = result.points[3]
        assert p.precision == pytest.approx(2 / 3)
        assert p.recall == pytest.approx(2 / 3)

    def test_degenerate_labels(self):
        with pytest.raises(DegenerateLabelsError):
            sweep({"r1": 0.9, "r2": 0.1}, [rumor("r1"), rumor("r2")])

    def test_starts_at_precision_one_recall_zero(self):
        result = sweep({"r1": 0.3, "n1": 0.7}, [rumor("r1"), nonrumor("n1")])
        top = result.points[0]
        assert (top.precision, top.recall) == (1.0, 0.0)

    def test_matches_reclassification_oracle_randomly(self):
        rng = random.Random(31)
        for _ in range(100)        :
            n = rng.randint(2, 60)
            labels = []
            scores = {}
            # force both classes
            kinds = [True, False] + [rng.random() < 0.5 for _ in range(n - 2)]
            for i, is_rumor in enumerate(kinds):
                tid = f"t{i}"
                labels.append(rumor(tid) if is_rumor else nonrumor(tid))
                scores[tid] = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0, rng.random()])
            result = sweep(scores, labels)
            expected = sweep_oracle(scores, labels)
            got = [(p.threshold, p.tp, p.fp, p.fn) for p in result.points]
            assert got == expected
            recalls = [p.recall for p in result.points]
            assert all(b >= a for a, b in zip(recalls, recalls[1:]))

    def test_confusion_identities(self):
        scores = {"r1": 0.9, "r2": 0.4, "n1": 0.6}
        labels = [rumor("r1"), rumor("r2"), nonrumor("n1")]
        for p in sweep(scores, labels).points:
            assert p.tp + p.fn == 2


class TestFixedPoint:
    def test_all_negative_predictions(self):
        labels = [rumor("r1"), nonrumor("n1")]
        point = fixed_point_eval({"r1": False, "n1": False}, labels)
        assert (point.precision, point.recall, point.f1) == (1.0, 0.0, 0.0)

    def test_all_correct(self):
        labels = [rumor("r1"), nonrumor("n1")]
        point = fixed_point_eval({"r1": True, "n1": False}, labels)
        assert (point.precision, point.recall) == (1.0, 1.0)

    def test_hand_confusion_matrix(self):
        # 1 TP, 1 FP, 3 FN
        labels = [rumor("r1"), rumor("r2"), rumor("r3"), rumor("r4"), nonrumor("n1")]
        preds = {"r1": True, "r2": False, "r3": False, "r4": False, "n1": True}
        point = fixed_point_eval(preds, labels)
        assert point.precision == 0.5
        assert point.recall == 0.25
        assert point.f1 == pytest.approx(1 / 3)
        assert math.isnan(point.threshold)


class TestIdentification:
    def test_all_correct(self):
        labels = [rumor("r1", "a1"), rumor("r2", "a2")]
        matches = {"r1": MatchResult("r1", "a1", 5.0), "r2": MatchResult("r2", "a2", 5.0)}
        assert identification_accuracy(matches, labels) == 1.0

    def test_none_correct(self):
        labels = [rumor("r1", "a1")]
        matches = {"r1": MatchResult("r1", "a2", 5.0)}
        assert identification_accuracy(matches, labels) == 0.0

    def test_four_of_five(self):
        labels = [rumor(f"r{i}", f"a{i}") for i in range(5)]
        matches = {
            f"r{i}": MatchResult(f"r{i}", f"a{i}" if i else "wrong", 1.0)
            for i in range(5)
        }
        assert identification_accuracy(matches, labels) == 0.8

    def test_nonrumor_labels_ignored(self):
        labels = [rumor("r1", "a1"), nonrumor("n1")]
        matches = {"r1": MatchResult("r1", "a1", 5.0)}
        assert identification_accuracy(matches, labels) == 1.0

    def test_no_rumor_labels(self):
        with pytest.raises(NoRumorLabelsError):
            identification_accuracy({}, [nonrumor("n1")])

    def test_invariant_under_monotone_score_transform(self):
        # accuracy depends only on best_article_id, which argmax preserves
        labels = [rumor("r1", "a1")]
        for scale in (1.0, 2.0, 100.0):
            matches = {"r1": MatchResult("r1", "a1", 5.0 * scale)}
            assert identification_accuracy(matches, labels) == 1.0


class TestOperatingPoint:
    def test_separable_reaches_perfect_point(self):
        result = sweep({"r1": 0.9, "n1": 0.1}, [rumor("r1"), nonrumor("n1")])
        point = operating_point(result, 1.0)
        assert (point.precision, point.recall) == (1.0, 1.0)

    def test_unreachable_precision(self):
        # rumor always scores below the nonrumor: achieved precision <= 0.5
        result = sweep({"r1": 0.1, "n1": 0.9}, [rumor("r1"), nonrumor("n1")])
        with pytest.raises(UnreachablePrecisionError):
            operating_point(result, 0.9)

    def test_prefers_highest_recall_above_floor(self):
        scores = {"r1": 0.9, "r2": 0.8, "n1": 0.5, "r3": 0.4}
        labels = [rumor("r1"), rumor("r2"), rumor("r3"), nonrumor("n1")]
        point = operating_point(sweep(scores, labels), 0.9)
        assert point.recall == pytest.approx(2 / 3)


class TestCsvExport:
    def test_pr_curve_format(self, tmp_path):
        result = sweep({"r1": 0.9, "n1": 0.1}, [rumor("r1"), nonrumor("n1")])
        p = tmp_path / "pr_curve.csv"
        write_pr_curve(result.points, p)
        lines = p.read_text().splitlines()
        assert lines[0] == "threshold,precision,recall,f1"
        assert len(lines) == len(result.points) + 1

    def test_fixed_point_threshold_literal(self, tmp_path):
        point = fixed_point_eval(
            {"r1": True, "n1": False}, [rumor("r1"), nonrumor("n1")]
        )
        p = tmp_path / "fixed.csv"
        write_pr_curve([point], p)
        assert p.read_text().splitlines()[1].startswith("fixed,")

    def test_identification_report(self, tmp_path):
        p = tmp_path / "identification.csv"
        evaluation.write_identification_report([("BM25", 0.8, 5)], p)
        assert p.read_text().splitlines() == [
            "matcher,accuracy,n_evaluated", "BM25,0.8,5",
        ]

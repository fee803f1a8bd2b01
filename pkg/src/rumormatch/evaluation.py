"""Threshold-sweep classification evaluation (precision/recall/F1 curves)
and identification accuracy (did the argmax article match the labeled one).

Precision convention: 0/0 -> 1 at zero-positive-prediction points, so every
curve starts at (recall 0, precision 1). Stated explicitly because toolkits
disagree on this convention.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping, Optional

from .corpus import Label, LabeledTweet
from .errors import (
    DegenerateLabelsError,
    NoRumorLabelsError,
    UnreachablePrecisionError,
)
from .matchers import MatchResult


@dataclass(frozen=True)
class PRPoint:
    threshold: float  # nan marks a fixed (threshold-free) operating point
    precision: float
    recall: float
    f1: float
    tp: int = 0
    fp: int = 0
    fn: int = 0


def _pr_point(threshold, tp, fp, n_rumor) -> PRPoint:
    precision = tp / (tp + fp) if (tp + fp) > 0 else 1.0
    recall = tp / n_rumor
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return PRPoint(
        threshold=threshold, precision=precision, recall=recall, f1=f1,
        tp=tp, fp=fp, fn=n_rumor - tp,
    )


@dataclass(frozen=True)
class SweepResult:
    points: list[PRPoint]  # descending threshold
    max_f1_point: PRPoint


def sweep(scores: Mapping[str, float], labels: list[LabeledTweet]) -> SweepResult:
    """Evaluate every classification threshold the score set can induce.

    Candidate thresholds are the distinct observed scores (classification is
    strict >, so each induces one confusion matrix), plus a final -inf point
    where every tweet is classified positive: without it the sweep could
    never reach recall 1.
    """
    missing = [l.tweet_id for l in labels if l.tweet_id not in scores]
    if missing:
        raise KeyError(f"labeled tweets without scores: {missing[:5]}")
    n_rumor = sum(1 for l in labels if l.label is Label.RUMOR)
    n_nonrumor = len(labels) - n_rumor
    if n_rumor == 0 or n_nonrumor == 0:
        raise DegenerateLabelsError("sweep needs at least one RUMOR and one NONRUMOR label")

    # group tweets by score, walk groups in descending score order
    pairs = sorted(
        ((scores[l.tweet_id], l.label is Label.RUMOR) for l in labels), reverse=True
    )
    points = []
    tp = fp = 0
    i = 0
    while i < len(pairs):
        threshold = pairs[i][0]
        # positives at this threshold are the strictly-higher groups processed so far
        points.append(_pr_point(threshold, tp, fp, n_rumor))
        while i < len(pairs) and pairs[i][0] == threshold:
            if pairs[i][1]:
                tp += 1
            else:
                fp += 1
            i += 1
    points.append(_pr_point(float("-inf"), tp, fp, n_rumor))

    max_f1_point = max(points, key=lambda p: p.f1)
    return SweepResult(points=points, max_f1_point=max_f1_point)


def fixed_point_eval(predictions: Mapping[str, bool], labels: list[LabeledTweet]) -> PRPoint:
    """Single PR point for a threshold-free classifier (lexicon matching)."""
    missing = [l.tweet_id for l in labels if l.tweet_id not in predictions]
    if missing:
        raise KeyError(f"labeled tweets without predictions: {missing[:5]}")
    tp = fp = 0
    n_rumor = 0
    for l in labels:
        is_rumor = l.label is Label.RUMOR
        n_rumor += is_rumor
        if predictions[l.tweet_id]:
            if is_rumor:
                tp += 1
            else:
                fp += 1
    if n_rumor == 0:
        raise NoRumorLabelsError("no RUMOR labels to evaluate against")
    return _pr_point(float("nan"), tp, fp, n_rumor)


def identification_accuracy(
    matches: Mapping[str, MatchResult], labels: list[LabeledTweet]
) -> float:
    """Fraction of rumor-labeled tweets whose best article equals the labeled one."""
    rumor_labels = [l for l in labels if l.label is Label.RUMOR]
    if not rumor_labels:
        raise NoRumorLabelsError("identification is evaluated over RUMOR labels only")
    correct = 0
    for l in rumor_labels:
        match = matches.get(l.tweet_id)
        if match is None:
            raise KeyError(f"no match result for labeled rumor tweet {l.tweet_id!r}")
        correct += match.best_article_id == l.article_id
    return correct / len(rumor_labels)


def operating_point(result: SweepResult, min_precision: float) -> PRPoint:
    """Highest-recall sweep point whose precision meets the floor.

    Zero-positive-prediction points are excluded: their precision of 1 is a
    0/0 convention, not an achieved precision.
    """
    eligible = [
        p for p in result.points
        if (p.tp + p.fp) > 0 and p.precision >= min_precision
    ]
    if not eligible:
        raise UnreachablePrecisionError(
            f"no sweep point reaches precision {min_precision}"
        )
    return max(eligible, key=lambda p: p.recall)


def _threshold_cell(threshold: float) -> str:
    return "fixed" if math.isnan(threshold) else repr(threshold)


def write_pr_curve(points: list[PRPoint], path) -> None:
    """CSV export, descending-threshold order; fixed points carry 'fixed'."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "precision", "recall", "f1"])
        for p in points:
            writer.writerow(
                [_threshold_cell(p.threshold), repr(p.precision), repr(p.recall), repr(p.f1)]
            )


def write_identification_report(rows: list[tuple[str, float, int]], path) -> None:
    """rows: (matcher name, accuracy, number of rumor tweets evaluated)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["matcher", "accuracy", "n_evaluated"])
        for matcher, accuracy, n in rows:
            writer.writerow([matcher, repr(accuracy), n])

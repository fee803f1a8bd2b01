"""Corpus-level analyses over detection output: group rumor ratios, user
concentration and ranking, keyword breakdowns, candidate content attribution,
and rumor timelines with peak detection.

All functions are pure over (tweets, detections, parameters); input ordering
never changes a result.
"""

from __future__ import annotations

import csv
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Mapping, Optional

from .corpus import Group, RumorArticle, Subject, Tweet
from .errors import (
    EmptyDenominatorError,
    NoRumorsError,
    ZeroArticlesForSubjectError,
)
from .textpipe import TokenizerConfig, tokenize


@dataclass(frozen=True)
class Detection:
    tweet_id: str
    is_rumor: bool
    article_id: Optional[str] = None  # present iff is_rumor

    def __post_init__(self):
        if self.is_rumor != (self.article_id is not None):
            raise ValueError("article_id must be present exactly when is_rumor")


@dataclass(frozen=True)
class TimeWindow:
    start: int  # inclusive, UTC epoch seconds
    end: int  # exclusive

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError("window start must precede end")

    def __contains__(self, timestamp: int) -> bool:
        return self.start <= timestamp < self.end


# Election-period default: 2016-04-01T00:00Z through 2016-10-01T00:00Z.
ELECTION_WINDOW = TimeWindow(start=1459468800, end=1475280000)


def _in_window(tweet: Tweet, window: Optional[TimeWindow]) -> bool:
    return window is None or tweet.timestamp in window


def group_rumor_ratio(
    tweets: list[Tweet],
    detections: Mapping[str, Detection],
    group: Group,
    window: Optional[TimeWindow] = None,
) -> float:
    """Share of a follower group's tweets detected as rumors, optionally windowed."""
    total = rumors = 0
    for t in tweets:
        if t.group is not group or not _in_window(t, window):
            continue
        total += 1
        det = detections.get(t.id)
        rumors += det is not None and det.is_rumor
    if total == 0:
        raise EmptyDenominatorError(f"no tweets for group {group.value} in scope")
    return rumors / total


def user_concentration(
    tweets: list[Tweet],
    detections: Mapping[str, Detection],
    top_fraction: float,
    window: Optional[TimeWindow] = None,
) -> float:
    """Share of all rumor tweets posted by the heaviest rumor posters.

    Users are ranked by rumor-tweet count descending (ties by user_id
    ascending); the top ceil(top_fraction * n_users) are counted, where
    n_users covers every user with at least one tweet in scope.
    """
    if not 0.0 < top_fraction <= 1.0:
        raise ValueError("top_fraction must be in (0, 1]")
    rumor_counts: Counter[str] = Counter()
    users = set()
    for t in tweets:
        if not _in_window(t, window):
            continue
        users.add(t.user_id)
        det = detections.get(t.id)
        if det is not None and det.is_rumor:
            rumor_counts[t.user_id] += 1
    total_rumors = sum(rumor_counts.values())
    if total_rumors == 0:
        raise NoRumorsError("no rumor tweets in scope")
    ranked = sorted(users, key=lambda u: (-rumor_counts[u], u))
    top_n = math.ceil(top_fraction * len(users))
    return sum(rumor_counts[u] for u in ranked[:top_n]) / total_rumors


def user_rumor_ratio_ranking(
    tweets: list[Tweet],
    detections: Mapping[str, Detection],
    top_n: int,
    window: Optional[TimeWindow] = None,
) -> list[tuple[str, int, int, float]]:
    """Top users by the share of rumor tweets among their own tweets.

    Returns (user_id, rumor_count, total_count, ratio), sorted by ratio
    descending, ties by rumor_count descending then user_id ascending.
    """
    totals: Counter[str] = Counter()
    rumors: Counter[str] = Counter()
    for t in tweets:
        if not _in_window(t, window):
            continue
        totals[t.user_id] += 1
        det = detections.get(t.id)
        if det is not None and det.is_rumor:
            rumors[t.user_id] += 1
    rows = [
        (user, rumors[user], total, rumors[user] / total)
        for user, total in totals.items()
    ]
    rows.sort(key=lambda r: (-r[3], -r[1], r[0]))
    return rows[:top_n]


def keyword_breakdown(
    tweets: list[Tweet],
    detections: Mapping[str, Detection],
    keywords: list[str],
    tok: Optional[TokenizerConfig] = None,
) -> dict[str, tuple[int, int]]:
    """Per keyword: (rumor tweet count, nonrumor tweet count) containing it.

    Counts tweets, not occurrences; a tweet containing k of the keywords
    contributes to k cells.
    """
    tok = tok or TokenizerConfig()
    wanted = {k.lower() for k in keywords}
    counts = {k.lower(): [0, 0] for k in keywords}
    for t in tweets:
        present = wanted.intersection(tokenize(t.text, tok))
        if not present:
            continue
        det = detections.get(t.id)
        slot = 0 if (det is not None and det.is_rumor) else 1
        for k in present:
            counts[k][slot] += 1
    return {k.lower(): (c[0], c[1]) for k, c in ((k, counts[k.lower()]) for k in keywords)}


def content_attribution(
    tweets: list[Tweet],
    detections: Mapping[str, Detection],
    articles: list[RumorArticle],
    group: Group,
    subjects: Optional[list[Subject]] = None,
    window: Optional[TimeWindow] = None,
) -> dict[Subject, float]:
    """Rumor tweets per subject, normalized by that subject's article count.

    A tweet matched to a multi-subject article counts once per subject.
    """
    subjects = subjects or [Subject.CLINTON, Subject.TRUMP]
    article_subjects = {a.id: a.subjects for a in articles}
    subject_article_count = Counter()
    for a in articles:
        for s in a.subjects:
            subject_article_count[s] += 1
    for s in subjects:
        if subject_article_count[s] == 0:
            raise ZeroArticlesForSubjectError(s.value)

    tweet_counts: Counter[Subject] = Counter()
    for t in tweets:
        if t.group is not group or not _in_window(t, window):
            continue
        det = detections.get(t.id)
        if det is None or not det.is_rumor:
            continue
        for s in article_subjects.get(det.article_id, frozenset()):
            tweet_counts[s] += 1
    return {s: tweet_counts[s] / subject_article_count[s] for s in subjects}


def timeline(
    tweets: list[Tweet],
    detections: Mapping[str, Detection],
    bin_width: int,
    window: TimeWindow,
) -> list[tuple[int, int]]:
    """Rumor-tweet counts per half-open bin tiling [window.start, window.end)."""
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    n_bins = math.ceil((window.end - window.start) / bin_width)
    counts = [0] * n_bins
    for t in tweets:
        if t.timestamp not in window:
            continue
        det = detections.get(t.id)
        if det is not None and det.is_rumor:
            counts[(t.timestamp - window.start) // bin_width] += 1
    return [(window.start + i * bin_width, c) for i, c in enumerate(counts)]


def detect_peaks(series: list[int], k: float = 2.0) -> list[int]:
    """Strict local maxima exceeding mean + k*stddev (population stddev).

    Boundary bins are compared against their single neighbor.
    """
    if not series:
        raise ValueError("series must be nonempty")
    n = len(series)
    mean = sum(series) / n
    std = math.sqrt(sum((x - mean) ** 2 for x in series) / n)
    cutoff = mean + k * std
    peaks = []
    for i, x in enumerate(series):
        if x <= cutoff:
            continue
        left_ok = i == 0 or x > series[i - 1]
        right_ok = i == n - 1 or x > series[i + 1]
        if left_ok and right_ok:
            peaks.append(i)
    return peaks


def _iso(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def write_group_ratios(rows, path):
    """rows: (group, window label, ratio)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "window", "ratio"])
        for group, label, ratio in rows:
            writer.writerow([group.value, label, repr(ratio)])


def write_concentration(rows, path):
    """rows: (top fraction, rumor share)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fraction", "share"])
        for fraction, share in rows:
            writer.writerow([repr(fraction), repr(share)])


def write_user_ranking(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "rumor_count", "total_count", "ratio"])
        for user, rumor_count, total, ratio in rows:
            writer.writerow([user, rumor_count, total, repr(ratio)])


def write_keywords(breakdown: dict[str, tuple[int, int]], path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["keyword", "rumor_count", "nonrumor_count"])
        for keyword, (rumor, nonrumor) in breakdown.items():
            writer.writerow([keyword, rumor, nonrumor])


def write_attribution(rows, path):
    """rows: (group, subject, normalized value)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "subject", "value"])
        for group, subject, value in rows:
            writer.writerow([group.value, subject.value, repr(value)])


def write_timeline(bins, peaks, path):
    peak_set = set(peaks)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_start_iso8601", "count", "is_peak"])
        for i, (start, count) in enumerate(bins):
            writer.writerow([_iso(start), count, str(i in peak_set).lower()])

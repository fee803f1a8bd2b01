"""Data model and JSONL ingestion for tweets, reference articles and labels.

All three input files are JSON Lines (one object per line, UTF-8, LF).
Loading is fail-fast: the first malformed line aborts the load so that
evaluation never runs over a silently truncated corpus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import (
    DanglingArticleRefError,
    DanglingTweetRefError,
    DuplicateIdError,
    EmptyBodyError,
    MalformedLineError,
    RumorWithoutArticleError,
)


class Group(str, Enum):
    CLINTON_FOLLOWER = "CLINTON_FOLLOWER"
    TRUMP_FOLLOWER = "TRUMP_FOLLOWER"
    OTHER = "OTHER"


class Subject(str, Enum):
    CLINTON = "CLINTON"
    TRUMP = "TRUMP"
    OTHER = "OTHER"


class Label(str, Enum):
    RUMOR = "RUMOR"
    NONRUMOR = "NONRUMOR"


@dataclass(frozen=True)
class Tweet:
    id: str
    user_id: str
    group: Group
    timestamp: int  # UTC epoch seconds
    text: str


@dataclass(frozen=True)
class RumorArticle:
    id: str
    title: str
    body: str
    subjects: frozenset[Subject] = frozenset({Subject.OTHER})
    source_url: Optional[str] = None


@dataclass(frozen=True)
class LabeledTweet:
    tweet_id: str
    label: Label
    article_id: Optional[str] = None  # present iff label == RUMOR


@dataclass
class Corpus:
    """Immutable-by-convention container; all cross-references are resolved at load."""

    tweets: list[Tweet]
    articles: list[RumorArticle]
    labels: Optional[list[LabeledTweet]] = None
    tweets_by_id: dict[str, Tweet] = field(init=False, repr=False)
    articles_by_id: dict[str, RumorArticle] = field(init=False, repr=False)

    def __post_init__(self):
        self.tweets_by_id = {t.id: t for t in self.tweets}
        self.articles_by_id = {a.id: a for a in self.articles}


def _iter_jsonl(path):
    """Yield (line_no, parsed object) for each non-blank line, fail-fast."""
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLineError(path, line_no, str(exc)) from exc
            if not isinstance(obj, dict):
                raise MalformedLineError(path, line_no, "expected a JSON object")
            yield line_no, obj


def _require(obj, key, path, line_no):
    if key not in obj:
        raise MalformedLineError(path, line_no, f"missing field {key!r}")
    return obj[key]


def load_tweets(path) -> list[Tweet]:
    """Parse tweets.jsonl; preserves file order."""
    tweets = []
    seen = set()
    for line_no, obj in _iter_jsonl(path):
        tid = str(_require(obj, "id", path, line_no))
        if not tid:
            raise MalformedLineError(path, line_no, "empty id")
        if tid in seen:
            raise DuplicateIdError(path, line_no, tid)
        seen.add(tid)
        text = str(_require(obj, "text", path, line_no))
        if not text.strip():
            raise MalformedLineError(path, line_no, f"tweet {tid!r} has empty text")
        try:
            group = Group(_require(obj, "group", path, line_no))
        except ValueError as exc:
            raise MalformedLineError(path, line_no, str(exc)) from exc
        ts = _require(obj, "timestamp", path, line_no)
        if not isinstance(ts, int):
            raise MalformedLineError(path, line_no, "timestamp must be an integer")
        tweets.append(
            Tweet(
                id=tid,
                user_id=str(_require(obj, "user_id", path, line_no)),
                group=group,
                timestamp=ts,
                text=text,
            )
        )
    return tweets


def load_articles(path) -> list[RumorArticle]:
    """Parse articles.jsonl; a missing subjects field defaults to {OTHER}."""
    articles = []
    seen = set()
    for line_no, obj in _iter_jsonl(path):
        aid = str(_require(obj, "id", path, line_no))
        if not aid:
            raise MalformedLineError(path, line_no, "empty id")
        if aid in seen:
            raise DuplicateIdError(path, line_no, aid)
        seen.add(aid)
        body = str(_require(obj, "body", path, line_no))
        if not body.strip():
            raise EmptyBodyError(path, line_no, aid)
        raw_subjects = obj.get("subjects") or ["OTHER"]
        try:
            subjects = frozenset(Subject(s) for s in raw_subjects)
        except ValueError as exc:
            raise MalformedLineError(path, line_no, str(exc)) from exc
        articles.append(
            RumorArticle(
                id=aid,
                title=str(obj.get("title", "")),
                body=body,
                subjects=subjects,
                source_url=obj.get("source_url"),
            )
        )
    return articles


def load_labels(path, corpus: Corpus) -> list[LabeledTweet]:
    """Parse labels.jsonl, checking every reference against the loaded corpus."""
    labels = []
    for line_no, obj in _iter_jsonl(path):
        tweet_id = str(_require(obj, "tweet_id", path, line_no))
        try:
            label = Label(_require(obj, "label", path, line_no))
        except ValueError as exc:
            raise MalformedLineError(path, line_no, str(exc)) from exc
        article_id = obj.get("article_id")
        if tweet_id not in corpus.tweets_by_id:
            raise DanglingTweetRefError(tweet_id)
        if label is Label.RUMOR:
            if article_id is None:
                raise RumorWithoutArticleError(tweet_id)
            if article_id not in corpus.articles_by_id:
                raise DanglingArticleRefError(article_id)
        elif article_id is not None:
            raise RumorWithoutArticleError(
                tweet_id, f"nonrumor label for tweet {tweet_id!r} carries an article_id"
            )
        labels.append(LabeledTweet(tweet_id=tweet_id, label=label, article_id=article_id))
    return labels


def load_corpus(tweets_path, articles_path, labels_path=None) -> Corpus:
    corpus = Corpus(tweets=load_tweets(tweets_path), articles=load_articles(articles_path))
    if labels_path is not None:
        corpus.labels = load_labels(labels_path, corpus)
    return corpus


def _dump_line(fh, obj):
    fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True))
    fh.write("\n")


def save_tweets(tweets, path):
    with open(path, "w", encoding="utf-8") as fh:
        for t in tweets:
            _dump_line(
                fh,
                {
                    "id": t.id,
                    "user_id": t.user_id,
                    "group": t.group.value,
                    "timestamp": t.timestamp,
                    "text": t.text,
                },
            )


def save_articles(articles, path):
    with open(path, "w", encoding="utf-8") as fh:
        for a in articles:
            obj = {
                "id": a.id,
                "title": a.title,
                "body": a.body,
                "subjects": sorted(s.value for s in a.subjects),
            }
            if a.source_url is not None:
                obj["source_url"] = a.source_url
            _dump_line(fh, obj)


def save_labels(labels, path):
    with open(path, "w", encoding="utf-8") as fh:
        for l in labels:
            obj = {"tweet_id": l.tweet_id, "label": l.label.value}
            if l.article_id is not None:
                obj["article_id"] = l.article_id
            _dump_line(fh, obj)

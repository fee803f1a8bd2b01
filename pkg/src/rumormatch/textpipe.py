"""Text normalization and corpus-level term statistics.

Every matcher consumes the same tokenizer output, so the rules live in one
place: lowercase, drop URLs and @-mentions, keep hashtag words without the
'#', strip punctuation, drop stopwords and too-short tokens, optional
Porter stemming.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from . import stemmer
from .errors import EmptyCorpusError

_URL_RE = re.compile(r"https?://\S+|www\.\S+")
_MENTION_RE = re.compile(r"@\w+")
_TOKEN_RE = re.compile(r"[a-z0-9][a-z0-9']*")


def default_stopwords() -> frozenset[str]:
    text = resources.files("rumormatch.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(_parse_wordlist(text))


def _parse_wordlist(text):
    words = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line.lower())
    return words


def load_stopwords(path) -> frozenset[str]:
    """One lowercase word per line; '#' comments ignored."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(_parse_wordlist(fh.read()))


@dataclass(frozen=True)
class TokenizerConfig:
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    min_token_len: int = 2
    strip_urls: bool = True
    strip_mentions: bool = True
    stemming: bool = False


def tokenize(text: str, config: Optional[TokenizerConfig] = None) -> list[str]:
    """Normalize raw text into a token sequence. Deterministic; may be empty."""
    if config is None:
        config = TokenizerConfig()
    text = text.lower()
    if config.strip_urls:
        text = _URL_RE.sub(" ", text)
    if config.strip_mentions:
        text = _MENTION_RE.sub(" ", text)
    # hashtags contribute their word form; _TOKEN_RE then drops the '#'
    tokens = []
    for tok in _TOKEN_RE.findall(text):
        tok = tok.strip("'")
        if len(tok) < config.min_token_len:
            continue
        if tok in config.stopwords:
            continue
        if config.stemming:
            tok = stemmer.stem(tok)
            if len(tok) < config.min_token_len:
                continue
        tokens.append(tok)
    return tokens


@dataclass(frozen=True)
class Vocabulary:
    """Term statistics over one document collection."""

    term_ids: dict[str, int]  # term -> id, first-appearance order
    doc_freq: dict[str, int]
    n_docs: int
    avgdl: float

    @property
    def size(self) -> int:
        return len(self.term_ids)

    def __contains__(self, term):
        return term in self.term_ids


def build_vocabulary(docs: list[list[str]]) -> Vocabulary:
    """Compute term ids, document frequencies and average document length."""
    if not docs:
        raise EmptyCorpusError("cannot build a vocabulary from zero documents")
    term_ids: dict[str, int] = {}
    doc_freq: Counter[str] = Counter()
    total_tokens = 0
    for doc in docs:
        total_tokens += len(doc)
        for term in doc:
            if term not in term_ids:
                term_ids[term] = len(term_ids)
        doc_freq.update(set(doc))
    return Vocabulary(
        term_ids=term_ids,
        doc_freq=dict(doc_freq),
        n_docs=len(docs),
        avgdl=total_tokens / len(docs),
    )


def term_counts(doc: list[str]) -> Counter[str]:
    return Counter(doc)

"""The five scoring algorithms behind one contract: given a tweet, produce
per-article scores and the best-matching reference article.

Articles are the indexed documents, tweets are queries: the reference set is
small and fixed while tweets number in the millions, so all per-article
statistics are precomputed once into an inverted index.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from .corpus import Label, RumorArticle
from .errors import (
    AllEmptyAfterTokenizeError,
    DimMismatchError,
    EmptyCorpusError,
    EmptyScoresError,
)
from .textpipe import TokenizerConfig, build_vocabulary, term_counts, tokenize


@dataclass(frozen=True)
class BM25Params:
    k1: float = 1.2  # term-frequency saturation
    b: float = 0.75  # document-length normalization

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")


class ArticleIndex:
    """Inverted index over the reference articles.

    Immutable after construction. Holds, per term: the posting list of
    (article ordinal, term count), the BM25 idf ln(1 + (N-df+0.5)/(df+0.5)),
    the TF-IDF idf ln(N/df), and per-article L2-normalized TF-IDF postings.
    """

    def __init__(self, articles: list[RumorArticle], tok: Optional[TokenizerConfig] = None):
        if not articles:
            raise EmptyCorpusError("no articles to index")
        self.tokenizer_config = tok or TokenizerConfig()
        self.article_ids = [a.id for a in articles]
        docs = [tokenize(a.body, self.tokenizer_config) for a in articles]
        if all(not d for d in docs):
            raise AllEmptyAfterTokenizeError("every article tokenized to empty")
        self.empty_article_ids = [a.id for a, d in zip(articles, docs) if not d]
        self.vocabulary = build_vocabulary(docs)
        self.doc_len = np.array([len(d) for d in docs], dtype=np.float64)

        # postings: term -> (ordinals, counts); built in term-id order
        per_term: dict[str, tuple[list[int], list[int]]] = {
            t: ([], []) for t in self.vocabulary.term_ids
        }
        for ordinal, doc in enumerate(docs):
            for term, count in sorted(term_counts(doc).items()):
                ords, counts = per_term[term]
                ords.append(ordinal)
                counts.append(count)
        self.postings: dict[str, tuple[np.ndarray, np.ndarray]] = {
            t: (np.array(o, dtype=np.int64), np.array(c, dtype=np.float64))
            for t, (o, c) in per_term.items()
        }

        self._finalize()

    @classmethod
    def from_parts(cls, article_ids, empty_article_ids, doc_len, avgdl, terms, postings):
        """Rebuild an index from serialized parts (see cli.save_index)."""
        from .textpipe import Vocabulary  # local to avoid shadowing module import

        index = cls.__new__(cls)
        index.tokenizer_config = None  # not needed once postings exist
        index.article_ids = list(article_ids)
        index.empty_article_ids = list(empty_article_ids)
        index.doc_len = np.asarray(doc_len, dtype=np.float64)
        index.vocabulary = Vocabulary(
            term_ids={t: i for i, t in enumerate(terms)},
            doc_freq={t: len(postings[t][0]) for t in terms},
            n_docs=len(article_ids),
            avgdl=avgdl,
        )
        index.postings = {
            t: (np.asarray(o, dtype=np.int64), np.asarray(c, dtype=np.float64))
            for t, (o, c) in postings.items()
        }
        index._finalize()
        return index

    def _finalize(self):
        """Derive idf tables and normalized TF-IDF postings from the raw postings."""
        n = len(self.article_ids)
        self.idf_bm25 = {
            t: math.log(1.0 + (n - df + 0.5) / (df + 0.5))
            for t, df in self.vocabulary.doc_freq.items()
        }
        self.idf_tfidf = {
            t: math.log(n / df) for t, df in self.vocabulary.doc_freq.items()
        }

        # per-article L2 norms of raw tf*idf vectors, then normalized postings
        sq_norms = np.zeros(n)
        for t, (ords, counts) in self.postings.items():
            w = counts * self.idf_tfidf[t]
            sq_norms[ords] += w * w
        norms = np.sqrt(sq_norms)
        safe = np.where(norms > 0, norms, 1.0)  # empty / all-common articles stay zero
        self.tfidf_postings = {
            t: (ords, counts * self.idf_tfidf[t] / safe[ords])
            for t, (ords, counts) in self.postings.items()
        }

        self._bm25_cache: dict[BM25Params, dict] = {}

    @property
    def n_articles(self) -> int:
        return len(self.article_ids)

    def bm25_term_weights(self, params: BM25Params):
        """Per-term arrays of idf-scaled saturated tf, cached per parameter set."""
        cached = self._bm25_cache.get(params)
        if cached is None:
            k1, b = params.k1, params.b
            norm = k1 * (1.0 - b + b * self.doc_len / max(self.vocabulary.avgdl, 1e-12))
            cached = {
                t: (ords, self.idf_bm25[t] * counts * (k1 + 1.0) / (counts + norm[ords]))
                for t, (ords, counts) in self.postings.items()
            }
            self._bm25_cache[params] = cached
        return cached


def build_index(articles, tok: Optional[TokenizerConfig] = None) -> ArticleIndex:
    return ArticleIndex(articles, tok)


def score_tfidf(tweet_tokens: list[str], index: ArticleIndex) -> np.ndarray:
    """Cosine between the tweet's TF-IDF vector and each article's; in [0, 1]."""
    scores = np.zeros(index.n_articles)
    counts = {t: c for t, c in term_counts(tweet_tokens).items() if t in index.vocabulary}
    if not counts:
        return scores
    q_sq = 0.0
    weights = {}
    for t, c in counts.items():
        w = c * index.idf_tfidf[t]
        weights[t] = w
        q_sq += w * w
    if q_sq == 0.0:
        return scores
    q_norm = math.sqrt(q_sq)
    for t, w in weights.items():
        ords, doc_w = index.tfidf_postings[t]
        scores[ords] += (w / q_norm) * doc_w
    return scores


def score_bm25(
    tweet_tokens: list[str], index: ArticleIndex, params: Optional[BM25Params] = None
) -> np.ndarray:
    """BM25 with the tweet as query; each unique query term contributes once."""
    if params is None:
        params = BM25Params()
    weights = index.bm25_term_weights(params)
    scores = np.zeros(index.n_articles)
    for t in set(tweet_tokens):
        entry = weights.get(t)
        if entry is not None:
            ords, w = entry
            scores[ords] += w
    return scores


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, term):
        return term in self.vectors


def load_embeddings(path) -> EmbeddingTable:
    """word2vec text format: header '<count> <dim>', then 'term v1 .. vdim'."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected '<count> <dim>' header")
        dim = int(header[1])
        vectors = {}
        for line_no, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2:
                continue
            term, values = parts[0], parts[1:]
            if len(values) != dim:
                raise DimMismatchError(
                    f"{path}:{line_no}: expected {dim} components, got {len(values)}"
                )
            vectors[term] = np.array(values, dtype=np.float64)
    return EmbeddingTable(dim=dim, vectors=vectors)


def embed_tokens(tokens: list[str], table: EmbeddingTable) -> Optional[np.ndarray]:
    """Mean of the table vectors of in-vocabulary tokens; None when undefined."""
    vecs = [table.vectors[t] for t in tokens if t in table.vectors]
    if not vecs:
        return None
    mean = np.mean(vecs, axis=0)
    if not np.any(mean):
        return None
    return mean


def embed_articles(articles, table: EmbeddingTable, tok=None) -> np.ndarray:
    """Average each article body through the table; undefined articles get zeros."""
    out = np.zeros((len(articles), table.dim))
    for i, article in enumerate(articles):
        vec = embed_tokens(tokenize(article.body, tok or TokenizerConfig()), table)
        if vec is not None:
            out[i] = vec
    return out


def article_vectors_from_file(article_ids, path) -> np.ndarray:
    """Doc2Vec pathway: per-article vectors keyed by article id, same file format."""
    table = load_embeddings(path)
    out = np.zeros((len(article_ids), table.dim))
    for i, aid in enumerate(article_ids):
        if aid in table.vectors:
            out[i] = table.vectors[aid]
    return out


def score_embedding(
    tweet_tokens: list[str], article_vectors: np.ndarray, table: EmbeddingTable
) -> tuple[np.ndarray, bool]:
    """Cosine of mean tweet vector against each article vector.

    Returns (scores, defined). When the tweet has no in-vocabulary tokens or
    averages to the zero vector, all scores are 0 and defined is False
    (UNDEFINED_REPRESENTATION).
    """
    if article_vectors.ndim != 2 or article_vectors.shape[1] != table.dim:
        raise DimMismatchError(
            f"article vectors have dim {article_vectors.shape[-1]}, table has {table.dim}"
        )
    n = article_vectors.shape[0]
    q = embed_tokens(tweet_tokens, table)
    if q is None:
        return np.zeros(n), False
    q_norm = np.linalg.norm(q)
    a_norms = np.linalg.norm(article_vectors, axis=1)
    safe = np.where(a_norms > 0, a_norms, 1.0)
    scores = (article_vectors @ q) / (safe * q_norm)
    scores[a_norms == 0] = 0.0
    return scores, True


@dataclass
class LexiconPatternSet:
    patterns: list[re.Pattern] = field(default_factory=list)

    @classmethod
    def from_lines(cls, lines):
        patterns = []
        for line in lines:
            line = line.strip()
            if line and not line.startswith("#"):
                patterns.append(re.compile(line, re.IGNORECASE))
        return cls(patterns=patterns)


def default_lexicon() -> LexiconPatternSet:
    text = resources.files("rumormatch.data").joinpath("lexicon.txt").read_text("utf-8")
    return LexiconPatternSet.from_lines(text.splitlines())


def load_lexicon(path) -> LexiconPatternSet:
    with open(path, encoding="utf-8") as fh:
        return LexiconPatternSet.from_lines(fh)


def match_lexicon(text: str, patterns: LexiconPatternSet) -> bool:
    """True iff any pattern matches the raw (pre-tokenization) text."""
    return any(p.search(text) for p in patterns.patterns)


@dataclass(frozen=True)
class MatchResult:
    tweet_id: str
    best_article_id: Optional[str]
    best_score: float
    scores: Optional[np.ndarray] = None


def best_match(scores: np.ndarray, index: ArticleIndex) -> tuple[str, float]:
    """Argmax over articles; ties break to the lowest ordinal."""
    if len(scores) == 0:
        raise EmptyScoresError("no scores to rank")
    if len(scores) != index.n_articles:
        raise ValueError("score list length does not match article count")
    ordinal = int(np.argmax(scores))  # argmax returns the first maximum
    return index.article_ids[ordinal], float(scores[ordinal])


def classify(result: MatchResult, threshold: float) -> Label:
    """RUMOR iff the best score is strictly larger than the threshold."""
    return Label.RUMOR if result.best_score > threshold else Label.NONRUMOR

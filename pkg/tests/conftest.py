import random

import pytest

from rumormatch.corpus import Group, RumorArticle, Subject, Tweet
from rumormatch.matchers import build_index
from rumormatch.textpipe import TokenizerConfig


NO_STOPWORDS = TokenizerConfig(stopwords=frozenset())


def make_article(aid, tokens, subjects=frozenset({Subject.OTHER}), title=""):
    return RumorArticle(id=aid, title=title, body=" ".join(tokens), subjects=subjects)


def make_tweet(tid, text, user="u1", group=Group.OTHER, ts=1462060800):
    return Tweet(id=tid, user_id=user, group=group, timestamp=ts, text=text)


def index_from_token_lists(token_lists):
    """Build an ArticleIndex whose tokenized bodies are exactly token_lists."""
    articles = [make_article(f"a{i}", toks) for i, toks in enumerate(token_lists)]
    return build_index(articles, NO_STOPWORDS)


def random_token_corpus(rng: random.Random, max_docs=100, max_vocab=50):
    """Random small corpus of token lists over a shared vocabulary."""
    vocab = [f"tt{i:02d}" for i in range(rng.randint(2, max_vocab))]
    n_docs = rng.randint(1, max_docs)
    docs = []
    for _ in range(n_docs):
        length = rng.randint(1, 30)
        docs.append([rng.choice(vocab) for _ in range(length)])
    # at least one doc must be nonempty for indexing; they all are
    query = [rng.choice(vocab) for _ in range(rng.randint(1, 12))]
    return docs, query


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)

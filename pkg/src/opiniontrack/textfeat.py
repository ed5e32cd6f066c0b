"""TF-IDF vocabulary and vectors over tokenized text."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    dfs: tuple[int, ...]
    n_docs: int

    def __post_init__(self):
        if len(self.terms) != len(self.dfs):
            raise ValueError("terms and document frequencies differ in length")

    @property
    def index(self) -> dict[str, int]:
        # rebuilt on demand; vocabulary objects are small and immutable
        return {t: i for i, t in enumerate(self.terms)}

    def __len__(self):
        return len(self.terms)


def build_vocabulary(token_docs: list[list[str]], min_df: int = 1,
                     max_terms: int = 10000) -> Vocabulary:
    """Terms with df >= min_df, ranked by df descending (ties broken
    lexicographically), truncated to max_terms."""
    if not token_docs:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    if min_df < 1 or max_terms < 1:
        raise ValueError("min_df and max_terms must be >= 1")
    df = Counter()
    for tokens in token_docs:
        df.update(set(tokens))
    kept = [(term, count) for term, count in df.items() if count >= min_df]
    kept.sort(key=lambda tc: (-tc[1], tc[0]))
    kept = kept[:max_terms]
    return Vocabulary(
        terms=tuple(t for t, _ in kept),
        dfs=tuple(c for _, c in kept),
        n_docs=len(token_docs),
    )


def tfidf_vector(tokens: list[str], vocab: Vocabulary) -> np.ndarray:
    """Dense TF-IDF vector: tf * (ln((1+N)/(1+df)) + 1), L2-normalized
    when nonzero. Out-of-vocabulary tokens are ignored."""
    vec = np.zeros(len(vocab), dtype=np.float64)
    index = vocab.index
    counts = Counter(tokens)
    for term, tf in counts.items():
        i = index.get(term)
        if i is None:
            continue
        idf = math.log((1 + vocab.n_docs) / (1 + vocab.dfs[i])) + 1.0
        vec[i] = tf * idf
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))

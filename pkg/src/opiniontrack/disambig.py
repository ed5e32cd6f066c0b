"""Related/Unrelated classifier for (entity, tweet) mention pairs.

Features: document TF-IDF over a frequency-selected vocabulary, cosine
similarity between the document and the entity's stored profile text,
and a flag for the matched surface being the canonical name. News and
blog mentions bypass this classifier entirely (auto-Related).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linear import fit_binary, sigmoid
from .models import Document, Entity, Mention
from .textfeat import Vocabulary, cosine, tfidf_vector
from .tokenizer import tokenize


def doc_terms(text: str) -> list[str]:
    return [t.casefold() for t in tokenize(text).texts()]


def profile_similarity(tweet_tokens: list[str], entity: Entity,
                       vocab: Vocabulary) -> float:
    """Cosine between TF-IDF vectors of the tweet and the entity profile;
    0 when the entity carries no profile text."""
    if not entity.profile:
        return 0.0
    a = tfidf_vector(tweet_tokens, vocab)
    b = tfidf_vector(doc_terms(entity.profile), vocab)
    return cosine(a, b)


def featurize(mention: Mention, doc: Document, entity: Entity,
              vocab: Vocabulary) -> np.ndarray:
    """[tfidf(doc) | profile similarity | canonical-surface flag]."""
    tokens = doc_terms(doc.text)
    vec = tfidf_vector(tokens, vocab)
    sim = profile_similarity(tokens, entity, vocab)
    canonical = 1.0 if mention.surface.casefold() == entity.canonical_name.casefold() else 0.0
    return np.concatenate([vec, [sim, canonical]])


@dataclass(frozen=True)
class DisambigModel:
    vocab: Vocabulary
    weights: np.ndarray  # |V| + 2 feature weights
    bias: float
    lam: float
    iterations: int
    seed: int

    def __post_init__(self):
        if self.weights.shape[0] != len(self.vocab) + 2:
            raise ValueError("weight length must be |V| + 2 (plus separate bias)")
        if not np.all(np.isfinite(self.weights)) or not np.isfinite(self.bias):
            raise ValueError("model weights must be finite")


def train_disambig(labeled: list[tuple[np.ndarray, bool]], vocab: Vocabulary,
                   lam: float = 1e-3, seed: int = 42,
                   max_iter: int = 500, tol: float = 1e-6) -> DisambigModel:
    """Binary logistic regression over featurize() vectors. Requires both
    classes; deterministic for a fixed input order and seed."""
    if lam < 0:
        raise ValueError("lam must be >= 0")
    labels = {bool(rel) for _, rel in labeled}
    if labels != {True, False}:
        raise ValueError("training data must contain both Related and Unrelated examples")
    X = np.stack([f for f, _ in labeled])
    y = np.array([1.0 if rel else 0.0 for _, rel in labeled])
    w, b, history = fit_binary(X, y, lam=lam, max_iter=max_iter, tol=tol)
    return DisambigModel(vocab=vocab, weights=w, bias=b, lam=lam,
                         iterations=len(history) - 1, seed=seed)


def classify_related(model: DisambigModel, features: np.ndarray) -> tuple[bool, float]:
    """Probability = sigmoid(w.x + b); Related when probability >= 0.5."""
    if features.shape[0] != model.weights.shape[0]:
        raise ValueError(
            f"feature length {features.shape[0]} does not match model "
            f"dimension {model.weights.shape[0]}"
        )
    p = float(sigmoid(float(model.weights @ features) + model.bias))
    return p >= 0.5, p


def save_model(model: DisambigModel, path: str | Path):
    obj = {
        "type": "disambig",
        "vocabulary": {
            "terms": list(model.vocab.terms),
            "dfs": list(model.vocab.dfs),
            "n_docs": model.vocab.n_docs,
        },
        "weights": [float(w) for w in model.weights],
        "bias": model.bias,
        "metadata": {"lam": model.lam, "iterations": model.iterations,
                     "seed": model.seed},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=1)
        fh.write("\n")


def load_model(path: str | Path) -> DisambigModel:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if obj.get("type") != "disambig":
        raise ValueError(f"{path}: not a disambiguation model file")
    vocab = Vocabulary(
        terms=tuple(obj["vocabulary"]["terms"]),
        dfs=tuple(obj["vocabulary"]["dfs"]),
        n_docs=obj["vocabulary"]["n_docs"],
    )
    meta = obj["metadata"]
    return DisambigModel(
        vocab=vocab,
        weights=np.array(obj["weights"], dtype=np.float64),
        bias=float(obj["bias"]),
        lam=meta["lam"],
        iterations=meta["iterations"],
        seed=meta["seed"],
    )

"""Tweet sentiment: normalization, feature construction (unigrams, word
clusters, summed embeddings, lexicon counts) and an L2-regularized
maximum-entropy classifier over {negative, neutral, positive}."""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linear import fit_multinomial, softmax
from .textfeat import Vocabulary, build_vocabulary
from .tokenizer import tokenize

LABELS = ("negative", "neutral", "positive")  # fixed order, index = class id

_URL_RE = re.compile(r"https?://\S+|www\.\S+")
_HANDLE_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#(\w)")
_RUN_RE = re.compile(r"(.)\1{3,}", re.DOTALL)
_PLACEHOLDER_RE = re.compile(r"\b(URL|USER)\b")


def normalize(text: str) -> list[str]:
    """Lowercase; URLs -> URL; @handles -> USER; '#tag' -> 'tag';
    character runs longer than 3 collapsed to 3; then tokenize.
    The URL/USER placeholders survive re-normalization (idempotence)."""
    text = _URL_RE.sub(" URL ", text)
    text = _HANDLE_RE.sub(" USER ", text)
    text = _HASHTAG_RE.sub(r" \1", text)
    # lowercase everything except the placeholders just inserted
    parts = []
    last = 0
    for m in _PLACEHOLDER_RE.finditer(text):
        parts.append(text[last:m.start()].lower())
        parts.append(m.group(0))
        last = m.end()
    parts.append(text[last:].lower())
    text = "".join(parts)
    text = _RUN_RE.sub(r"\1\1\1", text)
    return tokenize(text).texts()


# --- resource tables ---------------------------------------------------


@dataclass(frozen=True)
class ClusterMap:
    word_to_cluster: dict[str, str]

    def __post_init__(self):
        for word, cid in self.word_to_cluster.items():
            if not cid or set(cid) - {"0", "1"}:
                raise ValueError(f"bad cluster id {cid!r} for word {word!r}")


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]

    def __post_init__(self):
        for word, vec in self.vectors.items():
            if vec.shape != (self.dim,) or not np.all(np.isfinite(vec)):
                raise ValueError(f"bad embedding for word {word!r}")


@dataclass(frozen=True)
class SentimentLexicon:
    polarity: dict[str, int]

    def __post_init__(self):
        if any(p not in (-1, 1) for p in self.polarity.values()):
            raise ValueError("lexicon polarities must be -1 or +1")


def load_clusters(path) -> ClusterMap:
    """TSV: bitpath<TAB>word, one pair per line."""
    mapping = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            bitpath, word = line.split("\t")
            mapping[word] = bitpath
    return ClusterMap(word_to_cluster=mapping)


def load_embeddings(path) -> EmbeddingTable:
    """word2vec text format: header 'V D', then 'word f1 ... fD'."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        n_words, dim = int(header[0]), int(header[1])
        vectors = {}
        for line in fh:
            parts = line.rstrip("\n").split(" ")
            if len(parts) < dim + 1:
                continue
            vectors[parts[0]] = np.array([float(x) for x in parts[1:dim + 1]])
    if len(vectors) != n_words:
        raise ValueError(f"{path}: header promises {n_words} words, found {len(vectors)}")
    return EmbeddingTable(dim=dim, vectors=vectors)


def load_lexicon(path) -> SentimentLexicon:
    """TSV: word<TAB>{-1|1}."""
    polarity = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            word, pol = line.split("\t")
            polarity[word] = int(pol)
    return SentimentLexicon(polarity=polarity)


@dataclass(frozen=True)
class SentimentResources:
    clusters: ClusterMap
    embeddings: EmbeddingTable
    lexicon: SentimentLexicon

    @classmethod
    def empty(cls, dim: int = 2) -> "SentimentResources":
        return cls(ClusterMap({}), EmbeddingTable(dim, {}), SentimentLexicon({}))


# --- features ----------------------------------------------------------


def featurize_sentiment(tokens: list[str], unigrams: Vocabulary,
                        clusters_vocab: Vocabulary,
                        res: SentimentResources) -> np.ndarray:
    """Concatenation of binary unigram presence, binary cluster presence,
    summed word embeddings, and (positive count, negative count, diff)."""
    uni = np.zeros(len(unigrams))
    idx = unigrams.index
    for tok in tokens:
        i = idx.get(tok)
        if i is not None:
            uni[i] = 1.0

    clu = np.zeros(len(clusters_vocab))
    cidx = clusters_vocab.index
    for tok in tokens:
        cid = res.clusters.word_to_cluster.get(tok)
        if cid is not None:
            i = cidx.get(cid)
            if i is not None:
                clu[i] = 1.0

    emb = np.zeros(res.embeddings.dim)
    for tok in tokens:
        vec = res.embeddings.vectors.get(tok)
        if vec is not None:
            emb += vec

    pos = float(sum(1 for t in tokens if res.lexicon.polarity.get(t) == 1))
    neg = float(sum(1 for t in tokens if res.lexicon.polarity.get(t) == -1))
    return np.concatenate([uni, clu, emb, [pos, neg, pos - neg]])


# --- model -------------------------------------------------------------


@dataclass(frozen=True)
class SentimentModel:
    unigrams: Vocabulary
    clusters_vocab: Vocabulary
    dim: int
    weights: np.ndarray  # 3 x (|Vu| + |Vc| + D + 3)
    biases: np.ndarray   # 3
    lam: float
    iterations: int
    seed: int
    labels: tuple[str, ...] = LABELS

    def __post_init__(self):
        expected = len(self.unigrams) + len(self.clusters_vocab) + self.dim + 3
        if self.weights.shape != (3, expected) or self.biases.shape != (3,):
            raise ValueError("weight matrix shape mismatch")
        if not np.all(np.isfinite(self.weights)) or not np.all(np.isfinite(self.biases)):
            raise ValueError("model weights must be finite")

    def featurize(self, tokens: list[str], res: SentimentResources) -> np.ndarray:
        return featurize_sentiment(tokens, self.unigrams, self.clusters_vocab, res)


def _cluster_tokens(tokens: list[str], clusters: ClusterMap) -> list[str]:
    out = []
    for tok in tokens:
        cid = clusters.word_to_cluster.get(tok)
        if cid is not None:
            out.append(cid)
    return out


def train_sentiment(labeled: list[tuple[list[str], str]], res: SentimentResources,
                    lam: float = 1e-3, seed: int = 42, min_df: int = 2,
                    max_terms: int = 20000, max_iter: int = 500,
                    tol: float = 1e-6) -> SentimentModel:
    """Multinomial logistic regression over featurize_sentiment() vectors.
    Unigram and cluster vocabularies are built from the training data."""
    if lam < 0:
        raise ValueError("lam must be >= 0")
    present = {label for _, label in labeled}
    missing = [l for l in LABELS if l not in present]
    if missing:
        raise ValueError(f"training data missing label(s): {', '.join(missing)}")

    token_docs = [tokens for tokens, _ in labeled]
    unigrams = build_vocabulary(token_docs, min_df=min_df, max_terms=max_terms)
    cluster_docs = [_cluster_tokens(tokens, res.clusters) for tokens, _ in labeled]
    if any(cluster_docs):
        clusters_vocab = build_vocabulary(cluster_docs, min_df=1, max_terms=max_terms)
    else:
        clusters_vocab = Vocabulary(terms=(), dfs=(), n_docs=len(labeled))

    X = np.stack([
        featurize_sentiment(tokens, unigrams, clusters_vocab, res)
        for tokens, _ in labeled
    ])
    y = np.array([LABELS.index(label) for _, label in labeled], dtype=np.int64)
    W, b, history = fit_multinomial(X, y, n_classes=3, lam=lam,
                                    max_iter=max_iter, tol=tol)
    if not np.isfinite(history[-1]):
        raise ValueError("training diverged to a non-finite loss")
    return SentimentModel(unigrams=unigrams, clusters_vocab=clusters_vocab,
                          dim=res.embeddings.dim, weights=W, biases=b,
                          lam=lam, iterations=len(history) - 1, seed=seed)


def predict_sentiment(model: SentimentModel, tokens: list[str],
                      res: SentimentResources) -> tuple[str, np.ndarray]:
    """Softmax over the three class scores; ties resolve to the first
    label in (negative, neutral, positive) order."""
    x = model.featurize(tokens, res)
    probs = softmax(model.weights @ x + model.biases)
    label = model.labels[int(np.argmax(probs))]
    return label, probs


def evaluate(pairs: list[tuple[str, str]],
             labels: tuple[str, ...] = LABELS) -> tuple[float, float, np.ndarray]:
    """(accuracy, macro-F1, confusion matrix) over (gold, predicted) label
    pairs. Classes absent from both gold and predictions contribute an F1
    of 0 to the macro average."""
    if not pairs:
        raise ValueError("cannot evaluate an empty set")
    k = len(labels)
    confusion = np.zeros((k, k), dtype=np.int64)
    for gold, pred in pairs:
        confusion[labels.index(gold), labels.index(pred)] += 1
    correct = int(np.trace(confusion))
    accuracy = correct / len(pairs)
    f1s = []
    for c in range(k):
        tp = confusion[c, c]
        fp = confusion[:, c].sum() - tp
        fn = confusion[c, :].sum() - tp
        denom = 2 * tp + fp + fn
        f1s.append(2 * tp / denom if denom > 0 else 0.0)
    return accuracy, float(np.mean(f1s)), confusion


# --- serialization -----------------------------------------------------


def save_model(model: SentimentModel, path: str | Path):
    obj = {
        "type": "sentiment",
        "labels": list(model.labels),
        "unigrams": {"terms": list(model.unigrams.terms),
                     "dfs": list(model.unigrams.dfs),
                     "n_docs": model.unigrams.n_docs},
        "clusters": {"terms": list(model.clusters_vocab.terms),
                     "dfs": list(model.clusters_vocab.dfs),
                     "n_docs": model.clusters_vocab.n_docs},
        "dim": model.dim,
        "weights": [[float(w) for w in row] for row in model.weights],
        "biases": [float(b) for b in model.biases],
        "metadata": {"lam": model.lam, "iterations": model.iterations,
                     "seed": model.seed},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=1)
        fh.write("\n")


def load_model(path: str | Path) -> SentimentModel:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if obj.get("type") != "sentiment":
        raise ValueError(f"{path}: not a sentiment model file")
    meta = obj["metadata"]
    return SentimentModel(
        unigrams=Vocabulary(terms=tuple(obj["unigrams"]["terms"]),
                            dfs=tuple(obj["unigrams"]["dfs"]),
                            n_docs=obj["unigrams"]["n_docs"]),
        clusters_vocab=Vocabulary(terms=tuple(obj["clusters"]["terms"]),
                                  dfs=tuple(obj["clusters"]["dfs"]),
                                  n_docs=obj["clusters"]["n_docs"]),
        dim=obj["dim"],
        weights=np.array(obj["weights"], dtype=np.float64),
        biases=np.array(obj["biases"], dtype=np.float64),
        lam=meta["lam"],
        iterations=meta["iterations"],
        seed=meta["seed"],
        labels=tuple(obj["labels"]),
    )

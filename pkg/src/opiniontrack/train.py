"""Model training from the store's annotation log, with a seeded
held-out split for reporting metrics."""

from __future__ import annotations

import random
from collections import Counter

from . import disambig as disambig_mod
from . import sentiment as sentiment_mod
from .models import KnowledgeBase, Mention
from .store import DocumentStore
from .textfeat import build_vocabulary


class InsufficientClassesError(ValueError):
    def __init__(self, task: str, counts: dict[str, int]):
        self.task = task
        self.counts = counts
        super().__init__(f"annotation log lacks required classes for {task}: {counts}")


def _split(items: list, seed: int, holdout: float = 0.2):
    order = list(range(len(items)))
    random.Random(seed).shuffle(order)
    n_hold = int(len(items) * holdout)
    hold_idx = set(order[:n_hold])
    train = [items[i] for i in range(len(items)) if i not in hold_idx]
    held = [items[i] for i in sorted(hold_idx)]
    return train, held if held else train


def train_sentiment_from_annotations(store: DocumentStore,
                                     res: sentiment_mod.SentimentResources,
                                     lam: float = 1e-3, seed: int = 42,
                                     min_df: int = 2):
    """Returns (model, metrics dict). Requires all three labels present."""
    examples = []
    for ann in store.iter_annotations(task="sentiment"):
        doc = store.get_document(ann.doc_id)
        if doc is None:
            continue
        examples.append((sentiment_mod.normalize(doc.text), ann.label))
    counts = Counter(label for _, label in examples)
    if any(counts.get(label, 0) == 0 for label in sentiment_mod.LABELS):
        raise InsufficientClassesError(
            "sentiment", {label: counts.get(label, 0) for label in sentiment_mod.LABELS})

    train_set, held_out = _split(examples, seed)
    label_counts = Counter(label for _, label in train_set)
    if any(label_counts.get(label, 0) == 0 for label in sentiment_mod.LABELS):
        train_set = examples  # tiny log: the split starved a class
        held_out = examples
    model = sentiment_mod.train_sentiment(train_set, res, lam=lam, seed=seed,
                                          min_df=min_df)
    pairs = [
        (gold, sentiment_mod.predict_sentiment(model, tokens, res)[0])
        for tokens, gold in held_out
    ]
    accuracy, macro_f1, confusion = sentiment_mod.evaluate(pairs)
    metrics = {
        "examples": len(examples),
        "held_out": len(held_out),
        "accuracy": round(accuracy, 9),
        "macro_f1": round(macro_f1, 9),
        "confusion": confusion.tolist(),
    }
    return model, metrics


def _annotation_mention(store: DocumentStore, kb: KnowledgeBase, ann) -> Mention:
    for m in store.mentions_for_doc(ann.doc_id):
        if m.entity_id == ann.entity_id:
            return m
    # annotation predates extraction; fall back to a canonical-surface stub
    entity = kb.get(ann.entity_id)
    return Mention(doc_id=ann.doc_id, entity_id=ann.entity_id,
                   tok_start=0, tok_end=0, byte_start=0, byte_end=0,
                   surface=entity.canonical_name)


def train_disambig_from_annotations(store: DocumentStore, kb: KnowledgeBase,
                                    lam: float = 1e-3, seed: int = 42,
                                    min_df: int = 1, max_terms: int = 5000):
    """Returns (model, metrics dict). Requires both verdict classes."""
    rows = []
    for ann in store.iter_annotations(task="disambig"):
        doc = store.get_document(ann.doc_id)
        if doc is None:
            continue
        rows.append((doc, _annotation_mention(store, kb, ann),
                     kb.get(ann.entity_id), ann.label == "related"))
    counts = Counter("related" if rel else "unrelated" for _, _, _, rel in rows)
    if counts.get("related", 0) == 0 or counts.get("unrelated", 0) == 0:
        raise InsufficientClassesError(
            "disambig", {c: counts.get(c, 0) for c in ("related", "unrelated")})

    vocab = build_vocabulary(
        [disambig_mod.doc_terms(doc.text) for doc, _, _, _ in rows],
        min_df=min_df, max_terms=max_terms)
    examples = [
        (disambig_mod.featurize(mention, doc, entity, vocab), rel)
        for doc, mention, entity, rel in rows
    ]
    train_set, held_out = _split(examples, seed)
    train_labels = {rel for _, rel in train_set}
    if train_labels != {True, False}:
        train_set = examples
        held_out = examples
    model = disambig_mod.train_disambig(train_set, vocab, lam=lam, seed=seed)
    pairs = [
        ("related" if gold else "unrelated",
         "related" if disambig_mod.classify_related(model, x)[0] else "unrelated")
        for x, gold in held_out
    ]
    accuracy, macro_f1, confusion = sentiment_mod.evaluate(
        pairs, labels=("related", "unrelated"))
    metrics = {
        "examples": len(examples),
        "held_out": len(held_out),
        "accuracy": round(accuracy, 9),
        "macro_f1": round(macro_f1, 9),
        "confusion": confusion.tolist(),
    }
    return model, metrics

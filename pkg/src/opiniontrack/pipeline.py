"""Batch stages shared by the CLI and the REST service: mention
extraction, disambiguation, sentiment labeling."""

from __future__ import annotations

import logging
from datetime import date

from . import disambig as disambig_mod
from . import sentiment as sentiment_mod
from .ingest import LanguageProfile, detect_language
from .models import Document, KnowledgeBase, Mention
from .store import DocumentStore
from .trie import build_trie, find_mentions

log = logging.getLogger(__name__)

DEFAULT_ALLOWED_LANGS = ("pt",)


def document_language(doc: Document,
                      profiles: list[LanguageProfile] | None) -> str | None:
    if doc.lang:
        return doc.lang
    if profiles:
        lang, confidence = detect_language(doc.text, profiles)
        if confidence > 0:
            return lang
    return None


def extract_stage(store: DocumentStore, kb: KnowledgeBase,
                  date_from: date, date_to: date,
                  allowed_langs: tuple[str, ...] = DEFAULT_ALLOWED_LANGS,
                  profiles: list[LanguageProfile] | None = None,
                  case_sensitive: bool = False) -> int:
    """Detect mentions in stored documents and append them to the mention
    log. Documents whose language is known and outside the allow-list are
    skipped; documents of unknown language pass through."""
    trie = build_trie(kb, case_sensitive=case_sensitive)
    n = 0
    for doc in store.query_documents(date_from=date_from, date_to=date_to):
        lang = document_language(doc, profiles)
        if allowed_langs and lang is not None and lang not in allowed_langs:
            continue
        for mention in find_mentions(trie, doc):
            store.put_mention(mention)
            n += 1
    return n


def disambiguate_stage(store: DocumentStore, kb: KnowledgeBase,
                       model: disambig_mod.DisambigModel | None,
                       date_from: date, date_to: date) -> int:
    """Attach Related/Unrelated verdicts to twitter mentions. News and
    blog mentions bypass classification (auto-Related). Without a model
    every twitter mention defaults to Related."""
    docs = {d.id: d for d in store.query_documents(date_from=date_from, date_to=date_to)}
    n = 0
    for mention in sorted(store.iter_mentions(), key=lambda m: m.key):
        doc = docs.get(mention.doc_id)
        if doc is None or mention.related is not None:
            continue
        if doc.source != "twitter":
            related = True
        elif model is None:
            related = True
        else:
            entity = kb.get(mention.entity_id)
            features = disambig_mod.featurize(mention, doc, entity, model.vocab)
            related, _ = disambig_mod.classify_related(model, features)
        store.put_mention(Mention(**{**mention.__dict__, "related": related}))
        n += 1
    return n


def sentiment_stage(store: DocumentStore,
                    model: sentiment_mod.SentimentModel,
                    res: sentiment_mod.SentimentResources,
                    date_from: date, date_to: date) -> int:
    """Classify each twitter document once and attach the label to every
    Related mention in it."""
    docs = {d.id: d for d in store.query_documents(
        source="twitter", date_from=date_from, date_to=date_to)}
    label_cache: dict[str, str] = {}
    n = 0
    for mention in sorted(store.iter_mentions(), key=lambda m: m.key):
        doc = docs.get(mention.doc_id)
        if doc is None or mention.related is False or mention.sentiment is not None:
            continue
        label = label_cache.get(doc.id)
        if label is None:
            tokens = sentiment_mod.normalize(doc.text)
            label, _ = sentiment_mod.predict_sentiment(model, tokens, res)
            label_cache[doc.id] = label
        store.put_mention(Mention(**{**mention.__dict__, "sentiment": label}))
        n += 1
    return n

"""Ingestion: RSS/Atom feed parsing, JSONL batch loading, language filter."""

from __future__ import annotations

import hashlib
import json
import logging
import math
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from email.utils import parsedate_to_datetime

from .models import Document, parse_timestamp
from .store import DocumentStore

log = logging.getLogger(__name__)

ATOM_NS = "{http://www.w3.org/2005/Atom}"


class FeedError(ValueError):
    """Structured feed failure: malformed XML or unsupported format."""


@dataclass(frozen=True)
class FeedItem:
    title: str
    link: str
    published: datetime | None = None
    summary: str | None = None

    def __post_init__(self):
        if not self.link:
            raise ValueError("feed item link must be non-empty")
        if not self.title and not self.summary:
            raise ValueError("feed item needs a title or a summary")


def _parse_feed_date(raw: str | None) -> datetime | None:
    if not raw:
        return None
    raw = raw.strip()
    try:  # RFC 822 style (RSS pubDate)
        return parsedate_to_datetime(raw).astimezone(timezone.utc)
    except (ValueError, TypeError):
        pass
    try:  # RFC 3339 (Atom)
        return parse_timestamp(raw)
    except ValueError:
        return None


def _text(el) -> str | None:
    return el.text.strip() if el is not None and el.text else None


def parse_feed(data: bytes) -> list[FeedItem]:
    """Parse an RSS 2.0 or Atom feed. Items without a link are dropped."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise FeedError(f"not well-formed XML: {exc}") from exc

    items = []
    tag = root.tag
    if tag == "rss":
        for item in root.iter("item"):
            link = _text(item.find("link"))
            title = _text(item.find("title")) or ""
            summary = _text(item.find("description"))
            if not link or not (title or summary):
                continue
            items.append(FeedItem(
                title=title,
                link=link,
                published=_parse_feed_date(_text(item.find("pubDate"))),
                summary=summary,
            ))
    elif tag == f"{ATOM_NS}feed":
        for entry in root.iter(f"{ATOM_NS}entry"):
            link = None
            for link_el in entry.findall(f"{ATOM_NS}link"):
                if link_el.get("rel") in (None, "alternate"):
                    link = link_el.get("href")
                    break
            title = _text(entry.find(f"{ATOM_NS}title")) or ""
            summary = _text(entry.find(f"{ATOM_NS}summary"))
            published = _parse_feed_date(
                _text(entry.find(f"{ATOM_NS}published"))
                or _text(entry.find(f"{ATOM_NS}updated"))
            )
            if not link or not (title or summary):
                continue
            items.append(FeedItem(title=title, link=link, published=published, summary=summary))
    else:
        raise FeedError(f"unsupported feed root element {tag!r}")
    return items


def feed_item_to_document(item: FeedItem, source: str,
                          now: datetime | None = None) -> Document:
    """Deterministic mapping: id is a stable hash of the link; text is
    title + blank line + summary; timestamp falls back to the given clock."""
    doc_id = "feed-" + hashlib.sha1(item.link.encode("utf-8")).hexdigest()[:16]
    text = item.title
    if item.summary:
        text = f"{item.title}\n\n{item.summary}" if item.title else item.summary
    timestamp = item.published or now or datetime.now(timezone.utc)
    return Document(id=doc_id, source=source, timestamp=timestamp,
                    text=text, url=item.link)


def load_jsonl(store: DocumentStore, path) -> tuple[int, list[int]]:
    """Load a JSONL document batch. Returns (stored count, bad line numbers);
    malformed lines are reported and skipped, processing continues."""
    stored = 0
    bad_lines = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = Document.from_json_obj(json.loads(line))
                if store.put_document(doc):
                    stored += 1
            except Exception as exc:
                log.warning("%s:%d: skipping bad document: %s", path, lineno, exc)
                bad_lines.append(lineno)
    return stored, bad_lines


# --- language detection ------------------------------------------------


@dataclass(frozen=True)
class LanguageProfile:
    lang: str
    trigram_weights: dict[str, float]

    def __post_init__(self):
        if len(self.trigram_weights) < 50:
            raise ValueError(
                f"profile {self.lang!r} has only {len(self.trigram_weights)} "
                "trigrams; at least 50 required"
            )
        if any(w < 0 for w in self.trigram_weights.values()):
            raise ValueError(f"profile {self.lang!r} has negative weights")


def text_trigrams(text: str) -> Counter:
    """Character trigram counts over the lowercased text, space-padded."""
    padded = " " + " ".join(text.lower().split()) + " "
    return Counter(padded[i:i + 3] for i in range(len(padded) - 2))


def profile_from_text(lang: str, text: str) -> LanguageProfile:
    counts = text_trigrams(text)
    total = sum(counts.values())
    return LanguageProfile(
        lang=lang,
        trigram_weights={g: c / total for g, c in counts.items()},
    )


def load_profile(path) -> LanguageProfile:
    """Read a TSV profile: header line '#lang: xx', then trigram<TAB>weight."""
    lang = None
    weights = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#lang:"):
                lang = line.split(":", 1)[1].strip()
                continue
            trigram, weight = line.split("\t")
            weights[trigram] = float(weight)
    if lang is None:
        raise ValueError(f"{path}: missing '#lang: xx' header")
    return LanguageProfile(lang=lang, trigram_weights=weights)


def save_profile(profile: LanguageProfile, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#lang: {profile.lang}\n")
        for trigram, weight in sorted(profile.trigram_weights.items()):
            fh.write(f"{trigram}\t{weight:.9g}\n")


def detect_language(text: str, profiles: list[LanguageProfile]) -> tuple[str | None, float]:
    """Best profile by cosine similarity between trigram frequency vectors.
    Texts shorter than 3 characters are indeterminate."""
    if not profiles:
        raise ValueError("at least one language profile required")
    if len(text) < 3:
        return None, 0.0
    counts = text_trigrams(text)
    norm = math.sqrt(sum(c * c for c in counts.values()))
    if norm == 0:
        return None, 0.0
    best_lang, best_sim = None, -1.0
    for profile in profiles:
        dot = sum(c * profile.trigram_weights.get(g, 0.0) for g, c in counts.items())
        pnorm = math.sqrt(sum(w * w for w in profile.trigram_weights.values()))
        sim = dot / (norm * pnorm) if pnorm > 0 else 0.0
        if sim > best_sim:
            best_lang, best_sim = profile.lang, sim
    return best_lang, max(0.0, min(1.0, best_sim))

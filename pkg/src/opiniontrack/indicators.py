"""Daily per-entity opinion indicators and their JSON rendering.

Buzz counts distinct documents, not mention occurrences, so one verbose
article cannot dominate a day. Shares are normalized per (day, medium).
Sentiment indicators exist for the twitter medium only, since sentiment
labels are attached to tweets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import date, timedelta, timezone

from .kalman import PRESETS, SmoothingPreset, kalman_smooth
from .models import KnowledgeBase
from .store import DocumentStore

MEDIA = ("twitter", "blogs", "news")
_SOURCE_TO_MEDIUM = {"twitter": "twitter", "blog": "blogs", "news": "news"}

BUZZ_METRICS = ("share", "count")
SENTIMENT_METRICS = ("log_ratio", "negatives_share")


@dataclass
class EntityCounts:
    mentions: int = 0
    positives: int = 0
    negatives: int = 0
    neutrals: int = 0


@dataclass
class DailyCounts:
    day: date
    medium: str
    entities: dict[str, EntityCounts] = field(default_factory=dict)

    def get(self, entity_id: str) -> EntityCounts:
        return self.entities.get(entity_id, EntityCounts())


def _mention_is_related(mention, source: str) -> bool:
    # news/blog mentions bypass disambiguation; unclassified tweets count
    # until a disambiguation verdict marks them Unrelated
    if source != "twitter":
        return True
    return mention.related is not False


def daily_counts(store: DocumentStore, kb: KnowledgeBase,
                 date_from: date, date_to: date) -> list[DailyCounts]:
    """Per (day, medium): distinct-document mention and sentiment counts
    for each KB entity. Days without any related mention yield no row."""
    if date_from > date_to:
        raise ValueError(f"date_from {date_from} is after date_to {date_to}")
    entity_ids = {e.id for e in kb}
    docs = {d.id: d for d in store.query_documents(date_from=date_from, date_to=date_to)}

    # (day, medium, entity) -> set of doc ids, split by sentiment label
    rows: dict[tuple[date, str], DailyCounts] = {}
    seen: dict[tuple[date, str, str], set[str]] = {}
    seen_label: dict[tuple[date, str, str, str], set[str]] = {}
    for mention in store.iter_mentions():
        doc = docs.get(mention.doc_id)
        if doc is None or mention.entity_id not in entity_ids:
            continue
        if not _mention_is_related(mention, doc.source):
            continue
        day = doc.timestamp.astimezone(timezone.utc).date()
        medium = _SOURCE_TO_MEDIUM[doc.source]
        key = (day, medium, mention.entity_id)
        seen.setdefault(key, set()).add(doc.id)
        if doc.source == "twitter" and mention.sentiment is not None:
            seen_label.setdefault(key + (mention.sentiment,), set()).add(doc.id)

    for (day, medium, entity_id), doc_ids in seen.items():
        row = rows.setdefault((day, medium), DailyCounts(day=day, medium=medium))
        counts = row.entities.setdefault(entity_id, EntityCounts())
        counts.mentions = len(doc_ids)
        key = (day, medium, entity_id)
        counts.positives = len(seen_label.get(key + ("positive",), ()))
        counts.negatives = len(seen_label.get(key + ("negative",), ()))
        counts.neutrals = len(seen_label.get(key + ("neutral",), ()))
    return sorted(rows.values(), key=lambda r: (r.day, MEDIA.index(r.medium)))


def buzz_share(counts: DailyCounts, entity_ids: list[str]) -> dict[str, float | None]:
    total = sum(counts.get(e).mentions for e in entity_ids)
    if total == 0:
        return {e: None for e in entity_ids}
    return {e: counts.get(e).mentions / total for e in entity_ids}


def buzz_count(counts: DailyCounts, entity_ids: list[str]) -> dict[str, int]:
    return {e: counts.get(e).mentions for e in entity_ids}


def log_sentiment(counts: DailyCounts, entity_ids: list[str]) -> dict[str, float]:
    """ln((positives + 1) / (negatives + 1)); defined for all counts."""
    out = {}
    for e in entity_ids:
        c = counts.get(e)
        # difference of logs, not log of the ratio: exactly antisymmetric
        # under swapping positives and negatives
        out[e] = math.log(c.positives + 1) - math.log(c.negatives + 1)
    return out


def negatives_share(counts: DailyCounts, entity_ids: list[str]) -> dict[str, float | None]:
    total = sum(counts.get(e).negatives for e in entity_ids)
    if total == 0:
        return {e: None for e in entity_ids}
    return {e: counts.get(e).negatives / total for e in entity_ids}


# --- series assembly ---------------------------------------------------


def _day_range(date_from: date, date_to: date) -> list[date]:
    return [date_from + timedelta(days=i) for i in range((date_to - date_from).days + 1)]


def build_series(rows: list[DailyCounts], kb: KnowledgeBase, medium: str,
                 metric: str, date_from: date, date_to: date
                 ) -> dict[str, list[tuple[date, float | None]]]:
    """Per-entity (date, value) series for one medium and metric over the
    full calendar grid [date_from, date_to]."""
    entity_ids = [e.id for e in kb]
    by_day = {r.day: r for r in rows if r.medium == medium}
    fns = {
        "share": buzz_share,
        "count": buzz_count,
        "log_ratio": log_sentiment,
        "negatives_share": negatives_share,
    }
    try:
        fn = fns[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}") from None
    series: dict[str, list] = {e: [] for e in entity_ids}
    for day in _day_range(date_from, date_to):
        counts = by_day.get(day, DailyCounts(day=day, medium=medium))
        values = fn(counts, entity_ids)
        for e in entity_ids:
            v = values[e]
            series[e].append((day, float(v) if v is not None else None))
    return series


def smooth_series(points: list[tuple[date, float | None]],
                  smoothing: str) -> list[float | None]:
    """Smoothed companion values for a series; `none` yields all nulls."""
    if smoothing == "none":
        return [None] * len(points)
    preset = PRESETS[smoothing]
    return [v for _, v in kalman_smooth(points, preset)]


def series_to_obj(entity_id: str, medium: str, metric: str, smoothing: str,
                  points: list[tuple[date, float | None]],
                  smoothed: list[float | None]) -> dict:
    """Canonical JSON object for one series; numbers carry at most nine
    fractional digits so output files are stable across runs."""
    def fmt(v):
        return None if v is None else round(v, 9)

    return {
        "entity": entity_id,
        "medium": medium,
        "metric": metric,
        "smoothing": smoothing,
        "points": [
            {"date": d.isoformat(), "value": fmt(v), "smoothed": fmt(s)}
            for (d, v), s in zip(points, smoothed)
        ],
    }


def compute_indicators(store: DocumentStore, kb: KnowledgeBase,
                       date_from: date, date_to: date,
                       smoothing: str = "default") -> list[dict]:
    """All series objects for every entity, medium, and metric, in a
    deterministic order."""
    rows = daily_counts(store, kb, date_from, date_to)
    combos = [(m, metric) for m in MEDIA for metric in BUZZ_METRICS]
    combos += [("twitter", metric) for metric in SENTIMENT_METRICS]
    cache = {
        combo: build_series(rows, kb, combo[0], combo[1], date_from, date_to)
        for combo in combos
    }
    out = []
    for entity in sorted(e.id for e in kb):
        for medium, metric in combos:
            points = cache[(medium, metric)][entity]
            out.append(series_to_obj(entity, medium, metric, smoothing,
                                     points, smooth_series(points, smoothing)))
    return out


def render_indicators_json(series_objs: list[dict]) -> str:
    return json.dumps(series_objs, ensure_ascii=False, indent=1) + "\n"

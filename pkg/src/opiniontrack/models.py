"""Canonical data types: documents, entities, mentions, knowledge base."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone

SOURCES = ("twitter", "news", "blog")
SENTIMENT_LABELS = ("negative", "neutral", "positive")


class KbError(ValueError):
    """Raised when a knowledge-base file violates the format contract."""


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC 3339 timestamp and normalize it to UTC."""
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Document:
    id: str
    source: str
    timestamp: datetime
    text: str
    author: str | None = None
    lang: str | None = None
    url: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if not self.text:
            raise ValueError("document text must be non-empty")
        if self.timestamp.tzinfo is None:
            object.__setattr__(self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc))

    def to_json_obj(self) -> dict:
        obj = {
            "id": self.id,
            "source": self.source,
            "timestamp": format_timestamp(self.timestamp),
            "text": self.text,
        }
        for key in ("author", "lang", "url"):
            value = getattr(self, key)
            if value is not None:
                obj[key] = value
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Document":
        return cls(
            id=obj["id"],
            source=obj["source"],
            timestamp=parse_timestamp(obj["timestamp"]),
            text=obj["text"],
            author=obj.get("author"),
            lang=obj.get("lang"),
            url=obj.get("url"),
        )


@dataclass(frozen=True)
class Entity:
    id: str
    canonical_name: str
    surface_forms: tuple[str, ...]
    profession: str | None = None
    party: str | None = None
    profile: str | None = None

    def __post_init__(self):
        if not self.surface_forms:
            raise KbError(f"entity {self.id!r} has no surface forms")
        if self.canonical_name not in self.surface_forms:
            raise KbError(
                f"entity {self.id!r}: canonical name {self.canonical_name!r} "
                "is not among its surface forms"
            )
        folded = [s.casefold() for s in self.surface_forms]
        if any(not s for s in self.surface_forms):
            raise KbError(f"entity {self.id!r} has an empty surface form")
        if len(set(folded)) != len(folded):
            raise KbError(f"entity {self.id!r} has duplicate surface forms after case folding")


@dataclass(frozen=True)
class KnowledgeBase:
    entities: tuple[Entity, ...]

    def __post_init__(self):
        if not self.entities:
            raise KbError("knowledge base must contain at least one entity")
        ids = [e.id for e in self.entities]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise KbError(f"duplicate entity id(s): {', '.join(dupes)}")

    def get(self, entity_id: str) -> Entity:
        for e in self.entities:
            if e.id == entity_id:
                return e
        raise KeyError(entity_id)

    def __iter__(self):
        return iter(self.entities)

    def __len__(self):
        return len(self.entities)


@dataclass(frozen=True)
class Mention:
    doc_id: str
    entity_id: str
    tok_start: int
    tok_end: int
    byte_start: int
    byte_end: int
    surface: str
    related: bool | None = None
    sentiment: str | None = None

    def __post_init__(self):
        if self.sentiment is not None and self.sentiment not in SENTIMENT_LABELS:
            raise ValueError(f"bad sentiment label {self.sentiment!r}")

    @property
    def key(self) -> tuple:
        return (self.doc_id, self.entity_id, self.tok_start, self.tok_end)

    def to_json_obj(self) -> dict:
        obj = {
            "doc_id": self.doc_id,
            "entity_id": self.entity_id,
            "tok_start": self.tok_start,
            "tok_end": self.tok_end,
            "byte_start": self.byte_start,
            "byte_end": self.byte_end,
            "surface": self.surface,
        }
        if self.related is not None:
            obj["related"] = self.related
        if self.sentiment is not None:
            obj["sentiment"] = self.sentiment
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Mention":
        return cls(
            doc_id=obj["doc_id"],
            entity_id=obj["entity_id"],
            tok_start=obj["tok_start"],
            tok_end=obj["tok_end"],
            byte_start=obj["byte_start"],
            byte_end=obj["byte_end"],
            surface=obj["surface"],
            related=obj.get("related"),
            sentiment=obj.get("sentiment"),
        )


def load_kb(path) -> KnowledgeBase:
    """Load a knowledge base from a JSONL file, one entity object per line."""
    entities = []
    seen_ids = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise KbError(f"{path}: malformed JSON on line {lineno}: {exc.msg}") from exc
            try:
                entity = Entity(
                    id=obj["id"],
                    canonical_name=obj["canonical"],
                    surface_forms=tuple(obj["surface_forms"]),
                    profession=obj.get("profession"),
                    party=obj.get("party"),
                    profile=obj.get("profile"),
                )
            except KeyError as exc:
                raise KbError(f"{path}: line {lineno} missing field {exc}") from exc
            if entity.id in seen_ids:
                raise KbError(f"{path}: duplicate entity id {entity.id!r} on line {lineno}")
            seen_ids.add(entity.id)
            entities.append(entity)
    return KnowledgeBase(entities=tuple(entities))

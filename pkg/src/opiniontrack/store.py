"""Embedded append-only document store backed by JSONL logs.

Layout of a store directory:

    documents.jsonl    append-only document log
    mentions.jsonl     append-only mention log (latest record per key wins)
    annotations.jsonl  append-only annotation log

Indexes are rebuilt in memory on open. Single writer, many readers: all
appends go through one lock; readers work on snapshots of the in-memory
lists, which only ever grow, so a concurrent read observes a consistent
prefix of the log.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path

from .models import Document, Mention, format_timestamp, parse_timestamp


class StoreConflictError(ValueError):
    """Same document id submitted with different content."""


@dataclass(frozen=True)
class Annotation:
    doc_id: str
    task: str  # "sentiment" | "disambig"
    label: str
    annotator: str
    timestamp: datetime
    entity_id: str | None = None

    LABELS = {
        "sentiment": ("negative", "neutral", "positive"),
        "disambig": ("related", "unrelated"),
    }

    def __post_init__(self):
        if self.task not in self.LABELS:
            raise ValueError(f"unknown annotation task {self.task!r}")
        if self.label not in self.LABELS[self.task]:
            raise ValueError(f"label {self.label!r} invalid for task {self.task!r}")
        if self.task == "disambig" and not self.entity_id:
            raise ValueError("disambig annotations require entity_id")

    @property
    def key(self) -> tuple:
        return (self.doc_id, self.entity_id, self.task, self.annotator)

    def to_json_obj(self) -> dict:
        obj = {
            "doc_id": self.doc_id,
            "task": self.task,
            "label": self.label,
            "annotator": self.annotator,
            "timestamp": format_timestamp(self.timestamp),
        }
        if self.entity_id is not None:
            obj["entity_id"] = self.entity_id
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Annotation":
        return cls(
            doc_id=obj["doc_id"],
            task=obj["task"],
            label=obj["label"],
            annotator=obj["annotator"],
            timestamp=parse_timestamp(obj["timestamp"]),
            entity_id=obj.get("entity_id"),
        )


class DocumentStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._doc_path = self.root / "documents.jsonl"
        self._mention_path = self.root / "mentions.jsonl"
        self._ann_path = self.root / "annotations.jsonl"
        self._lock = threading.Lock()
        self._docs: list[Document] = []
        self._by_id: dict[str, Document] = {}
        self._mentions: dict[tuple, Mention] = {}
        self._annotations: dict[tuple, Annotation] = {}
        self._ann_order: list[Annotation] = []
        self._load()

    def _load(self):
        if self._doc_path.exists():
            with open(self._doc_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        doc = Document.from_json_obj(json.loads(line))
                        self._docs.append(doc)
                        self._by_id[doc.id] = doc
        if self._mention_path.exists():
            with open(self._mention_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        m = Mention.from_json_obj(json.loads(line))
                        self._mentions[m.key] = m
        if self._ann_path.exists():
            with open(self._ann_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        ann = Annotation.from_json_obj(json.loads(line))
                        self._annotations[ann.key] = ann
                        self._ann_order.append(ann)

    @staticmethod
    def _append(path: Path, obj: dict):
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")

    # --- documents -----------------------------------------------------

    def put_document(self, doc: Document) -> bool:
        """Store a document. Returns True if newly stored, False if an
        identical document was already present. Divergent content under
        the same id raises StoreConflictError."""
        with self._lock:
            existing = self._by_id.get(doc.id)
            if existing is not None:
                if existing == doc:
                    return False
                raise StoreConflictError(
                    f"document {doc.id!r} already stored with different content"
                )
            self._append(self._doc_path, doc.to_json_obj())
            self._docs.append(doc)
            self._by_id[doc.id] = doc
            return True

    def get_document(self, doc_id: str) -> Document | None:
        return self._by_id.get(doc_id)

    def query_documents(self, source: str | None = None,
                        date_from: date | None = None,
                        date_to: date | None = None) -> list[Document]:
        """Documents whose UTC calendar date lies in [date_from, date_to],
        optionally filtered by source, ordered by (timestamp, id)."""
        if date_from is not None and date_to is not None and date_from > date_to:
            raise ValueError(f"date_from {date_from} is after date_to {date_to}")
        docs = self._docs[:len(self._docs)]  # consistent snapshot
        out = []
        for doc in docs:
            if source is not None and doc.source != source:
                continue
            day = doc.timestamp.astimezone(timezone.utc).date()
            if date_from is not None and day < date_from:
                continue
            if date_to is not None and day > date_to:
                continue
            out.append(doc)
        out.sort(key=lambda d: (d.timestamp, d.id))
        return out

    def __len__(self):
        return len(self._docs)

    # --- mentions ------------------------------------------------------

    def put_mention(self, mention: Mention):
        """Append a mention record; the latest record per
        (doc, entity, span) key wins on read."""
        with self._lock:
            self._append(self._mention_path, mention.to_json_obj())
            self._mentions[mention.key] = mention

    def put_mentions(self, mentions):
        for m in mentions:
            self.put_mention(m)

    def iter_mentions(self) -> list[Mention]:
        return list(self._mentions.values())

    def mentions_for_doc(self, doc_id: str) -> list[Mention]:
        return [m for m in self._mentions.values() if m.doc_id == doc_id]

    # --- annotations ---------------------------------------------------

    def put_annotation(self, ann: Annotation) -> None:
        with self._lock:
            if ann.key in self._annotations:
                raise StoreConflictError(
                    f"annotation for {ann.key} already exists"
                )
            self._append(self._ann_path, ann.to_json_obj())
            self._annotations[ann.key] = ann
            self._ann_order.append(ann)

    def iter_annotations(self, task: str | None = None) -> list[Annotation]:
        anns = self._ann_order[:len(self._ann_order)]
        if task is None:
            return anns
        return [a for a in anns if a.task == task]

    def has_annotation(self, doc_id: str, task: str, entity_id: str | None = None) -> bool:
        for a in self._annotations.values():
            if a.doc_id == doc_id and a.task == task and (
                    entity_id is None or a.entity_id == entity_id):
                return True
        return False

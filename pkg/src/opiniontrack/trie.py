"""Token-level prefix tree for multi-pattern surface-form matching."""

from __future__ import annotations

from .models import Document, KnowledgeBase, Mention
from .tokenizer import tokenize


class TrieNode:
    __slots__ = ("children", "entity_ids")

    def __init__(self):
        self.children: dict[str, TrieNode] = {}
        self.entity_ids: set[str] | None = None  # non-None marks a terminal


class SurfaceTrie:
    def __init__(self, case_sensitive: bool = False):
        self.case_sensitive = case_sensitive
        self.root = TrieNode()

    def _fold(self, token: str) -> str:
        return token if self.case_sensitive else token.casefold()

    def insert(self, surface_tokens: list[str], entity_id: str):
        node = self.root
        for tok in surface_tokens:
            tok = self._fold(tok)
            node = node.children.setdefault(tok, TrieNode())
        if node.entity_ids is None:
            node.entity_ids = set()
        node.entity_ids.add(entity_id)

    def longest_match(self, tokens: list[str], start: int) -> tuple[int, set[str]] | None:
        """Longest terminal reachable from token position `start`.
        Returns (match length, entity ids) or None."""
        node = self.root
        best = None
        i = start
        while i < len(tokens):
            child = node.children.get(self._fold(tokens[i]))
            if child is None:
                break
            node = child
            i += 1
            if node.entity_ids is not None:
                best = (i - start, node.entity_ids)
        return best


def build_trie(kb: KnowledgeBase, case_sensitive: bool = False) -> SurfaceTrie:
    trie = SurfaceTrie(case_sensitive=case_sensitive)
    for entity in kb:
        for surface in entity.surface_forms:
            toks = tokenize(surface).texts()
            if not toks:
                raise ValueError(
                    f"surface form {surface!r} of entity {entity.id!r} "
                    "tokenizes to zero tokens"
                )
            trie.insert(toks, entity.id)
    return trie


def find_mentions(trie: SurfaceTrie, doc: Document) -> list[Mention]:
    """Leftmost-longest, non-overlapping token-span matches. A terminal
    shared by k entities emits k mentions on the same span; the scan
    resumes after the matched span."""
    tokenized = tokenize(doc.text)
    tokens = tokenized.texts()
    mentions = []
    i = 0
    while i < len(tokens):
        hit = trie.longest_match(tokens, i)
        if hit is None:
            i += 1
            continue
        length, entity_ids = hit
        first = tokenized.tokens[i]
        last = tokenized.tokens[i + length - 1]
        surface = doc.text[first.start:last.end]
        for entity_id in sorted(entity_ids):
            mentions.append(Mention(
                doc_id=doc.id,
                entity_id=entity_id,
                tok_start=i,
                tok_end=i + length,
                byte_start=first.start,
                byte_end=last.end,
                surface=surface,
            ))
        i += length
    return mentions

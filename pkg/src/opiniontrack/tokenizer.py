"""Unicode tokenizer: maximal letter/digit runs plus a fixed emoticon list."""

from __future__ import annotations

import re
from dataclasses import dataclass

# Common western emoticons kept as single tokens. Order matters inside the
# alternation: longer variants first so ":-)" is not split at ":-".
EMOTICONS = (
    ":'-(", ":'(", ":-)", ":-(", ":-D", ":-P", ":-/", ";-)",
    ":)", ":(", ":D", ":P", ":/", ";)", ":o", ":O",
    "xD", "XD", "<3", "</3", "=)", "=(",
)

_emoticon_alt = "|".join(re.escape(e) for e in sorted(EMOTICONS, key=len, reverse=True))
# [^\W_] is any Unicode letter or digit (word char minus underscore)
_TOKEN_RE = re.compile(rf"(?:{_emoticon_alt})|[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class TokenizedText:
    tokens: tuple[Token, ...]
    original: str

    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]


def tokenize(text: str) -> TokenizedText:
    tokens = tuple(
        Token(m.group(0), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)
    )
    return TokenizedText(tokens=tokens, original=text)

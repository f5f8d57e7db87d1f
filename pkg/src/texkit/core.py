"""Shared document model: normalized text, spans, tokens, and analysis results.

Everything downstream (segmentation, tagging, NER, the API layer) operates on
the normalized text produced by :func:`normalize_text`; offsets are always
Unicode scalar indices into that string, never bytes.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .ner import EntityMention


class Language(str, Enum):
    AUTO = "auto"
    CHS = "chs"
    EN = "en"

    @classmethod
    def from_code(cls, code: str) -> "Language":
        try:
            return cls(code)
        except ValueError:
            raise ValueError(f"unsupported language code: {code!r}") from None


def detect_language(text: str) -> Language:
    """Resolve `auto` for one text item: Han-character ratio > 0.2 means chs."""
    total = 0
    han = 0
    for ch in text:
        if ch.isspace():
            continue
        total += 1
        if _is_han(ch):
            han += 1
    if total and han / total > 0.2:
        return Language.CHS
    return Language.EN


def _is_han(ch: str) -> bool:
    code = ord(ch)
    return (
        0x4E00 <= code <= 0x9FFF
        or 0x3400 <= code <= 0x4DBF
        or 0xF900 <= code <= 0xFAFF
        or 0x20000 <= code <= 0x2A6DF
    )


@dataclass(frozen=True)
class Span:
    """Half-open character range [offset, offset+length) in normalized text.

    Tokens always have length >= 1; zero-length spans exist only as the spans
    of empty grammar matches inside parse trees.
    """

    offset: int
    length: int

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError(f"span offset must be >= 0, got {self.offset}")
        if self.length < 0:
            raise ValueError(f"span length must be >= 0, got {self.length}")

    @property
    def end(self) -> int:
        return self.offset + self.length

    def overlaps(self, other: "Span") -> bool:
        return self.offset < other.end and other.offset < self.end


@dataclass(frozen=True)
class Token:
    """A word- or phrase-level unit: span into the normalized text plus tag."""

    span: Span
    surface: str
    pos_tag: str = ""

    def __post_init__(self):
        if self.span.length < 1:
            raise ValueError("token span must cover at least one character")
        if len(self.surface) != self.span.length:
            raise ValueError(
                f"surface {self.surface!r} does not match span length {self.span.length}"
            )


@dataclass(frozen=True)
class Header:
    """Per-request diagnostics carried alongside every analysis result."""

    time_cost_ms: float = 0.0
    core_time_cost_ms: float = 0.0
    ret_code: str = "ok"
    message: str = ""


@dataclass(frozen=True)
class AnalysisResult:
    """The assembled output of one analyzer run over one text item."""

    norm_text: str
    word_list: tuple[Token, ...] = ()
    phrase_list: tuple[Token, ...] = ()
    entity_list: tuple["EntityMention", ...] = ()
    header: Header = field(default_factory=Header)


# Full-width ASCII block: FF01-FF5E maps onto 21-7E by a fixed offset;
# the ideographic space U+3000 maps to a plain space.
_FULLWIDTH_OFFSET = 0xFEE0


def normalize_text(raw: str) -> str:
    """NFC + full-width-to-half-width + whitespace collapse; idempotent."""
    text = unicodedata.normalize("NFC", raw)
    out: list[str] = []
    prev_space = False
    for ch in text:
        code = ord(ch)
        if 0xFF01 <= code <= 0xFF5E:
            ch = chr(code - _FULLWIDTH_OFFSET)
        elif code == 0x3000:
            ch = " "
        if ch.isspace():
            if not prev_space:
                out.append(" ")
            prev_space = True
        else:
            out.append(ch)
            prev_space = False
    return "".join(out)

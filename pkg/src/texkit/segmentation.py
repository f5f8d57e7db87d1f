"""Two-granularity segmentation: word-level tokens and phrase-level merges.

English word segmentation follows Unicode-ish word boundaries (letter/digit
runs, hyphen and apostrophe joining letters, punctuation as single tokens).
Chinese uses forward maximum matching over a lexicon with per-character
fallback. Phrase merging removes boundaries covered by a lexicon phrase or by
a high-PMI bigram; deciding each boundary independently keeps the phrase
level a monotone coarsening when the lexicon grows.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .core import Language, Span, Token
from .errors import DataFormatError

DEFAULT_PMI_THRESHOLD = 3.0
DEFAULT_MIN_PAIR_COUNT = 3


@dataclass
class CollocationStats:
    unigram_counts: dict[str, int] = field(default_factory=dict)
    bigram_counts: dict[tuple[str, str], int] = field(default_factory=dict)
    total_unigrams: int = 0

    def add_sentence(self, tokens: list[str]) -> None:
        keys = [t.lower() for t in tokens]
        for k in keys:
            self.unigram_counts[k] = self.unigram_counts.get(k, 0) + 1
        self.total_unigrams += len(keys)
        for a, b in zip(keys, keys[1:]):
            self.bigram_counts[(a, b)] = self.bigram_counts.get((a, b), 0) + 1

    def merge(self, other: "CollocationStats") -> None:
        for k, c in other.unigram_counts.items():
            self.unigram_counts[k] = self.unigram_counts.get(k, 0) + c
        for k, c in other.bigram_counts.items():
            self.bigram_counts[k] = self.bigram_counts.get(k, 0) + c
        self.total_unigrams += other.total_unigrams

    def pmi(self, first: str, second: str) -> float | None:
        """log2( p(w1,w2) / (p(w1) p(w2)) ), None when any count is missing."""
        c12 = self.bigram_counts.get((first.lower(), second.lower()))
        c1 = self.unigram_counts.get(first.lower())
        c2 = self.unigram_counts.get(second.lower())
        if not c12 or not c1 or not c2 or not self.total_unigrams:
            return None
        return math.log2(c12 * self.total_unigrams / (c1 * c2))

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            fh.write("#unigrams\n")
            for term in sorted(self.unigram_counts):
                fh.write(f"{term}\t{self.unigram_counts[term]}\n")
            fh.write("#bigrams\n")
            for (a, b) in sorted(self.bigram_counts):
                fh.write(f"{a}\t{b}\t{self.bigram_counts[(a, b)]}\n")

    @classmethod
    def load(cls, path: str | Path) -> "CollocationStats":
        path = Path(path)
        stats = cls()
        section = ""
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#"):
                    section = line[1:].strip()
                    continue
                parts = line.split("\t")
                if section == "unigrams" and len(parts) == 2:
                    stats.unigram_counts[parts[0]] = int(parts[1])
                elif section == "bigrams" and len(parts) == 3:
                    stats.bigram_counts[(parts[0], parts[1])] = int(parts[2])
                else:
                    raise DataFormatError("malformed stats row", path=path, line=lineno)
        stats.total_unigrams = sum(stats.unigram_counts.values())
        return stats


def build_collocation_stats(
    corpus: Iterable[str], lang: Language, lexicon: frozenset[str] = frozenset()
) -> CollocationStats:
    from .core import normalize_text

    stats = CollocationStats()
    for line in corpus:
        line = normalize_text(line).strip()
        if not line:
            continue
        tokens = segment_words(line, lang, lexicon)
        if tokens:
            stats.add_sentence([t.surface for t in tokens])
    return stats


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or unicodedata.category(ch).startswith("M")


def _is_wordlike(surface: str) -> bool:
    return any(_is_word_char(ch) for ch in surface)


def _en_scan(text: str) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == " ":
            i += 1
            continue
        if _is_word_char(ch):
            j = i + 1
            while j < n:
                if _is_word_char(text[j]):
                    j += 1
                elif (
                    text[j] in "-'’"
                    and j + 1 < n
                    and text[j - 1].isalpha()
                    and text[j + 1].isalpha()
                ):
                    j += 2
                else:
                    break
            spans.append((i, j))
            i = j
        else:
            spans.append((i, i + 1))
            i += 1
    return spans


_ASCII_ALNUM = set(
    "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
)


def _chs_scan(text: str, lexicon: frozenset[str], max_entry: int) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == " ":
            i += 1
            continue
        matched = False
        if lexicon:
            for length in range(min(max_entry, n - i), 0, -1):
                if text[i : i + length].lower() in lexicon:
                    spans.append((i, i + length))
                    i += length
                    matched = True
                    break
        if matched:
            continue
        if ch.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            spans.append((i, j))
            i = j
        elif ch in _ASCII_ALNUM:
            j = i + 1
            while j < n and text[j] in _ASCII_ALNUM:
                j += 1
            spans.append((i, j))
            i = j
        else:
            spans.append((i, i + 1))
            i += 1
    return spans


def segment_words(
    text: str, lang: Language, lexicon: frozenset[str] = frozenset()
) -> list[Token]:
    """Word-level segmentation of normalized text; deterministic and pure."""
    if lang == Language.AUTO:
        raise ValueError("language must be resolved before segmentation")
    if not text:
        return []
    if lang == Language.CHS:
        max_entry = max((len(e) for e in lexicon), default=0)
        spans = _chs_scan(text, lexicon, max_entry)
    else:
        spans = _en_scan(text)
    return [Token(Span(a, b - a), text[a:b]) for a, b in spans]


def _boundary_mergeable(
    left: Token,
    right: Token,
    stats: CollocationStats | None,
    pmi_threshold: float,
    min_pair_count: int,
) -> bool:
    if not (_is_wordlike(left.surface) and _is_wordlike(right.surface)):
        return False
    if stats is None:
        return False
    count = stats.bigram_counts.get((left.surface.lower(), right.surface.lower()), 0)
    if count < min_pair_count:
        return False
    score = stats.pmi(left.surface, right.surface)
    return score is not None and score >= pmi_threshold


def _joined_surface(words: list[Token], i: int, j: int) -> str:
    """Surface of words[i:j] with inter-word gaps restored as spaces."""
    parts = [words[i].surface]
    for k in range(i + 1, j):
        gap = words[k].span.offset - words[k - 1].span.end
        parts.append(" " * gap)
        parts.append(words[k].surface)
    return "".join(parts)


def segment_phrases(
    words: list[Token],
    stats: CollocationStats | None = None,
    lexicon: frozenset[str] = frozenset(),
    *,
    pmi_threshold: float = DEFAULT_PMI_THRESHOLD,
    min_pair_count: int = DEFAULT_MIN_PAIR_COUNT,
) -> list[Token]:
    """Phrase-level coarsening of a word token list.

    A boundary between adjacent words disappears when some lexicon entry
    covers both words, or when the word bigram clears the PMI threshold with
    enough support. Phrases are the maximal runs of removed boundaries.
    """
    if not words:
        return []
    n = len(words)
    remove = [False] * (n - 1)
    if lexicon:
        max_words = max((entry.count(" ") + 1 for entry in lexicon), default=1)
        for i in range(n):
            for j in range(min(n, i + max_words), i, -1):
                if j - i < 2:
                    continue
                if _joined_surface(words, i, j).lower() in lexicon:
                    for k in range(i, j - 1):
                        remove[k] = True
                    break
    for k in range(n - 1):
        if not remove[k] and _boundary_mergeable(
            words[k], words[k + 1], stats, pmi_threshold, min_pair_count
        ):
            remove[k] = True
    phrases: list[Token] = []
    start = 0
    for k in range(n):
        if k == n - 1 or not remove[k]:
            first = words[start]
            last = words[k]
            span = Span(first.span.offset, last.span.end - first.span.offset)
            phrases.append(Token(span, _joined_surface(words, start, k + 1)))
            start = k + 1
    return phrases


def load_lexicon(path: str | Path) -> frozenset[str]:
    """One term per line; blank lines and #-comments skipped; lowercased."""
    terms = set()
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            term = line.strip()
            if term and not term.startswith("#"):
                terms.add(term.lower())
    return frozenset(terms)

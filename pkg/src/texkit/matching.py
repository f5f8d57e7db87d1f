"""Unsupervised sentence matching by greedy one-to-one word alignment.

Link weight between two word tokens is 1.0 for equal or synonymous words,
otherwise the (floored at 0) cosine of their input vectors. Links below the
floor are dropped; the score is twice the kept weight over the total token
count, so it lives in [0, 1] and hits 1 exactly on a perfect weight-1 cover.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .core import Language, normalize_text
from .embeddings import EmbeddingStore, cosine
from .segmentation import segment_words

DEFAULT_LINK_FLOOR = 0.3


class SynonymTable:
    """Groups of mutually synonymous terms; a term may sit in many groups."""

    def __init__(self, groups: list[set[str]] | None = None):
        self.groups: list[frozenset[str]] = []
        self._group_ids: dict[str, set[int]] = {}
        for group in groups or []:
            self.add_group(group)

    def add_group(self, terms) -> None:
        group = frozenset(t.strip().lower() for t in terms if t.strip())
        if len(group) < 2:
            return
        gid = len(self.groups)
        self.groups.append(group)
        for term in group:
            self._group_ids.setdefault(term, set()).add(gid)

    def are_synonyms(self, a: str, b: str) -> bool:
        ga = self._group_ids.get(a.strip().lower())
        if not ga:
            return False
        gb = self._group_ids.get(b.strip().lower())
        return bool(gb) and not ga.isdisjoint(gb)

    @classmethod
    def load(cls, path: str | Path) -> "SynonymTable":
        table = cls()
        with Path(path).open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line and not line.startswith("#"):
                    table.add_group(line.split("\t"))
        return table


@dataclass(frozen=True)
class MatchResult:
    score: float
    alignment: tuple[tuple[int, int, float], ...]


def _link_weight(
    a: str, b: str, store: EmbeddingStore | None, syn: SynonymTable | None,
    idf: dict[str, float] | None,
) -> float:
    la, lb = a.lower(), b.lower()
    if la == lb or (syn is not None and syn.are_synonyms(la, lb)):
        weight = 1.0
    elif store is not None:
        va = store.vector(la, "input")
        vb = store.vector(lb, "input")
        weight = max(0.0, cosine(va, vb)) if va is not None and vb is not None else 0.0
    else:
        weight = 0.0
    if idf is not None and weight > 0.0:
        weight *= min(1.0, (idf.get(la, 1.0) + idf.get(lb, 1.0)) / 2.0)
    return weight


def match_score(
    a: str,
    b: str,
    store: EmbeddingStore | None = None,
    syn: SynonymTable | None = None,
    lang: Language = Language.EN,
    *,
    min_link: float = DEFAULT_LINK_FLOOR,
    idf: dict[str, float] | None = None,
) -> MatchResult:
    """Similarity of two sentences with the word alignment that produced it."""
    tokens_a = [t.surface for t in segment_words(normalize_text(a), lang)]
    tokens_b = [t.surface for t in segment_words(normalize_text(b), lang)]
    if not tokens_a and not tokens_b:
        return MatchResult(1.0, ())
    # canonical side order keeps the result exactly symmetric in (a, b)
    swapped = (len(tokens_b), tokens_b) < (len(tokens_a), tokens_a)
    left, right = (tokens_b, tokens_a) if swapped else (tokens_a, tokens_b)
    pairs: list[tuple[float, int, int]] = []
    for i, x in enumerate(left):
        for j, y in enumerate(right):
            w = _link_weight(x, y, store, syn, idf)
            if w >= min_link:
                pairs.append((w, i, j))
    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))
    used_left: set[int] = set()
    used_right: set[int] = set()
    links: list[tuple[int, int, float]] = []
    for w, i, j in pairs:
        if i in used_left or j in used_right:
            continue
        used_left.add(i)
        used_right.add(j)
        links.append((i, j, w))
    if swapped:
        links = [(j, i, w) for i, j, w in links]
    links.sort(key=lambda l: (l[0], l[1]))
    total = sum(w for _, _, w in links)
    score = 2.0 * total / (len(tokens_a) + len(tokens_b))
    return MatchResult(min(1.0, score), tuple(links))

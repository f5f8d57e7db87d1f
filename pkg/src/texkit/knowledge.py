"""Offline knowledge construction: is-a extraction and term clustering.

A fixed per-language pattern set mines hyponym/hypernym pairs from a corpus;
hyponyms are then grouped per hypernym with greedy average-link agglomerative
clustering, which naturally lets one term live in several clusters (one per
hypernym sense).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .core import Language, normalize_text
from .embeddings import EmbeddingStore, cosine
from .errors import DataFormatError
from .segmentation import CollocationStats, segment_words

DEFAULT_MIN_COUNT = 2
DEFAULT_MIN_CLUSTER_SIZE = 2
LABEL_SHARE = 0.8


# ---------------------------------------------------------------------------
# is-a map
# ---------------------------------------------------------------------------


@dataclass
class IsaMap:
    """Aggregated (hyponym, hypernym) -> count table with a hyponym index."""

    counts: dict[tuple[str, str], int] = field(default_factory=dict)

    def add(self, hyponym: str, hypernym: str, count: int = 1) -> None:
        key = (hyponym, hypernym)
        self.counts[key] = self.counts.get(key, 0) + count

    def hypernyms_of(self, term: str) -> dict[str, int]:
        term = term.lower()
        return {
            hyper: c for (hypo, hyper), c in self.counts.items() if hypo == term
        }

    def hyponyms_of(self, hypernym: str) -> dict[str, int]:
        hypernym = hypernym.lower()
        return {
            hypo: c for (hypo, hyper), c in self.counts.items() if hyper == hypernym
        }

    def merge(self, other: "IsaMap") -> None:
        """Fold another shard's counts in; commutative and associative."""
        for key, count in other.counts.items():
            self.counts[key] = self.counts.get(key, 0) + count

    def hypernym_totals(self) -> dict[str, int]:
        totals: dict[str, int] = {}
        for (_, hyper), c in self.counts.items():
            totals[hyper] = totals.get(hyper, 0) + c
        return totals

    def __len__(self) -> int:
        return len(self.counts)

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            for (hypo, hyper) in sorted(self.counts):
                fh.write(f"{hypo}\t{hyper}\t{self.counts[(hypo, hyper)]}\n")

    @classmethod
    def load(cls, path: str | Path) -> "IsaMap":
        path = Path(path)
        isa = cls()
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise DataFormatError("expected 3 tab-separated fields", path=path, line=lineno)
                isa.counts[(parts[0], parts[1])] = int(parts[2])
        return isa


# Common nouns whose singular ends in "-ie"; "Xies" is otherwise read as the
# plural of "X...y" (cities -> city).
_IE_SINGULARS = {
    "movie", "cookie", "zombie", "calorie", "smoothie", "selfie", "genie",
    "pie", "tie", "lie", "die", "rookie", "goalie", "sortie", "collie",
    "bowtie", "prairie", "hippie", "birdie", "brownie",
}


def stem_plural(word: str) -> str:
    """Suffix-rule plural stemming (s/es/ies); no full lemmatization."""
    w = word.lower()
    if len(w) > 4 and w.endswith("ies"):
        if w[:-1] in _IE_SINGULARS:
            return w[:-1]
        return w[:-3] + "y"
    if len(w) > 3 and w.endswith(("ses", "xes", "zes", "ches", "shes")):
        return w[:-2]
    if len(w) > 2 and w.endswith("s") and not w.endswith("ss"):
        return w[:-1]
    return w


_EN_STOP_CHUNK = {"the", "a", "an", "other", "some", "many", "several", "various"}
_EN_CHUNK_BREAK = {
    "is", "are", "was", "were", "be", "been", "has", "have", "had", "will",
    "would", "can", "could", "do", "does", "did", "that", "which", "who",
    "in", "on", "at", "of", "for", "with", "from", "to",
}
_SEPARATORS = {",", ";", ".", "!", "?", ":", "(", ")"}


def _en_chunks_after(tokens: list[str], start: int) -> list[list[str]]:
    """Comma/and/or separated chunks following a pattern trigger."""
    chunks: list[list[str]] = []
    current: list[str] = []
    for tok in tokens[start:]:
        low = tok.lower()
        if tok in _SEPARATORS or low in ("and", "or"):
            if current:
                chunks.append(current)
                current = []
            if tok in _SEPARATORS and tok != ",":
                break
            continue
        current.append(tok)
    if current:
        chunks.append(current)
    return chunks


def _trim_chunk(chunk: list[str]) -> list[str]:
    """Keep the chunk's head run: leading capitalized run for proper names,
    otherwise at most three tokens up to a function word; articles dropped."""
    while chunk and chunk[0].lower() in _EN_STOP_CHUNK:
        chunk = chunk[1:]
    if not chunk:
        return []
    if chunk[0][:1].isupper():
        run = []
        for tok in chunk:
            if tok[:1].isupper() or tok.isdigit():
                run.append(tok)
            else:
                break
        return run
    run = []
    for tok in chunk[:3]:
        if tok.lower() in _EN_CHUNK_BREAK:
            break
        run.append(tok)
    return run


def _chunk_before(tokens: list[str], end: int) -> list[str]:
    """Trailing chunk ending just before position ``end``."""
    start = end
    while start > 0:
        prev = tokens[start - 1]
        if prev in _SEPARATORS or prev.lower() in ("and", "or", "as", "including"):
            break
        start -= 1
    return _trim_chunk_right(tokens[start:end])


def _trim_chunk_right(chunk: list[str]) -> list[str]:
    while chunk and chunk[0].lower() in _EN_STOP_CHUNK:
        chunk = chunk[1:]
    if not chunk:
        return []
    if chunk[-1][:1].isupper():
        run: list[str] = []
        for tok in reversed(chunk):
            if tok[:1].isupper() or tok.isdigit():
                run.append(tok)
            else:
                break
        run.reverse()
        return run
    return chunk[-3:]


def _head_noun(chunk: list[str]) -> str | None:
    words = [t for t in chunk if t.isalpha()]
    if not words:
        return None
    return stem_plural(words[-1])


def _window_until_separator(tokens: list[str], start: int, limit: int = 3) -> list[str]:
    window: list[str] = []
    for tok in tokens[start:]:
        if tok in _SEPARATORS or tok.lower() in ("and", "or"):
            break
        window.append(tok)
        if len(window) >= limit:
            break
    while window and window[0].lower() in _EN_STOP_CHUNK:
        window = window[1:]
    return window


def _extract_en(tokens: list[str], emit: Callable[[str, str], None]) -> None:
    lows = [t.lower() for t in tokens]
    n = len(tokens)
    for i in range(n):
        # "X such as Y[, Y2 and Y3]"  /  "X including Y"
        trigger_end = None
        if lows[i] == "such" and i + 1 < n and lows[i + 1] == "as":
            trigger_end = i + 2
        elif lows[i] == "including":
            trigger_end = i + 1
        if trigger_end is not None and i > 0:
            hyper = _head_noun(_chunk_before(tokens, i))
            if hyper:
                for chunk in _en_chunks_after(tokens, trigger_end):
                    chunk = _trim_chunk(chunk)
                    if chunk:
                        emit(" ".join(chunk), hyper)
        # "Y and other X"
        if lows[i] in ("and", "or") and i + 1 < n and lows[i + 1] == "other":
            hypo_chunk = _chunk_before(tokens, i)
            hyper = _head_noun(_window_until_separator(tokens, i + 2))
            if hypo_chunk and hyper:
                emit(" ".join(hypo_chunk), hyper)
        # "Y is a X" / "Y is an X"
        if lows[i] == "is" and i + 1 < n and lows[i + 1] in ("a", "an"):
            hypo_chunk = _chunk_before(tokens, i)
            hyper = _head_noun(_window_until_separator(tokens, i + 2))
            if hypo_chunk and hyper:
                emit(" ".join(hypo_chunk), hyper)


_CHS_PUNCT = set("。！？；，,.!?;:、()（）")


def _chs_segments(line: str) -> list[str]:
    segments = []
    current = []
    for ch in line:
        if ch in "。！？；，,.!?;:":
            if current:
                segments.append("".join(current))
                current = []
        else:
            current.append(ch)
    if current:
        segments.append("".join(current))
    return segments


def _chs_noun_run(text: str, max_len: int = 6) -> str | None:
    run = []
    for ch in text:
        if ch in _CHS_PUNCT or ch == " ":
            break
        run.append(ch)
    if not run or len(run) > max_len:
        return None
    return "".join(run)


def _extract_chs(line: str, emit: Callable[[str, str], None]) -> None:
    # "X(如Y)"  (parentheses are half-width after normalization)
    idx = 0
    while True:
        pos = line.find("(如", idx)
        if pos < 0:
            break
        close = line.find(")", pos)
        if close < 0:
            break
        hyper = _chs_noun_run(line[max(0, pos - 6) : pos][::-1])
        hyper = hyper[::-1] if hyper else None
        inner = line[pos + 2 : close]
        if hyper:
            for part in inner.replace("，", "、").split("、"):
                part = part.strip()
                if part:
                    emit(part, hyper)
        idx = close + 1
    for segment in _chs_segments(line):
        # "Y是一种X"
        pos = segment.find("是一种")
        if pos > 0:
            hypo = segment[:pos].strip()
            hyper = _chs_noun_run(segment[pos + 3 :])
            if hypo and hyper and len(hypo) <= 12:
                emit(hypo, hyper)
            continue
        # "Y1、Y2等X"
        pos = segment.find("等")
        if pos > 0:
            hyper = _chs_noun_run(segment[pos + 1 :])
            if not hyper:
                continue
            for part in segment[:pos].replace("和", "、").split("、"):
                part = part.strip()
                if part and len(part) <= 12:
                    emit(part, hyper)


def extract_isa_pairs(
    corpus: Iterable[str],
    lang: Language,
    *,
    min_count: int = DEFAULT_MIN_COUNT,
) -> IsaMap:
    """Mine hyponym/hypernym pairs from a line-oriented corpus."""
    raw = IsaMap()

    def emit(hypo: str, hyper: str) -> None:
        hypo = hypo.strip()
        hyper = hyper.strip()
        # common-noun hyponyms singular-stem; proper names stay intact
        if lang != Language.CHS and hypo and " " not in hypo and hypo[:1].islower():
            hypo = stem_plural(hypo)
        hypo = hypo.lower()
        if hypo and hyper and hypo != hyper:
            raw.add(hypo, hyper)

    for line in corpus:
        line = normalize_text(line).strip()
        if not line:
            continue
        if lang == Language.CHS:
            _extract_chs(line, emit)
        else:
            tokens = [t.surface for t in segment_words(line, Language.EN)]
            _extract_en(tokens, emit)
    kept = IsaMap()
    for key, count in raw.counts.items():
        if count >= min_count:
            kept.counts[key] = count
    return kept


# ---------------------------------------------------------------------------
# term similarity
# ---------------------------------------------------------------------------


def _context_vector(term: str, cooc: CollocationStats) -> dict[str, int]:
    term = term.lower()
    ctx: dict[str, int] = {}
    for (a, b), c in cooc.bigram_counts.items():
        if a == term:
            ctx[b] = ctx.get(b, 0) + c
        if b == term:
            ctx[a] = ctx.get(a, 0) + c
    return ctx


def _sparse_cosine(a: dict[str, int], b: dict[str, int]) -> float:
    dot = sum(v * b[k] for k, v in a.items() if k in b)
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def term_similarity(
    a: str,
    b: str,
    store: EmbeddingStore | None = None,
    isa: IsaMap | None = None,
    cooc: CollocationStats | None = None,
    *,
    weights: tuple[float, float, float] = (0.5, 0.25, 0.25),
) -> float:
    """Blend of embedding, distributional, and pattern similarity in [0, 1].

    Unavailable components drop out and the remaining weights renormalize.
    """
    parts: list[tuple[float, float]] = []  # (weight, value)
    if store is not None:
        va = store.vector(a, "input")
        vb = store.vector(b, "input")
        if va is not None and vb is not None:
            parts.append((weights[0], (cosine(va, vb) + 1.0) / 2.0))
    if cooc is not None:
        ca = _context_vector(a, cooc)
        cb = _context_vector(b, cooc)
        if ca and cb:
            value = _sparse_cosine(ca, cb)
            parts.append((weights[1], min(1.0, max(0.0, value))))
    if isa is not None:
        ha = set(isa.hypernyms_of(a))
        hb = set(isa.hypernyms_of(b))
        if ha and hb:
            union = ha | hb
            parts.append((weights[2], len(ha & hb) / len(union)))
    total = sum(w for w, _ in parts)
    if total == 0.0:
        return 0.0
    return sum(w * v for w, v in parts) / total


# ---------------------------------------------------------------------------
# clustering
# ---------------------------------------------------------------------------


@dataclass
class TermCluster:
    cluster_id: int
    hypernyms: list[str]
    members: list[str]

    def __post_init__(self):
        if not self.members:
            raise ValueError("cluster members must be non-empty")
        if not self.hypernyms:
            raise ValueError("cluster hypernyms must be non-empty")

    def contains(self, term: str) -> bool:
        term = term.lower()
        return any(m.lower() == term for m in self.members)


class ClusterIndex:
    """Id-keyed cluster collection with a case-folded member inverted index."""

    def __init__(self, clusters: Iterable[TermCluster]):
        self.clusters: dict[int, TermCluster] = {}
        self.member_index: dict[str, set[int]] = {}
        for cluster in clusters:
            if cluster.cluster_id in self.clusters:
                raise ValueError(f"duplicate cluster id {cluster.cluster_id}")
            self.clusters[cluster.cluster_id] = cluster
            for member in cluster.members:
                self.member_index.setdefault(member.lower(), set()).add(
                    cluster.cluster_id
                )

    def __len__(self) -> int:
        return len(self.clusters)

    def retrieve(self, term: str) -> list[TermCluster]:
        ids = self.member_index.get(term.strip().lower(), ())
        return [self.clusters[i] for i in sorted(ids)]

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            for cid in sorted(self.clusters):
                c = self.clusters[cid]
                fh.write(
                    json.dumps(
                        {"id": c.cluster_id, "hypernyms": c.hypernyms, "members": c.members},
                        ensure_ascii=False,
                        sort_keys=True,
                    )
                    + "\n"
                )

    @classmethod
    def load(cls, path: str | Path) -> "ClusterIndex":
        path = Path(path)
        clusters = []
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                    clusters.append(
                        TermCluster(int(obj["id"]), list(obj["hypernyms"]), list(obj["members"]))
                    )
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise DataFormatError(f"bad cluster row ({exc})", path=path, line=lineno)
        return cls(clusters)


def build_clusters(
    isa: IsaMap,
    sim: Callable[[str, str], float],
    threshold: float,
    seed: int = 0,
    *,
    min_cluster_size: int = DEFAULT_MIN_CLUSTER_SIZE,
    label_share: float = LABEL_SHARE,
) -> ClusterIndex:
    """Greedy average-link agglomerative clustering within each hypernym's
    hyponym set; merges continue while the best average similarity clears the
    threshold. Output is deterministic: hypernyms and hyponyms are visited in
    (count desc, lexicographic) order. ``seed`` is part of the interface for
    reproducibility bookkeeping; the algorithm itself draws no random numbers.
    """
    if not (0.0 < threshold < 1.0):
        raise ValueError("threshold must be strictly between 0 and 1")
    del seed
    totals = isa.hypernym_totals()
    hypernyms = sorted(totals, key=lambda h: (-totals[h], h))
    clusters: list[TermCluster] = []
    next_id = 1
    for hyper in hypernyms:
        member_counts = isa.hyponyms_of(hyper)
        members = sorted(member_counts, key=lambda m: (-member_counts[m], m))
        if not members:
            continue
        pair_sim: dict[tuple[str, str], float] = {}

        def sim_of(x: str, y: str) -> float:
            key = (x, y) if x <= y else (y, x)
            if key not in pair_sim:
                pair_sim[key] = sim(key[0], key[1])
            return pair_sim[key]

        groups: list[list[str]] = [[m] for m in members]
        while len(groups) > 1:
            best: tuple[float, int, int] | None = None
            for i in range(len(groups)):
                for j in range(i + 1, len(groups)):
                    total = sum(sim_of(x, y) for x in groups[i] for y in groups[j])
                    avg = total / (len(groups[i]) * len(groups[j]))
                    if best is None or avg > best[0] + 1e-12:
                        best = (avg, i, j)
            if best is None or best[0] < threshold:
                break
            _, i, j = best
            groups[i].extend(groups[j])
            del groups[j]
        for group in groups:
            if len(group) < min_cluster_size:
                continue
            labels = [hyper]
            group_set = set(group)
            coverage: dict[str, int] = {}
            for member in group:
                for other in isa.hypernyms_of(member):
                    if other != hyper:
                        coverage[other] = coverage.get(other, 0) + 1
            extra = [
                h for h, c in coverage.items() if c >= label_share * len(group_set)
            ]
            extra.sort(key=lambda h: (-coverage[h], h))
            labels.extend(extra)
            clusters.append(TermCluster(next_id, labels, list(group)))
            next_id += 1
    return ClusterIndex(clusters)

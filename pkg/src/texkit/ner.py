"""Named entity recognition: a trainable coarse BIO tagger, unsupervised
fine-grained typing via expansion over the cluster index, the hybrid
combiner, and the compatibility-credit F1 metric.

The coarse model is an averaged structured perceptron with Viterbi decoding;
BIO well-formedness is enforced as a hard transition constraint, so decoded
label sequences always convert to clean spans.
"""

from __future__ import annotations

import dataclasses
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .core import Span, Token
from .embeddings import EmbeddingStore
from .errors import DataFormatError
from .expansion import DEFAULT_WINDOW_RADIUS, context_from_tokens, expand
from .knowledge import ClusterIndex
from .ontology import Ontology, is_ancestor, is_compatible, score_candidate_types
from .postag import TrainConfig

MODEL_FORMAT = "texkit.ner"
MODEL_VERSION = 1

DEFAULT_COARSE_TYPES = ("person.generic", "loc.generic", "org.generic")

SOURCE_COARSE = "coarse"
SOURCE_FINE = "fine"
SOURCE_HYBRID = "hybrid"
SOURCE_GRAMMAR = "grammar"


@dataclass(frozen=True)
class EntityMention:
    span: Span
    surface: str
    type_id: str
    source: str
    related: tuple[str, ...] = ()
    meaning: dict | None = None


# ---------------------------------------------------------------------------
# BIO corpus handling
# ---------------------------------------------------------------------------


def _check_bio(label: str, prev: str, types: set[str], path, lineno: int) -> None:
    if label == "O":
        return
    if len(label) < 3 or label[1] != "-" or label[0] not in "BI":
        raise DataFormatError(f"malformed BIO label {label!r}", path=path, line=lineno)
    etype = label[2:]
    if etype not in types:
        raise DataFormatError(
            f"entity type {etype!r} not in the declared coarse set", path=path, line=lineno
        )
    if label[0] == "I":
        if prev in ("O", "<s>") or prev[2:] != etype:
            raise DataFormatError(
                f"{label!r} does not continue a {etype!r} span", path=path, line=lineno
            )


def read_bio_corpus(
    path: str | Path, types: tuple[str, ...] = DEFAULT_COARSE_TYPES
) -> list[list[tuple[str, str]]]:
    """Column format ``word<TAB>label`` with blank-line sentence breaks;
    BIO structure is validated with line numbers."""
    path = Path(path)
    type_set = set(types)
    sentences: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] = []
    prev = "<s>"
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if current:
                    sentences.append(current)
                    current = []
                prev = "<s>"
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise DataFormatError("expected 'word<TAB>label'", path=path, line=lineno)
            word, label = parts
            _check_bio(label, prev, type_set, path, lineno)
            current.append((word, label))
            prev = label
    if current:
        sentences.append(current)
    return sentences


# ---------------------------------------------------------------------------
# coarse model
# ---------------------------------------------------------------------------


@dataclass
class CoarseModel:
    label_set: list[str]
    feature_weights: dict[str, dict[str, float]] = field(default_factory=dict)
    transition_weights: dict[str, dict[str, float]] = field(default_factory=dict)
    lang: str = "en"

    def save(self, path: str | Path) -> None:
        payload = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "lang": self.lang,
            "label_set": self.label_set,
            "feature_weights": self.feature_weights,
            "transition_weights": self.transition_weights,
        }
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "CoarseModel":
        path = Path(path)
        with path.open(encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != MODEL_FORMAT:
            raise DataFormatError("not a coarse NER model file", path=path)
        return cls(
            label_set=list(payload["label_set"]),
            feature_weights={f: dict(t) for f, t in payload["feature_weights"].items()},
            transition_weights={a: dict(t) for a, t in payload["transition_weights"].items()},
            lang=payload.get("lang", "en"),
        )


def _ner_features(words: list[str], pos: list[str], i: int) -> list[str]:
    w = words[i]
    low = w.lower()
    feats = [
        "bias",
        f"w={low}",
        f"cap={w[:1].isupper()}",
        f"allcap={w.isupper() and len(w) > 1}",
        f"digit={any(ch.isdigit() for ch in w)}",
        f"p3={low[:3]}",
        f"s3={low[-3:]}",
        f"w-1={words[i - 1].lower() if i > 0 else '<s>'}",
        f"w+1={words[i + 1].lower() if i + 1 < len(words) else '</s>'}",
    ]
    if pos[i]:
        feats.append(f"pos={pos[i]}")
        feats.append(f"pos-1={pos[i - 1] if i > 0 else '<s>'}")
    return feats


def _bio_transition_ok(prev: str, cur: str) -> bool:
    if cur.startswith("I-"):
        return prev != "O" and prev != "<s>" and prev[2:] == cur[2:]
    return True


def _viterbi(
    words: list[str],
    pos: list[str],
    labels: list[str],
    fw: dict[str, dict[str, float]],
    tw: dict[str, dict[str, float]],
) -> list[str]:
    n = len(words)
    if n == 0:
        return []
    k = len(labels)
    score = [[-1e30] * k for _ in range(n)]
    back = [[0] * k for _ in range(n)]
    for i in range(n):
        feats = _ner_features(words, pos, i)
        emit = [0.0] * k
        for f in feats:
            table = fw.get(f)
            if table:
                for j, lab in enumerate(labels):
                    v = table.get(lab)
                    if v:
                        emit[j] += v
        if i == 0:
            for j, lab in enumerate(labels):
                if _bio_transition_ok("<s>", lab):
                    score[0][j] = emit[j] + tw.get("<s>", {}).get(lab, 0.0)
        else:
            for j, lab in enumerate(labels):
                best_p, best_s = -1, -1e30
                for p, plab in enumerate(labels):
                    if score[i - 1][p] <= -1e29 or not _bio_transition_ok(plab, lab):
                        continue
                    s = score[i - 1][p] + tw.get(plab, {}).get(lab, 0.0)
                    if s > best_s:
                        best_s, best_p = s, p
                if best_p >= 0:
                    score[i][j] = best_s + emit[j]
                    back[i][j] = best_p
    last = max(range(k), key=lambda j: (score[n - 1][j], -j))
    path = [last]
    for i in range(n - 1, 0, -1):
        path.append(back[i][path[-1]])
    path.reverse()
    return [labels[j] for j in path]


def train_coarse(
    corpus: str | Path | list[list[tuple[str, str]]],
    config: TrainConfig = TrainConfig(),
    *,
    types: tuple[str, ...] = DEFAULT_COARSE_TYPES,
    lang: str = "en",
) -> CoarseModel:
    """Averaged structured perceptron; deterministic for a fixed seed."""
    if isinstance(corpus, (str, Path)):
        sentences = read_bio_corpus(corpus, types)
    else:
        sentences = corpus
    if not sentences:
        raise DataFormatError("training corpus is empty")
    labels = ["O"]
    for t in types:
        labels.append(f"B-{t}")
        labels.append(f"I-{t}")
    fw: dict[str, dict[str, float]] = {}
    tw: dict[str, dict[str, float]] = {}
    fw_acc: dict[str, dict[str, float]] = {}
    tw_acc: dict[str, dict[str, float]] = {}
    step = 0

    def bump(table, acc, key, lab, delta):
        row = table.setdefault(key, {})
        row[lab] = row.get(lab, 0.0) + delta
        arow = acc.setdefault(key, {})
        arow[lab] = arow.get(lab, 0.0) + step * delta

    rng = random.Random(config.seed)
    order = list(range(len(sentences)))
    for _ in range(config.epochs):
        rng.shuffle(order)
        for si in order:
            sent = sentences[si]
            words = [w for w, _ in sent]
            gold = [lab for _, lab in sent]
            pos = [""] * len(words)
            step += 1
            pred = _viterbi(words, pos, labels, fw, tw)
            if pred == gold:
                continue
            prev_g, prev_p = "<s>", "<s>"
            for i in range(len(words)):
                if pred[i] != gold[i]:
                    for f in _ner_features(words, pos, i):
                        bump(fw, fw_acc, f, gold[i], +1.0)
                        bump(fw, fw_acc, f, pred[i], -1.0)
                if (prev_g, gold[i]) != (prev_p, pred[i]):
                    bump(tw, tw_acc, prev_g, gold[i], +1.0)
                    bump(tw, tw_acc, prev_p, pred[i], -1.0)
                prev_g, prev_p = gold[i], pred[i]
    total = max(1, step)
    avg_fw = {
        f: {
            lab: w - fw_acc.get(f, {}).get(lab, 0.0) / total
            for lab, w in row.items()
            if abs(w - fw_acc.get(f, {}).get(lab, 0.0) / total) > 1e-9
        }
        for f, row in fw.items()
    }
    avg_fw = {f: row for f, row in avg_fw.items() if row}
    avg_tw = {
        a: {
            lab: w - tw_acc.get(a, {}).get(lab, 0.0) / total
            for lab, w in row.items()
            if abs(w - tw_acc.get(a, {}).get(lab, 0.0) / total) > 1e-9
        }
        for a, row in tw.items()
    }
    avg_tw = {a: row for a, row in avg_tw.items() if row}
    return CoarseModel(label_set=labels, feature_weights=avg_fw, transition_weights=avg_tw, lang=lang)


def _spans_from_bio(labels: list[str]) -> list[tuple[int, int, str]]:
    spans = []
    start = None
    etype = None
    for i, lab in enumerate(labels):
        if lab.startswith("B-"):
            if start is not None:
                spans.append((start, i, etype))
            start, etype = i, lab[2:]
        elif lab.startswith("I-") and start is not None and lab[2:] == etype:
            continue
        else:
            if start is not None:
                spans.append((start, i, etype))
                start, etype = None, None
    if start is not None:
        spans.append((start, len(labels), etype))
    return spans


def tag_coarse(tokens: list[Token], model: CoarseModel) -> list[EntityMention]:
    """Viterbi decode BIO labels and convert spans to mentions."""
    if not tokens:
        return []
    words = [t.surface for t in tokens]
    pos = [t.pos_tag for t in tokens]
    labels = _viterbi(words, pos, model.label_set, model.feature_weights, model.transition_weights)
    mentions = []
    for start, end, etype in _spans_from_bio(labels):
        first, last = tokens[start], tokens[end - 1]
        span = Span(first.span.offset, last.span.end - first.span.offset)
        surface = _surface_of(tokens, start, end)
        mentions.append(EntityMention(span, surface, etype, SOURCE_COARSE))
    return mentions


def _surface_of(tokens: list[Token], start: int, end: int) -> str:
    parts = [tokens[start].surface]
    for k in range(start + 1, end):
        gap = tokens[k].span.offset - tokens[k - 1].span.end
        parts.append(" " * gap)
        parts.append(tokens[k].surface)
    return "".join(parts)


# ---------------------------------------------------------------------------
# fine-grained unsupervised tagging
# ---------------------------------------------------------------------------


def tag_fine_unsupervised(
    tokens: list[Token],
    index: ClusterIndex,
    store: EmbeddingStore,
    ont: Ontology,
    *,
    phrases: list[Token] | None = None,
    window_radius: int = DEFAULT_WINDOW_RADIUS,
) -> list[EntityMention]:
    """Type cluster-member mentions through expansion plus type scoring.

    Candidates are word tokens and phrase tokens whose surfaces appear in the
    cluster member index; the method cannot type mentions outside the
    clusters. Overlaps resolve longest-match-first, left to right.
    """
    candidates: list[tuple[Token, int, int]] = []  # (token, word_start, word_end)
    for i, tok in enumerate(tokens):
        if tok.surface.lower() in index.member_index:
            candidates.append((tok, i, i + 1))
    if phrases:
        word_spans = {(t.span.offset, t.span.length) for t in tokens}
        for ph in phrases:
            if ph.surface.lower() not in index.member_index:
                continue
            if (ph.span.offset, ph.span.length) in word_spans:
                continue  # identical single-word candidate already queued
            covered = [
                i
                for i, tok in enumerate(tokens)
                if tok.span.offset >= ph.span.offset and tok.span.end <= ph.span.end
            ]
            if covered:
                candidates.append((ph, covered[0], covered[-1] + 1))
    mentions: list[EntityMention] = []
    for tok, wstart, wend in candidates:
        ctx = context_from_tokens(tokens, wstart, wend, tok.surface, radius=window_radius)
        result = expand(ctx, index, store)
        if result is None:
            continue
        cluster = index.clusters[result.best_cluster_id]
        ranked = score_candidate_types(cluster.hypernyms, cluster.members, ont)
        if not ranked:
            continue
        mentions.append(
            EntityMention(
                span=tok.span,
                surface=tok.surface,
                type_id=ranked[0][0],
                source=SOURCE_FINE,
                related=result.related_terms,
            )
        )
    mentions.sort(key=lambda m: (-m.span.length, m.span.offset))
    kept: list[EntityMention] = []
    for m in mentions:
        if not any(m.span.overlaps(k.span) for k in kept):
            kept.append(m)
    kept.sort(key=lambda m: m.span.offset)
    return kept


# ---------------------------------------------------------------------------
# hybrid combination and evaluation
# ---------------------------------------------------------------------------


def combine_hybrid(
    fine: list[EntityMention],
    coarse: list[EntityMention],
    ont: Ontology,
) -> list[EntityMention]:
    """Merge fine and coarse detections.

    Same span detected by both: the fine type wins when compatible with the
    coarse type, otherwise the coarse type. Partial overlaps keep the coarse
    span. One-sided detections pass through unchanged.
    """
    coarse_by_span = {(m.span.offset, m.span.length): m for m in coarse}
    out: list[EntityMention] = []
    fine_exact: set[tuple[int, int]] = set()
    for fm in fine:
        key = (fm.span.offset, fm.span.length)
        cm = coarse_by_span.get(key)
        if cm is not None:
            fine_exact.add(key)
            fine_in_ont = fm.type_id in ont
            coarse_in_ont = cm.type_id in ont
            if fine_in_ont and coarse_in_ont and is_compatible(fm.type_id, cm.type_id, ont):
                out.append(dataclasses.replace(fm, source=SOURCE_HYBRID))
            else:
                out.append(dataclasses.replace(cm, source=SOURCE_HYBRID))
        elif not any(fm.span.overlaps(c.span) for c in coarse):
            out.append(fm)
        # partial overlap with a coarse span: the coarse mention wins
    for cm in coarse:
        if (cm.span.offset, cm.span.length) not in fine_exact:
            out.append(cm)
    out.sort(key=lambda m: (m.span.offset, -m.span.length))
    kept: list[EntityMention] = []
    for m in out:
        if not any(m.span.overlaps(k.span) for k in kept):
            kept.append(m)
    return kept


def f1_variant(
    gold: list[EntityMention],
    pred: list[EntityMention],
    ont: Ontology,
) -> tuple[float, float, float]:
    """Precision/recall/F1 where a coarse prediction that is compatible with
    the gold fine type earns half credit; spans must match exactly."""
    gold_by_span: dict[tuple[int, int], str] = {
        (m.span.offset, m.span.length): m.type_id for m in gold
    }
    matches = 0.0
    for m in pred:
        gold_type = gold_by_span.get((m.span.offset, m.span.length))
        if gold_type is None:
            continue
        if m.type_id == gold_type:
            matches += 1.0
        elif (
            m.type_id in ont
            and gold_type in ont
            and is_ancestor(m.type_id, gold_type, ont)
        ):
            matches += 0.5
    precision = matches / len(pred) if pred else 0.0
    recall = matches / len(gold) if gold else 0.0
    if precision + recall == 0.0:
        return (precision, recall, 0.0)
    return (precision, recall, 2 * precision * recall / (precision + recall))

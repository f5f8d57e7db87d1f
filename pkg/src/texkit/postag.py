"""Log-linear part-of-speech tagger.

Per-token multinomial logistic regression over a fixed feature-template list,
trained by seeded SGD with gold tag histories and decoded greedily left to
right with predicted histories. Built for speed: sparse dict weights, no
beam. Tag sets (PTB for English, CTB for Chinese) ship as data files.
"""

from __future__ import annotations

import dataclasses
import json
import math
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .core import Token
from .errors import DataFormatError

MODEL_FORMAT = "texkit.pos"
MODEL_VERSION = 1

_BOUNDARY_TAG = "<s>"
_BOUNDARY_WORD = "<s>"


def load_tag_set(name: str) -> list[str]:
    """Bundled tag inventory by name: 'ptb' or 'ctb'."""
    ref = resources.files("texkit.data.tagsets").joinpath(f"{name.lower()}.txt")
    return [line.strip() for line in ref.read_text(encoding="utf-8").splitlines() if line.strip()]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 10
    learning_rate: float = 0.1
    l2: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")


@dataclass
class PosModel:
    tag_set: list[str]
    weights: dict[str, dict[str, float]] = field(default_factory=dict)
    lang: str = "en"
    loss_history: list[float] = field(default_factory=list)

    def save(self, path: str | Path) -> None:
        payload = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "lang": self.lang,
            "tag_set": self.tag_set,
            "weights": self.weights,
            "loss_history": self.loss_history,
        }
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "PosModel":
        path = Path(path)
        with path.open(encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != MODEL_FORMAT:
            raise DataFormatError("not a POS model file", path=path)
        return cls(
            tag_set=list(payload["tag_set"]),
            weights={f: dict(tw) for f, tw in payload["weights"].items()},
            lang=payload.get("lang", "en"),
            loss_history=list(payload.get("loss_history", ())),
        )


def read_tagged_corpus(path: str | Path) -> list[list[tuple[str, str]]]:
    """Column format: ``word<TAB>tag`` rows, blank line between sentences."""
    path = Path(path)
    sentences: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if current:
                    sentences.append(current)
                    current = []
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise DataFormatError("expected 'word<TAB>tag'", path=path, line=lineno)
            current.append((parts[0], parts[1]))
    if current:
        sentences.append(current)
    return sentences


def extract_features(
    words: list[str], i: int, prev_tag: str, prev2_tag: str
) -> list[str]:
    """The fixed template list; history features carry the, possibly
    predicted, previous one and two tags."""
    w = words[i]
    low = w.lower()
    feats = [
        f"w={w}",
        f"lw={low}",
        f"p1={low[:1]}",
        f"p2={low[:2]}",
        f"p3={low[:3]}",
        f"s1={low[-1:]}",
        f"s2={low[-2:]}",
        f"s3={low[-3:]}",
        f"digit={any(ch.isdigit() for ch in w)}",
        f"hyph={'-' in w}",
        f"t-1={prev_tag}",
        f"t-2,-1={prev2_tag}|{prev_tag}",
        f"w-1={words[i - 1].lower() if i > 0 else _BOUNDARY_WORD}",
        f"w+1={words[i + 1].lower() if i + 1 < len(words) else _BOUNDARY_WORD}",
    ]
    return feats


def _scores(
    weights: dict[str, dict[str, float]],
    feats: list[str],
    index: dict[str, int],
) -> list[float]:
    totals = [0.0] * len(index)
    for f in feats:
        table = weights.get(f)
        if table:
            for tag, w in table.items():
                totals[index[tag]] += w
    return totals


def _softmax(scores: list[float]) -> list[float]:
    top = max(scores)
    exps = [math.exp(s - top) for s in scores]
    z = sum(exps)
    return [e / z for e in exps]


def _corpus_loss(
    weights: dict[str, dict[str, float]],
    sentences: list[list[tuple[str, str]]],
    tags: list[str],
    l2: float,
) -> float:
    """Average per-token NLL plus the L2 penalty, with gold histories."""
    nll = 0.0
    count = 0
    index = {t: k for k, t in enumerate(tags)}
    for sent in sentences:
        words = [w for w, _ in sent]
        prev, prev2 = _BOUNDARY_TAG, _BOUNDARY_TAG
        for i, (_, gold) in enumerate(sent):
            feats = extract_features(words, i, prev, prev2)
            probs = _softmax(_scores(weights, feats, index))
            nll -= math.log(max(probs[index[gold]], 1e-300))
            count += 1
            prev2, prev = prev, gold
    sq = sum(w * w for table in weights.values() for w in table.values())
    return nll / max(1, count) + 0.5 * l2 * sq


def train_log_linear(
    corpus: str | Path | list[list[tuple[str, str]]],
    config: TrainConfig = TrainConfig(),
    *,
    tag_set: list[str] | None = None,
    tag_set_name: str = "ptb",
    lang: str = "en",
) -> PosModel:
    """Train the tagger; deterministic for a fixed seed."""
    if isinstance(corpus, (str, Path)):
        sentences = read_tagged_corpus(corpus)
    else:
        sentences = corpus
    if not sentences:
        raise DataFormatError("training corpus is empty")
    tags = list(tag_set) if tag_set is not None else load_tag_set(tag_set_name)
    known = set(tags)
    lineno = 0
    for sent in sentences:
        for word, tag in sent:
            lineno += 1
            if tag not in known:
                raise DataFormatError(
                    f"tag {tag!r} (word {word!r}) not in the {tag_set_name.upper()} tag set",
                    line=lineno,
                )
        lineno += 1  # sentence separator
    weights: dict[str, dict[str, float]] = {}
    index = {t: k for k, t in enumerate(tags)}
    rng = random.Random(config.seed)
    order = list(range(len(sentences)))
    loss_history: list[float] = []
    for epoch in range(config.epochs):
        rng.shuffle(order)
        lr = config.learning_rate / (1.0 + epoch)
        for si in order:
            sent = sentences[si]
            words = [w for w, _ in sent]
            prev, prev2 = _BOUNDARY_TAG, _BOUNDARY_TAG
            for i, (_, gold) in enumerate(sent):
                feats = extract_features(words, i, prev, prev2)
                probs = _softmax(_scores(weights, feats, index))
                gold_k = index[gold]
                for f in feats:
                    table = weights.setdefault(f, {})
                    if config.l2:
                        for t in list(table):
                            table[t] -= lr * config.l2 * table[t]
                    for k, tag in enumerate(tags):
                        grad = probs[k] - (1.0 if k == gold_k else 0.0)
                        if grad:
                            table[tag] = table.get(tag, 0.0) - lr * grad
                prev2, prev = prev, gold
        loss_history.append(_corpus_loss(weights, sentences, tags, config.l2))
    # prune near-zero entries so saved models stay small
    for f in list(weights):
        table = {t: w for t, w in weights[f].items() if abs(w) > 1e-9}
        if table:
            weights[f] = table
        else:
            del weights[f]
    return PosModel(tag_set=tags, weights=weights, lang=lang, loss_history=loss_history)


def tag_pos(tokens: list[Token], model: PosModel) -> list[Token]:
    """Greedy left-to-right decoding; returns new tokens with tags set."""
    if not tokens:
        return []
    words = [t.surface for t in tokens]
    tags = model.tag_set
    index = {t: k for k, t in enumerate(tags)}
    out: list[Token] = []
    prev, prev2 = _BOUNDARY_TAG, _BOUNDARY_TAG
    for i, token in enumerate(tokens):
        feats = extract_features(words, i, prev, prev2)
        scores = _scores(model.weights, feats, index)
        best = max(range(len(tags)), key=lambda k: (scores[k], -k))
        tag = tags[best]
        out.append(dataclasses.replace(token, pos_tag=tag))
        prev2, prev = prev, tag
    return out


def accuracy(model: PosModel, sentences: list[list[tuple[str, str]]]) -> float:
    """Token accuracy with greedy decoding over plain word sequences."""
    from .core import Span

    correct = 0
    total = 0
    for sent in sentences:
        offset = 0
        toks = []
        for word, _ in sent:
            toks.append(Token(Span(offset, len(word)), word))
            offset += len(word) + 1
        tagged = tag_pos(toks, model)
        for tok, (_, gold) in zip(tagged, sent):
            total += 1
            if tok.pos_tag == gold:
                correct += 1
    return correct / max(1, total)

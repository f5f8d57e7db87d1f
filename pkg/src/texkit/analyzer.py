"""The analysis engine: loads a model directory once, then serves concurrent
analyze/match calls over immutable state.

Model directory layout (all files required)::

    ontology.jsonl        type hierarchy
    clusters.jsonl        term clusters
    isa.tsv               hyponym -> hypernym counts
    embeddings.in.txt     input word vectors
    embeddings.out.txt    output word vectors
    pos.model             log-linear POS tagger
    ner.model             coarse NER perceptron
    grammars/             <lang>_time.gdl, <lang>_quantity.gdl
    synonyms.tsv          synonym groups for matching
    stats.tsv             collocation counts for phrase merging

POS/NER models carry their training language and only run on matching input;
other languages still get segmentation, fine NER, and grammar entities.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .core import AnalysisResult, Header, Language, Token, normalize_text
from .embeddings import EmbeddingStore, load_embeddings
from .errors import DataFormatError, NormalizationError
from .knowledge import ClusterIndex, IsaMap
from .grammar.earley import earley_parse
from .grammar.normalize import KIND_QUANTITY, ReferenceTime, normalize
from .grammar.rules import Grammar, load_grammar
from .matching import MatchResult, SynonymTable, match_score
from .ner import (
    SOURCE_GRAMMAR,
    CoarseModel,
    EntityMention,
    combine_hybrid,
    tag_coarse,
    tag_fine_unsupervised,
)
from .ontology import Ontology, load_ontology
from .postag import PosModel, tag_pos
from .segmentation import CollocationStats, segment_phrases, segment_words

GRAMMAR_CATEGORIES = ("time", "quantity")
_CATEGORY_TYPES = {"time": "time.generic", "quantity": "quantity.generic"}


def bundled_model_dir() -> Path:
    """Path of the toy knowledge base shipped with the package."""
    return Path(resources.files("texkit.data").joinpath("toykb"))


def _base_lexicon(lang: Language) -> frozenset[str]:
    name = "base_lexicon_chs.txt" if lang == Language.CHS else "base_lexicon_en.txt"
    ref = resources.files("texkit.data").joinpath(name)
    terms = set()
    for line in ref.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.add(line.lower())
    return frozenset(terms)


@dataclass(frozen=True)
class AnalyzeSettings:
    """Resolved per-request knobs; language must not be AUTO here."""

    lang: Language = Language.EN
    word_seg: bool = True
    pos_tagging: bool = True
    ner: bool = True
    reference_time: ReferenceTime | None = None


class Engine:
    def __init__(
        self,
        ontology: Ontology,
        clusters: ClusterIndex,
        store: EmbeddingStore,
        pos_model: PosModel | None,
        ner_model: CoarseModel | None,
        grammars: dict[tuple[str, str], Grammar],
        stats: CollocationStats | None,
        synonyms: SynonymTable | None,
        isa: IsaMap | None = None,
    ):
        self.ontology = ontology
        self.clusters = clusters
        self.store = store
        self.pos_model = pos_model
        self.ner_model = ner_model
        self.grammars = grammars
        self.stats = stats
        self.synonyms = synonyms
        self.isa = isa
        self._lexicons: dict[Language, frozenset[str]] = {}
        for lang in (Language.EN, Language.CHS):
            terms = set(_base_lexicon(lang))
            terms.update(self.clusters.member_index)
            for t in self.ontology.types.values():
                terms.update(i.lower() for i in t.sample_instances)
            self._lexicons[lang] = frozenset(terms)

    @classmethod
    def load(cls, model_dir: str | Path) -> "Engine":
        model_dir = Path(model_dir)
        if not model_dir.is_dir():
            raise DataFormatError(f"model directory not found: {model_dir}")
        grammars: dict[tuple[str, str], Grammar] = {}
        gdir = model_dir / "grammars"
        if gdir.is_dir():
            for path in sorted(gdir.glob("*.gdl")):
                lang, _, category = path.stem.partition("_")
                grammars[(lang, category)] = load_grammar(path)
        return cls(
            ontology=load_ontology(model_dir / "ontology.jsonl"),
            clusters=ClusterIndex.load(model_dir / "clusters.jsonl"),
            store=load_embeddings(
                model_dir / "embeddings.in.txt", model_dir / "embeddings.out.txt"
            ),
            pos_model=PosModel.load(model_dir / "pos.model"),
            ner_model=CoarseModel.load(model_dir / "ner.model"),
            grammars=grammars,
            stats=CollocationStats.load(model_dir / "stats.tsv"),
            synonyms=SynonymTable.load(model_dir / "synonyms.tsv"),
            isa=IsaMap.load(model_dir / "isa.tsv"),
        )

    def lexicon_for(self, lang: Language) -> frozenset[str]:
        return self._lexicons.get(lang, frozenset())

    # ------------------------------------------------------------------

    def _grammar_entities(
        self, words: list[Token], lang: Language, ref: ReferenceTime
    ) -> list[EntityMention]:
        mentions = []
        for category in GRAMMAR_CATEGORIES:
            grammar = self.grammars.get((lang.value, category))
            if grammar is None:
                continue
            seen_offsets: set[int] = set()
            for tree in earley_parse(words, grammar):
                if tree.span.offset in seen_offsets:
                    continue  # first tree per start offset wins
                try:
                    value = normalize(tree, ref)
                except NormalizationError:
                    continue
                seen_offsets.add(tree.span.offset)
                kind_type = (
                    _CATEGORY_TYPES["quantity"]
                    if value.kind == KIND_QUANTITY
                    else _CATEGORY_TYPES["time"]
                )
                mentions.append(
                    EntityMention(
                        span=tree.span,
                        surface=_slice_surface(words, tree.span.offset, tree.span.length),
                        type_id=kind_type,
                        source=SOURCE_GRAMMAR,
                        meaning=value.to_json(),
                    )
                )
        return mentions

    def analyze(self, text: str, settings: AnalyzeSettings) -> AnalysisResult:
        """Run the full pipeline for one text item."""
        started = time.perf_counter()
        if settings.lang == Language.AUTO:
            raise ValueError("settings.lang must be resolved before analyze()")
        lang = settings.lang
        norm = normalize_text(text)
        words: list[Token] = []
        phrases: list[Token] = []
        entities: list[EntityMention] = []
        if settings.word_seg and norm.strip():
            lexicon = self.lexicon_for(lang)
            words = segment_words(norm, lang, lexicon)
            phrases = segment_phrases(words, self.stats, lexicon)
            if settings.pos_tagging and self.pos_model and self.pos_model.lang == lang.value:
                words = tag_pos(words, self.pos_model)
                phrases = tag_pos(phrases, self.pos_model)
            if settings.ner:
                fine = tag_fine_unsupervised(
                    words, self.clusters, self.store, self.ontology, phrases=phrases
                )
                coarse = []
                if self.ner_model and self.ner_model.lang == lang.value:
                    coarse = tag_coarse(words, self.ner_model)
                entities = combine_hybrid(fine, coarse, self.ontology)
                ref = settings.reference_time or ReferenceTime.now()
                grammar_mentions = self._grammar_entities(words, lang, ref)
                entities = _merge_entities(entities, grammar_mentions)
        elapsed = (time.perf_counter() - started) * 1000.0
        return AnalysisResult(
            norm_text=norm,
            word_list=tuple(words),
            phrase_list=tuple(phrases),
            entity_list=tuple(entities),
            header=Header(time_cost_ms=elapsed, core_time_cost_ms=elapsed),
        )

    def match(self, a: str, b: str, lang: Language = Language.EN) -> MatchResult:
        return match_score(a, b, self.store, self.synonyms, lang)


def _slice_surface(words: list[Token], offset: int, length: int) -> str:
    end = offset + length
    covered = [t for t in words if t.span.offset >= offset and t.span.end <= end]
    if not covered:
        return ""
    parts = [covered[0].surface]
    for prev, cur in zip(covered, covered[1:]):
        parts.append(" " * (cur.span.offset - prev.span.end))
        parts.append(cur.surface)
    return "".join(parts)


_SOURCE_PRIORITY = {SOURCE_GRAMMAR: 0, "hybrid": 1, "fine": 2, "coarse": 3}


def _merge_entities(
    ner_mentions: list[EntityMention], grammar_mentions: list[EntityMention]
) -> list[EntityMention]:
    """Combine NER and grammar detections into one non-overlapping list.

    Longer spans win; on identical spans grammar entities win because they
    carry a structured meaning.
    """
    pool = list(ner_mentions) + list(grammar_mentions)
    pool.sort(
        key=lambda m: (
            -m.span.length,
            m.span.offset,
            _SOURCE_PRIORITY.get(m.source, 9),
            m.type_id,
        )
    )
    kept: list[EntityMention] = []
    for m in pool:
        if not any(m.span.overlaps(k.span) for k in kept):
            kept.append(m)
    kept.sort(key=lambda m: m.span.offset)
    return kept

"""texkit: a text understanding toolkit.

Segmentation at word and phrase granularity, log-linear POS tagging,
fine-grained NER backed by term clusters and a formal type ontology,
grammar-based normalization of time and quantity expressions, unsupervised
sentence matching, and an HTTP JSON API over all of it.
"""

from .analyzer import AnalyzeSettings, Engine, bundled_model_dir
from .core import AnalysisResult, Language, Span, Token, detect_language, normalize_text
from .embeddings import EmbeddingStore, cosine, load_embeddings
from .errors import TexkitError
from .expansion import ExpansionResult, MentionContext, cluster_score, expand, retrieve_clusters
from .knowledge import ClusterIndex, IsaMap, TermCluster, build_clusters, extract_isa_pairs, term_similarity
from .grammar import ReferenceTime, SemanticValue, compile_grammar, earley_parse, normalize
from .matching import MatchResult, SynonymTable, match_score
from .ner import (
    CoarseModel,
    EntityMention,
    combine_hybrid,
    f1_variant,
    tag_coarse,
    tag_fine_unsupervised,
    train_coarse,
)
from .ontology import Ontology, OntologyType, is_compatible, load_ontology, score_candidate_types
from .postag import PosModel, TrainConfig, tag_pos, train_log_linear
from .segmentation import CollocationStats, build_collocation_stats, segment_phrases, segment_words

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult", "AnalyzeSettings", "ClusterIndex", "CoarseModel",
    "CollocationStats", "EmbeddingStore", "Engine", "EntityMention",
    "ExpansionResult", "IsaMap", "Language", "MatchResult", "MentionContext",
    "Ontology", "OntologyType", "PosModel", "ReferenceTime", "SemanticValue",
    "Span", "SynonymTable", "TermCluster", "TexkitError", "Token",
    "TrainConfig", "build_clusters", "build_collocation_stats",
    "bundled_model_dir", "cluster_score", "combine_hybrid", "compile_grammar",
    "cosine", "detect_language", "earley_parse", "expand", "extract_isa_pairs",
    "f1_variant", "is_compatible", "load_embeddings", "load_ontology",
    "match_score", "normalize", "normalize_text", "retrieve_clusters",
    "score_candidate_types", "segment_phrases", "segment_words", "tag_coarse",
    "tag_fine_unsupervised", "tag_pos", "term_similarity", "train_coarse",
    "train_log_linear",
]

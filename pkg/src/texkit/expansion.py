"""Online semantic expansion: retrieve clusters for a mention, score each
against the mention's context window, return the best cluster's members.

The cluster score is the mean cosine between input vectors of the context
words (mention excluded) and output vectors of the cluster members (mention
excluded). Degenerate windows or singleton clusters score 0 but stay
eligible, so a mention with no usable context still expands through its only
cluster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Token
from .embeddings import EmbeddingStore, cosine
from .knowledge import ClusterIndex, TermCluster

DEFAULT_TOP_K = 9
DEFAULT_WINDOW_RADIUS = 5


@dataclass(frozen=True)
class MentionContext:
    """A mention plus its context window; the window includes the mention."""

    mention: str
    context_terms: tuple[str, ...]
    window_radius: int = DEFAULT_WINDOW_RADIUS

    def __post_init__(self):
        if not self.context_terms:
            raise ValueError("context_terms must include at least the mention")
        low = self.mention.lower()
        if not any(t.lower() == low for t in self.context_terms):
            raise ValueError("mention must appear in its own context window")


@dataclass(frozen=True)
class ExpansionResult:
    best_cluster_id: int
    related_terms: tuple[str, ...]
    score: float


def context_from_tokens(
    tokens: list[Token],
    start_index: int,
    end_index: int,
    mention: str,
    radius: int = DEFAULT_WINDOW_RADIUS,
) -> MentionContext:
    """Build a context window from word tokens around tokens[start:end].

    Punctuation-only tokens are skipped; surfaces are lowercased.
    """
    terms = [mention.lower()]
    before = [
        t.surface.lower()
        for t in tokens[max(0, start_index - radius) : start_index]
        if any(ch.isalnum() for ch in t.surface)
    ]
    after = [
        t.surface.lower()
        for t in tokens[end_index : end_index + radius]
        if any(ch.isalnum() for ch in t.surface)
    ]
    terms.extend(before[-radius:])
    terms.extend(after[:radius])
    return MentionContext(mention=mention.lower(), context_terms=tuple(terms), window_radius=radius)


def retrieve_clusters(mention: str, index: ClusterIndex) -> list[TermCluster]:
    """All clusters whose member set contains the case-folded mention."""
    return index.retrieve(mention)


def _drop_one(terms: list[str], target: str) -> list[str]:
    target = target.lower()
    out = list(terms)
    for i, t in enumerate(out):
        if t.lower() == target:
            del out[i]
            break
    return out


def cluster_score(ctx: MentionContext, cluster: TermCluster, store: EmbeddingStore) -> float:
    """Mean cross cosine over (context minus mention) x (members minus mention)."""
    context_rest = _drop_one(list(ctx.context_terms), ctx.mention)
    member_rest = _drop_one(list(cluster.members), ctx.mention)
    if not context_rest or not member_rest:
        return 0.0
    a = np.zeros((len(context_rest), store.dim))
    for i, term in enumerate(context_rest):
        vec = store.vector(term, "input")
        if vec is not None:
            a[i] = vec
    b = np.zeros((len(member_rest), store.dim))
    for j, term in enumerate(member_rest):
        vec = store.vector(term, "output")
        if vec is not None:
            b[j] = vec
    a_norm = np.linalg.norm(a, axis=1)
    b_norm = np.linalg.norm(b, axis=1)
    a_unit = np.divide(a, a_norm[:, None], out=np.zeros_like(a), where=a_norm[:, None] > 0)
    b_unit = np.divide(b, b_norm[:, None], out=np.zeros_like(b), where=b_norm[:, None] > 0)
    total = float(np.sum(a_unit @ b_unit.T))
    return total / (len(context_rest) * len(member_rest))


def expand(
    ctx: MentionContext,
    index: ClusterIndex,
    store: EmbeddingStore,
    top_k: int = DEFAULT_TOP_K,
) -> ExpansionResult | None:
    """Pick the best cluster for the mention and rank its other members."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    candidates = retrieve_clusters(ctx.mention, index)
    if not candidates:
        return None
    scored = [(cluster_score(ctx, c, store), c) for c in candidates]
    # ties: larger cluster first, then smaller id
    scored.sort(key=lambda sc: (-sc[0], -len(sc[1].members), sc[1].cluster_id))
    best_score, best = scored[0]
    rest = _drop_one(list(best.members), ctx.mention)
    mention_vec = store.vector(ctx.mention, "input")
    if mention_vec is not None:
        def rank_key(term: str) -> float:
            vec = store.vector(term, "output")
            if vec is None:
                return -2.0
            return cosine(vec, mention_vec)

        rest.sort(key=rank_key, reverse=True)
    return ExpansionResult(
        best_cluster_id=best.cluster_id,
        related_terms=tuple(rest[:top_k]),
        score=best_score,
    )

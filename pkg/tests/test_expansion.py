import math
import random

import numpy as np
import pytest

from texkit.embeddings import EmbeddingStore
from texkit.expansion import (
    MentionContext,
    cluster_score,
    context_from_tokens,
    expand,
    retrieve_clusters,
)
from texkit.knowledge import TermCluster

from conftest import make_tokens


def brute_force_score(ctx: MentionContext, cluster: TermCluster, store: EmbeddingStore) -> float:
    """Independent double loop with its own cosine; mirrors the definition,
    not the implementation."""
    def cos(u, v):
        dot = sum(x * y for x, y in zip(u, v))
        nu = math.sqrt(sum(x * x for x in u))
        nv = math.sqrt(sum(x * x for x in v))
        if nu == 0.0 or nv == 0.0:
            return 0.0
        return dot / (nu * nv)

    context = list(ctx.context_terms)
    for i, term in enumerate(context):
        if term.lower() == ctx.mention.lower():
            del context[i]
            break
    members = list(cluster.members)
    for i, term in enumerate(members):
        if term.lower() == ctx.mention.lower():
            del members[i]
            break
    m = len(ctx.context_terms)
    n = len(cluster.members)
    if m < 2 or n < 2:
        return 0.0
    total = 0.0
    for x in context:
        vx = store.vector(x, "input")
        for y in members:
            wy = store.vector(y, "output")
            if vx is None or wy is None:
                continue
            total += cos(list(vx), list(wy))
    return total / ((m - 1) * (n - 1))


def random_store(rng: random.Random, terms: list[str], dim: int = 8) -> EmbeddingStore:
    def table():
        return {t: np.array([rng.gauss(0, 1) for _ in range(dim)]) for t in terms}
    return EmbeddingStore(dim, table(), table())


class TestRetrieve:
    def test_ambiguous_term_retrieves_both(self, clusters):
        hits = retrieve_clusters("apple", clusters)
        assert len(hits) == 2

    def test_unknown_term(self, clusters):
        assert retrieve_clusters("qqqq", clusters) == []

    def test_single_membership(self, clusters):
        hits = retrieve_clusters("Captain Marvel", clusters)
        assert len(hits) == 1
        assert hits[0].hypernyms == ["movie"]


class TestClusterScore:
    def test_single_pair_average(self):
        input_vectors = {"e": np.array([1.0, 0.0]), "c": np.array([1.0, 0.0])}
        output_vectors = {"y": np.array([0.8, 0.6])}
        store = EmbeddingStore(2, input_vectors, output_vectors)
        ctx = MentionContext("e", ("e", "c"))
        cluster = TermCluster(1, ["t"], ["e", "y"])
        got = cluster_score(ctx, cluster, store)
        assert got == pytest.approx(0.8)  # cos((1,0),(0.8,0.6)) = 0.8

    def test_matches_brute_force_on_fixture(self):
        rng = random.Random(5)
        terms = [f"w{i}" for i in range(12)]
        store = random_store(rng, terms)
        ctx = MentionContext("w0", ("w0", "w1", "w2"))
        cluster = TermCluster(1, ["t"], ["w0", "w3", "w4", "w5"])
        got = cluster_score(ctx, cluster, store)
        want = brute_force_score(ctx, cluster, store)
        assert got == pytest.approx(want, abs=1e-9)

    def test_missing_vectors_contribute_zero(self):
        store = EmbeddingStore(2, {}, {})
        ctx = MentionContext("e", ("e", "c"))
        cluster = TermCluster(1, ["t"], ["e", "y"])
        assert cluster_score(ctx, cluster, store) == 0.0

    def test_degenerate_sizes_score_zero(self):
        store = EmbeddingStore(2, {"e": np.array([1.0, 0.0])}, {"e": np.array([1.0, 0.0])})
        ctx = MentionContext("e", ("e",))
        cluster = TermCluster(1, ["t"], ["e", "y"])
        assert cluster_score(ctx, cluster, store) == 0.0

    def test_permutation_invariance(self):
        rng = random.Random(9)
        terms = [f"w{i}" for i in range(10)]
        store = random_store(rng, terms)
        base_ctx = ("w0", "w1", "w2", "w3")
        members = ["w0", "w4", "w5", "w6"]
        a = cluster_score(MentionContext("w0", base_ctx), TermCluster(1, ["t"], members), store)
        shuffled_ctx = ("w2", "w0", "w3", "w1")
        shuffled_members = ["w5", "w6", "w0", "w4"]
        b = cluster_score(
            MentionContext("w0", shuffled_ctx), TermCluster(1, ["t"], shuffled_members), store
        )
        assert a == pytest.approx(b, abs=1e-12)

    def test_mention_must_be_in_context(self):
        with pytest.raises(ValueError):
            MentionContext("e", ("c1", "c2"))


class TestExpand:
    def test_movie_mention_expands_to_related_movies(self, clusters, store):
        ctx = MentionContext(
            "captain marvel",
            ("captain marvel", "was", "premiered", "in", "los", "angeles"),
        )
        result = expand(ctx, clusters, store)
        assert result is not None
        related = set(result.related_terms)
        assert "Spider-Man" in related and "Captain America" in related
        assert not any(t.lower() == "captain marvel" for t in related)

    def test_unknown_mention_returns_none(self, clusters, store):
        ctx = MentionContext("zzzz", ("zzzz", "words"))
        assert expand(ctx, clusters, store) is None

    def test_fruit_context_beats_company_context(self, clusters, store):
        ctx = MentionContext("apple", ("apple", "juice", "drank"))
        result = expand(ctx, clusters, store)
        assert result is not None
        fruit = clusters.clusters[result.best_cluster_id]
        assert fruit.hypernyms == ["fruit"]
        # oracle equivalence: the chosen cluster is the brute-force argmax
        candidates = retrieve_clusters("apple", clusters)
        scores = {c.cluster_id: brute_force_score(ctx, c, store) for c in candidates}
        assert result.best_cluster_id == max(scores, key=lambda k: scores[k])
        assert result.score == pytest.approx(scores[result.best_cluster_id], abs=1e-9)

    def test_company_context_beats_fruit_context(self, clusters, store):
        ctx = MentionContext("apple", ("apple", "hired", "software", "office"))
        result = expand(ctx, clusters, store)
        company = clusters.clusters[result.best_cluster_id]
        assert company.hypernyms == ["company"]

    def test_related_bounded_by_top_k(self, clusters, store):
        ctx = MentionContext("paris", ("paris", "city"))
        result = expand(ctx, clusters, store, top_k=2)
        assert len(result.related_terms) == 2

    def test_scaling_vectors_keeps_argmax(self, clusters, store):
        ctx = MentionContext("apple", ("apple", "juice", "drank"))
        baseline = expand(ctx, clusters, store)
        scaled = EmbeddingStore(
            store.dim,
            {t: 7.5 * v for t, v in store.input_vectors.items()},
            {t: 0.25 * v for t, v in store.output_vectors.items()},
        )
        rescored = expand(ctx, clusters, scaled)
        assert rescored.best_cluster_id == baseline.best_cluster_id
        assert rescored.score == pytest.approx(baseline.score, abs=1e-9)

    def test_empty_context_still_expands_single_cluster(self, clusters, store):
        ctx = MentionContext("captain marvel", ("captain marvel",))
        result = expand(ctx, clusters, store)
        assert result is not None
        assert result.score == 0.0  # degenerate window scores 0 but stays eligible


class TestContextWindow:
    def test_window_excludes_punctuation_and_respects_radius(self):
        tokens = make_tokens(*"a b c d e f MENTION g h i j k l".split())
        ctx = context_from_tokens(tokens, 6, 7, "MENTION", radius=5)
        assert ctx.context_terms[0] == "mention"
        assert set(ctx.context_terms[1:]) == {"b", "c", "d", "e", "f", "g", "h", "i", "j", "k"}

    def test_punctuation_skipped(self):
        tokens = make_tokens("x", ",", "MENTION", ".", "y")
        ctx = context_from_tokens(tokens, 2, 3, "MENTION", radius=5)
        assert set(ctx.context_terms) == {"mention", "x", "y"}

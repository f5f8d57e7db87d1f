import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from texkit.core import Language, normalize_text
from texkit.segmentation import (
    CollocationStats,
    build_collocation_stats,
    segment_phrases,
    segment_words,
)


def surfaces(tokens):
    return [t.surface for t in tokens]


class TestWords:
    def test_english_sample_sentence(self):
        toks = segment_words("He stayed in San Francisco.", Language.EN)
        assert surfaces(toks) == ["He", "stayed", "in", "San", "Francisco", "."]

    def test_empty(self):
        assert segment_words("", Language.EN) == []

    def test_punctuation_split_out(self):
        toks = segment_words("wait, really?!", Language.EN)
        assert surfaces(toks) == ["wait", ",", "really", "?", "!"]

    def test_hyphen_joins_letters_only(self):
        assert surfaces(segment_words("twenty-two", Language.EN)) == ["twenty-two"]
        assert surfaces(segment_words("2020-12-23", Language.EN)) == [
            "2020", "-", "12", "-", "23"
        ]

    def test_apostrophe_contraction(self):
        assert surfaces(segment_words("don't stop", Language.EN)) == ["don't", "stop"]

    def test_chinese_forward_maximum_matching(self):
        lex = frozenset(["上个月"])
        toks = segment_words("上个月30号", Language.CHS, lex)
        assert surfaces(toks) == ["上个月", "30", "号"]

    def test_chinese_unknown_runs_split_per_char(self):
        toks = segment_words("他昨天走了", Language.CHS, frozenset(["昨天"]))
        assert surfaces(toks) == ["他", "昨天", "走", "了"]

    def test_auto_language_rejected(self):
        with pytest.raises(ValueError):
            segment_words("x", Language.AUTO)

    @given(st.text(max_size=120))
    @settings(max_examples=200, deadline=None)
    def test_words_cover_all_nonspace_characters(self, raw):
        text = normalize_text(raw)
        toks = segment_words(text, Language.EN)
        # reconstruction: surfaces plus inter-token gaps rebuild the text
        rebuilt = []
        pos = 0
        for t in toks:
            assert text[t.span.offset : t.span.end] == t.surface
            rebuilt.append(" " * (t.span.offset - pos))
            rebuilt.append(t.surface)
            pos = t.span.end
        rebuilt.append(" " * (len(text) - pos))
        assert "".join(rebuilt) == text
        covered = "".join(t.surface for t in toks).replace(" ", "")
        assert covered == text.replace(" ", "")


class TestStats:
    def test_counting_by_hand(self):
        stats = build_collocation_stats(["a b a b"], Language.EN)
        assert stats.unigram_counts == {"a": 2, "b": 2}
        assert stats.bigram_counts == {("a", "b"): 2, ("b", "a"): 1}
        assert stats.total_unigrams == 4

    def test_empty_corpus(self):
        stats = build_collocation_stats([], Language.EN)
        assert stats.unigram_counts == {} and stats.total_unigrams == 0

    def test_single_token_no_bigrams(self):
        stats = build_collocation_stats(["word"], Language.EN)
        assert stats.unigram_counts == {"word": 1}
        assert stats.bigram_counts == {}

    def test_roundtrip_tsv(self, tmp_path):
        stats = build_collocation_stats(["a b a b", "c a"], Language.EN)
        path = tmp_path / "stats.tsv"
        stats.save(path)
        loaded = CollocationStats.load(path)
        assert loaded.unigram_counts == stats.unigram_counts
        assert loaded.bigram_counts == stats.bigram_counts
        assert loaded.total_unigrams == stats.total_unigrams


def exact_pmi_stats() -> CollocationStats:
    """Counts engineered so PMI(a, b) = log2(3 * 64 / (3 * 8)) = 3 exactly."""
    stats = CollocationStats()
    stats.unigram_counts = {"a": 3, "b": 8, "x": 53}
    stats.bigram_counts = {("a", "b"): 3}
    stats.total_unigrams = 64
    return stats


class TestPhrases:
    def test_lexicon_merge(self):
        words = segment_words("San Francisco", Language.EN)
        phrases = segment_phrases(words, None, frozenset(["san francisco"]))
        assert surfaces(phrases) == ["San Francisco"]

    def test_no_knowledge_means_no_merges(self):
        words = segment_words("one two three", Language.EN)
        phrases = segment_phrases(words, CollocationStats(), frozenset())
        assert surfaces(phrases) == ["one", "two", "three"]

    def test_pmi_exactly_at_threshold_merges(self):
        stats = exact_pmi_stats()
        assert stats.pmi("a", "b") == pytest.approx(3.0)
        words = segment_words("a b", Language.EN)
        merged = segment_phrases(words, stats, frozenset(), pmi_threshold=3.0)
        assert surfaces(merged) == ["a b"]
        below = segment_phrases(words, stats, frozenset(), pmi_threshold=3.0 + 1e-9)
        assert surfaces(below) == ["a", "b"]

    def test_pmi_requires_count_floor(self):
        stats = exact_pmi_stats()
        stats.bigram_counts[("a", "b")] = 2  # below the default floor of 3
        stats.unigram_counts = {"a": 2, "b": 8, "x": 54}
        words = segment_words("a b", Language.EN)
        merged = segment_phrases(words, stats, frozenset())
        assert surfaces(merged) == ["a", "b"]

    def test_three_word_lexicon_phrase(self):
        words = segment_words("new york city tour", Language.EN)
        phrases = segment_phrases(words, None, frozenset(["new york city"]))
        assert surfaces(phrases) == ["new york city", "tour"]

    def test_phrases_are_contiguous_runs_of_words(self, engine):
        text = "Captain Marvel was premiered in Los Angeles 22 months ago."
        words = segment_words(text, Language.EN, engine.lexicon_for(Language.EN))
        phrases = segment_phrases(words, engine.stats, engine.lexicon_for(Language.EN))
        word_spans = [(t.span.offset, t.span.end) for t in words]
        for ph in phrases:
            inside = [s for s in word_spans if s[0] >= ph.span.offset and s[1] <= ph.span.end]
            assert inside, "phrase must cover whole words"
            assert inside[0][0] == ph.span.offset and inside[-1][1] == ph.span.end
        # full coverage, in order
        assert [p.span.offset for p in phrases] == sorted(p.span.offset for p in phrases)

    def test_monotone_in_lexicon(self):
        words = segment_words("alpha beta gamma delta", Language.EN)
        small = frozenset(["beta gamma"])
        large = small | {"alpha beta gamma", "gamma delta"}
        merged_small = segment_phrases(words, None, small)
        merged_large = segment_phrases(words, None, large)
        # every boundary removed under the small lexicon stays removed
        def boundaries(phrases):
            return {p.span.offset for p in phrases}
        assert boundaries(merged_large) <= boundaries(merged_small)

    @given(
        st.lists(st.sampled_from(["aa", "bb", "cc", "dd"]), min_size=1, max_size=6),
        st.sets(
            st.sampled_from(["aa bb", "bb cc", "cc dd", "aa bb cc", "bb cc dd"]),
            max_size=5,
        ),
        st.sampled_from(["aa bb", "bb cc", "cc dd"]),
    )
    @settings(max_examples=150, deadline=None)
    def test_monotone_property(self, words_list, lexicon, extra):
        text = " ".join(words_list)
        words = segment_words(text, Language.EN)
        before = segment_phrases(words, None, frozenset(lexicon))
        after = segment_phrases(words, None, frozenset(lexicon | {extra}))
        removed_before = {p.span.offset for p in before}
        removed_after = {p.span.offset for p in after}
        assert removed_after <= removed_before

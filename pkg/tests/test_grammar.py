import datetime
import itertools
from collections import deque

import pytest

from texkit.errors import GrammarError, NormalizationError
from texkit.grammar import (
    ReferenceTime,
    accepts,
    compile_grammar,
    earley_parse,
    normalize,
    parse_full,
    shift_months,
)
from texkit.grammar.earley import recognize

from conftest import make_tokens


# ---------------------------------------------------------------------------
# oracle: language enumeration straight from grammar productions (no chart)
# ---------------------------------------------------------------------------


def enumerate_language(productions: dict[str, list[tuple[str, ...]]], start: str, max_len: int):
    """All terminal strings of length <= max_len derivable from start.

    Sentential-form BFS over the raw productions; completely independent of
    the chart parser.
    """
    def is_nt(sym):
        return sym in productions

    # minimum terminal yield per nonterminal (fixpoint)
    min_yield = {nt: None for nt in productions}
    changed = True
    while changed:
        changed = False
        for nt, bodies in productions.items():
            for body in bodies:
                total = 0
                ok = True
                for sym in body:
                    if is_nt(sym):
                        if min_yield[sym] is None:
                            ok = False
                            break
                        total += min_yield[sym]
                    else:
                        total += 1
                if ok and (min_yield[nt] is None or total < min_yield[nt]):
                    min_yield[nt] = total
                    changed = True

    def lower_bound(form):
        return sum(min_yield[s] if is_nt(s) else 1 for s in form)

    results = set()
    seen = {(start,)}
    queue = deque([(start,)])
    while queue:
        form = queue.popleft()
        idx = next((i for i, s in enumerate(form) if is_nt(s)), None)
        if idx is None:
            results.add(form)
            continue
        for body in productions[form[idx]]:
            new = form[:idx] + body + form[idx + 1:]
            if lower_bound(new) > max_len:
                continue
            if new not in seen:
                seen.add(new)
                queue.append(new)
    return results


def count_derivations(productions, start, tokens):
    """Number of distinct parse trees, by span DP over raw productions."""
    n = len(tokens)
    memo: dict[tuple[str, int, int], int] = {}
    in_progress: set[tuple[str, int, int]] = set()

    def seqs(body, i, j):
        if not body:
            return 1 if i == j else 0
        head, rest = body[0], body[1:]
        total = 0
        if head in productions:
            for k in range(i, j + 1):
                c = count(head, i, k)
                if c:
                    total += c * seqs(rest, k, j)
        else:
            if i < j and tokens[i] == head:
                total += seqs(rest, i + 1, j)
        return total

    def count(sym, i, j):
        key = (sym, i, j)
        if key in memo:
            return memo[key]
        if key in in_progress:
            return 0
        in_progress.add(key)
        total = sum(seqs(body, i, j) for body in productions[sym])
        in_progress.discard(key)
        memo[key] = total
        return total

    return count(start, 0, n)


AMBIG_DSL = 'S -> S S @pair\nS -> "a" @leaf'
AMBIG_PROD = {"S": [("S", "S"), ("a",)]}

PARENS_DSL = 'S -> "(" S ")" @nest\nS -> "(" ")" @flat'
PARENS_PROD = {"S": [("(", "S", ")"), ("(", ")")]}

ANBN_DSL = 'S -> "a" S "b" @wrap\nS -> @empty'
ANBN_PROD = {"S": [("a", "S", "b"), ()]}


class TestCompile:
    def test_valid_grammar(self):
        g = compile_grammar('TIME -> NUMBER UNIT "ago" @rel\nUNIT -> "months" @u')
        assert g.start_symbols == ["TIME"]
        assert len(g.rules) == 2

    def test_undefined_nonterminal(self):
        with pytest.raises(GrammarError) as err:
            compile_grammar('TIME -> NUMBER UNITX "ago" @rel')
        assert "UNITX" in str(err.value)

    def test_duplicate_label(self):
        with pytest.raises(GrammarError):
            compile_grammar('S -> "a" @x\nS -> "b" @x')

    def test_empty_source(self):
        with pytest.raises(GrammarError):
            compile_grammar("# only a comment\n")

    def test_missing_label(self):
        with pytest.raises(GrammarError):
            compile_grammar('S -> "a"')

    def test_empty_derivation_cycle_rejected(self):
        with pytest.raises(GrammarError):
            compile_grammar("S -> A @s\nA -> S @a")
        with pytest.raises(GrammarError):
            compile_grammar('S -> A S @s\nS -> "x" @x\nA -> @eps')

    def test_nullable_computed(self):
        g = compile_grammar(ANBN_DSL)
        assert "S" in g.nullable

    def test_word_class(self):
        g = compile_grammar('M -> WORD:{january|jan} @m')
        assert accepts(make_tokens("January"), g)
        assert not accepts(make_tokens("july"), g)


class TestRecognitionOracle:
    @pytest.mark.parametrize(
        "dsl,productions,alphabet",
        [
            (AMBIG_DSL, AMBIG_PROD, ["a"]),
            (PARENS_DSL, PARENS_PROD, ["(", ")"]),
            (ANBN_DSL, ANBN_PROD, ["a", "b"]),
        ],
        ids=["ambiguous", "parens", "anbn"],
    )
    def test_acceptance_matches_enumeration_upto_6(self, dsl, productions, alphabet):
        grammar = compile_grammar(dsl)
        language = enumerate_language(productions, "S", 6)
        for n in range(0, 7):
            for string in itertools.product(alphabet, repeat=n):
                got = accepts(make_tokens(*string) if string else [], grammar)
                assert got == (tuple(string) in language), string

    def test_ambiguity_count_matches_derivation_dp(self):
        grammar = compile_grammar(AMBIG_DSL)
        for n in range(1, 7):
            tokens = make_tokens(*["a"] * n)
            trees = parse_full(tokens, grammar)
            assert len(trees) == count_derivations(AMBIG_PROD, "S", ["a"] * n)

    def test_three_leaves_two_bracketings(self):
        grammar = compile_grammar(AMBIG_DSL)
        assert len(parse_full(make_tokens("a", "a", "a"), grammar)) == 2

    def test_single_rule_recognition(self):
        grammar = compile_grammar('S -> "a" @only')
        trees = earley_parse(make_tokens("a"), grammar)
        assert len(trees) == 1 and trees[0].rule_label == "only"

    def test_no_parse_returns_empty(self):
        grammar = compile_grammar('S -> "a" @only')
        assert earley_parse(make_tokens("b"), grammar) == []

    def test_parse_determinism(self):
        grammar = compile_grammar(AMBIG_DSL)
        tokens = make_tokens(*["a"] * 5)
        first = [(t.span.offset, t.span.length, t.rule_label) for t in earley_parse(tokens, grammar)]
        second = [(t.span.offset, t.span.length, t.rule_label) for t in earley_parse(tokens, grammar)]
        assert first == second

    def test_chart_stays_quadratic(self):
        grammar = compile_grammar(AMBIG_DSL)
        for n in (4, 8, 16):
            tokens = make_tokens(*["a"] * n)
            chart = recognize(tokens, grammar, "S", anywhere=True)
            max_rhs = max(len(r.rhs) for r in grammar.rules)
            ceiling = len(grammar.rules) * (max_rhs + 1) * (n + 1) ** 2
            assert chart.item_count <= ceiling

    def test_chart_ceiling_on_bundled_time_grammar(self, engine_grammars):
        grammar = engine_grammars[("en", "time")]
        words = ("the meeting moved to 4 pm the day after tomorrow and then "
                 "again to March 5 , 2019 after 22 months ago came up").split()
        tokens = make_tokens(*words)
        chart = recognize(tokens, grammar, "TIME", anywhere=True)
        max_rhs = max(len(r.rhs) for r in grammar.rules)
        ceiling = len(grammar.rules) * (max_rhs + 1) * (len(tokens) + 1) ** 2
        assert chart.item_count <= ceiling

    def test_longest_match_per_start_offset(self):
        grammar = compile_grammar('T -> "x" @one\nT -> "x" "x" "x" @three')
        trees = earley_parse(make_tokens("x", "x", "x", "y"), grammar)
        lengths = {t.span.offset: t.token_count for t in trees}
        assert lengths[0] == 3  # maximal window at offset 0

    def test_tree_span_is_union_of_children(self):
        grammar = compile_grammar(PARENS_DSL)
        (tree,) = parse_full(make_tokens("(", "(", ")", ")"), grammar)
        def check(node):
            if not hasattr(node, "children"):
                return
            lo = min(c.span.offset for c in node.children)
            hi = max(c.span.offset + c.span.length for c in node.children)
            assert node.span.offset == lo and node.span.offset + node.span.length == hi
            for c in node.children:
                check(c)
        check(tree)


REF = ReferenceTime(2020, 12, 23, 0)


def parse_time(text: str, grammar):
    from texkit.core import Language, normalize_text
    from texkit.segmentation import segment_words

    tokens = segment_words(normalize_text(text), Language.EN)
    trees = [t for t in earley_parse(tokens, grammar) if t.token_count == len(tokens)]
    assert trees, f"no full parse for {text!r}"
    return trees[0]


@pytest.fixture(scope="module")
def en_time(engine_grammars):
    return engine_grammars[("en", "time")]


@pytest.fixture(scope="module")
def en_quantity(engine_grammars):
    return engine_grammars[("en", "quantity")]


@pytest.fixture(scope="module")
def engine_grammars():
    from texkit.analyzer import Engine, bundled_model_dir

    return Engine.load(bundled_model_dir()).grammars


class TestNormalization:
    def test_months_ago_at_month_precision(self, en_time):
        tree = parse_time("22 months ago", en_time)
        assert normalize(tree, REF).payload == {"value": [2019, 2]}

    def test_clock_plus_relative_day(self, en_time):
        tree = parse_time("4 pm the day after tomorrow", en_time)
        # independent calendar oracle
        target = datetime.date(2020, 12, 23) + datetime.timedelta(days=2)
        assert normalize(tree, REF).payload == {
            "value": [target.year, target.month, target.day, 16]
        }

    def test_quantity_with_unit(self, en_quantity):
        tree = parse_time("3 kg", en_quantity)
        value = normalize(tree, REF)
        assert value.kind == "quantity"
        assert value.payload == {"value": 3, "unit": "kilogram"}

    def test_bare_duration_is_a_delta(self, en_time):
        tree = parse_time("3 days", en_time)
        value = normalize(tree, REF)
        assert value.kind == "time_delta"
        assert value.payload == {"delta": {"day": 3}}

    def test_number_words_compose(self, en_time):
        tree = parse_time("twenty-two months ago", en_time)
        assert normalize(tree, REF).payload == {"value": [2019, 2]}
        tree = parse_time("twenty two months ago", en_time)
        assert normalize(tree, REF).payload == {"value": [2019, 2]}

    def test_absolute_dates_ignore_reference(self, en_time):
        tree = parse_time("March 5, 2019", en_time)
        assert normalize(tree, REF).payload == {"value": [2019, 3, 5]}
        tree = parse_time("2019-03-05", en_time)
        assert normalize(tree, REF).payload == {"value": [2019, 3, 5]}

    def test_clock_only_uses_reference_day(self, en_time):
        tree = parse_time("16:30", en_time)
        assert normalize(tree, REF).payload == {"value": [2020, 12, 23, 16]}

    def test_invalid_date_raises(self, en_time):
        tree = parse_time("2019-13-40", en_time)
        with pytest.raises(NormalizationError):
            normalize(tree, REF)

    def test_unregistered_label_raises(self):
        grammar = compile_grammar('S -> "x" @mystery_label')
        (tree,) = earley_parse(make_tokens("x"), grammar)
        with pytest.raises(NormalizationError):
            normalize(tree, REF)

    def test_years_ago(self, en_time):
        tree = parse_time("a year ago", en_time)
        assert normalize(tree, REF).payload == {"value": [2019]}

    def test_in_three_days(self, en_time):
        tree = parse_time("in 3 days", en_time)
        assert normalize(tree, REF).payload == {"value": [2020, 12, 26]}


class TestCalendar:
    def test_month_subtraction_round_trip_all_offsets(self):
        for month in range(1, 13):
            for n in range(1, 49):
                y, m = shift_months(2020, month, -n)
                back = shift_months(y, m, n)
                assert back == (2020, month)

    def test_day_clamp_on_month_shift(self):
        from texkit.grammar.normalize import shift_date_by_months

        assert shift_date_by_months(datetime.date(2021, 1, 31), -1) == datetime.date(2020, 12, 31)
        assert shift_date_by_months(datetime.date(2021, 3, 31), -1) == datetime.date(2021, 2, 28)
        assert shift_date_by_months(datetime.date(2020, 3, 31), -1) == datetime.date(2020, 2, 29)

    def test_reference_time_validation(self):
        with pytest.raises(ValueError):
            ReferenceTime(2020, 13, 1)
        with pytest.raises(ValueError):
            ReferenceTime(2020, 2, 30)

    def test_reference_time_from_iso(self):
        ref = ReferenceTime.from_iso("2020-12-23")
        assert (ref.year, ref.month, ref.day, ref.hour) == (2020, 12, 23, 0)
        ref = ReferenceTime.from_iso("2020-12-23T15:30:00")
        assert ref.hour == 15


@pytest.fixture(scope="module")
def chs(engine_grammars):
    return engine_grammars[("chs", "time")]


class TestChineseGrammar:
    def chs_tokens(self, text):
        from texkit.analyzer import Engine, bundled_model_dir
        from texkit.core import Language
        from texkit.segmentation import segment_words

        engine = Engine.load(bundled_model_dir())
        return segment_words(text, Language.CHS, engine.lexicon_for(Language.CHS))

    def test_relative_days(self, chs):
        tokens = self.chs_tokens("3天前")
        trees = [t for t in earley_parse(tokens, chs) if t.token_count == len(tokens)]
        assert normalize(trees[0], REF).payload == {"value": [2020, 12, 20]}

    def test_last_month_day(self, chs):
        tokens = self.chs_tokens("上个月30号")
        trees = [t for t in earley_parse(tokens, chs) if t.token_count == len(tokens)]
        assert normalize(trees[0], REF).payload == {"value": [2020, 11, 30]}

    def test_chinese_numerals(self, chs):
        tokens = self.chs_tokens("三天后")
        trees = [t for t in earley_parse(tokens, chs) if t.token_count == len(tokens)]
        assert normalize(trees[0], REF).payload == {"value": [2020, 12, 26]}

"""Earley chart parsing over token sequences.

Standard predictor/scanner/completer with the nullable-prediction fix, plus
tree extraction from the completed chart. ``NUMBER`` terminals may span a run
of tokens (``twenty two``); every valid run length is scanned, so grammars
stay order-independent. Parsing is reentrant: each call allocates its own
chart.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..core import Span, Token
from .numbers import number_runs
from .rules import (
    SYM_LITERAL,
    SYM_NONTERMINAL,
    SYM_NUMBER,
    SYM_WORD_CLASS,
    Grammar,
    Rule,
    Symbol,
)


@dataclass(frozen=True)
class Leaf:
    """Matched terminal tokens; ``value`` is set for NUMBER matches."""

    text: str
    span: Span
    tokens: tuple[Token, ...]
    value: int | float | None = None

    @property
    def token_count(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class ParseTree:
    rule_label: str
    symbol: str
    children: tuple
    span: Span

    @property
    def token_count(self) -> int:
        return sum(c.token_count for c in self.children)

    def leaves(self) -> list[Leaf]:
        out = []
        for c in self.children:
            if isinstance(c, Leaf):
                out.append(c)
            else:
                out.extend(c.leaves())
        return out


class EarleyChart:
    """Recognition state: completed spans per rule and per nonterminal."""

    def __init__(self, tokens: list[Token], grammar: Grammar):
        self.tokens = tokens
        self.grammar = grammar
        self.surfaces = [t.surface.lower() for t in tokens]
        self.num_runs: dict[int, list[tuple[int, int | float]]] = {}
        for i in range(len(tokens)):
            runs = number_runs(self.surfaces, i)
            if runs:
                self.num_runs[i] = [(i + length, value) for length, value in runs]
        self.done: set[tuple[int, int, int]] = set()  # (rule_index, origin, end)
        self.ends_by_sym: dict[tuple[str, int], set[int]] = {}
        self.item_count = 0

    def ends(self, symbol: str, origin: int) -> list[int]:
        return sorted(self.ends_by_sym.get((symbol, origin), ()))


def recognize(
    tokens: list[Token], grammar: Grammar, start: str, *, anywhere: bool = False
) -> EarleyChart:
    """Run the recognizer; with ``anywhere`` the start symbol is predicted at
    every position so sub-window matches complete too."""
    chart = EarleyChart(tokens, grammar)
    n = len(tokens)
    # state sets: item = (rule_index, dot, origin)
    sets: list[dict[tuple[int, int, int], None]] = [dict() for _ in range(n + 1)]
    rules = grammar.rules

    def add(k: int, item: tuple[int, int, int]) -> None:
        if item not in sets[k]:
            sets[k][item] = None

    seeds = range(n + 1) if anywhere else (0,)
    for k in seeds:
        for rule in grammar.rules_by_lhs.get(start, ()):
            add(k, (rule.index, 0, k))

    for k in range(n + 1):
        queue = list(sets[k])
        qi = 0
        while qi < len(queue):
            item = queue[qi]
            qi += 1
            rule_idx, dot, origin = item
            rule = rules[rule_idx]
            if dot == len(rule.rhs):
                # completer
                key = (rule.lhs, origin)
                chart.done.add((rule_idx, origin, k))
                ends = chart.ends_by_sym.setdefault(key, set())
                if k in ends:
                    continue
                ends.add(k)
                for waiting in list(sets[origin]):
                    w_rule = rules[waiting[0]]
                    w_dot = waiting[1]
                    if w_dot < len(w_rule.rhs):
                        sym = w_rule.rhs[w_dot]
                        if sym.kind == SYM_NONTERMINAL and sym.value == rule.lhs:
                            advanced = (waiting[0], w_dot + 1, waiting[2])
                            if advanced not in sets[k]:
                                sets[k][advanced] = None
                                queue.append(advanced)
                continue
            sym = rule.rhs[dot]
            if sym.kind == SYM_NONTERMINAL:
                # predictor
                for sub in grammar.rules_by_lhs.get(sym.value, ()):
                    candidate = (sub.index, 0, k)
                    if candidate not in sets[k]:
                        sets[k][candidate] = None
                        queue.append(candidate)
                if sym.value in grammar.nullable:
                    advanced = (rule_idx, dot + 1, origin)
                    if advanced not in sets[k]:
                        sets[k][advanced] = None
                        queue.append(advanced)
            elif sym.kind == SYM_NUMBER:
                for end, _value in chart.num_runs.get(k, ()):
                    add(end, (rule_idx, dot + 1, origin))
            else:
                if k < n and _terminal_matches(sym, chart.surfaces[k]):
                    add(k + 1, (rule_idx, dot + 1, origin))
        chart.item_count += len(sets[k])
    return chart


def _terminal_matches(sym: Symbol, surface: str) -> bool:
    if sym.kind == SYM_LITERAL:
        return surface == sym.value
    if sym.kind == SYM_WORD_CLASS:
        return surface in sym.choices
    return False


# ---------------------------------------------------------------------------
# tree extraction
# ---------------------------------------------------------------------------


class _TreeBuilder:
    def __init__(self, chart: EarleyChart, max_trees: int | None):
        self.chart = chart
        self.grammar = chart.grammar
        self.memo: dict[tuple[str, int, int], list[ParseTree]] = {}
        self.building: set[tuple[str, int, int]] = set()
        self.max_trees = max_trees

    def _char_span(self, i: int, j: int) -> Span:
        tokens = self.chart.tokens
        if i == j:
            offset = tokens[i].span.offset if i < len(tokens) else (
                tokens[-1].span.end if tokens else 0
            )
            return Span(offset, 0)
        first, last = tokens[i], tokens[j - 1]
        return Span(first.span.offset, last.span.end - first.span.offset)

    def trees(self, symbol: str, i: int, j: int) -> list[ParseTree]:
        key = (symbol, i, j)
        if key in self.memo:
            return self.memo[key]
        if key in self.building:
            return []  # unit-derivation cycle: only minimal trees are kept
        self.building.add(key)
        out: list[ParseTree] = []
        for rule in self.grammar.rules_by_lhs.get(symbol, ()):
            if i < j and (rule.index, i, j) not in self.chart.done:
                continue
            if i == j and not all(
                s.kind == SYM_NONTERMINAL and s.value in self.grammar.nullable
                for s in rule.rhs
            ):
                continue
            for children in self._expand(rule, 0, i, j):
                out.append(
                    ParseTree(
                        rule_label=rule.label,
                        symbol=symbol,
                        children=tuple(children),
                        span=self._char_span(i, j),
                    )
                )
                if self.max_trees is not None and len(out) >= self.max_trees:
                    break
            if self.max_trees is not None and len(out) >= self.max_trees:
                break
        self.building.discard(key)
        self.memo[key] = out
        return out

    def _expand(self, rule: Rule, idx: int, pos: int, end: int):
        """All child sequences where rule.rhs[idx:] spans tokens [pos, end)."""
        rhs = rule.rhs
        if idx == len(rhs):
            if pos == end:
                yield []
            return
        sym = rhs[idx]
        if sym.kind == SYM_NONTERMINAL:
            candidate_ends = [
                e for e in self.chart.ends(sym.value, pos) if e <= end
            ]
            if sym.value in self.grammar.nullable and pos not in candidate_ends:
                candidate_ends.insert(0, pos)
            for e in candidate_ends:
                subs = self.trees(sym.value, pos, e)
                if not subs:
                    continue
                for rest in self._expand(rule, idx + 1, e, end):
                    for sub in subs:
                        yield [sub] + rest
        elif sym.kind == SYM_NUMBER:
            for e, value in self.chart.num_runs.get(pos, ()):
                if e > end:
                    continue
                leaf = Leaf(
                    text=_surface_range(self.chart.tokens, pos, e),
                    span=self._char_span(pos, e),
                    tokens=tuple(self.chart.tokens[pos:e]),
                    value=value,
                )
                for rest in self._expand(rule, idx + 1, e, end):
                    yield [leaf] + rest
        else:
            if pos < end and _terminal_matches(sym, self.chart.surfaces[pos]):
                leaf = Leaf(
                    text=self.chart.tokens[pos].surface,
                    span=self.chart.tokens[pos].span,
                    tokens=(self.chart.tokens[pos],),
                )
                for rest in self._expand(rule, idx + 1, pos + 1, end):
                    yield [leaf] + rest


def _surface_range(tokens: list[Token], i: int, j: int) -> str:
    parts = [tokens[i].surface]
    for k in range(i + 1, j):
        gap = tokens[k].span.offset - tokens[k - 1].span.end
        parts.append(" " * gap)
        parts.append(tokens[k].surface)
    return "".join(parts)


def accepts(tokens: list[Token], grammar: Grammar, start: str | None = None) -> bool:
    """True iff the whole token sequence derives from the start symbol."""
    start = start or grammar.start_symbols[0]
    if not tokens:
        return start in grammar.nullable
    chart = recognize(tokens, grammar, start)
    return len(tokens) in chart.ends_by_sym.get((start, 0), ())


def earley_parse(
    tokens: list[Token],
    grammar: Grammar,
    start: str | None = None,
    *,
    max_trees: int | None = None,
) -> list[ParseTree]:
    """All parses of the maximal-length window at each start offset.

    Trees are ordered by window start, then by rule declaration order.
    Ambiguous windows yield one tree per derivation.
    """
    start = start or grammar.start_symbols[0]
    if not tokens:
        return []
    chart = recognize(tokens, grammar, start, anywhere=True)
    builder = _TreeBuilder(chart, max_trees)
    out: list[ParseTree] = []
    for i in range(len(tokens)):
        ends = [e for e in chart.ends(start, i) if e > i]
        if not ends:
            continue
        out.extend(builder.trees(start, i, max(ends)))
    return out


def parse_full(
    tokens: list[Token],
    grammar: Grammar,
    start: str | None = None,
    *,
    max_trees: int | None = None,
) -> list[ParseTree]:
    """Only the parses spanning the entire token sequence."""
    start = start or grammar.start_symbols[0]
    if not tokens:
        return []
    chart = recognize(tokens, grammar, start)
    if len(tokens) not in chart.ends_by_sym.get((start, 0), ()):
        return []
    return _TreeBuilder(chart, max_trees).trees(start, 0, len(tokens))

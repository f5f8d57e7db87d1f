"""Grammar rule DSL and compiler.

One rule per line::

    TIME -> DELTA "ago" @time_ago
    UNIT -> WORD:{kg|kilogram|kilograms} @unit_mass

Bare uppercase identifiers are nonterminals, double-quoted strings are
literal terminals (matched case-insensitively), ``NUMBER`` matches a run of
number tokens (digits, decimals, number words), and ``WORD:{a|b|c}`` matches
one token drawn from a literal set. A rule with no right-hand symbols is an
epsilon rule. ``%start A B`` declares start symbols; the default is the
left-hand side of the first rule. Every rule carries a unique ``@label``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import GrammarError

SYM_LITERAL = "lit"
SYM_NONTERMINAL = "nt"
SYM_NUMBER = "number"
SYM_WORD_CLASS = "word"


@dataclass(frozen=True)
class Symbol:
    kind: str
    value: str = ""
    choices: frozenset[str] = frozenset()

    def __repr__(self):  # pragma: no cover
        if self.kind == SYM_LITERAL:
            return f'"{self.value}"'
        if self.kind == SYM_WORD_CLASS:
            return "WORD:{%s}" % "|".join(sorted(self.choices))
        return self.value or self.kind.upper()


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: tuple[Symbol, ...]
    label: str
    index: int
    line: int = 0


@dataclass
class Grammar:
    rules: list[Rule]
    start_symbols: list[str]
    rules_by_lhs: dict[str, list[Rule]] = field(default_factory=dict)
    nullable: frozenset[str] = frozenset()
    labels: dict[str, Rule] = field(default_factory=dict)

    @property
    def nonterminals(self) -> set[str]:
        return set(self.rules_by_lhs)


_NT_RE = re.compile(r"^[A-Z][A-Z0-9_]*$")
_LABEL_RE = re.compile(r"^[a-z][a-z0-9_]*$")
_TOKEN_RE = re.compile(
    r"\"(?P<lit>[^\"]*)\""
    r"|WORD:\{(?P<choices>[^}]*)\}"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_]*)"
)


def _parse_rhs(text: str, lineno: int) -> tuple[Symbol, ...]:
    symbols: list[Symbol] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise GrammarError(f"cannot read symbol at: {text[pos:pos+20]!r}", line=lineno)
        if m.group("lit") is not None:
            lit = m.group("lit").lower()
            if not lit:
                raise GrammarError("empty literal; omit symbols for an epsilon rule", line=lineno)
            symbols.append(Symbol(SYM_LITERAL, lit))
        elif m.group("choices") is not None:
            choices = frozenset(
                c.strip().lower() for c in m.group("choices").split("|") if c.strip()
            )
            if not choices:
                raise GrammarError("empty WORD class", line=lineno)
            symbols.append(Symbol(SYM_WORD_CLASS, choices=choices))
        else:
            name = m.group("name")
            if name == "NUMBER":
                symbols.append(Symbol(SYM_NUMBER))
            elif _NT_RE.match(name):
                symbols.append(Symbol(SYM_NONTERMINAL, name))
            else:
                raise GrammarError(
                    f"{name!r} is neither an UPPERCASE nonterminal nor a quoted literal",
                    line=lineno,
                )
        pos = m.end()
    return tuple(symbols)


def _compute_nullable(rules: list[Rule]) -> frozenset[str]:
    nullable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for rule in rules:
            if rule.lhs in nullable:
                continue
            if all(s.kind == SYM_NONTERMINAL and s.value in nullable for s in rule.rhs):
                nullable.add(rule.lhs)
                changed = True
    return frozenset(nullable)


def _check_derivation_cycles(rules: list[Rule], nullable: frozenset[str]) -> None:
    """Reject grammars where a nonterminal can derive itself through rules
    whose other symbols are all nullable; those admit unbounded parse trees."""
    edges: dict[str, set[str]] = {}
    for rule in rules:
        for i, sym in enumerate(rule.rhs):
            if sym.kind != SYM_NONTERMINAL:
                continue
            others = rule.rhs[:i] + rule.rhs[i + 1 :]
            if all(o.kind == SYM_NONTERMINAL and o.value in nullable for o in others):
                edges.setdefault(rule.lhs, set()).add(sym.value)
    state: dict[str, int] = {}

    def visit(node: str) -> None:
        state[node] = 1
        for nxt in sorted(edges.get(node, ())):
            if state.get(nxt) == 1:
                raise GrammarError(
                    f"cycle of empty/unit derivations through {nxt!r}"
                )
            if nxt not in state:
                visit(nxt)
        state[node] = 2

    for node in sorted(edges):
        if node not in state:
            visit(node)


def compile_grammar(source: str) -> Grammar:
    """Compile DSL text into a validated grammar."""
    rules: list[Rule] = []
    starts: list[str] = []
    labels: dict[str, Rule] = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("%start"):
            for name in line[len("%start") :].split():
                if not _NT_RE.match(name):
                    raise GrammarError(f"bad start symbol {name!r}", line=lineno)
                starts.append(name)
            continue
        if "->" not in line:
            raise GrammarError("expected 'LHS -> symbols @label'", line=lineno)
        lhs_text, rest = line.split("->", 1)
        lhs = lhs_text.strip()
        if not _NT_RE.match(lhs):
            raise GrammarError(f"bad nonterminal name {lhs!r}", line=lineno)
        if "@" not in rest:
            raise GrammarError("every rule needs an @label", line=lineno)
        rhs_text, label = rest.rsplit("@", 1)
        label = label.strip()
        if not _LABEL_RE.match(label):
            raise GrammarError(f"bad rule label {label!r}", line=lineno)
        rhs = _parse_rhs(rhs_text, lineno)
        rule = Rule(lhs=lhs, rhs=rhs, label=label, index=len(rules), line=lineno)
        if label in labels:
            raise GrammarError(
                f"duplicate rule label {label!r} (first used on line {labels[label].line})",
                line=lineno,
            )
        labels[label] = rule
        rules.append(rule)
    if not rules:
        raise GrammarError("grammar has no rules")
    by_lhs: dict[str, list[Rule]] = {}
    for rule in rules:
        by_lhs.setdefault(rule.lhs, []).append(rule)
    for rule in rules:
        for sym in rule.rhs:
            if sym.kind == SYM_NONTERMINAL and sym.value not in by_lhs:
                raise GrammarError(
                    f"nonterminal {sym.value!r} has no rules", line=rule.line
                )
    if not starts:
        starts = [rules[0].lhs]
    for s in starts:
        if s not in by_lhs:
            raise GrammarError(f"start symbol {s!r} has no rules")
    nullable = _compute_nullable(rules)
    _check_derivation_cycles(rules, nullable)
    return Grammar(
        rules=rules,
        start_symbols=starts,
        rules_by_lhs=by_lhs,
        nullable=nullable,
        labels=labels,
    )


def load_grammar(path: str | Path) -> Grammar:
    return compile_grammar(Path(path).read_text(encoding="utf-8"))

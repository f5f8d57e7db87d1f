"""The formal type hierarchy: loading, compatibility, and candidate scoring.

Types carry a dotted id (``work.movie``), a non-empty name list, a short
sample-instance list, and an optional parent id. The hierarchy is a forest;
compatibility means one type is an ancestor of the other (equality included).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import DataFormatError, UnknownTypeError, ValidationError


@dataclass(frozen=True)
class OntologyType:
    type_id: str
    parent_id: str | None
    names: tuple[str, ...]
    sample_instances: tuple[str, ...] = ()


class Ontology:
    """Immutable id-keyed collection of types plus a name inverted index."""

    def __init__(self, types: Iterable[OntologyType]):
        self.types: dict[str, OntologyType] = {}
        for t in types:
            if t.type_id in self.types:
                raise ValidationError(f"duplicate type id: {t.type_id!r}")
            if not t.names:
                raise ValidationError(f"type {t.type_id!r} has an empty name list")
            self.types[t.type_id] = t
        self.name_index: dict[str, set[str]] = {}
        for t in self.types.values():
            if t.parent_id is not None and t.parent_id not in self.types:
                raise ValidationError(
                    f"type {t.type_id!r} has dangling parent {t.parent_id!r}"
                )
            for name in t.names:
                self.name_index.setdefault(name.lower(), set()).add(t.type_id)
        self._depths: dict[str, int] = {}
        for tid in self.types:
            self._depth_of(tid, _seen=set())

    def _depth_of(self, type_id: str, _seen: set[str]) -> int:
        if type_id in self._depths:
            return self._depths[type_id]
        if type_id in _seen:
            raise ValidationError(f"parent cycle involving type {type_id!r}")
        _seen.add(type_id)
        t = self.types[type_id]
        depth = 0 if t.parent_id is None else 1 + self._depth_of(t.parent_id, _seen)
        self._depths[type_id] = depth
        return depth

    def __contains__(self, type_id: str) -> bool:
        return type_id in self.types

    def __len__(self) -> int:
        return len(self.types)

    def get(self, type_id: str) -> OntologyType:
        try:
            return self.types[type_id]
        except KeyError:
            raise UnknownTypeError(type_id) from None

    def depth(self, type_id: str) -> int:
        self.get(type_id)
        return self._depths[type_id]

    def path(self, type_id: str) -> list[str]:
        """Chain of type ids from the root down to ``type_id`` inclusive."""
        chain = []
        cur: str | None = type_id
        while cur is not None:
            chain.append(cur)
            cur = self.get(cur).parent_id
        chain.reverse()
        return chain

    def types_named(self, name: str) -> set[str]:
        return set(self.name_index.get(name.lower(), ()))


def load_ontology(path: str | Path) -> Ontology:
    """Load a JSONL ontology file: one object per line with
    type_id / parent / names / instances fields."""
    path = Path(path)
    types: list[OntologyType] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"invalid JSON ({exc.msg})", path=path, line=lineno)
            if not isinstance(obj, dict) or "type_id" not in obj:
                raise DataFormatError("missing type_id field", path=path, line=lineno)
            type_id = obj["type_id"]
            if type_id in seen:
                raise DataFormatError(
                    f"duplicate type id {type_id!r}", path=path, line=lineno
                )
            seen.add(type_id)
            names = obj.get("names") or []
            if not names:
                raise DataFormatError(
                    f"type {type_id!r} has no names", path=path, line=lineno
                )
            types.append(
                OntologyType(
                    type_id=type_id,
                    parent_id=obj.get("parent"),
                    names=tuple(names),
                    sample_instances=tuple(obj.get("instances") or ()),
                )
            )
    return Ontology(types)


def is_ancestor(a: str, b: str, ont: Ontology) -> bool:
    """True iff ``a`` is a proper ancestor of ``b`` in the hierarchy."""
    ont.get(a)
    cur = ont.get(b).parent_id
    while cur is not None:
        if cur == a:
            return True
        cur = ont.get(cur).parent_id
    return False


def is_compatible(a: str, b: str, ont: Ontology) -> bool:
    """Two types are compatible when one is the (inclusive) subtype of the other."""
    if a == b:
        ont.get(a)
        return True
    return is_ancestor(a, b, ont) or is_ancestor(b, a, ont)


def score_candidate_types(
    hypernyms: list[str],
    members: list[str],
    ont: Ontology,
    *,
    name_weight: float = 0.5,
    instance_weight: float = 0.5,
) -> list[tuple[str, float]]:
    """Rank ontology types for a labeled cluster.

    Candidates are types whose name list intersects the hypernym list. The
    score combines name coverage and sample-instance overlap with the cluster
    members; ties prefer deeper (more specific) types, then lexicographic id.
    """
    hyper_set = {h.lower() for h in hypernyms if h}
    if not hyper_set:
        return []
    member_set = {m.lower() for m in members}
    candidates: set[str] = set()
    for h in hyper_set:
        candidates |= ont.types_named(h)
    scored: list[tuple[str, float]] = []
    for tid in candidates:
        t = ont.get(tid)
        names = {n.lower() for n in t.names}
        name_part = len(names & hyper_set) / len(hyper_set)
        instances = {i.lower() for i in t.sample_instances}
        inst_part = len(instances & member_set) / max(1, len(instances))
        scored.append((tid, name_weight * name_part + instance_weight * inst_part))
    scored.sort(key=lambda item: (-item[1], -ont.depth(item[0]), item[0]))
    return scored

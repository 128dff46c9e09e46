"""JSON registry of named relations: a list of {name, weight, terms, evidence}."""

from __future__ import annotations

import json
import os
from fractions import Fraction
from typing import Dict, List

from ..bloch import LiSymbol, Relation
from ..exactalg import DomainError
from .grammar import format_point, parse_point

EVIDENCE_TAGS = ("proved", "certified", "numeric")


def relation_to_record(rel: Relation) -> dict:
    return {
        "name": rel.name,
        "weight": rel.weight,
        "terms": [{"coeff": str(c), "point": format_point(h)} for h, c in rel.symbol.items()],
        "evidence": rel.evidence,
    }


def record_to_relation(rec: dict) -> Relation:
    try:
        name, weight, terms, evidence = rec["name"], int(rec["weight"]), rec["terms"], rec["evidence"]
    except (KeyError, TypeError, ValueError) as e:
        raise DomainError(f"malformed registry record: {e}") from None
    if evidence not in EVIDENCE_TAGS:
        raise DomainError(f"unknown evidence tag {evidence!r}")
    sym = LiSymbol(weight)
    for t in terms:
        sym = sym + LiSymbol.gen(weight, parse_point(t["point"]), Fraction(t["coeff"]))
    return Relation(name, sym, evidence)


class Registry:
    def __init__(self, relations: List[Relation] | None = None):
        self._rels: Dict[str, Relation] = {}
        for r in relations or []:
            self.add(r)

    @classmethod
    def load(cls, path: str) -> "Registry":
        if not os.path.exists(path):
            return cls()
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, list):
            raise DomainError("registry file must hold a JSON array")
        return cls([record_to_relation(r) for r in data])

    def save(self, path: str) -> None:
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump([relation_to_record(r) for r in self], fh, indent=2)
            fh.write("\n")
        os.replace(tmp, path)

    def add(self, rel: Relation) -> None:
        if not rel.name:
            raise DomainError("relations need a name")
        if rel.name in self._rels:
            raise DomainError(f"relation {rel.name!r} already registered")
        self._rels[rel.name] = rel

    def get(self, name: str) -> Relation:
        try:
            return self._rels[name]
        except KeyError:
            raise DomainError(f"no relation named {name!r}") from None

    def fresh_name(self, weight: int) -> str:
        k = 1
        while f"R{weight}_{k}" in self._rels:
            k += 1
        return f"R{weight}_{k}"

    def __iter__(self):
        return iter(self._rels.values())

    def __len__(self):
        return len(self._rels)

"""Translation of conceptual graphs into existential conjunctive formulas."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .cgraph import ConceptualGraph, GraphError, Individual, normalize_coref, well_formed


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


Term = Union[Const, Var]


@dataclass(frozen=True)
class Atom:
    predicate: str
    terms: tuple[Term, ...]


@dataclass(frozen=True)
class Formula:
    variables: tuple[str, ...] = ()
    atoms: tuple[Atom, ...] = ()

    def __post_init__(self):
        declared = set(self.variables)
        for atom in self.atoms:
            for t in atom.terms:
                if isinstance(t, Var) and t.name not in declared:
                    raise ValueError(f"variable {t.name} is not quantified")

    def __str__(self):
        return render(self)


def phi_translate(g: ConceptualGraph) -> Formula:
    """One unary atom per concept, one n-ary atom per relation.

    Individual markers become constants and every other node a fresh
    existentially quantified variable.  Coreferent nodes are merged first,
    so they share a variable.
    """
    report = well_formed(g)
    if not report.ok:
        raise GraphError("cannot translate malformed graph: " + report.errors[0].message)
    g = normalize_coref(g)
    terms: dict[int, Term] = {}
    variables = []
    for c in g.concepts:
        if isinstance(c.marker, Individual):
            terms[c.id] = Const(c.marker.name)
        else:
            v = f"x{len(variables) + 1}"
            variables.append(v)
            terms[c.id] = Var(v)
    atoms = [Atom(c.ctype, (terms[c.id],)) for c in g.concepts]
    atoms += [Atom(r.rtype, tuple(terms[a] for a in r.args)) for r in g.relations]
    return Formula(tuple(variables), tuple(atoms))


_PLAIN = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


def _term(t: Term) -> str:
    if isinstance(t, Var) or _PLAIN.match(t.name):
        return t.name
    return "'" + t.name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def render(f: Formula) -> str:
    if not f.atoms:
        return "true"
    body = " & ".join(f"{a.predicate}({', '.join(_term(t) for t in a.terms)})" for a in f.atoms)
    if not f.variables:
        return body
    return f"exists {', '.join(f.variables)}. {body}"

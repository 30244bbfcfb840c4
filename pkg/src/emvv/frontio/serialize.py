"""Canonical text for every artifact kind; the parsers read it back losslessly."""
from __future__ import annotations

import dataclasses
import re
from functools import singledispatch

from ..cgraph import ConceptualGraph, CorefVar, Individual
from ..fol import Formula, render
from ..ingest import EnterpriseModel, Link
from ..ontology import Ontology
from ..propmodel.expr import And, Call, Cmp, Lit, Name, Not, Or, render_expr
from ..propmodel.facts import (
    AnyDomain,
    EnumDomain,
    FactStore,
    HandleFunction,
    ModelingParameter,
    ModelingVariable,
    PropertyRef,
    RangeDomain,
)
from ..propmodel.model import GenericProperty, Granularity, Property
from ..reasoning import GraphRule, NegativeConstraint, PositiveConstraint
from .syntax import TOP_WORDS

_PLAIN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(?:[-.][A-Za-z0-9_]+)*$")
_RESERVED = frozenset({"true", "false", "and", "or", "not"}) | TOP_WORDS
_IND = "  "


def quote(s: str) -> str:
    body = s.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n").replace("\t", "\\t")
    return f"'{body}'"


def word(s: str) -> str:
    """``s`` bare when it lexes as one identifier, quoted otherwise."""
    return s if _PLAIN.match(s) and s not in _RESERVED else quote(s)


def value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return word(str(v))


def _marker(m) -> str:
    if isinstance(m, Individual):
        return word(m.name)
    return str(m)


def _arg(g: ConceptualGraph, cid: int, index: dict[int, int]) -> str:
    if cid not in index:
        raise ValueError(f"edge argument {cid} is not a concept of graph {g.name}")
    node = g.concept(cid)
    if isinstance(node.marker, (CorefVar, Individual)):
        first = next(c for c in g.concepts if c.marker == node.marker)
        if first.id == cid:
            return _marker(node.marker)
    return f"@{index[cid]}"


def _items(g: ConceptualGraph) -> list[str]:
    index = {c.id: i for i, c in enumerate(g.concepts)}
    out = [f"[{c.ctype}: {_marker(c.marker)}]" for c in g.concepts]
    for r in g.relations:
        args = "".join(" " + _arg(g, a, index) for a in r.args)
        out.append(f"({r.rtype}{args})")
    return out


def serialize_body(g: ConceptualGraph) -> str:
    """The graph's concepts and relations on one line, without the ``graph`` wrapper."""
    return " ".join(_items(g))


def _block(g: ConceptualGraph | None, depth: int) -> str:
    items = _items(g) if g is not None else []
    if not items:
        return "{ }"
    pad = _IND * (depth + 1)
    return "{\n" + "".join(f"{pad}{x}\n" for x in items) + _IND * depth + "}"


@singledispatch
def serialize(artifact) -> str:
    raise TypeError(f"cannot serialize {type(artifact).__name__}")


@serialize.register
def _(g: ConceptualGraph) -> str:
    return f"graph {word(g.name)} {_block(g, 0)}"


@serialize.register
def _(r: GraphRule) -> str:
    return (f"rule {word(r.name)} {{\n{_IND}if {_block(r.hypothesis, 1)}\n"
            f"{_IND}then {_block(r.conclusion, 1)}\n}}")


@serialize.register
def _(c: PositiveConstraint) -> str:
    lines = [f"positive {word(c.name)} {{", f"{_IND}when {_block(c.condition, 1)}"]
    for i, alt in enumerate(c.alternatives):
        lines.append(f"{_IND}{'require' if i == 0 else 'or'} {_block(alt.graph, 1)}")
    return "\n".join(lines + ["}"])


@serialize.register
def _(c: NegativeConstraint) -> str:
    return (f"negative {word(c.name)} {{\n{_IND}when {_block(c.condition, 1)}\n"
            f"{_IND}forbid {_block(c.mandatory, 1)}\n}}")


@serialize.register
def _(o: Ontology) -> str:
    lat, rel = o
    parents: dict[str, list[str]] = {}
    for child, parent in lat.subtype_edges:
        parents.setdefault(child, []).append(parent)
    lines = [f"concept {lat.top}"]
    for t in sorted(lat.types - {lat.top}):
        ps = sorted(parents.get(t, ()))
        lines.append(f"concept {t}" + (f" < {', '.join(ps)}" if ps else ""))
    rparents: dict[str, list[str]] = {}
    for child, parent in rel.subtype_edges:
        rparents.setdefault(child, []).append(parent)
    for r in sorted(rel.relations):
        ps = sorted(rparents.get(r, ()))
        lines.append(f"relation {r}({', '.join(rel.signature[r])})" + (f" < {', '.join(ps)}" if ps else ""))
    return "\n".join(lines)


@serialize.register(Lit)
@serialize.register(Name)
@serialize.register(Call)
@serialize.register(Cmp)
@serialize.register(And)
@serialize.register(Or)
@serialize.register(Not)
def _(e) -> str:
    return render_expr(e)


@serialize.register
def _(f: Formula) -> str:
    return render(f)


def _expr_block(e) -> str:
    return "{ }" if e is None else "{ " + render_expr(e) + " }"


@serialize.register
def _(p: Property) -> str:
    rel = p.relation
    head = [f"property {word(p.name)}"]
    if p.degree.degree:
        head.append(f"degree {word(p.degree.degree)}")
    if p.degree.type_tag:
        head.append(f"tag {word(p.degree.type_tag)}")
    kind = str(rel.kind) + (f"({rel.sense.value})" if rel.sense is not None else "")
    head.append(f"kind {kind}")
    if p.placement is not None:
        head.append(f"at {p.placement}")
    if rel.annotation is not None:
        head.append(f"note {quote(rel.annotation)}")
    lines = [" ".join(head) + " {",
             f"{_IND}causes [{', '.join(sorted(p.causes))}] {_expr_block(rel.theta_c)}",
             f"{_IND}effects [{', '.join(sorted(p.effects))}] {_expr_block(rel.theta_e)}"]
    for fact in sorted(p.bindings):
        lines.append(f"{_IND}bind {fact} to graph {_block(p.bindings[fact], 1)}")
    return "\n".join(lines + ["}"])


@serialize.register
def _(gp: GenericProperty) -> str:
    head = f"generic {word(gp.name)}"
    if gp.perspectives:
        head += f" perspective {', '.join(sorted(gp.perspectives))}"
    head += f" typology {gp.typology.value} {{"
    lines = [head] + [f"{_IND}param ${ph}: {t};" for ph, t in gp.params]
    if gp.body:
        lines.append(gp.body)
    return "\n".join(lines + ["}"])


@serialize.register
def _(g: Granularity) -> str:
    lines = [f"granularity {word(g.name)} {{"]
    for d in g.degrees:
        temporal = f" temporal {quote(d.temporal)}" if d.temporal is not None else ""
        lines.append(f"{_IND}degree {word(d.name)}{temporal};")
    return "\n".join(lines + ["}"])


def _sort_key(v):
    return (type(v).__name__, str(v))


def _domain(d) -> str:
    if isinstance(d, AnyDomain):
        return ""
    if isinstance(d, EnumDomain):
        return " in {" + ", ".join(value(v) for v in sorted(d.values, key=_sort_key)) + "}"
    if isinstance(d, RangeDomain):
        return f" in [{value(d.low)} .. {value(d.high)}]"
    raise TypeError(f"unknown domain {d!r}")


def _series(keyword: str, mv: ModelingVariable) -> str:
    points = ", ".join(f"({value(t)}, {value(v)})" for t, v in mv.series)
    return f"{keyword} {mv.name}: {mv.type_tag}{_domain(mv.domain)} = [{points}]"


@singledispatch
def _fact(f) -> str:
    raise TypeError(f"not a fact: {f!r}")


@_fact.register
def _(f: ModelingVariable) -> str:
    return _series("var", f)


@_fact.register
def _(f: ModelingParameter) -> str:
    return f"param {f.name}: {f.type_tag} = {value(f.value)}"


@_fact.register
def _(f: HandleFunction) -> str:
    return f"handle {f.name}({', '.join(f.params)}): {f.result_type}"


@_fact.register
def _(f: PropertyRef) -> str:
    return f"trust {f.name}"


@serialize.register
def _(store: FactStore) -> str:
    return "\n".join(_fact(store.facts[n]) for n in sorted(store.facts))


_PORTS = (("has_input", "input"), ("has_output", "output"),
          ("uses_resource", "uses"), ("performed_by", "performed_by"))


@serialize.register
def _(m: EnterpriseModel) -> str:
    """Deterministic rendering in the model grammar.

    An activity composed by exactly one process is nested in that process;
    every other link is written as a ``source kind target;`` statement.
    """
    pending = set(m.links)
    lines: list[str] = []

    def attrs(e, pad, skip=()):
        return [f"{pad}{k} = {value(v)};" for k, v in sorted(e.attributes.items()) if k not in skip]

    def activity(a, pad):
        inner = pad + _IND
        body = []
        for kind, kw in _PORTS:
            for tgt in m.targets(kind, a.id):
                body.append(f"{inner}{kw} {word(tgt)};")
                pending.discard(Link(kind, a.id, tgt))
        body += attrs(a, inner)
        if not body:
            return [f"{pad}activity {word(a.id)};"]
        return [f"{pad}activity {word(a.id)} {{"] + body + [f"{pad}}}"]

    parents: dict[str, list[str]] = {}
    for link in m.links:
        if link.kind == "composed_of":
            parents.setdefault(link.target, []).append(link.source)
    nested: dict[str, list] = {}
    for a in m.of_kind("Activity"):
        ps = parents.get(a.id, [])
        if len(ps) == 1 and m.entities[ps[0]].kind == "Process":
            nested.setdefault(ps[0], []).append(a)
            pending.discard(Link("composed_of", ps[0], a.id))

    for p in m.of_kind("Process"):
        body = []
        for a in nested.get(p.id, []):
            body += activity(a, _IND)
        body += attrs(p, _IND)
        lines += [f"process {word(p.id)} {{"] + body + ["}"] if body else [f"process {word(p.id)};"]
    nested_ids = {a.id for acts in nested.values() for a in acts}
    for a in m.of_kind("Activity"):
        if a.id not in nested_ids:
            lines += activity(a, "")
    for f in m.of_kind("Flow"):
        dom = f.attributes.get("operational_domain")
        head = f"flow {word(f.id)}" + (f": {word(dom)}" if dom is not None else "")
        body = attrs(f, _IND, ("operational_domain",))
        lines += [head + " {"] + body + ["}"] if body else [head + ";"]
    for r in m.of_kind("Resource"):
        locs = m.targets("located_at", r.id)
        head = f"resource {word(r.id)}"
        if locs:
            head += f" at {word(locs[0])}"
            pending.discard(Link("located_at", r.id, locs[0]))
        body = attrs(r, _IND)
        lines += [head + " {"] + body + ["}"] if body else [head + ";"]
    for kind in ("Location", "Actor"):
        for e in m.of_kind(kind):
            head = f"{kind.lower()} {word(e.id)}"
            body = attrs(e, _IND)
            lines += [head + " {"] + body + ["}"] if body else [head + ";"]
    for link in sorted(pending, key=lambda l: (l.kind, l.source, l.target)):
        lines.append(f"{word(link.source)} {link.kind} {word(link.target)};")
    for name in sorted(m.series):
        lines.append(_series("series", m.series[name]))
    return "\n".join(lines)


@serialize.register(list)
@serialize.register(tuple)
def _(items) -> str:
    return "\n\n".join(serialize(x) for x in items)


# -- structural equality ---------------------------------------------------

def _anon(g: ConceptualGraph) -> ConceptualGraph:
    return dataclasses.replace(g.canonical(), name="")


@singledispatch
def _norm(x):
    return x


@_norm.register
def _(g: ConceptualGraph):
    return g.canonical()


@_norm.register
def _(r: GraphRule):
    c = r.canonical()
    return (c.name, _anon(c.hypothesis), _anon(c.conclusion), c.frontier)


@_norm.register
def _(pc: PositiveConstraint):
    c = pc.canonical()
    return (c.name, _anon(c.condition), tuple((_anon(a.graph), a.frontier) for a in c.alternatives))


@_norm.register
def _(nc: NegativeConstraint):
    c = nc.canonical()
    return (c.name, _anon(c.condition), _anon(c.mandatory), c.frontier)


@_norm.register
def _(p: Property):
    return p.canonical()


@_norm.register
def _(s: FactStore):
    return dict(s.facts)


@_norm.register(list)
@_norm.register(tuple)
def _(items):
    return tuple(_norm(x) for x in items)


def structurally_equal(a, b) -> bool:
    """Equality up to node and edge renumbering (and sub-graph names inside rules and constraints)."""
    return type(a) is type(b) and _norm(a) == _norm(b)

"""Turning raw syntax into checked values, reporting problems as diagnostics."""
from __future__ import annotations

from typing import Iterable

from ..cgraph import GENERIC, ConceptNode, ConceptualGraph, CorefVar, GraphError, Individual, RelationEdge, components
from ..diagnostics import Diagnostic, Location, error, warning
from ..ingest import DOMAINS, LINK_KINDS, EnterpriseModel, Entity, Link, ModelError
from ..ontology import TOP, ConceptLattice, CycleError, Ontology, OntologyError, RelationLattice
from ..propmodel.expr import Call, Cmp, And, Or, Not, names
from ..propmodel.facts import (
    AnyDomain,
    EnumDomain,
    FactError,
    FactStore,
    HandleFunction,
    ModelingParameter,
    ModelingVariable,
    PropertyRef,
    RangeDomain,
)
from ..propmodel.model import (
    CausalRelation,
    Degree,
    GenericProperty,
    Granularity,
    GranularityLevel,
    Placement,
    Property,
    PropertyError,
)
from ..reasoning import Alternative, GraphRule, NegativeConstraint, PositiveConstraint, shared_var_frontier
from .syntax import (
    FactItem,
    GenericItem,
    GranularityItem,
    NegativeItem,
    PositiveItem,
    PropertyItem,
    RawBody,
    RuleItem,
    Syntax,
)


def build_ontology(sources: Iterable[Syntax]) -> tuple[Ontology | None, list[Diagnostic]]:
    diags: list[Diagnostic] = []
    concepts, relations = {}, {}
    for src in sources:
        for d in src.concepts:
            if d.name in concepts:
                diags.append(error("duplicate-declaration", f"concept {d.name} is declared twice", d.loc))
            else:
                concepts[d.name] = d
        for d in src.relations:
            if d.name in relations:
                diags.append(error("duplicate-declaration", f"relation {d.name} is declared twice", d.loc))
            else:
                relations[d.name] = d

    known = set(concepts) | {TOP}
    edges = set()
    for d in concepts.values():
        for p in d.parents:
            if p not in known:
                diags.append(error("unknown-type", f"concept {d.name} has unknown parent {p}", d.loc))
            else:
                edges.add((d.name, p))
    try:
        lattice = ConceptLattice(frozenset(known), frozenset(edges), TOP)
    except CycleError as exc:
        first = concepts.get(exc.cycle[0])
        diags.append(error("cycle", str(exc), first.loc if first else Location()))
        return None, diags
    except OntologyError as exc:
        diags.append(error("ontology-error", str(exc)))
        return None, diags

    signature, redges = {}, set()
    for d in relations.values():
        bad = [t for t in d.signature if t not in known]
        for t in bad:
            diags.append(error("unknown-type", f"signature of {d.name} uses unknown concept type {t}", d.loc))
        signature[d.name] = tuple(d.signature)
        for p in d.parents:
            if p not in relations:
                diags.append(error("unknown-relation", f"relation {d.name} has unknown parent {p}", d.loc))
            else:
                redges.add((d.name, p))
    if diags:
        return None, diags
    for child, parent in sorted(redges):
        cs, ps = signature[child], signature[parent]
        loc = relations[child].loc
        if len(cs) != len(ps):
            diags.append(error("signature-mismatch",
                               f"relation {child} has arity {len(cs)} but its parent {parent} has {len(ps)}", loc))
            continue
        for i, (a, b) in enumerate(zip(cs, ps)):
            if not lattice.is_subtype(a, b):
                diags.append(error("signature-mismatch",
                                   f"argument {i} of {child} ({a}) is not a subtype of argument {i} of {parent} ({b})",
                                   loc))
    if diags:
        return None, diags
    try:
        rl = RelationLattice(frozenset(relations), signature, frozenset(redges))
    except CycleError as exc:
        first = relations.get(exc.cycle[0])
        diags.append(error("cycle", str(exc), first.loc if first else Location()))
        return None, diags
    return Ontology(lattice, rl), diags


def _call_names(expr) -> set[str]:
    if isinstance(expr, Call):
        out = {expr.fn}
        for a in expr.args:
            out |= _call_names(a)
        return out
    if isinstance(expr, Cmp):
        return _call_names(expr.left) | _call_names(expr.right)
    if isinstance(expr, (And, Or)):
        return set().union(*(_call_names(i) for i in expr.items))
    if isinstance(expr, Not):
        return _call_names(expr.item)
    return set()


def _domain(spec):
    if spec is None:
        return AnyDomain()
    if spec[0] == "enum":
        return EnumDomain(frozenset(spec[1]))
    return RangeDomain(spec[1], spec[2])


class Elaborator:
    def __init__(self, ontology: Ontology, store: FactStore | None = None):
        self.ontology = ontology
        self.store = store
        self.diagnostics: list[Diagnostic] = []

    def _err(self, code: str, message: str, loc: Location):
        self.diagnostics.append(error(code, message, loc))

    # graphs

    def graph(self, body: RawBody | None, name: str, warn_disconnected: bool = False) -> ConceptualGraph | None:
        if body is None:
            return ConceptualGraph(self.ontology, (), (), name)
        lat, rel = self.ontology
        before = len(self.diagnostics)
        nodes = []
        for i, c in enumerate(body.concepts):
            if c.ctype not in lat:
                self._err("unknown-type", f"unknown concept type {c.ctype}", c.loc)
            kind, value = c.marker
            marker = GENERIC if kind == "generic" else CorefVar(value) if kind == "var" else Individual(value)
            nodes.append(ConceptNode(i, c.ctype, marker))

        def resolve(arg) -> int | None:
            if arg.kind == "ref":
                if arg.value < len(nodes):
                    return arg.value
                self._err("unknown-reference", f"@{arg.value} is out of range; the body has {len(nodes)} concept(s)",
                          arg.loc)
                return None
            want = CorefVar(arg.value) if arg.kind == "var" else Individual(arg.value)
            for n in nodes:
                if n.marker == want:
                    return n.id
            shown = f"*{arg.value}" if arg.kind == "var" else arg.value
            self._err("unknown-reference", f"{shown} does not name a concept of this graph", arg.loc)
            return None

        edges = []
        for j, r in enumerate(body.relations):
            args = [resolve(a) for a in r.args]
            if r.rtype not in rel:
                self._err("unknown-relation", f"unknown relation type {r.rtype}", r.loc)
                continue
            if None in args:
                continue
            sig = rel.signature[r.rtype]
            if len(sig) != len(args):
                self._err("arity-mismatch", f"({r.rtype}) takes {len(sig)} argument(s), got {len(args)}", r.loc)
                continue
            for k, (a, t) in enumerate(zip(args, sig)):
                ct = nodes[a].ctype
                if ct in lat and not lat.is_subtype(ct, t):
                    self._err("signature-violation",
                              f"argument {k} of ({r.rtype}) is {ct}, expected a subtype of {t}", r.loc)
            edges.append(RelationEdge(j, r.rtype, tuple(args)))
        if len(self.diagnostics) > before:
            return None
        g = ConceptualGraph(self.ontology, tuple(nodes), tuple(edges), name)
        if warn_disconnected and len(components(g)) > 1:
            self.diagnostics.append(warning("disconnected-graph", f"graph {name} is not connected", body.loc))
        return g

    def rule(self, item: RuleItem) -> GraphRule | None:
        h = self.graph(item.hypothesis, f"{item.name}.if")
        c = self.graph(item.conclusion, f"{item.name}.then")
        if h is None or c is None:
            return None
        try:
            return GraphRule.from_graphs(item.name, h, c)
        except GraphError as exc:
            self._err("rule-error", str(exc), item.loc)
            return None

    def constraint(self, item: PositiveItem | NegativeItem):
        cond = self.graph(item.condition, f"{item.name}.when")
        try:
            if isinstance(item, PositiveItem):
                alts = [self.graph(b, f"{item.name}.{'require' if i == 0 else f'or{i}'}")
                        for i, b in enumerate(item.alternatives)]
                if cond is None or None in alts:
                    return None
                return PositiveConstraint.from_graphs(item.name, cond, alts)
            mandatory = self.graph(item.mandatory, f"{item.name}.forbid")
            if cond is None or mandatory is None:
                return None
            return NegativeConstraint.from_graphs(item.name, cond, mandatory)
        except GraphError as exc:
            self._err("constraint-error", str(exc), item.loc)
            return None

    # properties

    def _facts_in(self, expr, bound: set[str]) -> set[str]:
        if expr is None:
            return set()
        known = bound | (set(self.store.facts) if self.store is not None else set())
        return {n for n in names(expr) if n in known or "." in n} | _call_names(expr)

    def property(self, item: PropertyItem) -> Property | None:
        before = len(self.diagnostics)
        bindings = {}
        for fact, body, loc in item.binds:
            if fact in bindings:
                self._err("duplicate-binding", f"fact {fact} is bound twice", loc)
                continue
            g = self.graph(body, fact)
            if g is not None:
                bindings[fact] = g
        if len(self.diagnostics) > before:
            return None
        bound = set(bindings)
        causes = item.causes if item.causes is not None else self._facts_in(item.theta_c, bound)
        effects = item.effects if item.effects is not None else self._facts_in(item.theta_e, bound)
        try:
            relation = CausalRelation(item.kind, item.theta_c, item.theta_e, item.sense, item.note)
            placement = Placement(*item.placement) if item.placement else None
            return Property(item.name, frozenset(causes), frozenset(effects), relation,
                            Degree(item.degree, item.tag), bindings, placement)
        except (PropertyError, ValueError) as exc:
            self._err("property-error", str(exc), item.loc)
            return None

    def generic(self, item: GenericItem) -> GenericProperty | None:
        for _, ctype in item.params:
            if ctype not in self.ontology.concepts:
                self._err("unknown-type", f"placeholder type {ctype} is not a concept type", item.loc)
                return None
        try:
            return GenericProperty(item.name, frozenset(item.perspectives), item.typology,
                                   tuple(item.params), item.body)
        except (PropertyError, ValueError) as exc:
            self._err("property-error", str(exc), item.loc)
            return None

    def granularity(self, item: GranularityItem) -> Granularity | None:
        try:
            return Granularity(item.name, tuple(GranularityLevel(n, t) for n, t in item.levels))
        except PropertyError as exc:
            self._err("property-error", str(exc), item.loc)
            return None

    def fact(self, item: FactItem):
        d = item.data
        try:
            if item.kind == "var":
                return ModelingVariable(item.name, d["type"], tuple(d["series"]), _domain(d["domain"]))
            if item.kind == "param":
                return ModelingParameter(item.name, d["type"], d["value"])
            if item.kind == "handle":
                return HandleFunction(item.name, tuple(d["params"]), d["result"])
            return PropertyRef(item.name)
        except FactError as exc:
            self._err("fact-error", str(exc), item.loc)
            return None


def build_model(sources: Iterable[Syntax], elab: Elaborator) -> EnterpriseModel | None:
    """Merge the model statements of all sources into one validated model."""
    entities: dict[str, Entity] = {}
    links: set[Link] = set()
    series = {}
    before = len(elab.diagnostics)
    raw_links = []
    for src in sources:
        for e in src.entities:
            if e.id in entities:
                elab._err("duplicate-entity", f"entity {e.id} is declared twice", e.loc)
                continue
            dom = e.attributes.get("operational_domain")
            if e.kind == "Flow" and dom is not None and dom not in DOMAINS:
                elab._err("kind-violation", f"flow {e.id}: operational domain must be one of "
                          f"{', '.join(DOMAINS)}, not {dom}", e.loc)
                continue
            entities[e.id] = Entity(e.id, e.kind, dict(e.attributes))
        raw_links.extend(src.links)
        for item in src.series:
            mv = elab.fact(item)
            if mv is not None:
                if mv.name in series:
                    elab._err("duplicate-fact", f"series {mv.name} is declared twice", item.loc)
                series[mv.name] = mv
    for link in raw_links:
        missing = [x for x in (link.source, link.target) if x not in entities]
        if missing:
            elab._err("dangling-link", f"{link.kind} link refers to undeclared entity {missing[0]}", link.loc)
            continue
        sources_ok, targets_ok = LINK_KINDS[link.kind]
        s, t = entities[link.source].kind, entities[link.target].kind
        if s not in sources_ok or t not in targets_ok:
            elab._err("kind-violation", f"{link.kind} cannot connect {s} {link.source} to {t} {link.target}",
                      link.loc)
            continue
        links.add(Link(link.kind, link.source, link.target))
    if len(elab.diagnostics) > before:
        return None
    try:
        return EnterpriseModel(entities, frozenset(links), series)
    except ModelError as exc:
        elab._err(exc.code, str(exc), Location())
        return None

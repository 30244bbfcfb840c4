"""Random instance generators and brute-force oracles shared by the tests.

The oracles deliberately avoid the library's own lattice and search code:
subsumption comes from a Floyd-Warshall closure over the raw edge lists,
projections from plain assignment enumeration.
"""
from __future__ import annotations

import itertools
import random
from typing import Iterable

from emvv.cgraph import (
    ConceptNode,
    ConceptualGraph,
    CorefVar,
    GENERIC,
    GraphError,
    Individual,
    JoinError,
    RelationEdge,
    copy,
    join,
    normalize_coref,
    restrict,
    signature_violations,
    simplify,
)
from emvv.ingest import DOMAINS, EnterpriseModel, Entity, Link
from emvv.ontology import TOP, make_ontology
from emvv.propmodel import (
    And,
    Call,
    CausalRelation,
    Cmp,
    Degree,
    EnumDomain,
    FactStore,
    GenericProperty,
    Granularity,
    GranularityLevel,
    HandleFunction,
    Lit,
    ModelingParameter,
    ModelingVariable,
    Name,
    Not,
    Or,
    Placement,
    Property,
    PropertyRef,
    RangeDomain,
)
from emvv.reasoning import GraphRule, NegativeConstraint, PositiveConstraint

# A small diamond-shaped ontology for random graphs:
#   Universal > A > B, C > D ;  Universal > E
TINY_CONCEPTS = {"A": (), "B": ("A",), "C": ("A",), "D": ("B", "C"), "E": ()}
TINY_RELATIONS = {
    "p": (("A", "A"), ()),
    "q": (("B", "A"), ("p",)),
    "s": ((TOP,), ()),
    "t": (("A", TOP, "A"), ()),
}
TINY = make_ontology(TINY_CONCEPTS, TINY_RELATIONS)
TINY_TYPES = sorted(TINY.concepts.types)
INDIVIDUALS = ("a", "b", "c")


# -- oracles -----------------------------------------------------------------

def closure(types: Iterable[str], edges: Iterable[tuple[str, str]], top: str | None = TOP) -> dict[str, set[str]]:
    """Reflexive-transitive ancestors by Floyd-Warshall over a boolean matrix."""
    types = sorted(set(types) | ({top} if top else set()))
    idx = {t: i for i, t in enumerate(types)}
    n = len(types)
    reach = [[i == j for j in range(n)] for i in range(n)]
    has_parent = set()
    for c, p in edges:
        reach[idx[c]][idx[p]] = True
        has_parent.add(c)
    if top:
        for t in types:
            if t != top and t not in has_parent:
                reach[idx[t]][idx[top]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return {t: {u for u in types if reach[idx[t]][idx[u]]} for t in types}


def mcs_oracle(anc: dict[str, set[str]], a: str, b: str) -> set[str]:
    common = {t for t in anc if a in anc[t] and b in anc[t]}
    return {t for t in common if not any(u != t and u in anc[t] for u in common)}


def ontology_oracles(onto):
    concepts = closure(onto.concepts.types, onto.concepts.subtype_edges, onto.concepts.top)
    relations = closure(onto.relations.relations, onto.relations.subtype_edges, None)
    return concepts, relations


def brute_projections(pattern: ConceptualGraph, target: ConceptualGraph) -> set:
    """Every morphism, by enumerating all concept assignments and all edge images."""
    canc, ranc = ontology_oracles(pattern.ontology)
    pids = [c.id for c in pattern.concepts]
    options = []
    for c in pattern.concepts:
        ok = []
        for t in target.concepts:
            if c.ctype not in canc.get(t.ctype, ()):
                continue
            if isinstance(c.marker, Individual) and t.marker != c.marker:
                continue
            ok.append(t.id)
        options.append(ok)
    found = set()
    for combo in itertools.product(*options):
        cmap = dict(zip(pids, combo))
        images = []
        for r in pattern.relations:
            want = tuple(cmap[a] for a in r.args)
            images.append([e.id for e in target.relations
                           if e.args == want and r.rtype in ranc.get(e.rtype, ())])
        for rimg in itertools.product(*images):
            rmap = {r.id: e for r, e in zip(pattern.relations, rimg)}
            found.add((tuple(sorted(cmap.items())), tuple(sorted(rmap.items()))))
    return found


# -- random graphs -----------------------------------------------------------

def _marker(rng: random.Random, corefs: bool):
    x = rng.random()
    if x < 0.55:
        return GENERIC
    if corefs and x < 0.7:
        return CorefVar(rng.choice("xyz"))
    return Individual(rng.choice(INDIVIDUALS))


def random_graph(
    rng: random.Random,
    onto=TINY,
    max_nodes: int = 6,
    max_edges: int = 6,
    corefs: bool = False,
    name: str = "G",
    min_nodes: int = 0,
) -> ConceptualGraph:
    types = sorted(onto.concepts.types)
    n = rng.randint(min_nodes, max_nodes)
    nodes = [ConceptNode(i, rng.choice(types), _marker(rng, corefs)) for i in range(n)]
    # nodes sharing a coreference variable denote one entity: give them one type
    first: dict[CorefVar, str] = {}
    for i, c in enumerate(nodes):
        if isinstance(c.marker, CorefVar):
            nodes[i] = ConceptNode(c.id, first.setdefault(c.marker, c.ctype), c.marker)
    edges = []
    rels = sorted(onto.relations.relations)
    for _ in range(rng.randint(0, max_edges) if nodes else 0):
        r = rng.choice(rels)
        args = []
        for sig in onto.relations.signature[r]:
            fits = [c.id for c in nodes if onto.concepts.is_subtype(c.ctype, sig)]
            if not fits:
                break
            args.append(rng.choice(fits))
        else:
            edges.append(RelationEdge(len(edges), r, tuple(args)))
    return ConceptualGraph(onto, tuple(nodes), tuple(edges), name)


def generalize(rng: random.Random, target: ConceptualGraph, max_nodes: int = 6, max_edges: int = 6) -> ConceptualGraph:
    """A pattern built by reading a random (possibly non-injective) preimage out of ``target``.

    It projects into ``target`` by construction, so positive cases are common.
    """
    onto = target.ontology
    if not target.concepts:
        return target.with_parts((), ())
    k = rng.randint(1, max_nodes)
    images = [rng.choice(target.concepts) for _ in range(k)]
    nodes = []
    for i, t in enumerate(images):
        ups = sorted(onto.concepts.ancestors(t.ctype))
        ctype = rng.choice(ups) if rng.random() < 0.5 else t.ctype
        marker = t.marker if isinstance(t.marker, Individual) and rng.random() < 0.5 else GENERIC
        nodes.append(ConceptNode(i, ctype, marker))
    pre: dict[int, list[int]] = {}
    for i, t in enumerate(images):
        pre.setdefault(t.id, []).append(i)
    usable = [e for e in target.relations if all(a in pre for a in e.args)]
    edges = []
    rng.shuffle(usable)
    for e in usable[: rng.randint(0, max_edges)]:
        rtype = e.rtype
        ups = sorted(r for r in onto.relations.relations if onto.relations.is_subrelation(e.rtype, r))
        if rng.random() < 0.3:
            rtype = rng.choice(ups)
        edges.append(RelationEdge(len(edges), rtype, tuple(rng.choice(pre[a]) for a in e.args)))
    g = ConceptualGraph(onto, tuple(nodes), tuple(edges), "P")
    # keep patterns well-formed: undo generalizations that break a signature
    while signature_violations(g):
        bad = {r.args[i] for r in g.relations for i, (a, s) in enumerate(
            zip(r.args, onto.relations.signature[r.rtype])) if not onto.concepts.is_subtype(g.concept(a).ctype, s)}
        g = g.with_parts([ConceptNode(c.id, images[c.id].ctype, c.marker) if c.id in bad else c
                          for c in g.concepts])
    if len(nodes) < max_nodes and rng.random() < 0.2:
        # a mutation that may or may not still project
        extra = random_graph(rng, onto, 1, 1, name="P")
        if extra.concepts:
            c = extra.concepts[0]
            g = g.with_parts(g.concepts + (ConceptNode(len(nodes), c.ctype, c.marker),))
    return g


def random_pair(rng: random.Random):
    target = random_graph(rng, max_nodes=6, max_edges=6)
    if rng.random() < 0.6:
        pattern = generalize(rng, target)
    else:
        pattern = random_graph(rng, max_nodes=6, max_edges=6, corefs=True, name="P")
    return pattern, target


# -- random artifacts for round-trips ----------------------------------------

def _ident(rng: random.Random, prefix: str = "n") -> str:
    return prefix + str(rng.randint(0, 999))


def random_rule(rng: random.Random, onto=TINY, individual_only: bool = False, name: str = "R") -> GraphRule:
    """A rule whose hypothesis and conclusion share coreference variables.

    With ``individual_only`` every conclusion node is either a frontier
    variable or an individual, which guarantees saturation terminates.
    """
    while True:
        hyp = random_graph(rng, onto, 3, 3, name=f"{name}.if", min_nodes=1)
        hyp = hyp.with_parts([ConceptNode(c.id, c.ctype, CorefVar(f"v{c.id}") if not isinstance(c.marker, Individual)
                                          else c.marker) for c in hyp.concepts])
        concl = random_graph(rng, onto, 3, 3, name=f"{name}.then", min_nodes=1)
        nodes = []
        for c in concl.concepts:
            share = [h for h in hyp.concepts if isinstance(h.marker, CorefVar)
                     and onto.concepts.is_subtype(h.ctype, c.ctype)]
            if share and rng.random() < 0.6:
                h = rng.choice(share)
                nodes.append(ConceptNode(c.id, h.ctype, h.marker))
            elif individual_only:
                nodes.append(ConceptNode(c.id, c.ctype, Individual(rng.choice(INDIVIDUALS))))
            else:
                nodes.append(c)
        concl = concl.with_parts(nodes)
        if signature_violations(concl):
            continue
        try:
            return GraphRule.from_graphs(name, hyp, concl)
        except ValueError:
            continue


def random_constraint(rng: random.Random, onto=TINY, name: str = "K"):
    cond = random_graph(rng, onto, 2, 2, name=f"{name}.when")
    cond = cond.with_parts([ConceptNode(c.id, c.ctype, CorefVar(f"v{c.id}")
                                        if not isinstance(c.marker, Individual) else c.marker)
                            for c in cond.concepts])

    def part(label):
        g = random_graph(rng, onto, 3, 3, name=f"{name}.{label}", min_nodes=1)
        nodes = []
        for c in g.concepts:
            share = [h for h in cond.concepts if isinstance(h.marker, CorefVar)
                     and onto.concepts.is_subtype(h.ctype, c.ctype)]
            if share and rng.random() < 0.5:
                h = rng.choice(share)
                nodes.append(ConceptNode(c.id, h.ctype, h.marker))
            else:
                nodes.append(c)
        return g.with_parts(nodes)

    if rng.random() < 0.5:
        alts = [part(f"alt{i}") for i in range(rng.randint(1, 3))]
        return PositiveConstraint.from_graphs(name, cond, alts)
    return NegativeConstraint.from_graphs(name, cond, part("forbid"))


FACT_NAMES = ("load.drilling", "wip.polishing", "alarm.x", "shift_hours", "speed", "ready")
FUNCS = ("precedes", "colocated", "domain_of")


def random_expr(rng: random.Random, depth: int = 3):
    if depth == 0 or rng.random() < 0.3:
        x = rng.random()
        if x < 0.4:
            return Name(rng.choice(FACT_NAMES))
        if x < 0.55:
            return Call(rng.choice(FUNCS), tuple(Name(rng.choice(("drilling", "polishing")))
                                                 for _ in range(rng.randint(0, 2))))
        return Lit(rng.choice([True, False, rng.randint(-50, 50), round(rng.uniform(-9, 9), 3), "Energy", "it's"]))
    op = rng.choice(("and", "or", "not", "cmp"))
    if op == "not":
        return Not(random_expr(rng, depth - 1))
    if op == "cmp":
        return Cmp(rng.choice(("=", "!=", "<", "<=", ">", ">=")), random_expr(rng, 0), random_expr(rng, 0))
    items = tuple(random_expr(rng, depth - 1) for _ in range(rng.randint(2, 3)))
    return And(items) if op == "and" else Or(items)


def random_property(rng: random.Random, onto=TINY, name: str = "prop") -> Property:
    pool = list(FACT_NAMES)
    rng.shuffle(pool)
    k = rng.randint(0, 3)
    causes, effects = pool[:k], pool[k:k + rng.randint(1, 2)]
    kind = rng.choice(("implication", "equivalence", "temporal", "influence", "emergence"))
    sense = rng.choice("+-") if kind == "influence" else None
    rel = CausalRelation(
        kind,
        random_expr(rng) if causes and rng.random() < 0.8 else None,
        random_expr(rng) if rng.random() < 0.8 else None,
        sense,
        rng.choice([None, "annotated", "two words"]),
    )
    bindings = {}
    for f in causes + effects:
        if rng.random() < 0.4:
            bindings[f] = random_graph(rng, onto, 3, 3, corefs=True, name=f, min_nodes=1)
    placement = None
    if rng.random() < 0.7:
        placement = Placement(
            rng.choice(("upper_referent", "referent", "lower")), rng.choice(("system", "model")),
            rng.choice(("structural", "behavioral", "functional")), rng.choice(("past", "present", "future")))
    degree = Degree(rng.choice(["", "operational", "strategic"]), rng.choice(["", "decision"]))
    return Property(name, frozenset(causes), frozenset(effects), rel, degree, bindings, placement)


def random_store(rng: random.Random) -> FactStore:
    facts = []
    for i in range(rng.randint(0, 6)):
        kind = rng.choice(("var", "param", "handle", "trust"))
        name = f"f{i}." + rng.choice(("drilling", "x", "cell-1"))
        if kind == "var":
            tag = rng.choice(("int", "real", "bool", "symbol"))
            if tag == "int":
                dom = RangeDomain(-100, 100) if rng.random() < 0.5 else EnumDomain(frozenset())
                vals = [rng.randint(-100, 100) for _ in range(3)]
                if isinstance(dom, EnumDomain):
                    dom = EnumDomain(frozenset(vals))
            elif tag == "real":
                dom = RangeDomain(-1.5, 1.5)
                vals = [round(rng.uniform(-1.5, 1.5), 4) for _ in range(3)]
            elif tag == "bool":
                dom = EnumDomain(frozenset({True, False}))
                vals = [rng.random() < 0.5 for _ in range(3)]
            else:
                dom = EnumDomain(frozenset({"Idle", "Busy"}))
                vals = [rng.choice(("Idle", "Busy")) for _ in range(3)]
            times = sorted(rng.sample(range(0, 20), 3))
            facts.append(ModelingVariable(name, tag, tuple(zip(times, vals)), dom))
        elif kind == "param":
            v = rng.choice([rng.randint(-5, 5), 2.5, True, "Energy"])
            tag = {bool: "bool", int: "int", float: "real", str: "symbol"}[type(v)]
            facts.append(ModelingParameter(name, tag, v))
        elif kind == "handle":
            facts.append(HandleFunction(f"h{i}", tuple(rng.sample(("Activity", "Flow", "Resource"), rng.randint(0, 2))),
                                        rng.choice(("bool", "set", "Domain"))))
        else:
            facts.append(PropertyRef(f"trusted{i}"))
    return FactStore.of(facts)


_PREFIX = {"Process": "proc", "Activity": "act", "Flow": "flow", "Resource": "res",
           "Location": "loc", "Actor": "who"}


def random_model(rng: random.Random) -> EnterpriseModel:
    entities = []
    counts = {"Process": rng.randint(0, 2), "Activity": rng.randint(0, 4), "Flow": rng.randint(0, 4),
              "Resource": rng.randint(0, 3), "Location": rng.randint(0, 2), "Actor": rng.randint(0, 2)}
    ids: dict[str, list[str]] = {}
    for kind, n in counts.items():
        for i in range(n):
            eid = f"{_PREFIX[kind]}{i}"
            attrs = {}
            if kind == "Flow" and rng.random() < 0.8:
                attrs["operational_domain"] = rng.choice(DOMAINS)
            if rng.random() < 0.3:
                attrs["cost"] = rng.choice([3, 2.5, True, "high"])
            entities.append(Entity(eid, kind, attrs))
            ids.setdefault(kind, []).append(eid)
    links = set()
    from emvv.ingest import LINK_KINDS

    for _ in range(rng.randint(0, 10)):
        kind = rng.choice(sorted(LINK_KINDS))
        srcs, tgts = LINK_KINDS[kind]
        s = [e for k in sorted(srcs) for e in ids.get(k, [])]
        t = [e for k in sorted(tgts) for e in ids.get(k, [])]
        if s and t:
            links.add(Link(kind, rng.choice(s), rng.choice(t)))
    series = []
    if ids.get("Activity") and rng.random() < 0.4:
        a = ids["Activity"][0]
        series.append(ModelingVariable(f"load.{a}", "real", ((0, 1.0), (1, 2.5)), RangeDomain(0, 10)))
    return EnterpriseModel.of(entities, links, series)


def random_ontology(rng: random.Random):
    n = rng.randint(0, 7)
    names = [f"T{i}" for i in range(n)]
    concepts = {}
    for i, t in enumerate(names):
        # parents only among earlier types: acyclic by construction
        concepts[t] = tuple(rng.sample(names[:i], rng.randint(0, min(2, i))))
    relations = {}
    for j in range(rng.randint(0, 4)):
        sig = tuple(rng.choice(names + [TOP]) for _ in range(rng.randint(1, 3)))
        relations[f"r{j}"] = (sig, ())
    return make_ontology(concepts, relations)


def random_dag(rng: random.Random, n: int):
    names = [f"T{i}" for i in range(n)]
    edges = set()
    for i, t in enumerate(names):
        for p in names[:i]:
            if rng.random() < 0.3:
                edges.add((t, p))
    return names, edges


def random_generic(rng: random.Random) -> GenericProperty:
    params = tuple((f"p{i}", rng.choice(("Activity", "Flow"))) for i in range(rng.randint(0, 2)))
    uses = " and ".join(f"precedes(${p}, ${p})" for p, _ in params) or "true"
    body = (f"  property inst kind implication {{\n    causes {{ {uses} }}\n    effects [ready] {{ ready }}\n  }}")
    persp = frozenset(rng.sample(("stability", "reliability", "integrity"), rng.randint(0, 3)))
    return GenericProperty(_ident(rng, "g"), persp, rng.choice(("system", "language", "axiomatic")), params, body)


def random_granularity(rng: random.Random) -> Granularity:
    names = rng.sample(("strategic", "tactic", "operational", "execution", "shop"), rng.randint(0, 5))
    return Granularity(_ident(rng, "gran"), tuple(
        GranularityLevel(n, rng.choice([None, "1 year", "weeks", "it's now"])) for n in names))


# -- canonical rules ----------------------------------------------------------

def canonical_derivations(rng: random.Random, g: ConceptualGraph):
    """Canonical-rule derivations of ``g`` that are applicable, as (name, result) pairs."""
    out = [("copy", copy(g)), ("simplify", simplify(g))]
    lat = g.ontology.concepts
    for c in g.concepts:
        subs = sorted(t for t in lat.descendants(c.ctype) if t != c.ctype)
        if subs:
            try:
                out.append(("restrict-type", restrict(g, c.id, new_type=rng.choice(subs))))
            except GraphError:
                pass
        if not isinstance(c.marker, Individual):
            out.append(("restrict-marker", restrict(g, c.id, new_marker=Individual("k"))))
    other = random_graph(rng, max_nodes=3, max_edges=2)
    if g.concepts and other.concepts:
        a, b = rng.choice(g.concepts), rng.choice(other.concepts)
        try:
            out.append(("join", join(g, other, [(a.id, b.id)])))
        except JoinError:
            pass
    try:
        out.append(("normalize", normalize_coref(g)))
    except JoinError:
        pass
    return out


# -- round trips --------------------------------------------------------------

def _reparse_one(attr):
    def reparse(text):
        from emvv.frontio import parse_document

        doc = parse_document(text, ontology=TINY)
        assert doc.ok, [str(d) for d in doc.errors()]
        (item,) = getattr(doc, attr)
        return item
    return reparse


def _kinds():
    from emvv.frontio import parse_facts, parse_generics, parse_granularities, parse_model, parse_ontology

    return {
        "graph": (lambda rng: random_graph(rng, corefs=True), _reparse_one("graphs")),
        "rule": (random_rule, _reparse_one("rules")),
        "constraint": (random_constraint, _reparse_one("constraints")),
        "property": (random_property, _reparse_one("properties")),
        "facts": (random_store, parse_facts),
        "model": (random_model, parse_model),
        "ontology": (random_ontology, parse_ontology),
        "generic": (random_generic, lambda t: parse_generics(t)[0]),
        "granularity": (random_granularity, lambda t: parse_granularities(t)[0]),
    }


ARTIFACT_KINDS = ("graph", "rule", "constraint", "property", "facts", "model", "ontology", "generic", "granularity")


def roundtrip(kind: str, rng: random.Random):
    """Generate one ``kind`` artifact and return it with its re-parsed serialization."""
    from emvv.frontio import serialize

    make, reparse = _kinds()[kind]
    x = make(rng)
    return x, reparse(serialize(x))

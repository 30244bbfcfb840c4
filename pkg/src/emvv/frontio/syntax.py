"""Recursive-descent parsing of every text format into located raw items.

Nothing here consults an ontology or a fact store; :mod:`.elaborate` turns
raw items into graphs, rules, properties and models.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..diagnostics import Diagnostic, DiagnosticError, Location, error
from ..propmodel.expr import And, Call, Cmp, Lit, Name, Not, Or
from .lexer import EOF, IDENT, NUMBER, PLACEHOLDER, PUNCT, STAR, STRING, VAR, Token, tokenize

LINK_WORDS = frozenset({
    "composed_of", "has_input", "has_output", "uses_resource", "performed_by", "precedes", "located_at",
})
ACTIVITY_PORTS = {"input": "has_input", "output": "has_output", "uses": "uses_resource",
                  "performed_by": "performed_by", "precedes": "precedes"}
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")
KINDS = ("implication", "equivalence", "temporal", "influence", "emergence")


# -- raw items ---------------------------------------------------------------

@dataclass
class RawConcept:
    ctype: str
    marker: tuple[str, str | None]  # ("generic"|"var"|"ind", name)
    loc: Location


@dataclass
class RawArg:
    kind: str  # "var" | "ind" | "ref"
    value: Any
    loc: Location


@dataclass
class RawRelation:
    rtype: str
    args: list[RawArg]
    loc: Location


@dataclass
class RawBody:
    concepts: list[RawConcept]
    relations: list[RawRelation]
    loc: Location


@dataclass
class ConceptDecl:
    name: str
    parents: list[str]
    loc: Location


@dataclass
class RelationDecl:
    name: str
    signature: list[str]
    parents: list[str]
    loc: Location


@dataclass
class GraphItem:
    name: str
    body: RawBody
    loc: Location


@dataclass
class RuleItem:
    name: str
    hypothesis: RawBody
    conclusion: RawBody
    loc: Location


@dataclass
class PositiveItem:
    name: str
    condition: RawBody | None
    alternatives: list[RawBody]
    loc: Location


@dataclass
class NegativeItem:
    name: str
    condition: RawBody | None
    mandatory: RawBody
    loc: Location


@dataclass
class PropertyItem:
    name: str
    degree: str
    tag: str
    kind: str
    sense: str | None
    placement: tuple[str, str, str, str] | None
    note: str | None
    causes: list[str] | None
    theta_c: Any
    effects: list[str] | None
    theta_e: Any
    binds: list[tuple[str, RawBody, Location]]
    loc: Location


@dataclass
class GenericItem:
    name: str
    perspectives: list[str]
    typology: str
    params: list[tuple[str, str]]
    body: str
    loc: Location


@dataclass
class GranularityItem:
    name: str
    levels: list[tuple[str, str | None]]
    loc: Location


@dataclass
class FactItem:
    kind: str  # "var" | "param" | "handle" | "trust"
    name: str
    data: dict
    loc: Location


@dataclass
class RawEntity:
    id: str
    kind: str
    attributes: dict
    loc: Location


@dataclass
class RawLink:
    kind: str
    source: str
    target: str
    loc: Location


@dataclass
class Syntax:
    """Everything one source file declares, in declaration order per kind."""

    file: str
    concepts: list[ConceptDecl] = field(default_factory=list)
    relations: list[RelationDecl] = field(default_factory=list)
    graphs: list[GraphItem] = field(default_factory=list)
    rules: list[RuleItem] = field(default_factory=list)
    constraints: list[PositiveItem | NegativeItem] = field(default_factory=list)
    properties: list[PropertyItem] = field(default_factory=list)
    generics: list[GenericItem] = field(default_factory=list)
    granularities: list[GranularityItem] = field(default_factory=list)
    facts: list[FactItem] = field(default_factory=list)
    entities: list[RawEntity] = field(default_factory=list)
    links: list[RawLink] = field(default_factory=list)
    series: list[FactItem] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def has_model(self) -> bool:
        return bool(self.entities or self.links or self.series)


# -- parser ------------------------------------------------------------------

class Parser:
    def __init__(self, tokens: list[Token], file: str, source: str = ""):
        self.toks = tokens
        self.i = 0
        self.file = file
        self.source = source

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def loc(self, tok: Token | None = None) -> Location:
        tok = tok or self.tok
        return Location(self.file, tok.line, tok.column)

    def fail(self, message: str, tok: Token | None = None, code: str = "syntax-error"):
        raise DiagnosticError(error(code, message, self.loc(tok)))

    def next(self) -> Token:
        t = self.tok
        if t.kind != EOF:
            self.i += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        return self.tok.is_(kind, text)

    def at_punct(self, p: str) -> bool:
        return self.tok.is_(PUNCT, p)

    def at_word(self, w: str) -> bool:
        return self.tok.is_(IDENT, w)

    def accept(self, p: str) -> Token | None:
        return self.next() if self.at_punct(p) else None

    def accept_word(self, w: str) -> Token | None:
        return self.next() if self.at_word(w) else None

    def punct(self, p: str) -> Token:
        if self.at_punct(p):
            return self.next()
        self.fail(f"expected {p!r}, found {self.tok}")

    def word(self, w: str) -> Token:
        if self.at_word(w):
            return self.next()
        self.fail(f"expected {w!r}, found {self.tok}")

    def ident(self, what: str = "identifier") -> str:
        if self.at(IDENT):
            return self.next().text
        self.fail(f"expected {what}, found {self.tok}")

    def name(self, what: str = "name") -> str:
        """An identifier or a quoted string."""
        if self.at(IDENT):
            return self.next().text
        if self.at(STRING):
            return self.next().value
        self.fail(f"expected {what}, found {self.tok}")

    def ident_list(self, what: str) -> list[str]:
        out = [self.ident(what)]
        while self.accept(","):
            out.append(self.ident(what))
        return out

    def literal(self):
        t = self.tok
        if t.kind == NUMBER:
            return self.next().value
        if t.kind == STRING:
            return self.next().value
        if t.kind == IDENT:
            self.next()
            if t.text in ("true", "false"):
                return t.text == "true"
            return t.text
        self.fail(f"expected a value, found {t}")

    def end(self):
        self.accept(";")

    # graph bodies

    def body(self) -> RawBody:
        start = self.punct("{")
        concepts: list[RawConcept] = []
        relations: list[RawRelation] = []
        while not self.at_punct("}"):
            if self.at_punct("["):
                left = self.concept(concepts)
                while self.at_punct("->"):
                    arrow = self.next()
                    self.punct("(")
                    rtype = self.ident("relation type")
                    self.punct(")")
                    self.punct("->")
                    if not self.at_punct("["):
                        self.fail(f"expected a concept after '->', found {self.tok}")
                    right = self.concept(concepts)
                    here = self.loc(arrow)
                    relations.append(RawRelation(rtype, [RawArg("ref", left, here), RawArg("ref", right, here)], here))
                    left = right
            elif self.at_punct("("):
                relations.append(self.relation())
            elif self.at(EOF):
                self.fail("unterminated graph body", start)
            else:
                self.fail(f"expected a concept '[...]' or a relation '(...)', found {self.tok}")
        self.punct("}")
        return RawBody(concepts, relations, self.loc(start))

    def concept(self, concepts: list[RawConcept]) -> int:
        start = self.punct("[")
        ctype = self.ident("concept type")
        marker: tuple[str, str | None] = ("generic", None)
        if self.accept(":"):
            t = self.tok
            if t.kind == STAR:
                self.next()
            elif t.kind == VAR:
                marker = ("var", self.next().value)
            elif t.kind in (IDENT, NUMBER):
                marker = ("ind", self.next().text)
            elif t.kind == STRING:
                marker = ("ind", self.next().value)
            else:
                self.fail(f"expected a marker, found {t}")
        self.punct("]")
        concepts.append(RawConcept(ctype, marker, self.loc(start)))
        return len(concepts) - 1

    def relation(self) -> RawRelation:
        start = self.punct("(")
        rtype = self.ident("relation type")
        args = []
        while not self.at_punct(")"):
            t = self.tok
            here = self.loc(t)
            if t.kind == VAR:
                args.append(RawArg("var", self.next().value, here))
            elif t.kind in (IDENT, NUMBER):
                args.append(RawArg("ind", self.next().text, here))
            elif t.kind == STRING:
                args.append(RawArg("ind", self.next().value, here))
            elif t.is_(PUNCT, "@"):
                self.next()
                if not self.at(NUMBER) or not isinstance(self.tok.value, int) or self.tok.value < 0:
                    self.fail("expected a concept index after '@'")
                args.append(RawArg("ref", self.next().value, here))
            else:
                self.fail(f"expected a relation argument, found {t}")
        self.punct(")")
        return RawRelation(rtype, args, self.loc(start))

    # expressions

    def expr(self):
        items = [self.and_()]
        while self.accept_word("or"):
            items.append(self.and_())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def and_(self):
        items = [self.not_()]
        while self.accept_word("and"):
            items.append(self.not_())
        return items[0] if len(items) == 1 else And(tuple(items))

    def not_(self):
        if self.accept_word("not"):
            return Not(self.not_())
        return self.cmp()

    def cmp(self):
        left = self.atom()
        t = self.tok
        if t.kind == PUNCT and t.text in CMP_OPS:
            self.next()
            return Cmp(t.text, left, self.atom())
        return left

    def atom(self):
        t = self.tok
        if t.kind in (NUMBER, STRING):
            return Lit(self.next().value)
        if t.kind == IDENT:
            if t.text in ("and", "or", "not"):
                self.fail(f"unexpected {t}")
            self.next()
            if t.text in ("true", "false"):
                return Lit(t.text == "true")
            if self.accept("("):
                args = []
                if not self.at_punct(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.punct(")")
                return Call(t.text, tuple(args))
            return Name(t.text)
        if self.accept("("):
            e = self.expr()
            self.punct(")")
            return e
        self.fail(f"expected an expression, found {t}")

    def braced_expr(self):
        self.punct("{")
        e = None if self.at_punct("}") else self.expr()
        self.punct("}")
        return e

    # ontology

    def concept_decl(self, out: Syntax):
        start = self.word("concept")
        name = self.ident("concept name")
        parents = self.ident_list("parent type") if self.accept("<") else []
        self.end()
        out.concepts.append(ConceptDecl(name, parents, self.loc(start)))

    def relation_decl(self, out: Syntax):
        start = self.word("relation")
        name = self.ident("relation name")
        self.punct("(")
        sig = self.ident_list("argument type")
        self.punct(")")
        parents = self.ident_list("parent relation") if self.accept("<") else []
        self.end()
        out.relations.append(RelationDecl(name, sig, parents, self.loc(start)))

    # graphs, rules, constraints

    def graph_item(self, out: Syntax):
        start = self.word("graph")
        name = self.name("graph name")
        out.graphs.append(GraphItem(name, self.body(), self.loc(start)))
        self.end()

    def rule_item(self, out: Syntax):
        start = self.word("rule")
        name = self.name("rule name")
        self.punct("{")
        self.word("if")
        hyp = self.body()
        self.word("then")
        concl = self.body()
        self.punct("}")
        self.end()
        out.rules.append(RuleItem(name, hyp, concl, self.loc(start)))

    def positive_item(self, out: Syntax):
        start = self.word("positive")
        name = self.name("constraint name")
        self.punct("{")
        cond = self.body() if self.accept_word("when") else None
        self.word("require")
        alts = [self.body()]
        while self.accept_word("or"):
            alts.append(self.body())
        self.punct("}")
        self.end()
        out.constraints.append(PositiveItem(name, cond, alts, self.loc(start)))

    def negative_item(self, out: Syntax):
        start = self.word("negative")
        name = self.name("constraint name")
        self.punct("{")
        cond = self.body() if self.accept_word("when") else None
        self.word("forbid")
        mandatory = self.body()
        self.punct("}")
        self.end()
        out.constraints.append(NegativeItem(name, cond, mandatory, self.loc(start)))

    # properties

    def fact_list(self) -> list[str] | None:
        if not self.accept("["):
            return None
        names: list[str] = []
        if not self.at_punct("]"):
            names = self.ident_list("fact name")
        self.punct("]")
        return names

    def property_item(self, out: Syntax):
        start = self.word("property")
        name = self.name("property name")
        degree = tag = ""
        if self.accept_word("degree"):
            degree = self.name("degree")
        if self.accept_word("tag"):
            tag = self.name("degree type tag")
        self.word("kind")
        kt = self.tok
        kind = self.ident("relation kind")
        if kind not in KINDS:
            self.fail(f"unknown relation kind {kind!r}; expected one of {', '.join(KINDS)}", kt)
        sense = None
        if kind == "influence":
            self.punct("(")
            if self.at_punct("+") or self.at_punct("-"):
                sense = self.next().text
            else:
                self.fail(f"expected '+' or '-', found {self.tok}")
            self.punct(")")
        placement = None
        if self.accept_word("at"):
            target = self.ident("target level")
            st = self.tok
            typ = self.ident("typology such as system.functional")
            if typ.count(".") != 1:
                self.fail(f"expected <object>.<aspect>, found {typ!r}", st)
            obj, aspect = typ.split(".")
            placement = (target, obj, aspect, self.ident("time"))
        note = None
        if self.accept_word("note"):
            if not self.at(STRING):
                self.fail(f"expected a quoted note, found {self.tok}")
            note = self.next().value
        self.punct("{")
        causes = theta_c = None
        if self.accept_word("causes"):
            causes = self.fact_list()
            theta_c = self.braced_expr()
        self.word("effects")
        effects = self.fact_list()
        theta_e = self.braced_expr()
        binds = []
        while self.at_word("bind"):
            bt = self.next()
            fact = self.ident("fact name")
            self.word("to")
            self.word("graph")
            binds.append((fact, self.body(), self.loc(bt)))
        self.punct("}")
        self.end()
        out.properties.append(PropertyItem(
            name, degree, tag, kind, sense, placement, note, causes, theta_c, effects, theta_e,
            binds, self.loc(start)))

    def generic_item(self, out: Syntax):
        start = self.word("generic")
        name = self.name("template name")
        perspectives = self.ident_list("perspective") if self.accept_word("perspective") else []
        self.word("typology")
        typology = self.ident("typology")
        self.punct("{")
        params = []
        while self.at_word("param") and self.peek().kind == PLACEHOLDER:
            self.next()
            ph = self.next().value
            self.punct(":")
            params.append((ph, self.ident("concept type")))
            self.end()
        first = self.tok
        depth = 0
        while True:
            t = self.tok
            if t.kind == EOF:
                self.fail("unterminated template body", start)
            if t.is_(PUNCT, "{"):
                depth += 1
            elif t.is_(PUNCT, "}"):
                if depth == 0:
                    break
                depth -= 1
            self.next()
        body = self.source[first.offset:self.tok.offset].strip()
        self.punct("}")
        self.end()
        out.generics.append(GenericItem(name, perspectives, typology, params, body, self.loc(start)))

    def granularity_item(self, out: Syntax):
        start = self.word("granularity")
        name = self.name("granularity name")
        self.punct("{")
        levels = []
        while self.accept_word("degree"):
            level = self.name("degree")
            temporal = None
            if self.accept_word("temporal"):
                temporal = self.name("temporal annotation")
            levels.append((level, temporal))
            self.end()
        self.punct("}")
        self.end()
        out.granularities.append(GranularityItem(name, levels, self.loc(start)))

    # fact store

    def domain(self):
        if self.accept("{"):
            values = []
            if not self.at_punct("}"):
                values.append(self.literal())
                while self.accept(","):
                    values.append(self.literal())
            self.punct("}")
            return ("enum", values)
        self.punct("[")
        lo = self.literal()
        self.punct("..")
        hi = self.literal()
        self.punct("]")
        return ("range", lo, hi)

    def series_decl(self, keyword: str) -> FactItem:
        start = self.word(keyword)
        name = self.ident("variable name")
        self.punct(":")
        type_tag = self.ident("type")
        dom = self.domain() if self.accept_word("in") else None
        self.punct("=")
        self.punct("[")
        points = []
        while self.at_punct("("):
            self.next()
            tt = self.tok
            t = self.literal()
            if isinstance(t, (bool, str)):
                self.fail("time points must be numbers", tt)
            self.punct(",")
            points.append((t, self.literal()))
            self.punct(")")
            if not self.accept(","):
                break
        self.punct("]")
        self.end()
        return FactItem("var", name, {"type": type_tag, "domain": dom, "series": points}, self.loc(start))

    def param_decl(self, out: Syntax):
        start = self.word("param")
        name = self.ident("parameter name")
        self.punct(":")
        type_tag = self.ident("type")
        self.punct("=")
        value = self.literal()
        self.end()
        out.facts.append(FactItem("param", name, {"type": type_tag, "value": value}, self.loc(start)))

    def handle_decl(self, out: Syntax):
        start = self.word("handle")
        name = self.ident("function name")
        self.punct("(")
        params = [] if self.at_punct(")") else self.ident_list("parameter type")
        self.punct(")")
        self.punct(":")
        result = self.ident("result type")
        self.end()
        out.facts.append(FactItem("handle", name, {"params": params, "result": result}, self.loc(start)))

    def trust_decl(self, out: Syntax):
        start = self.word("trust")
        name = self.ident("property name")
        self.end()
        out.facts.append(FactItem("trust", name, {}, self.loc(start)))

    # enterprise models

    _ENTITY_WORDS = {"process": "Process", "activity": "Activity", "flow": "Flow",
                     "resource": "Resource", "location": "Location", "actor": "Actor"}

    def entity_decl(self, out: Syntax, parent: str | None = None):
        start = self.next()
        kind = self._ENTITY_WORDS[start.text]
        here = self.loc(start)
        eid = self.name(f"{kind.lower()} name")
        attrs: dict = {}
        if kind == "Flow" and self.accept(":"):
            attrs["operational_domain"] = self.name("operational domain")
        if kind == "Resource" and self.at_word("at"):
            at = self.next()
            out.links.append(RawLink("located_at", eid, self.name("location"), self.loc(at)))
        if parent is not None:
            out.links.append(RawLink("composed_of", parent, eid, here))
        if self.accept("{"):
            while not self.at_punct("}"):
                self.entity_member(out, kind, eid, attrs)
            self.punct("}")
        self.end()
        out.entities.append(RawEntity(eid, kind, attrs, here))

    def entity_member(self, out: Syntax, kind: str, eid: str, attrs: dict):
        t = self.tok
        if t.kind == IDENT and self.peek().is_(PUNCT, "="):
            key = self.next().text
            self.next()
            if key in attrs:
                self.fail(f"attribute {key!r} of {eid} set twice", t)
            attrs[key] = self.literal()
            self.end()
        elif kind == "Process" and t.text in ("activity", "process") and t.kind == IDENT:
            self.entity_decl(out, parent=eid)
        elif kind == "Activity" and t.kind == IDENT and t.text in ACTIVITY_PORTS:
            self.next()
            targets = [self.name("entity name")]
            while self.accept(","):
                targets.append(self.name("entity name"))
            for target in targets:
                out.links.append(RawLink(ACTIVITY_PORTS[t.text], eid, target, self.loc(t)))
            self.end()
        elif t.kind == EOF:
            self.fail(f"unterminated block of {eid}")
        else:
            self.fail(f"unexpected {t} in {kind.lower()} {eid}")

    def link_stmt(self, out: Syntax):
        start = self.tok
        src = self.name("entity name")
        kt = self.tok
        kind = self.ident("link kind")
        if kind not in LINK_WORDS:
            self.fail(f"unknown link kind {kind!r}", kt, "unknown-link-kind")
        tgt = self.name("entity name")
        self.end()
        out.links.append(RawLink(kind, src, tgt, self.loc(start)))

    # top level

    def item(self, out: Syntax):
        t = self.tok
        word = t.text if t.kind == IDENT else None
        if word in self._ENTITY_WORDS:
            return self.entity_decl(out)
        handler = {
            "concept": self.concept_decl, "relation": self.relation_decl, "graph": self.graph_item,
            "rule": self.rule_item, "positive": self.positive_item, "negative": self.negative_item,
            "property": self.property_item, "generic": self.generic_item,
            "granularity": self.granularity_item, "param": self.param_decl,
            "handle": self.handle_decl, "trust": self.trust_decl,
        }.get(word)
        if handler is not None:
            return handler(out)
        if word in ("var", "series"):
            item = self.series_decl(word)
            (out.facts if word == "var" else out.series).append(item)
            return
        if t.kind in (IDENT, STRING) and self.peek().kind == IDENT and self.peek().text in LINK_WORDS:
            return self.link_stmt(out)
        self.fail(f"expected a declaration, found {t}")

    def recover(self, start: int):
        """Skip to the next top-level keyword outside any brace."""
        depth = 0
        j = start
        while self.toks[j].kind != EOF:
            t = self.toks[j]
            if j > start and depth == 0 and j >= self.i and t.kind == IDENT and t.text in TOP_WORDS:
                break
            if t.is_(PUNCT, "{"):
                depth += 1
            elif t.is_(PUNCT, "}"):
                depth = max(depth - 1, 0)
            j += 1
        self.i = j

    def document(self) -> Syntax:
        out = Syntax(self.file)
        while not self.at(EOF):
            start = self.i
            try:
                self.item(out)
            except DiagnosticError as exc:
                out.diagnostics.append(exc.diagnostic)
                self.recover(start)
        return out


TOP_WORDS = frozenset({
    "concept", "relation", "graph", "rule", "positive", "negative", "property", "generic",
    "granularity", "var", "param", "handle", "trust", "series",
}) | frozenset(Parser._ENTITY_WORDS)


def parse_syntax(text: str, file: str = "<string>") -> Syntax:
    """Tolerant parse: syntax errors become diagnostics and parsing resumes at the next item."""
    try:
        tokens = tokenize(text, file)
    except DiagnosticError as exc:
        out = Syntax(file)
        out.diagnostics.append(exc.diagnostic)
        return out
    return Parser(tokens, file, text).document()


def parse_expr(text: str, file: str = "<expr>"):
    p = Parser(tokenize(text, file), file, text)
    e = p.expr()
    if not p.at(EOF):
        p.fail(f"unexpected {p.tok} after expression")
    return e

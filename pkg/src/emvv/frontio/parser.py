"""Entry points for parsing text into artifacts.

``parse_document`` is tolerant and returns diagnostics.  The single-kind
functions (``parse_graphs``, ``parse_rules`` ...) are strict: they raise
:class:`~emvv.diagnostics.DiagnosticError` carrying the first error.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..cgraph import ConceptualGraph
from ..diagnostics import Diagnostic, DiagnosticError, has_errors, sort_diagnostics
from ..ingest import EnterpriseModel
from ..ontology import Ontology
from ..propmodel.facts import FactError, FactStore
from ..propmodel.model import GenericProperty, Granularity, Property
from ..reasoning import GraphRule
from .elaborate import Elaborator, build_model, build_ontology
from .syntax import Syntax, parse_expr, parse_syntax

__all__ = [
    "Document", "parse_document", "parse_ontology", "parse_graphs", "parse_graph", "parse_rules",
    "parse_constraints", "parse_properties", "parse_generics", "parse_granularities", "parse_facts",
    "parse_model", "parse_expr",
]


@dataclass
class Document:
    ontology: Ontology | None = None
    graphs: list[ConceptualGraph] = field(default_factory=list)
    rules: list[GraphRule] = field(default_factory=list)
    constraints: list = field(default_factory=list)
    properties: list[Property] = field(default_factory=list)
    generics: list[GenericProperty] = field(default_factory=list)
    granularities: list[Granularity] = field(default_factory=list)
    facts: list = field(default_factory=list)
    model: EnterpriseModel | None = None
    diagnostics: list[Diagnostic] = field(default_factory=list)
    # where each property was declared, for later cross-file diagnostics
    locations: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not has_errors(self.diagnostics)

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]


def _default_ontology() -> Ontology:
    from ..ontology import reference_ontology

    return reference_ontology()


def elaborate(
    sources: list[Syntax],
    ontology: Ontology | None = None,
    store: FactStore | None = None,
) -> Document:
    """Build every artifact declared across ``sources``.

    Concept and relation declarations, when present, define the ontology;
    otherwise ``ontology`` (or the reference ontology) governs the graphs.
    """
    doc = Document()
    for s in sources:
        doc.diagnostics.extend(s.diagnostics)
    if any(s.concepts or s.relations for s in sources):
        doc.ontology, diags = build_ontology(sources)
        doc.diagnostics.extend(diags)
        if doc.ontology is None:
            doc.diagnostics = sort_diagnostics(doc.diagnostics)
            return doc
    else:
        doc.ontology = ontology or _default_ontology()

    elab = Elaborator(doc.ontology, store)
    for s in sources:
        for item in s.facts:
            fact = elab.fact(item)
            if fact is not None:
                doc.facts.append(fact)
    if store is None and doc.facts:
        try:
            elab.store = FactStore.of(doc.facts)
        except FactError:
            pass
    for s in sources:
        for item in s.graphs:
            g = elab.graph(item.body, item.name, warn_disconnected=True)
            if g is not None:
                doc.graphs.append(g)
        for item in s.rules:
            r = elab.rule(item)
            if r is not None:
                doc.rules.append(r)
        for item in s.constraints:
            c = elab.constraint(item)
            if c is not None:
                doc.constraints.append(c)
        for item in s.properties:
            p = elab.property(item)
            if p is not None:
                doc.properties.append(p)
                doc.locations.setdefault(p.name, item.loc)
        for item in s.generics:
            gp = elab.generic(item)
            if gp is not None:
                doc.generics.append(gp)
        for item in s.granularities:
            gr = elab.granularity(item)
            if gr is not None:
                doc.granularities.append(gr)
    if any(s.has_model for s in sources):
        doc.model = build_model(sources, elab)
    doc.diagnostics = sort_diagnostics(doc.diagnostics + elab.diagnostics)
    return doc


def parse_document(
    text: str,
    file: str = "<string>",
    ontology: Ontology | None = None,
    store: FactStore | None = None,
) -> Document:
    return elaborate([parse_syntax(text, file)], ontology, store)


def _strict(doc: Document) -> Document:
    errors = doc.errors()
    if errors:
        raise DiagnosticError(errors[0])
    return doc


def parse_ontology(text: str, file: str = "<string>") -> Ontology:
    syntax = parse_syntax(text, file)
    if syntax.diagnostics:
        raise DiagnosticError(syntax.diagnostics[0])
    ontology, diags = build_ontology([syntax])
    errors = [d for d in sort_diagnostics(diags) if d.is_error]
    if errors:
        raise DiagnosticError(errors[0])
    return ontology


def parse_graphs(text: str, ontology: Ontology | None = None, file: str = "<string>") -> list[ConceptualGraph]:
    return _strict(parse_document(text, file, ontology)).graphs


def parse_graph(text: str, ontology: Ontology | None = None, file: str = "<string>") -> ConceptualGraph:
    graphs = parse_graphs(text, ontology, file)
    if len(graphs) != 1:
        raise ValueError(f"expected exactly one graph, found {len(graphs)}")
    return graphs[0]


def parse_rules(text: str, ontology: Ontology | None = None, file: str = "<string>") -> list[GraphRule]:
    return _strict(parse_document(text, file, ontology)).rules


def parse_constraints(text: str, ontology: Ontology | None = None, file: str = "<string>") -> list:
    return _strict(parse_document(text, file, ontology)).constraints


def parse_properties(
    text: str,
    ontology: Ontology | None = None,
    file: str = "<string>",
    store: FactStore | None = None,
) -> list[Property]:
    return _strict(parse_document(text, file, ontology, store)).properties


def parse_generics(text: str, ontology: Ontology | None = None, file: str = "<string>") -> list[GenericProperty]:
    return _strict(parse_document(text, file, ontology)).generics


def parse_granularities(text: str, file: str = "<string>") -> list[Granularity]:
    return _strict(parse_document(text, file)).granularities


def parse_facts(text: str, file: str = "<string>") -> FactStore:
    doc = _strict(parse_document(text, file))
    return FactStore.of(doc.facts)


def parse_model(text: str, file: str = "<string>") -> EnterpriseModel:
    doc = _strict(parse_document(text, file))
    return doc.model if doc.model is not None else EnterpriseModel()

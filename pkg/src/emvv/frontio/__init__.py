"""Text formats: one tokenizer, recursive-descent parsers, canonical serializers."""
from .bundle import ParsedBundle, parse_bundle
from .parser import (
    Document,
    parse_constraints,
    parse_document,
    parse_expr,
    parse_facts,
    parse_generics,
    parse_graph,
    parse_graphs,
    parse_granularities,
    parse_model,
    parse_ontology,
    parse_properties,
    parse_rules,
)
from .serialize import serialize, serialize_body, structurally_equal

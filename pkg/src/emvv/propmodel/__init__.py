from .expr import And, Call, Cmp, Expr, ExprTypeError, Lit, Name, Not, Or, eval_expr, explain, names, render_expr
from .facts import (
    AnyDomain,
    EnumDomain,
    Fact,
    FactError,
    FactStore,
    HandleFunction,
    MissingTimeError,
    ModelingParameter,
    ModelingVariable,
    PropertyRef,
    RangeDomain,
    UnknownFactError,
)
from .model import (
    CausalRelation,
    Degree,
    GenericProperty,
    Granularity,
    GranularityLevel,
    Kind,
    Placement,
    Property,
    PropertyError,
    Sense,
    Typology,
    instantiate,
)
from .pgraph import PropertyGraph, PropertyGraphReport, check_property_graph, place
from .verify import Bundle, UnbindableFactError, UnsupportedKindError, Witness, compile_to_constraints, verify_property

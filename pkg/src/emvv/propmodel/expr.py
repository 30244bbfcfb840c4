"""Boolean condition expressions over facts.

Grammar (parsed by :mod:`emvv.frontio.parser`)::

    expr  := and ('or' and)*
    and   := not ('and' not)*
    not   := 'not' not | cmp
    cmp   := atom [('=' | '!=' | '<' | '<=' | '>' | '>=') atom]
    atom  := NUMBER | STRING | 'true' | 'false' | NAME ['(' expr, ... ')'] | '(' expr ')'

A bare name is a fact when the store declares it and a symbolic constant
otherwise; dotted names are always facts.
"""
from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from typing import Any, Mapping, Union

from .facts import (
    FactError,
    FactStore,
    HandleFunction,
    MissingTimeError,
    ModelingParameter,
    ModelingVariable,
    PropertyRef,
    UnknownFactError,
)


class ExprTypeError(FactError):
    pass


@dataclass(frozen=True)
class Lit:
    value: Any


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple = ()


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Any
    right: Any


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Not:
    item: Any


Expr = Union[Lit, Name, Call, Cmp, And, Or, Not]
TRUE = Lit(True)

_ORDER_OPS = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}


def names(expr: Expr) -> set[str]:
    """Every name and function name mentioned in ``expr``."""
    if isinstance(expr, Name):
        return {expr.id}
    if isinstance(expr, Call):
        out = {expr.fn}
        for a in expr.args:
            out |= names(a)
        return out
    if isinstance(expr, Cmp):
        return names(expr.left) | names(expr.right)
    if isinstance(expr, (And, Or)):
        return set().union(*(names(i) for i in expr.items))
    if isinstance(expr, Not):
        return names(expr.item)
    return set()


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _compare(op: str, a, b) -> bool:
    if op in ("=", "!="):
        if _is_number(a) != _is_number(b) and not (isinstance(a, (set, frozenset)) or isinstance(b, (set, frozenset))):
            raise ExprTypeError(f"cannot compare {a!r} with {b!r}")
        return (a == b) if op == "=" else (a != b)
    if _is_number(a) and _is_number(b) or isinstance(a, str) and isinstance(b, str):
        return _ORDER_OPS[op](a, b)
    raise ExprTypeError(f"cannot order {a!r} and {b!r}")


def _truth(v, where: str) -> bool:
    if not isinstance(v, bool):
        raise ExprTypeError(f"{where} needs a boolean, got {v!r}")
    return v


class _Evaluator:
    def __init__(self, store: FactStore, t, env: Mapping[str, Any] | None, trace: list | None):
        self.store = store
        self.t = t
        self.env = env or {}
        self.trace = trace

    def name(self, n: str):
        if n in self.env:
            return self.env[n]
        if n in self.store:
            fact = self.store[n]
            if isinstance(fact, ModelingVariable):
                if self.t is None:
                    raise MissingTimeError(f"{n} is time-indexed; a time point is required")
                return fact.at(self.t)
            if isinstance(fact, ModelingParameter):
                return fact.value
            if isinstance(fact, PropertyRef):
                return True
            if isinstance(fact, HandleFunction):
                return self.call(n, ())
        if "." in n:
            raise UnknownFactError(n)
        return n

    def call(self, fn: str, args: tuple):
        registry = self.store.registry
        if registry is None or fn not in registry:
            raise UnknownFactError(fn)
        value = registry.call(fn, self.store.model, args, self.t)
        if self.trace is not None:
            self.trace.append((fn, args, value))
        return value

    def eval(self, e: Expr):
        if isinstance(e, Lit):
            return e.value
        if isinstance(e, Name):
            return self.name(e.id)
        if isinstance(e, Call):
            return self.call(e.fn, tuple(self.eval(a) for a in e.args))
        if isinstance(e, Cmp):
            return _compare(e.op, self.eval(e.left), self.eval(e.right))
        if isinstance(e, And):
            values = [_truth(self.eval(i), "and") for i in e.items]
            return all(values)
        if isinstance(e, Or):
            values = [_truth(self.eval(i), "or") for i in e.items]
            return any(values)
        if isinstance(e, Not):
            return not _truth(self.eval(e.item), "not")
        raise TypeError(f"not an expression: {e!r}")


def eval_expr(
    expr: Expr | None,
    store: FactStore,
    t: float | None = None,
    env: Mapping[str, Any] | None = None,
) -> Any:
    """Evaluate ``expr``; ``None`` (an empty cause set) is true.

    ``env`` overrides name lookup.  Every operand is evaluated, so type
    errors surface even where short-circuiting would hide them.
    """
    if expr is None:
        return True
    return _Evaluator(store, t, env, None).eval(expr)


def explain(expr: Expr | None, store: FactStore, t=None, env=None) -> list[str]:
    """The handle-function calls made while evaluating ``expr``, as ``f(args)=value`` strings."""
    if expr is None:
        return []
    trace: list = []
    try:
        _Evaluator(store, t, env, trace).eval(expr)
    except FactError:
        pass
    return [f"{fn}({', '.join(_fmt(a) for a in args)})={_fmt(v)}" for fn, args, v in trace]


def _fmt(v) -> str:
    if isinstance(v, (set, frozenset)):
        return "{" + ", ".join(sorted(map(_fmt, v))) + "}"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


_BARE = re.compile(r"^[^\W\d][\w\-]*(\.[\w][\w\-]*)*$")
_PREC = {Or: 1, And: 2, Not: 3, Cmp: 4}


def render_expr(e: Expr, parent: int = 0) -> str:
    if isinstance(e, Lit):
        v = e.value
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return "'" + v.replace("\\", "\\\\").replace("'", "\\'") + "'"
        return repr(v)
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(render_expr(a) for a in e.args)})"
    prec = _PREC[type(e)]
    if isinstance(e, Cmp):
        text = f"{render_expr(e.left, prec + 1)} {e.op} {render_expr(e.right, prec + 1)}"
    elif isinstance(e, And):
        text = " and ".join(render_expr(i, prec + 1) for i in e.items)
    elif isinstance(e, Or):
        text = " or ".join(render_expr(i, prec + 1) for i in e.items)
    else:
        text = "not " + render_expr(e.item, prec)
    return f"({text})" if prec < parent else text

"""Command-line front end: ``emvv check|prove|saturate|export-fol|translate|matrix``.

Exit codes: 0 success, 1 violation or no contradiction, 2 input error,
3 proof bound reached.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from .cgraph import ConceptualGraph
from .diagnostics import DiagnosticError
from .fol import phi_translate, render
from .frontio import ParsedBundle, parse_bundle, serialize
from .propmodel import Bundle, PropertyError, PropertyGraph, check_property_graph, instantiate, place
from .propmodel.facts import FactError
from .projection import Morphism
from .reasoning import NegativeConstraint, Outcome, Verdict, prove_refutation, saturate, verify_all

OK, FAIL, INPUT_ERROR, BOUND_REACHED = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    paths: list[str] = field(default_factory=list)
    bound: int = 100
    limit: int | None = None
    format: str = "human"

    def __post_init__(self):
        if self.bound < 1:
            raise InputError(f"--bound must be at least 1, got {self.bound}")
        if self.limit is not None and self.limit < 1:
            raise InputError(f"--limit must be at least 1, got {self.limit}")


def _load(cfg: RunConfig, err) -> ParsedBundle:
    try:
        bundle = parse_bundle(cfg.paths)
    except OSError as exc:
        raise InputError(f"cannot read {exc.filename}: {exc.strerror}") from exc
    for d in bundle.diagnostics:
        print(d.render(), file=err)
    if not bundle.ok:
        raise InputError(f"{len(bundle.errors())} error(s) in input")
    return bundle


def _witness_text(w, graph: ConceptualGraph | None) -> str:
    if isinstance(w, Morphism):
        if graph is None:
            return w.summary()
        return ",".join(str(graph.concept(v)) for _, v in sorted(w.concept_map.items()))
    return str(w)


def witness_summary(v: Verdict, graph: ConceptualGraph | None, limit: int | None = None) -> str:
    """One-line witness description; falls back to the verdict's notes when a morphism is empty."""
    ws = list(v.witnesses)[:limit] if limit else list(v.witnesses)
    parts = [_witness_text(w, graph) for w in ws]
    if not any(parts) and v.notes:
        parts = list(v.notes)
    return "; ".join(p for p in parts if p)


def _emit(name: str, v: Verdict, graph, cfg: RunConfig, out) -> None:
    summary = witness_summary(v, graph, cfg.limit) if not v.satisfied else ""
    if cfg.format == "report":
        tail = f" witness={summary}" if summary else ""
        print(f"VERDICT {name} {v.status}{tail}", file=out)
        return
    print(f"{name}: {v.status}", file=out)
    own = [_witness_text(w, graph) for w in list(v.witnesses)[:cfg.limit or None]]
    for text in own:
        if text:
            print(f"  witness: {text}", file=out)
    if not v.satisfied:
        for note in v.notes:
            print(f"  {note}", file=out)


def cmd_check(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    bundle = _load(cfg, err)
    graph = bundle.target_graph()
    if graph is None:
        raise InputError("nothing to check: no model and no graph given")
    saturated, report = saturate(graph, bundle.rules, cfg.bound)
    if cfg.format == "human" and report.added:
        print(f"saturation added {len(report.added)} fragment(s)", file=out)
    results = verify_all(saturated, bundle.constraints)
    for name, v in results.entries:
        _emit(name, v, saturated, cfg, out)
    ok = results.satisfied

    pg = PropertyGraph()
    for p in bundle.properties:
        pg = place(pg, p)
    if len(pg):
        try:
            pg_report = check_property_graph(pg, Bundle(graph, bundle.store, tuple(bundle.rules), cfg.bound))
        except (PropertyError, FactError) as exc:
            raise InputError(str(exc)) from exc
        for name, placement, v in pg_report.entries:
            if cfg.format == "human":
                print(f"[{placement}]", end=" ", file=out)
            _emit(name, v, graph, cfg, out)
        ok = ok and pg_report.status.value == "Satisfied"
    if cfg.format == "human":
        print("all satisfied" if ok else "violations found", file=out)
    return OK if ok else FAIL


def cmd_prove(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    bundle = _load(cfg, err)
    if not bundle.graphs:
        raise InputError("prove needs a hypothesis graph")
    negs = [c for c in bundle.constraints if isinstance(c, NegativeConstraint)]
    result = prove_refutation(bundle.graphs[0], bundle.rules, negs, cfg.bound)
    hyps = {r.name: r.hypothesis for r in bundle.rules}
    for i, step in enumerate(result.trace, 1):
        print(f"step {i}: {step.describe(hyps.get(step.rule))}", file=out)
    if result.outcome is Outcome.CONTRADICTION:
        print(f"{result.outcome}: {result.violated_constraint} is violated", file=out)
        if cfg.format == "report":
            _emit(result.violated_constraint, result.verdict, result.final_graph, cfg, out)
        return OK
    print(str(result.outcome), file=out)
    return FAIL if result.outcome is Outcome.NO_CONTRADICTION else BOUND_REACHED


def cmd_saturate(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    bundle = _load(cfg, err)
    graph = bundle.target_graph()
    if graph is None:
        raise InputError("saturate needs a model or a graph")
    result, report = saturate(graph, bundle.rules, cfg.bound)
    hyps = {r.name: r.hypothesis for r in bundle.rules}
    for step in report.added:
        print(f"# pass {step.iteration}: {step.describe(hyps.get(step.rule))}", file=out)
    state = "fixpoint" if report.reached_fixpoint else "bound reached"
    print(f"# {state} after {report.iterations} pass(es)", file=out)
    print(serialize(result), file=out)
    return OK if report.reached_fixpoint else BOUND_REACHED


def cmd_export_fol(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    bundle = _load(cfg, err)
    graphs = list(bundle.graphs)
    if bundle.model_graph is not None:
        graphs.append(bundle.model_graph)
    for g in graphs:
        print(render(phi_translate(g)), file=out)
    return OK


def cmd_translate(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    bundle = _load(cfg, err)
    if bundle.model_graph is None:
        raise InputError("translate needs a model file")
    print(serialize(bundle.model_graph), file=out)
    return OK


def cmd_matrix_list(cfg: RunConfig, perspective=None, typology=None, out=sys.stdout, err=sys.stderr) -> int:
    bundle = _load(cfg, err)
    for gp in bundle.generics:
        if perspective and perspective not in gp.perspectives:
            continue
        if typology and gp.typology.value.lower() != typology.lower() and gp.typology.name.lower() != typology.lower():
            continue
        params = ", ".join(f"${p}: {t}" for p, t in gp.params)
        persp = ",".join(sorted(gp.perspectives))
        print(f"{gp.name}\t{persp}\t{gp.typology.value}\t{params}".rstrip(), file=out)
    return OK


def _parse_binds(pairs: list[str]) -> dict[str, str]:
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise InputError(f"--bind expects key=value, got {pair!r}")
        out[key.lstrip("$")] = value
    return out


def cmd_matrix_instantiate(cfg: RunConfig, template: str, binds: list[str], model: str | None = None,
                           output: str | None = None, name: str | None = None,
                           out=sys.stdout, err=sys.stderr) -> int:
    bundle = _load(cfg, err)
    by_name = {gp.name: gp for gp in bundle.generics}
    if template not in by_name:
        raise InputError(f"no template named {template!r}")
    m = None
    if model is not None:
        m = _load(RunConfig("matrix", [model]), err).model
    try:
        prop = instantiate(by_name[template], _parse_binds(binds), bundle.ontology, m, name)
    except PropertyError as exc:
        raise InputError(str(exc)) from exc
    text = serialize(prop) + "\n"
    if output:
        try:
            with open(output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {output}: {exc.strerror}") from exc
    else:
        out.write(text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bound", type=int, default=100, help="saturation bound (default 100)")
    common.add_argument("--limit", type=int, default=None, help="maximum witnesses reported per verdict")
    common.add_argument("--format", choices=("human", "report"), default="human")

    parser = argparse.ArgumentParser(prog="emvv", description="Verify enterprise models with conceptual graphs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, text in (
        ("check", "saturate the model and check constraints and properties"),
        ("prove", "refutation proof: derive until a negative constraint breaks"),
        ("saturate", "forward-chain rules and print the resulting graph"),
        ("export-fol", "print the first-order formula of each graph"),
        ("translate", "print the conceptual graph of a model"),
    ):
        p = sub.add_parser(cmd, parents=[common], help=text)
        p.add_argument("paths", nargs="+", metavar="FILE")

    matrix = sub.add_parser("matrix", help="reference matrix of generic properties")
    msub = matrix.add_subparsers(dest="action", required=True)
    ls = msub.add_parser("list", parents=[common])
    ls.add_argument("paths", nargs="+", metavar="FILE")
    ls.add_argument("--perspective")
    ls.add_argument("--typology")
    inst = msub.add_parser("instantiate", parents=[common])
    inst.add_argument("paths", nargs=1, metavar="FILE")
    inst.add_argument("template")
    inst.add_argument("--bind", action="append", default=[], metavar="NAME=VALUE")
    inst.add_argument("--model")
    inst.add_argument("--name")
    inst.add_argument("-o", "--output")
    return parser


_COMMANDS = {
    "check": cmd_check,
    "prove": cmd_prove,
    "saturate": cmd_saturate,
    "export-fol": cmd_export_fol,
    "translate": cmd_translate,
}


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, list(args.paths), args.bound, args.limit, args.format)
        if args.command == "matrix":
            if args.action == "list":
                return cmd_matrix_list(cfg, args.perspective, args.typology, out, err)
            return cmd_matrix_instantiate(cfg, args.template, args.bind, args.model, args.output,
                                          args.name, out, err)
        return _COMMANDS[args.command](cfg, out, err)
    except (InputError, DiagnosticError) as exc:
        print(f"emvv: error: {exc}", file=err)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

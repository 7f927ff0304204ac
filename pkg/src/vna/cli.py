"""Command-line front end: ``vna {classify,derive,graph,spectrum,type,eval}``.

Exit codes: 0 success, 2 invalid input, 3 input outside the classified
cases, 4 internal disagreement between the two classifiers.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import report, serialize
from .algmodel import Classification, ensure_valid, point_spectrum
from .classify import operand_algebra, connes_type, evaluate, simplify_product_expression
from .derive import derive_free_product
from .errors import InvalidValue, OracleMismatch, VNAError
from .expr import FileRef, FreeProduct, Leaf, parse
from .graphalg import classify_graph
from .numlat import Cyclic, HigherRank, fmt, posrat


def _load(path):
    return ensure_valid(serialize.load_algebra(path))


def _expression(args):
    """Parse the positional inputs: two algebra files, or one expression."""
    if len(args.inputs) == 2 and all(Path(p).is_file() for p in args.inputs):
        return FreeProduct(tuple(FileRef(p) for p in args.inputs))
    if len(args.inputs) == 1:
        src = args.inputs[0]
        if Path(src).is_file() and src.endswith(".json"):
            return FileRef(src)
        return parse(src)
    raise InvalidValue("expected two algebra files or a single expression")


def _emit(obj_json, text_line, fmt_):
    if fmt_ == "json":
        sys.stdout.write(serialize.dumps(obj_json))
    else:
        sys.stdout.write(text_line + "\n")


def _classification(args) -> Classification:
    return simplify_product_expression(_expression(args), _load)


def cmd_classify(args):
    c = _classification(args)
    sys.stdout.write(report.emit_report(c, args.format))


def _derive_node(node, traces):
    if not isinstance(node, FreeProduct):
        return evaluate(node, _load)
    acc = _derive_node(node.operands[0], traces)
    for op in node.operands[1:]:
        rhs = _derive_node(op, traces)
        a, b = operand_algebra(acc, "A"), operand_algebra(rhs, "B")
        try:
            acc, trace = derive_free_product(a, b)
        except OracleMismatch as exc:
            if exc.trace is not None:
                traces.append(exc.trace)
            raise
        traces.append(trace)
    return acc


def _write_traces(path, traces):
    if not path or not traces:
        return
    docs = [serialize.trace_to_json(t) for t in traces]
    Path(path).write_text(serialize.dumps(docs[0] if len(docs) == 1 else docs), encoding="utf-8")


def cmd_derive(args):
    traces = []
    try:
        v = _derive_node(_expression(args), traces)
    finally:
        _write_traces(args.trace, traces)
    c = v if isinstance(v, Classification) else simplify_product_expression(Leaf(v), None)
    sys.stdout.write(report.emit_report(c, args.format))


def _match_root(graph, root):
    if root is None:
        return None
    for v in graph.vertices:
        if v == root or str(v) == root:
            return v
    raise InvalidValue(f"unknown root vertex {root!r}")


def cmd_graph(args):
    g = serialize.graph_from_json(serialize.load_json(args.graph))
    mass = posrat(args.root_mass) if args.root_mass is not None else Fraction(1)
    gc = classify_graph(g, _match_root(g, args.root), mass)
    if args.format == "json":
        sys.stdout.write(serialize.dumps(serialize.graph_classification_to_json(gc)))
        return
    lines = [report.text(gc.as_classification())]
    for v in g.vertices:
        atom = gc.atoms[v]
        lines.append(f"  vertex {v}: φ = {fmt(gc.potentials[v])}" + (f", atom {fmt(atom)}" if atom else ""))
    for e in g.edges:
        mark = " (trace)" if e.id in gc.trace_edges else ""
        lines.append(f"  edge {e.id}: eigenvalue {fmt(gc.eigenvalues[e.id])}{mark}")
    sys.stdout.write("\n".join(lines) + "\n")


def _group_json(group):
    kind = group.kind()
    if isinstance(kind, Cyclic):
        k = {"kind": "cyclic", "lambda": fmt(kind.lam)}
    elif isinstance(kind, HigherRank):
        k = {"kind": "higher_rank"}
    else:
        k = {"kind": "trivial"}
    return {"generators": serialize.group_to_json(group), "rank": group.rank, **k}


def cmd_spectrum(args):
    v = evaluate(_expression(args), _load)
    group = v.group if isinstance(v, Classification) else point_spectrum(ensure_valid(v))
    _emit(_group_json(group), str(group), args.format)


def cmd_type(args):
    label = connes_type(_classification(args))
    _emit({"type": label}, label, args.format)


def cmd_eval(args):
    v = evaluate(_expression(args), _load)
    if isinstance(v, Classification):
        sys.stdout.write(report.emit_report(v, args.format))
        return
    ensure_valid(v)
    c = None
    try:
        c = simplify_product_expression(Leaf(v), None)
    except VNAError:
        pass
    if args.format == "json" or c is None:
        sys.stdout.write(serialize.dumps(serialize.algebra_to_json(v)))
    else:
        sys.stdout.write(report.emit_report(c, "text"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vna", description="Exact classification of free products of weighted algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    def inputs(sp):
        sp.add_argument("inputs", nargs="+", help="two algebra JSON files, or one expression")
        sp.add_argument("--format", choices=("json", "text"), default="json")

    inputs(sub.add_parser("classify", help="closed-form classification"))
    d = sub.add_parser("derive", help="inductive derivation, cross-checked against the closed form")
    inputs(d)
    d.add_argument("--trace", metavar="PATH", help="write the derivation trace as JSON")
    g = sub.add_parser("graph", help="classify a weighted graph algebra")
    g.add_argument("graph", help="graph JSON file")
    g.add_argument("--root", help="root vertex (default: lowest label)")
    g.add_argument("--root-mass", help="mass at the root, as p/q (default 1)")
    g.add_argument("--format", choices=("json", "text"), default="json")
    inputs(sub.add_parser("spectrum", help="point spectrum ratio group"))
    inputs(sub.add_parser("type", help="type label of the diffuse piece"))
    inputs(sub.add_parser("eval", help="evaluate an expression"))
    return p


COMMANDS = {
    "classify": cmd_classify,
    "derive": cmd_derive,
    "graph": cmd_graph,
    "spectrum": cmd_spectrum,
    "type": cmd_type,
    "eval": cmd_eval,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except VNAError as exc:
        print(f"vna: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"vna: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

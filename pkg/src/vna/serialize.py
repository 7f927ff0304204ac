"""JSON wire formats.  Rationals always travel as exact "p/q" strings."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .algmodel import (
    Algebra,
    ArakiWoods,
    Classification,
    FreeGroupFactor,
    HyperfiniteTensor,
    MatrixBlock,
    Param,
    ProjRef,
    Provenance,
    ResidualBlock,
    Tensor,
    TypeIInfinite,
)
from .errors import InvalidValue
from .numlat import RatioGroup, fmt, posrat


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


def rat(x) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise InvalidValue(f"rationals must be strings or integers, got {x!r}")
    return posrat(x) if isinstance(x, str) else posrat(Fraction(x))


def _weight(x) -> Fraction:
    # Weights may be non-positive on the wire; validate() reports them.
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise InvalidValue(f"rationals must be strings or integers, got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidValue(f"not a rational: {x!r}") from exc


def param_to_json(p) -> str:
    return p.value if isinstance(p, Param) else fmt(p)


def param_from_json(x):
    if x in ("inf", "∞"):
        return Param.INFINITE
    if x in ("?", "unknown"):
        return Param.UNKNOWN
    return rat(x)


def group_to_json(g: RatioGroup) -> list[str]:
    return [fmt(q) for q in g.generators()]


def group_from_json(gens) -> RatioGroup:
    return RatioGroup.generate(rat(x) for x in gens)


# --- algebras -----------------------------------------------------------------


def _with_label(d, s):
    if getattr(s, "label", None) is not None:
        d["label"] = s.label
    return d


def summand_to_json(s) -> dict:
    if isinstance(s, MatrixBlock):
        d = {"kind": "matrix", "weights": [fmt(w) for w in s.weights]}
    elif isinstance(s, TypeIInfinite):
        d = {"kind": "typeI_inf", "head": [fmt(h) for h in s.head], "ratio": fmt(s.ratio), "first": fmt(s.first)}
    elif isinstance(s, FreeGroupFactor):
        d = {"kind": "free_group", "t": param_to_json(s.param), "mass": fmt(s.mass)}
    elif isinstance(s, ArakiWoods):
        d = {"kind": "araki_woods", "generators": group_to_json(s.group), "mass": fmt(s.mass)}
    elif isinstance(s, HyperfiniteTensor):
        facs = [
            {"profile": [fmt(w) for w in p], "multiplicity": m.value if isinstance(m, Param) else m}
            for p, m in s.factors
        ]
        d = {"kind": "hyperfinite_tensor", "factors": facs, "mass": fmt(s.mass)}
    elif isinstance(s, Tensor):
        d = {
            "kind": "tensor",
            "type_i": summand_to_json(s.type_i),
            "diffuse": summand_to_json(s.diffuse),
            "mass": fmt(s.mass),
        }
    else:
        raise TypeError(f"unknown summand {s!r}")
    return _with_label(d, s)


def _need(d, key, where):
    if key not in d:
        raise InvalidValue(f"{where}: missing field {key!r}")
    return d[key]


def summand_from_json(d, where="summand"):
    if not isinstance(d, dict):
        raise InvalidValue(f"{where}: expected an object")
    kind = _need(d, "kind", where)
    label = d.get("label")
    if kind == "matrix":
        return MatrixBlock(tuple(_weight(w) for w in _need(d, "weights", where)), label)
    if kind == "typeI_inf":
        return TypeIInfinite(
            tuple(_weight(h) for h in d.get("head", [])),
            _weight(_need(d, "ratio", where)),
            _weight(_need(d, "first", where)),
            label,
        )
    if kind == "free_group":
        return FreeGroupFactor(param_from_json(_need(d, "t", where)), _weight(d.get("mass", "1")), label)
    if kind == "araki_woods":
        return ArakiWoods(group_from_json(_need(d, "generators", where)), _weight(d.get("mass", "1")), label)
    if kind == "hyperfinite_tensor":
        facs = []
        for k, f in enumerate(_need(d, "factors", where)):
            mult = f.get("multiplicity", "inf")
            if mult == "inf":
                mult = Param.INFINITE
            elif not isinstance(mult, int) or isinstance(mult, bool):
                raise InvalidValue(f"{where}.factors[{k}]: multiplicity must be an integer or \"inf\"")
            facs.append((tuple(_weight(w) for w in _need(f, "profile", where)), mult))
        return HyperfiniteTensor(tuple(facs), _weight(_need(d, "mass", where)), label)
    if kind == "tensor":
        ti = summand_from_json(_need(d, "type_i", where), where + ".type_i")
        df = summand_from_json(_need(d, "diffuse", where), where + ".diffuse")
        return Tensor(ti, df, _weight(_need(d, "mass", where)), label)
    raise InvalidValue(f"{where}: unknown kind {kind!r}")


def algebra_to_json(a: Algebra) -> dict:
    return {"label": a.label, "summands": [summand_to_json(s) for s in a.summands]}


def algebra_from_json(d) -> Algebra:
    if not isinstance(d, dict):
        raise InvalidValue("algebra must be a JSON object")
    summ = _need(d, "summands", "algebra")
    if not isinstance(summ, list):
        raise InvalidValue("algebra.summands must be a list")
    parts = tuple(summand_from_json(s, f"summands[{i}]") for i, s in enumerate(summ))
    return Algebra(parts, d.get("label", "A"))


def load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidValue(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_algebra(path) -> Algebra:
    return algebra_from_json(load_json(path))


# --- classifications --------------------------------------------------------------


def _ref_to_json(r: ProjRef) -> dict:
    d = {"factor": r.factor, "index": r.index}
    if r.label is not None:
        d["label"] = r.label
    return d


def _ref_from_json(d) -> ProjRef:
    return ProjRef(d["factor"], int(d["index"]), d.get("label"))


def residual_to_json(r: ResidualBlock) -> dict:
    d = {"weights": [fmt(w) for w in r.weights]}
    p = r.provenance
    if p is not None:
        d["provenance"] = {
            "atom": _ref_to_json(p.atom),
            "block": _ref_to_json(p.block),
            "diagonals": list(p.diagonals),
        }
    return d


def residual_from_json(d) -> ResidualBlock:
    p = d.get("provenance")
    prov = None
    if p is not None:
        prov = Provenance(_ref_from_json(p["atom"]), _ref_from_json(p["block"]), tuple(p["diagonals"]))
    return ResidualBlock(tuple(rat(w) for w in d["weights"]), prov)


def classification_to_json(c: Classification) -> dict:
    from .classify import connes_type

    d = c.diffuse
    if d is None:
        diffuse = None
    elif isinstance(d, ArakiWoods):
        diffuse = {"kind": "araki_woods", "generators": group_to_json(d.group), "mass": fmt(d.mass)}
    else:
        diffuse = {"kind": "free_group", "t": param_to_json(d.param), "mass": fmt(d.mass)}
    if diffuse is not None:
        diffuse["type"] = connes_type(c)
    return {
        "diffuse": diffuse,
        "residuals": [residual_to_json(r) for r in c.residuals],
        "total_mass": fmt(c.total_mass),
    }


def classification_from_json(d) -> Classification:
    df = d.get("diffuse")
    diffuse = None
    if df is not None:
        if df["kind"] == "araki_woods":
            diffuse = ArakiWoods(group_from_json(df["generators"]), rat(df["mass"]))
        elif df["kind"] == "free_group":
            diffuse = FreeGroupFactor(param_from_json(df["t"]), rat(df["mass"]))
        else:
            raise InvalidValue(f"unknown diffuse kind {df['kind']!r}")
    return Classification(diffuse, tuple(residual_from_json(r) for r in d.get("residuals", [])))


# --- traces -------------------------------------------------------------------------


def trace_to_json(trace) -> dict:
    return {
        "inputs": {"a": algebra_to_json(trace.a), "b": algebra_to_json(trace.b)},
        "order": [_ref_to_json(r) for r in trace.order],
        "steps": [
            {
                "rule": s.rule,
                "cite": s.cite,
                "corner": s.corner,
                "full_support": s.full_support,
                "result": classification_to_json(s.result),
            }
            for s in trace.steps
        ],
        "final": classification_to_json(trace.final),
    }


def trace_from_json(d):
    from .derive import DerivationStep, DerivationTrace

    steps = tuple(
        DerivationStep(s["rule"], s["cite"], s["corner"], classification_from_json(s["result"]), s["full_support"])
        for s in d["steps"]
    )
    return DerivationTrace(
        algebra_from_json(d["inputs"]["a"]),
        algebra_from_json(d["inputs"]["b"]),
        tuple(_ref_from_json(r) for r in d["order"]),
        steps,
        classification_from_json(d["final"]),
    )


# --- graphs ---------------------------------------------------------------------------


def graph_from_json(d):
    from .graphalg import Edge, WeightedGraph

    if not isinstance(d, dict):
        raise InvalidValue("graph must be a JSON object")
    verts = tuple(_need(d, "vertices", "graph"))
    edges = []
    for k, e in enumerate(_need(d, "edges", "graph")):
        w = f"edges[{k}]"
        edges.append(Edge(_need(e, "id", w), _need(e, "src", w), _need(e, "dst", w), _weight(_need(e, "mu", w)), _need(e, "op", w)))
    return WeightedGraph(verts, tuple(edges))


def graph_to_json(g) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "src": e.src, "dst": e.dst, "mu": fmt(e.mu), "op": e.op} for e in g.edges],
    }


def graph_classification_to_json(gc) -> dict:
    from .classify import connes_type
    from .graphalg import id_key

    c = gc.as_classification()
    return {
        "diffuse": {
            "kind": "araki_woods",
            "generators": group_to_json(gc.loop_group),
            "mass": fmt(gc.diffuse_mass),
            "type": connes_type(c),
        },
        "residuals": [{"weights": [fmt(m)], "vertex": v} for v, m in gc.atoms.items() if m is not None],
        "total_mass": fmt(c.total_mass),
        "trace_subgraph": sorted(gc.trace_edges, key=id_key),
        "potentials": {str(v): fmt(p) for v, p in gc.potentials.items()},
        "atoms": {str(v): (fmt(m) if m is not None else None) for v, m in gc.atoms.items()},
        "eigenvalues": {str(e): fmt(x) for e, x in gc.eigenvalues.items()},
    }


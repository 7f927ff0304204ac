"""Closed-form classification of free products ``(A, φ) * (B, ψ) ≅ T_H ⊕ C``.

H is generated by the point spectra of both states.  C collects one matrix
block for every (atom of one side, finite block of the other) pair whose
threshold ``γ = Σ_l (1 - α)/β_l`` is below 1; that block has weights
``β_k (1 - γ)``.  Everything else is the free Araki-Woods factor.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .algmodel import (
    Algebra,
    ArakiWoods,
    Classification,
    FreeGroupFactor,
    MatrixBlock,
    ProjRef,
    Provenance,
    ResidualBlock,
    Tensor,
    TypeIInfinite,
    as_algebra,
    ensure_valid,
    is_atom,
    is_tracial,
    normalized,
    point_spectrum,
    tensor_simplify,
)
from .errors import (
    BothTracial,
    DiagnosticError,
    InvalidValue,
    MassMismatch,
    NoDiffusePiece,
    NotClassifiable,
)
from .numlat import Cyclic, HigherRank, fmt


def residual_gamma(atom_mass, block_weights: Sequence[Fraction]) -> Fraction:
    a = Fraction(atom_mass)
    if not 0 < a < 1:
        raise InvalidValue(f"atom mass {fmt(a)} must lie in (0, 1)")
    return sum(((1 - a) / Fraction(w) for w in block_weights), Fraction(0))


def _refs(alg: Algebra, side: str) -> list[ProjRef]:
    return [ProjRef(side, i, s.label) for i, s in enumerate(alg.summands)]


def _pair(atom: MatrixBlock, aref: ProjRef, block: MatrixBlock, bref: ProjRef):
    g = residual_gamma(atom.weights[0], block.weights)
    if g >= 1:
        return None
    prov = Provenance(aref, bref, tuple(range(block.size)))
    return ResidualBlock(tuple(w * (1 - g) for w in block.weights), prov)


def residual_blocks(a: Algebra, b: Algebra, sides=("a", "b")) -> list[ResidualBlock]:
    """Finite-dimensional part C of ``a * b``; both inputs must have mass 1."""
    if a.mass != 1 or b.mass != 1:
        raise MassMismatch("residual_blocks expects algebras normalized to mass 1")
    ra, rb = _refs(a, sides[0]), _refs(b, sides[1])
    out = []
    # Atoms of a against every finite block of b, atoms included (each
    # atom-atom pair is visited here once).
    for s, sr in zip(a.summands, ra):
        if not is_atom(s):
            continue
        for t, tr in zip(b.summands, rb):
            if isinstance(t, MatrixBlock):
                r = _pair(s, sr, t, tr)
                if r is not None:
                    out.append(r)
    for t, tr in zip(b.summands, rb):
        if not is_atom(t):
            continue
        for s, sr in zip(a.summands, ra):
            if isinstance(s, MatrixBlock) and s.size >= 2:
                r = _pair(t, tr, s, sr)
                if r is not None:
                    out.append(r)
    seen = {}
    for r in out:
        if r.size >= 2:
            key = r.provenance.block
            if key in seen:
                raise DiagnosticError(f"two atoms survive against block {key}")
            seen[key] = r
    return out


def trivial_classification(alg: Algebra, scalar: ProjRef | None = None, side: str = "b") -> Classification:
    """``ℂ * alg``: the algebra itself, when it has the shape diffuse ⊕ finite blocks."""
    diffuse = None
    residuals = []
    for i, s in enumerate(alg.summands):
        s = tensor_simplify(s)
        ref = ProjRef(side, i, s.label)
        if isinstance(s, MatrixBlock):
            prov = None
            if scalar is not None:
                atom, block = scalar, ref
                if s.size == 1 and ref.factor < scalar.factor:
                    atom, block = ref, scalar  # atom-atom pairs: a-side first
                prov = Provenance(atom, block, tuple(range(s.size)))
            residuals.append(ResidualBlock(s.weights, prov))
        elif isinstance(s, (ArakiWoods, FreeGroupFactor)) and diffuse is None:
            diffuse = s
        else:
            raise NotClassifiable(
                f"summand {i} ({type(s).__name__}) has no representation as T_H ⊕ C"
            )
    return Classification(diffuse, tuple(residuals))


def _single_atom(alg: Algebra) -> bool:
    return len(alg.summands) == 1 and is_atom(alg.summands[0])


def check_pair(a: Algebra, b: Algebra) -> None:
    ensure_valid(a)
    ensure_valid(b)
    if a.mass != b.mass:
        raise MassMismatch(f"total masses differ: {fmt(a.mass)} vs {fmt(b.mass)}")


def free_product_classify(a: Algebra, b: Algebra) -> Classification:
    check_pair(a, b)
    scale = a.mass
    if _single_atom(a):
        return trivial_classification(b, ProjRef("a", 0, a.summands[0].label), "b")
    if _single_atom(b):
        return trivial_classification(a, ProjRef("b", 0, b.summands[0].label), "a")
    if is_tracial(a) and is_tracial(b):
        raise BothTracial("both states are traces; the tracial free product is not computed here")
    an, bn = normalized(a), normalized(b)
    group = point_spectrum(an).join(point_spectrum(bn))
    if group.trivial:
        raise DiagnosticError("non-tracial input produced a trivial point spectrum")
    residuals = residual_blocks(an, bn)
    dmass = 1 - sum((r.mass for r in residuals), Fraction(0))
    if dmass <= 0:
        raise DiagnosticError(f"diffuse mass {fmt(dmass)} is not positive")
    return Classification(ArakiWoods(group, dmass), tuple(residuals)).scaled(scale)


def connes_type(c: Classification) -> str:
    """"III_λ:p/q", "III_1" or "II_1" for the diffuse piece."""
    d = c.diffuse
    if d is None:
        raise NoDiffusePiece("classification has no diffuse piece")
    if isinstance(d, FreeGroupFactor):
        return "II_1"
    kind = d.group.kind()
    if isinstance(kind, Cyclic):
        return f"III_λ:{fmt(kind.lam)}"
    if isinstance(kind, HigherRank):
        return "III_1"
    raise DiagnosticError("Araki-Woods piece with trivial group")


def mirror(c: Classification) -> Classification:
    """Swap the roles of the two free factors in the provenance."""
    swap = {"a": "b", "b": "a"}
    res = []
    for r in c.residuals:
        p = r.provenance
        if p is None:
            res.append(r)
            continue
        atom = ProjRef(swap.get(p.atom.factor, p.atom.factor), p.atom.index, p.atom.label)
        block = ProjRef(swap.get(p.block.factor, p.block.factor), p.block.index, p.block.label)
        # Atom-atom pairs are stored with the a-side atom first.
        if r.size == 1 and atom.factor == "b" and block.factor == "a":
            atom, block = block, atom
        res.append(ResidualBlock(r.weights, Provenance(atom, block, p.diagonals)))
    return Classification(c.diffuse, tuple(res))


# --- expression folding -----------------------------------------------------


def tensor_algebras(left: Algebra, right: Algebra) -> Algebra:
    """``left ⊗ right`` for one type I summand and one diffuse factor (either order)."""
    if len(left.summands) != 1 or len(right.summands) != 1:
        raise InvalidValue("tensor operands must be single summands")
    x, y = left.summands[0], right.summands[0]
    if isinstance(y, (MatrixBlock, TypeIInfinite)) and isinstance(x, (ArakiWoods, FreeGroupFactor)):
        x, y = y, x
    if not isinstance(x, (MatrixBlock, TypeIInfinite)) or not isinstance(y, (ArakiWoods, FreeGroupFactor)):
        raise InvalidValue("tensor needs a type I factor and a free group or Araki-Woods factor")
    t = Tensor(x.scaled(1 / x.mass), y.scaled(1 / y.mass), x.mass * y.mass)
    return Algebra((tensor_simplify(t),), left.label)


def operand_algebra(v, label):
    """An evaluated operand (Algebra or Classification) as a relabeled Algebra."""
    if isinstance(v, Classification):
        return as_algebra(v, label)
    return Algebra(v.summands, label)


def evaluate(node, load=None):
    """Fold an expression tree left to right; returns an Algebra or a Classification."""
    from .expr import DirectSum, FileRef, FreeProduct, Leaf, TensorProduct

    if isinstance(node, Leaf):
        return node.algebra
    if isinstance(node, FileRef):
        if load is None:
            raise InvalidValue(f"no loader for file reference {node.path!r}")
        return load(node.path)
    if isinstance(node, TensorProduct):
        left = operand_algebra(evaluate(node.left, load), "A")
        right = operand_algebra(evaluate(node.right, load), "B")
        return tensor_algebras(left, right)
    if isinstance(node, DirectSum):
        parts = []
        for op in node.operands:
            parts.extend(operand_algebra(evaluate(op, load), "A").summands)
        return Algebra(tuple(parts), "A")
    if isinstance(node, FreeProduct):
        acc = evaluate(node.operands[0], load)
        for op in node.operands[1:]:
            rhs = evaluate(op, load)
            acc = free_product_classify(operand_algebra(acc, "A"), operand_algebra(rhs, "B"))
        return acc
    raise TypeError(f"unknown expression node {node!r}")


def simplify_product_expression(node, load=None) -> Classification:
    v = evaluate(node, load)
    if isinstance(v, Classification):
        return v
    return trivial_classification(ensure_valid(v), None, "a")


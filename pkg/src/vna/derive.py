"""Inductive recomputation of free products, one central summand at a time.

The engine starts from the free product of the two centers (abelian against
abelian), then replaces each central atom by the summand it stands for.  An
expansion cuts the current classification down to the corner under the atom,
free-multiplies that corner against the replacement with one of the base
rules below, and puts the corner back.  It never calls the closed-form
classifier except to cross-check the final answer.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

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
    is_atom,
    is_tracial,
    normalized,
    summand_spectrum,
    tensor_simplify,
)
from .classify import check_pair, free_product_classify, trivial_classification
from .errors import BothTracial, DiagnosticError, InvalidValue, NoMatchingRule, OracleMismatch
from .numlat import fmt, group_join


@dataclass(frozen=True)
class DerivationStep:
    rule: str
    cite: str
    corner: dict
    result: Classification
    full_support: bool = True


@dataclass(frozen=True)
class DerivationTrace:
    a: Algebra
    b: Algebra
    order: tuple[ProjRef, ...]
    steps: tuple[DerivationStep, ...]
    final: Classification


def _diffuse_piece(group, mass):
    if group.trivial:
        return FreeGroupFactor(Param.UNKNOWN, mass)
    return ArakiWoods(group, mass)


def center(alg: Algebra) -> Algebra:
    """The abelian algebra of central projections, one atom per summand."""
    return Algebra(tuple(MatrixBlock((s.mass,), s.label) for s in alg.summands), alg.label)


def rule_abelian_abelian(a: Algebra, b: Algebra, sides=("a", "b")) -> Classification:
    """Two finite abelian algebras: atoms of mass α+β-1 wherever that is positive."""
    for alg in (a, b):
        if not all(is_atom(s) for s in alg.summands):
            raise InvalidValue("rule_abelian_abelian needs abelian algebras")
        if len(alg.summands) < 2:
            raise InvalidValue("rule_abelian_abelian needs dimension >= 2 on both sides")
        if alg.mass != 1:
            raise InvalidValue("rule_abelian_abelian needs normalized algebras")
    residuals = []
    for i, s in enumerate(a.summands):
        for j, t in enumerate(b.summands):
            m = s.weights[0] + t.weights[0] - 1
            if m > 0:
                prov = Provenance(ProjRef(sides[0], i, s.label), ProjRef(sides[1], j, t.label), (0,))
                residuals.append(ResidualBlock((m,), prov))
    dmass = 1 - sum((r.mass for r in residuals), Fraction(0))
    return Classification(FreeGroupFactor(Param.UNKNOWN, dmass), tuple(residuals))


def _shape(mixed: Algebra):
    atoms, blocks, diffuse, typei = [], [], [], []
    for i, s in enumerate(mixed.summands):
        if is_atom(s):
            atoms.append(i)
        elif isinstance(s, MatrixBlock):
            blocks.append(i)
        elif isinstance(s, (ArakiWoods, FreeGroupFactor)):
            diffuse.append(i)
        elif isinstance(s, TypeIInfinite):
            typei.append(i)
        else:
            raise NoMatchingRule(f"no base rule takes a {type(s).__name__} on the mixed side")
    if len(diffuse) > 1:
        raise NoMatchingRule("mixed side has more than one diffuse summand")
    if typei and len(mixed.summands) > 1:
        raise NoMatchingRule("infinite type I summand on the mixed side must stand alone")
    return atoms, blocks, diffuse, typei


def _mixed_tag(atoms, blocks, diffuse, typei) -> Optional[str]:
    if typei:
        return "typeI"
    if diffuse:
        parts = [n for n, xs in (("atoms", atoms), ("blocks", blocks)) if xs] + ["diffuse"]
        return "[" + "+".join(parts) + "]" if len(parts) > 1 else "diffuse"
    if atoms and not blocks and len(atoms) >= 2:
        return "abelian"
    if blocks and not atoms and len(blocks) == 1:
        return "matrix"
    return None


def rule_matrix_vs_mixed(
    block,
    mixed: Algebra,
    block_ref: Optional[ProjRef] = None,
    atom_refs: Optional[Sequence[Optional[ProjRef]]] = None,
):
    """A type I factor of mass 1 against atoms ⊕ blocks ⊕ (at most one) diffuse summand.

    Returns ``(classification, cite)``.  Only the largest opposing atom can
    leave a residual copy of the block.
    """
    if not isinstance(block, (MatrixBlock, TypeIInfinite)) or is_atom(block):
        raise InvalidValue("rule_matrix_vs_mixed needs a matrix block of size >= 2 or B(H)")
    if block.mass != 1 or mixed.mass != 1:
        raise InvalidValue("rule_matrix_vs_mixed needs normalized inputs")
    atoms, blocks, diffuse, typei = _shape(mixed)
    tag = _mixed_tag(atoms, blocks, diffuse, typei)
    if tag is None:
        raise NoMatchingRule("mixed side shape is outside every base rule")
    head = "B(H)" if isinstance(block, TypeIInfinite) else "matrix"
    group = group_join(summand_spectrum(block), *(summand_spectrum(s) for s in mixed.summands))
    if group.trivial and tag == "matrix":
        raise NoMatchingRule("matrix * matrix with both states tracial")
    residuals = []
    if isinstance(block, MatrixBlock) and atoms:
        top = max(atoms, key=lambda i: mixed.summands[i].weights[0])
        c = mixed.summands[top].weights[0]
        if c < 1:
            gamma = sum(((1 - c) / w for w in block.weights), Fraction(0))
            if gamma < 1:
                aref = atom_refs[top] if atom_refs is not None else ProjRef("mixed", top)
                bref = block_ref or ProjRef("block", 0, block.label)
                prov = Provenance(aref, bref, tuple(range(block.size)))
                residuals.append(ResidualBlock(tuple(w * (1 - gamma) for w in block.weights), prov))
    dmass = 1 - sum((r.mass for r in residuals), Fraction(0))
    return Classification(_diffuse_piece(group, dmass), tuple(residuals)), f"{head}*{tag}"


def rule_diffuse_vs_mixed(diffuse, mixed: Algebra):
    """A diffuse factor against anything finite: no atoms survive, spectra join."""
    if not isinstance(diffuse, (ArakiWoods, FreeGroupFactor, HyperfiniteTensor, Tensor)):
        raise InvalidValue("rule_diffuse_vs_mixed needs a diffuse summand")
    group = group_join(summand_spectrum(diffuse), *(summand_spectrum(s) for s in mixed.summands))
    return Classification(_diffuse_piece(group, Fraction(1))), "free-absorption"


def _rule_for(replacement, mixed, block_ref, atom_refs):
    replacement = tensor_simplify(replacement)
    if isinstance(replacement, (MatrixBlock, TypeIInfinite)):
        c, cite = rule_matrix_vs_mixed(replacement, mixed, block_ref, atom_refs)
        return c, "matrix_vs_mixed", cite
    c, cite = rule_diffuse_vs_mixed(replacement, mixed)
    return c, "diffuse_vs_mixed", cite


def _corner_json(ref, mass, mixed):
    from .serialize import algebra_to_json

    return {"atom": str(ref), "mass": fmt(mass), "algebra": algebra_to_json(mixed)}


def expand_atom(current: Classification, ref: ProjRef, replacement, atom_mass=None):
    """Replace central atom ``ref`` of ``current`` (total mass 1) by ``replacement``.

    Returns ``(classification, step)``.
    """
    m = Fraction(atom_mass) if atom_mass is not None else replacement.mass
    if replacement.mass != m:
        raise InvalidValue(f"replacement mass {fmt(replacement.mass)} differs from atom mass {fmt(m)}")
    if current.total_mass != 1:
        raise InvalidValue("expand_atom works on classifications of total mass 1")
    under = [r for r in current.residuals if r.provenance is not None and r.provenance.touches(ref)]
    rest = [r for r in current.residuals if r not in under]
    if is_atom(replacement):
        step = DerivationStep("identity", "scalar", {"atom": str(ref), "mass": fmt(m)}, current, not rest)
        return current, step
    dmass = m - sum((r.mass for r in under), Fraction(0))
    if dmass < 0 or (dmass > 0 and current.diffuse is None):
        raise DiagnosticError(f"corner at {ref} has inconsistent diffuse mass {fmt(dmass)}")
    parts, refs = [], []
    if dmass > 0:
        parts.append(current.diffuse.scaled(1 / current.diffuse.mass * dmass / m))
        refs.append(None)
    for r in under:
        parts.append(MatrixBlock(tuple(w / m for w in r.weights)))
        p = r.provenance
        refs.append(p.atom if p.block == ref else p.block)
    mixed = Algebra(tuple(parts), "corner")
    corner, rule, cite = _rule_for(replacement.scaled(1 / m), mixed, ref, refs)
    residuals = rest + [r.scaled(m) for r in corner.residuals]
    group = corner.group.join(current.group)
    total_res = sum((r.mass for r in residuals), Fraction(0))
    result = Classification(_diffuse_piece(group, 1 - total_res), tuple(residuals))
    if result.diffuse_mass <= 0:
        raise DiagnosticError(f"diffuse mass vanished after expanding {ref}")
    step = DerivationStep(rule, cite, _corner_json(ref, m, mixed), result, not rest)
    return result, step


def _start(an: Algebra, bn: Algebra):
    ra = [ProjRef("a", i, s.label) for i, s in enumerate(an.summands)]
    rb = [ProjRef("b", i, s.label) for i, s in enumerate(bn.summands)]
    # Atoms are refined too (an identity step), so every central summand
    # of a multi-summand factor shows up in the trace.
    pend_a = list(zip(ra, an.summands))
    pend_b = list(zip(rb, bn.summands))
    if len(an.summands) == 1 and len(bn.summands) == 1:
        x, y = an.summands[0], bn.summands[0]
        if not isinstance(x, (MatrixBlock, TypeIInfinite)) and isinstance(y, (MatrixBlock, TypeIInfinite)):
            x, y, ra, rb = y, x, rb, ra
        c, rule, cite = _rule_for(x, Algebra((y,)), ra[0], rb)
        return c, DerivationStep(rule, cite, {"start": "factor*factor"}, c), []
    if len(an.summands) == 1 or len(bn.summands) == 1:
        if len(bn.summands) == 1:
            an, bn, ra, rb, pend_b = bn, an, rb, ra, pend_a
        c, rule, cite = _rule_for(an.summands[0], center(bn), ra[0], rb)
        return c, DerivationStep(rule, cite, {"start": "factor*center"}, c), pend_b
    c = rule_abelian_abelian(center(an), center(bn))
    return c, DerivationStep("abelian_abelian", "dykema-abelian", {"start": "center*center"}, c), pend_a + pend_b


def derive_free_product(
    a: Algebra,
    b: Algebra,
    order: Optional[Sequence[ProjRef]] = None,
    seed: Optional[int] = None,
    check: bool = True,
):
    """Classify ``a * b`` by successive atom expansions; returns ``(classification, trace)``.

    ``order`` fixes the expansion order (a permutation of the central
    summands still to expand); ``seed`` shuffles the default order instead.
    """
    check_pair(a, b)
    scale = a.mass
    if len(a.summands) == 1 and is_atom(a.summands[0]) or len(b.summands) == 1 and is_atom(b.summands[0]):
        if len(a.summands) == 1 and is_atom(a.summands[0]):
            final = trivial_classification(b, ProjRef("a", 0, a.summands[0].label), "b")
        else:
            final = trivial_classification(a, ProjRef("b", 0, b.summands[0].label), "a")
        step = DerivationStep("scalar", "scalar", {"start": "C*B"}, final)
        return final, DerivationTrace(a, b, (), (step,), final)
    if is_tracial(a) and is_tracial(b):
        raise BothTracial("both states are traces; the tracial free product is not computed here")
    an, bn = normalized(a), normalized(b)
    current, first, pending = _start(an, bn)
    steps = [first]
    lookup = dict(pending)
    if order is not None:
        order = tuple(order)
        if sorted(order) != sorted(lookup):
            raise InvalidValue("expansion order must list every pending summand exactly once")
    else:
        order = tuple(r for r, _ in pending)
        if seed is not None:
            order = list(order)
            random.Random(seed).shuffle(order)
            order = tuple(order)
    for ref in order:
        current, step = expand_atom(current, ref, lookup[ref])
        steps.append(step)
    final = current.scaled(scale)
    trace = DerivationTrace(a, b, order, tuple(steps), final)
    if check:
        expected = free_product_classify(a, b)
        if final != expected:
            raise OracleMismatch(
                f"derivation gives {final!r} but the closed form gives {expected!r}", trace
            )
    return final, trace


def replay(trace: DerivationTrace) -> DerivationTrace:
    """Re-run a trace from its inputs and order; raise if any step differs."""
    _, again = derive_free_product(trace.a, trace.b, order=trace.order, check=False)
    if len(again.steps) != len(trace.steps):
        raise OracleMismatch("replayed trace has a different number of steps", trace)
    for k, (x, y) in enumerate(zip(trace.steps, again.steps)):
        if x.result != y.result or x.rule != y.rule:
            raise OracleMismatch(f"replay diverges at step {k}", trace)
    if again.final != trace.final:
        raise OracleMismatch("replayed final classification differs", trace)
    return again

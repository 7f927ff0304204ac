"""Weighted von Neumann algebras as formal finite direct sums.

Every summand carries its own mass (the value of the functional on its unit),
so a direct sum is unnormalized unless its masses add up to 1.  Summands are
immutable; all operations return new values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .errors import EmptySelection, InvalidAlgebra
from .numlat import TRIVIAL, RatioGroup, fmt, group_join, ratios


class Param(enum.Enum):
    INFINITE = "inf"
    UNKNOWN = "?"

    def __str__(self) -> str:
        return "∞" if self is Param.INFINITE else "?"


FreeParam = Union[Fraction, Param]


def _fracs(xs) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in xs)


@dataclass(frozen=True)
class MatrixBlock:
    weights: tuple[Fraction, ...]
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "weights", _fracs(self.weights))

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def mass(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def scaled(self, c: Fraction) -> "MatrixBlock":
        return replace(self, weights=tuple(w * c for w in self.weights))


@dataclass(frozen=True)
class TypeIInfinite:
    """B(H) with diagonal weights ``head`` followed by ``first * ratio**m``."""

    head: tuple[Fraction, ...]
    ratio: Fraction
    first: Fraction
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "head", _fracs(self.head))
        object.__setattr__(self, "ratio", Fraction(self.ratio))
        object.__setattr__(self, "first", Fraction(self.first))

    @property
    def mass(self) -> Fraction:
        return sum(self.head, Fraction(0)) + self.first / (1 - self.ratio)

    def scaled(self, c: Fraction) -> "TypeIInfinite":
        return replace(self, head=tuple(h * c for h in self.head), first=self.first * c)

    def weights(self, n: int) -> list[Fraction]:
        out = list(self.head[:n])
        w = self.first
        while len(out) < n:
            out.append(w)
            w *= self.ratio
        return out


@dataclass(frozen=True)
class FreeGroupFactor:
    """Interpolated free group factor L(F_t); ``param`` 1 means L(Z)."""

    param: FreeParam
    mass: Fraction
    label: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.param, Param):
            object.__setattr__(self, "param", Fraction(self.param))
        object.__setattr__(self, "mass", Fraction(self.mass))

    def scaled(self, c: Fraction) -> "FreeGroupFactor":
        return replace(self, mass=self.mass * c)


@dataclass(frozen=True)
class ArakiWoods:
    group: RatioGroup
    mass: Fraction
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "mass", Fraction(self.mass))

    def scaled(self, c: Fraction) -> "ArakiWoods":
        return replace(self, mass=self.mass * c)


Multiplicity = Union[int, Param]


@dataclass(frozen=True)
class HyperfiniteTensor:
    """Infinite tensor product of (profile, multiplicity) factors, each profile a state."""

    factors: tuple[tuple[tuple[Fraction, ...], Multiplicity], ...]
    mass: Fraction
    label: Optional[str] = None

    def __post_init__(self):
        facs = tuple((_fracs(p), m) for p, m in self.factors)
        object.__setattr__(self, "factors", facs)
        object.__setattr__(self, "mass", Fraction(self.mass))

    def scaled(self, c: Fraction) -> "HyperfiniteTensor":
        return replace(self, mass=self.mass * c)


TypeIPart = Union[MatrixBlock, TypeIInfinite]
DiffusePart = Union[FreeGroupFactor, ArakiWoods]


@dataclass(frozen=True)
class Tensor:
    """(type I factor, profile of mass 1) ⊗ (diffuse factor of mass 1), total ``mass``."""

    type_i: TypeIPart
    diffuse: DiffusePart
    mass: Fraction
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "mass", Fraction(self.mass))

    def scaled(self, c: Fraction) -> "Tensor":
        return replace(self, mass=self.mass * c)


Summand = Union[MatrixBlock, TypeIInfinite, FreeGroupFactor, ArakiWoods, HyperfiniteTensor, Tensor]
DIFFUSE_KINDS = (FreeGroupFactor, ArakiWoods, HyperfiniteTensor, Tensor)


def summand_mass(s: Summand) -> Fraction:
    return s.mass


def is_atom(s: Summand) -> bool:
    return isinstance(s, MatrixBlock) and s.size == 1


@dataclass(frozen=True)
class Algebra:
    summands: tuple
    label: str = "A"

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))

    @property
    def mass(self) -> Fraction:
        return sum((s.mass for s in self.summands), Fraction(0))

    def __iter__(self):
        return iter(self.summands)

    def __len__(self) -> int:
        return len(self.summands)


# --- validation -------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def _check_weights(path, ws, out, what="weight"):
    if not ws:
        out.append(Violation(path, f"empty {what} list"))
    for k, w in enumerate(ws):
        if w <= 0:
            out.append(Violation(f"{path}[{k}]", f"non-faithful {what} {fmt(w)}"))


def _check_param(path, param, out):
    if isinstance(param, Param):
        return
    if param < 1:
        out.append(Violation(path, f"free group parameter {fmt(param)} < 1"))


def _check_typei(path, s, out):
    if isinstance(s, MatrixBlock):
        _check_weights(f"{path}.weights", s.weights, out)
    elif isinstance(s, TypeIInfinite):
        for k, h in enumerate(s.head):
            if h <= 0:
                out.append(Violation(f"{path}.head[{k}]", f"non-faithful weight {fmt(h)}"))
        if not 0 < s.ratio < 1:
            out.append(Violation(f"{path}.ratio", f"tail ratio {fmt(s.ratio)} not in (0,1)"))
        if s.first <= 0:
            out.append(Violation(f"{path}.first", f"non-faithful weight {fmt(s.first)}"))
    else:
        out.append(Violation(path, f"not a type I part: {type(s).__name__}"))


def validate_summand(s, path="summand") -> list[Violation]:
    out: list[Violation] = []
    if isinstance(s, (MatrixBlock, TypeIInfinite)):
        _check_typei(path, s, out)
        return out
    if s.mass <= 0:
        out.append(Violation(f"{path}.mass", f"non-positive mass {fmt(s.mass)}"))
    if isinstance(s, FreeGroupFactor):
        _check_param(f"{path}.t", s.param, out)
    elif isinstance(s, ArakiWoods):
        if s.group.trivial:
            out.append(Violation(f"{path}.group", "Araki-Woods factor needs a nontrivial group"))
    elif isinstance(s, HyperfiniteTensor):
        if not s.factors:
            out.append(Violation(f"{path}.factors", "no tensor factors"))
        diffuse = False
        for i, (prof, mult) in enumerate(s.factors):
            fp = f"{path}.factors[{i}]"
            _check_weights(f"{fp}.profile", prof, out)
            if prof and sum(prof) != 1:
                out.append(Violation(f"{fp}.profile", "profile must sum to 1"))
            if isinstance(mult, Param):
                if mult is not Param.INFINITE:
                    out.append(Violation(f"{fp}.multiplicity", "multiplicity must be finite or inf"))
                elif len(prof) >= 2:
                    diffuse = True
            elif not isinstance(mult, int) or mult < 1:
                out.append(Violation(f"{fp}.multiplicity", f"bad multiplicity {mult!r}"))
        if not diffuse:
            out.append(Violation(path, "hyperfinite tensor is not diffuse (needs an infinite factor of size >= 2)"))
    elif isinstance(s, Tensor):
        _check_typei(f"{path}.type_i", s.type_i, out)
        if not out and s.type_i.mass != 1:
            out.append(Violation(f"{path}.type_i", "type I profile must have mass 1"))
        d = s.diffuse
        if isinstance(d, FreeGroupFactor):
            _check_param(f"{path}.diffuse.t", d.param, out)
        elif isinstance(d, ArakiWoods):
            if d.group.trivial:
                out.append(Violation(f"{path}.diffuse.group", "Araki-Woods factor needs a nontrivial group"))
        else:
            out.append(Violation(f"{path}.diffuse", "diffuse part must be free_group or araki_woods"))
        if isinstance(d, (FreeGroupFactor, ArakiWoods)) and d.mass != 1:
            out.append(Violation(f"{path}.diffuse.mass", "diffuse part of a tensor must have mass 1"))
    else:
        out.append(Violation(path, f"unknown summand kind {type(s).__name__}"))
    return out


def validate(a: Algebra) -> list[Violation]:
    """Every invariant violation in ``a``; an empty list means valid."""
    if not a.summands:
        return [Violation("summands", "an algebra needs at least one summand")]
    out = []
    for i, s in enumerate(a.summands):
        out.extend(validate_summand(s, f"summands[{i}]"))
    return out


def ensure_valid(a: Algebra) -> Algebra:
    bad = validate(a)
    if bad:
        raise InvalidAlgebra(bad)
    return a


def rescale(a: Algebra, c) -> Algebra:
    c = Fraction(c)
    return replace(a, summands=tuple(s.scaled(c) for s in a.summands))


def normalized(a: Algebra) -> Algebra:
    return rescale(a, 1 / a.mass)


# --- spectrum and traciality ------------------------------------------------


def _typei_ratios(s: TypeIPart) -> list[Fraction]:
    if isinstance(s, MatrixBlock):
        return ratios(s.weights)
    return [h / s.first for h in s.head] + [s.ratio]


def summand_spectrum(s: Summand) -> RatioGroup:
    if isinstance(s, (MatrixBlock, TypeIInfinite)):
        return RatioGroup.generate(_typei_ratios(s))
    if isinstance(s, FreeGroupFactor):
        return TRIVIAL
    if isinstance(s, ArakiWoods):
        return s.group
    if isinstance(s, HyperfiniteTensor):
        return RatioGroup.generate(r for prof, _ in s.factors for r in ratios(prof))
    if isinstance(s, Tensor):
        return summand_spectrum(s.type_i).join(summand_spectrum(s.diffuse))
    raise TypeError(f"unknown summand {s!r}")


def point_spectrum(a: Algebra) -> RatioGroup:
    """Group generated by the modular point spectrum of the state on ``a``."""
    return group_join(*(summand_spectrum(s) for s in a.summands))


def _uniform(ws) -> bool:
    return all(w == ws[0] for w in ws)


def summand_tracial(s: Summand) -> bool:
    if isinstance(s, MatrixBlock):
        return _uniform(s.weights)
    if isinstance(s, (TypeIInfinite, ArakiWoods)):
        return False
    if isinstance(s, FreeGroupFactor):
        return True
    if isinstance(s, HyperfiniteTensor):
        return all(_uniform(p) for p, _ in s.factors)
    if isinstance(s, Tensor):
        return summand_tracial(s.type_i) and summand_tracial(s.diffuse)
    raise TypeError(f"unknown summand {s!r}")


def is_tracial(a: Algebra) -> bool:
    return all(summand_tracial(s) for s in a.summands)


# --- tensor absorption ------------------------------------------------------


def tensor_simplify(s: Summand) -> Summand:
    """Absorb the type I leg of a Tensor summand where an identity allows it.

    T_G ⊗ (B(H), φ) collapses to T_G when every weight ratio of φ lies in G;
    M_n(tracial) ⊗ L(F_t) collapses to L(F_{1 + n²(t-1)}).  Anything else is
    returned unchanged.
    """
    if not isinstance(s, Tensor):
        return s
    d, ti = s.diffuse, s.type_i
    if isinstance(d, ArakiWoods):
        if all(r in d.group for r in _typei_ratios(ti)):
            return ArakiWoods(d.group, s.mass, s.label)
        return s
    if isinstance(d, FreeGroupFactor) and isinstance(ti, MatrixBlock) and _uniform(ti.weights):
        n = ti.size
        if n == 1:
            return FreeGroupFactor(d.param, s.mass, s.label)
        if d.param is Param.UNKNOWN or d.param is Param.INFINITE:
            return FreeGroupFactor(d.param, s.mass, s.label)
        if d.param > 1:
            return FreeGroupFactor(1 + n * n * (d.param - 1), s.mass, s.label)
    return s


# --- classifications ----------------------------------------------------------


@dataclass(frozen=True, order=True)
class ProjRef:
    """A central projection of an input factor: side ("a"/"b") and summand index."""

    factor: str
    index: int
    label: Optional[str] = field(default=None, compare=False)

    def __str__(self) -> str:
        return self.label or f"{self.factor}{self.index}"


@dataclass(frozen=True)
class Provenance:
    """Residual diagonal k sits under ``atom`` ∧ (diagonal ``diagonals[k]`` of ``block``)."""

    atom: ProjRef
    block: ProjRef
    diagonals: tuple[int, ...]

    def pairs(self):
        return [(self.atom, (self.block, k)) for k in self.diagonals]

    def touches(self, ref: ProjRef) -> bool:
        return ref == self.atom or ref == self.block


@dataclass(frozen=True)
class ResidualBlock:
    weights: tuple[Fraction, ...]
    provenance: Optional[Provenance] = None

    def __post_init__(self):
        object.__setattr__(self, "weights", _fracs(self.weights))

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def mass(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def scaled(self, c) -> "ResidualBlock":
        return replace(self, weights=tuple(w * c for w in self.weights))

    def sort_key(self):
        p = self.provenance
        if p is None:
            return ((), (), (), self.weights)
        return ((p.atom.factor, p.atom.index), (p.block.factor, p.block.index), p.diagonals, self.weights)


DiffusePiece = Union[ArakiWoods, FreeGroupFactor]


@dataclass(frozen=True)
class Classification:
    """Isomorphism class ``diffuse ⊕ residuals`` with residuals in canonical order."""

    diffuse: Optional[DiffusePiece]
    residuals: tuple[ResidualBlock, ...] = ()

    def __post_init__(self):
        res = tuple(sorted(self.residuals, key=ResidualBlock.sort_key))
        object.__setattr__(self, "residuals", res)

    @property
    def diffuse_mass(self) -> Fraction:
        return self.diffuse.mass if self.diffuse is not None else Fraction(0)

    @property
    def residual_mass(self) -> Fraction:
        return sum((r.mass for r in self.residuals), Fraction(0))

    @property
    def total_mass(self) -> Fraction:
        return self.diffuse_mass + self.residual_mass

    @property
    def group(self) -> RatioGroup:
        if isinstance(self.diffuse, ArakiWoods):
            return self.diffuse.group
        return TRIVIAL

    def scaled(self, c) -> "Classification":
        c = Fraction(c)
        d = self.diffuse.scaled(c) if self.diffuse is not None else None
        return Classification(d, tuple(r.scaled(c) for r in self.residuals))


def as_algebra(c: Classification, label: str = "A") -> Algebra:
    """Re-enter a classification as an algebra: diffuse summand then residual blocks."""
    parts: list = []
    if c.diffuse is not None:
        parts.append(c.diffuse)
    for r in c.residuals:
        parts.append(MatrixBlock(r.weights, str(r.provenance.block) if r.provenance else None))
    return Algebra(tuple(parts), label)


@dataclass(frozen=True)
class Selector:
    """Which part of a classification to keep when compressing.

    ``diffuse_mass`` None keeps the full diffuse piece, 0 drops it.
    ``diagonals`` maps residual index -> kept diagonal positions; None keeps
    every residual diagonal, a missing index drops that residual.
    """

    diffuse_mass: Optional[Fraction] = None
    diagonals: Optional[Mapping[int, Sequence[int]]] = None
    renormalize: bool = False


def compress(c: Classification, sel: Selector) -> Classification:
    """Corner of ``c`` at a projection of the centralizer described by ``sel``."""
    diffuse = c.diffuse
    if sel.diffuse_mass is not None and diffuse is not None:
        m = Fraction(sel.diffuse_mass)
        if m < 0 or m > diffuse.mass:
            raise EmptySelection(f"diffuse sub-mass {fmt(m)} outside (0, {fmt(diffuse.mass)}]")
        if m == 0:
            diffuse = None
        elif m != diffuse.mass:
            if isinstance(diffuse, FreeGroupFactor):
                diffuse = FreeGroupFactor(Param.UNKNOWN, m, diffuse.label)
            else:
                diffuse = replace(diffuse, mass=m)
    residuals = []
    for i, r in enumerate(c.residuals):
        if sel.diagonals is None:
            residuals.append(r)
            continue
        keep = sorted(set(sel.diagonals.get(i, ())))
        if not keep:
            continue
        if keep[0] < 0 or keep[-1] >= r.size:
            raise EmptySelection(f"residual {i} has no diagonal {keep[-1]}")
        prov = r.provenance
        if prov is not None:
            prov = replace(prov, diagonals=tuple(prov.diagonals[k] for k in keep))
        residuals.append(ResidualBlock(tuple(r.weights[k] for k in keep), prov))
    out = Classification(diffuse, tuple(residuals))
    if out.total_mass == 0:
        raise EmptySelection("selection is empty")
    if sel.renormalize:
        out = out.scaled(1 / out.total_mass)
    return out


def compose_selectors(c: Classification, first: Selector, second: Selector) -> Selector:
    """Single selector equivalent to compressing by ``first`` then ``second`` (no renormalization)."""
    if first.renormalize or second.renormalize:
        raise ValueError("only unnormalized selectors compose")
    dm = second.diffuse_mass if second.diffuse_mass is not None else first.diffuse_mass
    if first.diffuse_mass is not None and Fraction(first.diffuse_mass) == 0:
        dm = Fraction(0)
    # Residual indices of the intermediate result, in order.
    kept: list[tuple[int, list[int]]] = []
    for i, r in enumerate(c.residuals):
        ks = list(range(r.size)) if first.diagonals is None else sorted(set(first.diagonals.get(i, ())))
        if ks:
            kept.append((i, ks))
    if second.diagonals is None:
        diag = None if first.diagonals is None else {i: ks for i, ks in kept}
    else:
        diag = {}
        for j, (i, ks) in enumerate(kept):
            sub = sorted(set(second.diagonals.get(j, ())))
            if sub:
                diag[i] = [ks[k] for k in sub]
    return Selector(dm, diag)

"""Exact positive rationals and finitely generated subgroups of Q+.

A subgroup of the positive rationals is stored as an integer lattice: each
generator becomes its vector of prime exponents, and the lattice is kept in
row Hermite normal form over the ascending list of primes that occur.  Two
groups are equal exactly when their (primes, basis) pairs are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from sympy import factorint

from .errors import InvalidValue

RatLike = Union[Fraction, int, str]


def posrat(value: RatLike) -> Fraction:
    """Coerce ``value`` to a strictly positive Fraction.

    Strings are parsed exactly ("3/5", "7"); floats are refused.
    """
    if isinstance(value, float):
        raise InvalidValue(f"floating point value {value!r} is not an exact rational")
    if isinstance(value, str):
        text = value.strip()
        try:
            q = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidValue(f"not a rational: {value!r}") from exc
        if "." in text or "e" in text.lower():
            raise InvalidValue(f"rationals must be written p/q, got {value!r}")
    else:
        q = Fraction(value)
    if q <= 0:
        raise InvalidValue(f"expected a positive rational, got {fmt(q)}")
    return q


def fmt(q: Fraction | int) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@lru_cache(maxsize=65536)
def _factor_int(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(factorint(n).items()))


def factor(q: RatLike) -> dict[int, int]:
    """Prime exponents of ``q``: positive for the numerator, negative for the denominator."""
    q = posrat(q)
    exps = dict(_factor_int(q.numerator)) if q.numerator > 1 else {}
    if q.denominator > 1:
        for p, e in _factor_int(q.denominator):
            exps[p] = -e
    return exps


def _valuations(q: Fraction, primes: Sequence[int]) -> list[int] | None:
    """Exponents of ``q`` over ``primes``, or None if another prime divides it.

    Only divides by the given primes, so membership never factors large values.
    """
    num, den = q.numerator, q.denominator
    vec = []
    for p in primes:
        e = 0
        while num % p == 0:
            num //= p
            e += 1
        while den % p == 0:
            den //= p
            e -= 1
        vec.append(e)
    return vec if num == den == 1 else None


def unfactor(exps: dict[int, int]) -> Fraction:
    out = Fraction(1)
    for p, e in exps.items():
        out *= Fraction(p) ** e
    return out


def hermite_rows(rows: Iterable[Sequence[int]], ncols: int) -> list[list[int]]:
    """Row Hermite normal form of the lattice spanned by ``rows``.

    Pivots move strictly right going down, are positive, and entries above a
    pivot lie in ``[0, pivot)``.  Zero rows are dropped.
    """
    mat = [list(r) for r in rows if any(r)]
    m = len(mat)
    top = 0
    for col in range(ncols):
        if top == m:
            break
        # Euclid down the column until a single nonzero entry remains.
        while True:
            live = [i for i in range(top, m) if mat[i][col]]
            if not live:
                break
            piv = min(live, key=lambda i: abs(mat[i][col]))
            mat[top], mat[piv] = mat[piv], mat[top]
            prow = mat[top]
            clean = True
            for i in range(top + 1, m):
                x = mat[i][col]
                if x:
                    k = x // prow[col]
                    row = mat[i]
                    for j in range(col, ncols):
                        row[j] -= k * prow[j]
                    if row[col]:
                        clean = False
            if clean:
                break
        if not mat[top][col]:
            continue
        prow = mat[top]
        if prow[col] < 0:
            prow[:] = [-x for x in prow]
        d = prow[col]
        for i in range(top):
            k = mat[i][col] // d
            if k:
                row = mat[i]
                for j in range(col, ncols):
                    row[j] -= k * prow[j]
        top += 1
    return mat[:top]


@dataclass(frozen=True)
class Trivial:
    pass


@dataclass(frozen=True)
class Cyclic:
    lam: Fraction


@dataclass(frozen=True)
class HigherRank:
    rank: int


@dataclass(frozen=True)
class RatioGroup:
    """Finitely generated subgroup of Q+ in canonical lattice form."""

    primes: tuple[int, ...] = ()
    basis: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def generate(cls, gens: Iterable[RatLike]) -> "RatioGroup":
        vecs = [factor(g) for g in gens]
        vecs = [v for v in vecs if v]
        primes = tuple(sorted({p for v in vecs for p in v}))
        rows = [[v.get(p, 0) for p in primes] for v in vecs]
        return cls._from_rows(primes, rows)

    @classmethod
    def _from_rows(cls, primes, rows) -> "RatioGroup":
        basis = hermite_rows(rows, len(primes))
        return cls(tuple(primes), tuple(tuple(r) for r in basis))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def trivial(self) -> bool:
        return not self.basis

    def join(self, other: "RatioGroup") -> "RatioGroup":
        if other.trivial or other == self:
            return self
        if self.trivial:
            return other
        primes = tuple(sorted(set(self.primes) | set(other.primes)))
        rows = [_embed(self.primes, r, primes) for r in self.basis]
        rows += [_embed(other.primes, r, primes) for r in other.basis]
        return RatioGroup._from_rows(primes, rows)

    def __contains__(self, q: RatLike) -> bool:
        vec = _valuations(posrat(q), self.primes)
        if vec is None:
            return False
        for row in self.basis:
            col = next(j for j, x in enumerate(row) if x)
            if vec[col] % row[col]:
                return False
            k = vec[col] // row[col]
            if k:
                vec = [a - k * b for a, b in zip(vec, row)]
        return not any(vec)

    def member(self, q: RatLike) -> bool:
        return q in self

    def kind(self) -> Trivial | Cyclic | HigherRank:
        if self.rank == 0:
            return Trivial()
        if self.rank == 1:
            return Cyclic(self.generators()[0])
        return HigherRank(self.rank)

    def generators(self) -> list[Fraction]:
        """Basis generators, each inverted into (0, 1), sorted ascending."""
        out = []
        for row in self.basis:
            q = unfactor(dict(zip(self.primes, row)))
            out.append(q if q < 1 else 1 / q)
        return sorted(out)

    def __str__(self) -> str:
        if self.trivial:
            return "⟨1⟩"
        return "⟨" + ",".join(fmt(g) for g in self.generators()) + "⟩"


TRIVIAL = RatioGroup()


def _embed(src: tuple[int, ...], row: Sequence[int], dst: tuple[int, ...]) -> list[int]:
    pos = dict(zip(src, row))
    return [pos.get(p, 0) for p in dst]


def group_generate(gens: Iterable[RatLike]) -> RatioGroup:
    return RatioGroup.generate(gens)


def group_join(*groups: RatioGroup) -> RatioGroup:
    out = TRIVIAL
    for g in groups:
        out = out.join(g)
    return out


def group_member(q: RatLike, group: RatioGroup) -> bool:
    return q in group


def group_kind(group: RatioGroup) -> Trivial | Cyclic | HigherRank:
    return group.kind()


def ratios(weights: Sequence[Fraction]) -> list[Fraction]:
    """Ratios of every weight to the first; they generate all pairwise ratios."""
    if not weights:
        return []
    w0 = weights[0]
    return [w / w0 for w in weights[1:]]

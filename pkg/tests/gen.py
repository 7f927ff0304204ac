"""Random finite-dimensional algebras for the property and acceptance suites."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from vna.algmodel import Algebra, MatrixBlock


def _split(rng_choice, total, parts):
    """Composition of ``total`` into ``parts`` positive integers."""
    cuts = sorted(rng_choice(range(1, total), parts - 1))
    edges = [0, *cuts, total]
    return [edges[i + 1] - edges[i] for i in range(parts)]


def random_weights(rng: random.Random, max_summands=3, max_block=3, max_den=60):
    sizes = [rng.randint(1, max_block) for _ in range(rng.randint(1, max_summands))]
    n = sum(sizes)
    den = rng.randint(max(n, 2), max_den)
    parts = _split(rng.sample, den, n)
    out, k = [], 0
    for s in sizes:
        out.append([Fraction(p, den) for p in parts[k : k + s]])
        k += s
    return out


def to_algebra(weights, label="A") -> Algebra:
    return Algebra(tuple(MatrixBlock(tuple(w)) for w in weights), label)


def is_tracial_weights(ws) -> bool:
    return all(len(set(b)) == 1 for b in ws)


def random_pair(rng: random.Random, **kw):
    """A pair of algebras (as weight lists), at least one of them non-tracial."""
    while True:
        a, b = random_weights(rng, **kw), random_weights(rng, **kw)
        if not (is_tracial_weights(a) and is_tracial_weights(b)):
            return a, b


@st.composite
def fd_weights(draw, max_summands=3, max_block=3, max_den=60):
    sizes = draw(st.lists(st.integers(1, max_block), min_size=1, max_size=max_summands))
    n = sum(sizes)
    den = draw(st.integers(max(n, 2), max_den))
    cuts = draw(st.lists(st.integers(1, den - 1), min_size=n - 1, max_size=n - 1, unique=True)) if n > 1 else []
    edges = [0, *sorted(cuts), den]
    parts = [edges[i + 1] - edges[i] for i in range(n)]
    out, k = [], 0
    for s in sizes:
        out.append([Fraction(p, den) for p in parts[k : k + s]])
        k += s
    return out


@st.composite
def fd_pairs(draw, **kw):
    a = draw(fd_weights(**kw))
    b = draw(fd_weights(**kw))
    if is_tracial_weights(a) and is_tracial_weights(b):
        # Perturb b into a non-tracial 2x2 block with the same total.
        b = [[Fraction(2, 3), Fraction(1, 3)]]
    return a, b


positive_rationals = st.builds(Fraction, st.integers(1, 10**6), st.integers(1, 10**6))

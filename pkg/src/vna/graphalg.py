"""Classification data of free graph von Neumann algebras M(Γ, μ).

A connected finite graph with an edge involution ``op`` and a weighting μ with
μ(e)μ(e^op) = 1.  A spanning tree fixes the vertex potentials φ(p_v); the
edges whose weight matches the potential ratio form the trace subgraph, and
the remaining edges generate the loop group H.  Vertices whose outgoing
weights sum to less than 1 carry an atom.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Optional

from .algmodel import ArakiWoods, Classification, ResidualBlock
from .errors import InvalidGraph, InvalidValue, TrivialLoopGroup
from .numlat import RatioGroup, fmt


@dataclass(frozen=True)
class Edge:
    id: Hashable
    src: Hashable
    dst: Hashable
    mu: Fraction
    op: Hashable


@dataclass(frozen=True)
class WeightedGraph:
    vertices: tuple
    edges: tuple[Edge, ...]

    def edge(self, eid) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise InvalidValue(f"unknown edge {eid!r}")

    def out_edges(self, v) -> list[Edge]:
        return [e for e in self.edges if e.src == v]


def id_key(x):
    """Sort key putting integer ids before strings, each in natural order."""
    if isinstance(x, str):
        return (1, 0, x)
    return (0, x, "")


def validate_graph(g: WeightedGraph) -> list[str]:
    out = []
    verts = set(g.vertices)
    if not verts:
        return ["graph has no vertices"]
    if len(verts) != len(g.vertices):
        out.append("duplicate vertex labels")
    by_id = {}
    for e in g.edges:
        if e.id in by_id:
            out.append(f"duplicate edge id {e.id!r}")
        by_id[e.id] = e
        for end in (e.src, e.dst):
            if end not in verts:
                out.append(f"edge {e.id!r}: unknown vertex {end!r}")
        if e.mu <= 0:
            out.append(f"edge {e.id!r}: weight {fmt(e.mu)} is not positive")
    for e in g.edges:
        f = by_id.get(e.op)
        if f is None:
            out.append(f"edge {e.id!r}: opposite edge {e.op!r} missing")
            continue
        if f.op != e.id:
            out.append(f"edge {e.id!r}: op is not an involution")
        if f.src != e.dst or f.dst != e.src:
            out.append(f"edge {e.id!r}: opposite edge does not reverse it")
        if e.mu > 0 and f.mu > 0 and e.mu * f.mu != 1:
            out.append(f"edge {e.id!r}: μ(e)μ(e^op) = {fmt(e.mu * f.mu)} ≠ 1")
    # Connectivity of the underlying undirected graph.
    adj = {v: set() for v in verts}
    for e in g.edges:
        if e.src in adj and e.dst in adj:
            adj[e.src].add(e.dst)
            adj[e.dst].add(e.src)
    start = g.vertices[0]
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for w in adj[v] - seen:
            seen.add(w)
            todo.append(w)
    if seen != verts:
        out.append("graph is not connected")
    return out


def ensure_graph(g: WeightedGraph) -> WeightedGraph:
    bad = validate_graph(g)
    if bad:
        raise InvalidGraph(bad)
    return g


def default_root(g: WeightedGraph):
    return min(g.vertices, key=id_key)


def trace_subgraph(
    g: WeightedGraph,
    root=None,
    root_mass=Fraction(1),
    edge_key: Optional[Callable[[Edge], object]] = None,
):
    """Spanning-tree potentials and the trace subgraph Γ_Tr.

    The tree is grown breadth first, taking outgoing edges in ``edge_key``
    order (lowest id by default).  Returns ``(edge ids of Γ_Tr, potentials)``.
    """
    ensure_graph(g)
    root = default_root(g) if root is None else root
    if root not in g.vertices:
        raise InvalidValue(f"unknown root vertex {root!r}")
    root_mass = Fraction(root_mass)
    if root_mass <= 0:
        raise InvalidValue("root mass must be positive")
    key = edge_key or (lambda e: id_key(e.id))
    pot = {root: root_mass}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for e in sorted(g.out_edges(v), key=key):
            if e.dst not in pot:
                pot[e.dst] = pot[v] * e.mu
                queue.append(e.dst)
    potentials = {v: pot[v] for v in g.vertices}
    tr = frozenset(e.id for e in g.edges if e.mu == pot[e.dst] / pot[e.src])
    return tr, potentials


def edge_eigenvalue(g: WeightedGraph, potentials, eid) -> Fraction:
    e = g.edge(eid)
    return e.mu * potentials[e.src] / potentials[e.dst]


def loop_group(g: WeightedGraph, potentials) -> RatioGroup:
    # Every edge eigenvalue is a loop weight (tree path + edge + tree path back);
    # tree edges contribute 1, so this is a cycle-basis generating set.
    return RatioGroup.generate(edge_eigenvalue(g, potentials, e.id) for e in g.edges)


@dataclass(frozen=True)
class GraphClassification:
    trace_edges: frozenset
    potentials: dict
    loop_group: RatioGroup
    atoms: dict
    diffuse_mass: Fraction
    eigenvalues: dict

    def as_classification(self) -> Classification:
        res = [ResidualBlock((m,)) for m in self.atoms.values() if m is not None]
        return Classification(ArakiWoods(self.loop_group, self.diffuse_mass), tuple(res))


def classify_graph(g: WeightedGraph, root=None, root_mass=Fraction(1), edge_key=None) -> GraphClassification:
    tr, pot = trace_subgraph(g, root, root_mass, edge_key)
    group = loop_group(g, pot)
    if group.trivial:
        raise TrivialLoopGroup("every loop has weight 1; the tracial graph algebra is not classified here")
    atoms = {}
    for v in g.vertices:
        out = sum((e.mu for e in g.out_edges(v)), Fraction(0))
        atoms[v] = pot[v] * (1 - out) if out < 1 else None
    total = sum(pot.values(), Fraction(0))
    dmass = total - sum((m for m in atoms.values() if m is not None), Fraction(0))
    eig = {e.id: edge_eigenvalue(g, pot, e.id) for e in g.edges}
    return GraphClassification(tr, pot, group, atoms, dmass, eig)

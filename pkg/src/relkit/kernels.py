"""The kernel problem: is r = s;s^ for some s on the same base, and clique covers."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import relcore
from .relcore import Relation, _bits


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset  # pairs (u, v) with u < v
    loops: frozenset = frozenset()

    def __post_init__(self):
        edges = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError("edges join distinct vertices; use loops for (v, v)")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            edges.add((min(u, v), max(u, v)))
        for v in self.loops:
            if not 0 <= v < self.n:
                raise ValueError(f"loop at {v} outside 0..{self.n - 1}")
        object.__setattr__(self, "edges", frozenset(edges))
        object.__setattr__(self, "loops", frozenset(self.loops))

    @classmethod
    def of(cls, n, edges=(), loops=()) -> "Graph":
        return cls(n, frozenset(map(tuple, edges)), frozenset(loops))

    @classmethod
    def from_relation(cls, r: Relation) -> "Graph":
        """Edges are the off-diagonal pairs (in either direction), loops the diagonal ones."""
        edges = {(min(x, y), max(x, y)) for x, y in r.pairs() if x != y}
        return cls(r.n, frozenset(edges), frozenset(x for x, y in r.pairs() if x == y))

    def adjacency(self) -> list:
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    def non_isolated(self) -> set:
        return {v for e in self.edges for v in e}

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)], "loops": sorted(self.loops)}

    @classmethod
    def from_json(cls, data) -> "Graph":
        return cls.of(int(data["n"]), data.get("edges", []), data.get("loops", []))


# cliques and covers ----------------------------------------------------------------------------

def maximal_cliques(adj: list, within: int) -> list:
    """Maximal cliques (as bitmasks) of the graph induced on ``within``; pivoted Bron-Kerbosch."""
    out = []

    def expand(r, p, x):
        if not p and not x:
            out.append(r)
            return
        pivot = max(_bits(p | x), key=lambda u: bin(adj[u] & p).count("1"))
        for v in _bits(p & ~adj[pivot]):
            expand(r | 1 << v, p & adj[v], x & adj[v])
            p &= ~(1 << v)
            x |= 1 << v

    if within:
        expand(0, within, 0)
    return sorted(out)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def min_set_cover(elements: list, sets: list):
    """Exact minimum cover of ``elements`` (vertex masks) by ``sets`` (clique masks).

    An element is covered by a set containing all of its vertices.  Branch and
    bound: branch on the uncovered element with fewest covering sets, bound by
    a greedy family of pairwise incompatible uncovered elements.
    Returns the chosen sets, or None if some element cannot be covered.
    """
    covers = [[s for s in sets if e & s == e] for e in elements]
    if any(not c for c in covers):
        return None
    m = len(elements)
    joint = lambda a, b: any((elements[a] | elements[b]) & s == (elements[a] | elements[b]) for s in covers[a])
    compatible = [[joint(a, b) for b in range(m)] for a in range(m)]
    best = [None]

    def lower_bound(uncovered):
        chosen = []
        for e in sorted(uncovered, key=lambda e: len(covers[e])):
            if all(not compatible[e][c] for c in chosen):
                chosen.append(e)
        return len(chosen)

    def search(uncovered, picked):
        if not uncovered:
            if best[0] is None or len(picked) < len(best[0]):
                best[0] = list(picked)
            return
        if best[0] is not None and len(picked) + lower_bound(uncovered) >= len(best[0]):
            return
        e = min(uncovered, key=lambda e: len(covers[e]))
        for s in sorted(covers[e], key=lambda s: -sum(1 for u in uncovered if elements[u] & s == elements[u])):
            rest = [u for u in uncovered if elements[u] & s != elements[u]]
            picked.append(s)
            search(rest, picked)
            picked.pop()

    search(list(range(m)), [])
    return best[0]


@dataclass
class CliqueCover:
    cliques: list  # sorted vertex lists

    @property
    def size(self) -> int:
        return len(self.cliques)

    def is_valid_for(self, g: Graph) -> bool:
        adj = g.adjacency()
        for c in self.cliques:
            for u in c:
                for v in c:
                    if u != v and not adj[u] >> v & 1:
                        return False
        covered = {(u, v) for c in self.cliques for u in c for v in c if u < v}
        return g.edges <= covered


def _masks_to_lists(masks) -> list:
    return sorted((sorted(_bits(m)) for m in masks), key=lambda c: (c[0] if c else -1, c))


def min_clique_edge_cover(g: Graph) -> tuple:
    """Exact minimum number of cliques covering every edge; loops are ignored."""
    if not g.edges:
        return 0, CliqueCover([])
    adj = g.adjacency()
    within = sum(1 << v for v in g.non_isolated())
    cliques = maximal_cliques(adj, within)
    elements = [1 << u | 1 << v for u, v in sorted(g.edges)]
    chosen = min_set_cover(elements, cliques)
    return len(chosen), CliqueCover(_masks_to_lists(chosen))


def _domain_cover(r: Relation):
    """Minimum cover of r's edges and loop vertices by cliques of its loop graph."""
    g = Graph.from_relation(r)
    loops = sum(1 << v for v in g.loops)
    adj = g.adjacency()
    cliques = maximal_cliques(adj, loops)
    elements = [1 << u | 1 << v for u, v in sorted(g.edges)] + [1 << v for v in sorted(g.loops)]
    return min_set_cover(elements, cliques) if elements else []


# kernel decisions ---------------------------------------------------------------------------------

@dataclass
class KernelDecision:
    answer: bool
    witness: Relation | None = None
    cliques: list = field(default_factory=list)
    reason: str = ""

    @property
    def verdict(self) -> str:
        return "yes" if self.answer else "no"

    def __bool__(self):
        return self.answer

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "reason": self.reason}
        if self.witness is not None:
            out["witness"] = [list(p) for p in sorted(self.witness.pairs())]
            out["cliques"] = [list(c) for c in self.cliques]
        return out


def witness_from_cover(n: int, cliques: list) -> Relation:
    """Column y of s is the y-th clique (cliques sorted by smallest vertex)."""
    ordered = _masks_to_lists(cliques) if cliques and isinstance(cliques[0], int) else sorted(cliques)
    if len(ordered) > n:
        raise ValueError("more cliques than base points")
    return Relation.from_pairs(n, ((x, y) for y, c in enumerate(ordered) for x in c))


def is_kernel(r: Relation) -> KernelDecision:
    """Decide whether r = K_L(s) for some s on r's base.

    K_L(s) is the union of C_y x C_y over the columns C_y of s, so r is a
    kernel iff it is symmetric, locally reflexive, and its edges together with
    its loop vertices are covered by at most n cliques of its loop graph.
    """
    n = r.n
    if not relcore.is_symmetric(r):
        return KernelDecision(False, reason="not symmetric")
    if not relcore.is_locally_reflexive(r):
        return KernelDecision(False, reason="not locally reflexive")
    cover = _domain_cover(r)
    if len(cover) > n:
        return KernelDecision(False, reason=f"needs {len(cover)} cliques, base has {n} points")
    cliques = _masks_to_lists(cover)
    s = witness_from_cover(n, cliques)
    if relcore.kernel_left(s) != r:
        raise AssertionError("constructed witness does not reproduce r")
    return KernelDecision(True, s, cliques, f"covered by {len(cliques)} cliques")


def is_cokernel(r: Relation) -> KernelDecision:
    """K_R(s) = K_L(s^), so the witness is the converse of a kernel witness."""
    d = is_kernel(r)
    if d.answer:
        d.witness = relcore.converse(d.witness)
    return d


def kernel_witness_check(r: Relation, s: Relation) -> bool:
    return relcore.kernel_left(s) == r


def lemma_condition_check(r: Relation) -> dict:
    """The edge-only cover condition (edges covered by at most n cliques) next to the exact decision."""
    sym = relcore.is_symmetric(r)
    lr = relcore.is_locally_reflexive(r)
    edge_size, _ = min_clique_edge_cover(Graph.from_relation(r))
    dom_cover = _domain_cover(r) if sym and lr else None
    decision = is_kernel(r)
    return {
        "symmetric": sym,
        "locally_reflexive": lr,
        "edge_cover_size": edge_size,
        "domain_cover_size": len(dom_cover) if dom_cover is not None else None,
        "edge_condition_met": bool(sym and lr and edge_size <= r.n),
        "is_kernel_result": decision.verdict,
    }


# CEC reduction ----------------------------------------------------------------------------------

def cec_reduce(g: Graph, k: int) -> Relation:
    """Kernel instance that is a yes-instance iff g's edges have a k-clique cover.

    Original edges appear in both directions with loops at every non-isolated
    original vertex.  For k >= |V| a loop-complete clique on k - |V| + 1 new
    vertices is appended, otherwise K_{2,|V|-k+2} with loops everywhere.
    """
    if not 1 <= k <= len(g.edges):
        raise ValueError(f"k must lie in 1..{len(g.edges)}")
    v = g.n
    pairs = set()
    for a, b in g.edges:
        pairs |= {(a, b), (b, a)}
    pairs |= {(a, a) for a in g.non_isolated()}
    if k >= v:
        size = k + 1
        new = range(v, size)
        pairs |= {(a, b) for a in new for b in new}
    else:
        side = v - k + 2
        size = v + side + 2
        left = [v, v + 1]
        right = range(v + 2, size)
        for a in left:
            for b in right:
                pairs |= {(a, b), (b, a)}
        pairs |= {(a, a) for a in range(v, size)}
    return Relation.from_pairs(size, pairs)

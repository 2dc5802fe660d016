"""Finite groups, square partial groups, bounded group completion and homotopies."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .errors import InputError, PreconditionError
from .verdict import SearchResult, Verdict


# finite groups ---------------------------------------------------------------------

@dataclass
class FiniteGroup:
    elements: list
    table: np.ndarray  # table[a, b] = index of a*b

    def __post_init__(self):
        self.elements = [str(e) for e in self.elements]
        self.table = np.asarray(self.table, dtype=np.int64)
        m = len(self.elements)
        if self.table.shape != (m, m):
            raise ValueError("group table has the wrong shape")
        self._index = {e: i for i, e in enumerate(self.elements)}
        problems = group_axiom_violations(self.table)
        if problems:
            raise ValueError(f"not a group: {problems[0]}")
        self.identity = next(i for i in range(m) if (self.table[i] == np.arange(m)).all())
        self.inverse = [int(np.flatnonzero(self.table[a] == self.identity)[0]) for a in range(m)]

    def __len__(self):
        return len(self.elements)

    def index(self, x) -> int:
        return self._index[x] if isinstance(x, str) else int(x)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def to_json(self) -> dict:
        names = self.elements
        return {
            "elements": list(names),
            "product": {f"{names[a]},{names[b]}": names[self.mul(a, b)] for a in range(len(self)) for b in range(len(self))},
        }

    @classmethod
    def from_json(cls, data) -> "FiniteGroup":
        elements = [str(e) for e in data["elements"]]
        index = {e: i for i, e in enumerate(elements)}
        m = len(elements)
        table = np.full((m, m), -1, dtype=np.int64)
        for key, value in data["product"].items():
            a, b = _split_key(key, index)
            if value not in index:
                raise InputError(f"product value {value!r} is not an element", field=f"product.{key}")
            table[a, b] = index[value]
        if (table < 0).any():
            raise InputError("group product table is not total", field="product")
        return cls(elements, table)


def group_axiom_violations(table) -> list:
    t = np.asarray(table)
    m = t.shape[0]
    out = []
    if m == 0:
        return ["empty carrier"]
    if ((t < 0) | (t >= m)).any():
        return ["table entry outside the carrier"]
    for a in range(m):
        if not (t[t[a, :], :] == t[a, t]).all():
            b, c = map(int, np.argwhere(t[t[a, :], :] != t[a, t])[0])
            out.append(f"associativity fails at ({a}, {b}, {c})")
            break
    ids = [i for i in range(m) if (t[i] == np.arange(m)).all() and (t[:, i] == np.arange(m)).all()]
    if not ids:
        out.append("no two-sided identity")
    else:
        e = ids[0]
        for a in range(m):
            if not ((t[a] == e) & (t[:, a] == e)).any():
                out.append(f"element {a} has no inverse")
                break
    return out


def cyclic_group(n: int) -> FiniteGroup:
    r = np.arange(n)
    return FiniteGroup([str(i) for i in range(n)], (r[:, None] + r[None, :]) % n)


def symmetric_group(k: int) -> FiniteGroup:
    perms = list(permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(x) = q(p(x)): apply p first
    table = [[index[tuple(q[p[x]] for x in range(k))] for q in perms] for p in perms]
    return FiniteGroup(["".join(map(str, p)) for p in perms], table)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    pairs = list(product(range(len(g)), range(len(h))))
    index = {p: i for i, p in enumerate(pairs)}
    table = [[index[(g.mul(a, c), h.mul(b, d))] for c, d in pairs] for a, b in pairs]
    return FiniteGroup([f"{g.elements[a]}:{h.elements[b]}" for a, b in pairs], table)


def _split_key(key: str, index: dict):
    parts = key.split(",")
    if len(parts) != 2:
        raise InputError(f"product key {key!r} must look like 'a,b'", field=f"product.{key}")
    a, b = (p.strip() for p in parts)
    for x in (a, b):
        if x not in index:
            raise InputError(f"{x!r} is not an element", field=f"product.{key}")
    return index[a], index[b]


# square partial groups ------------------------------------------------------------------

@dataclass
class SquarePartialGroup:
    elements: list
    sqrt: list  # indices of the elements of √P
    identity: int
    product: dict  # (a, b) -> c, indices; absent means undefined

    def __post_init__(self):
        self.elements = [str(e) for e in self.elements]
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise ValueError("element names must be distinct")

    def __len__(self):
        return len(self.elements)

    def index(self, x) -> int:
        return self._index[x] if isinstance(x, str) else int(x)

    def mul(self, a: int, b: int):
        return self.product.get((a, b))

    def level(self, k: int) -> list:
        """√P^(k): {e}, √P, P for k = 0, 1, 2."""
        if k == 0:
            return [self.identity]
        if k == 1:
            return list(self.sqrt)
        if k == 2:
            return list(range(len(self)))
        raise ValueError("level must be 0, 1 or 2")

    def inverse(self, a: int):
        cands = [b for b in self.sqrt if self.mul(a, b) == self.identity and self.mul(b, a) == self.identity]
        return cands[0] if len(cands) == 1 else None

    @classmethod
    def from_group(cls, g: FiniteGroup, sqrt=None) -> "SquarePartialGroup":
        """Restrict ``g`` to P = √P*√P, keeping exactly the products of √P."""
        sq = sorted({g.index(x) for x in sqrt}) if sqrt is not None else list(range(len(g)))
        if g.identity not in sq:
            sq = sorted(set(sq) | {g.identity})
        carrier = sorted({g.mul(a, b) for a in sq for b in sq} | set(sq))
        pos = {x: i for i, x in enumerate(carrier)}
        prod = {}
        for a in sq:
            for b in sq:
                prod[(pos[a], pos[b])] = pos[g.mul(a, b)]
        e = pos[g.identity]
        for x in carrier:
            prod[(e, pos[x])] = pos[x]
            prod[(pos[x], e)] = pos[x]
        return cls([g.elements[x] for x in carrier], [pos[a] for a in sq], e, prod)

    def to_json(self) -> dict:
        n = self.elements
        return {
            "elements": list(n),
            "sqrt": [n[a] for a in self.sqrt],
            "identity": n[self.identity],
            "product": {f"{n[a]},{n[b]}": n[c] for (a, b), c in sorted(self.product.items())},
        }

    @classmethod
    def from_json(cls, data) -> "SquarePartialGroup":
        for key in ("elements", "sqrt", "identity", "product"):
            if key not in data:
                raise InputError(f"missing field {key!r}", field=key)
        elements = [str(e) for e in data["elements"]]
        index = {e: i for i, e in enumerate(elements)}
        for s in data["sqrt"]:
            if s not in index:
                raise InputError(f"{s!r} is not an element", field="sqrt")
        if data["identity"] not in index:
            raise InputError(f"{data['identity']!r} is not an element", field="identity")
        prod = {}
        for key, value in data["product"].items():
            a, b = _split_key(key, index)
            if value not in index:
                raise InputError(f"product value {value!r} is not an element", field=f"product.{key}")
            prod[(a, b)] = index[value]
        return cls(elements, [index[s] for s in data["sqrt"]], index[data["identity"]], prod)


def validate(p: SquarePartialGroup) -> Verdict:
    """Check the defining conditions of a square partial group, with witnesses."""
    v = []
    n = p.elements
    m = len(p)
    sq = set(p.sqrt)
    e = p.identity
    if e not in sq:
        v.append(f"identity {n[e]} is not in sqrt")
    for (a, b), c in p.product.items():
        if not (0 <= a < m and 0 <= b < m and 0 <= c < m):
            v.append(f"malformed product entry ({a}, {b}) -> {c}")
    if v:
        return Verdict.from_violations(v)
    for a in sorted(sq):
        for b in sorted(sq):
            if p.mul(a, b) is None:
                v.append(f"product not total on sqrt: {n[a]}*{n[b]} undefined")
    for a in range(m):
        if p.mul(e, a) != a or p.mul(a, e) != a:
            v.append(f"identity law fails for {n[a]}")
    for (a, b), c in sorted(p.product.items()):
        if a == e or b == e:
            continue
        if a not in sq or b not in sq:
            v.append(f"product {n[a]}*{n[b]} defined outside sqrt")
    for a in sorted(sq):
        cands = [b for b in sorted(sq) if p.mul(a, b) == e and p.mul(b, a) == e]
        if len(cands) != 1:
            v.append(f"unique inverse fails for {n[a]}: {len(cands)} candidates")
    for (a, b), ab in sorted(p.product.items()):
        for c in range(m):
            bc = p.mul(b, c)
            left = p.mul(ab, c)
            if bc is None or left is None:
                continue
            right = p.mul(a, bc)
            if right is not None and right != left:
                v.append(f"associativity: ({n[a]}*{n[b]})*{n[c]}={n[left]} but {n[a]}*({n[b]}*{n[c]})={n[right]}")
    return Verdict.from_violations(v)


# bounded completion -------------------------------------------------------------------------

class _Completion:
    def __init__(self, p: SquarePartialGroup, m: int):
        self.m = m
        k = len(p)
        # put the identity at index 0, then the other elements of P in order
        order = [p.identity] + [x for x in range(k) if x != p.identity]
        self.embed = {x: i for i, x in enumerate(order)}
        self.k = k
        self.t = [[-1] * m for _ in range(m)]
        self.rowmask = [0] * m
        self.colmask = [0] * m
        self.trail = []
        self.used = k  # elements 0..used-1 may appear; the next fresh one is `used`
        self.nodes = 0
        self.ok = True
        for x in range(m):
            self.ok = self.ok and self.set(0, x, x) and self.set(x, 0, x)
        for (a, b), c in p.product.items():
            if self.ok:
                self.ok = self.set(self.embed[a], self.embed[b], self.embed[c])

    def set(self, a, b, c) -> bool:
        t = self.t
        queue = [(a, b, c)]
        while queue:
            a, b, c = queue.pop()
            cur = t[a][b]
            if cur >= 0:
                if cur != c:
                    return False
                continue
            bit = 1 << c
            if self.rowmask[a] & bit or self.colmask[b] & bit:
                return False
            t[a][b] = c
            self.rowmask[a] |= bit
            self.colmask[b] |= bit
            self.trail.append((a, b))
            m = self.m
            # (a*b)*z = a*(b*z)
            row_b = t[b]
            for z in range(m):
                v = row_b[z]
                if v < 0:
                    continue
                l, r = t[c][z], t[a][v]
                if l >= 0 and r >= 0:
                    if l != r:
                        return False
                elif l >= 0:
                    queue.append((a, v, l))
                elif r >= 0:
                    queue.append((c, z, r))
            # (x*a)*b = x*(a*b)
            for x in range(m):
                u = t[x][a]
                if u < 0:
                    continue
                l, r = t[u][b], t[x][c]
                if l >= 0 and r >= 0:
                    if l != r:
                        return False
                elif l >= 0:
                    queue.append((x, c, l))
                elif r >= 0:
                    queue.append((u, b, r))
        return True

    def undo(self, mark):
        while len(self.trail) > mark:
            a, b = self.trail.pop()
            c = self.t[a][b]
            self.t[a][b] = -1
            self.rowmask[a] &= ~(1 << c)
            self.colmask[b] &= ~(1 << c)

    def solve(self):
        if not self.ok:
            return None
        return self._dfs()

    def _next_cell(self):
        best, best_count = None, None
        full = (1 << self.m) - 1
        limit = min(self.m, self.used + 1)
        allowed = (1 << limit) - 1
        for a in range(self.m):
            row = self.t[a]
            for b in range(self.m):
                if row[b] < 0:
                    free = full & ~self.rowmask[a] & ~self.colmask[b] & allowed
                    cnt = bin(free).count("1")
                    if best is None or cnt < best_count:
                        best, best_count = (a, b, free), cnt
                        if cnt <= 1:
                            return best
        return best

    def _dfs(self):
        cell = self._next_cell()
        if cell is None:
            return [row[:] for row in self.t]
        a, b, free = cell
        for c in range(self.m):
            if not free >> c & 1:
                continue
            self.nodes += 1
            mark, used = len(self.trail), self.used
            if c == self.used:
                self.used += 1
            if self.set(a, b, c):
                res = self._dfs()
                if res is not None:
                    return res
            self.undo(mark)
            self.used = used
        return None


@dataclass
class Embedding:
    group: FiniteGroup
    injection: list  # element index of P -> index in group

    def to_json(self, p: SquarePartialGroup) -> dict:
        return {
            "group": self.group.to_json(),
            "injection": {p.elements[x]: self.group.elements[g] for x, g in enumerate(self.injection)},
        }


def embed_into_group(p: SquarePartialGroup, max_order: int) -> SearchResult:
    """Complete P's table to a group of order ``|P|..max_order``, smallest first."""
    verdict = validate(p)
    if not verdict.ok:
        raise PreconditionError(f"invalid square partial group: {verdict.violations[0]}")
    nodes = 0
    for m in range(len(p), max_order + 1):
        comp = _Completion(p, m)
        table = comp.solve()
        nodes += comp.nodes
        if table is None:
            continue
        if group_axiom_violations(table):
            raise AssertionError("completion produced a non-group table")
        names = [None] * m
        for x, i in comp.embed.items():
            names[i] = p.elements[x]
        fresh = 0
        for i in range(m):
            if names[i] is None:
                while f"g{fresh}" in p.elements:
                    fresh += 1
                names[i] = f"g{fresh}"
                fresh += 1
        group = FiniteGroup(names, table)
        inj = [comp.embed[x] for x in range(len(p))]
        return SearchResult(True, max_order, Embedding(group, inj), {"nodes": nodes, "order": m})
    return SearchResult(False, max_order, None, {"nodes": nodes})


def check_embedding(p: SquarePartialGroup, g: FiniteGroup, injection) -> list:
    """Violations of ``injection`` being an injective homomorphism on defined products."""
    out = []
    if len(set(injection)) != len(injection):
        out.append("embedding is not injective")
    for (a, b), c in sorted(p.product.items()):
        if g.mul(injection[a], injection[b]) != injection[c]:
            out.append(f"embedding breaks {p.elements[a]}*{p.elements[b]}={p.elements[c]}")
    return out


# homotopies --------------------------------------------------------------------------------

@dataclass
class Homotopy:
    alpha: dict  # sqrt element -> target element index
    beta: dict
    gamma: dict  # P element -> target element index
    target: object  # FiniteStructure with a composition table
    source: SquarePartialGroup = field(repr=False, default=None)

    def to_json(self) -> dict:
        names = self.target.carrier
        src = self.source.elements

        def render(mp):
            return {src[k]: names[v] for k, v in sorted(mp.items())}

        return {"alpha": render(self.alpha), "beta": render(self.beta), "gamma": render(self.gamma)}


def canonical_homotopy(p: SquarePartialGroup, e0=None) -> Homotopy:
    """a -> a[01], b -> b[12], c -> c[02] inside E0(P)."""
    from .constructions import build_E0, plain_name

    e0 = e0 or build_E0(p)
    n = p.elements
    idx = lambda x, i, j: e0.index(plain_name(n[x], i, j))
    return Homotopy(
        {a: idx(a, 0, 1) for a in p.sqrt},
        {b: idx(b, 1, 2) for b in p.sqrt},
        {c: idx(c, 0, 2) for c in range(len(p))},
        e0, p,
    )


def group_homotopy(p: SquarePartialGroup, g: FiniteGroup, injection, b3=None) -> Homotopy:
    """The canonical maps pushed through ``injection`` into B3(G)."""
    from .constructions import build_B3, plain_name

    b3 = b3 or build_B3(g)
    idx = lambda x, i, j: b3.index(plain_name(g.elements[injection[x]], i, j))
    return Homotopy(
        {a: idx(a, 0, 1) for a in p.sqrt},
        {b: idx(b, 1, 2) for b in p.sqrt},
        {c: idx(c, 0, 2) for c in range(len(p))},
        b3, p,
    )


def check_H_embedding(h: Homotopy, greens) -> Verdict:
    """gamma injective, the homotopy identity, and each image inside one H-class."""
    p, s = h.source, h.target
    names = s.carrier
    v = []
    gam = list(h.gamma.values())
    if len(set(gam)) != len(gam):
        v.append("gamma is not injective")
    for a in p.sqrt:
        for b in p.sqrt:
            ab = p.mul(a, b)
            if ab is None:
                continue
            lhs = s.apply("compose", h.alpha[a], h.beta[b])
            if lhs != h.gamma[ab]:
                v.append(f"alpha({p.elements[a]});beta({p.elements[b]}) = {names[lhs]} != gamma({p.elements[ab]})")
    for label, mp in (("alpha", h.alpha), ("beta", h.beta), ("gamma", h.gamma)):
        classes = {int(greens.H[x]) for x in mp.values()}
        if len(classes) > 1:
            v.append(f"{label} image meets {len(classes)} H-classes")
    return Verdict.from_violations(v)

"""The reduction structures E0, E1, E2, the inverse semigroup B3(G) and their representations.

E1 and E2 elements are 3x3 grids of cells.  A cell is one of

* ``ZERO``
* ``(PLAIN, a)``: a group-like element ``a`` sitting at (i, j), i <= j
* ``(BAR, label)``: a barred element; ``label`` is one element of P in E1 and a
  nonempty frozenset of elements in E2 (the empty set is ``ONE``)
* ``ONE``: the full block 1_ij

Operations act cell by cell and are joined back together inside each cell.
"""

from __future__ import annotations

import random
from itertools import combinations, product

from . import relcore
from .errors import ClosureError, MissingOperationError, PreconditionError
from .pgroups import FiniteGroup, SquarePartialGroup, check_embedding, cyclic_group, direct_product, validate
from .relcore import OpSymbol, Relation, op
from .structures import FiniteStructure, RepresentationCandidate
from .terms import PRESETS, SignatureSpec

ZERO = ("0", None)
ONE = ("1", None)
PLAIN, BAR = "p", "b"

CELLS = [(i, j) for i in range(3) for j in range(3)]
E0_CELL_ORDER = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)]
B3_SIGNATURE = SignatureSpec.of(["converse", "dom", "ran", "kl", "kr", "compose"])


def plain_name(a: str, i: int, j: int) -> str:
    return f"{a}[{i}{j}]"


def _require_valid(p: SquarePartialGroup):
    v = validate(p)
    if not v.ok:
        raise PreconditionError(f"invalid square partial group: {v.violations[0]}")


# E0 -------------------------------------------------------------------------------------

def build_E0(p: SquarePartialGroup, signature: SignatureSpec | None = None) -> FiniteStructure:
    """E0(P): zero plus a[ij] for i <= j and a in the level j - i of P."""
    _require_valid(p)
    names = ["0"]
    elems = [None]
    for i, j in E0_CELL_ORDER:
        for a in p.level(j - i):
            names.append(plain_name(p.elements[a], i, j))
            elems.append((a, i, j))
    index = {x: k for k, x in enumerate(elems) if x is not None}
    m = len(elems)
    e = p.identity
    compose = [[0] * m for _ in range(m)]
    for x in range(1, m):
        a, i, j = elems[x]
        for y in range(1, m):
            b, j2, k = elems[y]
            if j2 != j:
                continue
            c = p.mul(a, b)
            compose[x][y] = index[(c, i, k)]
    dom = [0] + [index[(e, i, i)] for a, i, j in elems[1:]]
    ran = [0] + [index[(e, j, j)] for a, i, j in elems[1:]]
    tables = {
        op("zero"): 0,
        op("meet"): [[x if x == y else 0 for y in range(m)] for x in range(m)],
        op("dom"): dom,
        op("ran"): ran,
        op("kl"): list(dom),
        op("kr"): list(ran),
        op("compose"): compose,
    }
    full = FiniteStructure(names, PRESETS["kernel-e0"], tables)
    return full.reduct(signature) if signature is not None else full


# B3(G) and theta ---------------------------------------------------------------------------

def build_B3(g: FiniteGroup) -> FiniteStructure:
    """Zero plus g[ij] for i, j < 3; g[ij]*h[jk] = (gh)[ik], other products 0."""
    k = len(g)
    names = ["0"] + [plain_name(g.elements[x], i, j) for i, j in CELLS for x in range(k)]
    idx = lambda x, i, j: 1 + (i * 3 + j) * k + x
    m = len(names)
    compose = [[0] * m for _ in range(m)]
    conv = [0] * m
    dom, ran = [0] * m, [0] * m
    for i, j in CELLS:
        for x in range(k):
            u = idx(x, i, j)
            conv[u] = idx(g.inverse[x], j, i)
            dom[u] = idx(g.identity, i, i)
            ran[u] = idx(g.identity, j, j)
            for l in range(3):
                for y in range(k):
                    compose[u][idx(y, j, l)] = idx(g.mul(x, y), i, l)
    tables = {
        op("converse"): conv,
        op("dom"): dom,
        op("ran"): ran,
        op("kl"): list(dom),
        op("kr"): list(ran),
        op("compose"): compose,
    }
    return FiniteStructure(names, B3_SIGNATURE, tables)


def _theta_rows(g: FiniteGroup, x: int, i: int, j: int) -> list:
    k = len(g)
    rows = [0] * (3 * k)
    for h in range(k):
        rows[i * k + h] |= 1 << (j * k + g.mul(h, x))
    return rows


def build_theta(g: FiniteGroup, b3: FiniteStructure | None = None) -> RepresentationCandidate:
    """g[ij] -> {((i,h),(j,h*g))}, base point (i,h) flattened to i*|G| + h."""
    b3 = b3 or build_B3(g)
    k = len(g)
    n = 3 * k
    rels = [relcore.empty(n)]
    for i, j in CELLS:
        for x in range(k):
            rels.append(Relation(n, tuple(_theta_rows(g, x, i, j))))
    return RepresentationCandidate(b3, n, rels, {"group": g})


def theta_E0(p: SquarePartialGroup, g: FiniteGroup, injection, e0: FiniteStructure | None = None):
    """The restriction of theta to E0(P) along an embedding of P into ``g``."""
    bad = check_embedding(p, g, injection)
    if bad:
        raise PreconditionError(bad[0])
    e0 = e0 or build_E0(p)
    n = 3 * len(g)
    rels = [relcore.empty(n)]
    for i, j in E0_CELL_ORDER:
        for a in p.level(j - i):
            rels.append(Relation(n, tuple(_theta_rows(g, injection[a], i, j))))
    return RepresentationCandidate(e0, n, rels, {"group": g, "injection": list(injection)})


def block_complement(g: FiniteGroup, x: int, i: int, j: int) -> Relation:
    """(block i x block j) minus g[ij]'s theta image."""
    k = len(g)
    full = ((1 << k) - 1) << (j * k)
    rows = _theta_rows(g, x, i, j)
    return Relation(3 * k, tuple(full & ~r if i * k <= y < (i + 1) * k else 0 for y, r in enumerate(rows)))


def block_square(k: int, i: int) -> Relation:
    full = ((1 << k) - 1) << (i * k)
    return Relation(3 * k, tuple(full if i * k <= y < (i + 1) * k else 0 for y in range(3 * k)))


# formal sums -----------------------------------------------------------------------------------

def _special(cell) -> bool:
    return cell[0] in (PLAIN, BAR)


class FormalSumAlgebra(FiniteStructure):
    """E1(P) or E2(P) over formal sums, evaluated on demand from the grid encoding.

    ``variant`` is ``"E1"`` or ``"E2"``.  ``literal`` (E1 only) uses the
    unrestricted barred composition rule; ``strict`` (E2 only) sends every
    composition not listed explicitly to 0 and takes 1 as the sum of the
    upper cells only.
    """

    TABLE_LIMIT = 4096

    def __init__(self, p: SquarePartialGroup, variant: str = "E1", *, literal: bool = False, strict: bool = False):
        _require_valid(p)
        if variant not in ("E1", "E2"):
            raise ValueError("variant must be E1 or E2")
        self.p = p
        self.variant = variant
        self.literal = literal
        self.strict = strict
        self.grids = list(self._enumerate(count_barred=True))
        names = [self.grid_name(gr) for gr in self.grids]
        sig = PRESETS["kernel-complement-max" if variant == "E1" else "kernel-meet-max"]
        super().__init__(names, sig, validate=False)
        self.gindex = {gr: x for x, gr in enumerate(self.grids)}
        self._tables = {}
        self._atoms = {}
        for x, gr in enumerate(self.grids):
            if sum(c != ZERO for c in gr) == 1:
                self._atoms[gr] = x

    # carrier ----------------------------------------------------------------------------

    def cell_options(self, i: int, j: int) -> list:
        p = self.p
        if i > j:
            return [ZERO, ONE]
        level = p.level(j - i)
        opts = [ZERO] + [(PLAIN, a) for a in level]
        if self.variant == "E1":
            opts += [(BAR, a) for a in level]
        else:
            for r in range(1, len(level) + 1):
                opts += [(BAR, frozenset(s)) for s in combinations(level, r)]
        return opts + [ONE]

    def _enumerate(self, count_barred: bool):
        opts = [self.cell_options(i, j) for i, j in CELLS]
        counted = _special if count_barred else (lambda c: c[0] == PLAIN)
        for grid in product(*opts):
            if self._unique(grid, counted):
                yield grid

    @staticmethod
    def _unique(grid, counted=_special) -> bool:
        for r in range(3):
            if sum(counted(grid[r * 3 + c]) for c in range(3)) > 1:
                return False
            if sum(counted(grid[c * 3 + r]) for c in range(3)) > 1:
                return False
        return True

    def carrier_counts(self) -> dict:
        """Carrier sizes under both readings of the row/column uniqueness rule."""
        return {
            "plain_and_barred": len(self.grids),
            "plain_only": sum(1 for _ in self._enumerate(count_barred=False)),
        }

    # names -----------------------------------------------------------------------------

    def cell_name(self, cell, i: int, j: int) -> str:
        kind, label = cell
        names = self.p.elements
        if kind == PLAIN:
            return f"{names[label]}[{i}{j}]"
        if kind == BAR:
            if isinstance(label, frozenset):
                return "~{" + ",".join(names[a] for a in sorted(label)) + f"}}[{i}{j}]"
            return f"~{names[label]}[{i}{j}]"
        return f"one[{i}{j}]"

    def grid_name(self, grid) -> str:
        parts = [self.cell_name(c, i, j) for c, (i, j) in zip(grid, CELLS) if c != ZERO]
        return "+".join(parts) if parts else "0"

    def grid(self, x) -> tuple:
        return self.grids[self.index(x)]

    def _lookup(self, grid) -> int:
        try:
            return self.gindex[grid]
        except KeyError:
            raise ClosureError(f"result {self.grid_name(grid)} violates the row/column uniqueness rule") from None

    # cell algebra ----------------------------------------------------------------------

    def _join(self, x, y):
        if x == ZERO:
            return y
        if y == ZERO or x == y:
            return x
        if x == ONE or y == ONE:
            return ONE
        raise ClosureError("two distinct special entries meet in one cell")

    def _prod(self, a, b):
        return self.p.mul(a, b)

    def _cell_compose(self, x, y, i, j, k):
        if x == ZERO or y == ZERO:
            return ZERO
        kx, lx = x
        ky, ly = y
        if kx == PLAIN and ky == PLAIN:
            return (PLAIN, self._prod(lx, ly))
        if self.variant == "E1":
            if x == ONE or y == ONE:
                return ONE
            if self.literal or (kx == BAR and ky == BAR):
                return ONE
            return (BAR, self._prod(lx, ly))
        # E2
        if self.strict:
            if kx == PLAIN or i > j:
                return ZERO  # b;A-bar and anything from a lower 1 are unlisted
            if j > k and y == ONE:
                return ZERO
            if ky == BAR or y == ONE:
                return ONE
            label = frozenset() if x == ONE else lx
            return self._bar({self._prod(a, ly) for a in label})
        if x == ONE or y == ONE or (kx == BAR and ky == BAR):
            return ONE
        if kx == BAR:
            return self._bar({self._prod(a, ly) for a in lx})
        return self._bar({self._prod(lx, b) for b in ly})

    @staticmethod
    def _bar(labels):
        return (BAR, frozenset(labels)) if labels else ONE

    def _cell_meet(self, x, y, i, j):
        if x == y:
            return x
        if x == ZERO or y == ZERO or i > j:
            return ZERO
        as_bar = lambda c: frozenset() if c == ONE else c[1] if c[0] == BAR else None
        bx, by = as_bar(x), as_bar(y)
        if bx is not None and by is not None:
            return self._bar(bx | by)
        if self.strict:
            return ZERO
        if bx is not None:
            x, y, by = y, x, bx
        if by is not None and x[0] == PLAIN:
            return x if x[1] not in by else ZERO
        return ZERO

    def _cell_neg(self, c):
        if c == ZERO:
            return ONE
        if c == ONE:
            return ZERO
        return (BAR if c[0] == PLAIN else PLAIN, c[1])

    # grid operations ---------------------------------------------------------------------

    def _diag(self, rows) -> tuple:
        out = [ZERO] * 9
        for i, v in rows:
            out[i * 4] = self._join(out[i * 4], v)
        return tuple(out)

    def _e(self):
        return (PLAIN, self.p.identity)

    def _unary(self, tag, g):
        e = self._e()
        nz = [(c, i, j) for c, (i, j) in zip(g, CELLS) if c != ZERO]
        if tag == "complement":
            return tuple(self._cell_neg(c) for c in g)
        if tag == "dom":
            return self._diag([(i, e) for c, i, j in nz])
        if tag == "ran":
            return self._diag([(j, e) for c, i, j in nz])
        if tag == "kl":
            return self._diag([(i, e if c[0] == PLAIN else ONE) for c, i, j in nz])
        if tag == "kr":
            return self._diag([(j, e if c[0] == PLAIN else ONE) for c, i, j in nz])
        if tag == "antidom":
            busy = {i for c, i, j in nz}
            return self._diag([(i, e) for i in range(3) if i not in busy])
        if tag == "antiran":
            busy = {j for c, i, j in nz}
            return self._diag([(j, e) for j in range(3) if j not in busy])
        raise KeyError(tag)

    def _binary(self, tag, x, y):
        if tag == "compose":
            out = []
            for i, k in CELLS:
                acc = ZERO
                for j in range(3):
                    acc = self._join(acc, self._cell_compose(x[i * 3 + j], y[j * 3 + k], i, j, k))
                out.append(acc)
            return tuple(out)
        if tag == "meet":
            return tuple(self._cell_meet(a, b, i, j) for a, b, (i, j) in zip(x, y, CELLS))
        if tag == "ojoin":
            rows = {i for c, (i, j) in zip(x, CELLS) if c != ZERO}
            cols = {j for c, (i, j) in zip(x, CELLS) if c != ZERO}
            return tuple(
                a if a != ZERO else (b if i not in rows and j not in cols else ZERO)
                for a, b, (i, j) in zip(x, y, CELLS)
            )
        raise KeyError(tag)

    def _constant(self, tag):
        e = self._e()
        if tag == "zero":
            return (ZERO,) * 9
        if tag == "top":
            if self.strict:
                return tuple(ONE if i <= j else ZERO for i, j in CELLS)
            return (ONE,) * 9
        if tag == "id":
            return tuple(e if i == j else ZERO for i, j in CELLS)
        if tag == "div":
            ebar = (BAR, self.p.identity) if self.variant == "E1" else (BAR, frozenset([self.p.identity]))
            return tuple(ebar if i == j else ONE for i, j in CELLS)
        raise KeyError(tag)

    # FiniteStructure interface --------------------------------------------------------------

    def has_op(self, sym) -> bool:
        sym = sym if isinstance(sym, OpSymbol) else op(sym)
        return sym in self.signature.ops

    def has_rel(self, rel: str) -> bool:
        return rel in self.signature.rels

    def apply(self, sym, *args) -> int:
        sym = sym if isinstance(sym, OpSymbol) else op(sym)
        if not self.has_op(sym):
            raise MissingOperationError(f"{self.variant} has no operation {sym}")
        if len(args) != sym.arity:
            raise ValueError(f"{sym} expects {sym.arity} arguments")
        if sym.arity == 0:
            return self._lookup(self._constant(sym.tag))
        if sym.arity == 1:
            return self._lookup(self._unary(sym.tag, self.grids[args[0]]))
        return self._lookup(self._binary(sym.tag, self.grids[args[0]], self.grids[args[1]]))

    def holds(self, rel: str, *args) -> bool:
        if rel != "le" or not self.has_rel(rel):
            raise MissingOperationError(f"{self.variant} has no relation {rel}")
        x, y = (self.grids[a] for a in args)
        return all(a == b or a == ZERO or b == ONE for a, b in zip(x, y))

    def table(self, sym):
        sym = sym if isinstance(sym, OpSymbol) else op(sym)
        if sym not in self._tables:
            m = len(self)
            if sym.arity == 2 and m > self.TABLE_LIMIT:
                raise ValueError(f"{m} elements is too many for a full {sym} table")
            if sym.arity == 0:
                t = self.apply(sym)
            elif sym.arity == 1:
                t = [self.apply(sym, x) for x in range(m)]
            else:
                t = [[self.apply(sym, x, y) for y in range(m)] for x in range(m)]
            self._tables[sym] = t
        return self._tables[sym]

    def to_json(self) -> dict:
        self.op_tables = {s: self.table(s) for s in self.signature.ops}
        if self.signature.rels:
            m = len(self)
            self.rel_tables = {"le": [[self.holds("le", x, y) for y in range(m)] for x in range(m)]}
        return super().to_json()

    def reduct(self, signature):
        self.to_json()
        return super().reduct(signature)

    def cell_parts(self, x: int) -> list:
        g = self.grids[x]
        return [self._atoms[tuple(c if k == pos else ZERO for k in range(9))] for pos, c in enumerate(g) if c != ZERO]

    def pairs_to_check(self, sym):
        if len(self) <= 512:
            return super().pairs_to_check(sym)
        rows = [[x for x, g in enumerate(self.grids) if all(c == ZERO for k, c in enumerate(g) if k // 3 != i)] for i in range(3)]
        cols = [[x for x, g in enumerate(self.grids) if all(c == ZERO for k, c in enumerate(g) if k % 3 != j)] for j in range(3)]
        pairs = sorted({(a, b) for r in rows for c in cols for a in r for b in c})
        note = (f"{len(pairs)} single-row by single-column pairs checked; "
                "the table is their cellwise join, checked through cell additivity and random pairs")
        return pairs, note

    def sample_pairs(self, sym, count: int = 20000, seed: int = 0):
        rng = random.Random(seed)
        m = len(self)
        return [(rng.randrange(m), rng.randrange(m)) for _ in range(count)]


def build_E1(p: SquarePartialGroup, *, literal: bool = False) -> FormalSumAlgebra:
    return FormalSumAlgebra(p, "E1", literal=literal)


def build_E2(p: SquarePartialGroup, *, strict: bool = False) -> FormalSumAlgebra:
    return FormalSumAlgebra(p, "E2", strict=strict)


# theta-plus ----------------------------------------------------------------------------------

def complement_square_condition(g: FiniteGroup, image) -> bool:
    """(G minus P) * (G minus P) = G for the image of P in ``g``."""
    rest = [x for x in range(len(g)) if x not in set(image)]
    return {g.mul(a, b) for a in rest for b in rest} == set(range(len(g)))


def build_theta_plus(p: SquarePartialGroup, g: FiniteGroup, injection, e1: FormalSumAlgebra | None = None):
    """Union of per-cell theta images for every formal sum of E1(P).

    When the complement condition fails, G is replaced by Z3 x G with P
    embedded in the Z3 = 0 layer first.
    """
    bad = check_embedding(p, g, injection)
    if bad:
        raise PreconditionError(f"embedding is not a partial-group embedding: {bad[0]}")
    replaced = False
    if not complement_square_condition(g, injection):
        g = direct_product(cyclic_group(3), g)
        replaced = True  # index of (0, x) in the product is x
        if not complement_square_condition(g, injection):
            raise PreconditionError("complement condition fails even after enlarging the group")
    e1 = e1 or build_E1(p)
    k = len(g)
    n = 3 * k
    cache = {}

    def cell_rows(cell, i, j):
        key = (cell, i, j)
        if key not in cache:
            rows = [0] * n
            block = ((1 << k) - 1) << (j * k)
            if cell == ONE:
                for h in range(k):
                    rows[i * k + h] = block
            elif cell[0] == PLAIN:
                rows = _theta_rows(g, injection[cell[1]], i, j)
            else:
                plain = _theta_rows(g, injection[cell[1]], i, j)
                for h in range(k):
                    rows[i * k + h] = block & ~plain[i * k + h]
            cache[key] = rows
        return cache[key]

    rels = []
    for grid in e1.grids:
        rows = [0] * n
        for c, (i, j) in zip(grid, CELLS):
            if c != ZERO:
                for y, m in enumerate(cell_rows(c, i, j)):
                    rows[y] |= m
        rels.append(Relation(n, tuple(rows)))
    return RepresentationCandidate(e1, n, rels, {"group": g, "injection": list(injection), "group_replaced": replaced})

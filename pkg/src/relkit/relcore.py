"""Binary relations over ``{0, ..., n-1}`` and their operation catalogue.

A relation is stored as one integer bitmask per row: bit ``y`` of
``rows[x]`` is set iff ``(x, y)`` belongs to the relation.  Every operation
below evaluates the first-order (three variable) clause that defines it;
the relation-algebra term definitions live in :mod:`relkit.terms` and
serve as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Iterable, Iterator

import numpy as np

from .errors import DimensionError

# tag -> (arity, printable symbol)
_OPS = {
    "zero": (0, "0"),
    "top": (0, "1"),
    "u": (0, "u"),
    "complement": (1, "-"),
    "join": (2, "+"),
    "meet": (2, "."),
    "implies": (2, "=>"),
    "id": (0, "1'"),
    "div": (0, "0'"),
    "converse": (1, "~"),
    "dom": (1, "D"),
    "ran": (1, "R"),
    "antidom": (1, "Ad"),
    "antiran": (1, "Ar"),
    "kl": (1, "KL"),
    "kr": (1, "KR"),
    "klpow": (1, "KL^"),
    "krpow": (1, "KR^"),
    "ojoin": (2, "+|"),
    "compose": (2, ";"),
}

OP_TAGS = tuple(_OPS)


@dataclass(frozen=True, order=True)
class OpSymbol:
    """An operation symbol of the catalogue; ``power`` only for kernel powers."""

    tag: str
    power: int | None = None

    def __post_init__(self):
        if self.tag not in _OPS:
            raise ValueError(f"unknown operation tag {self.tag!r}")
        if self.tag in ("klpow", "krpow"):
            if self.power is None or self.power < 1:
                raise ValueError(f"{self.tag} needs a power >= 1")
        elif self.power is not None:
            raise ValueError(f"{self.tag} takes no power")

    @property
    def arity(self) -> int:
        return _OPS[self.tag][0]

    @property
    def name(self) -> str:
        """Canonical text name, also used as JSON key and s-expression head."""
        if self.tag == "klpow":
            return f"kl^{self.power}"
        if self.tag == "krpow":
            return f"kr^{self.power}"
        return self.tag

    @property
    def symbol(self) -> str:
        if self.power is not None:
            return f"{_OPS[self.tag][1]}{self.power}"
        return _OPS[self.tag][1]

    def __str__(self):
        return self.name


def op(name: str) -> OpSymbol:
    """Look up an :class:`OpSymbol` by canonical name (``"kl^3"`` etc.)."""
    name = name.strip()
    for head, tag in (("kl^", "klpow"), ("kr^", "krpow")):
        if name.startswith(head):
            return OpSymbol(tag, int(name[len(head):]))
    return OpSymbol(name)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, slots=True)
class Relation:
    """An immutable binary relation on the base ``{0, ..., n-1}``."""

    n: int
    rows: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("base size must be positive")
        if len(self.rows) != self.n:
            raise ValueError("need exactly one row mask per base point")
        full = (1 << self.n) - 1
        for mask in self.rows:
            if mask & ~full:
                raise ValueError("pair index out of range")

    # construction ---------------------------------------------------------

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable) -> "Relation":
        rows = [0] * n
        for x, y in pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError(f"pair ({x}, {y}) outside base of size {n}")
            rows[x] |= 1 << y
        return cls(n, tuple(rows))

    @classmethod
    def from_matrix(cls, matrix) -> "Relation":
        m = np.asarray(matrix, dtype=bool)
        n = m.shape[0]
        if m.shape != (n, n):
            raise ValueError("incidence matrix must be square")
        return cls.from_pairs(n, zip(*np.nonzero(m)))

    @classmethod
    def from_code(cls, n: int, code: int) -> "Relation":
        mask = (1 << n) - 1
        return cls(n, tuple((code >> (n * x)) & mask for x in range(n)))

    # views ----------------------------------------------------------------

    @property
    def base_size(self) -> int:
        return self.n

    @property
    def code(self) -> int:
        """Dense integer index in ``range(2 ** (n * n))``."""
        c = 0
        for x, mask in enumerate(self.rows):
            c |= mask << (self.n * x)
        return c

    def pairs(self) -> list:
        return [(x, y) for x, mask in enumerate(self.rows) for y in _bits(mask)]

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=bool)
        for x, y in self.pairs():
            out[x, y] = True
        return out

    def __contains__(self, pair) -> bool:
        x, y = pair
        return 0 <= x < self.n and 0 <= y < self.n and bool(self.rows[x] >> y & 1)

    def __len__(self) -> int:
        return sum(bin(m).count("1") for m in self.rows)

    def __iter__(self):
        return iter(self.pairs())

    def __bool__(self) -> bool:
        return any(self.rows)

    def __repr__(self):
        return f"Relation({self.n}, {self.pairs()})"

    def domain_mask(self) -> int:
        return sum(1 << x for x, m in enumerate(self.rows) if m)

    def range_mask(self) -> int:
        return reduce(int.__or__, self.rows, 0)

    def domain(self) -> set:
        return set(_bits(self.domain_mask()))

    def range(self) -> set:
        return set(_bits(self.range_mask()))

    def issubset(self, other: "Relation") -> bool:
        _same_base(self, other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    # operator sugar
    def __matmul__(self, other):
        return compose(self, other)

    def __invert__(self):
        return complement(self)

    def __or__(self, other):
        return join(self, other)

    def __and__(self, other):
        return meet(self, other)

    def __le__(self, other):
        return self.issubset(other)

    def to_json(self) -> dict:
        return {"n": self.n, "pairs": [list(p) for p in sorted(self.pairs())]}

    @classmethod
    def from_json(cls, data) -> "Relation":
        return cls.from_pairs(int(data["n"]), (tuple(p) for p in data["pairs"]))


def _same_base(*rels: Relation) -> int:
    n = rels[0].n
    for r in rels[1:]:
        if r.n != n:
            raise DimensionError(f"base sizes differ: {n} vs {r.n}")
    return n


def all_relations(n: int) -> Iterator[Relation]:
    """Every relation on base ``n``, in code order."""
    for code in range(1 << (n * n)):
        yield Relation.from_code(n, code)


def injective_partial_maps(n: int) -> Iterator[Relation]:
    """Every injective partial map on base ``n`` (``None`` marks undefined)."""
    for images in product([None, *range(n)], repeat=n):
        used = [y for y in images if y is not None]
        if len(used) == len(set(used)):
            yield Relation.from_pairs(n, ((x, y) for x, y in enumerate(images) if y is not None))


# constants ------------------------------------------------------------------

def empty(n: int) -> Relation:
    return Relation(n, (0,) * n)


def universal(n: int) -> Relation:
    return Relation(n, ((1 << n) - 1,) * n)


def identity(n: int) -> Relation:
    return Relation(n, tuple(1 << x for x in range(n)))


def diversity(n: int) -> Relation:
    full = (1 << n) - 1
    return Relation(n, tuple(full ^ (1 << x) for x in range(n)))


# Boolean part ----------------------------------------------------------------

def complement(r: Relation) -> Relation:
    full = (1 << r.n) - 1
    return Relation(r.n, tuple(full ^ m for m in r.rows))


def join(r: Relation, s: Relation) -> Relation:
    _same_base(r, s)
    return Relation(r.n, tuple(a | b for a, b in zip(r.rows, s.rows)))


def meet(r: Relation, s: Relation) -> Relation:
    _same_base(r, s)
    return Relation(r.n, tuple(a & b for a, b in zip(r.rows, s.rows)))


def implication(r: Relation, s: Relation) -> Relation:
    """``(x, y)`` iff ``s(x, y)`` or not ``r(x, y)``."""
    _same_base(r, s)
    full = (1 << r.n) - 1
    return Relation(r.n, tuple((b | (full ^ a)) for a, b in zip(r.rows, s.rows)))


# non-Boolean part ------------------------------------------------------------

def converse(r: Relation) -> Relation:
    rows = [0] * r.n
    for x, mask in enumerate(r.rows):
        for y in _bits(mask):
            rows[y] |= 1 << x
    return Relation(r.n, tuple(rows))


def compose(r: Relation, s: Relation) -> Relation:
    """``(x, z)`` iff some ``y`` has ``r(x, y)`` and ``s(y, z)``."""
    _same_base(r, s)
    srows = s.rows
    out = []
    for mask in r.rows:
        acc = 0
        while mask:
            low = mask & -mask
            acc |= srows[low.bit_length() - 1]
            mask ^= low
        out.append(acc)
    return Relation(r.n, tuple(out))


def _diag(n: int, mask: int) -> Relation:
    return Relation(n, tuple((1 << x) if mask >> x & 1 else 0 for x in range(n)))


def dom(r: Relation) -> Relation:
    return _diag(r.n, r.domain_mask())


def ran(r: Relation) -> Relation:
    return _diag(r.n, r.range_mask())


def antidom(r: Relation) -> Relation:
    return _diag(r.n, ((1 << r.n) - 1) ^ r.domain_mask())


def antiran(r: Relation) -> Relation:
    return _diag(r.n, ((1 << r.n) - 1) ^ r.range_mask())


def kernel_left(r: Relation) -> Relation:
    """``(x, y)`` iff some ``z`` has ``r(x, z)`` and ``r(y, z)``."""
    rows = r.rows
    return Relation(
        r.n,
        tuple(sum(1 << y for y, b in enumerate(rows) if a & b) for a in rows),
    )


def kernel_right(r: Relation) -> Relation:
    """``(x, y)`` iff some ``z`` has ``r(z, x)`` and ``r(z, y)``."""
    out = [0] * r.n
    for mask in r.rows:
        for x in _bits(mask):
            out[x] |= mask
    return Relation(r.n, tuple(out))


def _power(k: Relation, n: int) -> Relation:
    if n < 1:
        raise ValueError("kernel power exponent must be >= 1")
    acc = k
    for _ in range(n - 1):
        acc = compose(k, acc)
    return acc


def kernel_left_power(r: Relation, n: int) -> Relation:
    return _power(kernel_left(r), n)


def kernel_right_power(r: Relation, n: int) -> Relation:
    return _power(kernel_right(r), n)


def orthogonal_join(r: Relation, s: Relation) -> Relation:
    """Pairs of ``r``, plus pairs of ``s`` leaving ``dom(r)`` and ``ran(r)`` alone."""
    _same_base(r, s)
    dmask, rmask = r.domain_mask(), r.range_mask()
    keep = ((1 << r.n) - 1) ^ rmask
    return Relation(
        r.n,
        tuple(a | (0 if dmask >> x & 1 else b & keep) for x, (a, b) in enumerate(zip(r.rows, s.rows))),
    )


# predicates ------------------------------------------------------------------

def is_function(r: Relation) -> bool:
    return all(m & (m - 1) == 0 for m in r.rows)


def is_injective_pmap(r: Relation) -> bool:
    """Partial map that is one-to-one: each row and each column holds at most one pair."""
    seen = 0
    for m in r.rows:
        if m & (m - 1) or m & seen:
            return False
        seen |= m
    return True


def is_symmetric(r: Relation) -> bool:
    return converse(r) == r


def is_transitive(r: Relation) -> bool:
    return compose(r, r).issubset(r)


def is_local_equivalence(r: Relation) -> bool:
    return is_symmetric(r) and is_transitive(r)


def is_locally_reflexive(r: Relation) -> bool:
    """Every point touched by a pair carries a loop."""
    touched = r.domain_mask() | r.range_mask()
    return all(r.rows[x] >> x & 1 for x in _bits(touched))


def is_subidentity(r: Relation) -> bool:
    return all(m & ~(1 << x) == 0 for x, m in enumerate(r.rows))


def is_equivalence(r: Relation) -> bool:
    return is_local_equivalence(r) and r.domain_mask() == (1 << r.n) - 1


# dispatch ----------------------------------------------------------------------

_CONSTANTS = {"zero": empty, "top": universal, "u": universal, "id": identity, "div": diversity}
_UNARY = {
    "complement": complement,
    "converse": converse,
    "dom": dom,
    "ran": ran,
    "antidom": antidom,
    "antiran": antiran,
    "kl": kernel_left,
    "kr": kernel_right,
}
_BINARY = {
    "join": join,
    "meet": meet,
    "implies": implication,
    "ojoin": orthogonal_join,
    "compose": compose,
}


def evaluate(symbol: OpSymbol, *args: Relation, n: int | None = None) -> Relation:
    """Apply ``symbol`` in the full relation algebra on base ``n``.

    Constants need ``n``; ``top`` is read as the universal relation here.
    """
    if len(args) != symbol.arity:
        raise ValueError(f"{symbol} expects {symbol.arity} arguments, got {len(args)}")
    tag = symbol.tag
    if tag in _CONSTANTS:
        if n is None:
            raise ValueError(f"constant {symbol} needs a base size")
        return _CONSTANTS[tag](n)
    if tag == "klpow":
        return kernel_left_power(args[0], symbol.power)
    if tag == "krpow":
        return kernel_right_power(args[0], symbol.power)
    if tag in _UNARY:
        return _UNARY[tag](args[0])
    return _BINARY[tag](*args)


def block_partition(r: Relation) -> list:
    """Classes of an equivalence relation, ordered by least member."""
    classes, seen = [], 0
    for x in range(r.n):
        if seen >> x & 1:
            continue
        cls = r.rows[x]
        classes.append(sorted(_bits(cls)))
        seen |= cls
    return classes

"""Green's preorders and relations on finite semigroups given by tables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError


@dataclass
class GreensClassification:
    m: int
    leq_L: np.ndarray
    leq_R: np.ndarray
    L: np.ndarray  # class id per element, first-seen order
    R: np.ndarray
    H: np.ndarray

    def classes(self, kind: str = "H") -> list:
        ids = getattr(self, kind)
        out = {}
        for x, c in enumerate(ids):
            out.setdefault(int(c), []).append(x)
        return [out[c] for c in sorted(out)]

    def related(self, kind: str, a: int, b: int) -> bool:
        ids = getattr(self, kind)
        return ids[a] == ids[b]

    def to_json(self, names=None) -> dict:
        name = (lambda x: names[x]) if names is not None else int
        return {k: [[name(x) for x in c] for c in self.classes(k)] for k in ("L", "R", "H")}


def check_associative(table) -> tuple | None:
    """First (a, b, c) with (ab)c != a(bc), or None."""
    t = np.asarray(table)
    for a in range(t.shape[0]):
        bad = t[t[a, :], :] != t[a, t]
        if bad.any():
            b, c = np.argwhere(bad)[0]
            return a, int(b), int(c)
    return None


def _class_ids(eq: np.ndarray) -> np.ndarray:
    # eq is an equivalence matrix; the id of x is the rank of its smallest member
    first = eq.argmax(axis=1)
    _, ids = np.unique(first, return_inverse=True)
    return ids


def greens_classify(table) -> GreensClassification:
    """Classify a total associative table (or a structure with a ``compose`` table)."""
    if hasattr(table, "table"):
        table = table.table("compose")
    t = np.asarray(table, dtype=np.int64)
    m = t.shape[0]
    if t.shape != (m, m) or ((t < 0) | (t >= m)).any():
        raise PreconditionError("table must be a total square table over the carrier")
    bad = check_associative(t)
    if bad is not None:
        raise PreconditionError(f"table is not associative at {bad}")
    cols = np.broadcast_to(np.arange(m), (m, m))
    eye = np.eye(m, dtype=bool)
    leq_L = eye.copy()
    leq_L[t, cols] = True  # x;b <=_L b
    leq_R = eye.copy()
    leq_R[t, cols.T] = True  # b;x <=_R b
    L = leq_L & leq_L.T
    R = leq_R & leq_R.T
    H = L & R
    return GreensClassification(m, leq_L, leq_R, _class_ids(L), _class_ids(R), _class_ids(H))


def rel_semigroup_table(n: int) -> np.ndarray:
    """Composition table of all relations on base ``n``, indexed by relation code."""
    if not 1 <= n <= 3:
        raise ValueError("base size must be 1, 2 or 3")
    size = 2 ** (n * n)
    codes = np.arange(size)
    bits = (codes[:, None] >> np.arange(n * n)[None, :]) & 1
    mats = bits.reshape(size, n, n).astype(np.int64)  # mats[c, x, y]
    prod = np.einsum("axz,bzy->abxy", mats, mats) > 0
    weights = (1 << np.arange(n * n)).reshape(n, n)
    return (prod * weights).sum(axis=(2, 3))

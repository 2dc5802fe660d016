"""Signatures, terms, and the four injectivity formulas.

Terms are small frozen trees.  They can be evaluated concretely, over
:class:`~relkit.relcore.Relation` values, or abstractly, by table lookup in
anything exposing ``apply(symbol, *elements)`` and ``holds(rel, *elements)``
(see :class:`relkit.structures.FiniteStructure`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from . import relcore
from .errors import MissingOperationError
from .relcore import OpSymbol, Relation, op

REL_SYMBOLS = ("le", "inj", "eqd", "eqr")

# alternative spellings accepted by the parser and by signature lists
_ALIASES = {
    "0": "zero",
    "1": "top",
    "universal": "u",
    "-": "complement",
    "neg": "complement",
    "+": "join",
    ".": "meet",
    "*": "meet",
    "=>": "implies",
    "implication": "implies",
    "1'": "id",
    "identity": "id",
    "0'": "div",
    "diversity": "div",
    "~": "converse",
    "conv": "converse",
    "D": "dom",
    "R": "ran",
    "Ad": "antidom",
    "Ar": "antiran",
    "KL": "kl",
    "KR": "kr",
    "+|": "ojoin",
    ";": "compose",
}
_REL_ALIASES = {"<=": "le", "I": "inj", "=D": "eqd", "=R": "eqr"}


def parse_op(name: str) -> OpSymbol:
    name = name.strip()
    m = re.fullmatch(r"(?i)(kl|kr)\^(\d+)", name)
    if m:
        return op(f"{m.group(1).lower()}^{m.group(2)}")
    return op(_ALIASES.get(name, name))


def parse_rel(name: str) -> str:
    name = _REL_ALIASES.get(name.strip(), name.strip())
    if name not in REL_SYMBOLS:
        raise ValueError(f"unknown relation symbol {name!r}")
    return name


@dataclass(frozen=True)
class SignatureSpec:
    ops: frozenset
    rels: frozenset = frozenset()

    @classmethod
    def of(cls, ops=(), rels=()) -> "SignatureSpec":
        syms = [o if isinstance(o, OpSymbol) else parse_op(o) for o in ops]
        tags = [(s.tag, s.power) for s in syms]
        if len(set(tags)) != len(tags):
            raise ValueError("duplicate operation symbol in signature")
        return cls(frozenset(syms), frozenset(parse_rel(r) for r in rels))

    def __contains__(self, item) -> bool:
        if isinstance(item, str) and item in REL_SYMBOLS:
            return item in self.rels
        sym = item if isinstance(item, OpSymbol) else parse_op(item)
        return sym in self.ops

    def __le__(self, other: "SignatureSpec") -> bool:
        return self.ops <= other.ops and self.rels <= other.rels

    def __or__(self, other: "SignatureSpec") -> "SignatureSpec":
        return SignatureSpec(self.ops | other.ops, self.rels | other.rels)

    def sorted_ops(self) -> list:
        order = {t: i for i, t in enumerate(relcore.OP_TAGS)}
        return sorted(self.ops, key=lambda s: (s.arity, order[s.tag], s.power or 0))

    def to_json(self) -> dict:
        return {"ops": [s.name for s in self.sorted_ops()], "rels": sorted(self.rels)}

    @classmethod
    def from_json(cls, data) -> "SignatureSpec":
        return cls.of(data.get("ops", ()), data.get("rels", ()))

    def __str__(self):
        parts = [s.symbol for s in self.sorted_ops()] + sorted(self.rels)
        return "{" + ", ".join(parts) + "}"


def _sig(*ops, rels=()):
    return SignatureSpec.of(ops, rels)


PRESETS = {
    "semigroup": _sig("compose"),
    "complement-compose": _sig("complement", "compose"),
    "boolean-monoid": _sig("zero", "top", "complement", "join", "id", "compose"),
    "tarski": _sig("zero", "top", "complement", "join", "meet", "id", "converse", "compose"),
    "tarski-minus": _sig("zero", "top", "complement", "join", "meet", "id", "compose"),
    "oasis": _sig("dom", "ran", "converse", "compose", rels=["le"]),
    "kernel": _sig("kl", "kr", "compose"),
    "kernel-oasis": _sig("dom", "ran", "kl", "kr", "compose"),
    "kernel-e0": _sig("zero", "meet", "dom", "ran", "kl", "kr", "compose"),
    "kernel-complement-max": _sig(
        "zero", "top", "complement", "div", "id", "dom", "ran", "antidom", "antiran",
        "kl", "kr", "ojoin", "compose", rels=["le"],
    ),
    "kernel-meet-max": _sig(
        "zero", "top", "meet", "div", "id", "dom", "ran", "antidom", "antiran",
        "kl", "kr", "ojoin", "compose",
    ),
    "inverse-semigroup": _sig("converse", "compose"),
    "sigma0": _sig("id", "converse", "compose", rels=["le"]),
    "sigma2": _sig("zero", "div", "meet", "compose"),
    "sigma3": _sig("div", "u", "complement", "compose"),
}


def sigma1(n: int = 1) -> SignatureSpec:
    return _sig("id", f"kl^{n}", f"kr^{n}", rels=["le"])


def kernel_chain(n: int) -> SignatureSpec:
    return _sig(f"kl^{n}", f"kr^{n}", "compose")


def signature(text: str) -> SignatureSpec:
    """Resolve a preset name, ``kernel-chain:N``, ``sigma1:N`` or a comma list of symbols."""
    text = text.strip()
    if text in PRESETS:
        return PRESETS[text]
    if text.startswith("kernel-chain:"):
        return kernel_chain(int(text.split(":", 1)[1]))
    if text.startswith("sigma1"):
        return sigma1(int(text.split(":", 1)[1]) if ":" in text else 1)
    ops, rels = [], []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if _REL_ALIASES.get(part, part) in REL_SYMBOLS:
            rels.append(part)
        else:
            ops.append(part)
    return SignatureSpec.of(ops, rels)


# terms ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    symbol: OpSymbol
    args: tuple = ()

    def __post_init__(self):
        if len(self.args) != self.symbol.arity:
            raise ValueError(f"{self.symbol} expects {self.symbol.arity} arguments")

    def __str__(self):
        if not self.args:
            return self.symbol.name
        return "(" + " ".join([self.symbol.name, *map(str, self.args)]) + ")"


Term = Var | App


def T(name: str, *args) -> App:
    """Shorthand constructor: ``T("compose", x, T("kl", y))``."""
    return App(parse_op(name), tuple(Var(a) if isinstance(a, str) else a for a in args))


def variables(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    return set().union(*(variables(a) for a in t.args)) if t.args else set()


def symbols(t: Term) -> set:
    if isinstance(t, Var):
        return set()
    return {t.symbol}.union(*(symbols(a) for a in t.args))


_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def parse_term(text: str) -> Term:
    """Parse an s-expression such as ``(compose (kl x) (complement y))``.

    Bare words are variables unless they name a constant symbol.
    """
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise ValueError("empty term")
    pos = 0

    def atom(tok):
        try:
            sym = parse_op(tok)
        except ValueError:
            sym = None
        if sym is not None and sym.arity == 0:
            return App(sym)
        if not re.fullmatch(r"[A-Za-z_][\w']*", tok):
            raise ValueError(f"bad variable name {tok!r}")
        return Var(tok)

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of term")
        tok = tokens[pos]
        pos += 1
        if tok == ")":
            raise ValueError("unexpected ')'")
        if tok != "(":
            return atom(tok)
        if pos >= len(tokens):
            raise ValueError("unexpected end of term")
        sym = parse_op(tokens[pos])
        pos += 1
        args = []
        while True:
            if pos >= len(tokens):
                raise ValueError("missing ')'")
            if tokens[pos] == ")":
                pos += 1
                break
            args.append(parse())
        return App(sym, tuple(args))

    t = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens after term")
    return t


# evaluation ----------------------------------------------------------------------

def eval_concrete(t: Term, env: Mapping[str, Relation], n: int | None = None) -> Relation:
    """Evaluate in the full algebra of relations on a common base."""
    sizes = {r.n for r in env.values()}
    if n is not None:
        sizes.add(n)
    if len(sizes) > 1:
        raise relcore.DimensionError(f"environment mixes base sizes {sorted(sizes)}")
    base = sizes.pop() if sizes else None

    def go(node):
        if isinstance(node, Var):
            try:
                return env[node.name]
            except KeyError:
                raise KeyError(f"unbound variable {node.name!r}") from None
        return relcore.evaluate(node.symbol, *(go(a) for a in node.args), n=base)

    return go(t)


def eval_abstract(t: Term, structure, env: Mapping[str, int]):
    """Evaluate by table lookup; missing tables raise, they are never defaulted."""

    def go(node):
        if isinstance(node, Var):
            try:
                return env[node.name]
            except KeyError:
                raise KeyError(f"unbound variable {node.name!r}") from None
        return structure.apply(node.symbol, *(go(a) for a in node.args))

    return go(t)


# relation-algebra term definitions (the cross-check route) -------------------

_a, _b = Var("a"), Var("b")
_one, _ident = T("top"), T("id")


def _neg(t):
    return App(op("complement"), (t,))


def _meet(s, t):
    return App(op("meet"), (s, t))


def _comp(s, t):
    return App(op("compose"), (s, t))


def definition(symbol: OpSymbol) -> Term | None:
    """The defining relation-algebra term of a derived symbol, over ``a`` and ``b``.

    Returns ``None`` for the primitives ``0, 1, -, +, 1', ~, ;`` and for ``u``.
    """
    tag = symbol.tag
    if tag == "meet":
        return _neg(App(op("join"), (_neg(_a), _neg(_b))))
    if tag == "div":
        return _neg(_ident)
    if tag == "implies":
        return App(op("join"), (_b, _neg(_a)))
    if tag == "dom":
        return _meet(_ident, _comp(_a, _one))
    if tag == "ran":
        return _meet(_ident, _comp(_one, _a))
    if tag == "antidom":
        return _meet(_ident, _neg(T("dom", _a)))
    if tag == "antiran":
        return _meet(_ident, _neg(T("ran", _a)))
    if tag == "kl":
        return _comp(_a, T("converse", _a))
    if tag == "kr":
        return _comp(T("converse", _a), _a)
    if tag == "klpow":
        if symbol.power == 1:
            return T("kl", _a)
        return _comp(T("kl", _a), App(op(f"kl^{symbol.power - 1}"), (_a,)))
    if tag == "krpow":
        if symbol.power == 1:
            return T("kr", _a)
        return _comp(T("kr", _a), App(op(f"kr^{symbol.power - 1}"), (_a,)))
    if tag == "ojoin":
        return App(op("join"), (_a, _comp(_comp(T("antidom", _a), _b), T("antiran", _a))))
    return None


def substitute(t: Term, env: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return env.get(t.name, t)
    return App(t.symbol, tuple(substitute(a, env) for a in t.args))


def expand(t: Term) -> Term:
    """Rewrite every derived symbol into relation-algebra primitives."""
    if isinstance(t, Var):
        return t
    args = tuple(expand(a) for a in t.args)
    body = definition(t.symbol)
    if body is None:
        return App(t.symbol, args)
    return expand(substitute(body, dict(zip("ab", args))))


# injectivity formulas -------------------------------------------------------------

# Each formula is a conjunction of (lhs, "eq" | "le", rhs) over the variable a.
def inj_formula(i: int, n: int = 1) -> list:
    a, div, u = Var("a"), T("div"), T("u")
    if i == 0:
        return [
            (_comp(a, T("converse", a)), "le", T("id")),
            (_comp(T("converse", a), a), "le", T("id")),
        ]
    if i == 1:
        return [
            (App(op(f"kl^{n}"), (a,)), "le", T("id")),
            (App(op(f"kr^{n}"), (a,)), "le", T("id")),
        ]
    if i == 2:
        return [
            (_meet(_comp(a, div), a), "eq", T("zero")),
            (_meet(_comp(div, a), a), "eq", T("zero")),
        ]
    if i == 3:
        lhs = _comp(_comp(_neg(_comp(a, div)), u), _neg(_comp(div, a)))
        return [(lhs, "eq", u)]
    raise ValueError("formula index must be 0, 1, 2 or 3")


def inj_signature(i: int, n: int = 1) -> SignatureSpec:
    if i == 1:
        return sigma1(n)
    return PRESETS[f"sigma{i}"]


def check_inj_formula(i: int, a, context=None, n: int = 1) -> bool:
    """Evaluate the ``i``-th injectivity formula at ``a``.

    ``a`` is either a :class:`Relation` (evaluated in the full relation algebra
    on its base) or an element of ``context``, a finite structure whose tables
    must cover the formula's signature.
    """
    formula = inj_formula(i, n)
    if isinstance(a, Relation):
        for lhs, kind, rhs in formula:
            left = eval_concrete(lhs, {"a": a})
            right = eval_concrete(rhs, {"a": a})
            if not (left == right if kind == "eq" else left <= right):
                return False
        return True
    if context is None:
        raise ValueError("abstract evaluation needs a structure")
    needed = inj_signature(i, n)
    missing = [s.name for s in needed.sorted_ops() if not context.has_op(s)]
    missing += [r for r in sorted(needed.rels) if not context.has_rel(r)]
    if missing:
        raise MissingOperationError(f"formula {i} needs {', '.join(missing)}")
    elem = context.index(a)
    for lhs, kind, rhs in formula:
        left = eval_abstract(lhs, context, {"a": elem})
        right = eval_abstract(rhs, context, {"a": elem})
        if kind == "eq" and left != right:
            return False
        if kind == "le" and not context.holds("le", left, right):
            return False
    return True

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relkit import relcore
from relkit.errors import DimensionError
from relkit.relcore import OP_TAGS, OpSymbol, Relation, op
from relkit.terms import App, Var, eval_concrete, expand

import oracles


@st.composite
def relations(draw, n=None, max_n=4):
    n = n or draw(st.integers(1, max_n))
    return Relation.from_code(n, draw(st.integers(0, 2 ** (n * n) - 1)))


@st.composite
def relation_pairs(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    return draw(relations(n)), draw(relations(n))


def test_from_pairs_and_views():
    r = Relation.from_pairs(3, [(0, 1), (1, 2)])
    assert r.pairs() == [(0, 1), (1, 2)]
    assert (0, 1) in r and (1, 0) not in r
    assert len(r) == 2
    assert r.domain() == {0, 1} and r.range() == {1, 2}
    assert Relation.from_matrix(r.matrix()) == r
    assert Relation.from_json(r.to_json()) == r
    assert r.to_json() == {"n": 3, "pairs": [[0, 1], [1, 2]]}


def test_bad_relations_rejected():
    with pytest.raises(ValueError):
        Relation.from_pairs(2, [(0, 2)])
    with pytest.raises(ValueError):
        Relation(0, ())


def test_mixed_bases_raise():
    with pytest.raises(DimensionError):
        relcore.compose(relcore.identity(2), relcore.identity(3))


def test_code_round_trip():
    for r in relcore.all_relations(2):
        assert Relation.from_code(2, r.code) == r
    assert [r.code for r in relcore.all_relations(2)] == list(range(16))


def test_constants():
    assert relcore.universal(2).pairs() == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert relcore.identity(3) | relcore.diversity(3) == relcore.universal(3)
    assert not relcore.empty(3)


def test_symbol_names():
    assert op("kl^3").power == 3 and op("kl^3").name == "kl^3"
    assert op("compose").arity == 2 and op("top").arity == 0
    with pytest.raises(ValueError):
        OpSymbol("klpow")
    with pytest.raises(ValueError):
        op("nope")


def test_kernel_of_partial_map_is_equivalence_on_domain():
    f = Relation.from_pairs(4, [(0, 2), (1, 2), (3, 0)])
    k = relcore.kernel_left(f)
    assert relcore.is_equivalence(k) is False  # 2 is outside the domain
    assert relcore.is_local_equivalence(k)
    assert relcore.block_partition(relcore.kernel_left(Relation.from_pairs(3, [(0, 0), (1, 0), (2, 1)]))) == [[0, 1], [2]]


def test_orthogonal_join_example():
    a = Relation.from_pairs(3, [(0, 1)])
    b = Relation.from_pairs(3, [(0, 2), (2, 2), (2, 0), (1, 1)])
    # (2,2) avoids D(a)={0} and R(a)={1}; (0,2) starts in D(a); (1,1) ends in R(a)
    assert relcore.orthogonal_join(a, b).pairs() == [(0, 1), (2, 0), (2, 2)]


def test_kernel_power():
    r = Relation.from_pairs(3, [(0, 0), (1, 0), (1, 1), (2, 1)])
    k = relcore.kernel_left(r)
    assert relcore.kernel_left_power(r, 1) == k
    assert relcore.kernel_left_power(r, 2) == relcore.compose(k, k)
    with pytest.raises(ValueError):
        relcore.kernel_left_power(r, 0)


ALL_SYMBOLS = [OpSymbol(t) for t in OP_TAGS if t not in ("klpow", "krpow")] + [op("kl^2"), op("kr^3")]


@pytest.mark.parametrize("sym", ALL_SYMBOLS, ids=lambda s: s.name)
def test_clause_route_matches_explicit_points_exhaustively(sym):
    # every relation (or pair) on base 2
    rels = list(relcore.all_relations(2))
    if sym.arity == 0:
        assert oracles.pairs_of(relcore.evaluate(sym, n=3)) == oracles.semantic(sym.tag, 3)
        return
    if sym.tag in ("klpow", "krpow"):
        base = op(sym.tag[:2])
        for r in rels:
            k = relcore.evaluate(base, r)
            acc = k
            for _ in range(sym.power - 1):
                acc = relcore.compose(k, acc)
            assert relcore.evaluate(sym, r) == acc
        return
    if sym.arity == 1:
        for r in rels:
            assert oracles.pairs_of(relcore.evaluate(sym, r)) == oracles.semantic(sym.tag, 2, oracles.pairs_of(r))
    else:
        for r in rels:
            for s in rels:
                got = oracles.pairs_of(relcore.evaluate(sym, r, s))
                assert got == oracles.semantic(sym.tag, 2, oracles.pairs_of(r), oracles.pairs_of(s))


@settings(max_examples=150, deadline=None)
@given(relation_pairs())
def test_clause_route_agrees_with_term_definitions(rs):
    r, s = rs
    env = {"a": r, "b": s}
    for sym in ALL_SYMBOLS:
        if sym.arity == 0 or sym.tag == "u":
            continue
        args = (Var("a"),) if sym.arity == 1 else (Var("a"), Var("b"))
        term = expand(App(sym, args))
        assert eval_concrete(term, env, n=r.n) == relcore.evaluate(sym, *((r,) if sym.arity == 1 else (r, s))), sym


@settings(max_examples=200, deadline=None)
@given(relations(max_n=5))
def test_involutions_and_de_morgan(r):
    assert relcore.converse(relcore.converse(r)) == r
    assert relcore.complement(relcore.complement(r)) == r
    assert relcore.dom(r) == relcore.meet(relcore.identity(r.n), relcore.compose(r, relcore.universal(r.n)))
    assert relcore.kernel_right(r) == relcore.kernel_left(relcore.converse(r))
    assert relcore.antidom(r) | relcore.dom(r) == relcore.identity(r.n)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(relations(n), relations(n), relations(n))))
def test_composition_is_associative(t):
    a, b, c = t
    assert (a @ b) @ c == a @ (b @ c)
    assert relcore.converse(a @ b) == relcore.converse(b) @ relcore.converse(a)


@settings(max_examples=100, deadline=None)
@given(relations(max_n=5))
def test_predicates_agree_with_oracle(r):
    assert relcore.is_injective_pmap(r) == oracles.is_injective_pmap(oracles.pairs_of(r))
    p = oracles.pairs_of(r)
    assert relcore.is_symmetric(r) == (p == oracles.converse(p))
    assert relcore.is_transitive(r) == (oracles.compose(r.n, p, p) <= p)


def test_matrix_is_boolean():
    m = Relation.from_pairs(2, [(1, 0)]).matrix()
    assert m.dtype == np.bool_ and m.tolist() == [[False, False], [True, False]]


def test_injective_partial_maps_count():
    # sum over k of C(n,k)^2 k!
    assert sum(1 for _ in relcore.injective_partial_maps(3)) == 34

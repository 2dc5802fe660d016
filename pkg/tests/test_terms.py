import pytest

from relkit import relcore
from relkit.errors import MissingOperationError
from relkit.relcore import Relation, op
from relkit.structures import subalgebra
from relkit.terms import (PRESETS, App, SignatureSpec, T, Var, check_inj_formula, eval_abstract,
                          eval_concrete, expand, inj_signature, parse_term, signature, symbols, variables)


def test_parse_and_print_round_trip():
    t = parse_term("(compose (kl x) (complement y))")
    assert t == T("compose", T("kl", "x"), T("complement", "y"))
    assert parse_term(str(t)) == t
    assert variables(t) == {"x", "y"}
    assert symbols(t) == {op("compose"), op("kl"), op("complement")}


def test_parse_aliases_and_constants():
    assert parse_term("(; (KL x) 1')") == T("compose", T("kl", "x"), T("id"))
    assert parse_term("(KL^2 x)") == App(op("kl^2"), (Var("x"),))
    assert parse_term("0'") == T("div")


@pytest.mark.parametrize("bad", ["", "(kl x", "(kl x y)", "x)", "(nosuch x)", "(kl 3x)"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_term(bad)


def test_eval_concrete_needs_common_base():
    with pytest.raises(relcore.DimensionError):
        eval_concrete(parse_term("(compose x y)"), {"x": relcore.identity(2), "y": relcore.identity(3)})
    with pytest.raises(KeyError):
        eval_concrete(parse_term("(kl x)"), {})


def test_constant_terms_need_a_base():
    assert eval_concrete(parse_term("(complement 1')"), {}, n=2) == relcore.diversity(2)


def test_signature_presets_and_lists():
    assert signature("semigroup") == SignatureSpec.of(["compose"])
    assert signature("kernel-chain:2") == SignatureSpec.of(["kl^2", "kr^2", "compose"])
    assert signature("-, ;") == PRESETS["complement-compose"]
    sig = signature("D,R,;,<=")
    assert "le" in sig and "dom" in sig and "kl" not in sig
    assert SignatureSpec.from_json(sig.to_json()) == sig
    assert PRESETS["semigroup"] <= PRESETS["kernel"]
    with pytest.raises(ValueError):
        SignatureSpec.of(["compose", ";"])


def test_expand_reaches_primitives():
    primitives = {"zero", "top", "complement", "join", "id", "converse", "compose"}
    for name in ("ojoin", "kl^3", "antiran", "implies", "meet"):
        sym = op(name)
        args = tuple(Var(v) for v in "ab"[: sym.arity])
        assert {s.tag for s in symbols(expand(App(sym, args)))} <= primitives


@pytest.mark.parametrize("i,n", [(0, 1), (1, 1), (1, 2), (2, 1), (3, 1)])
def test_injectivity_formulas_on_base_two(i, n):
    for r in relcore.all_relations(2):
        assert check_inj_formula(i, r, n=n) == relcore.is_injective_pmap(r)


def test_abstract_evaluation_matches_concrete_in_a_subalgebra():
    # close two relations on base 2 under sigma3 and compare the two routes
    a = Relation.from_pairs(2, [(0, 1)])
    b = Relation.from_pairs(2, [(0, 0), (0, 1)])
    s, rep = subalgebra({"a": a, "b": b}, inj_signature(3))
    for x in range(len(s)):
        assert check_inj_formula(3, x, s) == check_inj_formula(3, rep.assignment[x])
    t = parse_term("(compose (complement a) u)")
    x = s.index("a")
    assert rep.assignment[eval_abstract(t, s, {"a": x})] == eval_concrete(t, {"a": a})


def test_abstract_check_reports_missing_tables():
    s, _ = subalgebra({"a": relcore.identity(2)}, PRESETS["semigroup"])
    with pytest.raises(MissingOperationError, match="div"):
        check_inj_formula(3, "a", s)

import pytest

from relkit import relcore
from relkit.constructions import build_E0, build_E1, build_theta, build_theta_plus
from relkit.errors import MissingOperationError, PreconditionError, UndefinedEntryError
from relkit.pgroups import SquarePartialGroup, cyclic_group
from relkit.relcore import Relation, op
from relkit.structures import (FiniteStructure, RepresentationCandidate, check_idempotent_injection_lemma,
                               check_local_equivalence_lemma, inflate, quotient_representation,
                               search_representation, subalgebra, verify_representation)
from relkit.terms import PRESETS, SignatureSpec, signature

SEMI = PRESETS["semigroup"]


def two_element():
    return FiniteStructure(["0", "e"], SEMI, {op("compose"): [[0, 0], [0, 1]]})


def no_identity_free_idempotent():
    # a;a=a with a.1'=0 and a!=0: a nonempty idempotent relation always contains a loop
    sig = SignatureSpec.of(["zero", "id", "meet", "compose"])
    return FiniteStructure(["0", "i", "a"], sig, {
        op("zero"): 0,
        op("id"): 1,
        op("meet"): [[0, 0, 0], [0, 1, 0], [0, 0, 2]],
        op("compose"): [[0, 0, 0], [0, 1, 2], [0, 2, 2]],
    })


@pytest.fixture(scope="module")
def theta_plus_trivial():
    p = SquarePartialGroup.from_group(cyclic_group(1))
    return build_theta_plus(p, cyclic_group(3), [0])


# structures -------------------------------------------------------------------------

def test_json_round_trip():
    s = no_identity_free_idempotent()
    again = FiniteStructure.from_json(s.to_json())
    assert again.to_json() == s.to_json()
    assert again.apply("compose", again.index("a"), again.index("i")) == again.index("a")


def test_missing_and_bad_tables():
    with pytest.raises(MissingOperationError):
        FiniteStructure(["x"], SEMI, {})
    with pytest.raises(ValueError):
        FiniteStructure(["x"], SEMI, {op("compose"): [[1]]})
    sig = SignatureSpec.of(["compose"], ["le"])
    with pytest.raises(ValueError, match="antisymmetric"):
        FiniteStructure(["x", "y"], sig, {op("compose"): [[0, 0], [0, 0]]}, {"le": [[True, True], [True, True]]})
    with pytest.raises(MissingOperationError):
        two_element().apply("kl", 0)


def test_partial_tables_raise_on_lookup():
    s = FiniteStructure(["x", "y"], SEMI, {op("compose"): [[0, None], [None, 1]]}, partial=True)
    assert s.apply("compose", 0, 0) == 0
    with pytest.raises(UndefinedEntryError):
        s.apply("compose", 0, 1)


def test_reduct():
    s = no_identity_free_idempotent().reduct(SEMI)
    assert s.signature == SEMI and s.is_associative()
    with pytest.raises(MissingOperationError):
        two_element().reduct(PRESETS["kernel"])


# verification -------------------------------------------------------------------------

def test_theta_on_B3_Z3_in_kernel_signature():
    cand = build_theta(cyclic_group(3))
    assert verify_representation(cand, PRESETS["kernel"]).ok


def test_one_element_idempotent():
    s = FiniteStructure(["x"], SEMI, {op("compose"): [[0]]})
    assert verify_representation(RepresentationCandidate(s, 1, [relcore.identity(1)])).ok


def test_non_injective_assignment():
    s = two_element()
    v = verify_representation(RepresentationCandidate(s, 1, [relcore.identity(1)] * 2))
    assert not v.ok and any("not injective" in x for x in v.violations)


def test_wrong_table_entry_is_named():
    s = FiniteStructure(["0", "e"], SEMI, {op("compose"): [[0, 0], [0, 0]]})
    v = verify_representation(RepresentationCandidate(s, 1, [relcore.empty(1), relcore.identity(1)]))
    assert v.violations == ["compose: e ; e = 0 fails"]


def test_top_versus_universal():
    sig = SignatureSpec.of(["top", "compose"])
    s = FiniteStructure(["0", "t"], sig, {op("top"): 1, op("compose"): [[0, 0], [0, 1]]})
    # top only has to contain every assigned relation; the identity on base 2 does
    cand = RepresentationCandidate(s, 2, [relcore.empty(2), relcore.identity(2)])
    assert verify_representation(cand).ok
    u = FiniteStructure(["0", "t"], SignatureSpec.of(["u", "compose"]), {op("u"): 1, op("compose"): [[0, 0], [0, 1]]})
    assert not verify_representation(RepresentationCandidate(u, 2, [relcore.empty(2), relcore.identity(2)])).ok


def test_relation_tables_checked():
    sig = SignatureSpec.of(["compose"], ["le"])
    s = FiniteStructure(["0", "e"], sig, {op("compose"): [[0, 0], [0, 1]]},
                        {"le": [[True, False], [False, True]]})
    v = verify_representation(RepresentationCandidate(s, 1, [relcore.empty(1), relcore.identity(1)]))
    assert not v.ok and "le" in v.violations[0]


# search -------------------------------------------------------------------------------------

def test_search_two_element():
    res = search_representation(two_element(), 1)
    assert res.found and res.witness.relation("e") == relcore.identity(1)
    assert res.witness.relation("0") == relcore.empty(1)


def test_search_E0_trivial():
    e0 = build_E0(SquarePartialGroup.from_group(cyclic_group(1)), PRESETS["kernel"])
    res = search_representation(e0, 3)
    assert res.found and res.witness.base_size == 3
    assert verify_representation(res.witness).ok


def test_search_exhausts_on_a_contradiction():
    s = no_identity_free_idempotent()
    res = search_representation(s, 3)
    assert not res.found and res.verdict == "none_up_to" and res.bound == 3
    # independent check: no idempotent relation avoids the diagonal while being nonempty
    for n in (1, 2, 3):
        for r in relcore.all_relations(n):
            if r and relcore.compose(r, r) == r:
                assert relcore.meet(r, relcore.identity(n))


def test_search_respects_generators():
    s, rep = subalgebra({"a": Relation.from_pairs(2, [(0, 1)])}, PRESETS["inverse-semigroup"])
    res = search_representation(s, 2, generators=["a"])
    assert res.found and verify_representation(res.witness).ok
    with pytest.raises(ValueError):
        search_representation(s, 0)


def test_subalgebra_closes():
    s, rep = subalgebra({"x": Relation.from_pairs(2, [(0, 1)])}, PRESETS["complement-compose"])
    assert verify_representation(rep).ok
    assert len(s) == len(set(rep.assignment))


# quotient -----------------------------------------------------------------------------------

def four_element():
    sig = PRESETS["complement-compose"]
    rels = {"0": relcore.empty(2), "1'": relcore.identity(2), "0'": relcore.diversity(2), "1": relcore.universal(2)}
    s, rep = subalgebra(rels, sig)
    return s, rep


def test_quotient_identity_is_noop():
    s, rep = four_element()
    assert len(s) == 4
    q = quotient_representation(rep, "1'")
    assert q.assignment == rep.assignment


def test_quotient_undoes_inflation():
    s, rep = four_element()
    big = inflate(rep, 2)
    assert big.base_size == 4 and verify_representation(big).ok
    assert relcore.block_partition(big.relation("1'")) == [[0, 1], [2, 3]]
    q = quotient_representation(big, "1'")
    assert q.base_size == 2 and q.assignment == rep.assignment
    assert q.relation("1'") == relcore.identity(2)
    assert verify_representation(q).ok


def test_quotient_needs_an_equivalence():
    s, rep = four_element()
    with pytest.raises(PreconditionError):
        quotient_representation(rep, "0'")


# lemma checks -----------------------------------------------------------------------------------

def z2_local_equivalence():
    e = Relation.from_pairs(3, [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)])
    return subalgebra({"e": e}, PRESETS["complement-compose"])


def test_local_equivalence_lemma_confirmed():
    s, rep = z2_local_equivalence()
    assert len(s) == 2
    v = check_local_equivalence_lemma(rep, "e")
    assert v.status == "confirmed" and "universality not asserted" in v.notes[-1]


def test_equivalence_on_two_points_of_three_misses_the_hypothesis():
    e = Relation.from_pairs(3, [(0, 0), (0, 1), (1, 0), (1, 1)])
    s, rep = subalgebra({"e": e}, PRESETS["complement-compose"])
    assert check_local_equivalence_lemma(rep, "e").status == "hypothesis unmet"


def test_local_equivalence_lemma_on_theta_plus_top(theta_plus_trivial):
    cand = theta_plus_trivial
    top = cand.structure.apply("top")
    v = check_local_equivalence_lemma(cand, top)
    assert v.status == "confirmed" and "universal relation confirmed" in v.notes


def test_local_equivalence_lemma_unmet():
    s, rep = subalgebra({"x": Relation.from_pairs(2, [(0, 1)])}, PRESETS["complement-compose"])
    assert check_local_equivalence_lemma(rep, "x").status == "hypothesis unmet"


def test_idempotent_injection_lemma_identity():
    sig = SignatureSpec.of(["u", "id", "complement", "compose"])
    s, rep = subalgebra({"a": Relation.from_pairs(3, [(0, 1), (1, 2)])}, sig)
    v = check_idempotent_injection_lemma(rep, "id", "id")
    assert v.status == "confirmed" and rep.relation("id") == relcore.identity(3)


def test_idempotent_injection_lemma_on_theta_plus(theta_plus_trivial):
    cand = theta_plus_trivial
    v = check_idempotent_injection_lemma(cand, "0[00]", "0[01]")
    assert v.status == "confirmed"
    assert cand.relation("0[00]") == relcore.dom(cand.relation("0[01]"))


def test_idempotent_injection_lemma_unmet(theta_plus_trivial):
    v = check_idempotent_injection_lemma(theta_plus_trivial, "0[01]", "0[01]")
    assert v.status == "hypothesis unmet"


def test_idempotent_injection_lemma_needs_tables():
    with pytest.raises(MissingOperationError):
        check_idempotent_injection_lemma(RepresentationCandidate(two_element(), 1, [relcore.empty(1), relcore.identity(1)]), "e", "e")

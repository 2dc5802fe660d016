import pytest

from relkit import relcore
from relkit.constructions import (BAR, ONE, PLAIN, ZERO, block_complement, block_square, build_B3, build_E0,
                                  build_E1, build_E2, build_theta, build_theta_plus, complement_square_condition,
                                  theta_E0)
from relkit.errors import ClosureError, MissingOperationError, PreconditionError
from relkit.jsonio import load_pgroup
from relkit.pgroups import SquarePartialGroup, cyclic_group, direct_product, symmetric_group
from relkit.structures import verify_representation
from relkit.terms import PRESETS, SignatureSpec
from conftest import FIXTURES

CC = SignatureSpec.of(["complement", "compose"])


@pytest.fixture(scope="module")
def z2():
    return load_pgroup(FIXTURES / "z2_pgroup.json")


@pytest.fixture(scope="module")
def trivial():
    return SquarePartialGroup.from_group(cyclic_group(1))


# E0 ----------------------------------------------------------------------------------------------

def test_E0_carrier(trivial, z2):
    e0 = build_E0(trivial)
    assert e0.carrier == ["0", "0[00]", "0[11]", "0[22]", "0[01]", "0[12]", "0[02]"]
    # diagonal cells hold e only; the 01 and 12 cells hold sqrt; 02 holds all of P
    assert len(build_E0(z2)) == 1 + 3 + 2 + 2 + 2
    p = SquarePartialGroup.from_group(cyclic_group(7), sqrt=["0", "1", "6"])
    assert len(build_E0(p)) == 1 + 3 + 3 + 3 + 5


def test_E0_products(z2):
    e0 = build_E0(z2)
    c = lambda x, y: e0.carrier[e0.apply("compose", e0.index(x), e0.index(y))]
    assert c("1[01]", "1[12]") == "0[02]"
    assert c("1[01]", "0[11]") == "1[01]"
    assert c("1[12]", "1[01]") == "0"
    assert e0.carrier[e0.apply("kl", e0.index("1[02]"))] == "0[00]"
    assert e0.is_associative()


def test_E0_rejects_invalid_pgroup():
    with pytest.raises(PreconditionError):
        build_E0(load_pgroup(FIXTURES / "assoc_violation_pgroup.json"))


def test_E0_is_represented_by_theta(z2):
    g = direct_product(cyclic_group(3), cyclic_group(2))
    inj = [g.index("0:0"), g.index("0:1")]
    cand = theta_E0(z2, g, inj)
    assert verify_representation(cand).ok
    with pytest.raises(PreconditionError):
        theta_E0(z2, cyclic_group(3), [0, 1])


# B3 and theta ------------------------------------------------------------------------------------

@pytest.mark.parametrize("g", [cyclic_group(1), cyclic_group(3), symmetric_group(3)])
def test_theta_represents_B3(g):
    b3 = build_B3(g)
    assert len(b3) == 1 + 9 * len(g)
    assert b3.is_associative()
    cand = build_theta(g, b3)
    assert len(set(cand.assignment)) == len(b3)
    assert verify_representation(cand).ok


def test_B3_converse_is_inverse():
    b3 = build_B3(cyclic_group(4))
    assert b3.carrier[b3.apply("converse", b3.index("1[02]"))] == "3[20]"
    assert b3.carrier[b3.apply("compose", b3.index("1[02]"), b3.index("3[21]"))] == "0[01]"


@pytest.mark.parametrize("k", [3, 4, 5])
def test_kernel_of_block_complement_is_full(k):
    g = cyclic_group(k)
    for x in range(k):
        for i in range(3):
            for j in range(3):
                bc = block_complement(g, x, i, j)
                assert len(bc) == k * (k - 1)
                assert relcore.kernel_left(bc) == block_square(k, i)


def test_block_complement_needs_three_elements():
    g = cyclic_group(2)
    bc = block_complement(g, 0, 0, 1)
    assert relcore.kernel_left(bc) != block_square(2, 0)  # a perfect matching only


# E1 and E2 -------------------------------------------------------------------------------------

def test_formal_sum_carrier_sizes(trivial, z2):
    assert len(build_E1(trivial)) == 7680 and len(build_E2(trivial)) == 7680
    assert build_E1(z2).carrier_counts() == {"plain_and_barred": 12288, "plain_only": 63872}
    assert build_E2(z2).carrier_counts() == {"plain_and_barred": 14976, "plain_only": 111520}


def test_names_and_grids(z2):
    e1 = build_E1(z2)
    x = e1.index("1[01]+~0[12]+one[20]")
    assert e1.grid(x)[1] == (PLAIN, 1) and e1.grid(x)[5] == (BAR, 0) and e1.grid(x)[6] == ONE
    with pytest.raises(KeyError):
        e1.index("1[01]+~0[02]")  # two specials in row 0


def name_op(s, tag, *xs):
    return s.carrier[s.apply(tag, *(s.index(x) for x in xs))]


def test_E1_barred_rules(z2):
    e1 = build_E1(z2)
    assert name_op(e1, "compose", "~1[01]", "1[12]") == "~0[02]"
    assert name_op(e1, "compose", "1[01]", "~0[12]") == "~1[02]"
    assert name_op(e1, "compose", "~1[01]", "~1[12]") == "one[02]"
    assert name_op(e1, "compose", "one[01]", "1[12]") == "one[02]"
    assert name_op(e1, "complement", "1[01]") == "one[00]+~1[01]+one[02]+one[10]+one[11]+one[12]+one[20]+one[21]+one[22]"
    lit = build_E1(z2, literal=True)
    assert name_op(lit, "compose", "~1[01]", "1[12]") == "one[02]"


def test_E1_unary_ops(z2):
    e1 = build_E1(z2)
    assert name_op(e1, "dom", "~1[01]+one[20]") == "0[00]+0[22]"
    assert name_op(e1, "kl", "~1[01]+0[12]") == "one[00]+0[11]"
    assert name_op(e1, "kr", "~1[01]") == "one[11]"
    assert name_op(e1, "antidom", "1[01]") == "0[11]+0[22]"
    with pytest.raises(MissingOperationError):
        e1.apply("meet", 0, 0)


def test_E2_default_and_strict(z2):
    e2 = build_E2(z2)
    strict = build_E2(z2, strict=True)
    assert name_op(e2, "compose", "1[01]", "~{1}[12]") == "~{0}[02]"
    assert name_op(strict, "compose", "1[01]", "~{1}[12]") == "0"
    assert name_op(e2, "compose", "~{0,1}[01]", "1[12]") == "~{0,1}[02]"
    assert name_op(strict, "compose", "~{0,1}[01]", "1[12]") == "~{0,1}[02]"
    assert name_op(e2, "meet", "1[01]", "~{0}[01]") == "1[01]"
    assert name_op(e2, "meet", "1[01]", "~{1}[01]") == "0"
    assert name_op(strict, "meet", "1[01]", "~{0}[01]") == "0"
    assert name_op(e2, "meet", "~{0}[01]", "~{1}[01]") == "~{0,1}[01]"
    assert name_op(e2, "meet", "~{0}[01]", "one[01]") == "~{0}[01]"
    assert name_op(strict, "top").count("one") == 6 and name_op(e2, "top").count("one") == 9


def test_E2_meet_is_not_closed(z2):
    e2 = build_E2(z2)
    x, y = e2.index("1[01]+one[02]"), e2.index("one[01]+0[02]")
    with pytest.raises(ClosureError):
        e2.apply("meet", x, y)


def test_E1_le_is_cellwise(z2):
    e1 = build_E1(z2)
    le = lambda a, b: e1.holds("le", e1.index(a), e1.index(b))
    assert le("1[01]", "one[01]+0[12]") and le("0", "1[01]")
    assert not le("1[01]", "~0[01]")


def test_formal_sums_are_too_big_for_tables(z2):
    with pytest.raises(ValueError):
        build_E1(z2).table("compose")


# theta-plus -----------------------------------------------------------------------------------

def test_complement_condition():
    z3 = cyclic_group(3)
    assert complement_square_condition(z3, [0])
    assert not complement_square_condition(z3, [0, 1])
    g = direct_product(z3, cyclic_group(2))
    assert complement_square_condition(g, [g.index("0:0"), g.index("0:1")])


def test_theta_plus_trivial(trivial):
    cand = build_theta_plus(trivial, cyclic_group(3), [0])
    assert cand.base_size == 9 and not cand.meta["group_replaced"]
    assert verify_representation(cand, CC).ok


def test_theta_plus_replaces_small_groups(z2):
    cand = build_theta_plus(z2, cyclic_group(2), [0, 1])
    assert cand.meta["group_replaced"] and cand.base_size == 18
    assert verify_representation(cand, CC).ok


def test_theta_plus_refutes_the_literal_rule(trivial):
    cand = build_theta_plus(trivial, cyclic_group(3), [0], build_E1(trivial, literal=True))
    v = verify_representation(cand, CC)
    assert not v.ok and any("fails" in x for x in v.violations)

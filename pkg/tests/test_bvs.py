import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braidrep.bvs import (
    BVS,
    BraidWord,
    braid_generator,
    braid_generators,
    check_unitary,
    check_ybe,
    eval_braid_word,
    flip_bvs,
    operator_order,
    parse_braid_word,
)
from braidrep.cyclo import CycMatrix, kron, make_root
from braidrep.errors import IndexOutOfRange, NotInvertible, ParseError, ShapeMismatch, SizeGuard
from braidrep.gaussian import gaussian_bvs
from braidrep.grouptype import PhaseTwist, SetSolution, linearize

# Order of R for m=2; confirmed independently with floating point powers.
GAUSSIAN_R_ORDER_M2 = 8


def numeric_ybe(c, d):
    """Floating-point oracle for the braid equation."""
    c = c.to_numpy()
    eye = np.eye(d)
    c12, c23 = np.kron(c, eye), np.kron(eye, c)
    return np.allclose(c12 @ c23 @ c12, c23 @ c12 @ c23)


def test_flip_ybe():
    b = flip_bvs(3)
    assert check_ybe(b).holds
    assert b.unitary


def test_gaussian_m3_ybe():
    assert check_ybe(gaussian_bvs(3).bvs).holds


def test_twisted_flip_still_satisfies_ybe():
    # A diagonal twist of the flip can never break the braid equation.
    c = flip_bvs(2).c.to_dict()
    c[(2, 1)] = make_root(1, 3)
    b = BVS(2, CycMatrix.from_dict(4, 4, c))
    assert check_ybe(b).holds
    assert numeric_ybe(b.c, 2)


def test_corrupted_flip_located_discrepancy():
    # exchange two columns of the swap: still a permutation, no longer a braiding
    perm = [0, 2, 3, 1]
    b = BVS(2, CycMatrix.monomial(perm))
    rep = check_ybe(b)
    assert not rep.holds
    assert rep.first_discrepancy is not None
    assert not numeric_ybe(b.c, 2)


def test_unitary_examples():
    assert check_unitary(BVS(2, CycMatrix.identity(4)))
    assert check_unitary(gaussian_bvs(2).bvs)
    assert not check_unitary(BVS(2, flip_bvs(2).c.scale(2)))


def test_bvs_construction_errors():
    with pytest.raises(ShapeMismatch):
        BVS(2, CycMatrix.identity(3))
    with pytest.raises(NotInvertible):
        BVS(1, CycMatrix.zeros(1, 1))
    with pytest.raises(ValueError):
        BVS(2, flip_bvs(2).c.scale(2), unitary=True)


def test_operator_order():
    assert operator_order(CycMatrix.identity(3)) == 1
    assert operator_order(CycMatrix.diag([make_root(1, 6), 1])) == 6
    assert operator_order(gaussian_bvs(2).R) == GAUSSIAN_R_ORDER_M2
    assert operator_order(CycMatrix.diag([2, 1]), budget=50) is None
    with pytest.raises(NotInvertible):
        operator_order(CycMatrix.from_rows([[1, 1], [1, 1]]))


def test_braid_generator_basics():
    b = gaussian_bvs(2).bvs
    assert braid_generator(b, 2, 1) == b.c
    g = braid_generators(b, 3)
    assert g[0] @ g[1] @ g[0] == g[1] @ g[0] @ g[1]
    with pytest.raises(IndexOutOfRange):
        braid_generator(b, 3, 3)


def test_distant_commutation_m3():
    b = gaussian_bvs(3).bvs
    s1, s3 = braid_generator(b, 4, 1), braid_generator(b, 4, 3)
    assert s1 @ s3 == s3 @ s1


def test_size_guard():
    b = gaussian_bvs(5).bvs
    with pytest.raises(SizeGuard):
        braid_generator(b, 6, 1)


def test_words():
    b = gaussian_bvs(2).bvs
    assert eval_braid_word(b, BraidWord(3)).is_identity()
    assert eval_braid_word(b, parse_braid_word("1 -1", 3)).is_identity()
    assert eval_braid_word(b, parse_braid_word("1 2 1")) == eval_braid_word(b, parse_braid_word("2 1 2"))


def test_parse():
    w = parse_braid_word("s1 s2^-1 s1")
    assert w.letters == (1, -2, 1) and w.strands == 3
    assert parse_braid_word("1 -2 1") == w
    assert str(w) == "s1 s2^-1 s1"
    with pytest.raises(IndexError):
        parse_braid_word("s0")
    with pytest.raises(ParseError) as e:
        parse_braid_word("s1 x2")
    assert e.value.position == 3
    with pytest.raises(IndexOutOfRange):
        parse_braid_word("s3", strands=3)


words = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=6)


@pytest.fixture(scope="module")
def shipped():
    z4 = PhaseTwist.from_exponents([[0, 0], [0, 1]], 4)
    return [gaussian_bvs(2).bvs, flip_bvs(2), linearize(SetSolution.flip(2), z4)]


@settings(max_examples=25, deadline=None)
@given(words, words, st.integers(0, 2))
def test_word_homomorphism(shipped, a, b, k):
    bvs = shipped[k]
    wa, wb = BraidWord(4, tuple(a)), BraidWord(4, tuple(b))
    assert eval_braid_word(bvs, wa + wb) == eval_braid_word(bvs, wa) @ eval_braid_word(bvs, wb)
    img = eval_braid_word(bvs, wa)
    assert (img @ img.adjoint()).is_identity()
    assert eval_braid_word(bvs, wa.inverse()) == img.adjoint()


@pytest.mark.parametrize("n", [3, 4])
def test_shipped_braid_relations(shipped, n):
    for b in shipped:
        g = braid_generators(b, n)
        for i in range(n - 2):
            assert g[i] @ g[i + 1] @ g[i] == g[i + 1] @ g[i] @ g[i + 1]
        for i in range(n - 1):
            for j in range(i + 2, n - 1):
                assert g[i] @ g[j] == g[j] @ g[i]


def test_kron_convention():
    # leftmost leg is most significant: sigma_1 on (C^2)^{(x)3} is c (x) I
    b = gaussian_bvs(2).bvs
    assert braid_generator(b, 3, 1) == kron(b.c, CycMatrix.identity(2))


def test_json_round_trip():
    b = gaussian_bvs(3).bvs
    assert BVS.from_json(b.to_json()) == b

import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braidrep.cyclo import CycMatrix, CycNum, cyclotomic_poly, make_root, sqrt_int, totient, kron
from braidrep.errors import NotInvertible, ShapeMismatch

mpmath.mp.dps = 50

CONDUCTORS = [1, 2, 3, 4, 5, 6, 8, 9, 12, 15, 16, 24]


def embed(x: CycNum):
    """Independent complex evaluation at zeta_N = exp(2 pi i / N), 50 digits."""
    z = mpmath.exp(2j * mpmath.pi / x.N)
    return sum(mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator * z**k for k, c in enumerate(x.coeffs))


def close(a, b):
    return abs(a - b) < mpmath.mpf(10) ** -40


@st.composite
def cycnums(draw, N=None):
    N = N or draw(st.sampled_from(CONDUCTORS))
    k = totient(N)
    coeffs = draw(st.lists(st.integers(-5, 5), min_size=k, max_size=k))
    den = draw(st.integers(1, 4))
    return CycNum(N, [Fraction(c, den) for c in coeffs])


def test_cyclotomic_polys():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(3) == (1, 1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)
    assert [totient(n) for n in (1, 2, 8, 9, 12, 24)] == [1, 1, 4, 6, 4, 8]


def test_cube_root_sum():
    z = make_root(1, 3)
    assert z + z**2 == -1
    assert z**3 == 1


def test_one_plus_zeta3_is_root_of_unity():
    x = 1 + make_root(1, 3)
    assert x == make_root(1, 6)
    assert x.root_of_unity() == (1, 6)
    assert (1 + make_root(1, 5)).root_of_unity() is None


@pytest.mark.parametrize("n", range(1, 51))
def test_sqrt_int_squares(n):
    r = sqrt_int(n)
    assert r * r == n
    assert close(embed(r), mpmath.sqrt(n))


def test_mixed_conductor_equality():
    assert make_root(1, 4) == make_root(2, 8)
    assert make_root(3, 12) == make_root(1, 4)
    assert make_root(2, 4) == -1
    assert hash(make_root(1, 4)) == hash(make_root(2, 8))


@settings(max_examples=60, deadline=None)
@given(cycnums(), cycnums())
def test_arithmetic_matches_embedding(a, b):
    assert close(embed(a + b), embed(a) + embed(b))
    assert close(embed(a - b), embed(a) - embed(b))
    assert close(embed(a * b), embed(a) * embed(b))
    assert close(embed(a.conj()), mpmath.conj(embed(a)))


@settings(max_examples=40, deadline=None)
@given(cycnums())
def test_inverse(a):
    if a.is_zero():
        with pytest.raises(NotInvertible):
            a.inverse()
        return
    assert a * a.inverse() == 1
    assert close(embed(a.inverse()), 1 / embed(a))


@settings(max_examples=40, deadline=None)
@given(cycnums(), cycnums(), cycnums())
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a


@settings(max_examples=30, deadline=None)
@given(cycnums())
def test_json_round_trip(a):
    assert CycNum.from_json(json.loads(json.dumps(a.to_json()))) == a


def test_galois_and_roots():
    z = make_root(1, 8)
    assert z.galois(3) == make_root(3, 8)
    assert make_root(5, 12).root_of_unity() == (5, 12)
    assert CycNum.from_rational(2).root_of_unity() is None
    assert (make_root(1, 5) ** -3) == make_root(2, 5)


# -- matrices -----------------------------------------------------------------


def rand_matrix(rows, cols, N, seed):
    import random

    r = random.Random(seed)
    return CycMatrix.from_rows(
        [[CycNum(N, [r.randint(-2, 2) for _ in range(totient(N))]) for _ in range(cols)] for _ in range(rows)], N
    )


def test_matrix_product_matches_entrywise():
    A = rand_matrix(3, 4, 12, 1)
    B = rand_matrix(4, 2, 12, 2)
    C = A @ B
    for i in range(3):
        for j in range(2):
            assert C[i, j] == sum((A[i, k] * B[k, j] for k in range(4)), CycNum.from_rational(0))


def test_matrix_inverse_and_shapes():
    A = rand_matrix(3, 3, 5, 7) + CycMatrix.identity(3).scale(7)
    assert (A @ A.inverse()).is_identity()
    with pytest.raises(ShapeMismatch):
        rand_matrix(2, 3, 5, 1) @ rand_matrix(2, 3, 5, 1)
    with pytest.raises(NotInvertible):
        CycMatrix.from_rows([[1, 2], [2, 4]]).inverse()


def test_kron_and_adjoint():
    A = rand_matrix(2, 2, 8, 3)
    B = rand_matrix(2, 3, 8, 4)
    K = kron(A, B)
    assert K.shape == (4, 6)
    assert K[3, 5] == A[1, 1] * B[1, 2]
    assert K.adjoint()[5, 3] == K[3, 5].conj()


def test_monomial_parts_and_unitary():
    z = make_root(1, 3)
    M = CycMatrix.monomial([2, 0, 1], [z, 1, z**2])
    perm, phases = M.monomial_parts()
    assert perm == [2, 0, 1] and phases == [z, 1, z**2]
    assert M.is_unitary()
    assert not CycMatrix.from_rows([[1, 1], [0, 1]]).is_monomial()


def test_large_powers_stay_exact():
    A = CycMatrix.identity(2).scale(2)
    P = A**100
    assert P[0, 0] == 2**100 and P[0, 1] == 0
    assert (P @ (A**-100)).is_identity()


def test_matrix_json_round_trip():
    A = rand_matrix(3, 2, 9, 11)
    assert CycMatrix.from_json(json.loads(json.dumps(A.to_json()))) == A

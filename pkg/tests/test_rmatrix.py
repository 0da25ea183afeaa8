import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdelta.distributions import Distribution, TruncParams, compare
from qdelta.qfunctions import Scale, d_fn, gamma_fn, gamma_prime_fn
from qdelta.ratfun import AT_ZERO, Monomial, RatFun
from qdelta.rmatrix import (
    YBE_FRAME,
    Cell,
    DistMatrix,
    build_R,
    build_Rinv,
    check_inverse,
    check_ybe,
    embed,
    matmul,
    swap_legs,
    weight,
    ybe_sides,
)

v, z = RatFun.gen("v"), RatFun.gen("z")
q = v**2
Z = Monomial.var("z")
P = TruncParams()
R, Ri = build_R(), build_Rinv()


def parts(cell):
    s, d = cell.single()
    return s, d


def test_R_diagonal_and_zeros():
    s, d = parts(R.entry(1, 1))
    assert s == Scale.of(Z, 2)
    assert d == Distribution(AT_ZERO, v * (1 - z))  # f = v (1 - z) G^2
    assert R.entry(2, 3).is_zero()
    assert R.entry(1, 4).is_zero()


def test_R_delta_entry_is_f_gamma():
    s, d = parts(R.entry(3, 2))
    assert s == Scale.of(Z, 2)
    assert d.rational.is_zero()
    assert d.packets[Z] == v * (1 - z) * gamma_fn(z)


def test_R_inverse_entries():
    a = 1 / v
    s, d = parts(Ri.entry(1, 1))
    assert s == Scale.of(Z, -2) and d.rational == a / (1 - z)
    s, d = parts(Ri.entry(3, 3))
    assert d.rational == a / (1 / q - q * z)
    s, d = parts(Ri.entry(3, 2))
    assert d.packets[Z] == a * gamma_prime_fn(z) == a * (1 / q - q) / (1 / q - q * z)


def test_inverse_graded():
    out = check_inverse(P)
    assert out.passed("graded"), out.graded
    assert out.info["crossTerms"] == [str(q - 1 / q), str(1 / q - q)]


def test_inverse_entry_22_simplifies_to_one():
    # f d * a (q - z/q) / (1 - z)^2 = 1 once G^2 G^-2 cancels
    f = v * (1 - z)
    assert f * d_fn(z) * (1 / v) * (q - z / q) / (1 - z) ** 2 == 1


def test_embed_identity_and_matmul_identity():
    one4 = DistMatrix.identity(4, AT_ZERO)
    assert embed(one4, (1, 3)).rows() == DistMatrix.identity(8, AT_ZERO).rows()
    assert matmul(R, one4).rows() == R.rows()


def test_disjoint_legs_commute():
    frame = AT_ZERO

    def cell(f):
        return Cell.of(Distribution(frame, f))

    m = DistMatrix(4, frame, {(0, 1): cell(z), (3, 2): cell(1 + z), (1, 1): cell(2 - z)})
    # A (x) 1 on legs (3, 1) touches leg 3 only
    A = {(0, 0): z, (0, 1): RatFun(3), (1, 0): 1 / (1 - z), (1, 1): RatFun(-1)}
    n = DistMatrix(4, frame, {(2 * a + b, 2 * c + b): cell(f) for (a, c), f in A.items() for b in range(2)})
    x, y = embed(m, (1, 2)), embed(n, (3, 1))
    assert (matmul(x, y) - matmul(y, x)).cells == {}


def test_swap_legs_is_an_involution():
    assert swap_legs(swap_legs(R)).cells == R.cells


@given(st.integers(0, 7), st.integers(0, 7))
def test_weight_conservation_of_ybe_sides(i, j):
    lhs, rhs = YBE_SIDES
    for side in (lhs, rhs):
        if weight(i, 3) != weight(j, 3):
            assert side[i, j].is_zero()


YBE_SIDES = ybe_sides(YBE_FRAME, P)


def test_ybe_without_packets_is_rational_identity():
    out = check_ybe(P, rational_only=True)
    assert out.passed("graded")


def test_ybe_bilateral():
    out = check_ybe(P)
    assert out.passed("flattened"), out.flattened
    assert out.passed("strongest")
    assert out.info["hOrder"] == 2


@pytest.mark.xfail(strict=True, reason="negative-grade germs of the two triple products differ below grade 0")
def test_ybe_graded():
    assert check_ybe(P).passed("graded")


def test_ybe_graded_through_grade_zero():
    out = check_ybe(P)
    germ = [f for f in out.graded if not f["location"].startswith("h-adic")]
    assert germ and all(f["grade"] < 0 for f in germ)
    # every grade >= -1 agrees in the germ world
    assert out.info["germDepth"] == 1


def test_ybe_negative_control():
    out = check_ybe(P, drop_delta=True)
    assert not out.passed("flattened")
    assert not out.passed("strongest")


def test_ybe_needs_grade_room():
    from qdelta.distributions import GradeCapError

    with pytest.raises(GradeCapError):
        check_ybe(TruncParams(P=0))

from fractions import Fraction

import pytest
from corpus import V0, build_corpus
from hypothesis import given
from hypothesis import strategies as st

from qdelta.distributions import (
    Distribution,
    DivergentProductError,
    GradeCapError,
    TruncParams,
    canonicalize,
    compare,
    dist_equal,
    dist_mul,
    flatten,
    graded_coefficients,
)
from qdelta.qfunctions import d_fn
from qdelta.ratfun import AT_INFINITY, AT_ZERO, DirectedRatFun, Monomial, RatFun, laurent_jet
from qdelta.scalars import QScalar

v, z = RatFun.gen("v"), RatFun.gen("z")
q = v**2
Z = Monomial.var("z")
P = TruncParams(N=8, P=4, H=3)


def delta(coeff=1, mu=Z):
    return Distribution.delta(AT_ZERO, mu, coeff)


def B(k, mu=Z, coeff=1):
    return Distribution.B(AT_ZERO, mu, k, coeff)


def rat(f):
    return Distribution(AT_ZERO, f)


# canonicalize ---------------------------------------------------------------


def test_geometric_at_infinity_is_geometric_minus_delta():
    got = canonicalize(DirectedRatFun(1 / (1 - z), AT_INFINITY))
    assert got == rat(1 / (1 - z)) - delta()


def test_reexpansion_of_inverse_d():
    got = canonicalize(DirectedRatFun(1 / d_fn(1 / z), AT_INFINITY))
    want = rat(d_fn(Z.shifted(4).to_ratfun())) + delta(q - 1 / q)
    assert got == want
    assert dist_equal(got, want)[0]


def test_laurent_polynomial_has_no_packets():
    got = canonicalize(DirectedRatFun(z**3, AT_INFINITY))
    assert got == rat(z**3) and got.is_rational


@given(st.integers(1, 3), st.sampled_from([0, 2, -2]))
def test_reexpansion_difference_sits_on_poles(m, e):
    mu = Z.shifted(e)
    f = (1 + z) / (1 - mu.to_ratfun()) ** m
    diff = canonicalize(DirectedRatFun(f, AT_INFINITY)) - rat(f)
    assert diff.rational.is_zero()
    assert set(diff.packets) == {mu}
    top = max(k for k, c in graded_coefficients(diff, mu, -4, 4).items() if not c.is_zero())
    assert top == m - 1


# products -------------------------------------------------------------------


def test_one_minus_z_times_delta_is_negative_grade():
    got = dist_mul(rat(1 - z), delta(), P)
    assert got == B(-1)
    assert flatten(got, 5) == [QScalar(0)] * 11


def test_z_times_delta():
    got = dist_mul(rat(z), delta(), P)
    assert got == delta() - B(-1)
    ok, _ = dist_equal(got, delta(), "flattened", P)
    assert ok
    ok, cert = dist_equal(got, delta(), "graded", P)
    assert not ok and cert.grade == -1


def test_shifted_d_times_delta_gains_a_grade():
    got = dist_mul(rat(d_fn(Z.shifted(4).to_ratfun())), delta(), P)
    grades = graded_coefficients(got, Z, -2, 2)
    jets = laurent_jet(d_fn(Z.shifted(4).to_ratfun()), Z, -1, 0)
    assert grades[1] == (1 - q**2) / q == jets[-1]
    assert grades[0] == jets[0]
    assert grades[2].is_zero()


def test_same_divisor_delta_product_diverges():
    with pytest.raises(DivergentProductError, match="divergent"):
        dist_mul(delta(), delta(2))


def test_grade_cap_is_enforced():
    with pytest.raises(GradeCapError, match="grade cap"):
        dist_mul(rat(1 / (1 - z) ** 3), delta(), TruncParams(P=2))


def test_graded_shift_coherence():
    for k in range(-2, 3):
        for j in range(0, 3):
            got = dist_mul(rat((1 - z) ** j), B(k), P)
            assert got == B(k - j)


# flattening -------------------------------------------------------------------


def test_flatten_delta():
    assert flatten(delta(), 2) == [QScalar(1)] * 5


def test_flatten_B1():
    assert flatten(B(1), 2) == [QScalar(c) for c in (-1, 0, 1, 2, 3)]


def test_flatten_negative_grade_vanishes():
    assert all(c.is_zero() for c in flatten(B(-1), 6))


# equality -------------------------------------------------------------------


@st.composite
def distributions(draw):
    coeffs = [draw(st.integers(-3, 3)) for _ in range(3)]
    f = sum((c * z**i for i, c in enumerate(coeffs)), RatFun(0))
    f = f / (1 - draw(st.sampled_from([q, 1 / q, q**2])) * z)
    d = rat(f)
    for _ in range(draw(st.integers(0, 2))):
        k = draw(st.integers(-2, 2))
        e = draw(st.sampled_from([0, 2]))
        d = d + B(k, Z.shifted(e), draw(st.integers(-2, 2)))
    return d


@given(distributions())
def test_equality_is_reflexive(x):
    c = compare(x, x, P)
    assert c.graded and c.flattened


@given(distributions(), distributions())
def test_addition_commutes(x, y):
    assert x + y == y + x
    assert (x - y) + y == x


@given(distributions(), st.integers(-2, 2), st.integers(0, 2))
def test_rational_products_associate(x, a, b):
    f, g = rat(1 + a * z), rat((1 - z) ** b + z)
    left = dist_mul(dist_mul(f, g, P), x, P)
    right = dist_mul(f, dist_mul(g, x, P), P)
    assert compare(left, right, P).graded


@given(distributions(), st.fractions(min_value=Fraction(5, 4), max_value=3))
def test_specialization_commutes_with_rational_products(x, v0):
    y = rat(1 + z / q)
    prod = dist_mul(x, y, P)
    lhs = prod.specialize(v0).rational
    rhs = (x.specialize(v0).rational * y.specialize(v0).rational)
    assert lhs == rhs


# window oracle ---------------------------------------------------------------

CORPUS = build_corpus()


def test_corpus_size():
    assert len(CORPUS) >= 50


@pytest.mark.parametrize("case", CORPUS, ids=lambda c: c.label)
def test_flatten_of_product_matches_window_oracle(case):
    d = dist_mul(case.a, case.b, TruncParams(N=12, P=4, H=3))
    got = [c.specialize(V0) for c in flatten(d, case.N)]
    assert got == [case.expected[n] for n in range(-case.N, case.N + 1)]

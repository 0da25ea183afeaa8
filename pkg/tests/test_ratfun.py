from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from qdelta.qfunctions import d_fn, g_fn
from qdelta.ratfun import (
    AT_INFINITY,
    AT_ZERO,
    DirectedRatFun,
    Monomial,
    NonMonomialDivisorError,
    RatFun,
    expand_window,
    laurent_jet,
    poles,
    substitute,
    valuation,
)

v, z, w = RatFun.gen("v"), RatFun.gen("z"), RatFun.gen("w")
q = v**2
Z = Monomial.var("z")


def test_d_times_denominator_clears():
    assert d_fn(z) * (q - z / q) == 1 - z


def test_g_at_zero_and_one():
    assert g_fn(z).subs("z", RatFun(0)) == 1 / q**2
    assert g_fn(z).subs("z", RatFun(1)) == -1


def test_jet_of_geometric_pole():
    jets = laurent_jet(1 / (1 - z), Z, -1, 0)
    assert jets == {-1: RatFun(1), 0: RatFun(0)}


def test_jet_of_shifted_d_has_simple_pole():
    # d(q^2 z) = (1 - q^2 z) / (q (1 - z)); the numerator over q at z = 1
    jets = laurent_jet(d_fn(Z.shifted(4).to_ratfun()), Z, -1, -1)
    assert jets[-1] == (1 - q**2) / q


def test_jet_of_d_vanishes_to_first_order():
    jets = laurent_jet(d_fn(z), Z, 0, 1)
    assert jets[0] == 0
    assert jets[1] == 1 / (q - 1 / q)


def test_non_solvable_divisor_rejected():
    with pytest.raises(NonMonomialDivisorError):
        laurent_jet(1 / (1 - z**2), Monomial(0, 2, 0), -1, 0)
    with pytest.raises(NonMonomialDivisorError):
        poles(1 / (1 - z - w))


def test_window_geometric_at_zero():
    coeffs = expand_window(DirectedRatFun(1 / (1 - z), AT_ZERO), 3)
    assert coeffs == [RatFun(0)] * 3 + [RatFun(1)] * 4


def test_window_geometric_at_infinity():
    coeffs = expand_window(DirectedRatFun(1 / (1 - z), AT_INFINITY), 3)
    assert coeffs == [RatFun(-1)] * 3 + [RatFun(0)] * 4


def test_window_of_d_by_long_division():
    vs, zs = sp.symbols("v z")
    qs = vs**2
    oracle = sp.series((1 - zs) / (qs - zs / qs), zs, 0, 2).removeO()
    coeffs = expand_window(DirectedRatFun(d_fn(z), AT_ZERO), 1)
    assert coeffs[1] == 1 / q
    assert sp.simplify(sp.sympify(str(coeffs[2])) - oracle.coeff(zs, 1)) == 0
    assert coeffs[2] == 1 / q**3 - 1 / q


def test_substitutions():
    # q^-1 * q^2 z = q z in the denominator
    assert substitute(d_fn(z), "z", Z.shifted(4)) == (1 - q**2 * z) / (q - q * z)
    assert substitute(z * w, "z", Monomial.var("w").inverse()) == 1
    assert substitute(g_fn(z), "z", Monomial()) == -1


def test_pole_listing():
    assert poles(d_fn(z)) == [(Z.shifted(-4), 1)]
    assert poles(1 / (1 - z) ** 2 / (1 - z * w)) == sorted([(Z, 2), (Z * Monomial.var("w"), 1)])


@st.composite
def pole_functions(draw):
    """A polynomial over a product of (1 - v^e z)^m."""
    num = sum((draw(st.integers(-3, 3)) * z**i for i in range(3)), RatFun(0))
    if num.is_zero():
        num = RatFun(1)
    e = draw(st.sampled_from([0, 2, -2, 4]))
    m = draw(st.integers(1, 3))
    return num / (1 - v**e * z) ** m, Z.shifted(e), m


@given(pole_functions(), st.integers(0, 2))
def test_jet_resummation_lowers_pole_order(data, k):
    f, mu, m = data
    lead = valuation(f, mu)
    assert lead >= -m
    jets = laurent_jet(f, mu, int(lead), k)
    one_minus = 1 - mu.to_ratfun()
    rest = f - sum((c * one_minus**j for j, c in jets.items()), RatFun(0))
    assert valuation(rest, mu) > k


@given(pole_functions(), st.sampled_from([Monomial.var("z", 2), Monomial.var("z", -4)]))
def test_substitution_is_a_homomorphism(data, mono):
    f = data[0]
    g = 1 + z
    assert substitute(f * g, "z", mono) == substitute(f, "z", mono) * substitute(g, "z", mono)
    assert substitute(f + g, "z", mono) == substitute(f, "z", mono) + substitute(g, "z", mono)


@given(st.sampled_from([-2, 0, 2]), st.integers(1, 4))
def test_expansion_difference_is_delta_window(e, N):
    a = Fraction(3, 2) ** e
    f = 1 / (1 - Z.shifted(e).to_ratfun(RatFun(Fraction(3, 2))))
    zero = expand_window(DirectedRatFun(f, AT_ZERO), N)
    inf = expand_window(DirectedRatFun(f, AT_INFINITY), N)
    diff = [x - y for x, y in zip(zero, inf)]
    assert diff == [RatFun(a**n) for n in range(-N, N + 1)]

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from qdelta.qfunctions import (
    Scale,
    ZSeries,
    build_f,
    build_gtilde,
    build_named,
    d_fn,
    gamma_fn,
    lambda_fn,
    verify_fdiff,
)
from qdelta.ratfun import Monomial, RatFun
from qdelta.scalars import ONE, Q, V, QScalar

z = RatFun.gen("z")
vs = sp.Symbol("v")


def at_zero(f: RatFun) -> RatFun:
    return f.subs("z", RatFun(0))


def test_named_values_at_zero():
    assert at_zero(build_named("d")) == RatFun.from_qscalar(1 / Q)
    assert at_zero(build_named("gamma")) == RatFun.from_qscalar(1 - Q**-2)
    assert at_zero(build_named("lambda")) == RatFun(Fraction(1, 4))


def test_unknown_name():
    with pytest.raises(KeyError):
        build_named("zeta")


def sym_to_q(expr) -> QScalar:
    num, den = sp.fraction(sp.cancel(sp.together(expr)))
    coeffs = lambda e: [Fraction(str(c)) for c in reversed(sp.Poly(e, vs).all_coeffs())]
    return QScalar(coeffs(num), coeffs(den))


def test_gtilde_leading_coefficients():
    g = build_gtilde(4)
    assert g[0] == ONE
    # -sum_j q^(4j+4) + sum_j q^(4j+2), each summed geometrically
    qs = vs**2
    oracle = qs**2 / (1 - qs**4) - qs**4 / (1 - qs**4)
    assert g[1] == sym_to_q(oracle)
    assert g[1] == Q / (Q**-1 + Q)
    assert g[1].specialize(1) == Fraction(1, 2)


def test_f_leading_coefficients():
    f = build_f(3)
    assert f[0] == V
    assert f[0] ** 2 == Q
    # order z of f(z) f(q^2 z) = q (1 - z) / (1 - q^2 z)
    rhs1 = Q * (Q**2 - 1)
    assert f[1] == rhs1 / (f[0] * (Q**2 + 1))


def test_fdiff_small_orders():
    assert verify_fdiff(0)["status"] == "pass"
    assert verify_fdiff(8)["status"] == "pass"


def test_fdiff_negative_control():
    f = build_f(6)
    bad = ZSeries([f[0], f[1] + 1, *f.coeffs[2:]])
    res = verify_fdiff(6, bad)
    assert res["status"] == "fail"
    assert res["failures"][0]["order"] == 1


@given(st.integers(0, 14))
def test_routes_agree(N):
    assert build_f(N) == build_f(N, "recursion")


def test_unknown_route():
    with pytest.raises(ValueError):
        build_f(3, "magic")


def test_classical_limit_of_f():
    f = build_f(12)
    assert [c.specialize(1) for c in f.coeffs] == [1] + [0] * 12


def test_f_is_v_one_minus_z_gtilde_squared():
    N = 10
    g = build_gtilde(N)
    one_minus_z = ZSeries([1, -1] + [0] * (N - 1))
    assert g * g * one_minus_z * V == build_f(N)


def test_scale_relation_reduces_shifts():
    Zm = Monomial.var("z")
    # G(x) G(q^2 x) = 1/(1 - q^2 x)
    s, r = (Scale.of(Zm) * Scale.of(Zm.shifted(4))).normalize()
    assert s.is_one
    assert r == 1 / (1 - Zm.shifted(4).to_ratfun())
    s2, r2 = Scale.of(Zm.shifted(4)).normalize()
    assert s2 == Scale.of(Zm, -1)
    assert r2 == 1 / (1 - Zm.shifted(4).to_ratfun())


def test_gamma_is_q_difference_times_d():
    assert gamma_fn(z) == (RatFun.gen("v") ** 2 - RatFun.gen("v") ** -2) * d_fn(z)
    assert lambda_fn(z) == (1 + z) / (4 * (1 - z))

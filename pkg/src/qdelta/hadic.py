"""Expansion in h with v = e^(h/4), order by order.

Every coefficient of h^k is a rational function of the spectral variables
alone, so the h-adic matrices live in frames with v specialized to 1.  In
this world f(z) = 1 + O(h) is a unit and the delta entry of R is
h * delta(z) plus corrections, which makes it visible in both comparison
modes.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial
from fractions import Fraction

from .distributions import Distribution, TruncParams
from .qfunctions import d_fn, gamma_fn, gamma_prime_fn
from .ratfun import CTX, Frame, Monomial, RatFun, substitute
from .scalars import PoleError, _fmpq

__all__ = [
    "HSeriesRat",
    "h_expand_ratfun",
    "f_h_series",
    "HMatrix",
    "h_build_R",
    "h_build_Rinv",
    "h_matmul",
    "h_frame",
    "h_map",
]

_V = RatFun.gen("v")
_Z = RatFun.gen("z")


class HSeriesRat:
    """sum_k h^k c_k with rational-function coefficients, exact to order H."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(RatFun.coerce(c) for c in coeffs)

    @property
    def H(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> RatFun:
        return self.coeffs[k]

    def __add__(self, other):
        other = _lift(other, self.H)
        n = min(self.H, other.H)
        return HSeriesRat([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])])

    __radd__ = __add__

    def __neg__(self):
        return HSeriesRat([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_lift(other, self.H))

    def __rsub__(self, other):
        return _lift(other, self.H) - self

    def __mul__(self, other):
        other = _lift(other, self.H)
        n = min(self.H, other.H)
        out = []
        for k in range(n + 1):
            acc = RatFun(0)
            for i in range(k + 1):
                a, b = self.coeffs[i], other.coeffs[k - i]
                if not a.is_zero() and not b.is_zero():
                    acc = acc + a * b
            out.append(acc)
        return HSeriesRat(out)

    __rmul__ = __mul__

    def inverse(self) -> "HSeriesRat":
        c0 = self.coeffs[0]
        if c0.is_zero():
            raise ZeroDivisionError("h-series with vanishing constant term")
        inv0 = 1 / c0
        out = [inv0]
        for k in range(1, self.H + 1):
            acc = RatFun(0)
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * out[k - i]
            out.append(-acc * inv0)
        return HSeriesRat(out)

    def __truediv__(self, other):
        return self * _lift(other, self.H).inverse()

    def __rtruediv__(self, other):
        return _lift(other, self.H) * self.inverse()

    def subs(self, var: str, m: Monomial) -> "HSeriesRat":
        return HSeriesRat([substitute(c, var, m, RatFun(1)) for c in self.coeffs])

    def shift(self, s: Fraction, var: str = "z") -> "HSeriesRat":
        """g(e^(s h) x) = sum_m (s h)^m / m! theta^m g, theta = x d/dx."""
        x = RatFun.gen(var)
        thetas = []
        for c in self.coeffs:
            row = [c]
            for _ in range(self.H):
                row.append(x * row[-1].derivative(var))
            thetas.append(row)
        out = []
        for k in range(self.H + 1):
            acc = RatFun(0)
            for m in range(k + 1):
                acc = acc + thetas[k - m][m] * (Fraction(s) ** m / factorial(m))
            out.append(acc)
        return HSeriesRat(out)

    def __eq__(self, other):
        return isinstance(other, HSeriesRat) and self.coeffs == other.coeffs

    def __repr__(self):
        return "HSeriesRat(" + "; ".join(map(str, self.coeffs)) + ")"


def _lift(x, H: int) -> HSeriesRat:
    if isinstance(x, HSeriesRat):
        return x
    return HSeriesRat([RatFun.coerce(x)] + [RatFun(0)] * H)


def _v_groups(p) -> dict[int, object]:
    groups: dict[int, dict] = {}
    for exps, c in p.to_dict().items():
        groups.setdefault(int(exps[0]), {})[(0, exps[1], exps[2], exps[3])] = c
    return {k: CTX.from_dict(v) for k, v in groups.items()}


def _poly_h_series(p, H: int) -> list[RatFun]:
    """Polynomial in v (coefficients in z, w) at v = e^(h/4)."""
    groups = _v_groups(p)
    out = []
    for j in range(H + 1):
        acc = CTX.constant(0)
        for k, g in groups.items():
            acc += g * _fmpq(Fraction(k, 4) ** j / factorial(j))
        out.append(RatFun(acc))
    return out


def h_expand_ratfun(f: RatFun, H: int) -> HSeriesRat:
    """Coefficients of h^0..h^H of f at v = e^(h/4)."""
    f = RatFun.coerce(f)
    num, den = _poly_h_series(f.num, H), _poly_h_series(f.den, H)
    if den[0].is_zero():
        raise PoleError("singular at classical point")
    return HSeriesRat(num) / HSeriesRat(den)


@lru_cache(maxsize=None)
def f_h_series(H: int) -> HSeriesRat:
    """f(z) order by order in h from f(z) f(e^h z) = 1 / d(q^2 z), f = 1 + O(h)."""
    q2z = Monomial.var("z", 4).to_ratfun()
    rhs = h_expand_ratfun(1 / d_fn(q2z), H)
    coeffs = [RatFun(1)]
    for k in range(1, H + 1):
        trial = HSeriesRat(coeffs + [RatFun(0)] * (H + 1 - len(coeffs)))
        residual = (trial * trial.shift(Fraction(1)))[k]
        coeffs.append((rhs[k] - residual) / 2)
    return HSeriesRat(coeffs)


def h_frame(frame: Frame) -> Frame:
    return Frame(frame.order, Fraction(1))


class HMatrix:
    """Orders 0..H of a matrix of distributions."""

    def __init__(self, orders: list):
        self.orders = orders

    @property
    def H(self) -> int:
        return len(self.orders) - 1

    def __getitem__(self, k: int):
        return self.orders[k]


def _rational_entry(fn: RatFun, arg: Monomial, frame: Frame) -> Distribution:
    from .rmatrix import _entry

    return _entry(fn, arg, frame)


def _h_matrix(entries: dict, packet: HSeriesRat | None, arg: Monomial, frame: Frame, H: int) -> HMatrix:
    from .rmatrix import Cell, DistMatrix

    orders = []
    for k in range(H + 1):
        cells = {}
        for ij, series in entries.items():
            c = series[k]
            if not c.is_zero():
                cells[ij] = Cell.of(_rational_entry(c, arg, frame))
        if packet is not None and not packet[k].is_zero():
            cells[2, 1] = Cell.of(Distribution.delta(frame, arg, packet[k]))
        orders.append(DistMatrix(4, frame, cells))
    return HMatrix(orders)


@lru_cache(maxsize=None)
def _r_series(H: int):
    z = _Z
    q2z = Monomial.var("z", 4).to_ratfun()
    f = f_h_series(H)
    diag = {
        (0, 0): f,
        (1, 1): f * h_expand_ratfun(d_fn(z), H),
        (2, 2): f * h_expand_ratfun(d_fn(q2z), H),
        (3, 3): f,
    }
    return diag, f * h_expand_ratfun(gamma_fn(z), H)


@lru_cache(maxsize=None)
def _rinv_series(H: int):
    z = _Z
    a = (1 - z) / f_h_series(H)
    q = _V**2
    diag = {
        (0, 0): a * h_expand_ratfun(1 / (1 - z), H),
        (1, 1): a * h_expand_ratfun((q - z / q) / (1 - z) ** 2, H),
        (2, 2): a * h_expand_ratfun(1 / (1 / q - q * z), H),
        (3, 3): a * h_expand_ratfun(1 / (1 - z), H),
    }
    return diag, a * h_expand_ratfun(gamma_prime_fn(z), H)


def _at(series: HSeriesRat, arg: Monomial) -> HSeriesRat:
    return series if arg == Monomial.var("z") else series.subs("z", arg)


def h_build_R(arg: Monomial, frame: Frame, H: int, drop_delta: bool = False) -> HMatrix:
    """R(arg) expanded to order h^H; ``frame`` must have v specialized to 1."""
    diag, packet = _r_series(H)
    entries = {ij: _at(s, arg) for ij, s in diag.items()}
    return _h_matrix(entries, None if drop_delta else _at(packet, arg), arg, frame, H)


def h_build_Rinv(arg: Monomial, frame: Frame, H: int, drop_delta: bool = False) -> HMatrix:
    diag, packet = _rinv_series(H)
    entries = {ij: _at(s, arg) for ij, s in diag.items()}
    return _h_matrix(entries, None if drop_delta else _at(packet, arg), arg, frame, H)


def h_matmul(a: HMatrix, b: HMatrix, params: TruncParams | None = None) -> HMatrix:
    from .rmatrix import DistMatrix, matmul

    H = min(a.H, b.H)
    orders = []
    for k in range(H + 1):
        acc = DistMatrix(a[0].n, a[0].frame)
        for i in range(k + 1):
            acc = acc + matmul(a[i], b[k - i], params)
        orders.append(acc)
    return HMatrix(orders)


def h_map(m: HMatrix, fn) -> HMatrix:
    return HMatrix([fn(x) for x in m.orders])

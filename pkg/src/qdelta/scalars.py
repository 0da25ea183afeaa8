"""Exact scalars: the field Q(v) with v^2 = q, and truncated h-series.

QScalar wraps a pair of coprime ``flint.fmpq_poly`` objects with a monic
denominator, so equality is structural.  HSeries is a power series in h
truncated at order H with Fraction coefficients; ``QScalar.h_expand`` maps
into it through v = exp(h/4).
"""

from __future__ import annotations

import ast
from fractions import Fraction
from functools import total_ordering
from math import factorial

import flint

__all__ = ["QScalar", "HSeries", "PoleError", "V", "Q", "ONE", "ZERO", "parse_qscalar"]


class PoleError(ArithmeticError):
    """Raised when evaluating or expanding a function at one of its poles."""


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    # flint.fmpq / fmpz
    return Fraction(int(x.p), int(x.q)) if hasattr(x, "q") else Fraction(int(x))


def _fmpq(x) -> flint.fmpq:
    x = _to_fraction(x)
    return flint.fmpq(x.numerator, x.denominator)


def _poly_str(coeffs: list[int]) -> str:
    """Integer polynomial in v, highest degree first: ``3*v^2-v+1``."""
    out = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = "v" if k == 1 else f"v^{k}"
            body = mono if a == 1 else f"{a}*{mono}"
        out.append((sign, body))
    if not out:
        return "0"
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += sign + body
    return text


def _nterms(coeffs: list[int]) -> int:
    return sum(1 for c in coeffs if c != 0)


@total_ordering
class QScalar:
    """Element of Q(v), stored as num/den with gcd 1 and monic den."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _canonical=False):
        if not isinstance(num, flint.fmpq_poly):
            num = flint.fmpq_poly([_fmpq(num)]) if not isinstance(num, (list, tuple)) else flint.fmpq_poly([_fmpq(c) for c in num])
        if den is None:
            den = flint.fmpq_poly([1])
        elif not isinstance(den, flint.fmpq_poly):
            den = flint.fmpq_poly([_fmpq(den)]) if not isinstance(den, (list, tuple)) else flint.fmpq_poly([_fmpq(c) for c in den])
        if not _canonical:
            if den.is_zero():
                raise ZeroDivisionError("QScalar with zero denominator")
            if num.is_zero():
                den = flint.fmpq_poly([1])
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num = num // g
                    den = den // g
            lc = den.leading_coefficient()
            if lc != 1:
                num = num / lc
                den = den / lc
        self.num = num
        self.den = den
        self._hash = None

    # constructors -----------------------------------------------------
    @classmethod
    def v_power(cls, k: int) -> "QScalar":
        if k >= 0:
            return cls(flint.fmpq_poly([0] * k + [1]), _canonical=True)
        return cls(flint.fmpq_poly([1]), flint.fmpq_poly([0] * (-k) + [1]), _canonical=True)

    @classmethod
    def q_power(cls, k: int) -> "QScalar":
        return cls.v_power(2 * k)

    @classmethod
    def coerce(cls, x) -> "QScalar":
        if isinstance(x, QScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, str):
            return parse_qscalar(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to QScalar")

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den.degree() == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a rational constant")
        return _to_fraction(self.num[0]) if not self.num.is_zero() else Fraction(0)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return QScalar(self.num + o.num, self.den)
        return QScalar(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return QScalar(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return QScalar.coerce(other) - self

    def __mul__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return QScalar(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "QScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero QScalar")
        return QScalar(self.den, self.num)

    def __truediv__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero QScalar")
        return QScalar(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return QScalar.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return QScalar(self.num ** k, self.den ** k, _canonical=True)

    # comparison -------------------------------------------------------
    def __eq__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __lt__(self, other):
        # arbitrary but deterministic total order (used only for sorting)
        return str(self) < str(QScalar.coerce(other))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(self.num.coeffs()), tuple(self.den.coeffs())))
        return self._hash

    # evaluation -------------------------------------------------------
    def specialize(self, v0) -> Fraction:
        x = _fmpq(v0)
        d = self.den(x)
        if d == 0:
            raise PoleError(f"{self} has a pole at v = {v0}")
        return _to_fraction(self.num(x) / d)

    def h_expand(self, H: int) -> "HSeries":
        """Series of self(exp(h/4)) modulo h^(H+1)."""
        den = _poly_at_exp(self.den, H)
        if den.coeffs[0] == 0:
            raise PoleError(f"singular at classical point: {self}")
        return _poly_at_exp(self.num, H) / den

    # text -------------------------------------------------------------
    def _integer_parts(self) -> tuple[list[int], list[int]]:
        nc = [_to_fraction(c) for c in self.num.coeffs()] or [Fraction(0)]
        dc = [_to_fraction(c) for c in self.den.coeffs()]
        lcm = 1
        for c in nc + dc:
            lcm = lcm * c.denominator // _gcd(lcm, c.denominator)
        ni = [int(c * lcm) for c in nc]
        di = [int(c * lcm) for c in dc]
        g = 0
        for c in ni + di:
            g = _gcd(g, abs(c))
        g = g or 1
        return [c // g for c in ni], [c // g for c in di]

    def __str__(self):
        if self.num.is_zero():
            return "0"
        ni, di = self._integer_parts()
        ns = _poly_str(ni)
        if di == [1]:
            return ns
        ds = _poly_str(di)
        if _nterms(ni) > 1:
            ns = f"({ns})"
        if _nterms(di) > 1 or (len(di) > 1 and abs(di[-1]) != 1):
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"QScalar('{self}')"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _poly_at_exp(p: flint.fmpq_poly, H: int) -> "HSeries":
    # p(e^{h/4}) = sum_k c_k e^{k h/4}; the h^j coefficient is sum_k c_k k^j / (4^j j!)
    coeffs = [_to_fraction(c) for c in p.coeffs()]
    out = []
    for j in range(H + 1):
        s = sum((c * k ** j for k, c in enumerate(coeffs) if c), Fraction(0))
        out.append(s / (4 ** j * factorial(j)))
    return HSeries(out, H)


class HSeries:
    """Power series in h with Fraction coefficients, exact modulo h^(H+1)."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int):
        cs = [Fraction(c) for c in coeffs][: order + 1]
        cs += [Fraction(0)] * (order + 1 - len(cs))
        self.coeffs = tuple(cs)
        self.order = order

    @classmethod
    def exp(cls, rate: Fraction, order: int) -> "HSeries":
        """exp(rate * h) truncated."""
        rate = Fraction(rate)
        return cls([rate ** j / factorial(j) for j in range(order + 1)], order)

    def _match(self, other) -> "HSeries":
        if isinstance(other, HSeries):
            return other
        return HSeries([other], self.order)

    def __add__(self, other):
        o = self._match(other)
        H = min(self.order, o.order)
        return HSeries([a + b for a, b in zip(self.coeffs[: H + 1], o.coeffs[: H + 1])], H)

    __radd__ = __add__

    def __neg__(self):
        return HSeries([-a for a in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._match(other))

    def __rsub__(self, other):
        return self._match(other) - self

    def __mul__(self, other):
        o = self._match(other)
        H = min(self.order, o.order)
        out = [Fraction(0)] * (H + 1)
        for i, a in enumerate(self.coeffs[: H + 1]):
            if a:
                for j in range(H + 1 - i):
                    out[i + j] += a * o.coeffs[j]
        return HSeries(out, H)

    __rmul__ = __mul__

    def inverse(self) -> "HSeries":
        a0 = self.coeffs[0]
        if a0 == 0:
            raise ZeroDivisionError("HSeries with zero constant term is not invertible")
        out = [1 / a0]
        for n in range(1, self.order + 1):
            s = sum(self.coeffs[k] * out[n - k] for k in range(1, n + 1))
            out.append(-s / a0)
        return HSeries(out, self.order)

    def __truediv__(self, other):
        return self * self._match(other).inverse()

    def __eq__(self, other):
        if not isinstance(other, HSeries):
            other = self._match(other)
        H = min(self.order, other.order)
        return self.coeffs[: H + 1] == other.coeffs[: H + 1]

    def __hash__(self):
        return hash(self.coeffs)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __repr__(self):
        return f"HSeries({[str(c) for c in self.coeffs]}, H={self.order})"


# ---------------------------------------------------------------------------
# text parsing


def parse_qscalar(text: str) -> QScalar:
    """Inverse of ``str(QScalar)``; accepts + - * / ^, integers and ``v``/``q``."""
    tree = ast.parse(text.replace("^", "**"), mode="eval")
    return _eval_node(tree.body)


def _eval_node(node) -> QScalar:
    if isinstance(node, ast.BinOp):
        left, right = _eval_node(node.left), node.right
        if isinstance(node.op, ast.Pow):
            k = _int_literal(right)
            return left ** k
        r = _eval_node(right)
        if isinstance(node.op, ast.Add):
            return left + r
        if isinstance(node.op, ast.Sub):
            return left - r
        if isinstance(node.op, ast.Mult):
            return left * r
        if isinstance(node.op, ast.Div):
            return left / r
    elif isinstance(node, ast.UnaryOp):
        val = _eval_node(node.operand)
        if isinstance(node.op, ast.USub):
            return -val
        if isinstance(node.op, ast.UAdd):
            return val
    elif isinstance(node, ast.Constant) and isinstance(node.value, int):
        return QScalar(node.value)
    elif isinstance(node, ast.Name):
        if node.id == "v":
            return V
        if node.id == "q":
            return Q
    raise ValueError(f"unsupported syntax in QScalar text: {ast.dump(node)}")


def _int_literal(node) -> int:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_int_literal(node.operand)
    raise ValueError("exponents must be integer literals")


V = QScalar.v_power(1)
Q = QScalar.v_power(2)
ONE = QScalar(1)
ZERO = QScalar(0)

"""Rational functions in z, w over Q(v), with local analysis along divisors.

Everything lives in one flint multivariate context with generators
(v, z, w, t).  ``t`` is a scratch variable used for local coordinates
(1 - mu = t) and never survives in public results.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import flint

from .scalars import PoleError, QScalar, _fmpq, _to_fraction

__all__ = [
    "CTX",
    "Monomial",
    "RatFun",
    "Frame",
    "DirectedRatFun",
    "NonMonomialDivisorError",
    "laurent_jet",
    "valuation",
    "poles",
    "expand_window",
    "substitute",
    "zseries",
    "AT_ZERO",
    "AT_INFINITY",
]

CTX = flint.fmpq_mpoly_ctx.get(("v", "z", "w", "t"), "lex")
_GENS = dict(zip(("v", "z", "w", "t"), CTX.gens()))
_IDX = {"v": 0, "z": 1, "w": 2, "t": 3}
SPECTRAL = ("z", "w")


class NonMonomialDivisorError(ValueError):
    """A pole or support that is not of the form 1 - v^e z^a w^b with |a|,|b| <= 1."""


# ---------------------------------------------------------------------------
# monomials


@dataclass(frozen=True, order=True)
class Monomial:
    """v^vexp * z^z * w^w."""

    vexp: int = 0
    z: int = 0
    w: int = 0

    @classmethod
    def var(cls, name: str, vexp: int = 0) -> "Monomial":
        return cls(vexp, 1 if name == "z" else 0, 1 if name == "w" else 0)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.vexp + other.vexp, self.z + other.z, self.w + other.w)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return self * other.inverse()

    def inverse(self) -> "Monomial":
        return Monomial(-self.vexp, -self.z, -self.w)

    def __pow__(self, k: int) -> "Monomial":
        return Monomial(self.vexp * k, self.z * k, self.w * k)

    def exp(self, var: str) -> int:
        return self.z if var == "z" else self.w if var == "w" else self.vexp

    def shifted(self, vexp: int) -> "Monomial":
        return Monomial(self.vexp + vexp, self.z, self.w)

    @property
    def is_scalar(self) -> bool:
        return self.z == 0 and self.w == 0

    def variables(self) -> tuple[str, ...]:
        return tuple(x for x in SPECTRAL if self.exp(x))

    def normalized(self) -> "Monomial":
        """Representative of {mu, 1/mu} with positive w-exponent, else positive z-exponent."""
        if self.w < 0 or (self.w == 0 and self.z < 0):
            return self.inverse()
        return self

    def parallel(self, other: "Monomial") -> bool:
        return (self.z, self.w) in ((other.z, other.w), (-other.z, -other.w))

    def to_ratfun(self, vee: "RatFun | None" = None) -> "RatFun":
        vee = vee if vee is not None else RatFun.gen("v")
        out = vee ** self.vexp
        if self.z:
            out = out * RatFun.gen("z") ** self.z
        if self.w:
            out = out * RatFun.gen("w") ** self.w
        return out

    def __str__(self):
        parts = []
        for name, e in (("v", self.vexp), ("z", self.z), ("w", self.w)):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"

    def __repr__(self):
        return f"Monomial({self})"


# ---------------------------------------------------------------------------
# rational functions


def _poly(x) -> flint.fmpq_mpoly:
    if isinstance(x, flint.fmpq_mpoly):
        return x
    if isinstance(x, QScalar):
        raise TypeError("use RatFun.from_qscalar")
    return CTX.constant(_fmpq(x))


def _from_fmpq_poly(p: flint.fmpq_poly) -> flint.fmpq_mpoly:
    v = _GENS["v"]
    out = CTX.constant(0)
    for k, c in enumerate(p.coeffs()):
        if c != 0:
            out += c * v ** k
    return out


class RatFun:
    """num/den in Q[v, z, w], coprime, den with leading coefficient 1."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _canonical: bool = False):
        num = _poly(num)
        den = CTX.constant(1) if den is None else _poly(den)
        if not _canonical:
            if den.is_zero():
                raise ZeroDivisionError("RatFun with zero denominator")
            if num.is_zero():
                den = CTX.constant(1)
            elif not den.is_constant():
                g = num.gcd(den)
                if not g.is_one():
                    num = num / g
                    den = den / g
            lc = den.leading_coefficient()
            if lc != 1:
                num = num / lc
                den = den / lc
        self.num = num
        self.den = den
        self._hash = None

    # constructors -----------------------------------------------------
    @staticmethod
    def gen(name: str) -> "RatFun":
        return RatFun(_GENS[name], _canonical=True)

    @staticmethod
    def const(x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, QScalar):
            return RatFun.from_qscalar(x)
        return RatFun(CTX.constant(_fmpq(x)), _canonical=True)

    @staticmethod
    def from_qscalar(a: QScalar) -> "RatFun":
        return RatFun(_from_fmpq_poly(a.num), _from_fmpq_poly(a.den), _canonical=True)

    @staticmethod
    def coerce(x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, Monomial):
            return x.to_ratfun()
        return RatFun.const(x)

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def degrees(self, var: str) -> tuple[int, int]:
        i = _IDX[var]
        return self.num.degrees()[i], self.den.degrees()[i]

    def depends_on(self, var: str) -> bool:
        dn, dd = self.degrees(var)
        return dn > 0 or dd > 0

    def variables(self) -> tuple[str, ...]:
        return tuple(x for x in SPECTRAL if self.depends_on(x))

    def is_scalar(self) -> bool:
        return not self.variables() and not self.depends_on("t")

    def to_qscalar(self) -> QScalar:
        if not self.is_scalar():
            raise ValueError(f"{self} depends on spectral variables")
        return QScalar(_to_fmpq_poly(self.num), _to_fmpq_poly(self.den))

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.den == o.den:
            return RatFun(self.num + o.num, self.den)
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return RatFun.coerce(other) - self

    def __mul__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return RatFun(0, _canonical=True)
        # cross-cancel first; keeps the gcds small
        g1 = self.num.gcd(o.den) if not o.den.is_constant() else None
        g2 = o.num.gcd(self.den) if not self.den.is_constant() else None
        n1, d2 = (self.num / g1, o.den / g1) if g1 is not None and not g1.is_one() else (self.num, o.den)
        n2, d1 = (o.num / g2, self.den / g2) if g2 is not None and not g2.is_one() else (o.num, self.den)
        num, den = n1 * n2, d1 * d2
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RatFun(num, den, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero RatFun")
        return RatFun(self.den, self.num)

    def __truediv__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return RatFun.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return RatFun(1, _canonical=True)
        return RatFun(self.num ** k, self.den ** k, _canonical=True)

    def __eq__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self.num), str(self.den)))
        return self._hash

    # substitution -----------------------------------------------------
    def subs(self, var: str, value) -> "RatFun":
        """Replace ``var`` by a rational function (field homomorphism)."""
        value = RatFun.coerce(value)
        if not self.depends_on(var):
            return self
        i = _IDX[var]
        dn, dd = self.num.degrees()[i], self.den.degrees()[i]
        D = max(dn, dd)
        A, B = value.num, value.den
        apow = [CTX.constant(1)]
        bpow = [CTX.constant(1)]
        for _ in range(D):
            apow.append(apow[-1] * A)
            bpow.append(bpow[-1] * B)
        num = _horner_subs(self.num, i, apow, bpow, D)
        den = _horner_subs(self.den, i, apow, bpow, D)
        return RatFun(num, den)

    def specialize_v(self, v0) -> "RatFun":
        return self.subs("v", RatFun.const(v0))

    def evaluate(self, **values) -> "RatFun":
        out = self
        for var, val in values.items():
            out = out.subs(var, val)
        return out

    def derivative(self, var: str) -> "RatFun":
        i = _IDX[var]
        return RatFun(self.num.derivative(i) * self.den - self.num * self.den.derivative(i), self.den * self.den)

    # text -------------------------------------------------------------
    def __str__(self):
        if self.num.is_zero():
            return "0"
        n, d = _integer_pair(self.num, self.den)
        ns, ds = _mpoly_str(n), _mpoly_str(d)
        if ds == "1":
            return ns
        if len(n.to_dict()) > 1:
            ns = f"({ns})"
        terms = d.to_dict()
        constant = len(terms) == 1 and not any(next(iter(terms)))
        if len(terms) > 1 or not (constant or _is_unit_coeff_monomial(d)):
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"RatFun('{self}')"


def _is_unit_coeff_monomial(p) -> bool:
    items = list(p.to_dict().values())
    return len(items) == 1 and abs(_to_fraction(items[0])) == 1


def _integer_pair(num, den):
    coeffs = [_to_fraction(c) for c in list(num.to_dict().values()) + list(den.to_dict().values())]
    lcm = 1
    for c in coeffs:
        d = c.denominator
        lcm = lcm * d // _gcd(lcm, d)
    scaled = [c * lcm for c in coeffs]
    g = 0
    for c in scaled:
        g = _gcd(g, abs(int(c)))
    factor = Fraction(lcm, g or 1)
    return num * _fmpq(factor), den * _fmpq(factor)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _mpoly_str(p) -> str:
    names = ("v", "z", "w", "t")
    terms = sorted(p.to_dict().items(), key=lambda kv: tuple(-e for e in kv[0]))
    out = ""
    for exps, c in terms:
        c = _to_fraction(c)
        mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e)
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not out:
            out = ("-" if c < 0 else "") + body
        else:
            out += ("-" if c < 0 else "+") + body
    return out or "0"


def _horner_subs(p, i: int, apow, bpow, D: int):
    groups: dict[int, dict] = {}
    for exps, c in p.to_dict().items():
        k = exps[i]
        e = list(exps)
        e[i] = 0
        groups.setdefault(k, {})[tuple(e)] = c
    out = CTX.constant(0)
    for k, terms in groups.items():
        out += CTX.from_dict(terms) * apow[k] * bpow[D - k]
    return out


def _to_fmpq_poly(p) -> flint.fmpq_poly:
    coeffs: dict[int, Fraction] = {}
    for exps, c in p.to_dict().items():
        coeffs[exps[0]] = _to_fraction(c)
    if not coeffs:
        return flint.fmpq_poly([0])
    return flint.fmpq_poly([_fmpq(coeffs.get(k, 0)) for k in range(max(coeffs) + 1)])


def substitute(f: RatFun, variable: str, replacement: Monomial, vee: RatFun | None = None) -> RatFun:
    """Replace ``variable`` by a Laurent monomial."""
    return f.subs(variable, replacement.to_ratfun(vee))


# ---------------------------------------------------------------------------
# frames and directed functions


@dataclass(frozen=True)
class Frame:
    """Ordered expansion directions.

    ``order`` lists (variable, sign); the first entry is the dominant
    infinitesimal.  sign +1 reads the variable at zero, -1 at infinity.
    ``v0`` optionally specializes v to a rational number.
    """

    order: tuple[tuple[str, int], ...] = (("z", 1),)
    v0: Fraction | None = None

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(x for x, _ in self.order)

    def sign(self, var: str) -> int:
        for x, s in self.order:
            if x == var:
                return s
        raise KeyError(var)

    def is_small(self, mu: Monomial) -> bool:
        for x, s in self.order:
            e = mu.exp(x)
            if e:
                return e * s > 0
        raise ValueError(f"{mu} is a scalar; it has no direction")

    @property
    def vee(self) -> RatFun:
        return RatFun.gen("v") if self.v0 is None else RatFun.const(self.v0)

    def restrict(self, var: str) -> "Frame":
        return Frame(((var, self.sign(var)),), self.v0)

    def with_v(self, v0) -> "Frame":
        return Frame(self.order, None if v0 is None else Fraction(v0))

    def scalar(self, x: QScalar) -> RatFun:
        if self.v0 is None:
            return RatFun.from_qscalar(x)
        return RatFun.const(x.specialize(self.v0))

    def coerce(self, f: RatFun) -> RatFun:
        """Bring a symbolic function into this frame (specializing v if needed)."""
        if self.v0 is None or not f.depends_on("v"):
            return f
        return f.specialize_v(self.v0)


AT_ZERO = Frame((("z", 1),))
AT_INFINITY = Frame((("z", -1),))


@dataclass(frozen=True)
class DirectedRatFun:
    """A rational function together with the expansion it stands for."""

    fn: RatFun
    reading: Frame = AT_ZERO


# ---------------------------------------------------------------------------
# local analysis


def _split_t(p) -> dict[int, flint.fmpq_mpoly]:
    groups: dict[int, dict] = {}
    for exps, c in p.to_dict().items():
        groups.setdefault(exps[3], {})[(exps[0], exps[1], exps[2], 0)] = c
    return {k: CTX.from_dict(v) for k, v in groups.items()}


def eliminated_variable(mu: Monomial, order: tuple[str, ...] = ("w", "z")) -> str:
    for x in order:
        if mu.exp(x):
            return x
    raise NonMonomialDivisorError(f"divisor {mu} has no spectral variable")


def local_coordinate(mu: Monomial, vee: RatFun | None = None, order=("w", "z")) -> tuple[str, RatFun]:
    """Solve mu = 1 - t for the eliminated variable."""
    x = eliminated_variable(mu, order)
    c = mu.exp(x)
    if c not in (1, -1):
        raise NonMonomialDivisorError(f"non-monomial-solvable divisor {mu}")
    rest = Monomial(mu.vexp, mu.z if x != "z" else 0, mu.w if x != "w" else 0)
    one_minus_t = RatFun(1 - _GENS["t"], _canonical=True)
    base = one_minus_t * rest.inverse().to_ratfun(vee)
    return x, base if c == 1 else base.inverse()


class _LocalExpansion:
    """f(mu = 1 - t) = t^lead * (N(t)/D(t)), D(0) != 0, coefficients lazily."""

    def __init__(self, f: RatFun, mu: Monomial, vee: RatFun | None):
        x, sub = local_coordinate(mu, vee)
        g = f.subs(x, sub)
        if g.is_zero():
            self.lead = None
            return
        n, d = _split_t(g.num), _split_t(g.den)
        n0, m = min(n), min(d)
        self.lead = n0 - m
        self._n = {k - n0: v for k, v in n.items()}
        self._d = {k - m: v for k, v in d.items()}
        self._d0 = self._d[0]
        self._p: list = []
        self._d0pow = [CTX.constant(1)]

    def coeff(self, j: int) -> RatFun:
        """Coefficient of t^(lead + j)."""
        zero = CTX.constant(0)
        while len(self._p) <= j:
            k = len(self._p)
            d0 = self._d0
            while len(self._d0pow) <= k + 1:
                self._d0pow.append(self._d0pow[-1] * d0)
            acc = self._n.get(k, zero) * self._d0pow[k]
            for i in range(1, k + 1):
                di = self._d.get(i)
                if di is not None:
                    acc -= di * self._p[k - i] * self._d0pow[i - 1]
            self._p.append(acc)
        return RatFun(self._p[j], self._d0pow[j + 1])


def laurent_jet(f: RatFun, divisor: Monomial, kmin: int, kmax: int, vee: RatFun | None = None) -> dict[int, RatFun]:
    """Coefficients c_k of (1 - mu)^k in the expansion of f along mu = 1.

    The result is a dict over kmin..kmax; the leading index is minus the
    pole order.  Coefficients are functions of the remaining variable.
    """
    f = RatFun.coerce(f)
    exp = _LocalExpansion(f, divisor, vee)
    out = {}
    for k in range(kmin, kmax + 1):
        if exp.lead is None or k < exp.lead:
            out[k] = RatFun(0, _canonical=True)
        else:
            out[k] = exp.coeff(k - exp.lead)
    return out


def valuation(f: RatFun, divisor: Monomial, vee: RatFun | None = None) -> float:
    """Order of vanishing of f along mu = 1 (negative for poles, inf for 0)."""
    if f.is_zero():
        return float("inf")
    return int(_LocalExpansion(f, divisor, vee).lead)


def _vee_log(r: Fraction, v0: Fraction) -> int | None:
    for e in range(0, 200):
        for s in (e, -e):
            if v0 ** s == r:
                return s
    return None


def poles(f: RatFun, v0: Fraction | None = None) -> list[tuple[Monomial, int]]:
    """Pole divisors of f (normalized) with their orders.

    Pure-v factors and monomials are units.  Binomial factors must have equal
    and opposite coefficients (after specializing v, a power of v0).
    """
    if f.den.is_constant():
        return []
    _, factors = f.den.factor()
    out: dict[Monomial, int] = {}
    for p, mult in factors:
        terms = list(p.to_dict().items())
        if len(terms) == 1:
            continue
        if all(e[1] == 0 and e[2] == 0 and e[3] == 0 for e, _ in terms):
            continue  # scalar in v
        if len(terms) != 2:
            raise NonMonomialDivisorError(f"non-monomial-solvable divisor: factor {_mpoly_str(p)}")
        (e1, c1), (e2, c2) = terms
        ratio = -_to_fraction(c2) / _to_fraction(c1)
        if v0 is None:
            if ratio != 1:
                raise NonMonomialDivisorError(f"non-monomial-solvable divisor: factor {_mpoly_str(p)}")
            vextra = 0
        else:
            vextra = _vee_log(ratio, Fraction(v0)) if ratio > 0 else None
            if vextra is None:
                raise NonMonomialDivisorError(f"non-monomial-solvable divisor: factor {_mpoly_str(p)}")
        mu = Monomial(int(e2[0] - e1[0]) + vextra, int(e2[1] - e1[1]), int(e2[2] - e1[2]))
        if mu.is_scalar:
            continue
        mu = mu.normalized()
        out[mu] = out.get(mu, 0) + mult
    return sorted(out.items())


# ---------------------------------------------------------------------------
# expansions in one variable


def _coeff_lists(p, var: str) -> dict[int, flint.fmpq_mpoly]:
    i = _IDX[var]
    groups: dict[int, dict] = {}
    for exps, c in p.to_dict().items():
        e = list(exps)
        k = e[i]
        e[i] = 0
        groups.setdefault(k, {})[tuple(e)] = c
    return {k: CTX.from_dict(v) for k, v in groups.items()}


def zseries(f: RatFun, var: str, n_terms: int) -> list[RatFun]:
    """Taylor coefficients of f at var = 0 (f must be regular there)."""
    num, den = _coeff_lists(f.num, var), _coeff_lists(f.den, var)
    d0 = den.get(0)
    if d0 is None or d0.is_zero():
        raise PoleError(f"pole at {var} = 0 in {f}")
    d0 = RatFun(d0)
    out: list[RatFun] = []
    for k in range(n_terms):
        acc = RatFun(num.get(k, CTX.constant(0)))
        for i in range(1, k + 1):
            di = den.get(i)
            if di is not None:
                acc = acc - RatFun(di) * out[k - i]
        out.append(acc / d0)
    return out


def expand_window(f: DirectedRatFun, N: int) -> list[RatFun]:
    """Coefficients of z^-N..z^N of the directed expansion of a univariate f."""
    fn = RatFun.coerce(f.fn)
    var = f.reading.variables[0]
    if f.reading.sign(var) > 0:
        coeffs = zseries(fn, var, N + 1)
        zero = [RatFun(0, _canonical=True)] * N
        return zero + coeffs
    flipped = fn.subs(var, RatFun.gen(var).inverse())
    coeffs = zseries(flipped, var, N + 1)
    return list(reversed(coeffs)) + [RatFun(0, _canonical=True)] * N


def binomial(n: int, k: int) -> int:
    """binom(n, k) for any integer n (upper negation), zero for k < 0."""
    if k < 0:
        return 0
    if n >= 0:
        return comb(n, k)
    return (-1) ** k * comb(k - n - 1, k)

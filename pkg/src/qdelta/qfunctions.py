"""The named functions d, g, gamma, lambda, the series g~ and f, and the
opaque unit G = g~ used to carry f symbolically.

f(z) = v (1 - z) g~(z)^2 solves f(z) f(q^2 z) = 1 / d(q^2 z).  Two routes
build its z-series: from the q-binomial closed form of g~, and from the
difference equation directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import flint

from .ratfun import Frame, Monomial, RatFun
from .scalars import ONE, QScalar, V, ZERO

__all__ = [
    "d_fn",
    "g_fn",
    "gamma_fn",
    "gamma_prime_fn",
    "lambda_fn",
    "build_named",
    "ZSeries",
    "build_gtilde",
    "build_f",
    "verify_fdiff",
    "Scale",
]


def _vee(vee):
    return RatFun.gen("v") if vee is None else vee


def d_fn(x, vee=None) -> RatFun:
    q = _vee(vee) ** 2
    x = RatFun.coerce(x)
    return (1 - x) / (q - x / q)


def g_fn(x, vee=None) -> RatFun:
    q = _vee(vee) ** 2
    x = RatFun.coerce(x)
    return (q * q * x - 1) / (x - q * q)


def gamma_fn(x, vee=None) -> RatFun:
    q = _vee(vee) ** 2
    return (q - 1 / q) * d_fn(x, vee)


def gamma_prime_fn(x, vee=None) -> RatFun:
    q = _vee(vee) ** 2
    x = RatFun.coerce(x)
    return (1 / q - q) / (1 / q - q * x)


def lambda_fn(x) -> RatFun:
    x = RatFun.coerce(x)
    return (1 + x) / (4 * (1 - x))


_NAMED = {"d": d_fn, "g": g_fn, "gamma": gamma_fn, "lambda": lambda_fn, "gamma_prime": gamma_prime_fn}


def build_named(name: str, arg=None, vee=None) -> RatFun:
    if name not in _NAMED:
        raise KeyError(f"unknown function {name!r}")
    arg = RatFun.gen("z") if arg is None else RatFun.coerce(arg)
    fn = _NAMED[name]
    return fn(arg) if name == "lambda" else fn(arg, vee)


# ---------------------------------------------------------------------------
# z-series with Q(v) coefficients


class ZSeries:
    """Power series in z over Q(v), exact modulo z^(N+1)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(QScalar.coerce(c) for c in coeffs)

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> QScalar:
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def __add__(self, other: "ZSeries") -> "ZSeries":
        n = min(self.N, other.N)
        return ZSeries([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])])

    def __sub__(self, other: "ZSeries") -> "ZSeries":
        n = min(self.N, other.N)
        return ZSeries([a - b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])])

    def __mul__(self, other) -> "ZSeries":
        if not isinstance(other, ZSeries):
            c = QScalar.coerce(other)
            return ZSeries([a * c for a in self.coeffs])
        n = min(self.N, other.N)
        out = []
        for k in range(n + 1):
            acc = ZERO
            for i in range(k + 1):
                a, b = self.coeffs[i], other.coeffs[k - i]
                if not a.is_zero() and not b.is_zero():
                    acc = acc + a * b
            out.append(acc)
        return ZSeries(out)

    __rmul__ = __mul__

    def dilate(self, c: QScalar) -> "ZSeries":
        """g(z) -> g(c z)."""
        out, p = [], ONE
        for a in self.coeffs:
            out.append(a * p)
            p = p * c
        return ZSeries(out)

    def __eq__(self, other):
        return isinstance(other, ZSeries) and self.coeffs == other.coeffs

    def __repr__(self):
        return "ZSeries(" + "; ".join(map(str, self.coeffs)) + ")"

    def to_text(self) -> str:
        return "; ".join(map(str, self.coeffs))

    @classmethod
    def from_ratfun(cls, f: RatFun, N: int) -> "ZSeries":
        from .ratfun import zseries

        return cls([c.to_qscalar() for c in zseries(f, "z", N + 1)])


def _vpoly(k: int) -> flint.fmpq_poly:
    return flint.fmpq_poly([0] * k + [1])


class _PochhammerTable:
    """D_n = (q^4; q^4)_n and Gaussian binomials [n, i] in p = q^4 as v-polynomials.

    Products of coefficients with denominators dividing D_i and D_j have a
    common denominator D_(i+j), since D_i D_j [i+j, i] = D_(i+j).  This keeps
    all convolutions polynomial.
    """

    def __init__(self, N: int):
        p = _vpoly(8)
        self.D = [flint.fmpq_poly([1])]
        for n in range(1, N + 1):
            self.D.append(self.D[-1] * (1 - p ** n))
        self.binom = [[flint.fmpq_poly([1])]]
        for n in range(1, N + 1):
            prev = self.binom[-1]
            row = [flint.fmpq_poly([1])]
            for i in range(1, n):
                row.append(prev[i - 1] + p ** i * prev[i])
            row.append(flint.fmpq_poly([1]))
            self.binom.append(row)

    def numerators(self, series) -> list[flint.fmpq_poly] | None:
        """F_n with series[n] = F_n / D_n, or None if a denominator does not divide D_n."""
        out = []
        for n, c in enumerate(series):
            quo, rem = divmod(self.D[n], c.den)
            if not rem.is_zero():
                return None
            out.append(c.num * quo)
        return out

    def convolve(self, F, G, n: int, weight=None) -> flint.fmpq_poly:
        """Numerator over D_n of sum_i (F_i/D_i)(G_(n-i)/D_(n-i)) weight(n-i)."""
        acc = flint.fmpq_poly([0])
        for i in range(n + 1):
            term = F[i] * G[n - i] * self.binom[n][i]
            if weight is not None:
                term = term * weight(n - i)
            acc += term
        return acc


def build_gtilde(N: int) -> ZSeries:
    """g~(z) = (q^4 z; q^4)_inf / (q^2 z; q^4)_inf via the q-binomial theorem:
    the z^n coefficient is (q^2; q^4)_n / (q^4; q^4)_n * q^(2n)."""
    q2 = QScalar.q_power(2)
    out = [ONE]
    for n in range(1, N + 1):
        ratio = (1 - QScalar.q_power(4 * n - 2)) / (1 - QScalar.q_power(4 * n)) * q2
        out.append(out[-1] * ratio)
    return ZSeries(out)


def _gtilde_numerators(N: int) -> list[flint.fmpq_poly]:
    # A_n = (q^2; q^4)_n q^(2n), so that g~_n = A_n / D_n
    out = [flint.fmpq_poly([1])]
    poch = flint.fmpq_poly([1])
    for n in range(1, N + 1):
        poch = poch * (1 - _vpoly(8 * n - 4))
        out.append(poch * _vpoly(4 * n))
    return out


def _f_pochhammer(N: int) -> ZSeries:
    table = _PochhammerTable(N)
    A = _gtilde_numerators(N)
    S = [table.convolve(A, A, n) for n in range(N + 1)]
    p = _vpoly(8)
    out = [V]
    for n in range(1, N + 1):
        # (1 - z) g~^2 : (S_n - (1 - p^n) S_(n-1)) / D_n
        num = (S[n] - (1 - p ** n) * S[n - 1]) * _vpoly(1)
        out.append(QScalar(num, table.D[n]))
    return ZSeries(out)


def _dq2_inverse(N: int) -> list[QScalar]:
    """Coefficients of 1/d(q^2 z) = q (1 - z) / (1 - q^2 z)."""
    q = QScalar.q_power(1)
    out = [q]
    for n in range(1, N + 1):
        out.append(QScalar.q_power(2 * n - 1) * (QScalar.q_power(2) - 1))
    return out


def _f_recursion(N: int) -> ZSeries:
    """Solve sum_(i+j=n) f_i f_j q^(2j) = [1/d(q^2 z)]_n order by order."""
    table = _PochhammerTable(N)
    rhs = _dq2_inverse(N)
    f = [V]
    F = [_vpoly(1)]
    for n in range(1, N + 1):
        inner = [F[i] if 0 < i < n else flint.fmpq_poly([0]) for i in range(n + 1)]
        conv = table.convolve(inner, inner, n, weight=lambda j: _vpoly(4 * j))
        acc = QScalar(rhs[n].num * table.D[n] - rhs[n].den * conv, rhs[n].den * table.D[n])
        fn = acc / (V * (1 + QScalar.q_power(2 * n)))
        f.append(fn)
        quo, rem = divmod(table.D[n], fn.den)
        if not rem.is_zero():
            return _f_recursion_plain(N)
        F.append(fn.num * quo)
    return ZSeries(f)


def _f_recursion_plain(N: int) -> ZSeries:
    rhs = _dq2_inverse(N)
    f = [V]
    for n in range(1, N + 1):
        acc = rhs[n]
        for i in range(1, n):
            acc = acc - f[i] * f[n - i] * QScalar.q_power(2 * (n - i))
        f.append(acc / (f[0] * (1 + QScalar.q_power(2 * n))))
    return ZSeries(f)


def build_f(N: int, route: str = "pochhammer") -> ZSeries:
    """z-series of f to order N; ``route`` is 'pochhammer' or 'recursion'."""
    if route == "pochhammer":
        return _f_pochhammer(N)
    if route == "recursion":
        return _f_recursion(N)
    raise ValueError(f"unknown route {route!r}")


def verify_fdiff(N: int, f: ZSeries | None = None) -> dict:
    """Check f(z) f(q^2 z) = 1/d(q^2 z) coefficientwise up to z^N."""
    f = f if f is not None else build_f(N)
    rhs = _dq2_inverse(N)
    table = _PochhammerTable(N)
    F = table.numerators(f.coeffs[: N + 1])
    failures = []
    for n in range(N + 1):
        if F is not None:
            conv = table.convolve(F, F, n, weight=lambda j: _vpoly(4 * j))
            ok = conv * rhs[n].den == rhs[n].num * table.D[n]
            got = QScalar(conv, table.D[n]) if not ok else rhs[n]
        else:
            got = ZERO
            for i in range(n + 1):
                got = got + f[i] * f[n - i] * QScalar.q_power(2 * (n - i))
            ok = got == rhs[n]
        if not ok:
            failures.append({"location": "z-coefficient", "order": n, "expected": str(rhs[n]), "got": str(got)})
    return {"status": "pass" if not failures else "fail", "failures": failures, "N": N}


# ---------------------------------------------------------------------------
# the opaque unit G = g~


@dataclass(frozen=True)
class Scale:
    """Product of G(arg)^e with G(x) G(q^2 x) = 1/(1 - q^2 x)."""

    factors: tuple[tuple[Monomial, int], ...] = ()

    @classmethod
    def of(cls, arg: Monomial, e: int = 1) -> "Scale":
        return cls(((arg, e),)) if e else cls()

    def _as_dict(self) -> dict[Monomial, int]:
        out: dict[Monomial, int] = {}
        for m, e in self.factors:
            out[m] = out.get(m, 0) + e
        return out

    @staticmethod
    def _from_dict(d: dict[Monomial, int]) -> "Scale":
        return Scale(tuple(sorted((m, e) for m, e in d.items() if e)))

    def __mul__(self, other: "Scale") -> "Scale":
        d = self._as_dict()
        for m, e in other.factors:
            d[m] = d.get(m, 0) + e
        return Scale._from_dict(d)

    def inverse(self) -> "Scale":
        return Scale(tuple((m, -e) for m, e in self.factors))

    def __truediv__(self, other: "Scale") -> "Scale":
        return self * other.inverse()

    @property
    def is_one(self) -> bool:
        return not self.factors

    def normalize(self, vee: RatFun | None = None) -> tuple["Scale", RatFun]:
        """Reduce every argument's v-exponent into 0..3; return (scale, rational factor)."""
        vee = _vee(vee)
        rational = RatFun(1, _canonical=True)
        out: dict[Monomial, int] = {}
        for arg, e in self.factors:
            r = arg.vexp % 4
            k = (arg.vexp - r) // 4
            base = arg.shifted(-4 * k)
            s, j, R = 1, k, RatFun(1, _canonical=True)
            while j > 0:
                R = R * (1 - base.shifted(4 * j).to_ratfun(vee)) ** (-s)
                s, j = -s, j - 1
            while j < 0:
                R = R * (1 - base.shifted(4 * j + 4).to_ratfun(vee)) ** (-s)
                s, j = -s, j + 1
            rational = rational * R ** e
            out[base] = out.get(base, 0) + s * e
        return Scale._from_dict(out), rational

    def __str__(self):
        if not self.factors:
            return "1"
        return "*".join(f"G({m})" + (f"^{e}" if e != 1 else "") for m, e in self.factors)


def f_symbolic(arg: Monomial, vee: RatFun | None = None) -> tuple[RatFun, Scale]:
    """f(arg) = v (1 - arg) G(arg)^2 as (rational part, scale)."""
    vee = _vee(vee)
    return vee * (1 - arg.to_ratfun(vee)), Scale.of(arg, 2)


def a_symbolic(arg: Monomial, vee: RatFun | None = None) -> tuple[RatFun, Scale]:
    """a(arg) = v^-1 G(arg)^-2, the prefactor of the inverse R-matrix."""
    vee = _vee(vee)
    return 1 / vee, Scale.of(arg, -2)

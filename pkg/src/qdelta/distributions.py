"""Rational functions plus graded delta packets.

A packet is stored as an exact coefficient C with meaning C * delta(mu).
Grades come from the local expansion of C along mu = 1: the coefficient of
(1 - mu)^(-k) sits at grade k, so B_k(mu) = (1 - mu)^(-k) delta(mu) and
(1 - mu) B_k = B_(k-1) hold by construction.  Products of two packets on
distinct, non-parallel divisors are point packets C * delta(mu1) delta(mu2).

Equality is decided on canonical forms:

* graded: rational parts agree exactly and every grade in [-P, P] agrees;
* flattened: negative grades are dropped (they vanish as bilateral series).

In two variables a packet on a divisor containing w is read by eliminating
w along the support.  The poles of its coefficient keep the direction they
had before restriction, which may disagree with the canonical reading of
the remaining variable; such poles are re-expanded, producing point
content.  Point content is compared through its bilateral coefficients,
which are independent of how the point was written.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ratfun import (
    AT_ZERO,
    DirectedRatFun,
    Frame,
    Monomial,
    NonMonomialDivisorError,
    RatFun,
    binomial,
    expand_window,
    laurent_jet,
    poles,
    valuation,
)
from .scalars import QScalar

__all__ = [
    "TruncParams",
    "Distribution",
    "DivergentProductError",
    "GradeCapError",
    "Mismatch",
    "Comparison",
    "canonicalize",
    "dist_mul",
    "dist_equal",
    "compare",
    "flatten",
    "graded_coefficients",
    "restrict_to_support",
]


class DivergentProductError(ArithmeticError):
    """Product of deltas on the same (or a parallel) divisor."""


class GradeCapError(ArithmeticError):
    """A packet needs grades outside the declared cap."""


@dataclass(frozen=True)
class TruncParams:
    N: int = 16
    P: int = 4
    H: int = 3

    def __post_init__(self):
        if self.N < 1 or self.P < 0 or self.H < 1:
            raise ValueError(f"invalid truncation parameters {self}")


def _zero() -> RatFun:
    return RatFun(0, _canonical=True)


def _pair_key(a: Monomial, b: Monomial) -> tuple[Monomial, Monomial]:
    a, b = a.normalized(), b.normalized()
    return (a, b) if a <= b else (b, a)


class Distribution:
    """rational part + packets + point packets, all with exact coefficients.

    A packet at mu is stored as terms {F: K} meaning (K / F) delta(mu), where
    F collects the poles that change reading when restricted to mu = 1 (see
    :func:`_flip_split`).  Terms with different F are kept apart: merging them
    into one rational coefficient would forget which factor each pole came
    from.
    """

    __slots__ = ("frame", "rational", "terms", "points", "_totals")

    def __init__(self, frame: Frame = AT_ZERO, rational=None, packets=None, points=None):
        self.frame = frame
        self.rational = frame.coerce(RatFun.coerce(rational)) if rational is not None else _zero()
        self.terms: dict[Monomial, dict[RatFun, RatFun]] = {}
        for mu, c in (packets or {}).items():
            mu = mu.normalized()
            if isinstance(c, dict):
                items = [(frame.coerce(F), frame.coerce(K)) for F, K in c.items()]
            else:
                c = frame.coerce(RatFun.coerce(c))
                items = _flip_split(c, mu, frame).items() if not c.is_zero() else []
            for F, K in items:
                _merge(self.terms, mu, F, K)
        self.points: dict[tuple[Monomial, Monomial], RatFun] = {}
        for key, c in (points or {}).items():
            c = frame.coerce(RatFun.coerce(c))
            if not c.is_zero():
                key = _pair_key(*key)
                acc = self.points.get(key, _zero()) + c
                if acc.is_zero():
                    self.points.pop(key, None)
                else:
                    self.points[key] = acc
        self._totals = None

    @property
    def packets(self) -> dict[Monomial, RatFun]:
        """Combined coefficient of every packet."""
        if self._totals is None:
            totals = {}
            for mu, terms in self.terms.items():
                c = _zero()
                for F, K in terms.items():
                    c = c + K / F
                if not c.is_zero():
                    totals[mu] = c
            self._totals = totals
        return self._totals

    # constructors -----------------------------------------------------
    @classmethod
    def delta(cls, frame: Frame, mu: Monomial, coeff=1) -> "Distribution":
        return cls(frame, packets={mu: RatFun.coerce(coeff)})

    @classmethod
    def B(cls, frame: Frame, mu: Monomial, k: int, coeff=1) -> "Distribution":
        """coeff * B_k(mu) = coeff * (1 - mu)^(-k) delta(mu)."""
        one_minus = 1 - mu.to_ratfun(frame.vee)
        return cls(frame, packets={mu: RatFun.coerce(coeff) * one_minus ** (-k)})

    @classmethod
    def zero(cls, frame: Frame) -> "Distribution":
        return cls(frame)

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.rational.is_zero() and not self.terms and not self.points

    @property
    def is_rational(self) -> bool:
        return not self.terms and not self.points

    # arithmetic -------------------------------------------------------
    def _lift(self, other) -> "Distribution":
        if isinstance(other, Distribution):
            if other.frame != self.frame:
                raise ValueError("distributions live in different frames")
            return other
        return Distribution(self.frame, RatFun.coerce(other) if not isinstance(other, QScalar) else self.frame.scalar(other))

    def __add__(self, other):
        o = self._lift(other)
        packets = {mu: dict(t) for mu, t in self.terms.items()}
        for mu, t in o.terms.items():
            for F, K in t.items():
                _merge(packets, mu, F, K)
        points = dict(self.points)
        for key, c in o.points.items():
            points[key] = points.get(key, _zero()) + c
        return Distribution(self.frame, self.rational + o.rational, packets, points)

    __radd__ = __add__

    def __neg__(self):
        return Distribution(
            self.frame,
            -self.rational,
            {mu: {F: -K for F, K in t.items()} for mu, t in self.terms.items()},
            {k: -c for k, c in self.points.items()},
        )

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, r) -> "Distribution":
        r = RatFun.coerce(r) if not isinstance(r, QScalar) else self.frame.scalar(r)
        r = self.frame.coerce(r)
        if r.is_zero():
            return Distribution(self.frame)
        return Distribution(
            self.frame,
            self.rational * r,
            _packets_times(self.terms, r, self.frame),
            {k: c * r for k, c in self.points.items()},
        )

    def __mul__(self, other):
        if isinstance(other, Distribution):
            return dist_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return (
            self.frame == other.frame
            and self.rational == other.rational
            and self.terms == other.terms
            and self.points == other.points
        )

    def __hash__(self):
        return hash((self.rational, tuple(sorted(self.packets.items()))))

    def specialize(self, v0) -> "Distribution":
        frame = self.frame.with_v(v0)
        return Distribution(frame, self.rational, self.terms, self.points)

    # text -------------------------------------------------------------
    def to_text(self, P: int | None = None) -> str:
        """Rational part followed by packets ``[divisor; grade:coeff,...]``."""
        parts = [str(self.rational)]
        packets = self.packets
        for mu in sorted(packets):
            c = packets[mu]
            if P is None or len(self.frame.variables) > 1:
                parts.append(f"[{mu}; {c}]")
            else:
                grades = graded_coefficients(self, mu, -P, P)
                body = ",".join(f"{k}:{g}" for k, g in sorted(grades.items(), reverse=True) if not g.is_zero())
                parts.append(f"[{mu}; {body}]")
        for key in sorted(self.points):
            parts.append(f"[{key[0]},{key[1]}; {self.points[key]}]")
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Distribution({self.to_text()})"


def _merge(packets: dict, mu: Monomial, F: RatFun, K: RatFun) -> None:
    slot = packets.setdefault(mu, {})
    acc = slot.get(F)
    acc = K if acc is None else acc + K
    if acc.is_zero():
        slot.pop(F, None)
        if not slot:
            packets.pop(mu)
    else:
        slot[F] = acc


def _flip_split(c: RatFun, mu: Monomial, frame: Frame) -> dict[RatFun, RatFun]:
    """{F: c F} where F is the product of (1 - nu)^m over the poles of c whose
    reading flips when w is eliminated along mu = 1."""
    one = RatFun(1, _canonical=True)
    if len(frame.variables) < 2 or mu.w == 0:
        return {one: c}
    uframe = frame.restrict("z")
    vee = frame.vee
    F = one
    for nu, m in poles(c, frame.v0):
        if nu.parallel(mu):
            continue
        nu_r = _restrict_monomial(nu, mu)
        if nu_r.is_scalar:
            continue
        if frame.is_small(nu) != uframe.is_small(nu_r):
            F = F * (1 - nu.to_ratfun(vee)) ** m
    return {F: c * F}


def _packets_times(terms: dict, r: RatFun, frame: Frame) -> dict:
    out: dict = {}
    for mu, t in terms.items():
        for Fr, Kr in _flip_split(r, mu, frame).items():
            for F, K in t.items():
                _merge(out, mu, F * Fr, K * Kr)
    return out


# ---------------------------------------------------------------------------
# products


def dist_mul(a: Distribution, b: Distribution, params: TruncParams | None = None) -> Distribution:
    """Product in the graded algebra; packet coefficients stay exact."""
    if a.frame != b.frame:
        raise ValueError("distributions live in different frames")
    frame = a.frame
    rational = a.rational * b.rational
    packets = _packets_times(a.terms, b.rational, frame) if not b.rational.is_zero() else {}
    if not a.rational.is_zero():
        for mu, t in _packets_times(b.terms, a.rational, frame).items():
            for F, K in t.items():
                _merge(packets, mu, F, K)
    points: dict[tuple[Monomial, Monomial], RatFun] = {}

    def add_point(key, c):
        points[key] = points.get(key, _zero()) + c

    for key, c in a.points.items():
        add_point(key, c * b.rational)
    for key, c in b.points.items():
        add_point(key, c * a.rational)
    pa, pb = a.packets, b.packets
    for mu1, c1 in pa.items():
        for mu2, c2 in pb.items():
            if mu1.parallel(mu2) or len(frame.variables) < 2:
                raise DivergentProductError(f"divergent δ·δ: δ({mu1})·δ({mu2})")
            add_point(_pair_key(mu1, mu2), c1 * c2)
    if (a.points and (b.terms or b.points)) or (b.points and a.terms):
        raise DivergentProductError("divergent δ·δ: three deltas in two variables")
    out = Distribution(frame, rational, packets, points)
    if params is not None:
        check_cap(out, params.P)
    return out


def check_cap(d: Distribution, P: int) -> None:
    for mu, c in d.packets.items():
        top = -valuation(c, mu, d.frame.vee)
        if top > P:
            raise GradeCapError(f"grade cap exceeded: packet at {mu} reaches grade {top} > {P}")


# ---------------------------------------------------------------------------
# canonicalization


def principal_coefficient(f: RatFun, nu: Monomial, vee: RatFun) -> RatFun:
    """(1 - nu) * PP_nu(f), the packet coefficient of a re-expansion."""
    order = -valuation(f, nu, vee)
    if order <= 0:
        return _zero()
    jets = laurent_jet(f, nu, -order, -1, vee)
    one_minus = 1 - nu.to_ratfun(vee)
    out = _zero()
    for k, c in jets.items():
        out = out + c * one_minus ** (k + 1)
    return out


def canonicalize(f: DirectedRatFun, frame: Frame | None = None) -> Distribution:
    """Rewrite a directed expansion in the canonical reading of ``frame``.

    Read_src(F) = Read_dst(F) + sum over disagreeing poles nu of
    +/- (1 - nu) PP_nu(F) delta(nu), with + when the source expands in nu.
    """
    frame = frame or Frame(tuple((x, 1) for x, _ in f.reading.order), f.reading.v0)
    fn = frame.coerce(RatFun.coerce(f.fn))
    vee = frame.vee
    packets: dict[Monomial, RatFun] = {}
    for nu, _order in poles(fn, frame.v0):
        src, dst = f.reading.is_small(nu), frame.is_small(nu)
        if src == dst:
            continue
        c = principal_coefficient(fn, nu, vee)
        packets[nu] = c if src else -c
    return Distribution(frame, fn, packets)


# ---------------------------------------------------------------------------
# graded views


def graded_coefficients(d: Distribution, mu: Monomial, lo: int, hi: int) -> dict[int, RatFun]:
    """Grade k -> coefficient of B_k(mu) for a packet of a univariate distribution."""
    c = d.packets.get(mu.normalized())
    if c is None:
        return {k: _zero() for k in range(lo, hi + 1)}
    jets = laurent_jet(c, mu.normalized(), -hi, -lo, d.frame.vee)
    return {-k: v for k, v in jets.items()}


def _restrict_monomial(nu: Monomial, mu: Monomial) -> Monomial:
    """nu on the support mu = 1 with w eliminated."""
    bm = mu.w  # +-1
    c = nu.w * bm
    r = nu * mu.inverse() ** c
    assert r.w == 0
    return r


@dataclass
class _Nested:
    """Canonical two-variable form: rational part plus, for each outer divisor,
    grade -> univariate distribution in the remaining variable."""

    rational: RatFun
    outer: dict[Monomial, dict[int, Distribution]] = field(default_factory=dict)


def _univariate(frame: Frame, var: str) -> Frame:
    return frame.restrict(var)


def _single_nested(terms: dict, mu: Monomial, frame: Frame, lo: int, hi: int, P: int) -> dict[int, Distribution]:
    vee = frame.vee
    total = _zero()
    for F, K in terms.items():
        total = total + K / F
    if not total.is_zero() and -valuation(total, mu, vee) > P:
        raise GradeCapError(f"grade cap exceeded: packet at {mu} reaches grade {-valuation(total, mu, vee)} > {P}")
    if mu.w == 0:
        uframe = _univariate(frame, "w")
        jets = laurent_jet(total, mu, -hi, -lo, vee)
        return {g: Distribution(uframe, jets[-g]) for g in range(lo, hi + 1)}
    uframe = _univariate(frame, "z")
    out: dict[int, Distribution] = {g: Distribution(uframe) for g in range(lo, hi + 1)}
    for F, K in terms.items():
        for g, u in _nested_term(K, F, mu, frame, uframe, lo, hi).items():
            out[g] = out[g] + u
    return out


def _nested_term(keep: RatFun, F: RatFun, mu: Monomial, frame: Frame, uframe: Frame, lo: int, hi: int):
    """Grades of (keep / F) delta(mu): keep is read as in the frame, 1/F in the
    opposite reading of the remaining variable."""
    vee = frame.vee
    out: dict[int, Distribution] = {}
    if keep.is_zero():
        return out
    klead = valuation(keep, mu, vee)
    imax = -lo
    if klead > imax:
        return out
    kjets = laurent_jet(keep, mu, klead, imax, vee)
    flip = 1 / F
    fjets = laurent_jet(flip, mu, 0, imax - klead, vee)
    canon_f: dict[int, Distribution] = {}
    reading = Frame((("z", -uframe.sign("z")),), frame.v0)
    for j, fj in fjets.items():
        canon_f[j] = canonicalize(DirectedRatFun(fj, reading), uframe) if not F.is_one() else Distribution(uframe, fj)
    for g in range(lo, hi + 1):
        acc = Distribution(uframe)
        for i, ki in kjets.items():
            j = -g - i
            if j < 0 or ki.is_zero() or j not in canon_f:
                continue
            acc = acc + canon_f[j].scale(ki)
        out[g] = acc
    return out


def restrict_to_support(d: Distribution, mu: Monomial) -> Distribution:
    """The coefficient of delta(mu) with w eliminated, as one function of z.

    Poles that change reading on the support are re-expanded through their
    principal parts, as :func:`canonicalize` does, so the packets carry
    constant graded coefficients.
    """
    mu = mu.normalized()
    frame, vee = d.frame, d.frame.vee
    uframe = _univariate(frame, "z")
    terms = d.terms.get(mu, {})
    total = _zero()
    flipped: set[Monomial] = set()
    for F, K in terms.items():
        total = total + K / F
        flipped |= {nu for nu, _ in poles(laurent_jet(1 / F, mu, 0, 0, vee)[0], frame.v0)}
    if total.is_zero():
        return Distribution(uframe)
    if valuation(total, mu, vee) < 0:
        raise GradeCapError(f"coefficient of δ({mu}) is singular on its support")
    r = laurent_jet(total, mu, 0, 0, vee)[0]
    packets = {}
    for nu, _ in poles(r, frame.v0):
        if nu in flipped:
            c = principal_coefficient(r, nu, vee)
            packets[nu] = -c if uframe.is_small(nu) else c
    return Distribution(uframe, r, packets)


def _e_coefficients(cexp: int, j: int) -> list[Fraction]:
    """e_i with sum_n binom(c n, j) x^n = sum_i e_i B_i(x)."""
    e: list[Fraction] = []
    for m in range(1, j + 2):
        n = -m
        target = Fraction(binomial(cexp * n, j))
        acc = sum((e[i] * binomial(n + i, i) for i in range(len(e))), Fraction(0))
        # coefficient of the new unknown e_{m-1} at n = -m is binom(-1, m-1) = (-1)^(m-1)
        e.append((target - acc) / binomial(-1, m - 1))
    return e


def _point_nested(c: RatFun, key: tuple[Monomial, Monomial], frame: Frame, lo: int, hi: int, P: int):
    a, b = key
    if a.w and b.w:
        outer = a if a.z == 0 else b if b.z == 0 else a
    elif a.w:
        outer = a
    elif b.w:
        outer = b
    else:
        raise DivergentProductError(f"divergent δ·δ: δ({a})·δ({b}) share no eliminable variable")
    inner = b if outer is a else a
    vee = frame.vee
    uframe = _univariate(frame, "z")
    cexp = inner.w * outer.w
    nu_r = inner * outer.inverse() ** cexp
    if nu_r.z not in (1, -1):
        raise NonMonomialDivisorError(f"non-monomial-solvable divisor {nu_r}")
    lead = valuation(c, outer, vee)
    if -lead > P:
        raise GradeCapError(f"grade cap exceeded: point packet at {outer} reaches grade {-lead} > {P}")
    jets = laurent_jet(c, outer, lead, -lo, vee)
    one_minus = 1 - nu_r.to_ratfun(vee)
    e_hat: dict[int, RatFun] = {}

    def ehat(j):
        if j not in e_hat:
            e = _e_coefficients(cexp, j)
            e_hat[j] = sum((RatFun.const(ei) * one_minus ** (-i) for i, ei in enumerate(e) if ei), _zero())
        return e_hat[j]

    out = {}
    for g in range(lo, hi + 1):
        coeff = _zero()
        for s, cs in jets.items():
            j = -g - s
            if j < 0 or cs.is_zero():
                continue
            coeff = coeff + cs * ehat(j) * (-1) ** j
        out[g] = Distribution(uframe, packets={nu_r: coeff})
    return outer.normalized(), out


def _nested(d: Distribution, lo: int, hi: int, P: int) -> _Nested:
    form = _Nested(d.rational)
    for mu, t in d.terms.items():
        grades = _single_nested(t, mu, d.frame, lo, hi, P)
        slot = form.outer.setdefault(mu, {})
        for g, u in grades.items():
            slot[g] = slot[g] + u if g in slot else u
    for key, c in d.points.items():
        outer, grades = _point_nested(c, key, d.frame, lo, hi, P)
        slot = form.outer.setdefault(outer, {})
        for g, u in grades.items():
            slot[g] = slot[g] + u if g in slot else u
    return form


# ---------------------------------------------------------------------------
# comparison


@dataclass(frozen=True)
class Mismatch:
    location: str
    grade: int | None
    expected: str
    got: str

    def as_dict(self) -> dict:
        return {"location": self.location, "grade": self.grade, "expected": self.expected, "got": self.got}


_TOP = float("inf")


@dataclass(frozen=True)
class Comparison:
    """Outcome in both modes.

    ``level`` is the highest grade at which the difference is nonzero
    (infinite for a rational or bilateral mismatch, None if equal in every
    grade).  Graded equality at cap P holds iff level < -P.
    """

    graded: bool
    flattened: bool
    graded_mismatch: Mismatch | None = None
    flattened_mismatch: Mismatch | None = None
    level: float | None = None

    @property
    def strongest(self) -> str | None:
        if self.graded:
            return "graded"
        if self.flattened:
            return "flattened"
        return None

    @property
    def depth(self) -> float:
        """Largest k with agreement in every grade >= -k."""
        return _TOP if self.level is None else -self.level - 1

    def ok(self, mode: str) -> bool:
        if mode == "graded":
            return self.graded
        if mode == "flattened":
            return self.flattened
        if mode == "strongest":
            return self.flattened
        raise ValueError(mode)

    def mismatch(self, mode: str) -> Mismatch | None:
        return self.graded_mismatch if mode == "graded" else self.flattened_mismatch


class _Tracker:
    """Keeps the highest-level graded mismatch and the first bilateral one."""

    def __init__(self):
        self.level: float | None = None
        self.graded: Mismatch | None = None
        self.flattened: Mismatch | None = None

    def graded_at(self, level: float, m: Mismatch):
        if self.level is None or level > self.level:
            self.level, self.graded = level, m

    def bilateral(self, m: Mismatch):
        if self.flattened is None:
            self.flattened = m


def _univariate_compare(a: Distribution, b: Distribution, P: int, where: str, track: _Tracker, cap: float = _TOP):
    """Record differences of two one-variable distributions; grades above ``cap`` are not seen."""
    vee = a.frame.vee
    if a.rational != b.rational:
        m = Mismatch(f"{where}rational", None, str(b.rational), str(a.rational))
        track.graded_at(cap, m)
        track.bilateral(m)
    for mu in sorted(set(a.packets) | set(b.packets)):
        ca, cb = a.packets.get(mu, _zero()), b.packets.get(mu, _zero())
        for c in (ca, cb):
            if not c.is_zero() and -valuation(c, mu, vee) > P:
                raise GradeCapError(f"grade cap exceeded at {where}{mu}")
        diff = ca - cb
        if diff.is_zero():
            continue
        top = -valuation(diff, mu, vee)
        ga = graded_coefficients(a, mu, top, top)[top]
        gb = graded_coefficients(b, mu, top, top)[top]
        m = Mismatch(f"{where}δ({mu})", top, str(gb), str(ga))
        track.graded_at(min(top, cap), m)
        if top >= 0:
            track.bilateral(m)


def _point_weights(form: _Nested, frame: Frame) -> dict[tuple[int, int], list]:
    """Bilateral content of point packets, keyed by the support point.

    Each entry is a list of (outer, g, inner, l, coeff) with g, l >= 0.
    """
    vee = frame.vee
    out: dict[tuple[int, int], list] = {}
    for mu, grades in form.outer.items():
        if mu.w == 0:
            continue
        for g, u in grades.items():
            if g < 0:
                continue
            for nu, c in u.packets.items():
                top = -valuation(c, nu, vee)
                if top < 0:
                    continue
                jets = laurent_jet(c, nu, -top, 0, vee)
                # support point: nu(z0) = 1, mu(z0, w0) = 1, as v-exponents
                z0 = -nu.vexp * nu.z
                w0 = -(mu.vexp + mu.z * z0) * mu.w
                for k, cl in jets.items():
                    if not cl.is_zero():
                        out.setdefault((z0, w0), []).append((mu, g, nu, -k, cl))
    return out


def _weight_at(entries, a: int, b: int) -> RatFun:
    total = _zero()
    for mu, g, nu, l, c in entries:
        n = b * mu.w
        m = (a - mu.z * n) * nu.z
        total = total + c * (binomial(n + g, g) * binomial(m + l, l))
    return total


def _compare_points(na: _Nested, nb: _Nested, frame: Frame, where: str, track: _Tracker):
    wa, wb = _point_weights(na, frame), _point_weights(nb, frame)
    for pt in sorted(set(wa) | set(wb)):
        ea, eb = wa.get(pt, []), wb.get(pt, [])
        deg = max([g + l for _, g, _, l, _ in ea + eb] + [0])
        for x in range(deg + 2):
            for y in range(deg + 2):
                va, vb = _weight_at(ea, x, y), _weight_at(eb, x, y)
                if va != vb:
                    track.bilateral(Mismatch(f"{where}point(z=v^{pt[0]},w=v^{pt[1]})@z^{x}w^{y}", None, str(vb), str(va)))
                    return


def compare(a: Distribution, b: Distribution, params: TruncParams | None = None, where: str = "") -> Comparison:
    """Decide equality in both modes."""
    P = (params or TruncParams()).P
    if a.frame != b.frame:
        raise ValueError("distributions live in different frames")
    track = _Tracker()
    if len(a.frame.variables) == 1:
        if a.points or b.points:
            raise DivergentProductError("point packets in one variable")
        _univariate_compare(a, b, P, where, track)
    else:
        na, nb = _nested(a, -P, P, P), _nested(b, -P, P, P)
        if na.rational != nb.rational:
            m = Mismatch(f"{where}rational", None, str(nb.rational), str(na.rational))
            track.graded_at(_TOP, m)
            track.bilateral(m)
        empty = {}
        for mu in sorted(set(na.outer) | set(nb.outer)):
            ga, gb = na.outer.get(mu, empty), nb.outer.get(mu, empty)
            for g in range(P, -P - 1, -1):
                ua, ub = ga.get(g), gb.get(g)
                if ua is None and ub is None:
                    continue
                uframe = (ua or ub).frame
                ua = ua or Distribution(uframe)
                ub = ub or Distribution(uframe)
                inner = _Tracker()
                # deeper outer jets legitimately carry deeper inner poles
                _univariate_compare(ua, ub, P - min(g, 0), f"{where}δ({mu})@{g}/", inner, cap=g)
                if inner.graded is not None:
                    m = inner.graded
                    track.graded_at(inner.level, Mismatch(m.location, g if m.grade is None else m.grade, m.expected, m.got))
                if g >= 0 and ua.rational != ub.rational:
                    track.bilateral(Mismatch(f"{where}δ({mu})@{g}/rational", g, str(ub.rational), str(ua.rational)))
        if track.flattened is None:
            _compare_points(na, nb, a.frame, where, track)
    graded = track.level is None or track.level < -P
    return Comparison(
        graded,
        track.flattened is None,
        None if graded else track.graded,
        track.flattened,
        track.level,
    )


def dist_equal(a: Distribution, b: Distribution, mode: str = "graded", params: TruncParams | None = None):
    """(equal?, first mismatch or None) in the requested mode."""
    c = compare(a, b, params)
    return c.ok(mode), c.mismatch(mode)


# ---------------------------------------------------------------------------
# flattening (one variable)


def flatten(d: Distribution, N: int) -> list[QScalar]:
    """Bilateral coefficients of z^-N..z^N; negative grades vanish."""
    frame = d.frame
    if len(frame.variables) != 1:
        raise ValueError("flatten is defined for one-variable distributions")
    var = frame.variables[0]
    out = [c for c in expand_window(DirectedRatFun(d.rational, frame), N)]
    vee = frame.vee
    for mu, c in d.packets.items():
        top = -valuation(c, mu, vee)
        if top < 0:
            continue
        jets = laurent_jet(c, mu, -top, 0, vee)
        base = mu.to_ratfun(vee).subs(var, RatFun(1, _canonical=True))  # v-part of mu
        e = mu.exp(var)
        for k, ck in jets.items():
            g = -k
            if ck.is_zero():
                continue
            for idx in range(-N, N + 1):
                n = idx * e  # mu^n contributes to z^(n*e); e = +-1
                out[idx + N] = out[idx + N] + ck * base ** n * binomial(n + g, g)
    return [frame_scalar(x) for x in out]


def frame_scalar(x: RatFun) -> QScalar:
    return x.to_qscalar()

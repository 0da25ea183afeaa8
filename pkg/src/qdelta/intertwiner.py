"""Evaluation images of the currents, their coproducts, and the intertwining
property of R^-1.

Central charge is zero throughout.  The second evaluation point is
normalized to 1, so the bivariate identities live in the variables w (the
current) and z (the ratio of evaluation points).  Positive currents are
read in the frame w << z << 1, negative ones in 1/w << z << 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .distributions import Distribution, TruncParams, canonicalize, dist_mul, restrict_to_support
from .qfunctions import Scale, a_symbolic, d_fn, f_symbolic
from .ratfun import AT_INFINITY, AT_ZERO, DirectedRatFun, Frame, Monomial, RatFun
from .reporting import Outcome
from .rmatrix import Cell, DistMatrix, _entry, build_Rinv, compare_matrices, matmul, swap_legs

__all__ = [
    "GENERATORS",
    "PLUS_FRAME",
    "MINUS_FRAME",
    "EvalImage",
    "eval_generator",
    "kron",
    "coproduct_image",
    "check_intertwining",
    "check_phial",
    "appendix_unknowns",
    "appendix_relations",
    "verify_appendix_relations",
    "InconsistentSystemError",
    "Derivation",
    "derive_R_appendix",
    "DERIVATION_ORDER",
    "check_derivation",
]

GENERATORS = ("xi+", "xi-", "phi+", "phi-", "alpha+", "alpha-")
PLUS_FRAME = Frame((("w", 1), ("z", 1)))
MINUS_FRAME = Frame((("w", -1), ("z", 1)))

_W = Monomial.var("w")
_Z = Monomial.var("z")
_ONE = Monomial()


def frame_for(name: str, v0=None) -> Frame:
    if name not in GENERATORS:
        raise ValueError(f"unknown generator {name!r}")
    return (PLUS_FRAME if name.endswith("+") else MINUS_FRAME).with_v(v0)


@dataclass(frozen=True)
class EvalImage:
    """pi_z applied to a current: a 2 x 2 matrix of distributions in w."""

    name: str
    spectral: Monomial
    matrix: DistMatrix

    def entry(self, i: int, j: int) -> Cell:
        return self.matrix.entry(i, j)


def eval_generator(name: str, z: Monomial = _Z, frame: Frame | None = None, w: Monomial = _W) -> EvalImage:
    """The two-dimensional evaluation image of ``name`` at spectral point ``z``."""
    frame = frame or frame_for(name)
    vee = frame.vee
    q = vee**2
    u = w / z  # w/z, the argument of the positive currents
    x = z / w  # z/w, the argument of the negative currents
    ur, xr = u.to_ratfun(vee), x.to_ratfun(vee)
    q2u, q2x = u.shifted(4).to_ratfun(vee), x.shifted(4).to_ratfun(vee)
    cells: dict[tuple[int, int], Cell] = {}
    if name in ("xi+", "xi-"):
        ij = (0, 1) if name == "xi+" else (1, 0)
        cells[ij] = Cell.of(Distribution.delta(frame, u, q - 1 / q))
    elif name == "phi+":
        cells[0, 0] = Cell.of(_entry(d_fn(q2u, vee), u, frame))
        cells[1, 1] = Cell.of(_entry(1 / d_fn(ur, vee), u, frame))
    elif name == "phi-":
        cells[0, 0] = Cell.of(_entry(1 / d_fn(xr, vee), x, frame))
        cells[1, 1] = Cell.of(_entry(d_fn(q2x, vee), x, frame))
    elif name == "alpha+":
        f, s = f_symbolic(u, vee)
        cells[0, 0] = Cell.of(_entry(f, u, frame), s)
        cells[1, 1] = Cell.of(_entry(f * d_fn(ur, vee), u, frame), s)
    elif name == "alpha-":
        a, s = a_symbolic(x, vee)
        inv_f = a / (1 - xr)
        cells[0, 0] = Cell.of(_entry(inv_f, x, frame), s)
        cells[1, 1] = Cell.of(_entry(inv_f / d_fn(q2x, vee), x, frame), s)
    else:
        raise ValueError(f"unknown generator {name!r}")
    return EvalImage(name, z, DistMatrix(2, frame, cells))


def kron(a: DistMatrix, b: DistMatrix, params: TruncParams | None = None) -> DistMatrix:
    """a (x) b on C^2 (x) C^2 with index 2 i + j."""
    cells: dict[tuple[int, int], Cell] = {}
    for (i, k), ca in a.cells.items():
        for (j, l), cb in b.cells.items():
            cells[2 * i + j, 2 * k + l] = ca.mul(cb, params)
    return DistMatrix(4, a.frame, cells)


def _identity2(frame: Frame) -> DistMatrix:
    return DistMatrix.identity(2, frame)


def coproduct_image(
    name: str,
    side: str = "delta",
    z: Monomial = _Z,
    z2: Monomial = _ONE,
    frame: Frame | None = None,
    params: TruncParams | None = None,
) -> DistMatrix:
    """(pi_z (x) pi_z2) applied to Delta(x) or, for ``side='opposite'``, Delta'(x)."""
    frame = frame or frame_for(name)
    if side == "opposite":
        return swap_legs(coproduct_image(name, "delta", z2, z, frame, params))
    if side != "delta":
        raise ValueError(f"unknown coproduct side {side!r}")

    def image(gen, at):
        return eval_generator(gen, at, frame).matrix

    if name == "xi+":
        return kron(image("xi+", z), _identity2(frame), params) + kron(image("phi+", z), image("xi+", z2), params)
    if name == "xi-":
        return kron(_identity2(frame), image("xi-", z2), params) + kron(image("xi-", z), image("phi-", z2), params)
    return kron(image(name, z), image(name, z2), params)


def _coefficients(d: Distribution) -> dict[Monomial, Distribution]:
    """Coefficient of each delta(w/Z) with w set to Z, as a distribution in z."""
    if not d.rational.is_zero() or d.points:
        raise ValueError("expected a pure sum of packets in w")
    return {mu: restrict_to_support(d, mu) for mu in d.terms}


def _reduce(m: DistMatrix, P: int) -> dict[Monomial, DistMatrix]:
    frame = AT_ZERO.with_v(m.frame.v0)
    cells: dict[Monomial, dict] = {}
    for ij, cell in m.cells.items():
        for scale, d in cell.terms.items():
            for mu, u in _coefficients(d).items():
                slot = cells.setdefault(mu, {})
                c = Cell.of(u, scale)
                slot[ij] = slot[ij] + c if ij in slot else c
    return {mu: DistMatrix(4, frame, c) for mu, c in cells.items()}


def _move_point_support(parts: dict[Monomial, DistMatrix]) -> dict[Monomial, DistMatrix]:
    """delta(w/z) delta(z) = delta(w) delta(z): packets at z = 1 found on the
    delta(w/z) coefficient are booked on the delta(w) coefficient."""
    on_w, on_wz = _W, (_W / _Z).normalized()
    if on_wz not in parts:
        return parts
    src = parts[on_wz]
    frame = src.frame
    rational = src.map(lambda d: Distribution(d.frame, d.rational))
    packets = src.map(lambda d: Distribution(d.frame, packets=d.terms))
    out = dict(parts)
    out[on_wz] = rational
    out[on_w] = parts[on_w] + packets if on_w in parts else packets
    return {mu: m for mu, m in out.items() if m.cells or mu in (on_w, on_wz)}


def check_intertwining(name: str, params: TruncParams = TruncParams(), v0=None, drop_delta: bool = False) -> Outcome:
    """R^-1(z) Delta(x) = Delta'(x) R^-1(z) with the second point at 1.

    phi and alpha are compared in the two-variable algebra.  For xi the
    images are pure delta(w/Z) terms; their coefficients, which do not
    depend on w on the support, are compared as distributions in z after
    packets at z = 1 are moved onto delta(w).  The direct two-variable
    comparison of xi is reported under ``bivariate``.
    """
    frame = frame_for(name, v0)
    Rt = build_Rinv(_Z, frame, drop_delta)
    delta = coproduct_image(name, "delta", frame=frame, params=params)
    opposite = coproduct_image(name, "opposite", frame=frame, params=params)
    lhs = matmul(Rt, delta, params)
    rhs = matmul(opposite, Rt, params)
    direct = compare_matrices(lhs, rhs, params)
    if not name.startswith("xi"):
        direct.info["generator"] = name
        return direct
    Ru = build_Rinv(_Z, AT_ZERO.with_v(v0), drop_delta)
    zero = DistMatrix(4, Ru.frame)
    lhs_parts = _move_point_support({mu: matmul(Ru, m, params) for mu, m in _reduce(delta, params.P).items()})
    rhs_parts = _move_point_support({mu: matmul(m, Ru, params) for mu, m in _reduce(opposite, params.P).items()})
    out = Outcome()
    for mu in sorted(set(lhs_parts) | set(rhs_parts)):
        compare_matrices(lhs_parts.get(mu, zero), rhs_parts.get(mu, zero), params, out, f"coefficient of δ({mu}):")
    out.info["generator"] = name
    out.info["bivariate"] = {"flattened": direct.passed("flattened"), **direct.summary()}
    return out


def check_phial(sign: str = "+", params: TruncParams = TruncParams(), v0=None) -> Outcome:
    """pi alpha(w) pi alpha(q^2 w) pi phi(w) = 1 entrywise, the evaluated form of
    the relation defining alpha from phi."""
    frame = frame_for("alpha" + sign, v0)
    alpha = eval_generator("alpha" + sign, _Z, frame).matrix
    shifted = eval_generator("alpha" + sign, _Z.shifted(-4), frame).matrix  # w -> q^2 w is z -> q^-2 z
    phi = eval_generator("phi" + sign, _Z, frame).matrix
    prod = matmul(matmul(alpha, shifted, params), phi, params)
    return compare_matrices(prod, DistMatrix.identity(2, frame), params)


# ---------------------------------------------------------------------------
# the eight relations in z alone


def _at_infinity(fn: RatFun, frame: Frame = AT_ZERO) -> Distribution:
    """fn expanded in z^-1, rewritten as at-zero rational plus packets."""
    return canonicalize(DirectedRatFun(frame.coerce(fn), AT_INFINITY.with_v(frame.v0)), frame)


def appendix_unknowns(v0=None) -> tuple[dict[str, Distribution], Scale]:
    """a1, b1, g1 delta, g2 delta, b2, a2 read off R^-1, without the common scale g~^-2."""
    frame = AT_ZERO.with_v(v0)
    Rinv = build_Rinv(_Z, frame)
    names = {"a1": (0, 0), "b1": (1, 1), "g1d": (1, 2), "g2d": (2, 1), "b2": (2, 2), "a2": (3, 3)}
    scale = None
    out = {}
    for key, ij in names.items():
        s, d = Rinv[ij].single()
        if not d.is_zero():
            if scale is not None and s != scale:
                raise ValueError("entries of R^-1 do not share one scale")
            scale = s
        out[key] = d
    return out, scale


def appendix_relations(u: dict[str, Distribution], params: TruncParams | None = None) -> dict[int, tuple[Distribution, Distribution]]:
    """Both sides of relations (1)-(8) for the unknowns ``u``."""
    frame = u["a1"].frame
    vee = frame.vee
    z = RatFun.gen("z")
    q2z = _Z.shifted(4).to_ratfun(vee)
    dz, dq2z = d_fn(z, vee), d_fn(q2z, vee)
    d_q2_over_z = _at_infinity(d_fn(vee**4 / z, vee), frame)
    inv_d_over_z = _at_infinity(1 / d_fn(1 / z, vee), frame)

    def mul(a, b):
        return dist_mul(a, b, params)

    a1, b1, g1d, g2d, b2, a2 = (u[k] for k in ("a1", "b1", "g1d", "g2d", "b2", "a2"))
    return {
        1: (mul(a1, d_q2_over_z), b1 + g2d.scale(dq2z)),
        2: (a1, g1d + b2.scale(dq2z)),
        3: (b1 + mul(g1d, inv_d_over_z), a2.scale(1 / dz)),
        4: (g2d + mul(b2, inv_d_over_z), a2),
        5: (b1 + mul(g1d, inv_d_over_z), a1.scale(1 / dz)),
        6: (g2d + mul(b2, inv_d_over_z), a1),
        7: (mul(a2, d_q2_over_z), b1 + g2d.scale(dq2z)),
        8: (a2, g1d + b2.scale(dq2z)),
    }


def verify_appendix_relations(params: TruncParams = TruncParams(), v0=None, gamma2_factor=1) -> Outcome:
    """Check relations (1)-(8) with the entries of R^-1; ``gamma2_factor`` scales g2."""
    u, scale = appendix_unknowns(v0)
    if gamma2_factor != 1:
        u = {**u, "g2d": u["g2d"].scale(RatFun.coerce(gamma2_factor))}
    out = Outcome()
    per_relation = {}
    for k, (lhs, rhs) in appendix_relations(u, params).items():
        one = Outcome()
        one.compare(f"relation({k})", lhs, rhs, params)
        per_relation[str(k)] = one.summary()["strongestMode"]
        out.merge(one)
    out.info["relations"] = per_relation
    out.info["commonScale"] = str(scale)
    return out


# ---------------------------------------------------------------------------
# the elimination


class InconsistentSystemError(ArithmeticError):
    def __init__(self, relation: int, detail: str):
        super().__init__(f"relation ({relation}) is inconsistent: {detail}")
        self.relation = relation


@dataclass
class Derivation:
    """Entries of R~ divided by a(z), plus the ordered log of the elimination."""

    entries: dict[str, RatFun]
    log: list[tuple[str, str, str]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "entries": {k: str(v) for k, v in self.entries.items()},
            "log": [{"relation": r, "conclusion": c, "justification": j} for r, c, j in self.log],
        }


def derive_R_appendix(v0=None) -> Derivation:
    """Solve the eight relations step by step, every unknown as a multiple of a1.

    a1, a2, b1, b2 are declared power series in z; the off-diagonal entries
    may carry a packet at z = 1.  The result is normalized by a1 = a(z)/(1-z).
    """
    frame = AT_ZERO.with_v(v0)
    vee = frame.vee
    q = vee**2
    z = RatFun.gen("z")
    dz, dq2z = d_fn(z, vee), d_fn(_Z.shifted(4).to_ratfun(vee), vee)
    zero = RatFun(0)
    log: list[tuple[str, str, str]] = []

    # (2): a1 - d(q^2 z) b2 = g1 delta(z).  Both terms on the left are power
    # series in z, so they have no packet at z = 1 to match g1 delta(z).
    a1 = RatFun(1)
    lhs2 = Distribution(frame, a1)  # b2 is still unknown but rational by declaration
    g1 = lhs2.packets.get(_Z, zero)
    if not g1.is_zero():
        raise InconsistentSystemError(2, "a power series cannot carry a delta packet")
    log.append(("2", "g1 = 0", "a1 and d(q^2 z) b2 lie in C[[z]]; delta(z) has a tail in z^-1 that nothing cancels"))

    # (3) with g1 = 0
    b1_from_a2 = RatFun(1) / dz  # b1 = a2 / d(z), still in terms of a2
    log.append(("3", "b1 = a2/d(z)", "g1 = 0 removes the packet term"))

    # (5) with g1 = 0
    b1 = a1 / dz
    a2 = b1 * dz
    if b1_from_a2 * a2 != b1:
        raise InconsistentSystemError(5, "b1 from (3) and (5) disagree")
    log.append(("5", "b1 = a1/d(z), hence a2 = a1", "compare with (3)"))

    # (8) with g1 = 0
    b2 = a2 / dq2z
    log.append(("8", "b2 = a1/d(q^2 z)", "g1 = 0"))

    # re-expansion of 1/d(1/z) as an at-zero distribution
    inv_d = _at_infinity(1 / d_fn(1 / z, vee), frame)
    expected = Distribution(frame, dq2z) + Distribution.delta(frame, _Z, q - 1 / q)
    if inv_d != expected:
        raise InconsistentSystemError(4, f"unexpected re-expansion {inv_d}")
    log.append(("re-expansion", "1/d(1/z) = d(q^2 z) + (q - q^-1) delta(z)", "1/(1 - 1/z) read in z^-1 equals delta(z) - z/(1-z)"))

    # (4): g2 delta + b2 (d(q^2 z) + (q - q^-1) delta) = a2
    rhs4 = Distribution(frame, a2) - dist_mul(Distribution(frame, b2), inv_d)
    if not rhs4.rational.is_zero():
        raise InconsistentSystemError(4, f"rational remainder {rhs4.rational}")
    g2 = rhs4.packets.get(_Z, zero)
    if g2 != (1 / q - q) * b2:
        raise InconsistentSystemError(4, f"packet coefficient {g2}")
    log.append(("4", "g2 = (q^-1 - q) b2", "rational parts cancel by (8); the packet of the re-expansion fixes g2"))

    solution = {"a1": a1, "b1": b1, "g1": zero, "g2": g2, "b2": b2, "a2": a2}
    # the remaining relations must hold with this solution
    u = {
        "a1": Distribution(frame, a1),
        "b1": Distribution(frame, b1),
        "g1d": Distribution(frame),
        "g2d": Distribution.delta(frame, _Z, g2),
        "b2": Distribution(frame, b2),
        "a2": Distribution(frame, a2),
    }
    for k, (lhs, rhs) in appendix_relations(u).items():
        if lhs != rhs and not Outcome().compare("", lhs, rhs, TruncParams()).graded:
            raise InconsistentSystemError(k, "derived entries violate it")
    log.append(("1,6,7", "satisfied", "substitution of the derived entries"))

    norm = 1 / (1 - z)
    entries = {k: v * norm for k, v in solution.items()}
    log.append(("normalization", "a1 = a(z)/(1-z)", "the relations fix R~ only up to a scalar"))
    return Derivation(entries, log)


DERIVATION_ORDER = ("2", "3", "5", "8", "re-expansion", "4", "1,6,7", "normalization")


def check_derivation(v0=None) -> Outcome:
    """The elimination against the closed forms and against R^-1 itself."""
    out = Outcome()
    try:
        der = derive_R_appendix(v0)
    except InconsistentSystemError as exc:
        out.fail(f"relation ({exc.relation})", None, "consistent", str(exc))
        return out
    vee = AT_ZERO.with_v(v0).vee
    q = vee**2
    z = RatFun.gen("z")
    e = der.entries
    a1 = e["a1"]
    want = {
        "g1": RatFun(0),
        "a2": a1,
        "b1": a1 / d_fn(z, vee),
        "b2": a1 / d_fn(_Z.shifted(4).to_ratfun(vee), vee),
        "g2": (1 / q - q) * e["b2"],
    }
    for k, w in want.items():
        if e[k] != w:
            out.fail(f"entry {k}", None, w, e[k])
    steps = tuple(r for r, _, _ in der.log)
    if steps != DERIVATION_ORDER:
        out.fail("log order", None, DERIVATION_ORDER, steps)
    # R^-1 carries the same entries up to one function of z
    u, _ = appendix_unknowns(v0)
    base = u["a1"].rational
    for k, key in (("b1", "b1"), ("b2", "b2"), ("a2", "a2")):
        if u[key].rational / base != e[k] / a1:
            out.fail(f"R^-1 ratio {k}/a1", None, e[k] / a1, u[key].rational / base)
    g2 = u["g2d"].packets.get(_Z, RatFun(0))
    if g2 / base != e["g2"] / a1:
        out.fail("R^-1 ratio g2/a1", None, e["g2"] / a1, g2 / base)
    out.info.update(der.to_json())
    return out

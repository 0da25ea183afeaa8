"""The singular R-matrix, its inverse, tensor-leg embeddings and the
inverse / Yang-Baxter checks.

Basis order is v1v1, v1v2, v2v1, v2v2 throughout, so the delta entry of R
sits at (3, 2).  Matrix entries are :class:`Cell` objects: sums of
``G-scale * Distribution`` where the G-scales carry the transcendental
factor g~ of f symbolically (see :class:`qdelta.qfunctions.Scale`).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .distributions import Distribution, TruncParams, canonicalize, dist_mul
from .qfunctions import Scale, a_symbolic, d_fn, f_symbolic, gamma_fn, gamma_prime_fn
from .ratfun import AT_ZERO, DirectedRatFun, Frame, Monomial, RatFun
from .reporting import Outcome

__all__ = [
    "Cell",
    "DistMatrix",
    "TensorLeg",
    "build_R",
    "build_Rinv",
    "swap_legs",
    "embed",
    "matmul",
    "compare_matrices",
    "check_inverse",
    "check_ybe",
    "YBE_FRAME",
    "check_ybe_hadic",
    "ybe_sides",
    "weight",
]


class Cell:
    """A matrix entry: scale -> distribution, with scales in normal form."""

    __slots__ = ("frame", "terms")

    def __init__(self, frame: Frame, terms=None):
        self.frame = frame
        self.terms: dict[Scale, Distribution] = {}
        for s, d in (terms or {}).items():
            self._add(s, d)

    def _add(self, scale: Scale, d: Distribution) -> None:
        for arg, _ in scale.factors:
            if not self.frame.is_small(arg):
                raise ValueError(f"G({arg}) is not a power series in the frame {self.frame.order}")
        scale, r = scale.normalize(self.frame.vee)
        if not r.is_one():
            d = d.scale(r)
        acc = self.terms.get(scale)
        acc = d if acc is None else acc + d
        if acc.is_zero():
            self.terms.pop(scale, None)
        else:
            self.terms[scale] = acc

    @classmethod
    def of(cls, d: Distribution, scale: Scale = Scale()) -> "Cell":
        return cls(d.frame, {scale: d})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Cell") -> "Cell":
        out = Cell(self.frame, self.terms)
        for s, d in other.terms.items():
            out._add(s, d)
        return out

    def __neg__(self) -> "Cell":
        return Cell(self.frame, {s: -d for s, d in self.terms.items()})

    def __sub__(self, other: "Cell") -> "Cell":
        return self + (-other)

    def mul(self, other: "Cell", params: TruncParams | None = None) -> "Cell":
        out = Cell(self.frame)
        for (sa, da), (sb, db) in product(self.terms.items(), other.terms.items()):
            out._add(sa * sb, dist_mul(da, db, params))
        return out

    def scale_by(self, r, scale: Scale = Scale()) -> "Cell":
        out = Cell(self.frame)
        for s, d in self.terms.items():
            out._add(s * scale, d.scale(r))
        return out

    def map(self, fn) -> "Cell":
        return Cell(self.frame, {s: fn(d) for s, d in self.terms.items()})

    def single(self) -> tuple[Scale, Distribution]:
        """The only term; zero cells give (1, 0)."""
        if not self.terms:
            return Scale(), Distribution(self.frame)
        if len(self.terms) > 1:
            raise ValueError("cell has several independent scales")
        return next(iter(self.terms.items()))

    def specialize(self, v0) -> "Cell":
        frame = self.frame.with_v(v0)
        return Cell(frame, {s: d.specialize(v0) for s, d in self.terms.items()})

    def to_text(self, P: int | None = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for s in sorted(self.terms, key=str):
            body = self.terms[s].to_text(P)
            parts.append(body if s.is_one else f"{s}*({body})")
        return " + ".join(parts)

    def __repr__(self):
        return f"Cell({self.to_text()})"


@dataclass(frozen=True)
class TensorLeg:
    """Ordered pair of tensor factors (1-based) inside ``size`` factors."""

    legs: tuple[int, int]
    size: int = 3

    def __post_init__(self):
        a, b = self.legs
        if a == b or not (1 <= a <= self.size and 1 <= b <= self.size):
            raise ValueError(f"invalid legs {self.legs} for {self.size} factors")


class DistMatrix:
    """Sparse n x n matrix of cells; indices are 0-based internally."""

    def __init__(self, n: int, frame: Frame, cells=None):
        self.n = n
        self.frame = frame
        self.cells: dict[tuple[int, int], Cell] = {k: c for k, c in (cells or {}).items() if not c.is_zero()}

    @classmethod
    def identity(cls, n: int, frame: Frame) -> "DistMatrix":
        one = Cell.of(Distribution(frame, 1))
        return cls(n, frame, {(i, i): one for i in range(n)})

    def entry(self, i: int, j: int) -> Cell:
        """1-based access."""
        return self.cells.get((i - 1, j - 1), Cell(self.frame))

    def __getitem__(self, ij) -> Cell:
        return self.cells.get(ij, Cell(self.frame))

    def map(self, fn) -> "DistMatrix":
        return DistMatrix(self.n, self.frame, {k: c.map(fn) for k, c in self.cells.items()})

    def without_packets(self) -> "DistMatrix":
        return self.map(lambda d: Distribution(d.frame, d.rational))

    def specialize(self, v0) -> "DistMatrix":
        return DistMatrix(self.n, self.frame.with_v(v0), {k: c.specialize(v0) for k, c in self.cells.items()})

    def __add__(self, other: "DistMatrix") -> "DistMatrix":
        cells = dict(self.cells)
        for ij, c in other.cells.items():
            cells[ij] = cells[ij] + c if ij in cells else c
        return DistMatrix(self.n, self.frame, cells)

    def __neg__(self) -> "DistMatrix":
        return DistMatrix(self.n, self.frame, {ij: -c for ij, c in self.cells.items()})

    def __sub__(self, other: "DistMatrix") -> "DistMatrix":
        return self + (-other)

    def __matmul__(self, other: "DistMatrix") -> "DistMatrix":
        return matmul(self, other)

    def rows(self, P: int | None = None) -> list[list[str]]:
        return [[self[i, j].to_text(P) for j in range(self.n)] for i in range(self.n)]


def matmul(a: DistMatrix, b: DistMatrix, params: TruncParams | None = None) -> DistMatrix:
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    by_row: dict[int, list[tuple[int, Cell]]] = {}
    for (k, j), c in b.cells.items():
        by_row.setdefault(k, []).append((j, c))
    out: dict[tuple[int, int], Cell] = {}
    for (i, k), ca in sorted(a.cells.items()):
        for j, cb in by_row.get(k, []):
            term = ca.mul(cb, params)
            out[i, j] = out[i, j] + term if (i, j) in out else term
    return DistMatrix(a.n, a.frame, out)


# ---------------------------------------------------------------------------
# construction


def _reading(arg: Monomial, frame: Frame) -> Frame:
    """A variant of ``frame`` in which ``arg`` is small."""
    if frame.is_small(arg):
        return frame
    for x, s in frame.order:
        if arg.exp(x):
            order = tuple((y, -t if y == x else t) for y, t in frame.order)
            return Frame(order, frame.v0)
    raise ValueError(f"{arg} has no direction")


def _entry(fn: RatFun, arg: Monomial, frame: Frame, packet=None) -> Distribution:
    """fn read as a power series in ``arg``, plus an optional packet at arg."""
    d = canonicalize(DirectedRatFun(fn, _reading(arg, frame)), frame)
    if packet is not None and not packet.is_zero():
        d = d + Distribution.delta(frame, arg, packet)
    return d


def build_R(arg: Monomial | None = None, frame: Frame = AT_ZERO, drop_delta: bool = False) -> DistMatrix:
    """R(arg) = f(arg) [[1], [d, 0], [gamma delta, d(q^2 .)], [1]]."""
    arg = arg or Monomial.var("z")
    vee = frame.vee
    x = arg.to_ratfun(vee)
    q2x = arg.shifted(4).to_ratfun(vee)
    f_rat, f_scale = f_symbolic(arg, vee)
    cells = {
        (0, 0): f_rat,
        (1, 1): f_rat * d_fn(x, vee),
        (2, 2): f_rat * d_fn(q2x, vee),
        (3, 3): f_rat,
    }
    out = {k: Cell.of(_entry(v, arg, frame), f_scale) for k, v in cells.items()}
    if not drop_delta:
        out[2, 1] = Cell.of(Distribution.delta(frame, arg, f_rat * gamma_fn(x, vee)), f_scale)
    return DistMatrix(4, frame, out)


def build_Rinv(arg: Monomial | None = None, frame: Frame = AT_ZERO, drop_delta: bool = False) -> DistMatrix:
    """R^-1(arg) = a(arg) [[1/(1-z)], [(q-q^-1 z)/(1-z)^2, 0], [gamma' delta, 1/(q^-1-qz)], [1/(1-z)]]."""
    arg = arg or Monomial.var("z")
    vee = frame.vee
    q = vee**2
    x = arg.to_ratfun(vee)
    a_rat, a_scale = a_symbolic(arg, vee)
    cells = {
        (0, 0): a_rat / (1 - x),
        (1, 1): a_rat * (q - x / q) / (1 - x) ** 2,
        (2, 2): a_rat / (1 / q - q * x),
        (3, 3): a_rat / (1 - x),
    }
    out = {k: Cell.of(_entry(v, arg, frame), a_scale) for k, v in cells.items()}
    if not drop_delta:
        out[2, 1] = Cell.of(Distribution.delta(frame, arg, a_rat * gamma_prime_fn(x, vee)), a_scale)
    return DistMatrix(4, frame, out)


_SWAP = {0: 0, 1: 2, 2: 1, 3: 3}


def swap_legs(m: DistMatrix) -> DistMatrix:
    """P m P: the same operator with the two tensor factors exchanged."""
    return DistMatrix(4, m.frame, {(_SWAP[i], _SWAP[j]): c for (i, j), c in m.cells.items()})


def _bits(index: int, size: int) -> list[int]:
    return [(index >> (size - 1 - k)) & 1 for k in range(size)]


def embed(m: DistMatrix, legs: TensorLeg | tuple[int, int], size: int = 3) -> DistMatrix:
    """Place a two-factor operator on the given legs of a ``size``-fold product."""
    legs = legs if isinstance(legs, TensorLeg) else TensorLeg(tuple(legs), size)
    size = legs.size
    a, b = legs.legs[0] - 1, legs.legs[1] - 1
    n = 2**size
    if m.n == n:
        return m
    if m.n != 4:
        raise ValueError("embed expects a 4 x 4 operator")
    out: dict[tuple[int, int], Cell] = {}
    for I in range(n):
        bi = _bits(I, size)
        for J in range(n):
            bj = _bits(J, size)
            if any(bi[k] != bj[k] for k in range(size) if k not in (a, b)):
                continue
            c = m.cells.get((2 * bi[a] + bi[b], 2 * bj[a] + bj[b]))
            if c is not None:
                out[I, J] = c
    return DistMatrix(n, m.frame, out)


def weight(index: int, size: int) -> int:
    return sum(_bits(index, size))


# ---------------------------------------------------------------------------
# comparison and checks


def compare_matrices(a: DistMatrix, b: DistMatrix, params: TruncParams, outcome: Outcome | None = None, label: str = "") -> Outcome:
    """Entrywise, scale by scale, in both modes."""
    outcome = outcome or Outcome()
    zero = Distribution(a.frame)
    for i, j in sorted(set(a.cells) | set(b.cells)):
        ca, cb = a[i, j], b[i, j]
        for s in sorted(set(ca.terms) | set(cb.terms), key=str):
            where = f"{label}entry({i + 1},{j + 1})" + ("" if s.is_one else f"[{s}]")
            outcome.compare(where, ca.terms.get(s, zero), cb.terms.get(s, zero), params)
    return outcome


def check_inverse(params: TruncParams = TruncParams(), v0=None) -> Outcome:
    """R(z) R^-1(z) = R^-1(z) R(z) = 1."""
    frame = AT_ZERO.with_v(v0)
    R, Ri = build_R(frame=frame), build_Rinv(frame=frame)
    one = DistMatrix.identity(4, frame)
    out = Outcome()
    compare_matrices(matmul(R, Ri, params), one, params, out, "R.Rinv:")
    compare_matrices(matmul(Ri, R, params), one, params, out, "Rinv.R:")
    # the two delta contributions to (3, 2) must be opposite constants
    q = frame.vee**2
    left = matmul(
        DistMatrix(4, frame, {(2, 1): R[2, 1]}),
        DistMatrix(4, frame, {(1, 1): Ri[1, 1]}),
        params,
    )[2, 1]
    right = matmul(
        DistMatrix(4, frame, {(2, 2): R[2, 2]}),
        DistMatrix(4, frame, {(2, 1): Ri[2, 1]}),
        params,
    )[2, 1]
    z = Monomial.var("z")
    for name, cell, expect in (("R32.Rinv22", left, q - 1 / q), ("R33.Rinv32", right, 1 / q - q)):
        s, d = cell.single()
        got = d.packets.get(z, RatFun(0))
        if not s.is_one or got != expect or not d.rational.is_zero():
            out.fail(f"(3,2) cross term {name}", 0, expect, got)
    out.info["crossTerms"] = [str(q - 1 / q), str(1 / q - q)]
    return out


YBE_FRAME = Frame((("w", 1), ("z", 1)))


def ybe_sides(frame: Frame = YBE_FRAME, params: TruncParams = TruncParams(), drop_delta: bool = False):
    """Both sides of R12(z) R13(wz) R23(w) = R23(w) R13(wz) R12(z)."""
    z, w = Monomial.var("z"), Monomial.var("w")
    R12 = embed(build_R(z, frame, drop_delta), (1, 2))
    R13 = embed(build_R(z * w, frame), (1, 3))
    R23 = embed(build_R(w, frame), (2, 3))
    lhs = matmul(matmul(R12, R13, params), R23, params)
    rhs = matmul(matmul(R23, R13, params), R12, params)
    return lhs, rhs


def check_weights(m: DistMatrix, outcome: Outcome, label: str) -> None:
    size = m.n.bit_length() - 1
    for (i, j), c in m.cells.items():
        if weight(i, size) != weight(j, size) and not c.is_zero():
            outcome.fail(f"{label}entry({i + 1},{j + 1}) breaks weight conservation", None, 0, c.to_text())


def check_ybe(
    params: TruncParams = TruncParams(),
    drop_delta: bool = False,
    v0=None,
    rational_only: bool = False,
    h_order: int | None = None,
) -> Outcome:
    """Yang-Baxter equation in the two-variable algebra (w outer, both read at zero).

    Two worlds are compared.  At generic v the delta entry of R vanishes to
    second order on its support, so the germ comparison cannot see it; the
    h-adic expansion (v = e^(h/4)) makes it visible from order h on.  The
    verdict asks for bilateral agreement in both, and reports the graded
    depth the germ comparison reaches.
    """
    frame = YBE_FRAME.with_v(v0)
    lhs, rhs = ybe_sides(frame, params, drop_delta)
    if rational_only:
        lhs, rhs = lhs.without_packets(), rhs.without_packets()
    out = compare_matrices(lhs, rhs, params)
    check_weights(lhs, out, "lhs:")
    check_weights(rhs, out, "rhs:")
    out.info["nonzeroEntries"] = len(lhs.cells)
    out.info["germDepth"] = out.summary()["gradedDepth"]
    if not rational_only:
        H = min(params.H, 2) if h_order is None else h_order
        out.merge(check_ybe_hadic(H, params, drop_delta), "h-adic:")
        out.info["hOrder"] = H
    return out


def check_ybe_hadic(H: int, params: TruncParams = TruncParams(), drop_delta: bool = False) -> Outcome:
    """The same identity order by order in h, each order compared bilaterally."""
    from .hadic import h_build_R, h_frame, h_map, h_matmul

    z, w = Monomial.var("z"), Monomial.var("w")
    frame = h_frame(YBE_FRAME)
    R12 = h_map(h_build_R(z, frame, H, drop_delta), lambda m: embed(m, (1, 2)))
    R13 = h_map(h_build_R(z * w, frame, H), lambda m: embed(m, (1, 3)))
    R23 = h_map(h_build_R(w, frame, H), lambda m: embed(m, (2, 3)))
    lhs = h_matmul(h_matmul(R12, R13, params), R23, params)
    rhs = h_matmul(h_matmul(R23, R13, params), R12, params)
    out = Outcome()
    for k in range(H + 1):
        compare_matrices(lhs[k], rhs[k], params, out, f"h^{k}:")
    return out

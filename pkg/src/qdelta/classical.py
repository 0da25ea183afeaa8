"""The classical limit R = 1 + h r + O(h^2) at v = e^(h/4)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .distributions import Distribution, TruncParams
from .hadic import HSeriesRat, _r_series, f_h_series, h_expand_ratfun, h_frame
from .qfunctions import ZSeries, d_fn, lambda_fn
from .ratfun import Frame, Monomial, RatFun
from .reporting import Outcome
from .rmatrix import YBE_FRAME, Cell, DistMatrix, _entry, compare_matrices, embed, matmul

__all__ = [
    "HMatrixExpansion",
    "h_expand_R",
    "ClassicalR",
    "extract_classical_r",
    "classical_r_matrix",
    "cybe_residual",
    "check_cybe",
    "check_fd_ratio",
]

_Z = Monomial.var("z")
_W = Monomial.var("w")
_SIGNS = {(0, 0): 1, (1, 1): -1, (2, 2): -1, (3, 3): 1}


@dataclass(frozen=True)
class HMatrixExpansion:
    """Orders 0..H of R as z-series; ``delta[k]`` is the packet coefficient
    at entry (3,2) expanded as a function."""

    N: int
    entries: tuple[dict[tuple[int, int], ZSeries], ...]
    delta: tuple[ZSeries, ...]

    @property
    def H(self) -> int:
        return len(self.entries) - 1

    def entry(self, k: int, i: int, j: int) -> ZSeries:
        """1-based entry of order k; absent entries are zero."""
        return self.entries[k].get((i - 1, j - 1), ZSeries([0] * (self.N + 1)))


def h_expand_R(N: int = 16, H: int = 3) -> HMatrixExpansion:
    diag, packet = _r_series(H)
    entries = tuple(
        {ij: ZSeries.from_ratfun(s[k], N) for ij, s in diag.items()} for k in range(H + 1)
    )
    delta = tuple(ZSeries.from_ratfun(packet[k], N) for k in range(H + 1))
    return HMatrixExpansion(N, entries, delta)


@dataclass
class ClassicalR:
    """Order-h part of R: diagonal z-series plus the delta coefficient."""

    N: int
    diagonal: dict[tuple[int, int], ZSeries]
    delta: ZSeries
    report: Outcome = field(default_factory=Outcome)

    def lam(self) -> ZSeries:
        return self.diagonal[0, 0]

    def to_text(self) -> list[list[str]]:
        rows = [["0"] * 4 for _ in range(4)]
        for (i, j), s in self.diagonal.items():
            rows[i][j] = s.to_text()
        rows[2][1] = f"({self.delta.to_text()})*delta(z)"
        return rows


def extract_classical_r(N: int = 16, H: int = 2) -> ClassicalR:
    """Read r off order h and check it against diag(l, -l, -l, l) + delta(z) E32."""
    if H < 2:
        raise ValueError("extract_classical_r needs H >= 2")
    ex = h_expand_R(N, H)
    out = Outcome()
    lam = ZSeries.from_ratfun(lambda_fn(RatFun.gen("z")), N)
    ident = ZSeries([1] + [0] * N)
    zero = ZSeries([0] * (N + 1))
    for (i, j), sign in _SIGNS.items():
        for k, want in ((0, ident), (1, lam * sign)):
            got = ex.entries[k].get((i, j), zero)
            for n in range(N + 1):
                if got[n] != want[n]:
                    out.fail(f"h^{k}:entry({i + 1},{j + 1})", n, want[n], got[n])
    for k, want in ((0, zero), (1, ident)):
        for n in range(N + 1):
            if ex.delta[k][n] != want[n]:
                out.fail(f"h^{k}:delta(3,2)", n, want[n], ex.delta[k][n])
    out.info["lambda"] = lam.to_text()
    out.info["deltaCoefficient"] = ex.delta[1].to_text()
    return ClassicalR(N, dict(ex.entries[1]), ex.delta[1], out)


def classical_r_matrix(arg: Monomial = _Z, frame: Frame = h_frame(YBE_FRAME), drop_delta: bool = False) -> DistMatrix:
    """r(arg) as a distribution matrix with v = 1."""
    lam = lambda_fn(arg.to_ratfun(RatFun(1)))
    cells = {ij: Cell.of(_entry(lam * s, arg, frame)) for ij, s in _SIGNS.items()}
    if not drop_delta:
        cells[2, 1] = Cell.of(Distribution.delta(frame, arg))
    return DistMatrix(4, frame, cells)


def _bracket(a: DistMatrix, b: DistMatrix, params) -> DistMatrix:
    return matmul(a, b, params) - matmul(b, a, params)


def cybe_residual(params: TruncParams = TruncParams(), drop_delta: bool = False) -> DistMatrix:
    """[r12(z), r13(zw)] + [r12(z), r23(w)] + [r13(zw), r23(w)]."""
    frame = h_frame(YBE_FRAME)
    r12 = embed(classical_r_matrix(_Z, frame, drop_delta), (1, 2))
    r13 = embed(classical_r_matrix(_Z * _W, frame), (1, 3))
    r23 = embed(classical_r_matrix(_W, frame), (2, 3))
    return _bracket(r12, r13, params) + _bracket(r12, r23, params) + _bracket(r13, r23, params)


def check_cybe(params: TruncParams = TruncParams(), drop_delta: bool = False, cross_check: bool = True) -> Outcome:
    """CYBE in the two-variable algebra, cross-checked against the h^2 YBE residual."""
    from .hadic import h_build_R, h_map, h_matmul

    res = cybe_residual(params, drop_delta)
    frame = res.frame
    out = compare_matrices(res, DistMatrix(8, frame), params)
    out.info["nonzeroEntries"] = len(res.cells)
    if cross_check:
        R12 = h_map(h_build_R(_Z, frame, 2, drop_delta), lambda m: embed(m, (1, 2)))
        R13 = h_map(h_build_R(_Z * _W, frame, 2), lambda m: embed(m, (1, 3)))
        R23 = h_map(h_build_R(_W, frame, 2), lambda m: embed(m, (2, 3)))
        ybe2 = h_matmul(h_matmul(R12, R13, params), R23, params)[2] - h_matmul(h_matmul(R23, R13, params), R12, params)[2]
        agree = compare_matrices(res, ybe2, params)
        out.info["crossValidated"] = agree.strongest
        out.merge(agree, "cross-check:")
    return out


def check_fd_ratio(H: int = 3) -> Outcome:
    """(q - 1/q) f d and (q - 1/q) f / d both start h * 1 + O(h^2)."""
    z = RatFun.gen("z")
    f = f_h_series(H)
    d = h_expand_ratfun(d_fn(z), H)
    lead = h_expand_ratfun(RatFun.gen("v") ** 2 - RatFun.gen("v") ** -2, H)
    forms = {"f*d": lead * f * d, "f/d": lead * f / d}
    out = Outcome()
    for name, s in forms.items():
        for k, want in ((0, RatFun(0)), (1, RatFun(1))):
            if s[k] != want:
                out.fail(f"{name}:h^{k}", k, want, s[k])
    out.info["series"] = {name: [str(c) for c in s.coeffs] for name, s in forms.items()}
    if H >= 2:
        out.info["differAtH2"] = forms["f*d"][2] != forms["f/d"][2]
    return out

"""Evaluated L-operators: RLL relations, quantum determinants and the map mu.

Block convention: the auxiliary space is the first tensor factor, so the
operator entry L_ij acts on the quantum space as the 2 x 2 block
``M[2i + k, 2j + l]`` of the 4 x 4 matrix M.  With this reading L+ is lower
and L- upper triangular, and the blocks agree with the images of mu.
"""

from __future__ import annotations

from dataclasses import dataclass

from .distributions import TruncParams
from .intertwiner import eval_generator
from .ratfun import Frame, Monomial
from .reporting import Outcome
from .rmatrix import (
    YBE_FRAME,
    Cell,
    DistMatrix,
    _entry,
    build_R,
    build_Rinv,
    check_weights,
    check_ybe,
    compare_matrices,
    embed,
    matmul,
    swap_legs,
)

__all__ = [
    "L_FRAMES",
    "LEvalImage",
    "eval_L",
    "block",
    "from_blocks",
    "mu_image",
    "check_mu_evaluation",
    "check_qdet",
    "RLL_INSTANCES",
    "RLLInstance",
    "check_rll_instance",
    "check_rll",
]

_Z = Monomial.var("z")
_W = Monomial.var("w")

# z/w small for L+, w/z small for L-; the quantum point w is the inner variable
L_FRAMES = {"+": Frame((("z", 1), ("w", 1))), "-": Frame((("z", -1), ("w", 1)))}


def _frame(sign: str, v0=None) -> Frame:
    if sign not in L_FRAMES:
        raise ValueError(f"sign must be '+' or '-', not {sign!r}")
    return L_FRAMES[sign].with_v(v0)


def block(m: DistMatrix, i: int, j: int) -> DistMatrix:
    """Operator entry L_ij (1-based) as a 2 x 2 matrix on the quantum space."""
    i, j = i - 1, j - 1
    cells = {(k, l): m[2 * i + k, 2 * j + l] for k in range(2) for l in range(2)}
    return DistMatrix(2, m.frame, cells)


def from_blocks(blocks: dict[tuple[int, int], DistMatrix], frame: Frame) -> DistMatrix:
    cells = {}
    for (i, j), b in blocks.items():
        for (k, l), c in b.cells.items():
            cells[2 * (i - 1) + k, 2 * (j - 1) + l] = c
    return DistMatrix(4, frame, cells)


@dataclass(frozen=True)
class LEvalImage:
    sign: str
    spectral: Monomial
    point: Monomial
    matrix: DistMatrix

    def block(self, i: int, j: int) -> DistMatrix:
        return block(self.matrix, i, j)

    def is_triangular(self) -> bool:
        zero = self.block(1, 2) if self.sign == "+" else self.block(2, 1)
        return not zero.cells


def eval_L(sign: str, z: Monomial = _Z, w: Monomial = _W, frame: Frame | None = None, drop_delta: bool = False) -> LEvalImage:
    """pi_w L+(z) = R(z/w) and pi_w L-(z) = R21^-1(w/z)."""
    frame = frame or _frame(sign)
    if sign == "+":
        m = build_R(z / w, frame, drop_delta)
    elif sign == "-":
        m = swap_legs(build_Rinv(w / z, frame, drop_delta))
    else:
        raise ValueError(f"sign must be '+' or '-', not {sign!r}")
    return LEvalImage(sign, z, w, m)


def _diag_inverse(m: DistMatrix, arg: Monomial) -> DistMatrix:
    """Inverse of a diagonal image whose entries are power series in ``arg``."""
    cells = {}
    for (i, j), cell in m.cells.items():
        if i != j:
            raise ValueError("not diagonal")
        s, d = cell.single()
        if not d.is_rational:
            raise ValueError("diagonal entry carries a packet")
        cells[i, i] = Cell.of(_entry(1 / d.rational, arg, m.frame), s.inverse())
    return DistMatrix(2, m.frame, cells)


def mu_image(sign: str, z: Monomial = _Z, w: Monomial = _W, frame: Frame | None = None, params: TruncParams | None = None) -> DistMatrix:
    """pi_w applied entrywise to mu(L(z)), assembled as a 4 x 4 matrix."""
    frame = frame or _frame(sign)
    z2 = z.shifted(4)

    def image(name, at):
        return eval_generator(name, w, frame, at).matrix

    if sign == "+":
        A = image("alpha+", z)
        blocks = {
            (1, 1): A,
            (2, 1): matmul(image("xi+", z), A, params),
            (2, 2): _diag_inverse(image("alpha+", z2), z2 / w),
        }
    else:
        A = image("alpha-", z)
        blocks = {
            (1, 1): A,
            (1, 2): -matmul(A, image("xi-", z), params),
            (2, 2): _diag_inverse(image("alpha-", z2), w / z2),
        }
    return from_blocks(blocks, frame)


def check_mu_evaluation(sign: str = "+", params: TruncParams = TruncParams(), v0=None) -> Outcome:
    """Blocks of pi_w mu(L(z)) against the evaluated L-operator."""
    frame = _frame(sign, v0)
    got = mu_image(sign, frame=frame, params=params)
    want = eval_L(sign, frame=frame).matrix
    out = Outcome()
    matched = {}
    for i in (1, 2):
        for j in (1, 2):
            one = compare_matrices(block(got, i, j), block(want, i, j), params, label=f"L{sign}[{i}{j}]:")
            matched[f"{i}{j}"] = one.summary()["strongestMode"]
            out.merge(one)
    out.info["blocks"] = matched
    return out


def check_qdet(sign: str = "+", params: TruncParams = TruncParams(), v0=None, shift: int = -4) -> Outcome:
    """L11(z) L22(z q^-2) evaluates to 1; ``shift`` is the v-exponent of the
    second argument's multiplier (-4 for q^-2)."""
    frame = _frame(sign, v0)
    L = eval_L(sign, _Z, _W, frame)
    Ls = eval_L(sign, _Z.shifted(shift), _W, frame)
    D = matmul(L.block(1, 1), Ls.block(2, 2), params)
    out = compare_matrices(D, DistMatrix.identity(2, frame), params)
    out.info["shift"] = f"v^{shift}"
    return out


# ---------------------------------------------------------------------------
# RLL relations with the quantum space evaluated at 1


@dataclass(frozen=True)
class _Factor:
    kind: str  # "R" or "Rt" = R21^-1
    arg: Monomial
    legs: tuple[int, int]


@dataclass(frozen=True)
class RLLInstance:
    """One RLL relation with the quantum space evaluated at 1.

    ``direct`` is the left-hand product as it comes out of the evaluation;
    ``ybe`` is the same relation after the inverse factors are multiplied
    out, which is a Yang-Baxter equation on permuted legs.  ``carrier`` is
    the position of R12(z/w) in ``ybe``.  The right-hand sides are the
    reversed products.
    """

    direct: tuple[_Factor, _Factor, _Factor]
    ybe: tuple[_Factor, _Factor, _Factor]
    carrier: int


RLL_INSTANCES = {
    # R12(z/w) L1+(z) L2+(w) with z/w -> z, w -> w
    "++": RLLInstance(
        (_Factor("R", _Z, (1, 2)), _Factor("R", _Z * _W, (1, 3)), _Factor("R", _W, (2, 3))),
        (_Factor("R", _Z, (1, 2)), _Factor("R", _Z * _W, (1, 3)), _Factor("R", _W, (2, 3))),
        0,
    ),
    # R12(z/w) L1-(z) L2-(w) with z/w -> z, 1/z -> w
    "--": RLLInstance(
        (_Factor("R", _Z, (1, 2)), _Factor("Rt", _W, (1, 3)), _Factor("Rt", _Z * _W, (2, 3))),
        (_Factor("R", _W, (3, 1)), _Factor("R", _Z * _W, (3, 2)), _Factor("R", _Z, (1, 2))),
        2,
    ),
    # R12(z/w) L1+(z) L2-(w) at c = 0 with z -> z, 1/w -> w
    "+-": RLLInstance(
        (_Factor("R", _Z * _W, (1, 2)), _Factor("R", _Z, (1, 3)), _Factor("Rt", _W, (2, 3))),
        (_Factor("R", _W, (3, 2)), _Factor("R", _Z * _W, (1, 2)), _Factor("R", _Z, (1, 3))),
        1,
    ),
}


def _germ(f: _Factor, frame: Frame, drop_delta: bool) -> DistMatrix:
    m = build_R(f.arg, frame, drop_delta) if f.kind == "R" else swap_legs(build_Rinv(f.arg, frame, drop_delta))
    return embed(m, f.legs)


def _hadic(f: _Factor, frame: Frame, H: int, drop_delta: bool):
    from .hadic import h_build_R, h_build_Rinv, h_map

    if f.kind == "R":
        m = h_build_R(f.arg, frame, H, drop_delta)
    else:
        m = h_map(h_build_Rinv(f.arg, frame, H, drop_delta), swap_legs)
    return h_map(m, lambda x: embed(x, f.legs))


def _triple(factors, params: TruncParams, v0, drop: int | None, H: int) -> Outcome:
    """A B C = C B A in the germ world and order by order in h."""
    from .hadic import h_frame, h_matmul

    frame = YBE_FRAME.with_v(v0)
    A, B, C = (_germ(f, frame, n == drop) for n, f in enumerate(factors))
    lhs = matmul(matmul(A, B, params), C, params)
    rhs = matmul(matmul(C, B, params), A, params)
    out = compare_matrices(lhs, rhs, params)
    check_weights(lhs, out, "lhs:")
    check_weights(rhs, out, "rhs:")
    out.info["germDepth"] = out.summary()["gradedDepth"]
    hf = h_frame(YBE_FRAME)
    A, B, C = (_hadic(f, hf, H, n == drop) for n, f in enumerate(factors))
    lhs = h_matmul(h_matmul(A, B, params), C, params)
    rhs = h_matmul(h_matmul(C, B, params), A, params)
    for k in range(H + 1):
        compare_matrices(lhs[k], rhs[k], params, out, f"h-adic:h^{k}:")
    out.info["hOrder"] = H
    return out


def check_rll_instance(
    key: str,
    params: TruncParams = TruncParams(),
    v0=None,
    drop_delta: bool = False,
    h_order: int | None = None,
    direct: bool = True,
) -> Outcome:
    """One RLL relation.  The verdict is that of its Yang-Baxter form (the
    inverse factors multiplied out, which :func:`check_inverse` licenses);
    the product with the inverse factors left in place is reported under
    ``direct``.  ``drop_delta`` removes the packet of R12(z/w)."""
    inst = RLL_INSTANCES[key]
    H = min(params.H, 2) if h_order is None else h_order
    if key == "++":
        out = check_ybe(params, drop_delta, v0, h_order=H)
    else:
        out = _triple(inst.ybe, params, v0, inst.carrier if drop_delta else None, H)
        if direct:
            raw = _triple(inst.direct, params, v0, 0 if drop_delta else None, H)
            out.info["direct"] = {"flattened": raw.passed("flattened"), **raw.summary()}
    out.info["instance"] = key
    return out


def check_rll(params: TruncParams = TruncParams(), v0=None) -> Outcome:
    out = Outcome()
    modes = {}
    for key in RLL_INSTANCES:
        one = check_rll_instance(key, params, v0)
        modes[key] = one.summary()["strongestMode"]
        out.merge(one, f"{key}:")
    out.info["instances"] = modes
    return out

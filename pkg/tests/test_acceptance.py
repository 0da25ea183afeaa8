"""Acceptance criteria 1-11, one test each.

Every test records a one-line verdict; the terminal summary prints them in
order (see conftest.py).  Parts that cannot hold are split into strict
xfail tests next to the criterion they belong to.
"""

from __future__ import annotations

import time
from fractions import Fraction

import pytest
from corpus import V0, build_corpus

from qdelta.classical import check_cybe, check_fd_ratio, extract_classical_r, h_expand_R
from qdelta.distributions import TruncParams, dist_mul, flatten
from qdelta.intertwiner import GENERATORS, check_derivation, check_intertwining, verify_appendix_relations
from qdelta.qfunctions import ZSeries, build_f, verify_fdiff
from qdelta.rll import RLL_INSTANCES, check_mu_evaluation, check_qdet, check_rll_instance
from qdelta.rmatrix import check_inverse, check_ybe
from qdelta.scalars import Q

P = TruncParams(N=16, P=4, H=3)
RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def timed(fn, *args, **kwargs):
    t = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t


def test_criterion_01_fdiff():
    res, dt = timed(verify_fdiff, 32)
    f = build_f(6)
    bad = verify_fdiff(6, ZSeries([f[0], f[1] + 1, *f.coeffs[2:]]))
    control = bad["status"] == "fail" and bad["failures"][0]["order"] == 1
    ok = res["status"] == "pass" and dt < 5 and control
    record(1, ok, f"fdiff to N=32 in {dt:.2f}s; perturbed f1 fails at order {bad['failures'][0]['order']}")


def test_criterion_02_routes():
    a, b = build_f(32), build_f(32, "recursion")
    record(2, a == b, "Pochhammer and recursion routes agree to N=32")


def test_criterion_03_inverse():
    out, dt = timed(check_inverse, P)
    q = Q
    cross = out.info["crossTerms"] == [str(q - 1 / q), str(1 / q - q)]
    ok = out.passed("graded") and cross and dt < 5
    record(3, ok, f"R.Rinv = Rinv.R = 1 graded at P=4 in {dt:.2f}s; (3,2) cross terms {out.info['crossTerms']}")


def test_criterion_04_appendix():
    out = verify_appendix_relations(P)
    neg = verify_appendix_relations(P, gamma2_factor=2)
    hit = {f["location"].split(":")[0] for f in neg.flattened} & {"relation(1)", "relation(4)"}
    ok = out.passed("strongest") and len(out.info["relations"]) == 8 and bool(hit)
    record(4, ok, f"modes {out.info['relations']}; 2*gamma2 breaks {sorted(hit)}")


def test_criterion_05_derivation():
    out = check_derivation()
    record(5, out.passed("graded"), f"entries {out.info.get('entries')}; log order ok")


def test_criterion_06_intertwining():
    modes = {}
    ok = True
    for g in GENERATORS:
        out = check_intertwining(g, P)
        ok &= out.passed("strongest")
        modes[g] = out.strongest
    record(6, ok, f"strongest modes {modes}")


def test_criterion_07_ybe():
    out, dt = timed(check_ybe, P)
    neg = check_ybe(P, drop_delta=True)
    ok = out.passed("strongest") and dt < 60 and not neg.passed("flattened")
    record(
        7,
        ok,
        f"strongest mode {out.strongest} (germ depth {out.info['germDepth']}, h-adic to h^{out.info['hOrder']}) "
        f"in {dt:.2f}s; dropping delta fails",
    )


def test_criterion_08_rll_qdet():
    inst = {k: check_rll_instance(k, P) for k in RLL_INSTANCES}
    qdet = {s: check_qdet(s, P) for s in "+-"}
    wrong = [check_qdet(s, P, shift=-8) for s in "+-"]
    ok = all(o.passed("strongest") for o in inst.values())
    ok &= all(o.passed("graded") for o in qdet.values())
    ok &= not any(o.passed("flattened") for o in wrong)
    modes = {k: o.strongest for k, o in inst.items()}
    record(8, ok, f"RLL {modes}; qdet +/- graded; shift q^-4 fails")


def test_criterion_09_mu():
    outs = {s: check_mu_evaluation(s, P) for s in "+-"}
    ok = all(o.passed("graded") for o in outs.values())
    record(9, ok, f"blocks {[o.info['blocks'] for o in outs.values()]}")


def test_criterion_10_classical():
    N = 16
    ex = h_expand_R(N, 3)
    ident = all(
        [c.constant_value() for c in ex.entry(0, i, i).coeffs] == [1] + [0] * N for i in range(1, 5)
    )
    r = extract_classical_r(N, 2)
    fd = check_fd_ratio(3)
    cy = check_cybe(P)
    ok = ident and r.report.passed("graded") and fd.passed("graded") and cy.passed("strongest")
    record(10, ok, f"order 0 identity; r matches lambda to z^{N}, delta coefficient {r.delta.coeffs[0]}; fd ratio ok; CYBE {cy.strongest}")


def test_criterion_11_oracles():
    corpus = build_corpus()
    matched = 0
    for case in corpus:
        d = dist_mul(case.a, case.b, TruncParams(N=12, P=4, H=3))
        got = [c.specialize(V0) for c in flatten(d, case.N)]
        matched += got == [case.expected[n] for n in range(-case.N, case.N + 1)]
    v0 = Fraction(3, 2)
    spec = {
        "inverse": check_inverse(P, v0),
        "ybe-rational": check_ybe(P, v0=v0, rational_only=True),
        **{f"intertwine:{g}": check_intertwining(g, P, v0) for g in GENERATORS},
        "appendix": verify_appendix_relations(P, v0),
        "derive": check_derivation(v0),
        **{f"rll:{k}": check_rll_instance(k, P, v0) for k in RLL_INSTANCES},
        **{f"qdet:{s}": check_qdet(s, P, v0) for s in "+-"},
        **{f"mu:{s}": check_mu_evaluation(s, P, v0) for s in "+-"},
    }
    failed = [k for k, o in spec.items() if not o.passed("strongest")]
    ok = len(corpus) >= 50 and matched == len(corpus) and not failed
    record(11, ok, f"{matched}/{len(corpus)} oracle products; v=3/2 specialization failures {failed}")


# parts of the criteria that do not hold as literally worded


@pytest.mark.xfail(strict=True, reason="graded YBE disagrees below grade -1; see the decision ledger")
def test_criterion_07_graded_reading():
    assert check_ybe(P).passed("graded")


@pytest.mark.xfail(strict=True, reason="phi and alpha intertwining agree only bilaterally at grade -1")
@pytest.mark.parametrize("name", ["phi+", "phi-", "alpha+", "alpha-"])
def test_criterion_06_graded_reading(name):
    assert check_intertwining(name, P).passed("graded")

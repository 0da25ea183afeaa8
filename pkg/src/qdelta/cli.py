"""Batch verifier: run registered checks and report them as text or JSON."""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .distributions import DivergentProductError, GradeCapError, TruncParams
from .intertwiner import GENERATORS
from .ratfun import NonMonomialDivisorError
from .reporting import Outcome
from .scalars import PoleError

__all__ = [
    "CHECK_IDS",
    "MODES",
    "CheckConfig",
    "CheckReport",
    "UsageError",
    "expand_checks",
    "run_check",
    "run_checks",
    "dump_object",
    "main",
]

SCHEMA_VERSION = 1
MODES = ("graded", "flattened", "both", "strongest")
DUMPABLE = ("R", "Rinv", "r", "f", "gtilde")
_INTERNAL = (GradeCapError, DivergentProductError, PoleError, NonMonomialDivisorError)


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# registry


def _fdiff(p: TruncParams, v0) -> Outcome:
    from .qfunctions import build_f, verify_fdiff

    out = Outcome()
    res = verify_fdiff(p.N)
    for f in res["failures"]:
        out.fail(f"fdiff:{f['location']}", f["order"], f["expected"], f["got"])
    poch, rec = build_f(p.N), build_f(p.N, "recursion")
    for n in range(p.N + 1):
        if poch[n] != rec[n]:
            out.fail("routes:z-coefficient", n, poch[n], rec[n])
    return out


def _mu(p, v0):
    from .rll import check_mu_evaluation

    out = Outcome()
    for sign in "+-":
        one = check_mu_evaluation(sign, p, v0)
        out.merge(one, f"L{sign}:")
        out.info[sign] = one.info["blocks"]
    return out


def _qdet(sign):
    def run(p, v0):
        from .rll import check_qdet

        return check_qdet(sign, p, v0)

    return run


def _intertwine(name):
    def run(p, v0):
        from .intertwiner import check_intertwining

        return check_intertwining(name, p, v0)

    return run


def _lazy(module, fn, *, v=True, h=False):
    def run(p, v0):
        from importlib import import_module

        target = getattr(import_module(f"qdelta.{module}"), fn)
        if h:
            return target(p.H)
        return target(p, v0=v0) if v else target(p)

    return run


def _classical(p, v0):
    from .classical import extract_classical_r

    return extract_classical_r(p.N, max(p.H, 2)).report


def _derive(p, v0):
    from .intertwiner import check_derivation

    return check_derivation(v0)


_REGISTRY = {
    "fdiff": _fdiff,
    "rinv": _lazy("rmatrix", "check_inverse"),
    "ybe": _lazy("rmatrix", "check_ybe"),
    **{f"intertwine:{g}": _intertwine(g) for g in GENERATORS},
    "appendix": _lazy("intertwiner", "verify_appendix_relations"),
    "derive": _derive,
    "rll": _lazy("rll", "check_rll"),
    "qdet:+": _qdet("+"),
    "qdet:-": _qdet("-"),
    "mu": _mu,
    "classical": _classical,
    "cybe": _lazy("classical", "check_cybe", v=False),
    "fdratio": _lazy("classical", "check_fd_ratio", h=True),
}
CHECK_IDS = tuple(_REGISTRY)
# checks that live at v = 1 ignore a specialization point
_CLASSICAL = {"classical", "cybe", "fdratio"}


def expand_checks(spec) -> list[str]:
    """'all', a comma list, or a list of ids; 'intertwine' and 'qdet' expand to their families."""
    items = spec.split(",") if isinstance(spec, str) else list(spec)
    out: list[str] = []
    for item in (s.strip() for s in items):
        if not item:
            continue
        if item == "all":
            group = list(CHECK_IDS)
        elif item in ("intertwine", "qdet"):
            group = [c for c in CHECK_IDS if c.startswith(item + ":")]
        elif item in _REGISTRY:
            group = [item]
        else:
            raise UsageError(f"unknown check id {item!r}; known: {', '.join(CHECK_IDS)}")
        out.extend(c for c in group if c not in out)
    if not out:
        raise UsageError("no checks requested")
    return out


# ---------------------------------------------------------------------------
# configuration and reports


@dataclass(frozen=True)
class CheckConfig:
    checks: tuple[str, ...] = ("all",)
    params: TruncParams = TruncParams()
    mode: str = "strongest"
    specialization: Fraction | None = None
    output: str = "text"
    jobs: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}, not {self.mode!r}")
        if self.output not in ("text", "json"):
            raise UsageError(f"report format must be text or json, not {self.output!r}")
        object.__setattr__(self, "checks", tuple(expand_checks(self.checks)))

    @property
    def modes(self) -> tuple[str, ...]:
        return ("graded", "flattened") if self.mode == "both" else (self.mode,)


@dataclass
class CheckReport:
    check: str
    params: dict
    mode: str
    status: str
    failures: list[dict] = field(default_factory=list)
    info: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def __post_init__(self):
        if (self.status == "pass") != (not self.failures):
            raise ValueError("failures must be empty exactly when the check passes")

    def to_json(self) -> dict:
        d = asdict(self)
        d["wallTime"] = round(d.pop("wall_time"), 6)
        return d

    def to_text(self) -> str:
        head = f"{self.status.upper():5} {self.check} [{self.mode}] ({self.wall_time:.2f}s)"
        lines = [head]
        for f in self.failures[:5]:
            order = f.get("grade", f.get("order"))
            lines.append(f"      at {f['location']} (order {order}): expected {f['expected']}, got {f['got']}")
        if len(self.failures) > 5:
            lines.append(f"      ... {len(self.failures) - 5} more")
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (str, int, bool)) or x is None:
        return x
    if isinstance(x, float):
        return x if x == x and abs(x) != float("inf") else str(x)
    return str(x)


def run_check(check: str, params: TruncParams, modes: tuple[str, ...], v0=None) -> list[CheckReport]:
    """One check, reported once per mode.  Cap and pole overflows become status 'error'."""
    echo = {"N": params.N, "P": params.P, "H": params.H}
    if v0 is not None and check not in _CLASSICAL:
        echo["v"] = str(v0)
    start = time.perf_counter()
    try:
        out = _REGISTRY[check](params, None if check in _CLASSICAL else v0)
    except _INTERNAL as exc:
        elapsed = time.perf_counter() - start
        failure = {"location": type(exc).__name__, "order": None, "expected": "", "got": str(exc)}
        return [CheckReport(check, echo, m, "error", [failure], {}, elapsed) for m in modes]
    elapsed = time.perf_counter() - start
    info = _jsonable(out.summary())
    reports = []
    for m in modes:
        failures = _jsonable(out.failures(m))
        reports.append(CheckReport(check, echo, m, "pass" if not failures else "fail", failures, info, elapsed))
    return reports


def _run_one(args):
    return run_check(*args)


def run_checks(config: CheckConfig) -> list[CheckReport]:
    """Reports in the order the checks were requested, whatever the pool does."""
    tasks = [(c, config.params, config.modes, config.specialization) for c in config.checks]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            batches = list(pool.map(_run_one, tasks))
    else:
        batches = [_run_one(t) for t in tasks]
    return [r for batch in batches for r in batch]


# ---------------------------------------------------------------------------
# dumps


def _matrix_text(rows: list[list[str]]) -> str:
    return "\n".join(f"({i + 1},{j + 1}) {cell}" for i, row in enumerate(rows) for j, cell in enumerate(row))


def dump_object(name: str, params: TruncParams = TruncParams()) -> str:
    """Exact, run-independent text for one of R, Rinv, r, f, gtilde."""
    if name == "R":
        from .rmatrix import build_R

        return _matrix_text(build_R().rows(params.P))
    if name == "Rinv":
        from .rmatrix import build_Rinv

        return _matrix_text(build_Rinv().rows(params.P))
    if name == "r":
        from .classical import extract_classical_r

        return _matrix_text(extract_classical_r(params.N, max(params.H, 2)).to_text())
    if name == "f":
        from .qfunctions import build_f

        return build_f(params.N).to_text()
    if name == "gtilde":
        from .qfunctions import build_gtilde

        return build_gtilde(params.N).to_text()
    raise UsageError(f"unknown object {name!r}; choose from {', '.join(DUMPABLE)}")


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qdelta", description="Exact verification of the singular R-matrix identities.")
    p.add_argument("--check", default="all", help="comma-separated check ids or 'all'")
    p.add_argument("--order", "-N", type=int, default=16, help="z-order of series windows")
    p.add_argument("--pole-cap", "-P", type=int, default=4, help="delta grade cap")
    p.add_argument("--h-order", "-H", type=int, default=3, help="order in h")
    p.add_argument("--mode", choices=MODES, default="strongest")
    p.add_argument("--specialize", type=Fraction, default=None, metavar="RATIONAL", help="specialize v to a rational")
    p.add_argument("--report", choices=("text", "json"), default="text")
    p.add_argument("--dump", choices=DUMPABLE, default=None, help="print an object instead of running checks")
    p.add_argument("--jobs", "-j", type=int, default=1, help="worker processes")
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
        params = TruncParams(args.order, args.pole_cap, args.h_order)
        if args.dump:
            print(dump_object(args.dump, params))
            return 0
        config = CheckConfig(args.check, params, args.mode, args.specialize, args.report, max(args.jobs, 1))
    except (UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    reports = run_checks(config)
    if config.output == "json":
        print(json.dumps({"schemaVersion": SCHEMA_VERSION, "reports": [r.to_json() for r in reports]}, indent=2, sort_keys=True))
    else:
        for r in reports:
            print(r.to_text())
        passed = sum(r.status == "pass" for r in reports)
        print(f"{passed}/{len(reports)} passed")
    statuses = {r.status for r in reports}
    if "error" in statuses:
        return 3
    return 1 if "fail" in statuses else 0


if __name__ == "__main__":
    sys.exit(main())

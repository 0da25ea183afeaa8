"""Independent reference computations in plain Fractions.

Nothing here imports the package: series are produced by long division at
a fixed rational v, and bilateral delta windows by the binomial formula.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial


def poly_eval(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def series_div(num, den, n):
    """Coefficients 0..n of num/den as a power series; den[0] != 0."""
    num = list(num) + [Fraction(0)] * (n + 1)
    out = []
    for k in range(n + 1):
        c = num[k] - sum(out[i] * den[k - i] for i in range(max(0, k - len(den) + 1), k) if k - i < len(den))
        out.append(Fraction(c) / den[0])
    return out


def binom_poly(n: int, k: int) -> Fraction:
    """binom(n + k, k) as a polynomial in n; valid for negative n."""
    acc = Fraction(1)
    for i in range(1, k + 1):
        acc *= n + i
    return acc / factorial(k)


def delta_window(a: Fraction, k: int, N: int) -> dict[int, Fraction]:
    """B_k(a z) = sum_n binom(n + k, k) a^n z^n on the window [-N, N]."""
    return {n: binom_poly(n, k) * a**n for n in range(-N, N + 1)}


def laurent_times(p: dict[int, Fraction], window: dict[int, Fraction], N: int) -> dict[int, Fraction]:
    """A Laurent polynomial times a bilateral window, read on [-N, N]."""
    out = {n: Fraction(0) for n in range(-N, N + 1)}
    for e, c in p.items():
        for n in out:
            out[n] += c * window[n - e]
    return out


def series_times(a: list[Fraction], b: list[Fraction], N: int) -> dict[int, Fraction]:
    out = {n: Fraction(0) for n in range(-N, N + 1)}
    for n in range(N + 1):
        out[n] = sum(a[i] * b[n - i] for i in range(n + 1))
    return out

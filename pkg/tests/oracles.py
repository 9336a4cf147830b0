"""Reference computations that share no code with the package."""

from fractions import Fraction

import mpmath
import numpy as np

TWO128 = 2**128


def weyl_fixed(alpha_fixed: int, n: int) -> int:
    """``{n * a} * 2**128`` for ``a = alpha_fixed / 2**128``, in exact rationals."""
    a = Fraction(alpha_fixed, TWO128)
    frac = (n * a) % 1
    assert (frac * TWO128).denominator == 1
    return int(frac * TWO128)


def frac_of_multiple(constant: str, n: int, digits: int = 80) -> float:
    """``{n * c}`` at high precision for an mpmath constant expression."""
    with mpmath.workdps(digits):
        c = {"pi": mpmath.pi, "golden": (mpmath.sqrt(5) - 1) / 2, "sqrt2": mpmath.sqrt(2)}[constant]
        return mpmath.frac(n * c)


def radical_inverse(base: int, n: int) -> Fraction:
    digits = np.base_repr(n, base)
    return sum((Fraction(int(d, 36), base ** (i + 1)) for i, d in enumerate(reversed(digits))), Fraction(0))


def star_discrepancy_brute(points) -> float:
    """sup over anchored boxes [0, t) and [0, t] with t at every point (and t = 1)."""
    pts = [float(p) for p in points]
    n = len(pts)
    best = 0.0
    for t in pts:
        open_count = sum(1 for p in pts if p < t)
        closed_count = sum(1 for p in pts if p <= t)
        best = max(best, abs(open_count / n - t), abs(closed_count / n - t))
    return best


def exact_sum(values) -> Fraction:
    return sum((Fraction(float(v)) for v in values), Fraction(0))

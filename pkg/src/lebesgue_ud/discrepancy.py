"""Equidistribution measures for finite point sets in (0, 1)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DiscrepancyError


@dataclass(frozen=True)
class DiscrepancyReport:
    """Star discrepancy of ``n`` points.

    ``argmax_interval`` is ``(0, t)``; ``argmax_closed`` tells whether the
    worst anchored box is ``[0, t]`` (too many points) or ``[0, t)`` (too few).
    """

    n: int
    d_star: float
    argmax_interval: tuple[float, float]
    argmax_closed: bool
    defect_grid: list[tuple[tuple[float, float], float]] | None = None

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "d_star": self.d_star,
            "argmax_interval": list(self.argmax_interval),
            "argmax_closed": self.argmax_closed,
        }
        if self.defect_grid is not None:
            out["defect_grid"] = [{"interval": list(iv), "defect": d} for iv, d in self.defect_grid]
        return out


def _as_points(points) -> np.ndarray:
    x = np.asarray(points, dtype=np.float64).ravel()
    if x.size == 0:
        raise DiscrepancyError("need at least one point")
    if not (np.all(x > 0.0) and np.all(x < 1.0)):
        raise DiscrepancyError("points must lie in the open interval (0, 1)")
    return x


def star_discrepancy(points, grid=None) -> DiscrepancyReport:
    """Exact star discrepancy ``sup_t |#{x_i in [0, t)}/n - t|`` in O(n log n).

    With the sorted points ``x_(1) <= ... <= x_(n)``::

        D*_n = 1/(2n) + max_i |x_(i) - (2i - 1)/(2n)|

    If ``grid`` is given (a list of closed intervals), the defect on each is
    attached to the report.
    """
    x = np.sort(_as_points(points), kind="stable")
    n = len(x)
    i = np.arange(1, n + 1)
    dev = x - (2 * i - 1) / (2.0 * n)
    j = int(np.argmax(np.abs(dev)))
    d_star = 0.5 / n + abs(float(dev[j]))
    defects = None
    if grid is not None:
        defects = list(zip([tuple(map(float, g)) for g in grid], equidistribution_defect(x, grid)))
    return DiscrepancyReport(n, d_star, (0.0, float(x[j])), bool(dev[j] <= 0), defects)


def equidistribution_defect(points, intervals) -> list[float]:
    """``|#(points in [c, d]) / n - (d - c)|`` for each closed interval."""
    x = np.sort(np.asarray(points, dtype=np.float64).ravel())
    if x.size == 0:
        raise DiscrepancyError("need at least one point")
    out = []
    for iv in intervals:
        try:
            c, d = (float(t) for t in iv)
        except (TypeError, ValueError):
            raise DiscrepancyError(f"malformed interval {iv!r}") from None
        if not 0.0 <= c < d <= 1.0:
            raise DiscrepancyError(f"interval [{c}, {d}] must satisfy 0 <= c < d <= 1")
        count = np.searchsorted(x, d, side="right") - np.searchsorted(x, c, side="left")
        out.append(float(abs(count / x.size - (d - c))))
    return out


def uniform_grid(k: int = 100) -> list[tuple[float, float]]:
    edges = np.linspace(0.0, 1.0, k + 1)
    return [(float(a), float(b)) for a, b in zip(edges[:-1], edges[1:])]


def is_ud_verdict(report: DiscrepancyReport, threshold: float) -> bool:
    if threshold <= 0:
        raise DiscrepancyError("threshold must be positive")
    return report.d_star <= threshold

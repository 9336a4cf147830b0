"""Streaming empirical means ``(1/N) * sum f(x_k)``.

Two accumulators live here. :class:`RunningEstimate` is the plain Cesaro
mean with a Neumaier-compensated sum and a sliding-window supremum of
``|f(x_k)| / k``. :class:`TruncatedEstimate` keeps the truncated terms
``f(x_k) * 1{f(x_k) < k}`` and the running mean of their expectations, whose
difference goes to zero along almost every sequence.
"""

from __future__ import annotations

import math
import sys
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import EstimatorError
from .integrands import Integrand, compensators
from .sequences import SequenceSpec, describe, iter_batches

SATURATION = sys.float_info.max


def neumaier_add(total: float, correction: float, x: float) -> tuple[float, float]:
    """One step of Neumaier's compensated summation."""
    t = total + x
    if abs(total) >= abs(x):
        correction += (total - t) + x
    else:
        correction += (x - t) + total
    return t, correction


def _sum_batch(v: np.ndarray) -> float:
    try:
        return math.fsum(v)
    except OverflowError:
        # saturated terms overflow fsum's exact partials
        total = correction = 0.0
        for x in v.tolist():
            total, correction = neumaier_add(total, correction, x)
        return total + correction


def _saturate(v: np.ndarray) -> tuple[np.ndarray, int]:
    bad = ~np.isfinite(v)
    count = int(bad.sum())
    if count:
        v = np.nan_to_num(v, nan=SATURATION, posinf=SATURATION, neginf=-SATURATION)
    return v, count


@dataclass
class RunningEstimate:
    """Single-pass state for the empirical mean along one index range.

    Terms are indexed absolutely: the first consumed term has index
    ``offset + 1``. Non-finite terms are replaced by ``+/-SATURATION`` (NaN
    counts as ``+SATURATION``) and counted in ``inf_count``.
    """

    offset: int = 0
    n: int = 0
    total: float = 0.0
    correction: float = 0.0
    last_term_over_n: float = 0.0
    inf_count: int = 0
    # (k, |f(x_k)|/k) pairs with strictly decreasing ratios, k >= ceil(last/2)
    window: deque = field(default_factory=deque, repr=False)

    @property
    def last_index(self) -> int:
        return self.offset + self.n

    @property
    def comp_sum(self) -> float:
        return self.total + self.correction

    @property
    def mean(self) -> float:
        return self.comp_sum / self.n if self.n else math.nan

    @property
    def tail_sup(self) -> float:
        return self.window[0][1] if self.window else 0.0

    @property
    def tainted(self) -> bool:
        return self.inf_count > 0

    def _prune_front(self) -> None:
        lo = (self.last_index + 1) // 2
        window = self.window
        while window and window[0][0] < lo:
            window.popleft()

    def update(self, f_value: float) -> RunningEstimate:
        x = float(f_value)
        if not math.isfinite(x):
            self.inf_count += 1
            x = -SATURATION if x == -math.inf else SATURATION
        self.total, self.correction = neumaier_add(self.total, self.correction, x)
        self.n += 1
        k = self.last_index
        ratio = abs(x) / k
        window = self.window
        while window and window[-1][1] <= ratio:
            window.pop()
        window.append((k, ratio))
        self._prune_front()
        self.last_term_over_n = x / k
        return self

    def update_many(self, f_values) -> RunningEstimate:
        v, bad = _saturate(np.asarray(f_values, dtype=np.float64))
        m = len(v)
        if m == 0:
            return self
        self.inf_count += bad
        self.total, self.correction = neumaier_add(self.total, self.correction, _sum_batch(v))
        k = np.arange(self.last_index + 1, self.last_index + m + 1, dtype=np.float64)
        ratio = np.abs(v) / k
        suffix = np.maximum.accumulate(ratio[::-1])[::-1]
        later = np.empty_like(ratio)
        later[:-1] = suffix[1:]
        later[-1] = -np.inf
        keep = np.flatnonzero(ratio > later)
        window = self.window
        while window and window[-1][1] <= suffix[0]:
            window.pop()
        window.extend(zip((keep + self.last_index + 1).tolist(), ratio[keep].tolist()))
        self.n += m
        self._prune_front()
        self.last_term_over_n = float(v[-1] / k[-1])
        return self

    def merge(self, later: RunningEstimate) -> RunningEstimate:
        """Combine with an estimate over the immediately following index range."""
        if later.offset != self.last_index:
            raise EstimatorError(
                f"cannot merge: ranges must be contiguous (ends at {self.last_index}, next starts at {later.offset + 1})"
            )
        if later.n == 0:
            return self.copy()
        total, correction = neumaier_add(self.total, self.correction, later.total)
        total, correction = neumaier_add(total, correction, later.correction)
        merged = RunningEstimate(
            offset=self.offset,
            n=self.n + later.n,
            total=total,
            correction=correction,
            last_term_over_n=later.last_term_over_n,
            inf_count=self.inf_count + later.inf_count,
        )
        lo = (merged.last_index + 1) // 2
        head = later.window[0][1] if later.window else -math.inf
        merged.window.extend(item for item in self.window if item[0] >= lo and item[1] > head)
        merged.window.extend(later.window)
        merged._prune_front()
        return merged

    def copy(self) -> RunningEstimate:
        clone = RunningEstimate(
            self.offset, self.n, self.total, self.correction, self.last_term_over_n, self.inf_count
        )
        clone.window.extend(self.window)
        return clone


def update(state: RunningEstimate, f_value: float) -> RunningEstimate:
    return state.update(f_value)


@dataclass
class TruncatedEstimate:
    """Running sums for the truncated estimator.

    ``centered_mean`` is ``(1/n) sum [f(x_k) 1{f(x_k) < k} - c_k]`` where
    ``c_k = int f 1{f < k}``. Only nonnegative terms are accepted.
    """

    n: int = 0
    trunc_total: float = 0.0
    trunc_correction: float = 0.0
    comp_total: float = 0.0
    comp_correction: float = 0.0
    truncation_hits: int = 0

    @property
    def comp_sum_trunc(self) -> float:
        return self.trunc_total + self.trunc_correction

    @property
    def truncated_mean(self) -> float:
        return self.comp_sum_trunc / self.n if self.n else math.nan

    @property
    def compensator_mean(self) -> float:
        return (self.comp_total + self.comp_correction) / self.n if self.n else math.nan

    @property
    def centered_mean(self) -> float:
        return self.truncated_mean - self.compensator_mean

    def update(self, f_value: float, k: int, comp_k: float) -> TruncatedEstimate:
        if k != self.n + 1:
            raise EstimatorError(f"expected level k = {self.n + 1}, got {k}")
        x = float(f_value)
        if x < 0 or math.isnan(x):
            raise EstimatorError(f"truncated estimator needs f >= 0, got {x}")
        if x < k:
            self.trunc_total, self.trunc_correction = neumaier_add(self.trunc_total, self.trunc_correction, x)
        else:
            self.truncation_hits += 1
        self.comp_total, self.comp_correction = neumaier_add(self.comp_total, self.comp_correction, comp_k)
        self.n += 1
        return self

    def update_many(self, f_values, comps) -> TruncatedEstimate:
        v = np.asarray(f_values, dtype=np.float64)
        c = np.asarray(comps, dtype=np.float64)
        if len(v) != len(c):
            raise EstimatorError("need one compensator per term")
        if np.any(np.isnan(v)) or np.any(v < 0):
            raise EstimatorError("truncated estimator needs f >= 0")
        k = np.arange(self.n + 1, self.n + len(v) + 1, dtype=np.float64)
        below = v < k
        self.trunc_total, self.trunc_correction = neumaier_add(
            self.trunc_total, self.trunc_correction, math.fsum(v[below])
        )
        self.comp_total, self.comp_correction = neumaier_add(self.comp_total, self.comp_correction, math.fsum(c))
        self.truncation_hits += int(len(v) - below.sum())
        self.n += len(v)
        return self


def truncated_update(state: TruncatedEstimate, f_value: float, k: int, comp_k: float) -> TruncatedEstimate:
    return state.update(f_value, k, comp_k)


@dataclass(frozen=True)
class Summary:
    integrand: str
    sequence: str
    n: int
    mean: float
    abs_error: float | None
    inf_count: int
    tail_sup: float

    @property
    def tainted(self) -> bool:
        return self.inf_count > 0

    def to_json(self) -> dict:
        return {
            "integrand": self.integrand,
            "sequence": self.sequence,
            "n": self.n,
            "mean": self.mean,
            "abs_error": self.abs_error,
            "inf_count": self.inf_count,
            "tail_sup": self.tail_sup,
        }


def finalize(state: RunningEstimate, f: Integrand, sequence: str = "") -> Summary:
    if state.n < 1:
        raise EstimatorError("no terms consumed")
    mean = state.mean
    err = None if f.exact_integral is None else abs(mean - f.exact_integral)
    return Summary(f.id, sequence, state.n, mean, err, state.inf_count, state.tail_sup)


# -- drivers ---------------------------------------------------------------


def geometric_checkpoints(start: int, stop: int, ratio: float = 1.1) -> list[int]:
    """``{ceil(start * ratio**j)}`` inside ``[start, stop]``, always ending at ``stop``."""
    if ratio <= 1:
        raise EstimatorError("checkpoint ratio must exceed 1")
    if not 1 <= start <= stop:
        raise EstimatorError(f"bad checkpoint range [{start}, {stop}]")
    out = []
    x = float(start)
    while x <= stop:
        c = math.ceil(x)
        if not out or c > out[-1]:
            out.append(c)
        x *= ratio
    if out[-1] != stop:
        out.append(stop)
    return out


@dataclass
class Run:
    summary: Summary
    state: RunningEstimate
    trace: list[tuple[int, float]]
    points: np.ndarray | None = None
    adjusted: int = 0


def integrate(
    spec: SequenceSpec,
    f: Integrand,
    n: int,
    checkpoints=None,
    ratio: float = 1.1,
    keep_points: bool = False,
) -> Run:
    """Stream ``f`` along the first ``n`` points of ``spec``.

    The mean is recorded after every checkpoint index (geometric from 1 by
    default).
    """
    if n < 1:
        raise EstimatorError("n must be >= 1")
    marks = geometric_checkpoints(1, n, ratio) if checkpoints is None else sorted(set(checkpoints))
    state = RunningEstimate()
    trace = []
    points = np.empty(n) if keep_points else None
    adjusted = 0
    wanted = set(marks)
    for batch in iter_batches(spec, n, stops=marks):
        state.update_many(f.evaluate_batch(batch))
        adjusted += batch.adjusted
        if points is not None:
            points[batch.start - 1 : batch.start - 1 + len(batch)] = batch.values
        if state.n in wanted:
            trace.append((state.n, state.mean))
    return Run(finalize(state, f, describe(spec)), state, trace, points, adjusted)


def truncated_run(spec: SequenceSpec, f: Integrand, n: int) -> TruncatedEstimate:
    """Truncated estimator along the first ``n`` points of ``spec``."""
    state = TruncatedEstimate()
    for batch in iter_batches(spec, n):
        ks = np.arange(batch.start, batch.start + len(batch))
        state.update_many(f.evaluate_batch(batch), compensators(f, ks))
    return state

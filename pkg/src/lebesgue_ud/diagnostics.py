"""Finite-N evidence for the four limit conditions on a run.

For a sequence ``x`` and integrand ``f`` the conditions are

1. ``f(x_n) / n -> 0``
2. ``(1/N) sum f(x_k)`` converges
3. the limit equals ``int f``
4. ``x`` is uniformly distributed

Each is replaced by a statistic at a finite ``N`` and a threshold. The
thresholds are engineering choices; see :class:`Tolerances`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

from .discrepancy import star_discrepancy
from .errors import DiagnosticsError
from .estimator import geometric_checkpoints, integrate
from .integrands import Integrand
from .sequences import Prng, SequenceSpec, derive_seed, describe

MIN_N = 1000
C_F_WITHOUT_A_F = "C_f without A_f"


@dataclass(frozen=True)
class Tolerances:
    """Thresholds for the four condition statistics.

    ``c2 >= 2 * c3`` is required: a run whose final mean is within ``c3`` of
    the integral must not be declared non-convergent by the oscillation test.
    """

    c1: float
    c2: float
    c3: float
    c4: float = 0.02

    def __post_init__(self):
        if min(self.c1, self.c2, self.c3, self.c4) <= 0:
            raise DiagnosticsError("tolerances must be positive")
        if self.c2 < 2 * self.c3:
            raise DiagnosticsError(f"tolerance c2={self.c2} must be at least 2 * c3 = {2 * self.c3}")

    @classmethod
    def default(cls, n: int) -> Tolerances:
        return cls(c1=10 * n**-0.5, c2=4 * n ** (-1 / 3), c3=2 * n ** (-1 / 3), c4=0.02)

    def override(self, **values) -> Tolerances:
        return replace(self, **{k: v for k, v in values.items() if v is not None})


@dataclass(frozen=True)
class ConditionReport:
    sequence: str
    integrand: str
    n: int
    mean: float
    c1_stat: float
    c2_stat: float
    c3_stat: float | None
    c4_stat: float
    verdicts: tuple[bool, bool, bool | None, bool]
    tolerances: Tolerances
    inf_count: int = 0
    checkpoints: list[tuple[int, float]] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "sequence": self.sequence,
            "integrand": self.integrand,
            "n": self.n,
            "mean": self.mean,
            "stats": {"c1": self.c1_stat, "c2": self.c2_stat, "c3": self.c3_stat, "c4": self.c4_stat},
            "verdicts": {f"c{i}": v for i, v in enumerate(self.verdicts, 1)},
            "tolerances": asdict(self.tolerances),
            "inf_count": self.inf_count,
            "tainted": self.inf_count > 0,
        }


def verdicts_for(stats: tuple[float, float, float | None, float], tol: Tolerances):
    c1, c2, c3, c4 = stats
    return (c1 <= tol.c1, c2 <= tol.c2, None if c3 is None else c3 <= tol.c3, c4 <= tol.c4)


def assess(
    spec: SequenceSpec,
    f: Integrand,
    n: int,
    tolerances: Tolerances | None = None,
    ratio: float = 1.1,
) -> ConditionReport:
    """Run ``f`` along ``spec`` to ``n`` and compute all four statistics.

    The oscillation statistic is ``max - min`` of the running mean over
    geometric checkpoints in ``[n/2, n]``.
    """
    if n < MIN_N:
        raise DiagnosticsError(f"n = {n} is too small for condition verdicts; need n >= {MIN_N}")
    tol = tolerances or Tolerances.default(n)
    marks = geometric_checkpoints(math.ceil(n / 2), n, ratio)
    run = integrate(spec, f, n, checkpoints=marks, keep_points=True)
    means = [m for _, m in run.trace]
    c1 = run.state.tail_sup
    c2 = max(means) - min(means)
    c3 = run.summary.abs_error
    c4 = star_discrepancy(run.points).d_star
    stats = (c1, c2, c3, c4)
    return ConditionReport(
        sequence=describe(spec),
        integrand=f.id,
        n=n,
        mean=run.summary.mean,
        c1_stat=c1,
        c2_stat=c2,
        c3_stat=c3,
        c4_stat=c4,
        verdicts=verdicts_for(stats, tol),
        tolerances=tol,
        inf_count=run.state.inf_count,
        checkpoints=run.trace,
    )


@dataclass(frozen=True)
class EquivalenceVerdict:
    all_true: bool
    all_false: bool
    consistent: bool
    applicable: bool
    pattern: str | None
    details: ConditionReport

    @property
    def in_s_f(self) -> bool:
        """Finite-N stand-in for membership of the run in the set where 1)-3) agree."""
        return self.applicable and self.consistent

    def to_json(self) -> dict:
        return {
            "all_true": self.all_true,
            "all_false": self.all_false,
            "consistent": self.consistent,
            "applicable": self.applicable,
            "in_s_f": self.in_s_f,
            "pattern": self.pattern,
        }


def equivalence_check(report: ConditionReport) -> EquivalenceVerdict:
    """Do conditions 1)-3) agree? Condition 4) decides whether the question applies."""
    v1, v2, v3, v4 = report.verdicts
    three = (v1, v2, bool(v3))
    all_true = v3 is not None and all(three)
    all_false = v3 is not None and not any(three)
    pattern = None
    if v4 and v1 and v2 and v3 is False:
        pattern = C_F_WITHOUT_A_F
    return EquivalenceVerdict(all_true, all_false, all_true or all_false, bool(v4), pattern, report)


def koksma_check(f: Integrand, report: ConditionReport, variation: float) -> bool:
    """``|mean - int f| <= V(f) * D*_N``, up to 1e-12."""
    if not f.flags.bounded:
        raise DiagnosticsError(f"{f.id} is unbounded; Koksma's inequality needs bounded variation")
    if report.c3_stat is None:
        raise DiagnosticsError(f"{f.id} has no known integral")
    return report.c3_stat <= variation * report.c4_stat + 1e-12


@dataclass(frozen=True)
class SurveyRow:
    replicate_id: int
    seed: int
    report: ConditionReport

    @property
    def all_true(self) -> bool:
        return all(v is True for v in self.report.verdicts)


@dataclass(frozen=True)
class SurveyResult:
    fraction: float
    rows: list[SurveyRow]


def measure_one_survey(
    f: Integrand,
    replicates: int,
    n: int,
    seed: int,
    tolerances: Tolerances | None = None,
    workers: int = 1,
) -> SurveyResult:
    """Fraction of independent PRNG sequences on which all four conditions hold."""
    if replicates < 30:
        raise DiagnosticsError(f"need at least 30 replicates, got {replicates}")
    seeds = [derive_seed(seed, r) for r in range(replicates)]

    def one(r: int) -> SurveyRow:
        return SurveyRow(r, seeds[r], assess(Prng(seeds[r]), f, n, tolerances))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(replicates)))
    else:
        rows = [one(r) for r in range(replicates)]
    fraction = sum(row.all_true for row in rows) / replicates
    return SurveyResult(fraction, rows)

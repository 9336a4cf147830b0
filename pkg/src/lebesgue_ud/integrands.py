"""Catalog of Lebesgue integrable functions on (0, 1).

Each entry knows its exact integral and, for nonnegative entries, the
truncated integral ``int f * 1{f < k}`` used to center the truncated
estimator. Integrands are evaluated on whole :class:`PointBatch` objects so
that rationality-dependent functions can see the provenance of each point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import pi
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import IntegrandError
from .sequences import (
    FromFile,
    PointBatch,
    Prng,
    Rationality,
    SequencePoint,
    SequenceSpec,
    describe,
    generate_batch,
)


@dataclass(frozen=True)
class Flags:
    bounded: bool
    riemann_integrable: bool
    finite_variance: bool
    monotone_near_singularities: bool


@dataclass(frozen=True)
class TruncationCompensator:
    integrand_id: str
    k: int
    value: float


@dataclass(frozen=True, eq=False)
class Integrand:
    """A function on (0, 1) with metadata.

    ``kernel`` maps a batch of points to values. ``ae_func`` is a plain
    function of ``x`` that agrees with the integrand almost everywhere; it is
    what quadrature sees. ``truncated`` maps an array of levels ``k`` to
    ``int f * 1{f < k}`` in closed form, when one is known. ``upper_bound``, if
    set, is a value that ``f`` never reaches, so every level above it gives the
    full integral.
    """

    id: str
    kernel: Callable[[PointBatch], np.ndarray]
    ae_func: Callable[[np.ndarray], np.ndarray]
    exact_integral: float | None
    flags: Flags
    singular_set: tuple[Fraction, ...] = ()
    neighborhood: float = 0.25
    variation: float | None = None
    nonnegative: bool = True
    truncated: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    description: str = ""
    upper_bound: float | None = None

    @property
    def singular_set_rational(self) -> bool:
        return all(isinstance(b, Fraction) for b in self.singular_set)

    def evaluate(self, x: SequencePoint) -> float:
        return float(self.evaluate_batch(PointBatch.from_point(x))[0])

    def evaluate_batch(self, batch: PointBatch) -> np.ndarray:
        v = batch.values
        if len(v) and not (np.all(v > 0.0) and np.all(v < 1.0)):
            raise IntegrandError(f"{self.id}: evaluation point outside (0, 1)")
        with np.errstate(divide="ignore", over="ignore"):
            return np.asarray(self.kernel(batch), dtype=np.float64)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "exact_integral": self.exact_integral,
            "singular_set": [str(b) for b in self.singular_set],
            "flags": {
                "bounded": self.flags.bounded,
                "riemann_integrable": self.flags.riemann_integrable,
                "finite_variance": self.flags.finite_variance,
                "monotone_near_singularities": self.flags.monotone_near_singularities,
                "nonnegative": self.nonnegative,
                "singular_set_rational": self.singular_set_rational,
            },
            "variation": self.variation,
        }


def evaluate(f: Integrand, x: SequencePoint) -> float:
    if not 0.0 < x.value < 1.0:
        raise IntegrandError(f"{f.id}: point {x.value} outside (0, 1)")
    return f.evaluate(x)


def exact_integral(f: Integrand) -> float | None:
    return f.exact_integral


# -- truncated integrals -----------------------------------------------------


def _truncated_quadrature(f: Integrand, k: float, tol: float = 1e-9) -> float:
    """``int f * 1{f < k}`` by root-finding the level set and piecewise quadrature.

    Pieces are cut geometrically toward each singular point; a single adaptive
    pass with a near-singular endpoint lets QUADPACK's extrapolation converge to
    the wrong limit.
    """
    func = f.ae_func
    scalar = lambda t: float(func(np.array([t]))[0])
    steps = 2.0 ** -np.arange(1, 61, 0.25)
    near = [float(b) + sgn * steps for b in f.singular_set for sgn in (-1.0, 1.0)]
    nodes = np.unique(np.concatenate([np.linspace(0.0, 1.0, 65), *near]))
    nodes = nodes[(nodes >= 0.0) & (nodes <= 1.0)]
    # level crossings can sit arbitrarily close to a singular point
    grid = np.unique(np.concatenate([np.linspace(0.0, 1.0, 4097), nodes]))
    grid = grid[(grid > 0.0) & (grid < 1.0)]
    with np.errstate(divide="ignore", over="ignore"):
        below = func(grid) < k
    edges = [0.0]
    for i in np.flatnonzero(below[1:] != below[:-1]):
        edges.append(optimize.brentq(lambda t: scalar(t) - k, grid[i], grid[i + 1], xtol=1e-15))
    edges.append(1.0)
    total = 0.0
    inside = bool(below[0])
    for a, b in zip(edges[:-1], edges[1:]):
        if inside and b > a:
            cuts = np.concatenate(([a], nodes[(nodes > a) & (nodes < b)], [b]))
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                total += integrate.quad(scalar, lo, hi, epsabs=tol / len(cuts), epsrel=1e-12, limit=200)[0]
        inside = not inside
    return total


def compensators(f: Integrand, ks) -> np.ndarray:
    """``int f * 1{f < k}`` for every level in ``ks``."""
    if not f.nonnegative:
        raise IntegrandError(
            f"{f.id} takes negative values; split it into positive and negative parts first"
        )
    ks = np.asarray(ks, dtype=np.float64)
    if np.any(ks < 1):
        raise IntegrandError("truncation level k must be >= 1")
    if f.truncated is not None:
        return np.asarray(f.truncated(ks), dtype=np.float64)
    cache: dict[float, float] = {}
    out = np.empty(len(ks))
    for i, k in enumerate(ks):
        if f.upper_bound is not None and f.exact_integral is not None and k >= f.upper_bound:
            out[i] = f.exact_integral
            continue
        if k not in cache:
            cache[k] = _truncated_quadrature(f, float(k))
        out[i] = cache[k]
    return out


def compensator(f: Integrand, k: int) -> TruncationCompensator:
    if k < 1:
        raise IntegrandError(f"truncation level k must be >= 1, got {k}")
    return TruncationCompensator(f.id, k, float(compensators(f, [k])[0]))


# -- catalog -----------------------------------------------------------------


def _pointwise(func: Callable[[np.ndarray], np.ndarray]) -> Callable[[PointBatch], np.ndarray]:
    return lambda batch: func(batch.values)


def _power(p: float):
    """``x**-p`` for ``0 < p < 1``; integral ``1 / (1 - p)``."""

    def func(x):
        return np.power(x, -p)

    def truncated(k):
        # f < k  <=>  x > k**(-1/p)
        a = np.minimum(1.0, np.power(k, -1.0 / p))
        return (1.0 - np.power(a, 1.0 - p)) / (1.0 - p)

    return func, truncated


def _log_inv(x):
    return -np.log(x)


def _log_inv_truncated(k):
    a = np.exp(-k)
    return 1.0 - a - k * a


def _arcsine(x):
    return 1.0 / np.sqrt(x * (1.0 - x))


def _arcsine_truncated(k):
    # f < k on (a, 1 - a) where a(1 - a) = 1/k**2; f >= 2 everywhere
    k = np.asarray(k, dtype=np.float64)
    out = np.zeros_like(k)
    live = k > 2.0
    kk = k[live]
    s = np.sqrt(1.0 - 4.0 / kk**2)
    a = (2.0 / kk**2) / (1.0 + s)
    out[live] = pi - 4.0 * np.arcsin(np.sqrt(a))
    return out


def _indicator_truncated(k):
    # f takes values 0 and 1 only, so the truncation removes everything iff k <= 1
    return np.where(np.asarray(k) > 1, 1.0, 0.0)


def _irrational_indicator(batch: PointBatch) -> np.ndarray:
    return (batch.rationality != Rationality.RATIONAL).astype(np.float64)


def _ones(x):
    return np.ones_like(np.asarray(x, dtype=np.float64))


def _bounded_below_one(integral: float):
    return lambda k: np.full(np.shape(k), integral)


def _smooth(ident, func, integral, variation, nonnegative=True, truncated=None, description="", upper_bound=None):
    return Integrand(
        id=ident,
        kernel=_pointwise(func),
        ae_func=func,
        exact_integral=integral,
        flags=Flags(bounded=True, riemann_integrable=True, finite_variance=True, monotone_near_singularities=True),
        variation=variation,
        nonnegative=nonnegative,
        truncated=truncated,
        description=description,
        upper_bound=upper_bound,
    )


def _singular(ident, func, integral, truncated, singular, finite_variance, description):
    return Integrand(
        id=ident,
        kernel=_pointwise(func),
        ae_func=func,
        exact_integral=integral,
        flags=Flags(
            bounded=False, riemann_integrable=False, finite_variance=finite_variance, monotone_near_singularities=True
        ),
        singular_set=tuple(Fraction(s) for s in singular),
        truncated=truncated,
        description=description,
    )


def _build_catalog() -> dict[str, Integrand]:
    entries = [
        _smooth("x", lambda x: x, 0.5, 1.0, truncated=_bounded_below_one(0.5), description="identity"),
        _smooth("x^2", lambda x: x * x, 1 / 3, 1.0, truncated=_bounded_below_one(1 / 3), description="x squared"),
        _smooth("x^3", lambda x: x**3, 0.25, 1.0, truncated=_bounded_below_one(0.25), description="x cubed"),
        _smooth("1-x", lambda x: 1.0 - x, 0.5, 1.0, truncated=_bounded_below_one(0.5), description="reflection"),
        _smooth(
            "3x^2-2x+1",
            lambda x: (3.0 * x - 2.0) * x + 1.0,
            1.0,
            5 / 3,
            description="non-monotone quadratic, minimum 2/3 at x = 1/3",
            upper_bound=2.0,
        ),
        _smooth("2x-1", lambda x: 2.0 * x - 1.0, 0.0, 2.0, nonnegative=False, description="signed linear"),
    ]
    for label, p, var_ok in (("x^-1/4", 0.25, True), ("x^-1/2", 0.5, False), ("x^-3/4", 0.75, False)):
        func, trunc = _power(p)
        entries.append(
            _singular(label, func, 1.0 / (1.0 - p), trunc, [0], var_ok, f"power singularity of order {p} at 0")
        )
    entries.append(
        _singular("ln(1/x)", _log_inv, 1.0, _log_inv_truncated, [0], True, "logarithmic singularity at 0")
    )
    entries.append(
        _singular(
            "arcsine", _arcsine, pi, _arcsine_truncated, [0, 1], False, "1/sqrt(x(1-x)), singular at both ends"
        )
    )
    entries.append(
        Integrand(
            id="irrational_indicator",
            kernel=_irrational_indicator,
            ae_func=_ones,
            exact_integral=1.0,
            flags=Flags(
                bounded=True, riemann_integrable=False, finite_variance=True, monotone_near_singularities=True
            ),
            truncated=_indicator_truncated,
            description="1 on irrational-tagged points (unknown counts as irrational), 0 on rational",
        )
    )
    return {f.id: f for f in entries}


CATALOG: dict[str, Integrand] = _build_catalog()


def complement_indicator(spec: SequenceSpec, horizon: int) -> Integrand:
    """Indicator of (0, 1) minus the points ``x_1 .. x_horizon`` of ``spec``.

    Integrates to 1, yet its empirical mean along ``spec`` itself is 0 for
    every ``N <= horizon``. Membership compares 128-bit representations when
    both sides carry one and the float bit pattern otherwise.
    """
    if isinstance(spec, Prng):
        raise IntegrandError("complement_indicator needs a deterministic sequence, not a PRNG stream")
    if horizon < 1:
        raise IntegrandError("membership horizon must be >= 1")
    orbit = generate_batch(spec, 1, horizon)
    if isinstance(spec, FromFile) and len(np.unique(orbit.values)) != len(orbit):
        raise IntegrandError(f"{spec.path} repeats values; membership is ambiguous")
    fixed_set = frozenset(orbit.fixed) if orbit.fixed is not None else None
    bits = np.unique(orbit.values.view(np.uint64))

    def kernel(batch: PointBatch) -> np.ndarray:
        if fixed_set is not None and batch.fixed is not None:
            hit = np.fromiter((m in fixed_set for m in batch.fixed), dtype=bool, count=len(batch))
        else:
            hit = np.isin(batch.values.view(np.uint64), bits)
        return np.where(hit, 0.0, 1.0)

    return Integrand(
        id=f"complement[{describe(spec)}]",
        kernel=kernel,
        ae_func=_ones,
        exact_integral=1.0,
        flags=Flags(bounded=True, riemann_integrable=False, finite_variance=True, monotone_near_singularities=True),
        truncated=_indicator_truncated,
        description=f"0 on the first {horizon} points of {describe(spec)}, 1 elsewhere",
    )


def get(ident: str) -> Integrand:
    try:
        return CATALOG[ident]
    except KeyError:
        known = ", ".join(sorted(CATALOG))
        raise IntegrandError(f"unknown integrand {ident!r}; known: {known}, complement_indicator") from None

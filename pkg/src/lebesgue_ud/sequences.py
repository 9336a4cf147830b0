"""Uniformly distributed sequences in the open interval (0, 1).

Every generator is a pure function of ``(spec, n)`` with ``n`` starting at 1.
Weyl orbits are computed exactly in 128-bit fixed point: a point is stored as
an integer ``m`` meaning ``m / 2**128`` and the orbit is advanced by wrapping
integer arithmetic, so ``{n * alpha}`` never drifts no matter how large ``n``
gets.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from pathlib import Path
from typing import Iterator, Union

import numpy as np

from .errors import SequenceError

log = logging.getLogger(__name__)

FIXED_BITS = 128
ONE = 1 << FIXED_BITS
MASK = ONE - 1
_SCALE = 2.0**-FIXED_BITS
_BELOW_ONE = float(np.nextafter(1.0, 0.0))

# floor(2**128 * (sqrt(5) - 1) / 2)
GOLDEN_FIXED = (isqrt(5 << 256) - ONE) >> 1
# floor(2**128 * (sqrt(2) - 1))
SQRT2_FIXED = isqrt(2 << 256) - ONE
# Fractional part of pi truncated to 128 bits. Hex digits of pi:
# 3.243F6A88 85A308D3 13198A2E 03707344 | A4093822 299F31D0 ...
PI_FRAC_FIXED = 0x243F6A8885A308D313198A2E03707344

_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


class Rationality(enum.IntEnum):
    RATIONAL = 0
    IRRATIONAL = 1
    UNKNOWN = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str | Rationality) -> Rationality:
        if isinstance(text, Rationality):
            return text
        try:
            return cls[str(text).upper()]
        except KeyError:
            raise SequenceError(f"unknown rationality tag {text!r}") from None


@dataclass(frozen=True)
class SequencePoint:
    """A point ``x_n`` of a sequence together with its provenance.

    ``fixed_repr`` is set when the point is exactly ``fixed_repr / 2**128``
    (up to the float rounding of ``value``). ``adjusted`` marks a point whose
    construction gave exactly 0 and was moved to ``2**-128``.
    """

    value: float
    index: int
    fixed_repr: int | None = None
    rationality: Rationality = Rationality.UNKNOWN
    adjusted: bool = False


@dataclass
class PointBatch:
    """Points ``start .. start + len(values) - 1`` of a sequence, as arrays."""

    start: int
    values: np.ndarray
    rationality: np.ndarray
    fixed: list[int] | None = None
    adjusted: int = 0

    def __len__(self) -> int:
        return len(self.values)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.start + len(self.values), dtype=np.int64)

    def point(self, i: int) -> SequencePoint:
        fixed = self.fixed[i] if self.fixed is not None else None
        return SequencePoint(
            value=float(self.values[i]),
            index=self.start + i,
            fixed_repr=fixed,
            rationality=Rationality(int(self.rationality[i])),
            adjusted=fixed == 1 and self.adjusted > 0,
        )

    @classmethod
    def from_point(cls, point: SequencePoint) -> PointBatch:
        return cls(
            start=point.index,
            values=np.array([point.value], dtype=np.float64),
            rationality=np.array([int(point.rationality)], dtype=np.uint8),
            fixed=None if point.fixed_repr is None else [point.fixed_repr],
            adjusted=int(point.adjusted),
        )


# -- sequence specifications ------------------------------------------------


@dataclass(frozen=True)
class Weyl:
    alpha_fixed: int
    rationality: Rationality = Rationality.IRRATIONAL

    def __post_init__(self):
        if not 0 < self.alpha_fixed < ONE:
            raise SequenceError("alpha_fixed must encode a number in (0, 1)")
        object.__setattr__(self, "rationality", Rationality.parse(self.rationality))

    @classmethod
    def golden(cls) -> Weyl:
        return cls(GOLDEN_FIXED, Rationality.IRRATIONAL)

    @classmethod
    def from_fraction(cls, alpha: Fraction | str | float) -> Weyl:
        """Weyl orbit of a rational ``alpha``, rounded down onto the 2**-128 grid."""
        alpha = Fraction(alpha)
        fixed = (alpha.numerator << FIXED_BITS) // alpha.denominator % ONE
        return cls(fixed, Rationality.RATIONAL)


@dataclass(frozen=True)
class VanDerCorput:
    base: int = 2

    def __post_init__(self):
        if int(self.base) != self.base or self.base < 2:
            raise SequenceError(f"van der Corput base must be an integer >= 2, got {self.base}")


@dataclass(frozen=True)
class Prng:
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)


@dataclass(frozen=True)
class HybridPi:
    pass


@dataclass(frozen=True)
class FromFile:
    path: str

    def load(self) -> np.ndarray:
        return read_sequence_file(self.path)


SequenceSpec = Union[Weyl, VanDerCorput, Prng, HybridPi, FromFile]

NAMED_ALPHAS = {
    "golden": GOLDEN_FIXED,
    "sqrt2": SQRT2_FIXED,
    "pi": PI_FRAC_FIXED,
}


def parse_alpha(text: str) -> Weyl:
    """Build a Weyl spec from ``"golden"``, ``"sqrt2"``, ``"pi"`` or a decimal.

    Named constants are 128-bit truncations tagged irrational; a decimal is a
    rational number and is tagged as such.
    """
    key = text.strip().lower()
    if key in NAMED_ALPHAS:
        return Weyl(NAMED_ALPHAS[key], Rationality.IRRATIONAL)
    try:
        alpha = Fraction(key)
    except (ValueError, ZeroDivisionError):
        raise SequenceError(f"cannot parse alpha {text!r}") from None
    if not 0 < alpha < 1:
        alpha -= alpha.numerator // alpha.denominator
    if alpha == 0:
        raise SequenceError("alpha must not be an integer")
    return Weyl.from_fraction(alpha)


def spec_to_json(spec: SequenceSpec) -> dict:
    if isinstance(spec, Weyl):
        return {
            "variant": "weyl",
            "alpha_fixed": f"0x{spec.alpha_fixed:032x}",
            "rationality": spec.rationality.label,
        }
    if isinstance(spec, VanDerCorput):
        return {"variant": "vdc", "base": spec.base}
    if isinstance(spec, Prng):
        return {"variant": "prng", "seed": spec.seed}
    if isinstance(spec, HybridPi):
        return {"variant": "hybrid_pi"}
    if isinstance(spec, FromFile):
        return {"variant": "file", "path": spec.path}
    raise SequenceError(f"not a sequence spec: {spec!r}")


def spec_from_json(obj: dict) -> SequenceSpec:
    try:
        variant = obj["variant"]
    except (KeyError, TypeError):
        raise SequenceError("sequence object needs a 'variant' field") from None
    try:
        if variant == "weyl":
            if "alpha_fixed" in obj:
                fixed = obj["alpha_fixed"]
                fixed = int(fixed, 0) if isinstance(fixed, str) else int(fixed)
                return Weyl(fixed, Rationality.parse(obj.get("rationality", "irrational")))
            spec = parse_alpha(str(obj["alpha"]))
            if "rationality" in obj:
                spec = Weyl(spec.alpha_fixed, Rationality.parse(obj["rationality"]))
            return spec
        if variant == "vdc":
            return VanDerCorput(int(obj.get("base", 2)))
        if variant == "prng":
            return Prng(int(obj.get("seed", 0)))
        if variant == "hybrid_pi":
            return HybridPi()
        if variant == "file":
            return FromFile(str(obj["path"]))
    except KeyError as exc:
        raise SequenceError(f"sequence variant {variant!r} is missing field {exc}") from None
    raise SequenceError(f"unknown sequence variant {variant!r}")


def describe(spec: SequenceSpec) -> str:
    if isinstance(spec, Weyl):
        name = {GOLDEN_FIXED: "golden", SQRT2_FIXED: "sqrt2", PI_FRAC_FIXED: "pi"}.get(spec.alpha_fixed)
        return f"weyl({name or f'0x{spec.alpha_fixed:032x}'})"
    if isinstance(spec, VanDerCorput):
        return f"vdc({spec.base})"
    if isinstance(spec, Prng):
        return f"prng({spec.seed})"
    if isinstance(spec, HybridPi):
        return "hybrid_pi"
    return f"file({spec.path})"


# -- point generators -------------------------------------------------------


def fixed_to_float(fixed: int) -> float:
    """Nearest double to ``fixed / 2**128``, kept strictly below 1."""
    value = float(fixed) * _SCALE
    return _BELOW_ONE if value >= 1.0 else value


def _check_index(n: int) -> None:
    if n < 1:
        raise SequenceError(f"sequence index must be >= 1, got {n}")


def weyl_point(alpha_fixed: int, n: int, rationality: Rationality = Rationality.IRRATIONAL) -> SequencePoint:
    """The point ``{n * alpha}`` with ``alpha = alpha_fixed / 2**128``.

    An exact zero (only possible for rational alpha) is replaced by ``2**-128``.
    """
    _check_index(n)
    if not 0 < alpha_fixed < ONE:
        raise SequenceError("alpha_fixed must encode a number in (0, 1)")
    fixed = (n * alpha_fixed) & MASK
    adjusted = fixed == 0
    if adjusted:
        log.warning("weyl point n=%d is exactly 0; emitting 2**-128", n)
        fixed = 1
    return SequencePoint(fixed_to_float(fixed), n, fixed, Rationality.parse(rationality), adjusted)


def _radical_inverse(base: int, n: int) -> tuple[int, int]:
    num, den = 0, 1
    while n:
        n, digit = divmod(n, base)
        num = num * base + digit
        den *= base
    return num, den


def _dyadic_fixed(num: int, den: int) -> int | None:
    # den is a power of the base; exact on the 2**-128 grid only for powers of 2
    if den & (den - 1) or den > ONE:
        return None
    return num << (FIXED_BITS - den.bit_length() + 1)


def vdc_point(base: int, n: int) -> SequencePoint:
    """Radical inverse of ``n`` in ``base``: digits of n mirrored about the radix point."""
    if base < 2:
        raise SequenceError(f"van der Corput base must be >= 2, got {base}")
    _check_index(n)
    num, den = _radical_inverse(base, n)
    return SequencePoint(num / den, n, _dyadic_fixed(num, den), Rationality.RATIONAL)


def splitmix64(x: int) -> int:
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _splitmix64_array(x: np.ndarray) -> np.ndarray:
    z = x.astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def derive_seed(seed: int, stream: int) -> int:
    """Independent 64-bit seed for replicate ``stream`` of a master ``seed``."""
    return splitmix64(splitmix64(seed ^ 0xD1B54A32D192ED03) + stream * _GAMMA)


def prng_point(seed: int, n: int) -> SequencePoint:
    """Counter-mode SplitMix64: the n-th output for ``seed``, mapped into (0, 1).

    The top 53 bits ``m`` give ``(m + 1/2) / 2**53``, so 0 and 1 are unreachable.
    """
    _check_index(n)
    z = splitmix64((seed & _MASK64) + n * _GAMMA)
    return SequencePoint(((z >> 11) + 0.5) * 2.0**-53, n, None, Rationality.UNKNOWN)


def hybrid_pi_point(n: int) -> SequencePoint:
    """``x_1 = {3/2} = 1/2`` and ``x_n = {n * pi}`` for ``n >= 2``."""
    _check_index(n)
    if n == 1:
        return SequencePoint(0.5, 1, 1 << (FIXED_BITS - 1), Rationality.RATIONAL)
    return weyl_point(PI_FRAC_FIXED, n, Rationality.IRRATIONAL)


def point(spec: SequenceSpec, n: int) -> SequencePoint:
    if isinstance(spec, Weyl):
        return weyl_point(spec.alpha_fixed, n, spec.rationality)
    if isinstance(spec, VanDerCorput):
        return vdc_point(spec.base, n)
    if isinstance(spec, Prng):
        return prng_point(spec.seed, n)
    if isinstance(spec, HybridPi):
        return hybrid_pi_point(n)
    return generate_batch(spec, n, 1).point(0)


# -- batches -----------------------------------------------------------------


def _weyl_batch(alpha: int, start: int, count: int, rationality: Rationality) -> PointBatch:
    fixed = [0] * count
    x = (start * alpha) & MASK
    for i in range(count):
        fixed[i] = x
        x = (x + alpha) & MASK
    adjusted = 0
    if 0 in fixed:
        adjusted = fixed.count(0)
        log.warning("%d weyl points were exactly 0; emitting 2**-128 instead", adjusted)
        fixed = [m or 1 for m in fixed]
    values = np.fromiter((float(m) for m in fixed), dtype=np.float64, count=count) * _SCALE
    values[values >= 1.0] = _BELOW_ONE
    flags = np.full(count, int(rationality), dtype=np.uint8)
    return PointBatch(start, values, flags, fixed, adjusted)


def _vdc_batch(base: int, start: int, count: int) -> PointBatch:
    n = np.arange(start, start + count, dtype=np.int64)
    num = np.zeros(count, dtype=np.int64)
    den = np.ones(count, dtype=np.int64)
    while np.any(n):
        live = n > 0
        num[live] = num[live] * base + n[live] % base
        den[live] *= base
        n = n // base
    # int64 -> float64 is exact below 2**53; beyond that fall back to Python ints
    if den.max() < 2**53:
        values = num.astype(np.float64) / den.astype(np.float64)
    else:
        values = np.array([int(a) / int(b) for a, b in zip(num, den)])
    fixed = None
    if base & (base - 1) == 0:
        fixed = [_dyadic_fixed(int(a), int(b)) for a, b in zip(num, den)]
    flags = np.full(count, int(Rationality.RATIONAL), dtype=np.uint8)
    return PointBatch(start, values, flags, fixed)


def _prng_batch(seed: int, start: int, count: int) -> PointBatch:
    n = np.arange(start, start + count, dtype=np.uint64)
    z = _splitmix64_array(np.uint64(seed) + n * np.uint64(_GAMMA))
    values = ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    flags = np.full(count, int(Rationality.UNKNOWN), dtype=np.uint8)
    return PointBatch(start, values, flags)


def generate_batch(spec: SequenceSpec, start: int, count: int) -> PointBatch:
    """Points ``start .. start + count - 1`` of ``spec`` as a :class:`PointBatch`."""
    _check_index(start)
    if count < 0:
        raise SequenceError("count must be non-negative")
    if isinstance(spec, Weyl):
        return _weyl_batch(spec.alpha_fixed, start, count, spec.rationality)
    if isinstance(spec, VanDerCorput):
        return _vdc_batch(spec.base, start, count)
    if isinstance(spec, Prng):
        return _prng_batch(spec.seed, start, count)
    if isinstance(spec, HybridPi):
        if start > 1 or count == 0:
            return _weyl_batch(PI_FRAC_FIXED, start, count, Rationality.IRRATIONAL)
        tail = _weyl_batch(PI_FRAC_FIXED, 2, count - 1, Rationality.IRRATIONAL)
        first = 1 << (FIXED_BITS - 1)
        return PointBatch(
            1,
            np.concatenate(([0.5], tail.values)),
            np.concatenate(([int(Rationality.RATIONAL)], tail.rationality)).astype(np.uint8),
            [first] + tail.fixed,
            tail.adjusted,
        )
    if isinstance(spec, FromFile):
        data = spec.load()
        if start - 1 + count > len(data):
            raise SequenceError(
                f"{spec.path} holds {len(data)} values, {start - 1 + count} requested"
            )
        values = data[start - 1 : start - 1 + count].copy()
        flags = np.full(count, int(Rationality.RATIONAL), dtype=np.uint8)
        return PointBatch(start, values, flags)
    raise SequenceError(f"not a sequence spec: {spec!r}")


def iter_batches(spec: SequenceSpec, count: int, batch_size: int = 1 << 16, stops=()) -> Iterator[PointBatch]:
    """Cover indices ``1..count`` with batches, breaking after every index in ``stops``."""
    if count < 1:
        raise SequenceError(f"count must be >= 1, got {count}")
    cuts = sorted({int(s) for s in stops if 1 <= s < count} | {count})
    n = 1
    for cut in cuts:
        while n <= cut:
            size = min(batch_size, cut - n + 1)
            yield generate_batch(spec, n, size)
            n += size


def generate(spec: SequenceSpec, count: int) -> Iterator[SequencePoint]:
    """Lazily yield points ``1..count`` of ``spec``."""
    for batch in iter_batches(spec, count, batch_size=4096):
        for i in range(len(batch)):
            yield batch.point(i)


def values(spec: SequenceSpec, count: int) -> np.ndarray:
    """The first ``count`` values of ``spec`` as a float array."""
    return np.concatenate([b.values for b in iter_batches(spec, count)])


# -- sequence files ----------------------------------------------------------


def read_sequence_file(path: str | Path) -> np.ndarray:
    """Parse one decimal per line; ``#`` starts a comment. Values must lie in (0, 1)."""
    out = []
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                x = float(text)
            except ValueError:
                raise SequenceError(f"{path}:{lineno}: not a number: {text!r}") from None
            if not 0.0 < x < 1.0:
                raise SequenceError(f"{path}:{lineno}: value {text} outside (0, 1)")
            out.append(x)
    if not out:
        raise SequenceError(f"{path}: no values")
    return np.array(out, dtype=np.float64)


def format_values(values, header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines.extend(repr(float(x)) for x in values)
    return "\n".join(lines) + "\n"

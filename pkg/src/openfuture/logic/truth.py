"""Interval truth values in [0, 1].

Bounds are stored as exact rationals.  Leaf values arrive as floats and
convert exactly, so complement and sums introduce no rounding.  Frechet
bounds are rounded outward onto a 1e-15 grid, which absorbs float noise in
the leaves (exclusive probabilities summing to 1 + 1e-16, say) without
breaking exact identities: the grid contains 1, so snapping commutes with
complement and De Morgan holds with equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Number = Union[int, float, Fraction]

POINT_TOL = 1e-12
GRID = 10**15
_ZERO, _ONE = Fraction(0), Fraction(1)


def _down(x: Fraction) -> Fraction:
    return Fraction(math.floor(x * GRID), GRID)


def _up(x: Fraction) -> Fraction:
    return Fraction(math.ceil(x * GRID), GRID)


def _exact(x: Number) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class TruthValue:
    """Closed subinterval [lo, hi] of [0, 1]; [0, 1] itself is "undetermined"."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = _exact(self.lo), _exact(self.hi)
        if not (0 <= lo <= hi <= 1):
            raise ValueError(f"invalid truth interval [{float(lo)}, {float(hi)}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, v: Number) -> "TruthValue":
        return cls(v, v)

    @classmethod
    def probability(cls, p: float, slack: float = POINT_TOL) -> "TruthValue":
        """Point value from a computed probability, clamping float noise of at most `slack`."""
        if not (-slack <= p <= 1 + slack):
            raise ValueError(f"probability {p} outside [0, 1]")
        return cls.point(min(max(p, 0.0), 1.0))

    @property
    def is_point(self) -> bool:
        return self.hi - self.lo <= POINT_TOL

    @property
    def value(self) -> float:
        """Midpoint as a float; meaningful for points."""
        return float((self.lo + self.hi) / 2)

    @property
    def bounds(self) -> tuple[float, float]:
        return float(self.lo), float(self.hi)

    def contains(self, other: "TruthValue") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __invert__(self) -> "TruthValue":
        return TruthValue(1 - self.hi, 1 - self.lo)

    def __and__(self, other: "TruthValue") -> "TruthValue":
        return frechet_and(self, other)

    def __or__(self, other: "TruthValue") -> "TruthValue":
        return frechet_or(self, other)

    def __str__(self) -> str:
        if self.is_point:
            return f"point {self.value:.12g}"
        lo, hi = self.bounds
        return f"interval [{lo:.12g}, {hi:.12g}]"


TRUE = TruthValue(1, 1)
FALSE = TruthValue(0, 0)
UNDETERMINED = TruthValue(0, 1)


def frechet_and(p: TruthValue, q: TruthValue) -> TruthValue:
    return TruthValue(_down(max(_ZERO, p.lo + q.lo - 1)), _up(min(p.hi, q.hi)))


def frechet_or(p: TruthValue, q: TruthValue) -> TruthValue:
    return TruthValue(_down(max(p.lo, q.lo)), _up(min(_ONE, p.hi + q.hi)))


def exclusive_and(p: TruthValue, q: TruthValue) -> TruthValue:
    """Conjunction of two mutually exclusive outcomes."""
    return FALSE


def exclusive_or(p: TruthValue, q: TruthValue) -> TruthValue:
    """Disjunction of two mutually exclusive outcomes: the probabilities add."""
    return TruthValue(min(_ONE, p.lo + q.lo), min(_ONE, p.hi + q.hi))


def partition_measure(outcomes: dict, selected: Iterable) -> TruthValue:
    """Truth value of "one of `selected` occurs" over mutually exclusive `outcomes`.

    `outcomes` maps every cell of a partition to its TruthValue.  Point
    values add exactly; otherwise the standard bounds for a sum over a
    partition are used.
    """
    selected = set(selected)
    inside = [v for k, v in outcomes.items() if k in selected]
    outside = [v for k, v in outcomes.items() if k not in selected]
    if all(v.lo == v.hi for v in outcomes.values()):
        return TruthValue.point(min(_ONE, sum((v.lo for v in inside), _ZERO)))
    lo = max(sum((v.lo for v in inside), _ZERO), 1 - sum((v.hi for v in outside), _ZERO))
    hi = min(sum((v.hi for v in inside), _ZERO), 1 - sum((v.lo for v in outside), _ZERO))
    lo, hi = min(max(lo, _ZERO), _ONE), min(max(hi, _ZERO), _ONE)
    return TruthValue(min(lo, hi), hi)

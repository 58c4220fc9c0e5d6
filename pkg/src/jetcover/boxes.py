"""Exact interval and box primitives used by the certifiers.

Intervals are closed with rational endpoints.  A Box is an n-tuple of
intervals.  All operations here are exact; there is no rounding mode
because there is no rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Tuple

from .errors import DegenerateInputError, ShapeError
from .rational import rat


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise DegenerateInputError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def of(lo, hi) -> "Interval":
        return Interval(rat(lo), rat(hi))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def shrink(self, margin: Fraction) -> "Interval":
        """Closed interval pulled inward by margin on both sides.

        Raises DegenerateInputError when the margin eats the whole interval;
        a certificate against an empty target is meaningless.
        """
        lo, hi = self.lo + margin, self.hi - margin
        if lo > hi:
            raise DegenerateInputError(
                f"margin {margin} exceeds the half-width of [{self.lo}, {self.hi}]"
            )
        return Interval(lo, hi)

    def scale_add(self, a: Fraction, t: Fraction) -> "Interval":
        """Exact image under x -> a*x + t."""
        u, v = a * self.lo + t, a * self.hi + t
        return Interval(u, v) if u <= v else Interval(v, u)

    def bisect(self) -> Tuple["Interval", "Interval"]:
        m = self.mid
        return Interval(self.lo, m), Interval(m, self.hi)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


class Box:
    """Closed axis-aligned box: a tuple of intervals."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Sequence[Interval]):
        if not intervals:
            raise DegenerateInputError("box needs at least one axis")
        self.intervals = tuple(intervals)

    @staticmethod
    def of(*bounds) -> "Box":
        """Box.of((lo, hi), (lo, hi), ...) with rational-like bounds."""
        return Box([Interval.of(lo, hi) for lo, hi in bounds])

    @property
    def dim(self) -> int:
        return len(self.intervals)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __getitem__(self, i: int) -> Interval:
        return self.intervals[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Box) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def contains_point(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.dim:
            raise ShapeError("point/box dimension mismatch")
        return all(iv.contains(xi) for iv, xi in zip(self.intervals, x))

    def contains_box(self, other: "Box") -> bool:
        if other.dim != self.dim:
            raise ShapeError("box dimension mismatch")
        return all(
            a.contains_interval(b) for a, b in zip(self.intervals, other.intervals)
        )

    def shrink(self, margin: Fraction) -> "Box":
        return Box([iv.shrink(margin) for iv in self.intervals])

    def volume(self) -> Fraction:
        v = Fraction(1)
        for iv in self.intervals:
            v *= iv.width
        return v

    def longest_axis(self) -> int:
        widths = [iv.width for iv in self.intervals]
        return widths.index(max(widths))

    def bisect(self) -> Tuple["Box", "Box"]:
        """Split along the longest axis (lowest index on ties)."""
        ax = self.longest_axis()
        left, right = self.intervals[ax].bisect()
        lo = list(self.intervals)
        hi = list(self.intervals)
        lo[ax] = left
        hi[ax] = right
        return Box(lo), Box(hi)

    def interiors_disjoint(self, other: "Box") -> bool:
        """True when the open interiors do not meet (touching is fine)."""
        for a, b in zip(self.intervals, other.intervals):
            if a.hi <= b.lo or b.hi <= a.lo:
                return True
        return False

    def __str__(self) -> str:
        return " x ".join(str(iv) for iv in self.intervals)

    def __repr__(self) -> str:
        return f"Box({self})"

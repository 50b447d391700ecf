"""Arithmetic on the circle R/Z and oriented-arc bookkeeping.

Points are plain floats normalized into [0, 1).  An ``Arc`` is the open
counterclockwise interval from ``start`` to ``end``; ``start == end`` denotes
the empty arc unless the ``full`` flag marks the whole circle.  Comparisons
use an absolute tolerance of 1e-12 so that sweeps are deterministic at double
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TOL = 1e-12


def norm1(x: float) -> float:
    """Normalize into [0, 1)."""
    x = x - math.floor(x)
    return 0.0 if x >= 1.0 else x


def dist_ccw(a: float, b: float) -> float:
    """Counterclockwise distance (b - a) mod 1, with dist_ccw(a, a) = 0.

    Differences within TOL of a full turn collapse to 0 so that float fuzz on
    equal points cannot read as an almost-full loop.
    """
    d = (b - a) % 1.0
    return 0.0 if d > 1.0 - TOL else d


def circle_dist(a: float, b: float) -> float:
    """Unoriented distance on the circle."""
    d = abs((b - a) % 1.0)
    return min(d, 1.0 - d)


@dataclass(frozen=True)
class Arc:
    """Open ccw arc from start to end; ``full`` marks the whole circle."""

    start: float
    end: float
    full: bool = False

    @staticmethod
    def full_circle(anchor: float = 0.0) -> "Arc":
        return Arc(norm1(anchor), norm1(anchor), full=True)

    @property
    def length(self) -> float:
        if self.full:
            return 1.0
        return dist_ccw(self.start, self.end)

    @property
    def is_empty(self) -> bool:
        return not self.full and self.length <= 0.0

    def midpoint(self) -> float:
        return norm1(self.start + self.length / 2.0)


def arc_contains(arc: Arc, p: float) -> bool:
    """Strict interior membership; endpoints excluded, full circle holds all."""
    if arc.full:
        return True
    d = dist_ccw(arc.start, norm1(p))
    return TOL < d < arc.length - TOL


def split_arc_at(arc: Arc, cuts) -> list[Arc]:
    """Maximal sub-arcs of ``arc`` with no cut interior, ccw from arc.start.

    Cuts outside the arc are ignored.  Splitting the full circle at a single
    point returns one full-length arc anchored there.
    """
    if arc.is_empty:
        return []
    if arc.full:
        inside = sorted({norm1(c) for c in cuts},
                        key=lambda c: dist_ccw(arc.start, c))
        if not inside:
            return [arc]
        if len(inside) == 1:
            return [Arc(inside[0], inside[0], full=True)]
        return [Arc(a, b) for a, b in zip(inside, inside[1:] + inside[:1])]
    inside = sorted({norm1(c) for c in cuts if arc_contains(arc, c)},
                    key=lambda c: dist_ccw(arc.start, c))
    points = [arc.start] + inside + [arc.end]
    return [Arc(a, b) for a, b in zip(points, points[1:])]


class ArcUnion:
    """Union of arcs kept as sorted disjoint intervals in linear [0, 1] coords.

    Wrap-around arcs are stored split at 0, so the linear interval (a, 1]+(0, b)
    represents the circle arc through the basepoint.  ``gaps`` re-joins the two
    complement pieces flanking 0 into one circular gap.
    """

    def __init__(self):
        self._iv: list[tuple[float, float]] = []

    def _linear_pieces(self, arc: Arc) -> list[tuple[float, float]]:
        if arc.full:
            return [(0.0, 1.0)]
        if arc.is_empty:
            return []
        s, e = norm1(arc.start), norm1(arc.end)
        if s < e:
            return [(s, e)]
        pieces = [(s, 1.0)]
        if e > 0.0:
            pieces.append((0.0, e))
        return pieces

    def add(self, arc: Arc) -> None:
        self.add_many([arc])

    def add_many(self, arcs) -> None:
        new = self._iv[:]
        for arc in arcs:
            new.extend(self._linear_pieces(arc))
        new.sort()
        merged: list[tuple[float, float]] = []
        for lo, hi in new:
            if hi <= lo:
                continue
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        self._iv = merged

    @property
    def total_length(self) -> float:
        return sum(hi - lo for lo, hi in self._iv)

    def covers_circle(self, eps: float = TOL) -> bool:
        return 1.0 - self.total_length < eps

    def gaps(self) -> list[Arc]:
        """Complement components, as circle arcs (the pair flanking 0 joined)."""
        if not self._iv:
            return [Arc.full_circle()]
        out = []
        for (lo1, hi1), (lo2, _) in zip(self._iv, self._iv[1:]):
            if lo2 > hi1:
                out.append(Arc(hi1, lo2))
        first_lo = self._iv[0][0]
        last_hi = self._iv[-1][1]
        wrap = (1.0 - last_hi) + first_lo
        if wrap > 0.0:
            out.append(Arc(norm1(last_hi), first_lo))
        return out

    def largest_gap(self) -> Arc | None:
        gaps = self.gaps()
        if not gaps:
            return None
        return max(gaps, key=lambda g: g.length)

    def intervals(self) -> list[tuple[float, float]]:
        return self._iv[:]

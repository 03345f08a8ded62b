"""Piecewise-linear loops on the torus and their lifts under iterates of the
coordinatewise power map.

A loop is held as cover breakpoints starting at the origin and ending at an
integer vector — its winding vector.  The stage-n lift divides the periodic
extension's cover coordinates by m_i^n; it is the unique lift sending 0 to
the base point.  Integer-time samples of the lift depend only on the winding,
which is what makes the standard straight-line loops a sufficient model.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .exact_arith import Moduli, frac_mod1
from .torus import SegmentSet, TorusPoint, TorusSegment, Vec, _vec


class NonperiodicWithoutHorizon(ValueError):
    """Image requested for a loop with a zero winding entry and no horizon."""


class NonadmissibleWinding(ValueError):
    """A winding entry is zero where a nonzero one is required."""


@dataclass(frozen=True)
class WindingVector:
    """Integer winding numbers, one per coordinate circle."""

    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if not self.entries:
            raise ValueError("need at least one coordinate")

    @property
    def r(self) -> int:
        return len(self.entries)

    @property
    def admissible(self) -> bool:
        """All entries nonzero (every coordinate genuinely winds)."""
        return all(e != 0 for e in self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]


WindingLike = Union[WindingVector, Sequence[int]]


def as_winding(s) -> WindingVector:
    if isinstance(s, WindingVector):
        return s
    if isinstance(s, PLLoop):
        return s.winding()
    return WindingVector(tuple(s))


@dataclass(frozen=True)
class PLLoop:
    """A piecewise-linear loop through the base point, as cover breakpoints.

    Breakpoints are uniformly spaced in parameter time; the first must be the
    origin and the last an integer vector (the winding).  Consecutive equal
    breakpoints encode constant pieces, so the constant loop is representable.
    """

    breakpoints: tuple[Vec, ...]

    def __post_init__(self):
        bps = tuple(_vec(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if len(bps) < 2:
            raise ValueError("need at least two breakpoints (one piece)")
        r = len(bps[0])
        if r < 1:
            raise ValueError("need at least one coordinate")
        for b in bps:
            if len(b) != r:
                raise ValueError("breakpoints of mixed dimension")
        if any(c != 0 for c in bps[0]):
            raise ValueError("loop must start at the base point")
        if any(c.denominator != 1 for c in bps[-1]):
            raise ValueError("loop must close up: last breakpoint must be integral")

    @classmethod
    def straight(cls, s: WindingLike) -> "PLLoop":
        """The straight-line loop of winding s (the product of the basic
        degree-s_i circle loops run simultaneously)."""
        w = as_winding(s)
        zero = tuple(Fraction(0) for _ in range(w.r))
        return cls((zero, tuple(Fraction(e) for e in w)))

    @classmethod
    def constant(cls, r: int) -> "PLLoop":
        zero = tuple(Fraction(0) for _ in range(r))
        return cls((zero, zero))

    @property
    def r(self) -> int:
        return len(self.breakpoints[0])

    @property
    def pieces(self) -> int:
        return len(self.breakpoints) - 1

    def winding(self) -> WindingVector:
        return WindingVector(tuple(int(c) for c in self.breakpoints[-1]))

    def concat(self, other: "PLLoop") -> "PLLoop":
        """First traverse self, then other (translated to start where self ends)."""
        if self.r != other.r:
            raise ValueError("loops of different dimension")
        base = self.breakpoints[-1]
        shifted = tuple(
            tuple(a + b for a, b in zip(base, bp)) for bp in other.breakpoints[1:]
        )
        return PLLoop(self.breakpoints + shifted)

    def repeat(self, times: int) -> "PLLoop":
        if times < 1:
            raise ValueError("times must be >= 1")
        out = self
        for _ in range(times - 1):
            out = out.concat(self)
        return out

    def reversed(self) -> "PLLoop":
        last = self.breakpoints[-1]
        return PLLoop(
            tuple(
                tuple(c - d for c, d in zip(bp, last))
                for bp in reversed(self.breakpoints)
            )
        )

    def point_at(self, t: Fraction) -> TorusPoint:
        """Projected value at parameter t in [0, 1] (pieces uniform in time)."""
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise ValueError("parameter outside [0, 1]")
        k = self.pieces
        if k == 0:
            return TorusPoint(self.breakpoints[0])
        idx = min(math.floor(t * k), k - 1)
        local = t * k - idx
        a, b = self.breakpoints[idx], self.breakpoints[idx + 1]
        return TorusPoint(tuple(x + local * (y - x) for x, y in zip(a, b)))

    def cover_speed_bound(self) -> Fraction:
        """Max over pieces and coordinates of |cover velocity|; Lipschitz bound
        for the projected loop in the max-arc-distance metric."""
        k = self.pieces
        best = Fraction(0)
        for i in range(k):
            a, b = self.breakpoints[i], self.breakpoints[i + 1]
            for x, y in zip(a, b):
                best = max(best, abs(y - x) * k)
        return best


def winding(loop: PLLoop) -> WindingVector:
    return loop.winding()


def coordinate_liftable(loop: PLLoop, i: int) -> bool:
    """Whether the i-th coordinate (0-based) lifts through the exponential
    covering of its circle, i.e. that winding entry is zero."""
    if not 0 <= i < loop.r:
        raise ValueError(f"coordinate {i} out of range for dimension {loop.r}")
    return loop.winding()[i] == 0


def extend_periodic(loop: PLLoop, horizon: int) -> tuple[Vec, ...]:
    """Cover breakpoints of the periodic extension over [0, horizon]:
    block i is the loop translated by i times the winding."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    s = loop.breakpoints[-1]
    out: list[Vec] = [loop.breakpoints[0]]
    for block in range(horizon):
        shift = tuple(block * c for c in s)
        for bp in loop.breakpoints[1:]:
            out.append(tuple(a + b for a, b in zip(shift, bp)))
    return tuple(out)


@dataclass(frozen=True)
class LiftedPath:
    """The stage-n lift of a loop's periodic extension over [0, horizon],
    starting at the base point: cover coordinates divided by m_i^n."""

    source: PLLoop
    moduli: Moduli
    exponent: int
    horizon: int
    breakpoints: tuple[Vec, ...]

    @property
    def pieces_per_block(self) -> int:
        return self.source.pieces

    def block_point(self, k: int) -> TorusPoint:
        """Projected value at integer time k (0 <= k <= horizon)."""
        if not 0 <= k <= self.horizon:
            raise ValueError("integer time outside the horizon")
        return TorusPoint(self.breakpoints[k * self.pieces_per_block])

    def projected_breakpoints(self) -> list[TorusPoint]:
        return [TorusPoint(bp) for bp in self.breakpoints]


def lift(loop: PLLoop, n: int, moduli: Moduli, horizon: int) -> LiftedPath:
    """Unique base-point lift of the periodic extension through n applications
    of the power map."""
    if loop.r != moduli.r:
        raise ValueError("loop and moduli dimension differ")
    if n < 0:
        raise ValueError("stage n must be >= 0")
    scaled = tuple(
        tuple(c / Fraction(m**n) for c, m in zip(bp, moduli))
        for bp in extend_periodic(loop, horizon)
    )
    return LiftedPath(
        source=loop, moduli=moduli, exponent=n, horizon=horizon, breakpoints=scaled
    )


def standard_lift_points(
    s: WindingLike, n: int, moduli: Moduli, count: int
) -> list[TorusPoint]:
    """Integer-time samples of the stage-n lift of the straight loop with
    winding s: the points (s_i * k / m_i^n mod 1) for k = 0..count."""
    w = as_winding(s)
    if w.r != moduli.r:
        raise ValueError("winding and moduli dimension differ")
    if n < 0 or count < 0:
        raise ValueError("n and count must be >= 0")
    return [
        TorusPoint(tuple(Fraction(e * k, m**n) for e, m in zip(w, moduli)))
        for k in range(count + 1)
    ]


def integer_time_points(
    loop: PLLoop, n: int, moduli: Moduli, count: int
) -> list[TorusPoint]:
    """Stage-n lift values at integer times; depends only on the winding."""
    return standard_lift_points(loop.winding(), n, moduli, count)


def image_period(s: WindingLike, n: int, moduli: Moduli) -> int:
    """Least P > 0 with the stage-n standard lift P-periodic as a set sweep:
    lcm over i of m_i^n / gcd(s_i, m_i^n).  Requires an admissible winding."""
    w = as_winding(s)
    if w.r != moduli.r:
        raise ValueError("winding and moduli dimension differ")
    if not w.admissible:
        raise NonadmissibleWinding("winding has a zero entry")
    if n < 0:
        raise ValueError("stage n must be >= 0")
    return math.lcm(*(m**n // math.gcd(abs(e), m**n) for e, m in zip(w, moduli)))


def image_set(
    loop: PLLoop, n: int, moduli: Moduli, horizon: int | None = None
) -> SegmentSet:
    """Image of the stage-n lift as a canonical segment set.

    For admissible windings one full period suffices and is used by default;
    otherwise an explicit horizon must be supplied."""
    if loop.r != moduli.r:
        raise ValueError("loop and moduli dimension differ")
    w = loop.winding()
    if horizon is None:
        if not w.admissible:
            raise NonperiodicWithoutHorizon(
                "zero winding entry: supply an explicit horizon"
            )
        horizon = image_period(w, n, moduli)
    path = lift(loop, n, moduli, horizon)
    segs, pts = [], []
    for a, b in zip(path.breakpoints, path.breakpoints[1:]):
        if a == b:
            pts.append(TorusPoint(a))
        else:
            segs.append(TorusSegment(a, b))
    return SegmentSet.from_segments(segs, pts)

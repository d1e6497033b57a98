"""Exact plane geometry for rational charge vectors.

A charge is an exact pair (re, im) of Fractions.  Nothing here ever computes
an arctangent: phases enter and leave as rationals, and all comparisons go
through cross/dot product signs and integer quarter-sector counters.  A
nonzero rational vector can align with a rational phase only when the phase
is a multiple of 1/4 (tan of any other rational angle is irrational), which
makes the alignment test below complete.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Tuple

Vec2 = Tuple[Fraction, Fraction]

ZERO2: Vec2 = (Fraction(0), Fraction(0))


class StepTooLarge(ValueError):
    """A deformation step turned some charge by pi/2 or more."""


class ChargeVanished(ValueError):
    """A tracked charge hit the origin (the pillar)."""


class UnrepresentablePhase(ValueError):
    """Endpoint charge is not at a quarter-turn angle: exact phase impossible."""


def vec_add(a: Vec2, b: Vec2) -> Vec2:
    return (a[0] + b[0], a[1] + b[1])


def vec_scale(a: Vec2, c) -> Vec2:
    c = Fraction(c)
    return (a[0] * c, a[1] * c)


def vec_neg_conj(a: Vec2) -> Vec2:
    """-conj(a): reflection used by the chirality involution."""
    return (-a[0], a[1])


def is_zero(a: Vec2) -> bool:
    return a[0] == 0 and a[1] == 0


def cross(a: Vec2, b: Vec2) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def dot(a: Vec2, b: Vec2) -> Fraction:
    return a[0] * b[0] + a[1] * b[1]


def quarter_sector(a: Vec2) -> int:
    """Sector k in {0,1,2,3} with arg(a) in [k*pi/2, (k+1)*pi/2)."""
    re, im = a
    if is_zero(a):
        raise ValueError("zero vector has no sector")
    if re > 0 and im >= 0:
        return 0
    if re <= 0 and im > 0:
        return 1
    if re < 0 and im <= 0:
        return 2
    return 3


def phase_of(a: Vec2) -> Optional[Fraction]:
    """arg(a)/pi as an exact rational in (0, 2], or None if not a quarter turn."""
    re, im = a
    if is_zero(a):
        return None
    if im == 0:
        return Fraction(2) if re > 0 else Fraction(1)
    if re == 0:
        return Fraction(1, 2) if im > 0 else Fraction(3, 2)
    if re == im:
        return Fraction(1, 4) if re > 0 else Fraction(5, 4)
    if re == -im:
        return Fraction(7, 4) if re > 0 else Fraction(3, 4)
    return None


def aligned_with_phase(a: Vec2, phi: Fraction) -> bool:
    """Exact test for a = m*exp(i*pi*phi) with m > 0.

    For rational a != 0 this can only hold when phi is a multiple of 1/4;
    any other rational phi fails outright.
    """
    p = phase_of(a)
    if p is None:
        return False
    return (phi - p) % 2 == 0


def normalize_phase(phi: Fraction) -> Fraction:
    """Reduce a rational phase into (0, 2] mod 2."""
    r = Fraction(phi) % 2
    return r if r != 0 else Fraction(2)


def sector_step(old: Vec2, new: Vec2) -> int:
    """Signed quarter-sector move for one deformation step.

    Requires |delta arg| < pi/2, i.e. dot(old, new) > 0; then the sector
    index changes by -1, 0 or +1 and the change is determined mod 4.
    """
    if is_zero(old) or is_zero(new):
        raise ChargeVanished(f"charge hit the origin between {old} and {new}")
    if dot(old, new) <= 0:
        raise StepTooLarge(f"argument step from {old} to {new} is not below pi/2")
    d = (quarter_sector(new) - quarter_sector(old)) % 4
    if d == 0:
        return 0
    if d == 1:
        return 1
    if d == 3:
        return -1
    raise StepTooLarge("sector jump of two quarters")


class AngleTracker:
    """Continuous-argument tracker for one charge along a sampled path.

    State is the current vector plus an unbounded integer sector counter K
    with arg/pi in [K/2, (K+1)/2).  Initialised from an exact phase.
    """

    __slots__ = ("vec", "sector")

    def __init__(self, vec: Vec2, phase: Fraction):
        if not aligned_with_phase(vec, phase):
            raise ValueError(f"phase {phase} does not match charge {vec}")
        self.vec = vec
        # phase is a multiple of 1/4 here; on-axis points sit exactly at the
        # lower boundary of their sector, so floor is right on boundaries too.
        q = Fraction(phase) * 2
        self.sector = q.__floor__()

    def copy(self) -> "AngleTracker":
        t = AngleTracker.__new__(AngleTracker)
        t.vec = self.vec
        t.sector = self.sector
        return t

    def step(self, new: Vec2) -> None:
        self.sector += sector_step(self.vec, new)
        self.vec = new

    def phase(self) -> Fraction:
        """Exact arg/pi; raises if the current vector is not quarter-aligned."""
        p = phase_of(self.vec)
        if p is None:
            raise UnrepresentablePhase(
                f"charge {self.vec} is not at a quarter-turn angle")
        base = p % 2  # in [0, 2)
        k = self.sector - int(base * 2)
        assert k % 4 == 0, "sector counter out of sync with vector"
        return base + 2 * (k // 4)


def compare_tracked_levels(t1: AngleTracker, shift1: Fraction,
                           t2: AngleTracker, shift2: Fraction) -> int:
    """Sign of (arg(t2)/pi + shift2) - (arg(t1)/pi + shift1); shifts are even.

    Exact: the two levels live in half-open quarter intervals indexed by the
    shifted sector counters, and within one interval the cross product sign
    decides.
    """
    s1, s2 = Fraction(shift1), Fraction(shift2)
    if s1 % 2 != 0 or s2 % 2 != 0:
        raise ValueError("level shifts must be even integers")
    # shifting arg/pi by s moves the quarter-sector counter by 2s
    k1 = t1.sector + 2 * int(s1)
    k2 = t2.sector + 2 * int(s2)
    if k2 > k1:
        return 1
    if k2 < k1:
        return -1
    c = cross(t1.vec, t2.vec)
    if c > 0:
        return 1
    if c < 0:
        return -1
    return 0

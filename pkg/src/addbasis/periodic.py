"""Exact algebra of eventually periodic subsets of the natural numbers.

A set is stored as a finite exceptional prefix plus a periodic tail:

    S = finite_part  ∪  { x >= threshold : (x mod modulus) in residues }

Every subset of N that is "eventually periodic" (finitely many exceptions
to a union of arithmetic progressions with a common modulus) has a unique
canonical representation of this form: the modulus is the minimal eventual
period, the threshold is the least point from which the periodic
description is correct, and the finite part holds exactly the elements
below the threshold.  Two canonical values are structurally equal iff they
denote the same subset of N.

Sumsets are computed exactly.  If S1 has threshold T1 and modulus n1, and
S2 likewise, then S1 + S2 is periodic with period N = lcm(n1, n2) from
T1 + T2 + N onwards (split any sum a + b: if a < T1 + N then
b > (a+b) - T1 - N >= T2, so one summand always sits in a periodic tail
and absorbs a shift by N).  We therefore convolve bitmask prefixes of
length T1 + T2 + 4N, read the tail off a window, and verify the claimed
periodicity over the remaining three windows as a bug trap.

All values are immutable; operations are pure functions returning
canonical values, so instances may be shared freely across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable

from .errors import EmptyOperand, InternalInconsistency, NotASubset


def as_finite_set(xs: Iterable[int]) -> tuple[int, ...]:
    """Validate and freeze a finite set of non-negative integers.

    Accepts any iterable; returns the sorted, duplicate-free tuple.
    Raises ValueError on negatives, non-integers, or an empty input.
    """
    out = sorted(set(xs))
    if not out:
        raise ValueError("finite set must be nonempty")
    for x in out:
        if not isinstance(x, int) or isinstance(x, bool):
            raise ValueError(f"finite set elements must be ints, got {x!r}")
        if x < 0:
            raise ValueError(f"finite set elements must be >= 0, got {x}")
    return tuple(out)


def _mask_bits(mask: int) -> list[int]:
    """Positions of set bits, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


@dataclass(frozen=True)
class EventuallyPeriodicSet:
    """Immutable eventually periodic subset of N.

    Direct construction checks structural validity only.  Use
    :meth:`from_parts` / :meth:`from_finite` / :meth:`from_periodic` to
    obtain canonical values; :meth:`normalize` canonicalizes explicitly.
    """

    finite_part: tuple[int, ...]
    threshold: int
    modulus: int
    residues: frozenset[int]

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")
        if not all(0 <= r < self.modulus for r in self.residues):
            raise ValueError("residues must lie in [0, modulus)")
        prev = -1
        for x in self.finite_part:
            if x <= prev:
                raise ValueError("finite part must be strictly increasing")
            if x < 0 or x >= self.threshold:
                raise ValueError("finite part elements must lie in [0, threshold)")
            prev = x

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def from_parts(
        cls,
        finite: Iterable[int] = (),
        threshold: int = 0,
        modulus: int = 1,
        residues: Iterable[int] = (),
    ) -> "EventuallyPeriodicSet":
        return cls(tuple(sorted(set(finite))), threshold, modulus,
                   frozenset(residues)).normalize()

    @classmethod
    def from_finite(cls, xs: Iterable[int]) -> "EventuallyPeriodicSet":
        """The finite set {xs} (must be nonempty)."""
        elems = as_finite_set(xs)
        return cls(elems, elems[-1] + 1, 1, frozenset())

    @classmethod
    def from_periodic(cls, modulus: int, residues: Iterable[int],
                      threshold: int = 0) -> "EventuallyPeriodicSet":
        """The set {x >= threshold : x mod modulus in residues}."""
        return cls.from_parts((), threshold, modulus, residues)

    @classmethod
    def empty(cls) -> "EventuallyPeriodicSet":
        return cls((), 0, 1, frozenset())

    @classmethod
    def naturals(cls) -> "EventuallyPeriodicSet":
        return cls((), 0, 1, frozenset({0}))

    # ------------------------------------------------------------------
    # canonical form

    def normalize(self) -> "EventuallyPeriodicSet":
        """Canonical representation of the same subset of N (idempotent)."""
        if not self.residues:
            if not self.finite_part:
                return EventuallyPeriodicSet((), 0, 1, frozenset())
            return EventuallyPeriodicSet(
                self.finite_part, self.finite_part[-1] + 1, 1, frozenset())
        n, res = self.modulus, self.residues
        for m in _divisors(n):
            if all((r + m) % n in res for r in res):
                break
        small = frozenset(r % m for r in res)
        # lower the threshold as far as the periodic description stays true
        in_finite = set(self.finite_part)
        t = self.threshold
        while t > 0 and ((t - 1) in in_finite) == ((t - 1) % m in small):
            t -= 1
        finite = tuple(x for x in self.finite_part if x < t)
        if (finite, t, m, small) == (self.finite_part, self.threshold,
                                     self.modulus, self.residues):
            return self
        return EventuallyPeriodicSet(finite, t, m, small)

    # ------------------------------------------------------------------
    # membership and enumeration

    def __contains__(self, x: int) -> bool:
        if x < 0:
            return False
        if x >= self.threshold:
            return x % self.modulus in self.residues
        return x in self.finite_part

    @property
    def is_empty(self) -> bool:
        return not self.finite_part and not self.residues

    @property
    def is_finite(self) -> bool:
        return not self.residues

    def min_element(self) -> int:
        """Smallest element; raises EmptyOperand on the empty set.

        Finite-part elements all lie below the threshold, so they precede
        every tail element.
        """
        if self.finite_part:
            return self.finite_part[0]
        if not self.residues:
            raise EmptyOperand("empty set has no minimum")
        t, n = self.threshold, self.modulus
        return min(t + (r - t) % n for r in self.residues)

    def prefix(self, bound: int) -> list[int]:
        """Sorted list of all elements <= bound."""
        out = [x for x in self.finite_part if x <= bound]
        t, n = self.threshold, self.modulus
        for r in sorted(self.residues):
            first = t + (r - t) % n
            out.extend(range(first, bound + 1, n))
        out.sort()
        return out

    # ------------------------------------------------------------------
    # bitmask prefix kernel

    def _prefix_mask(self, bound: int) -> int:
        """Bitmask of all elements in [0, bound]; bit x set iff x in S."""
        mask = 0
        for x in self.finite_part:
            if x <= bound:
                mask |= 1 << x
        if self.residues and self.threshold <= bound:
            n = self.modulus
            pat = 0
            for r in self.residues:
                pat |= 1 << r
            width = n
            while width <= bound:
                pat |= pat << width
                width *= 2
            pat &= (1 << (bound + 1)) - 1
            mask |= pat & ~((1 << self.threshold) - 1)
        return mask

    @classmethod
    def _from_prefix_mask(cls, mask: int, tail_start: int,
                          period: int) -> "EventuallyPeriodicSet":
        """Rebuild a set from a prefix bitmask known to be periodic with
        the given period from tail_start on."""
        window = (mask >> tail_start) & ((1 << period) - 1)
        residues = frozenset((tail_start + j) % period for j in _mask_bits(window))
        finite = tuple(_mask_bits(mask & ((1 << tail_start) - 1)))
        return cls(finite, tail_start, period, residues).normalize()

    # ------------------------------------------------------------------
    # arithmetic

    def sumset(self, other: "EventuallyPeriodicSet") -> "EventuallyPeriodicSet":
        """Exact sumset {a + b : a in self, b in other}, canonical."""
        a, b = self.normalize(), other.normalize()
        if a.is_empty or b.is_empty:
            raise EmptyOperand("sumset of an empty set is undefined")
        period = lcm(a.modulus, b.modulus)
        tail_start = a.threshold + b.threshold + period
        bound = tail_start + 3 * period
        ma = a._prefix_mask(bound)
        mb = b._prefix_mask(bound)
        if mb.bit_count() > ma.bit_count():
            ma, mb = mb, ma
        acc = 0
        for shift in _mask_bits(mb):
            acc |= ma << shift
        acc &= (1 << (bound + 1)) - 1
        # bug trap: the tail must already repeat with the computed period
        span = (1 << (bound - period - tail_start + 1)) - 1
        if ((acc >> tail_start) ^ (acc >> (tail_start + period))) & span:
            raise InternalInconsistency(
                "sumset prefix is not periodic where it provably must be")
        return EventuallyPeriodicSet._from_prefix_mask(acc, tail_start, period)

    __add__ = sumset

    def h_fold(self, h: int) -> "EventuallyPeriodicSet":
        """Sums of exactly h elements (repetition allowed), canonical.

        Computed by binary doubling; sums of exactly-i and exactly-j
        element multisets compose to exactly-(i+j), so the result equals
        the plain (h-1)-step iteration.
        """
        if h < 1:
            raise ValueError("h must be >= 1")
        s = self.normalize()
        if s.is_empty:
            raise EmptyOperand("h-fold sumset of an empty set is undefined")
        acc: EventuallyPeriodicSet | None = None
        power = s
        while h:
            if h & 1:
                acc = power if acc is None else acc.sumset(power)
            h >>= 1
            if h:
                power = power.sumset(power)
        assert acc is not None
        return acc

    def saturate(self, m: int) -> "EventuallyPeriodicSet":
        """All x >= 0 congruent mod m to some element of the set."""
        if m < 1:
            raise ValueError("saturation modulus must be positive")
        s = self.normalize()
        if s.is_empty:
            raise EmptyOperand("saturation of an empty set is undefined")
        classes = {f % m for f in s.finite_part}
        n = s.modulus
        step = gcd(n, m)
        for r in s.residues:
            # the tail meets every class congruent to r modulo gcd(n, m)
            classes.update(range(r % step, m, step))
        return EventuallyPeriodicSet.from_parts((), 0, m, classes)

    def remove_finite(self, xs: Iterable[int]) -> "EventuallyPeriodicSet":
        """Canonical representation of S \\ X for a finite X ⊆ S."""
        removed = as_finite_set(xs)
        s = self.normalize()
        missing = [x for x in removed if x not in s]
        if missing:
            raise NotASubset(f"elements not in the set: {missing}")
        t = max(s.threshold, removed[-1] + 1)
        gone = set(removed)
        finite = [x for x in s.prefix(t - 1) if x not in gone]
        return EventuallyPeriodicSet.from_parts(finite, t, s.modulus, s.residues)

    def adjoin(self, xs: Iterable[int]) -> "EventuallyPeriodicSet":
        """Canonical representation of S ∪ X for a finite X."""
        extra = as_finite_set(xs)
        s = self.normalize()
        t = max(s.threshold, extra[-1] + 1)
        finite = sorted(set(s.prefix(t - 1)) | set(extra))
        return EventuallyPeriodicSet.from_parts(finite, t, s.modulus, s.residues)

    # ------------------------------------------------------------------
    # predicates and invariants

    def is_cofinite(self) -> bool:
        """True iff N \\ S is finite (canonical tail covers every class)."""
        s = self.normalize()
        return s.modulus == 1 and bool(s.residues)

    def equal_up_to_finite(self, other: "EventuallyPeriodicSet") -> bool:
        """True iff the symmetric difference is finite."""
        a, b = self.normalize(), other.normalize()
        return (a.modulus, a.residues) == (b.modulus, b.residues)

    def kneser_period(self, cap: int) -> int | None:
        """Least m <= cap with S ~ S^(m) (saturation changes only finitely
        many elements), or None if no such m exists up to the cap."""
        if cap < 1:
            raise ValueError("cap must be >= 1")
        s = self.normalize()
        if s.is_empty:
            raise EmptyOperand("kneser_period of an empty set is undefined")
        for m in range(1, cap + 1):
            if s.equal_up_to_finite(s.saturate(m)):
                return m
        return None

    def lower_density(self) -> Fraction:
        """Lower asymptotic density, exact.

        For an eventually periodic set the liminf of |S ∩ [1, n]| / n is
        attained along the tail, so it equals |residues| / modulus.
        """
        s = self.normalize()
        if not s.residues:
            return Fraction(0)
        return Fraction(len(s.residues), s.modulus)

    def max_tail_gap(self) -> int:
        """Largest gap between consecutive elements of the periodic tail."""
        s = self.normalize()
        if not s.residues:
            raise EmptyOperand("a finite set has no periodic tail")
        rs = sorted(s.residues)
        if len(rs) == 1:
            return s.modulus
        gaps = [b - a for a, b in zip(rs, rs[1:])]
        gaps.append(rs[0] + s.modulus - rs[-1])
        return max(gaps)

    # ------------------------------------------------------------------
    # interchange format

    def to_json(self) -> dict:
        return {
            "finite": list(self.finite_part),
            "threshold": self.threshold,
            "modulus": self.modulus,
            "residues": sorted(self.residues),
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> "EventuallyPeriodicSet":
        """Parse the interchange form; the result is canonicalized."""
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls.from_parts(
            obj.get("finite", ()),
            obj.get("threshold", 0),
            obj.get("modulus", 1),
            obj.get("residues", ()),
        )

    def __repr__(self) -> str:
        if self.is_finite:
            return f"EventuallyPeriodicSet(finite={list(self.finite_part)})"
        return (f"EventuallyPeriodicSet(finite={list(self.finite_part)}, "
                f"threshold={self.threshold}, modulus={self.modulus}, "
                f"residues={sorted(self.residues)})")

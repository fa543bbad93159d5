"""Exact order computations for additive bases.

``order`` finds the least h such that the h-fold sumset hA (sums of
exactly h elements, repetition allowed) misses only finitely many natural
numbers.  Because the count is exact, hA need not grow with h when 0 is
absent from A, so every h from 1 upward is tested; the search exits early
only on success.

Two interchangeable engines are provided and cross-validated against each
other in the test suite:

``bitset``
    Materialises each h-fold sumset with the prefix-convolution kernel in
    :mod:`addbasis.periodic` and tests cofiniteness directly.  Simple and
    close to the definition; cost grows with h * threshold.

``residue``
    Reduces the cofiniteness question to residue classes.  Write
    A = F ∪ P with F the exceptional finite part and P the full periodic
    tail (mod n from the threshold on).  A large x lies in hA iff x mod n
    is a sum of m residues of F and j = h - m residues of the tail with
    j >= 1: the tail factors absorb any multiple of n, while a sum using
    only F elements is bounded.  So hA is cofinite iff

        U_h := ∪_{m=0}^{h-1} (m-fold sums of F mod n) + ((h-m)-fold sums
               of tail residues mod n)   equals all of Z/nZ,

    which is tracked by the pair recurrence U' = (U + C) ∪ (V + R),
    V' = V + F over subsets of Z/nZ (C = F ∪ R, V_0 = {0}).  The state
    sequence is deterministic, so revisiting a state before full coverage
    proves the set is not a basis.  Runs in tiny polynomial time in n.

``cyclic_order`` answers the analogous covering question inside Z/nZ
itself, with the same cycle-detection argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import (
    Cancelled,
    EmptyOperand,
    NotABasisCertificate,
    NotACyclicBasis,
    NotASubset,
    OrderCapExceeded,
)
from .invariants import delta
from .periodic import EventuallyPeriodicSet, as_finite_set

DEFAULT_H_CAP = 4096


@dataclass(frozen=True)
class CyclicSubset:
    """A nonempty subset of Z/nZ."""

    modulus: int
    elements: frozenset[int]

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if not self.elements:
            raise ValueError("cyclic subset must be nonempty")
        if not all(0 <= e < self.modulus for e in self.elements):
            raise ValueError("elements must lie in [0, modulus)")

    def mask(self) -> int:
        m = 0
        for e in self.elements:
            m |= 1 << e
        return m


@dataclass(frozen=True)
class OrderResult:
    """Order of an asymptotic basis plus a proven cofiniteness witness.

    Every x >= cofinite_witness_threshold lies in the order-fold sumset.
    The witness is engine-dependent: the bitset engine reports the tight
    canonical threshold, the residue engine a proven but coarser bound.
    """

    order: int
    cofinite_witness_threshold: int


@dataclass(frozen=True)
class BasisDecision:
    """Three-valued answer of the asymptotic-basis test."""

    kind: str  # "basis" | "not_basis" | "unknown"
    order: int | None = None
    certificate: str | None = None
    h_cap: int | None = None

    @property
    def is_basis(self) -> bool | None:
        return {"basis": True, "not_basis": False}.get(self.kind)


def _rotate_into(acc: int, mask: int, shifts: int, n: int, full: int) -> int:
    """acc ∪ (mask + s) over all set bits s of ``shifts``, in Z/nZ."""
    while shifts:
        low = shifts & -shifts
        e = low.bit_length() - 1
        acc |= ((mask << e) | (mask >> (n - e))) & full if e else mask
        shifts ^= low
    return acc


def _residue_masks(s: EventuallyPeriodicSet) -> tuple[int, int, int]:
    """(n, finite-part residues, tail residues) as bitmasks, canonical s."""
    n = s.modulus
    fm = 0
    for f in s.finite_part:
        fm |= 1 << (f % n)
    rm = 0
    for r in s.residues:
        rm |= 1 << r
    return n, fm, rm


def order(
    a: EventuallyPeriodicSet,
    h_cap: int = DEFAULT_H_CAP,
    method: str = "auto",
    cancel: Callable[[], bool] | None = None,
) -> OrderResult:
    """Least h <= h_cap such that the h-fold sumset of ``a`` is cofinite.

    Raises NotABasisCertificate when the set is provably not a basis
    (finite set, gcd of differences > 1, or residue-state cycle), and
    OrderCapExceeded when h_cap is reached without a decision.  ``cancel``
    is polled between h iterations.
    """
    s = a.normalize()
    if s.is_empty:
        raise EmptyOperand("order of the empty set is undefined")
    if s.is_finite:
        raise NotABasisCertificate("finite set")
    g = delta(s)
    if g > 1:
        raise NotABasisCertificate(f"all differences divisible by {g}")
    if method not in ("auto", "residue", "bitset"):
        raise ValueError(f"unknown method {method!r}")
    if method == "bitset":
        return _order_bitset(s, h_cap, cancel)
    return _order_residue(s, h_cap, cancel)


def _order_bitset(s: EventuallyPeriodicSet, h_cap: int,
                  cancel: Callable[[], bool] | None) -> OrderResult:
    fold = s
    for h in range(1, h_cap + 1):
        if cancel is not None and cancel():
            raise Cancelled("order computation interrupted")
        if fold.is_cofinite():
            return OrderResult(h, _cofinite_start(fold))
        if h < h_cap:
            fold = fold.sumset(s)
    raise OrderCapExceeded(h_cap)


def _cofinite_start(fold: EventuallyPeriodicSet) -> int:
    # least W with [W, infinity) fully contained in the cofinite set
    w = fold.threshold
    present = set(fold.finite_part)
    while w > 0 and (w - 1) in present:
        w -= 1
    return w


def _order_residue(s: EventuallyPeriodicSet, h_cap: int,
                   cancel: Callable[[], bool] | None) -> OrderResult:
    n, fmask, rmask = _residue_masks(s)
    full = (1 << n) - 1
    cmask = fmask | rmask
    u, v = 0, 1
    seen: set[tuple[int, int]] = set()
    top = max(s.finite_part[-1] if s.finite_part else 0, s.threshold)
    for h in range(1, h_cap + 1):
        if cancel is not None and cancel():
            raise Cancelled("order computation interrupted")
        u = _rotate_into(_rotate_into(0, u, cmask, n, full), v, rmask, n, full)
        v = _rotate_into(0, v, fmask, n, full)
        if u == full:
            # valid witness: pick tail representatives in [T, T+n) and push
            # the surplus (a multiple of n) onto one of them
            return OrderResult(h, h * (top + n))
        state = (u, v)
        if state in seen:
            raise NotABasisCertificate(
                "h-fold residue states cycle without covering Z/nZ")
        seen.add(state)
    raise OrderCapExceeded(h_cap)


def cyclic_order(c: CyclicSubset, h_cap: int | None = None) -> int:
    """Least h with the exactly-h-fold sumset of c equal to all of Z/nZ.

    Any basis of Z/nZ has order at most n - 1, so the default cap is n.
    The h-fold subset sequence is deterministic, hence a repeated state
    before full coverage proves NotACyclicBasis regardless of the cap.
    """
    n = c.modulus
    if h_cap is None:
        h_cap = n
    cmask = c.mask()
    full = (1 << n) - 1
    s = cmask
    seen: set[int] = set()
    h = 1
    while True:
        if s == full:
            if h > h_cap:
                raise OrderCapExceeded(h_cap)
            return h
        if s in seen:
            raise NotACyclicBasis(
                f"{sorted(c.elements)} never sums to all of Z/{n}Z")
        seen.add(s)
        s = _rotate_into(0, s, cmask, n, full)
        h += 1


def is_asymptotic_basis(a: EventuallyPeriodicSet,
                        h_cap: int = DEFAULT_H_CAP) -> BasisDecision:
    """Decide basis status: definite yes (with order), definite no (with a
    certificate), or unknown at the given cap."""
    try:
        res = order(a, h_cap)
    except NotABasisCertificate as exc:
        return BasisDecision("not_basis", certificate=exc.certificate)
    except OrderCapExceeded:
        return BasisDecision("unknown", h_cap=h_cap)
    return BasisDecision("basis", order=res.order)


def removable(a: EventuallyPeriodicSet, xs: Iterable[int]) -> bool:
    """True iff A \\ X is still an asymptotic basis, by the gcd criterion:
    removal of a finite set keeps a basis iff delta(A \\ X) = 1."""
    x = as_finite_set(xs)
    missing = [e for e in x if e not in a]
    if missing:
        raise NotASubset(f"elements not in A: {missing}")
    rest = a.remove_finite(x)
    if rest.is_finite:
        return False
    return delta(rest) == 1

"""Explicit constructions, bound evaluators, and instance verification.

The two construction families here adjoin a small finite set X to a union
of two arithmetic progressions A* with a common modulus, so that removing
X blows the order of the basis up from O(h) to the order of A*:

* cubic family (parameters d >= 1, k >= 2): X = {0, k, ..., dk},
  n = d*k^3, A* = {x : x mod n in {1, d*k^2}}.  G(A \\ X) = n - 1 grows
  like d*h^3/27 against the nominal order parameter h = 3k.
* quadratic family (parameters h >= 2, mu >= 2): X = {0, 1},
  n = h(h-1)mu + 1, A* = {x : x mod n in {mu, h*mu}}.  G(A \\ X) = n - 1
  grows like mu*h^2.

Every bound evaluated here is a proven theorem, so ``verify_instance``
treats a violated inequality as a fatal implementation bug
(BoundViolation), never as a discovery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor

from .errors import BoundViolation, NoQualifyingDivisor, ZeroDensity
from .invariants import InstanceInvariants, instance_invariants
from .orders import DEFAULT_H_CAP, order
from .periodic import EventuallyPeriodicSet, as_finite_set


def rational_to_json(x: int | Fraction) -> int | str:
    """Exact JSON encoding: plain int when integral, "p/q" otherwise."""
    f = Fraction(x)
    if f.denominator == 1:
        return int(f)
    return f"{f.numerator}/{f.denominator}"


def rational_from_json(v: int | str) -> Fraction:
    if isinstance(v, str):
        num, den = v.split("/")
        return Fraction(int(num), int(den))
    return Fraction(v)


# ----------------------------------------------------------------------
# construction families

@dataclass(frozen=True)
class RemovalInstance:
    """A basis A with a designated finite X ⊆ A whose removal is studied."""

    a: EventuallyPeriodicSet
    x: tuple[int, ...]
    label: str

    def __post_init__(self):
        missing = [e for e in self.x if e not in self.a]
        if missing:
            raise ValueError(f"X must be a subset of A; missing {missing}")
        if self.a.remove_finite(self.x).is_finite:
            raise ValueError("A \\ X must be infinite")

    def to_json(self) -> dict:
        return {"A": self.a.to_json(), "X": list(self.x), "label": self.label}

    @classmethod
    def from_json(cls, obj: dict | str) -> "RemovalInstance":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(EventuallyPeriodicSet.from_json(obj["A"]),
                   as_finite_set(obj["X"]), obj.get("label", ""))


def cubic_family_instance(d: int, k: int) -> RemovalInstance:
    """Two-progression core with an adjoined AP of difference k.

    X = {0, k, 2k, ..., dk}, n = d*k^3, tail residues {1, d*k^2}.
    """
    if d < 1 or k < 2:
        raise ValueError("need d >= 1 and k >= 2")
    n = d * k**3
    x = tuple(i * k for i in range(d + 1))
    core = EventuallyPeriodicSet.from_periodic(n, {1, d * k * k})
    return RemovalInstance(core.adjoin(x), x, f"cubic(d={d},k={k},h={3 * k})")


def cubic_family_orders(d: int, k: int) -> tuple[int, int]:
    """Design target orders (G(A), G(A \\ X)) = (3k - 2, d*k^3 - 1).

    These are the classical claimed values for the family.  Direct
    computation confirms G(A \\ X) throughout but gives G(A) = 3k - 3
    when d = 1 (see the acceptance suite), so treat the first component
    as a target, not a theorem.
    """
    if d < 1 or k < 2:
        raise ValueError("need d >= 1 and k >= 2")
    return 3 * k - 2, d * k**3 - 1


def quadratic_family_instance(h: int, mu: int) -> RemovalInstance:
    """X = {0, 1}, n = h(h-1)mu + 1, tail residues {mu, h*mu}."""
    if h < 2 or mu < 2:
        raise ValueError("need h >= 2 and mu >= 2")
    n = h * (h - 1) * mu + 1
    core = EventuallyPeriodicSet.from_periodic(n, {mu, h * mu})
    return RemovalInstance(core.adjoin((0, 1)), (0, 1),
                           f"quadratic(h={h},mu={mu})")


def quadratic_family_orders(h: int, mu: int) -> tuple[int, int]:
    """Design target orders for the quadratic family.

    (2h - 2 if mu = 2 else 2h + mu - 5, h(h-1)mu).  As with the cubic
    family the removed-set order h(h-1)mu is confirmed computationally on
    the whole tested range; the G(A) component fails at (h, mu) = (2, 3),
    where the computed order is 3.
    """
    if h < 2 or mu < 2:
        raise ValueError("need h >= 2 and mu >= 2")
    g_a = 2 * h - 2 if mu == 2 else 2 * h + mu - 5
    return g_a, h * (h - 1) * mu


# ----------------------------------------------------------------------
# bound evaluators (right-hand sides)

def removal_bound_d(h: int, d: int | Fraction) -> int | Fraction:
    """h(h+3)/2 + d * h(h-1)(h+4)/6, exact.

    Integer for integer d (both numerators are divisible by their
    denominators); an exact rational otherwise, compared rationally.
    """
    val = Fraction(h * (h + 3), 2) + Fraction(d) * Fraction(
        h * (h - 1) * (h + 4), 6)
    return int(val) if val.denominator == 1 else val


def removal_bound_eta(h: int, eta: int) -> int:
    """eta * (h^2 - 1) + h + 1."""
    return eta * (h * h - 1) + h + 1


def removal_bound_mu(h: int, mu: int) -> int:
    """h*mu*(h*mu + 3)/2 (always an integer)."""
    hm = h * mu
    return hm * (hm + 3) // 2


def removal_bound_mu_improved(h: int, mu: int) -> int:
    """4h(2h*mu + 1), linear in mu and quadratic in h."""
    return 4 * h * (2 * h * mu + 1)


def plagne_bounds(h: int) -> tuple[int, int]:
    """Single-element-removal extremal order window:
    floor(h(h+4)/3) <= X(h) <= h(h+1)/2 + ceil((h-1)/3)."""
    lower = h * (h + 4) // 3
    upper = h * (h + 1) // 2 + ceil(Fraction(h - 1, 3))
    return lower, upper


def nash_nathanson_guides(k: int, h: int) -> tuple[Fraction, Fraction]:
    """Asymptotic growth guides for the k-element-removal extremal order:
    (4/3)(h/(k+1))^(k+1) and h^(k+1)/(k+1)!.

    These describe behaviour as h grows for fixed k; they are NOT hard
    bounds at small h and nothing in this package asserts against them.
    """
    kk = k + 1
    fact = 1
    for i in range(2, kk + 1):
        fact *= i
    return (Fraction(4, 3) * Fraction(h, kk) ** kk, Fraction(h**kk, fact))


def klopsch_lev_rhs(n: int, rho: int) -> int:
    """max over divisors d | n with d >= rho + 1 of
    (n/d) * (floor((d-2)/(rho-1)) + 1)."""
    if rho < 2:
        raise ValueError("rho must be >= 2")
    best = None
    d = 1
    while d * d <= n:
        if n % d == 0:
            for div in (d, n // d):
                if div >= rho + 1:
                    val = (n // div) * ((div - 2) // (rho - 1) + 1)
                    if best is None or val > best:
                        best = val
        d += 1
    if best is None:
        raise NoQualifyingDivisor(f"no divisor of {n} is >= {rho + 1}")
    return best


def gap_cover_density_bound(alpha: int | Fraction) -> Fraction:
    """1 / (2*ceil(alpha) + 1): lower density of any set that comes within
    alpha of every sufficiently large integer."""
    a = Fraction(alpha)
    if a <= 0:
        raise ValueError("alpha must be positive")
    return Fraction(1, 2 * ceil(a) + 1)


def density_order_bound(s: EventuallyPeriodicSet) -> int:
    """floor(4 / lower_density(s)): order bound for any asymptotic basis
    of positive lower density."""
    dens = s.lower_density()
    if dens == 0:
        raise ZeroDensity("set has zero lower density")
    return floor(4 / dens)


# ----------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class BoundReport:
    """Everything computed while verifying one removal instance.

    ``flags`` maps bound names to satisfaction booleans (None when a
    bound does not apply, e.g. the single-removal window for |X| > 1).
    verify_instance only ever returns reports whose applicable flags are
    all True; a False flag raises BoundViolation instead.
    """

    label: str
    h: int
    g: int
    invariants: InstanceInvariants
    rhs_single_lower: int
    rhs_single_upper: int
    rhs_d: int | Fraction
    rhs_eta: int
    rhs_mu: int
    rhs_mu_improved: int
    rhs_density_removed: int
    rhs_density_base: int
    flags: dict
    h_witness: int
    g_witness: int

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "h": self.h,
            "g": self.g,
            "invariants": self.invariants.to_json(),
            "rhs": {
                "single_lower": self.rhs_single_lower,
                "single_upper": self.rhs_single_upper,
                "d": rational_to_json(self.rhs_d),
                "eta": self.rhs_eta,
                "mu": self.rhs_mu,
                "mu_improved": self.rhs_mu_improved,
                "density_removed": self.rhs_density_removed,
                "density_base": self.rhs_density_base,
            },
            "flags": dict(self.flags),
            "witness": {"h_cofinite_from": self.h_witness,
                        "g_cofinite_from": self.g_witness},
        }

    CSV_FIELDS = ("label", "h", "g", "delta", "diam", "d", "eta", "mu",
                  "rhs_d", "rhs_eta", "rhs_mu", "rhs_mu_improved",
                  "rhs_density_removed", "all_bounds_hold")

    def to_csv_row(self) -> list:
        inv = self.invariants
        return [self.label, self.h, self.g, inv.delta_x, inv.diam_x,
                rational_to_json(inv.d_x), inv.eta, inv.mu,
                rational_to_json(self.rhs_d), self.rhs_eta, self.rhs_mu,
                self.rhs_mu_improved, self.rhs_density_removed,
                all(v for v in self.flags.values() if v is not None)]


def verify_instance(inst: RemovalInstance, h_cap: int = DEFAULT_H_CAP,
                    method: str = "auto") -> BoundReport:
    """Compute h = G(A), g = G(A \\ X), all invariants and bound RHS
    values, and assert every applicable bound.

    Raises BoundViolation on any failed inequality (a bug by definition)
    and propagates engine errors (NotABasisCertificate, OrderCapExceeded,
    NotASubset) for ineligible instances.
    """
    a = inst.a
    x = as_finite_set(inst.x)
    res_a = order(a, h_cap, method=method)
    rest = a.remove_finite(x)
    res_rest = order(rest, h_cap, method=method)
    h, g = res_a.order, res_rest.order
    inv = instance_invariants(a, x)

    lower, upper = plagne_bounds(h)
    rhs_d = removal_bound_d(h, inv.d_x)
    rhs_eta = removal_bound_eta(h, inv.eta)
    rhs_mu = removal_bound_mu(h, inv.mu)
    rhs_mu_imp = removal_bound_mu_improved(h, inv.mu)
    rhs_dens_rest = density_order_bound(rest)
    rhs_dens_base = density_order_bound(a)

    flags = {
        "d_bound": g <= rhs_d,
        "eta_bound": g <= rhs_eta,
        "mu_bound": g <= rhs_mu,
        "mu_improved_bound": g <= rhs_mu_imp,
        "density_removed": g <= rhs_dens_rest,
        "density_base": h <= rhs_dens_base,
        "single_removal_upper": g <= upper if len(x) == 1 else None,
    }
    failed = [name for name, ok in flags.items() if ok is False]
    report = BoundReport(
        label=inst.label, h=h, g=g, invariants=inv,
        rhs_single_lower=lower, rhs_single_upper=upper,
        rhs_d=rhs_d, rhs_eta=rhs_eta, rhs_mu=rhs_mu,
        rhs_mu_improved=rhs_mu_imp,
        rhs_density_removed=rhs_dens_rest, rhs_density_base=rhs_dens_base,
        flags=flags,
        h_witness=res_a.cofinite_witness_threshold,
        g_witness=res_rest.cofinite_witness_threshold,
    )
    if failed:
        raise BoundViolation(
            f"proven bounds failed on {inst.label}: {failed}; "
            f"report: {json.dumps(report.to_json(), sort_keys=True)}")
    return report

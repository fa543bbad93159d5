"""Parameter sweeps with resumable JSONL persistence, plus the two
exhaustive verification drives (two-residue families and cyclic bases).

Sweep results are written as line-delimited JSON: one header line
carrying a hash of the generating configuration, then one line per
parameter tuple.  Records are keyed by (family, params), so re-running
with ``resume`` skips tuples already present.  Record payloads are
deterministic given the engine version; only the header timestamp varies
between runs.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Iterable, Iterator

from . import __version__ as ENGINE_VERSION
from .bounds import (
    BoundReport,
    RemovalInstance,
    cubic_family_instance,
    klopsch_lev_rhs,
    quadratic_family_instance,
    rational_from_json,
    rational_to_json,
    verify_instance,
)
from .errors import BoundViolation, PersistenceError, ToolkitError
from .orders import DEFAULT_H_CAP
from .periodic import EventuallyPeriodicSet

FAMILIES = ("cubic", "quadratic", "two_residue")


@dataclass(frozen=True)
class SweepConfig:
    family: str
    ranges: dict
    h_cap: int = DEFAULT_H_CAP
    out: str | None = None
    parallelism: int = 1
    resume: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if self.h_cap < 1:
            raise ValueError("h_cap must be >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")

    @classmethod
    def from_json(cls, obj: dict | str) -> "SweepConfig":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            family=obj["family"],
            ranges=dict(obj.get("ranges", {})),
            h_cap=obj.get("h_cap", DEFAULT_H_CAP),
            out=obj.get("out"),
            parallelism=obj.get("parallelism", 1),
            resume=bool(obj.get("resume", False)),
        )

    def content_hash(self) -> str:
        """Hash of the math-relevant fields (not out/parallelism/resume)."""
        payload = json.dumps(
            {"family": self.family, "ranges": self.ranges, "h_cap": self.h_cap},
            sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass
class SweepSummary:
    records_written: int = 0
    records_skipped: int = 0
    errors: int = 0
    violations: int = 0
    max_ratio_d: Fraction | None = None
    max_ratio_mu: Fraction | None = None

    def absorb_ratios(self, ratio_d: Fraction | None,
                      ratio_mu: Fraction | None) -> None:
        if ratio_d is not None and (self.max_ratio_d is None
                                    or ratio_d > self.max_ratio_d):
            self.max_ratio_d = ratio_d
        if ratio_mu is not None and (self.max_ratio_mu is None
                                     or ratio_mu > self.max_ratio_mu):
            self.max_ratio_mu = ratio_mu

    def to_json(self) -> dict:
        return {
            "records_written": self.records_written,
            "records_skipped": self.records_skipped,
            "errors": self.errors,
            "violations": self.violations,
            "max_ratio_d": None if self.max_ratio_d is None
            else rational_to_json(self.max_ratio_d),
            "max_ratio_mu": None if self.max_ratio_mu is None
            else rational_to_json(self.max_ratio_mu),
        }


def record_key(family: str, params: dict) -> str:
    return json.dumps({"family": family, "params": params},
                      sort_keys=True, separators=(",", ":"))


def make_record(family: str, params: dict, report: BoundReport,
                h_nominal: int | None) -> dict:
    """One sweep row.  Ratios use the computed order h = G(A); the
    family's nominal order parameter is recorded separately when defined.
    """
    inv = report.invariants
    h, g = report.h, report.g
    ratio_d = (Fraction(g) / (inv.d_x * h**3)) if inv.d_x > 0 else None
    ratio_mu = Fraction(g, inv.mu * h * h)
    return {
        "kind": "record",
        "family": family,
        "params": params,
        "h": h,
        "g": g,
        "h_nominal": h_nominal,
        "delta": inv.delta_x,
        "diam": inv.diam_x,
        "d": rational_to_json(inv.d_x),
        "eta": inv.eta,
        "mu": inv.mu,
        "ratio_d": None if ratio_d is None else rational_to_json(ratio_d),
        "ratio_mu": rational_to_json(ratio_mu),
        "engine_version": ENGINE_VERSION,
    }


# ----------------------------------------------------------------------
# parameter enumeration

def _axis_values(axis) -> list[int]:
    """A range axis is either an explicit list or {"min": a, "max": b}."""
    if isinstance(axis, dict):
        return list(range(int(axis["min"]), int(axis["max"]) + 1))
    if isinstance(axis, Iterable):
        return [int(v) for v in axis]
    raise ValueError(f"bad range axis: {axis!r}")


def _family_tasks(cfg: SweepConfig) -> Iterator[tuple[dict, int | None]]:
    """Yield (params, h_nominal) for every tuple of the configured family."""
    r = cfg.ranges
    if cfg.family == "cubic":
        for d in _axis_values(r.get("d", [1])):
            for k in _axis_values(r.get("k", [2])):
                yield {"d": d, "k": k}, 3 * k
    elif cfg.family == "quadratic":
        for h in _axis_values(r.get("h", [2])):
            for mu in _axis_values(r.get("mu", [2])):
                yield {"h": h, "mu": mu}, h
    else:  # two_residue
        n_max = int(r.get("n_max", 12))
        for n in range(2, n_max + 1):
            yield {"n": n}, None


def _build_instance(family: str, params: dict) -> RemovalInstance:
    if family == "cubic":
        return cubic_family_instance(params["d"], params["k"])
    if family == "quadratic":
        return quadratic_family_instance(params["h"], params["mu"])
    raise ValueError(f"no single-instance builder for family {family!r}")


def _run_family_task(args: tuple) -> list[dict]:
    """Worker: all rows for one parameter tuple (one n for two_residue)."""
    family, params, h_nominal, h_cap = args
    if family == "two_residue":
        return list(_two_residue_rows(params["n"], h_cap))
    try:
        report = verify_instance(_build_instance(family, params), h_cap)
    except BoundViolation:
        raise
    except ToolkitError as exc:
        return [{"kind": "error", "family": family, "params": params,
                 "error": f"{type(exc).__name__}: {exc}",
                 "engine_version": ENGINE_VERSION}]
    return [make_record(family, params, report, h_nominal)]


# ----------------------------------------------------------------------
# two-residue exhaustive family

def _two_residue_rows(n: int, h_cap: int) -> Iterator[dict]:
    """All removal instances built from a two-progression core mod n.

    Core: A* = {x : x mod n in {a, b}} over all residue pairs a < b.
    Removed sets: arithmetic progressions X = {0, s, ..., (L-1)s} of
    length L <= 4 and difference s <= n, adjoined to the core
    (A = A* ∪ X).  Instances are kept when A is a basis and X is
    removable; both filters reduce to gcd checks, applied before any
    engine work.
    """
    x_choices = [(0,)]
    for length in (2, 3, 4):
        for s in range(1, n + 1):
            x_choices.append(tuple(i * s for i in range(length)))
    for a in range(n):
        for b in range(a + 1, n):
            if gcd(b - a, n) != 1:
                continue  # X never removable: delta(A \ X) > 1
            core = EventuallyPeriodicSet.from_periodic(n, (a, b))
            for x in x_choices:
                # basis filter: delta(A) = 1
                g_all = gcd(b - a, n)
                for e in x:
                    g_all = gcd(g_all, e - a)
                if g_all != 1:
                    continue
                inst = RemovalInstance(core.adjoin(x), x,
                                       f"two_residue(n={n},a={a},b={b},"
                                       f"s={x[1] - x[0] if len(x) > 1 else 0},"
                                       f"len={len(x)})")
                params = {"n": n, "a": a, "b": b, "x": list(x)}
                try:
                    report = verify_instance(inst, h_cap)
                except BoundViolation:
                    raise
                except ToolkitError as exc:
                    yield {"kind": "error", "family": "two_residue",
                           "params": params,
                           "error": f"{type(exc).__name__}: {exc}",
                           "engine_version": ENGINE_VERSION}
                    continue
                yield make_record("two_residue", params, report, None)


# ----------------------------------------------------------------------
# persistence and the sweep driver

def _read_existing(path: Path, cfg: SweepConfig) -> set[str]:
    """Keys already present in a sweep file, validating its header.

    A run killed mid-write leaves a final line without a newline; that
    partial row is dropped (truncated away, so appends stay well formed)
    and its tuple simply gets recomputed.
    """
    raw = path.read_bytes()
    if raw and not raw.endswith(b"\n"):
        cut = raw.rfind(b"\n") + 1
        with path.open("r+b") as fh:
            fh.truncate(cut)
        raw = raw[:cut]
    lines = [line for line in raw.decode().splitlines() if line.strip()]
    if not lines:
        raise PersistenceError(f"{path}: missing sweep header")
    try:
        header = json.loads(lines[0])
        rows = [json.loads(line) for line in lines[1:]]
    except json.JSONDecodeError as exc:
        raise PersistenceError(f"{path}: corrupt sweep file: {exc}") from exc
    if not isinstance(header, dict) or header.get("kind") != "header":
        raise PersistenceError(f"{path}: missing sweep header")
    if header.get("config_hash") != cfg.content_hash():
        raise PersistenceError(
            f"{path}: existing results were produced by a different "
            "configuration; refusing to resume")
    return {record_key(row["family"], row["params"]) for row in rows
            if row.get("kind") in ("record", "error")}


def run_sweep(cfg: SweepConfig) -> SweepSummary:
    """Run the configured sweep, appending JSONL rows, and summarise.

    Engine errors become error rows and never abort the sweep;
    BoundViolation is fatal.  Results are written in deterministic task
    order regardless of parallelism.
    """
    summary = SweepSummary()
    path = Path(cfg.out) if cfg.out else None
    existing: set[str] = set()
    out_fh = None
    if path is not None:
        if cfg.resume and path.exists() and path.stat().st_size > 0:
            existing = _read_existing(path, cfg)
            out_fh = path.open("a")
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            out_fh = path.open("w")
            header = {"kind": "header", "family": cfg.family,
                      "config_hash": cfg.content_hash(),
                      "engine_version": ENGINE_VERSION,
                      "written_at": _utc_now()}
            out_fh.write(json.dumps(header, sort_keys=True) + "\n")

    tasks = []
    for params, h_nominal in _family_tasks(cfg):
        if cfg.family != "two_residue" and record_key(cfg.family, params) in existing:
            summary.records_skipped += 1
            continue
        tasks.append((cfg.family, params, h_nominal, cfg.h_cap))

    try:
        if cfg.parallelism > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
                batches = pool.map(_run_family_task, tasks, chunksize=1)
                for rows in batches:
                    _absorb_rows(rows, existing, summary, out_fh)
        else:
            for task in tasks:
                _absorb_rows(_run_family_task(task), existing, summary, out_fh)
    finally:
        if out_fh is not None:
            out_fh.close()
    return summary


def _absorb_rows(rows: list[dict], existing: set[str],
                 summary: SweepSummary, out_fh) -> None:
    for row in rows:
        key = record_key(row["family"], row["params"])
        if key in existing:
            summary.records_skipped += 1
            continue
        if row["kind"] == "error":
            summary.errors += 1
        else:
            summary.records_written += 1
            summary.absorb_ratios(
                None if row["ratio_d"] is None
                else rational_from_json(row["ratio_d"]),
                rational_from_json(row["ratio_mu"]))
        if out_fh is not None:
            stamped = dict(row)
            stamped["ts"] = _utc_now()
            out_fh.write(json.dumps(stamped, sort_keys=True) + "\n")


def _utc_now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def exhaustive_two_residue_sweep(n_max: int, h_cap: int = DEFAULT_H_CAP,
                                 out: str | None = None,
                                 parallelism: int = 1,
                                 resume: bool = False) -> SweepSummary:
    """Verify every two-progression removal instance with modulus <= n_max."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    cfg = SweepConfig(family="two_residue", ranges={"n_max": n_max},
                      h_cap=h_cap, out=out, parallelism=parallelism,
                      resume=resume)
    return run_sweep(cfg)


def read_records(path: str | Path) -> Iterator[dict]:
    """Yield the record rows (not header/error rows) of a sweep file."""
    with Path(path).open() as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            if row.get("kind") == "record":
                yield row


def export_csv(jsonl_path: str | Path, csv_path: str | Path) -> int:
    """Flatten a sweep record file to CSV; returns the number of rows."""
    import csv

    rows = list(read_records(jsonl_path))
    fields = ["family", "params", "h", "g", "h_nominal", "delta", "diam",
              "d", "eta", "mu", "ratio_d", "ratio_mu", "engine_version"]
    with Path(csv_path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for row in rows:
            flat = dict(row, params=json.dumps(row["params"], sort_keys=True,
                                               separators=(",", ":")))
            writer.writerow([flat.get(f) for f in fields])
    return len(rows)


# ----------------------------------------------------------------------
# exhaustive check of bases in Z/nZ

def _klopsch_lev_n(n: int) -> dict:
    """Check every basis of Z/nZ (up to translation) against the divisor
    bound and the product inequality |C| * rho < 2n.

    Both the order and the checked inequalities are invariant under
    translation, so only subsets containing 0 are enumerated (each orbit
    of a basis under translation contains one).  Growth of the h-fold
    sumsets is monotone once 0 is an element, so stabilisation short of
    full coverage decides "not a basis".
    """
    full = (1 << n) - 1
    primes = [p for p in range(2, n + 1)
              if n % p == 0 and all(p % q for q in range(2, p))]
    prime_masks = []
    for p in primes:
        m = 0
        for v in range(0, n, p):
            m |= 1 << v
        prime_masks.append(m)
    rhs_cache: dict[int, int] = {}
    bases = 0
    viol_31 = 0
    viol_32 = 0
    best_num, best_den = 0, 1  # max of |C|*rho / 2n
    for half in range(1 << (n - 1)) if n > 1 else [0]:
        c = (half << 1) | 1
        if any(c & ~pm == 0 for pm in prime_masks):
            continue  # trapped in a proper subgroup: not a basis
        s = c
        rho = 1
        while s != full:
            grown = _grow(s, c, n, full)
            if grown == s:
                rho = 0
                break
            s = grown
            rho += 1
        if not rho:
            continue
        bases += 1
        size = c.bit_count()
        if size * rho >= 2 * n:
            viol_32 += 1
        if size * rho * best_den > best_num * 2 * n:
            best_num, best_den = size * rho, 2 * n
        if rho >= 2 and n >= 3:
            rhs = rhs_cache.get(rho)
            if rhs is None:
                rhs = rhs_cache[rho] = klopsch_lev_rhs(n, rho)
            if size > rhs:
                viol_31 += 1
    g = gcd(best_num, best_den) or 1
    return {"n": n, "bases": bases, "violations_divisor_bound": viol_31,
            "violations_product_bound": viol_32,
            "max_product_ratio": (best_num // g, best_den // g)}


def _grow(s: int, c: int, n: int, full: int) -> int:
    t = s
    m = c & (c - 1)  # bit 0 contributes s itself
    while m:
        low = m & -m
        e = low.bit_length() - 1
        t |= ((s << e) | (s >> (n - e))) & full
        m &= m - 1
    return t


def klopsch_lev_exhaustive(n_max: int, parallelism: int = 1) -> dict:
    """Run the cyclic-basis checks for every n <= n_max and summarise.

    Raises BoundViolation if any proven inequality fails anywhere.
    """
    if n_max < 3:
        raise ValueError("n_max must be >= 3")
    ns = list(range(1, n_max + 1))
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            per_n = list(pool.map(_klopsch_lev_n, ns))
    else:
        per_n = [_klopsch_lev_n(n) for n in ns]
    total = sum(row["bases"] for row in per_n)
    v31 = sum(row["violations_divisor_bound"] for row in per_n)
    v32 = sum(row["violations_product_bound"] for row in per_n)
    best = max((Fraction(*row["max_product_ratio"]) for row in per_n),
               default=Fraction(0))
    if v31 or v32:
        raise BoundViolation(
            f"cyclic basis bounds failed: divisor={v31} product={v32} "
            f"(n <= {n_max})")
    return {
        "n_max": n_max,
        "bases_checked": total,
        "violations": 0,
        "max_product_ratio": rational_to_json(best),
        "per_n": per_n,
    }

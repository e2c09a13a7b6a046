"""Executable checks of the cycle-method lemmas, per order and over order spaces."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from .cycles import (
    CyclicOrder,
    canonical_order,
    order_batches,
    orders_from_arrays,
    realize,
    sample_order_batches,
)
from .matching import (
    Signature,
    Subgraph,
    as_signature,
    is_intersecting_family,
    star_size,
)

log = logging.getLogger(__name__)

MAX_EXAMPLES = 5


def _masks(family: Iterable[Subgraph | int]) -> list[int]:
    return sorted({F.mask if isinstance(F, Subgraph) else int(F) for F in family})


def _family_array(family) -> np.ndarray:
    return np.array(_masks(family), dtype=np.int64)


def is_maximum_family(family: Sequence[Subgraph], n: int, sig: Signature) -> bool:
    """Intersecting and as large as a star."""
    return len(family) == star_size(n, sig) and is_intersecting_family(list(family))


# -- cyclic run helpers -------------------------------------------------------


def run_mask(start: int, length: int, n: int) -> int:
    """Bits of positions ``start .. start+length-1`` (1-based, cyclic) as bits 0..n-1."""
    out = 0
    for t in range(max(0, length)):
        out |= 1 << ((start - 1 + t) % n)
    return out


def positions_of(bits: int, n: int) -> list[int]:
    return [i + 1 for i in range(n) if bits >> i & 1]


def _rotl1(x, n):
    full = (1 << n) - 1
    return ((x << 1) | (x >> (n - 1))) & full


def lemma2_structure(bset, rset, k, n: int, p: int, s: int):
    """Vectorised structure test.

    Returns ``(ok, start)`` arrays: ``ok`` is true where the B positions form
    the run ``start .. start+p+s-k`` and the R positions the run
    ``start-(k-1) .. start+p-1``; ``start`` is 1-based (0 when undefined).
    """
    bset = np.asarray(bset, dtype=np.int64)
    rset = np.asarray(rset, dtype=np.int64)
    k = np.asarray(k, dtype=np.int64)
    full = (1 << n) - 1
    starts = bset & ~_rotl1(bset, n)
    single = np.bitwise_count(starts) == 1
    whole = bset == full
    idx = np.where(single, np.log2(np.where(starts > 0, starts, 1)).astype(np.int64), 0)
    start = np.where(single, idx + 1, np.where(whole, 1, 0))
    ok = np.zeros(bset.shape, dtype=bool)
    for j in range(bset.size):
        st = int(start.flat[j])
        kj = int(k.flat[j])
        if st == 0 or kj <= 0:
            continue
        eb = run_mask(st, p + s - kj + 1, n)
        er = run_mask(st - (kj - 1), p + kj - 1, n)
        ok.flat[j] = int(bset.flat[j]) == eb and int(rset.flat[j]) == er
    return ok, start


# -- per-order checks ----------------------------------------------------------


@dataclass
class Lemma1Check:
    count: int
    bound: int
    holds: bool
    applicable: bool
    note: str = ""


def check_lemma1(C: CyclicOrder, family: Sequence[Subgraph], sig) -> Lemma1Check:
    sig = as_signature(sig)
    real = realize(C, family, sig)
    notes = []
    if C.n < 2 * sig.width:
        notes.append("n < 2(p+s)")
    if not is_intersecting_family(list(family)):
        notes.append("family is not intersecting")
    bound = sig.order
    return Lemma1Check(real.size, bound, real.size <= bound, not notes, "; ".join(notes))


@dataclass
class Lemma2Check:
    status: str  # "ok", "violated" or "not_applicable"
    start: int | None
    k: int | None
    b_positions: tuple[int, ...]
    r_positions: tuple[int, ...]
    expected_b: tuple[int, ...] = ()
    expected_r: tuple[int, ...] = ()


def check_lemma2_structure(C: CyclicOrder, family: Sequence[Subgraph], sig) -> Lemma2Check:
    sig = as_signature(sig)
    n = C.n
    real = realize(C, family, sig)
    bpos = tuple(sorted(real.b_positions))
    rpos = tuple(sorted(real.r_positions))
    if real.size != sig.order:
        return Lemma2Check("not_applicable", None, real.k_stat, bpos, rpos)
    if real.k_stat is None:
        return Lemma2Check("violated", None, None, bpos, rpos)
    bset = sum(1 << (i - 1) for i in bpos)
    rset = sum(1 << (i - 1) for i in rpos)
    ok, start = lemma2_structure([bset], [rset], [real.k_stat], n, sig.p, sig.s)
    st = int(start[0]) or None
    k = real.k_stat
    exp_b = exp_r = ()
    if st is not None:
        exp_b = tuple(positions_of(run_mask(st, sig.width - k + 1, n), n))
        exp_r = tuple(positions_of(run_mask(st - (k - 1), sig.p + k - 1, n), n))
    return Lemma2Check("ok" if ok[0] else "violated", st, k, bpos, rpos, exp_b, exp_r)


@dataclass
class Lemma3Check:
    holds: bool
    k: int | None
    vacuous: bool
    applicable: bool


def check_lemma3(C: CyclicOrder, family: Sequence[Subgraph], sig) -> Lemma3Check:
    sig = as_signature(sig)
    applicable = C.n > 2 * sig.width and is_maximum_family(family, C.n, sig)
    k = realize(C, family, sig).k_stat
    if k is None:
        return Lemma3Check(True, None, True, applicable)
    return Lemma3Check(k in (1, sig.s + 1), k, False, applicable)


# -- sweeps over order spaces --------------------------------------------------


@dataclass
class OrderTable:
    sigma0: np.ndarray
    tau: np.ndarray
    b: np.ndarray
    r: np.ndarray

    def __len__(self) -> int:
        return self.sigma0.shape[0]


def iter_tables(
    n: int,
    sig,
    *,
    restricted: bool = True,
    sample: int | None = None,
    seed: int = 0,
    cap: int | None = None,
) -> Iterator[OrderTable]:
    sig = as_signature(sig)
    sig.check(n)
    if sample is not None:
        batches = sample_order_batches(n, sample, seed, restricted)
    else:
        batches = order_batches(n, restricted, cap=cap)
    for sigma0, tau in batches:
        b, r = kernels.interval_tables(sigma0, tau, sig.p, sig.s)
        yield OrderTable(sigma0, tau, b, r)


def family_stats(table: OrderTable, fam: np.ndarray, n: int, sig: Signature) -> dict[str, np.ndarray]:
    bidx = kernels.lookup(table.b, fam)
    ridx = kernels.lookup(table.r, fam)
    return kernels.order_stats(table.b, table.r, bidx, ridx, n, sig.p, sig.s)


def _example(table: OrderTable, row: int, **extra) -> dict:
    C = next(orders_from_arrays(table.sigma0[row:row + 1], table.tau[row:row + 1]))
    return {"order": C.to_dict(), **extra}


@dataclass
class LemmaResult:
    lemma: str
    status: str  # "pass", "fail", "not_applicable", "observational"
    checked: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    note: str = ""
    details: dict = field(default_factory=dict)
    examples: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "status": self.status,
            "checked": self.checked,
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "note": self.note,
            "details": self.details,
            "examples": self.examples,
        }


def _finish(res: LemmaResult, applicable: bool, observational: bool = False) -> LemmaResult:
    # outside the lemma's hypotheses the counts are reported but never fail
    if not applicable:
        res.status = "not_applicable"
    elif observational:
        res.status = "observational"
    elif res.failed:
        res.status = "fail"
    else:
        res.status = "pass"
    return res


def _image_arrays(sigma0, tau, op: str, i: int):
    s2 = sigma0.copy()
    t2 = tau.copy()
    if op == "t":
        s2[:, [i - 1, i]] = s2[:, [i, i - 1]]
        t2[:, [i - 1, i]] = t2[:, [i, i - 1]]
    else:
        t2[:, i - 1] ^= 1
    return s2, t2


def reflect_arrays(sigma0, tau):
    n = sigma0.shape[1]
    rev = list(range(n - 2, -1, -1))
    s2 = np.concatenate([sigma0[:, rev], sigma0[:, n - 1:]], axis=1)
    t2 = 1 - np.concatenate([tau[:, rev], tau[:, n - 1:]], axis=1)
    return s2, t2


def sweep_lemmas(
    n: int,
    sig,
    family: Sequence[Subgraph],
    lemmas: Iterable[int] = (1, 2, 3, 4),
    *,
    restricted: bool = True,
    sample: int | None = None,
    seed: int = 0,
    cap: int | None = None,
    center: int | None = None,
) -> dict[str, LemmaResult]:
    """Check the requested lemmas in every order of the space (or a sample).

    Lemma 4 is checked for the vertex the canonical order is centred at,
    unless ``center`` (a slot) is given.
    """
    sig = as_signature(sig)
    sig.check(n)
    lemmas = sorted(set(int(x) for x in lemmas))
    bad = [x for x in lemmas if x not in (1, 2, 3, 4)]
    if bad:
        raise ValueError(f"unknown lemma(s) {bad}")
    fam_list = [F if isinstance(F, Subgraph) else Subgraph(n, int(F)) for F in family]
    fam = _family_array(fam_list)
    p, s, w = sig.p, sig.s, sig.width
    bound = sig.order
    intersecting = is_intersecting_family(fam_list)
    maximum = intersecting and len(fam) == star_size(n, sig)
    strict = n > 2 * w

    out: dict[str, LemmaResult] = {}
    notes1 = []
    if n < 2 * w:
        notes1.append("n < 2(p+s)")
    if not intersecting:
        notes1.append("family is not intersecting")
    r1 = LemmaResult("1", "pending", note="; ".join(notes1))
    r1.details = {"bound": bound, "max_count": 0, "equality_orders": 0}

    notes_max = []
    if not strict:
        notes_max.append("n <= 2(p+s)")
    if not maximum:
        notes_max.append("family is not a maximum intersecting family")
    r2 = LemmaResult("2", "pending", note="; ".join(notes_max))
    r3 = LemmaResult("3", "pending", note="; ".join(notes_max))
    r3.details = {"k_histogram": {}, "k_above_s_plus_1": 0}
    r4 = LemmaResult("4", "pending", note="; ".join(notes_max))

    x = center
    if 4 in lemmas and x is None:
        C0 = canonical_order(n)
        common = realize(C0, fam_list, sig).common_vertices()
        x = common[0] if common else None
    extra_js = list(range(w, n - w + 1))
    r4.details = {
        "center": None if x is None else int(x),
        "centered_orders": 0,
        "transposition_checks": 0,
        "swap_position": w,
        "swap_checks": 0,
        "extra_swaps": {str(j): [0, 0] for j in extra_js},
    }

    khist: dict[int, int] = {}
    total = 0
    for table in iter_tables(n, sig, restricted=restricted, sample=sample, seed=seed, cap=cap):
        st = family_stats(table, fam, n, sig)
        count, k = st["count"], st["k"]
        total += len(table)
        if 1 in lemmas:
            ok = count <= bound
            r1.checked += len(table)
            r1.passed += int(ok.sum())
            r1.failed += int((~ok).sum())
            r1.details["max_count"] = max(r1.details["max_count"], int(count.max()))
            r1.details["equality_orders"] += int((count == bound).sum())
            for row in np.flatnonzero(~ok)[: MAX_EXAMPLES - len(r1.examples)]:
                r1.examples.append(_example(table, row, count=int(count[row])))
        if 2 in lemmas:
            full = count == bound
            ok, start = lemma2_structure(st["bset"], st["rset"], k, n, p, s)
            r2.skipped += int((~full).sum())
            r2.checked += int(full.sum())
            r2.passed += int((full & ok).sum())
            badrows = np.flatnonzero(full & ~ok)
            r2.failed += badrows.size
            for row in badrows[: MAX_EXAMPLES - len(r2.examples)]:
                r2.examples.append(
                    _example(
                        table,
                        row,
                        k=int(k[row]),
                        b_positions=positions_of(int(st["bset"][row]), n),
                        r_positions=positions_of(int(st["rset"][row]), n),
                    )
                )
        if 3 in lemmas:
            defined = k > 0
            ok = (k == 1) | (k == s + 1)
            r3.skipped += int((~defined).sum())
            r3.checked += int(defined.sum())
            r3.passed += int((defined & ok).sum())
            badrows = np.flatnonzero(defined & ~ok)
            r3.failed += badrows.size
            r3.details["k_above_s_plus_1"] += int((k > s + 1).sum())
            vals, cnts = np.unique(k[defined], return_counts=True)
            for v, c in zip(vals.tolist(), cnts.tolist()):
                khist[v] = khist.get(v, 0) + c
            for row in badrows[: MAX_EXAMPLES - len(r3.examples)]:
                r3.examples.append(_example(table, row, k=int(k[row])))
        if 4 in lemmas and x is not None:
            xb = np.int64(1) << np.int64(x)
            centered = (count > 0) & ((st["common"] & xb) != 0)
            rows = np.flatnonzero(centered)
            r4.details["centered_orders"] += rows.size
            if rows.size:
                sub_s = table.sigma0[rows]
                sub_t = table.tau[rows]
                ops = [("t", i) for i in range(1, n - 1)] + [("s", w)]
                for op, i in ops:
                    if op == "s" and not 1 <= i <= n - 1:
                        continue
                    s2, t2 = _image_arrays(sub_s, sub_t, op, i)
                    b2, rr2 = kernels.interval_tables(s2, t2, p, s)
                    st2 = kernels.order_stats(
                        b2, rr2, kernels.lookup(b2, fam), kernels.lookup(rr2, fam), n, p, s
                    )
                    keep = (st2["count"] > 0) & ((st2["common"] & xb) != 0)
                    r4.checked += rows.size
                    r4.passed += int(keep.sum())
                    r4.failed += int((~keep).sum())
                    key = "transposition_checks" if op == "t" else "swap_checks"
                    r4.details[key] += rows.size
                    for j in np.flatnonzero(~keep)[: MAX_EXAMPLES - len(r4.examples)]:
                        r4.examples.append(
                            {
                                "order": next(orders_from_arrays(sub_s[j:j + 1], sub_t[j:j + 1])).to_dict(),
                                "operation": f"{op}{i}",
                            }
                        )
                for j in extra_js:
                    if not 1 <= j <= n - 1:
                        continue
                    s2, t2 = _image_arrays(sub_s, sub_t, "s", j)
                    b2, rr2 = kernels.interval_tables(s2, t2, p, s)
                    st2 = kernels.order_stats(
                        b2, rr2, kernels.lookup(b2, fam), kernels.lookup(rr2, fam), n, p, s
                    )
                    keep = (st2["count"] > 0) & ((st2["common"] & xb) != 0)
                    tally = r4.details["extra_swaps"][str(j)]
                    tally[0] += int(keep.sum())
                    tally[1] += rows.size

    r3.details["k_histogram"] = {str(k): v for k, v in sorted(khist.items())}
    if 1 in lemmas:
        out["1"] = _finish(r1, applicable=not notes1)
    if 2 in lemmas:
        out["2"] = _finish(r2, applicable=maximum, observational=not strict)
    if 3 in lemmas:
        out["3"] = _finish(r3, applicable=maximum, observational=not strict)
    if 4 in lemmas:
        if x is None:
            r4.note = "; ".join(filter(None, [r4.note, "no centred order found"]))
        out["4"] = _finish(r4, applicable=maximum and x is not None, observational=not strict)
    for res in out.values():
        res.details["orders"] = total
    return out


def lemma1_over_families(
    n: int,
    sig,
    families: Sequence[Sequence[Subgraph]],
    *,
    restricted: bool = True,
    cap: int | None = None,
) -> list[dict]:
    """Lemma 1 counts for many families, building the interval tables once."""
    sig = as_signature(sig)
    tables = list(iter_tables(n, sig, restricted=restricted, cap=cap))
    rows = []
    for fam_list in families:
        fam = _family_array(fam_list)
        worst = 0
        equal = 0
        violations = 0
        for table in tables:
            count = family_stats(table, fam, n, sig)["count"]
            worst = max(worst, int(count.max()))
            equal += int((count == sig.order).sum())
            violations += int((count > sig.order).sum())
        rows.append(
            {
                "size": int(fam.size),
                "max_count": worst,
                "equality_orders": equal,
                "violations": violations,
                "orders": sum(len(t) for t in tables),
            }
        )
    return rows


@dataclass
class ReflectionReport:
    orders: int
    interval_exchange_failures: int
    family_exchange_failures: int
    k_pairs: int
    k_failures: int
    k_applicable: bool = True

    @property
    def passed(self) -> bool:
        # below n = 2(p+s) intervals wrap onto each other, realised B-intervals
        # need not form runs, and k pairs are only reported
        k_bad = self.k_failures if self.k_applicable else 0
        return not (self.interval_exchange_failures or self.family_exchange_failures or k_bad)


def _sorted_rows(vals):
    return np.sort(vals, axis=1)


def check_reflection(
    n: int, sig, family: Sequence[Subgraph], *, restricted: bool = True, cap: int | None = None
) -> ReflectionReport:
    """B-intervals of an order are the R-intervals of its reflection, and k values pair to s+2."""
    sig = as_signature(sig)
    fam = _family_array(family)
    p, s = sig.p, sig.s
    total = ifail = ffail = kpairs = kfail = 0
    for table in iter_tables(n, sig, restricted=restricted, cap=cap):
        s2, t2 = reflect_arrays(table.sigma0, table.tau)
        b2, r2 = kernels.interval_tables(s2, t2, p, s)
        same_br = np.all(_sorted_rows(table.b) == _sorted_rows(r2), axis=1)
        same_rb = np.all(_sorted_rows(table.r) == _sorted_rows(b2), axis=1)
        ifail += int((~(same_br & same_rb)).sum())

        bidx = kernels.lookup(table.b, fam)
        ridx = kernels.lookup(table.r, fam)
        bidx2 = kernels.lookup(b2, fam)
        ridx2 = kernels.lookup(r2, fam)
        realised_b = _sorted_rows(np.where(bidx >= 0, table.b, 0))
        realised_r2 = _sorted_rows(np.where(ridx2 >= 0, r2, 0))
        realised_r = _sorted_rows(np.where(ridx >= 0, table.r, 0))
        realised_b2 = _sorted_rows(np.where(bidx2 >= 0, b2, 0))
        ok = np.all(realised_b == realised_r2, axis=1) & np.all(realised_r == realised_b2, axis=1)
        ffail += int((~ok).sum())

        k1 = kernels.order_stats(table.b, table.r, bidx, ridx, n, p, s)["k"]
        k2 = kernels.order_stats(b2, r2, bidx2, ridx2, n, p, s)["k"]
        both = (k1 > 0) & (k2 > 0)
        kpairs += int(both.sum())
        kfail += int((both & (k1 + k2 != s + 2)).sum())
        total += len(table)
    return ReflectionReport(total, ifail, ffail, kpairs, kfail, n >= 2 * sig.width)


def check_lemma4(family: Sequence[Subgraph], sig, n: int, **kwargs) -> LemmaResult:
    """Adjacent transpositions and the swap at p+s keep centred orders centred."""
    return sweep_lemmas(n, sig, family, lemmas=(4,), **kwargs)["4"]

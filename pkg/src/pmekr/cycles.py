"""Cyclic orders of the edges of M_n and the intervals they carry.

A cyclic order is a pair ``(sigma, tau)``: ``sigma`` lists the edges position by
position (1-based, ``sigma[n-1] == n`` picks one rotation per class) and
``tau[i]`` says which endpoint of the edge at position ``i + 1`` comes first
(0: ``l`` then ``r``; 1: ``r`` then ``l``).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from .matching import (
    CapacityError,
    Signature,
    Subgraph,
    as_signature,
    family_masks,
    family_size,
    low_bits,
)

log = logging.getLogger(__name__)

DEFAULT_ORDER_CAP = 10_000_000


@dataclass(frozen=True)
class CyclicOrder:
    sigma: tuple[int, ...]
    tau: tuple[int, ...]

    def __post_init__(self) -> None:
        sigma = tuple(int(x) for x in self.sigma)
        tau = tuple(int(x) for x in self.tau)
        n = len(sigma)
        if n < 1:
            raise ValueError("a cyclic order needs at least one edge")
        if len(tau) != n:
            raise ValueError(f"tau has length {len(tau)}, expected {n}")
        if sorted(sigma) != list(range(1, n + 1)):
            raise ValueError(f"sigma {sigma} is not a permutation of 1..{n}")
        if sigma[-1] != n:
            raise ValueError(f"sigma must fix n (sigma(n) = {sigma[-1]}, expected {n})")
        if any(t not in (0, 1) for t in tau):
            raise ValueError(f"tau must be a 0/1 sequence, got {tau}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "tau", tau)

    @property
    def n(self) -> int:
        return len(self.sigma)

    @property
    def restricted(self) -> bool:
        """Whether the order belongs to the tau_n = 0 half."""
        return self.tau[-1] == 0

    def arrangement(self) -> list[tuple[str, str]]:
        """Vertex pairs position by position, e.g. ``[("l5", "r5"), ("r3", "l3"), ...]``."""
        out = []
        for e, t in zip(self.sigma, self.tau):
            a, b = f"l{e}", f"r{e}"
            out.append((a, b) if t == 0 else (b, a))
        return out

    def to_dict(self) -> dict:
        return {"sigma": list(self.sigma), "tau": "".join(map(str, self.tau))}

    @classmethod
    def from_dict(cls, d: dict) -> "CyclicOrder":
        tau = d["tau"]
        if isinstance(tau, str):
            tau = [int(c) for c in tau]
        return cls(tuple(d["sigma"]), tuple(tau))

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(1, n)`` kernel arrays with 0-based edges."""
        return (np.array([self.sigma], np.int64) - 1, np.array([self.tau], np.int64))


@dataclass(frozen=True)
class IntervalFamily:
    """How a family shows up in one cyclic order."""

    order: CyclicOrder
    signature: Signature
    b_positions: frozenset[int]
    r_positions: frozenset[int]
    members: tuple[Subgraph, ...]
    k_stat: int | None

    @property
    def size(self) -> int:
        return len(self.members)

    def common_vertices(self) -> tuple[int, ...]:
        if not self.members:
            return ()
        acc = -1
        for F in self.members:
            acc &= F.mask
        return tuple(i for i in range(2 * self.order.n) if acc >> i & 1)


def canonical_order(n: int) -> CyclicOrder:
    if n < 1:
        raise ValueError("n must be positive")
    return CyclicOrder(tuple(range(1, n + 1)), (0,) * n)


def _check_position(C: CyclicOrder, i: int) -> None:
    if not 1 <= i <= C.n:
        raise ValueError(f"position {i} outside 1..{C.n}")


def _check_sig(C: CyclicOrder, sig) -> Signature:
    sig = as_signature(sig)
    sig.check(C.n)
    return sig


def interval_mask(sigma: Sequence[int], tau: Sequence[int], i: int, p: int, s: int, kind: str) -> int:
    """Mask of the B- or R-interval at position ``i`` (1-based) of any arrangement.

    ``sigma`` holds 1-based edges and need not fix ``n``; rotated
    representatives are accepted here on purpose.
    """
    n = len(sigma)
    mask = 0
    for t in range(p + s):
        pos = (i - 1 + t) % n
        e2 = 2 * (sigma[pos] - 1)
        first = e2 + tau[pos]
        second = e2 + 1 - tau[pos]
        if kind == "B":
            mask |= (3 << e2) if t < p else (1 << first)
        else:
            mask |= (1 << second) if t < s else (3 << e2)
    return mask


def b_interval(C: CyclicOrder, i: int, sig) -> Subgraph:
    sig = _check_sig(C, sig)
    _check_position(C, i)
    return Subgraph(C.n, interval_mask(C.sigma, C.tau, i, sig.p, sig.s, "B"))


def r_interval(C: CyclicOrder, i: int, sig) -> Subgraph:
    sig = _check_sig(C, sig)
    _check_position(C, i)
    return Subgraph(C.n, interval_mask(C.sigma, C.tau, i, sig.p, sig.s, "R"))


def _mask_set(family: Iterable[Subgraph | int]) -> set[int]:
    return {F.mask if isinstance(F, Subgraph) else int(F) for F in family}


def k_statistic(masks: Iterable[int], n: int, width: int) -> int | None:
    """Fewest edges shared by two distinct realised B-intervals.

    ``width`` (= p + s) when only one is realised, ``None`` when none is.
    """
    distinct = sorted(set(masks))
    if not distinct:
        return None
    if len(distinct) == 1:
        return width
    low = low_bits(n)
    supports = [(m | m >> 1) & low for m in distinct]
    return min((a & b).bit_count() for a, b in itertools.combinations(supports, 2))


def realize(C: CyclicOrder, family: Iterable[Subgraph | int], sig) -> IntervalFamily:
    sig = _check_sig(C, sig)
    fam = _mask_set(family)
    bpos, rpos, members, bmasks = set(), set(), set(), []
    for i in range(1, C.n + 1):
        bm = interval_mask(C.sigma, C.tau, i, sig.p, sig.s, "B")
        rm = interval_mask(C.sigma, C.tau, i, sig.p, sig.s, "R")
        if bm in fam:
            bpos.add(i)
            members.add(bm)
            bmasks.append(bm)
        if rm in fam:
            rpos.add(i)
            members.add(rm)
    return IntervalFamily(
        order=C,
        signature=sig,
        b_positions=frozenset(bpos),
        r_positions=frozenset(rpos),
        members=tuple(Subgraph(C.n, m) for m in sorted(members)),
        k_stat=k_statistic(bmasks, C.n, sig.width),
    )


def center_of(C: CyclicOrder, family: Iterable[Subgraph | int], sig) -> int | None:
    """Lowest vertex slot common to every realised member, if any."""
    real = realize(C, family, sig)
    common = real.common_vertices()
    return common[0] if common else None


# -- order operations -------------------------------------------------------


def transpose(C: CyclicOrder, i: int, j: int) -> CyclicOrder:
    """Exchange the edges at positions ``i`` and ``j``, orientations travel along."""
    n = C.n
    if i > j:
        i, j = j, i
    if not (1 <= i and j <= n):
        raise ValueError(f"positions must lie in 1..{n}")
    if i == j:
        log.debug("transpose(%d, %d) is the identity", i, j)
        return C
    if j == n:
        raise ValueError("transpositions involving position n leave the canonical form")
    sigma, tau = list(C.sigma), list(C.tau)
    sigma[i - 1], sigma[j - 1] = sigma[j - 1], sigma[i - 1]
    tau[i - 1], tau[j - 1] = tau[j - 1], tau[i - 1]
    return CyclicOrder(tuple(sigma), tuple(tau))


def adjacent_transpose(C: CyclicOrder, i: int) -> CyclicOrder:
    return transpose(C, i, i + 1)


def swap(C: CyclicOrder, i: int) -> CyclicOrder:
    """Flip the orientation of the edge at position ``i``."""
    _check_position(C, i)
    tau = list(C.tau)
    tau[i - 1] ^= 1
    return CyclicOrder(C.sigma, tuple(tau))


def reflect(C: CyclicOrder) -> CyclicOrder:
    """Read the order backwards, re-rotated so that edge n stays last.

    Orientation bits travel with their edges and flip, so the first vertex of
    each edge becomes its second.
    """
    n = C.n
    sigma = tuple(C.sigma[n - 1 - i - 1] for i in range(n - 1)) + (n,)
    tau = tuple(1 - C.tau[n - 1 - i - 1] for i in range(n - 1)) + (1 - C.tau[-1],)
    return CyclicOrder(sigma, tau)


# -- order spaces -----------------------------------------------------------


def order_count(n: int, restricted: bool = False) -> int:
    return math.factorial(n - 1) * 2 ** (n - 1 if restricted else n)


def _tau_block(n: int, restricted: bool) -> np.ndarray:
    free = n - 1 if restricted else n
    bits = np.array(list(itertools.product((0, 1), repeat=free)), dtype=np.int64).reshape(2**free, free)
    if restricted:
        bits = np.concatenate([bits, np.zeros((bits.shape[0], 1), np.int64)], axis=1)
    return bits


def _check_cap(n: int, restricted: bool, cap: int | None) -> None:
    cap = DEFAULT_ORDER_CAP if cap is None else cap
    total = order_count(n, restricted)
    if total > cap:
        raise CapacityError(
            f"{total} cyclic orders for n={n} exceed the cap of {cap}; "
            "raise the cap or sample orders instead"
        )


def order_batches(
    n: int, restricted: bool = False, batch: int = 1 << 16, cap: int | None = None
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """All canonical orders as ``(sigma0, tau)`` array batches (0-based edges).

    Orders come sigma-major (permutations of the first n-1 edges in
    lexicographic order), tau-minor (lexicographic bit tuples).
    """
    if n < 1:
        raise ValueError("n must be positive")
    _check_cap(n, restricted, cap)
    taus = _tau_block(n, restricted)
    T = taus.shape[0]
    per = max(1, batch // T)
    perms = itertools.permutations(range(n - 1))
    while True:
        chunk = list(itertools.islice(perms, per))
        if not chunk:
            return
        sig = np.array(chunk, dtype=np.int64).reshape(len(chunk), n - 1)
        sig = np.concatenate([sig, np.full((len(chunk), 1), n - 1, np.int64)], axis=1)
        yield np.repeat(sig, T, axis=0), np.tile(taus, (len(chunk), 1))


def sample_order_batches(
    n: int, count: int, seed: int, restricted: bool = True, batch: int = 1 << 16
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Seeded uniform sample of orders: sigma uniform on S_{n-1}, tau bits iid."""
    rng = np.random.default_rng(seed)
    done = 0
    while done < count:
        m = min(batch, count - done)
        keys = rng.random((m, n - 1))
        sig = np.argsort(keys, axis=1).astype(np.int64)
        sig = np.concatenate([sig, np.full((m, 1), n - 1, np.int64)], axis=1)
        tau = rng.integers(0, 2, size=(m, n), dtype=np.int64)
        if restricted:
            tau[:, -1] = 0
        done += m
        yield sig, tau


def orders_from_arrays(sigma0: np.ndarray, tau: np.ndarray) -> Iterator[CyclicOrder]:
    for srow, trow in zip(sigma0.tolist(), tau.tolist()):
        yield CyclicOrder(tuple(x + 1 for x in srow), tuple(trow))


def enumerate_orders(n: int, restricted: bool = False, cap: int | None = None) -> Iterator[CyclicOrder]:
    """Every order of the canonical space (tau_n = 0 half when ``restricted``)."""
    for sig, tau in order_batches(n, restricted, cap=cap):
        yield from orders_from_arrays(sig, tau)


def sample_orders(n: int, count: int, seed: int, restricted: bool = True) -> Iterator[CyclicOrder]:
    for sig, tau in sample_order_batches(n, count, seed, restricted):
        yield from orders_from_arrays(sig, tau)


def generator_closure(n: int, swap_position: int) -> int:
    """Size of the set reached from the canonical order by t_1..t_{n-2} and one swap."""
    if not 1 <= swap_position <= n:
        raise ValueError("swap position outside 1..n")
    start = canonical_order(n)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for C in frontier:
            images = [adjacent_transpose(C, i) for i in range(1, n - 1)]
            images.append(swap(C, swap_position))
            for D in images:
                if D not in seen:
                    seen.add(D)
                    nxt.append(D)
        frontier = nxt
    return len(seen)


# -- double counting ---------------------------------------------------------


def b_interval_order_count(F: Subgraph | Signature | tuple[int, int], n: int | None = None) -> int:
    """Number of (order, position) pairs at which a member is a B-interval.

    Equal to the number of orders whenever a member cannot appear twice in one
    order, which holds for every signature except p = 0, s = n.
    """
    if isinstance(F, Subgraph):
        n = F.n if n is None else n
        sig = F.signature
    else:
        sig = as_signature(F)
    if n is None:
        raise ValueError("n is required")
    sig.check(n)
    p, s = sig.p, sig.s
    return 2 ** (n - s) * math.factorial(p) * math.factorial(s) * math.factorial(n - p - s)


@dataclass
class DoubleCountReport:
    n: int
    signature: Signature
    formula: int
    orders: int
    b_incidences: np.ndarray
    r_incidences: np.ndarray
    b_orders: np.ndarray
    r_orders: np.ndarray

    @property
    def passed(self) -> bool:
        f = self.formula
        return bool(
            np.all(self.b_incidences == f)
            and np.all(self.r_incidences == f)
            and np.all(self.b_orders == f)
            and np.all(self.r_orders == f)
        )

    def summary(self) -> dict:
        def rng(a):
            return [int(a.min()), int(a.max())] if a.size else [0, 0]

        return {
            "formula": self.formula,
            "orders": self.orders,
            "members": int(self.b_incidences.size),
            "b_orders_range": rng(self.b_orders),
            "r_orders_range": rng(self.r_orders),
            "b_incidences_range": rng(self.b_incidences),
            "r_incidences_range": rng(self.r_incidences),
            "bookkeeping": int(self.b_incidences.sum()) == self.orders * self.n,
            "passed": self.passed,
        }


def _distinct_row_counts(idx: np.ndarray, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-member counts over rows: all hits, and rows with at least one hit."""
    hits = idx[idx >= 0]
    incid = np.bincount(hits, minlength=size)
    srt = np.sort(idx, axis=1)
    fresh = np.ones(srt.shape, dtype=bool)
    fresh[:, 1:] = srt[:, 1:] != srt[:, :-1]
    rows = srt[fresh & (srt >= 0)]
    return incid, np.bincount(rows, minlength=size)


def verify_double_count(n: int, sig, cap: int | None = None) -> DoubleCountReport:
    """Count, for every member, the orders of the full space realising it."""
    sig = as_signature(sig)
    sig.check(n)
    fam = family_masks(n, sig)
    size = fam.shape[0]
    bi = np.zeros(size, np.int64)
    ri = np.zeros(size, np.int64)
    bo = np.zeros(size, np.int64)
    ro = np.zeros(size, np.int64)
    total = 0
    for sigma0, tau in order_batches(n, restricted=False, cap=cap):
        b, r = kernels.interval_tables(sigma0, tau, sig.p, sig.s)
        bidx = kernels.lookup(b, fam)
        ridx = kernels.lookup(r, fam)
        inc, rows = _distinct_row_counts(bidx, size)
        bi += inc
        bo += rows
        inc, rows = _distinct_row_counts(ridx, size)
        ri += inc
        ro += rows
        total += sigma0.shape[0]
    assert size == family_size(n, sig)
    return DoubleCountReport(n, sig, b_interval_order_count(sig, n), total, bi, ri, bo, ro)

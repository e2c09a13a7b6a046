"""Signature families in disjoint unions of cliques (brute-force scale).

G_{m,n} is m disjoint copies of K_n.  A member with signature vector
``s = (s_1, ..., s_n)`` uses exactly ``s_i`` components as a K_i and leaves
the other components untouched.  Vertex ``(c, v)`` (1-based) sits at slot
``(c-1)*n + (v-1)``, so G_{m,2} lines up with the slots of M_m.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .matching import CapacityError, SignatureError
from .search import (
    SOLVER_CAP,
    EkrVerdict,
    graph_from_masks,
    verdict_from_graph,
)

log = logging.getLogger(__name__)

BRUTE_FORCE_MAX_SLOTS = 20
THRESHOLD_RUN = 3


@dataclass(frozen=True)
class ComponentsGraph:
    m: int
    n: int

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError("G_{m,n} needs m, n >= 1")

    @property
    def order(self) -> int:
        return self.m * self.n

    def slot(self, c: int, v: int) -> int:
        if not (1 <= c <= self.m and 1 <= v <= self.n):
            raise ValueError(f"vertex ({c},{v}) outside G_{{{self.m},{self.n}}}")
        return (c - 1) * self.n + (v - 1)

    def vertex(self, slot: int) -> tuple[int, int]:
        c, v = divmod(slot, self.n)
        return c + 1, v + 1

    def component_mask(self, c: int) -> int:
        return ((1 << self.n) - 1) << ((c - 1) * self.n)


@dataclass(frozen=True)
class SignatureVector:
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if any((not isinstance(x, int)) or x < 0 for x in self.counts):
            raise SignatureError("signature entries must be non-negative integers")
        if not any(self.counts):
            raise SignatureError("signature must have at least one positive entry")

    @classmethod
    def parse(cls, text: str | Sequence[int]) -> SignatureVector:
        if isinstance(text, str):
            parts = [x for x in text.replace("(", "").replace(")", "").replace(" ", "").split(",") if x]
            try:
                vals = tuple(int(x) for x in parts)
            except ValueError:
                raise SignatureError(f"bad signature {text!r}") from None
        else:
            vals = tuple(int(x) for x in text)
        return cls(vals)

    @property
    def components(self) -> int:
        return sum(self.counts)

    @property
    def support(self) -> int:
        """Largest clique size used."""
        return max(i + 1 for i, x in enumerate(self.counts) if x)

    def padded(self, n: int) -> tuple[int, ...]:
        if self.support > n:
            raise SignatureError(f"signature uses K_{self.support} but components have {n} vertices")
        return tuple(self.counts[:n]) + (0,) * max(0, n - len(self.counts))

    def check(self, m: int, n: int) -> None:
        self.padded(n)
        if self.components > m:
            raise SignatureError(f"signature needs {self.components} components but G has {m}")

    def __str__(self) -> str:
        c = list(self.counts)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        return ",".join(map(str, c))


def as_vector(s) -> SignatureVector:
    return s if isinstance(s, SignatureVector) else SignatureVector.parse(s)


@dataclass(frozen=True, order=True)
class GeneralMember:
    """A member of a signature family, printed as ``c1v2``-style tokens."""

    mask: int
    n: int

    def tokens(self) -> list[str]:
        out = []
        x, i = self.mask, 0
        while x:
            if x & 1:
                c, v = divmod(i, self.n)
                out.append(f"c{c + 1}v{v + 1}")
            x >>= 1
            i += 1
        return out

    def __str__(self) -> str:
        return "{" + ", ".join(self.tokens()) + "}"


def signature_family_size(m: int, n: int, s) -> int:
    """Closed-form count: place the clique sizes on components, then pick vertices."""
    sv = as_vector(s)
    sv.check(m, n)
    counts = sv.padded(n)
    places = math.factorial(m) // (math.prod(math.factorial(x) for x in counts) * math.factorial(m - sum(counts)))
    return places * math.prod(math.comb(n, i + 1) ** x for i, x in enumerate(counts))


def _component_choices(n: int, size: int) -> list[int]:
    return [sum(1 << v for v in combo) for combo in itertools.combinations(range(n), size)]


def iter_signature_family(m: int, n: int, s) -> Iterator[int]:
    """Masks of every member exactly once, component by component."""
    sv = as_vector(s)
    sv.check(m, n)
    remaining = list(sv.padded(n))
    choices = {i + 1: _component_choices(n, i + 1) for i, x in enumerate(remaining) if x}

    def rec(c: int, left: int, prefix: int) -> Iterator[int]:
        if left == 0:
            yield prefix
            return
        if m - c < left:
            return
        yield from rec(c + 1, left, prefix)
        shift = c * n
        for size, opts in choices.items():
            if remaining[size - 1]:
                remaining[size - 1] -= 1
                for o in opts:
                    yield from rec(c + 1, left - 1, prefix | (o << shift))
                remaining[size - 1] += 1

    yield from rec(0, sum(remaining), 0)


def enumerate_signature_family(m: int, n: int, s, cap: int | None = None) -> list[int]:
    """Sorted member masks; refuses when the closed-form size exceeds ``cap``."""
    size = signature_family_size(m, n, s)
    if cap is not None and size > cap:
        raise CapacityError(f"signature family has {size} members, above the cap of {cap}")
    return sorted(iter_signature_family(m, n, s))


def brute_force_signature_family(m: int, n: int, s) -> list[int]:
    """Raw enumeration over every vertex subset of G_{m,n}; small graphs only."""
    sv = as_vector(s)
    sv.check(m, n)
    target = sv.padded(n)
    if m * n > BRUTE_FORCE_MAX_SLOTS:
        raise CapacityError(f"raw enumeration limited to {BRUTE_FORCE_MAX_SLOTS} vertices")
    low = (1 << n) - 1
    out = []
    for mask in range(1 << (m * n)):
        hist = [0] * (n + 1)
        for c in range(m):
            hist[((mask >> (c * n)) & low).bit_count()] += 1
        if tuple(hist[1:]) == target:
            out.append(mask)
    return out


def star_sizes(masks: Sequence[int], slots: int) -> list[int]:
    return [sum(1 for x in masks if x >> v & 1) for v in range(slots)]


def ekr_check_general(
    m: int,
    n: int,
    s,
    cap: int = SOLVER_CAP,
    *,
    star_cap: int | None = None,
    node_limit: int = 0,
    time_limit: float = 0.0,
) -> EkrVerdict:
    """EKR verdict for a signature family under the vertex-star convention."""
    sv = as_vector(s)
    G = ComponentsGraph(m, n)
    masks = enumerate_signature_family(m, n, sv, cap)
    graph = graph_from_masks(masks, vertex_transitive=True, cap=cap)
    sizes = star_sizes(masks, G.order)
    best = max(sizes)
    center = sizes.index(best)
    stars = [frozenset(i for i, x in enumerate(masks) if x >> v & 1) for v in range(G.order) if sizes[v] == best]

    def is_star_indices(indices):
        got = frozenset(indices)
        return got in stars

    verdict = verdict_from_graph(
        graph,
        n,
        best,
        is_star_indices,
        instance={"m": m, "n": n, "signature": str(sv)},
        cap=10 * G.order if star_cap is None else star_cap,
        node_limit=node_limit,
        time_limit=time_limit,
        seed=sorted(stars[0]),
        wrap=lambda mask: GeneralMember(mask, n),
    )
    c, v = G.vertex(center)
    verdict.notes.append(f"vertex stars assumed; largest star centred at c{c}v{v}")
    return verdict


def general_row(v: EkrVerdict) -> dict:
    """Flat row for threshold tables."""
    return {
        "m": v.instance["m"],
        "n": v.instance["n"],
        "signature": v.instance["signature"],
        "family_size": v.family_size,
        "star_size_max": v.star_size,
        "max_intersecting": v.max_size,
        "ekr": "unknown" if v.ekr is None else str(v.ekr).lower(),
        "strongly_ekr": "unknown" if v.strongly_ekr is None else str(v.strongly_ekr).lower(),
    }


GENERAL_COLUMNS = ["m", "n", "signature", "family_size", "star_size_max", "max_intersecting", "ekr", "strongly_ekr"]


@dataclass
class ThresholdScan:
    m: int
    signature: str
    rows: list[dict]
    estimate: int | None
    stopped: str
    heuristic: bool = True

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "signature": self.signature,
            "estimate": self.estimate,
            "label": "heuristic: first n from which ekr held for %d consecutive n" % THRESHOLD_RUN,
            "stopped": self.stopped,
            "rows": self.rows,
        }


def threshold_scan(
    m: int,
    s,
    n_max: int,
    *,
    n_min: int | None = None,
    run: int = THRESHOLD_RUN,
    cap: int = SOLVER_CAP,
    time_limit: float = 0.0,
) -> ThresholdScan:
    """Scan n upward and report the first n after which ekr=true held ``run`` times.

    The estimate is empirical and says nothing about larger n.
    """
    sv = as_vector(s)
    start = max(sv.support, n_min or 1)
    rows: list[dict] = []
    streak_start = None
    streak = 0
    stopped = "n_max"
    for n in range(start, n_max + 1):
        try:
            v = ekr_check_general(m, n, sv, cap, time_limit=time_limit)
        except CapacityError as exc:
            log.info("threshold scan stopped at n=%d: %s", n, exc)
            stopped = f"capacity at n={n}"
            break
        rows.append(general_row(v))
        if v.ekr:
            if streak == 0:
                streak_start = n
            streak += 1
            if streak >= run:
                stopped = "persistent"
                break
        else:
            streak = 0
            streak_start = None
    estimate = streak_start if streak >= run else None
    return ThresholdScan(m, str(sv), rows, estimate, stopped)

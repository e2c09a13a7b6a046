"""The perfect matching graph M_n and its families H^(p,s)(n).

Vertices are stored as *slots* in a 2n-bit mask: slot ``2*(i-1)`` is ``l_i``
and slot ``2*(i-1) + 1`` is ``r_i``.  Edge indices are 1-based everywhere a
user can see them (tokens such as ``"l3"``), 0-based inside the bit tricks.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_ENUM_N = 16

_TOKEN = re.compile(r"^\s*([lLrR])\s*(\d+)\s*$")


class SignatureError(ValueError):
    """Raised for a (p, s) pair that is invalid on its own or for a given n."""


class CapacityError(RuntimeError):
    """Raised when an exhaustive operation would exceed its enumeration cap."""


def low_bits(n: int) -> int:
    """Mask with the ``l`` slot of every edge set (``0b0101...``)."""
    return int("01" * n, 2) if n > 0 else 0


@dataclass(frozen=True)
class Signature:
    p: int
    s: int

    def __post_init__(self) -> None:
        for name in ("p", "s"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise SignatureError(f"{name} must be an integer, got {v!r}")
            if v < 0:
                raise SignatureError(f"{name} must be non-negative, got {v}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "s", int(self.s))
        if 2 * self.p + self.s < 1:
            raise SignatureError("2p + s must be at least 1")

    @property
    def order(self) -> int:
        """Number of vertices of a member, 2p + s."""
        return 2 * self.p + self.s

    @property
    def width(self) -> int:
        """Number of edges a member touches, p + s."""
        return self.p + self.s

    def check(self, n: int) -> None:
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise SignatureError(f"n must be a positive integer, got {n!r}")
        if self.p + self.s > n:
            raise SignatureError(f"p+s > n ({self.p}+{self.s} > {n})")

    def __str__(self) -> str:
        return f"({self.p},{self.s})"


def as_signature(sig: Signature | tuple[int, int]) -> Signature:
    if isinstance(sig, Signature):
        return sig
    p, s = sig
    return Signature(p, s)


@dataclass(frozen=True)
class MatchingGraph:
    """n disjoint edges ``e_i = {l_i, r_i}``."""

    n: int

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")

    @property
    def num_vertices(self) -> int:
        return 2 * self.n

    def vertices(self) -> range:
        return range(2 * self.n)

    def neighbour(self, slot: int) -> int:
        self._check_slot(slot)
        return slot ^ 1

    def edges(self) -> list[tuple[int, int]]:
        return [(2 * i, 2 * i + 1) for i in range(self.n)]

    def full_mask(self) -> int:
        return (1 << (2 * self.n)) - 1

    def _check_slot(self, slot: int) -> None:
        if not 0 <= slot < 2 * self.n:
            raise ValueError(f"vertex slot {slot} outside M_{self.n}")


def vertex_slot(edge: int, side: str) -> int:
    """Slot of ``l_edge`` / ``r_edge`` (edge is 1-based)."""
    if edge < 1:
        raise ValueError(f"edge index must be >= 1, got {edge}")
    side = side.lower()
    if side not in ("l", "r"):
        raise ValueError(f"side must be 'l' or 'r', got {side!r}")
    return 2 * (edge - 1) + (side == "r")


def parse_vertex(token: str, n: int | None = None) -> int:
    m = _TOKEN.match(str(token))
    if not m:
        raise ValueError(f"cannot parse vertex {token!r}; expected e.g. 'l3' or 'r3'")
    slot = vertex_slot(int(m.group(2)), m.group(1))
    if n is not None and slot >= 2 * n:
        raise ValueError(f"vertex {token!r} is not in M_{n}")
    return slot


def vertex_name(slot: int) -> str:
    return f"{'lr'[slot & 1]}{slot // 2 + 1}"


@dataclass(frozen=True, order=True)
class Subgraph:
    """A member of some H^(p,s)(n), identified with its vertex set."""

    n: int
    mask: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.mask < 0 or self.mask >> (2 * self.n):
            raise ValueError(f"mask {self.mask:#x} does not fit in M_{self.n}")
        object.__setattr__(self, "mask", int(self.mask))

    @classmethod
    def from_vertices(cls, n: int, vertices: Iterable[int | str]) -> "Subgraph":
        mask = 0
        for v in vertices:
            slot = parse_vertex(v, n) if isinstance(v, str) else int(v)
            if not 0 <= slot < 2 * n:
                raise ValueError(f"vertex slot {slot} outside M_{n}")
            mask |= 1 << slot
        return cls(n, mask)

    @classmethod
    def parse(cls, text: str, n: int) -> "Subgraph":
        """Parse ``"l1 r1 l2"`` (commas or whitespace) into a subgraph."""
        tokens = [t for t in re.split(r"[\s,]+", text.strip()) if t]
        return cls.from_vertices(n, tokens)

    @property
    def full_edges(self) -> tuple[int, ...]:
        both = self.mask & (self.mask >> 1) & low_bits(self.n)
        return tuple(i + 1 for i in range(self.n) if both >> (2 * i) & 1)

    @property
    def singletons(self) -> tuple[int, ...]:
        """Slots of the isolated vertices."""
        out = []
        for i in range(self.n):
            pair = (self.mask >> (2 * i)) & 3
            if pair == 1:
                out.append(2 * i)
            elif pair == 2:
                out.append(2 * i + 1)
        return tuple(out)

    @property
    def signature(self) -> Signature:
        return Signature(len(self.full_edges), len(self.singletons))

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(i for i in range(2 * self.n) if self.mask >> i & 1)

    def __contains__(self, slot: object) -> bool:
        if isinstance(slot, str):
            slot = parse_vertex(slot, self.n)
        return isinstance(slot, int) and 0 <= slot < 2 * self.n and bool(self.mask >> slot & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def tokens(self) -> list[str]:
        return [vertex_name(v) for v in self.vertices]

    def to_dict(self) -> dict:
        return {"vertices": self.tokens(), "mask": hex(self.mask)}

    def __str__(self) -> str:
        return " ".join(self.tokens())


# -- counting -------------------------------------------------------------


def _checked(n: int, sig: Signature | tuple[int, int]) -> Signature:
    sig = as_signature(sig)
    sig.check(n)
    return sig


def family_size(n: int, sig: Signature | tuple[int, int]) -> int:
    """|H^(p,s)(n)| = C(n,p) C(n-p,s) 2^s."""
    sig = _checked(n, sig)
    return math.comb(n, sig.p) * math.comb(n - sig.p, sig.s) * 2**sig.s


def star_size(n: int, sig: Signature | tuple[int, int]) -> int:
    """Size of the star at any vertex, (2p+s)(n-1)!/(p! s! (n-p-s)!) 2^(s-1)."""
    sig = _checked(n, sig)
    p, s = sig.p, sig.s
    num = (2 * p + s) * math.factorial(n - 1) * 2**s
    den = 2 * math.factorial(p) * math.factorial(s) * math.factorial(n - p - s)
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"star size not integral for n={n}, sig={sig}")
    return q


def star_size_by_parts(n: int, sig: Signature | tuple[int, int]) -> int:
    """Star size as (members holding x in a full edge) + (holding x alone)."""
    sig = _checked(n, sig)
    p, s = sig.p, sig.s
    in_edge = math.comb(n - 1, p - 1) * math.comb(n - p, s) * 2**s if p >= 1 else 0
    alone = math.comb(n - 1, p) * math.comb(n - p - 1, s - 1) * 2 ** (s - 1) if s >= 1 else 0
    return in_edge + alone


def identity_check(n: int, sig: Signature | tuple[int, int]) -> bool:
    sig = _checked(n, sig)
    return 2 * n * star_size(n, sig) == sig.order * family_size(n, sig)


# -- enumeration -----------------------------------------------------------


def _ascending_masks(edge: int, p: int, s: int, prefix: int) -> Iterator[int]:
    # Higher edges are more significant, and per edge the states are tried as
    # none < l < r < both, so masks come out in ascending order.
    if edge < 0:
        yield prefix
        return
    shift = 2 * edge
    if p + s <= edge:
        yield from _ascending_masks(edge - 1, p, s, prefix)
    if s:
        yield from _ascending_masks(edge - 1, p, s - 1, prefix | 1 << shift)
        yield from _ascending_masks(edge - 1, p, s - 1, prefix | 2 << shift)
    if p:
        yield from _ascending_masks(edge - 1, p - 1, s, prefix | 3 << shift)


def _check_enumerable(n: int) -> None:
    if n > MAX_ENUM_N:
        raise CapacityError(f"enumeration supports n <= {MAX_ENUM_N}, got n={n}")


def iter_masks(n: int, sig: Signature | tuple[int, int]) -> Iterator[int]:
    sig = _checked(n, sig)
    _check_enumerable(n)
    return _ascending_masks(n - 1, sig.p, sig.s, 0)


def enumerate_family(n: int, sig: Signature | tuple[int, int]) -> Iterator[Subgraph]:
    """Yield every member of H^(p,s)(n) once, by ascending mask."""
    for m in iter_masks(n, sig):
        yield Subgraph(n, m)


def family_masks(n: int, sig: Signature | tuple[int, int]) -> np.ndarray:
    """Sorted ``int64`` array of all member masks."""
    sig = _checked(n, sig)
    _check_enumerable(n)
    count = family_size(n, sig)
    return np.fromiter(_ascending_masks(n - 1, sig.p, sig.s, 0), dtype=np.int64, count=count)


def family_list(n: int, sig: Signature | tuple[int, int]) -> list[Subgraph]:
    return list(enumerate_family(n, sig))


# -- intersection ----------------------------------------------------------


def _same_n(a: Subgraph, b: Subgraph) -> None:
    if a.n != b.n:
        raise ValueError(f"subgraphs live in different graphs (n={a.n} vs n={b.n})")


def intersects(F: Subgraph, G: Subgraph) -> bool:
    _same_n(F, G)
    return bool(F.mask & G.mask)


def is_intersecting_family(family: Sequence[Subgraph]) -> bool:
    if not family:
        return True
    first = family[0]
    for F in family[1:]:
        _same_n(first, F)
    masks = [F.mask for F in family]
    for i, a in enumerate(masks):
        if not a:
            return False
        for b in masks[i + 1:]:
            if not a & b:
                return False
    return True


def first_disjoint_pair(family: Sequence[Subgraph]) -> tuple[Subgraph, Subgraph] | None:
    for i, a in enumerate(family):
        for b in family[i + 1:]:
            if not a.mask & b.mask:
                return a, b
    return None


def complement(F: Subgraph, n: int | None = None) -> Subgraph:
    """The subgraph induced on V(M_n) minus V(F)."""
    if n is not None and n != F.n:
        raise ValueError(f"subgraph lives in M_{F.n}, not M_{n}")
    return Subgraph(F.n, MatchingGraph(F.n).full_mask() ^ F.mask)


def masks_to_family(n: int, masks: Iterable[int]) -> list[Subgraph]:
    return [Subgraph(n, int(m)) for m in masks]

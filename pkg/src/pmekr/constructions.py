"""Stars, vertex-avoiding families, and family files."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

import numpy as np

from .matching import (
    MatchingGraph,
    Subgraph,
    as_signature,
    family_masks,
    iter_masks,
    parse_vertex,
)


def _slot(x: int | str, n: int) -> int:
    slot = parse_vertex(x, n) if isinstance(x, str) else int(x)
    MatchingGraph(n)._check_slot(slot)
    return slot


def star_family(n: int, sig, x: int | str) -> list[Subgraph]:
    """Every member containing the vertex ``x`` (slot or token such as ``"l3"``)."""
    sig = as_signature(sig)
    bit = 1 << _slot(x, n)
    return [Subgraph(n, m) for m in iter_masks(n, sig) if m & bit]


def avoid_vertex_family(n: int, sig, x: int | str) -> list[Subgraph]:
    """Every member missing the vertex ``x``."""
    sig = as_signature(sig)
    bit = 1 << _slot(x, n)
    return [Subgraph(n, m) for m in iter_masks(n, sig) if not m & bit]


def random_maximal_intersecting(n: int, sig, seed: int | np.random.Generator) -> list[Subgraph]:
    """Greedy maximal intersecting family over a seeded random member order.

    Every rejected member missed some member already kept, so the result
    cannot be extended.
    """
    rng = np.random.default_rng(seed)
    masks = family_masks(n, sig)
    kept: list[int] = []
    for m in masks[rng.permutation(masks.size)].tolist():
        if all(m & k for k in kept):
            kept.append(m)
    return [Subgraph(n, m) for m in sorted(kept)]


def is_maximal_intersecting(family: Iterable[Subgraph], n: int, sig) -> bool:
    fam = {F.mask for F in family}
    if any(not a & b for a in fam for b in fam):
        return False
    return all(m in fam or any(not m & f for f in fam) for m in iter_masks(n, sig))


def named_family(spec: str, n: int, sig) -> list[Subgraph]:
    """Build ``star:<v>``, ``avoid:<v>`` or ``random:<seed>``."""
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "star":
        return star_family(n, sig, arg.strip())
    if kind == "avoid":
        return avoid_vertex_family(n, sig, arg.strip())
    if kind == "random":
        try:
            seed = int(arg)
        except ValueError:
            raise ValueError(f"random family needs an integer seed, got {arg!r}") from None
        return random_maximal_intersecting(n, sig, seed)
    raise ValueError(f"unknown family {spec!r}; expected star:<vertex>, avoid:<vertex> or random:<seed>")


def format_family(family: Iterable[Subgraph]) -> str:
    return "".join(" ".join(F.tokens()) + "\n" for F in sorted(family, key=lambda F: F.mask))


def write_family_file(path: str | Path, family: Iterable[Subgraph]) -> None:
    Path(path).write_text(format_family(family))


def parse_family(text: str, n: int) -> list[Subgraph]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(Subgraph.parse(line, n))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return out


def read_family_file(path: str | Path, n: int) -> list[Subgraph]:
    return parse_family(Path(path).read_text(), n)

"""Exact maximum intersecting families via maximum independent sets.

Members of a family are vertices of the *disjointness graph* (adjacent when
vertex-disjoint), so intersecting families are exactly its independent sets.
The search runs as a maximum clique search in the complement, the
intersection graph, with greedy clique covers of the disjointness graph as
colour bounds (see :mod:`pmekr.kernels`).
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .matching import (
    CapacityError,
    Subgraph,
    as_signature,
    family_masks,
    family_size,
    star_size,
    vertex_name,
)

log = logging.getLogger(__name__)

SOLVER_CAP = 6000

_STATUS = {
    kernels.STATUS_DONE: "done",
    kernels.STATUS_NODE_LIMIT: "node_limit",
    kernels.STATUS_TIME_LIMIT: "time_limit",
    kernels.STATUS_CAP: "cap",
}


@dataclass
class DisjointnessGraph:
    masks: list[int]
    disjoint: list[int]
    vertex_transitive: bool = False

    @property
    def size(self) -> int:
        return len(self.masks)

    def degree(self, i: int) -> int:
        return self.disjoint[i].bit_count()

    def degrees(self) -> list[int]:
        return [d.bit_count() for d in self.disjoint]

    def neighbours(self, i: int) -> list[int]:
        d = self.disjoint[i]
        return [j for j in range(self.size) if d >> j & 1]

    @property
    def edge_count(self) -> int:
        return sum(self.degrees()) // 2

    @property
    def edgeless(self) -> bool:
        return not any(self.disjoint)

    def intersecting(self) -> list[int]:
        full = (1 << self.size) - 1
        return [full & ~d & ~(1 << i) for i, d in enumerate(self.disjoint)]

    def is_independent(self, indices: Sequence[int]) -> bool:
        sel = 0
        for i in indices:
            sel |= 1 << i
        return all(not (self.disjoint[i] & sel) for i in indices)


def graph_from_masks(masks: Sequence[int], *, vertex_transitive: bool = False, cap: int = SOLVER_CAP) -> DisjointnessGraph:
    masks = [int(m) for m in masks]
    N = len(masks)
    if N > cap:
        raise CapacityError(f"family of {N} members exceeds the solver cap of {cap}")
    disjoint = []
    if N and max(masks) < 1 << 62:
        arr = np.array(masks, dtype=np.int64)
        for m in arr:
            row = (arr & m) == 0
            disjoint.append(int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little"))
    else:
        for a in masks:
            row = 0
            for j, b in enumerate(masks):
                if not a & b:
                    row |= 1 << j
            disjoint.append(row)
    return DisjointnessGraph(masks, disjoint, vertex_transitive)


def build_disjointness_graph(n: int, sig, cap: int = SOLVER_CAP) -> DisjointnessGraph:
    sig = as_signature(sig)
    sig.check(n)
    size = family_size(n, sig)
    if size > cap:
        raise CapacityError(f"|H^{sig}({n})| = {size} exceeds the solver cap of {cap}")
    return graph_from_masks(family_masks(n, sig).tolist(), vertex_transitive=True, cap=cap)


# -- root splitting ----------------------------------------------------------
# Subproblem i forces vertex i as the lowest-indexed member of the clique, so
# the subproblems partition the search space and their union equals a serial
# run.  Workers get the adjacency lists once through the pool initializer.

_WORKER: dict = {}


def _init_worker(gadj: list[int], dadj: list[int]) -> None:
    _WORKER["gadj"] = gadj
    _WORKER["dadj"] = dadj


def _root_candidates(gadj: list[int], i: int) -> int:
    return gadj[i] >> (i + 1) << (i + 1)


def _solve_root(args: tuple) -> tuple[int, dict]:
    i, best0, enum_target, cap, node_limit, time_limit = args
    gadj = _WORKER["gadj"]
    res = kernels.clique_search(
        gadj,
        _WORKER["dadj"],
        _root_candidates(gadj, i),
        depth0=1,
        best0=best0,
        enumerate_target=enum_target,
        cap=cap,
        node_limit=node_limit,
        time_limit=time_limit,
    )
    return i, res


def _split_roots(gadj, dadj, jobs: int, tasks: list[tuple]) -> list[tuple[int, dict]]:
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(gadj, dadj)) as ex:
        return list(ex.map(_solve_root, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _merge_status(results: list[dict]) -> int:
    codes = {r["status"] for r in results}
    for code in (kernels.STATUS_TIME_LIMIT, kernels.STATUS_NODE_LIMIT, kernels.STATUS_CAP):
        if code in codes:
            return code
    return kernels.STATUS_DONE


# -- solver ----------------------------------------------------------------


@dataclass
class SearchResult:
    size: int
    witness: list[int]
    exact: bool
    nodes: int
    seconds: float
    status: str


def maximum_independent_set(
    graph: DisjointnessGraph,
    *,
    initial: Sequence[int] | None = None,
    node_limit: int = 0,
    time_limit: float = 0.0,
    symmetry: bool = False,
    jobs: int = 1,
) -> SearchResult:
    """Exact maximum independent set, optionally seeded with a known one.

    ``symmetry`` pins the first vertex into the solution, which is sound only
    for vertex-transitive graphs; it is off by default.  ``jobs > 1`` splits
    the search at the root across processes; the size found is the same.
    """
    t0 = time.perf_counter()
    N = graph.size
    best_set = list(initial or [])
    if best_set and not graph.is_independent(best_set):
        raise ValueError("initial solution is not an independent set")
    if N == 0:
        return SearchResult(0, [], True, 0, 0.0, "done")
    if graph.edgeless:
        return SearchResult(N, list(range(N)), True, 0, time.perf_counter() - t0, "done")
    gadj = graph.intersecting()
    dadj = graph.disjoint
    if symmetry and not graph.vertex_transitive:
        raise ValueError("symmetry reduction needs a vertex-transitive graph")
    if jobs > 1 and not symmetry:
        b0 = len(best_set)
        tasks = [
            (i, b0, None, 0, node_limit, time_limit)
            for i in range(N)
            if _root_candidates(gadj, i).bit_count() + 1 > b0
        ]
        outs = _split_roots(gadj, dadj, jobs, tasks)
        for i, r in outs:
            if r["best"] > len(best_set):
                s = r["best_set"]
                best_set = [i] + [j for j in range(N) if s >> j & 1]
        status = _STATUS[_merge_status([r for _, r in outs])]
        nodes = sum(r["nodes"] for _, r in outs)
        return SearchResult(
            len(best_set), sorted(best_set), status == "done", nodes, time.perf_counter() - t0, status
        )
    if symmetry:
        forced = [0]
        cand = gadj[0]
    else:
        forced = []
        cand = (1 << N) - 1
    res = kernels.clique_search(
        gadj,
        dadj,
        cand,
        depth0=len(forced),
        best0=len(best_set),
        node_limit=node_limit,
        time_limit=time_limit,
    )
    if res["best"] > len(best_set):
        s = res["best_set"]
        best_set = forced + [i for i in range(N) if s >> i & 1]
    status = _STATUS[res["status"]]
    return SearchResult(
        len(best_set), sorted(best_set), status == "done", res["nodes"], time.perf_counter() - t0, status
    )


def enumerate_maximum_independent_sets(
    graph: DisjointnessGraph,
    size: int,
    cap: int,
    *,
    node_limit: int = 0,
    time_limit: float = 0.0,
    jobs: int = 1,
) -> tuple[list[list[int]], bool, int]:
    """All independent sets of exactly ``size`` (assumed maximum), up to ``cap``.

    Returns ``(sets, complete, nodes)``; ``complete`` is false when the cap or
    a limit cut the enumeration short.  With ``jobs > 1`` the sets come back
    in ascending order of their sorted index lists.
    """
    N = graph.size
    if graph.edgeless:
        sets = [list(range(N))] if size == N else []
        return sets[:cap], len(sets) <= cap, 0
    if jobs > 1:
        gadj = graph.intersecting()
        tasks = [
            (i, 0, size, cap, node_limit, time_limit)
            for i in range(N)
            if _root_candidates(gadj, i).bit_count() + 1 >= size
        ]
        outs = _split_roots(gadj, graph.disjoint, jobs, tasks)
        sets = sorted([i] + [j for j in range(N) if c >> j & 1] for i, r in outs for c in r["cliques"])
        status = _merge_status([r for _, r in outs])
        complete = status == kernels.STATUS_DONE and len(sets) <= cap
        return sets[:cap], complete, sum(r["nodes"] for _, r in outs)
    res = kernels.clique_search(
        graph.intersecting(),
        graph.disjoint,
        (1 << N) - 1,
        enumerate_target=size,
        cap=cap,
        node_limit=node_limit,
        time_limit=time_limit,
    )
    sets = sorted([i for i in range(N) if c >> i & 1] for c in res["cliques"])
    return sets, res["status"] == kernels.STATUS_DONE, res["nodes"]


# -- families of M_n ---------------------------------------------------------


@dataclass
class MaxResult:
    size: int
    witness: list[Subgraph]
    exact: bool
    nodes: int
    seconds: float
    status: str


def _star_indices(graph: DisjointnessGraph, slot: int) -> list[int]:
    return [i for i, m in enumerate(graph.masks) if m >> slot & 1]


def max_intersecting(
    n: int,
    sig,
    *,
    graph: DisjointnessGraph | None = None,
    initial: str = "star",
    node_limit: int = 0,
    time_limit: float = 0.0,
    symmetry: bool = False,
    jobs: int = 1,
) -> MaxResult:
    """Largest intersecting subfamily of H^(p,s)(n) with one witness.

    ``initial="star"`` seeds the search with the star at ``l_1``;
    ``initial="none"`` starts from nothing.
    """
    sig = as_signature(sig)
    g = graph or build_disjointness_graph(n, sig)
    seed = _star_indices(g, 0) if initial == "star" else None
    if initial not in ("star", "none"):
        raise ValueError("initial must be 'star' or 'none'")
    res = maximum_independent_set(
        g, initial=seed, node_limit=node_limit, time_limit=time_limit, symmetry=symmetry, jobs=jobs
    )
    witness = [Subgraph(n, g.masks[i]) for i in res.witness]
    return MaxResult(res.size, witness, res.exact, res.nodes, res.seconds, res.status)


def default_cap(n: int) -> int:
    return 10 * 2 * n


def all_maximum_families(
    n: int,
    sig,
    cap: int | None = None,
    *,
    size: int | None = None,
    graph: DisjointnessGraph | None = None,
    node_limit: int = 0,
    time_limit: float = 0.0,
) -> tuple[list[list[Subgraph]], bool]:
    sig = as_signature(sig)
    g = graph or build_disjointness_graph(n, sig)
    if size is None:
        mr = max_intersecting(n, sig, graph=g)
        if not mr.exact:
            return [mr.witness], False
        size = mr.size
    cap = default_cap(n) if cap is None else cap
    sets, complete, _ = enumerate_maximum_independent_sets(g, size, cap, node_limit=node_limit, time_limit=time_limit)
    return [[Subgraph(n, g.masks[i]) for i in s] for s in sets], complete


@dataclass(frozen=True)
class StarStatus:
    kind: str  # "star", "sub-star" or "absent"
    center: int | None = None
    centers: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.kind == "star"

    def describe(self) -> str:
        if self.kind == "star":
            return f"star at {vertex_name(self.center)}"
        if self.kind == "sub-star":
            return "sub-star of " + ", ".join(vertex_name(c) for c in self.centers)
        return "absent"


def is_star(family: Sequence[Subgraph], n: int | None = None) -> StarStatus:
    """Whether a family is a full star, part of one, or neither."""
    if not family:
        return StarStatus("absent")
    n = family[0].n if n is None else n
    sigs = {F.signature for F in family}
    if len(sigs) != 1 or any(F.n != n for F in family):
        raise ValueError("family mixes signatures or graphs")
    sig = sigs.pop()
    common = -1
    for F in family:
        common &= F.mask
    centers = tuple(i for i in range(2 * n) if common >> i & 1)
    if not centers:
        return StarStatus("absent")
    if len({F.mask for F in family}) == star_size(n, sig):
        return StarStatus("star", centers[0], centers)
    return StarStatus("sub-star", None, centers)


def masks_star_center(masks: Sequence[int], star_masks_by_vertex: dict[int, set[int]]) -> int | None:
    """Vertex whose star equals ``masks`` exactly, if any."""
    got = set(masks)
    for v, star in star_masks_by_vertex.items():
        if got == star:
            return v
    return None


# -- verdicts ------------------------------------------------------------------


@dataclass
class EkrVerdict:
    instance: dict
    family_size: int
    star_size: int
    max_size: int
    exact: bool
    ekr: bool | None
    strongly_ekr: bool | None
    degenerate: bool
    maximum_families_found: int
    enumeration_complete: bool
    witnesses: list[list[Subgraph]] = field(default_factory=list)
    non_star_witness: list[Subgraph] | None = None
    nodes: int = 0
    seconds: float = 0.0
    status: str = "done"
    notes: list[str] = field(default_factory=list)

    def to_row(self) -> dict:
        row = dict(self.instance)
        row.update(
            family_size=self.family_size,
            star_size=self.star_size,
            max_intersecting=self.max_size,
            exact=self.exact,
            ekr=_tri(self.ekr),
            strongly_ekr=_tri(self.strongly_ekr),
            degenerate=self.degenerate,
            maximum_families_found=self.maximum_families_found,
            enumeration_complete=self.enumeration_complete,
            nodes=self.nodes,
            status=self.status,
        )
        return row

    def to_dict(self, max_witnesses: int = 2, timings: bool = False) -> dict:
        d = self.to_row()
        d["witnesses"] = [[" ".join(F.tokens()) for F in W] for W in self.witnesses[:max_witnesses]]
        d["non_star_witness"] = (
            None if self.non_star_witness is None else [" ".join(F.tokens()) for F in self.non_star_witness]
        )
        d["notes"] = list(self.notes)
        if timings:
            d["seconds"] = round(self.seconds, 6)
        return d


def _tri(v: bool | None) -> str:
    return "unknown" if v is None else ("true" if v else "false")


def verdict_from_graph(
    graph: DisjointnessGraph,
    n_items: int,
    star: int,
    is_star_fn,
    *,
    instance: dict,
    cap: int,
    node_limit: int = 0,
    time_limit: float = 0.0,
    symmetry: bool = False,
    seed: Sequence[int] | None = None,
    wrap=None,
    jobs: int = 1,
) -> EkrVerdict:
    """Shared verdict logic for any vertex-set family given as a graph.

    ``is_star_fn`` maps a list of member indices to True when it is a star;
    ``wrap`` turns a mask into a member object (defaults to :class:`Subgraph`).
    """
    if wrap is None:
        def wrap(mask):
            return Subgraph(n_items, mask)
    t0 = time.perf_counter()
    degenerate = graph.edgeless
    res = maximum_independent_set(
        graph, initial=seed, node_limit=node_limit, time_limit=time_limit, symmetry=symmetry, jobs=jobs
    )
    notes = []
    if degenerate:
        notes.append("no two members are disjoint; the whole family is intersecting")
    nodes = res.nodes
    found: list[list[int]] = []
    complete = False
    strongly: bool | None = None
    non_star = None
    if res.exact:
        ekr: bool | None = res.size == star
        remaining = max(0.0, time_limit - (time.perf_counter() - t0)) if time_limit else 0.0
        if time_limit and remaining == 0.0:
            remaining = 1e-9
        found, complete, enodes = enumerate_maximum_independent_sets(
            graph, res.size, cap, node_limit=node_limit, time_limit=remaining, jobs=jobs
        )
        nodes += enodes
        flags = [is_star_fn(s) for s in found]
        if not ekr:
            strongly = False
        elif not all(flags):
            strongly = False
        elif complete:
            strongly = True
        else:
            strongly = None
            notes.append("enumeration of maximum families stopped at the cap")
        for s, ok in zip(found, flags):
            if not ok:
                non_star = s
                break
    else:
        ekr = False if res.size > star else None
        strongly = False if ekr is False else None
        notes.append(f"search stopped early ({res.status}); max_size is a lower bound")
        found = [res.witness]
    return EkrVerdict(
        instance=instance,
        family_size=graph.size,
        star_size=star,
        max_size=res.size,
        exact=res.exact,
        ekr=ekr,
        strongly_ekr=strongly,
        degenerate=degenerate,
        maximum_families_found=len(found) if res.exact else 0,
        enumeration_complete=complete,
        witnesses=[[wrap(graph.masks[i]) for i in s] for s in found],
        non_star_witness=None if non_star is None else [wrap(graph.masks[i]) for i in non_star],
        nodes=nodes,
        seconds=time.perf_counter() - t0,
        status=res.status,
        notes=notes,
    )


def ekr_verdict(
    n: int,
    sig,
    cap: int | None = None,
    *,
    node_limit: int = 0,
    time_limit: float = 0.0,
    symmetry: bool = False,
    graph: DisjointnessGraph | None = None,
    jobs: int = 1,
) -> EkrVerdict:
    """EKR and strong-EKR status of H^(p,s)(n), decided by exhaustive search."""
    sig = as_signature(sig)
    sig.check(n)
    g = graph or build_disjointness_graph(n, sig)
    star = star_size(n, sig)
    stars = {v: {i for i, m in enumerate(g.masks) if m >> v & 1} for v in range(2 * n)}

    def is_star_indices(indices):
        got = set(indices)
        return any(got == st for st in stars.values())

    v = verdict_from_graph(
        g,
        n,
        star,
        is_star_indices,
        instance={"n": n, "p": sig.p, "s": sig.s},
        cap=default_cap(n) if cap is None else cap,
        node_limit=node_limit,
        time_limit=time_limit,
        symmetry=symmetry,
        seed=sorted(stars[0]),
        jobs=jobs,
    )
    log.info(
        "H^(%d,%d)(%d): max=%d star=%d ekr=%s strong=%s (%.2fs)",
        sig.p, sig.s, n, v.max_size, star, v.ekr, v.strongly_ekr, v.seconds,
    )
    return v

"""Slow reference implementations, written without the package's machinery.

Vertices here are plain strings like ``"l3"``; families are sets of
frozensets.  Nothing in this file imports :mod:`pmekr`.
"""

from __future__ import annotations

import itertools
import math

import networkx as nx


def vertex_set(n: int) -> list[str]:
    return [f"{side}{e}" for e in range(1, n + 1) for side in "lr"]


def brute_family(n: int, p: int, s: int) -> set[frozenset[str]]:
    """Filter every vertex subset of M_n by its induced structure."""
    verts = vertex_set(n)
    out = set()
    for r in range(len(verts) + 1):
        if r != 2 * p + s:
            continue
        for combo in itertools.combinations(verts, r):
            chosen = set(combo)
            full = sum(1 for e in range(1, n + 1) if f"l{e}" in chosen and f"r{e}" in chosen)
            single = sum(1 for e in range(1, n + 1) if (f"l{e}" in chosen) != (f"r{e}" in chosen))
            if full == p and single == s:
                out.add(frozenset(chosen))
    return out


def to_mask(member) -> int:
    m = 0
    for v in member:
        e = int(v[1:])
        m |= 1 << (2 * (e - 1) + (v[0] == "r"))
    return m


def star(family, x: str):
    return {F for F in family if x in F}


def vertex_sequence(sigma, tau) -> list[str]:
    seq = []
    for e, t in zip(sigma, tau):
        pair = [f"l{e}", f"r{e}"]
        if t:
            pair.reverse()
        seq.extend(pair)
    return seq


def b_interval(sigma, tau, i: int, p: int, s: int) -> frozenset[str]:
    """Walk 2(p+s) vertices from position i and drop the second vertex of the last s edges."""
    n = len(sigma)
    seq = vertex_sequence(sigma, tau)
    out = set()
    for t in range(p + s):
        a = seq[(2 * (i - 1 + t)) % (2 * n)]
        b = seq[(2 * (i - 1 + t) + 1) % (2 * n)]
        out.add(a)
        if t < p:
            out.add(b)
    return frozenset(out)


def r_interval(sigma, tau, i: int, p: int, s: int) -> frozenset[str]:
    """Drop the first vertex of the first s edges."""
    n = len(sigma)
    seq = vertex_sequence(sigma, tau)
    out = set()
    for t in range(p + s):
        a = seq[(2 * (i - 1 + t)) % (2 * n)]
        b = seq[(2 * (i - 1 + t) + 1) % (2 * n)]
        out.add(b)
        if t >= s:
            out.add(a)
    return frozenset(out)


def all_orders(n: int, restricted: bool):
    """Canonical orders: sigma(n) = n; restricted also fixes tau_n = 0."""
    for perm in itertools.permutations(range(1, n)):
        sigma = perm + (n,)
        for bits in itertools.product((0, 1), repeat=n - 1 if restricted else n):
            tau = bits + (0,) if restricted else bits
            yield sigma, tau


def realised(sigma, tau, family, p, s):
    n = len(sigma)
    B = [b_interval(sigma, tau, i, p, s) for i in range(1, n + 1)]
    R = [r_interval(sigma, tau, i, p, s) for i in range(1, n + 1)]
    bpos = {i + 1 for i, F in enumerate(B) if F in family}
    rpos = {i + 1 for i, F in enumerate(R) if F in family}
    members = {B[i - 1] for i in bpos} | {R[i - 1] for i in rpos}
    return bpos, rpos, members


def k_stat(sigma, tau, family, p, s):
    """Fewest shared edges between two realised B-intervals (p+s if just one)."""
    bpos, _, _ = realised(sigma, tau, family, p, s)
    if not bpos:
        return None
    if len(bpos) == 1:
        return p + s
    n = len(sigma)
    spans = [{sigma[(i - 1 + t) % n] for t in range(p + s)} for i in bpos]
    return min(len(a & b) for a, b in itertools.combinations(spans, 2))


def intersection_graph(family) -> nx.Graph:
    members = sorted(family, key=lambda F: sorted(F))
    g = nx.Graph()
    g.add_nodes_from(range(len(members)))
    for i, j in itertools.combinations(range(len(members)), 2):
        if members[i] & members[j]:
            g.add_edge(i, j)
    return g, members


def maximum_intersecting(family) -> tuple[int, list[set]]:
    """Size and all maximum intersecting subfamilies, via maximal cliques."""
    g, members = intersection_graph(family)
    cliques = list(nx.find_cliques(g))
    best = max(len(c) for c in cliques)
    return best, [{members[i] for i in c} for c in cliques if len(c) == best]


def signature_family_raw(m: int, n: int, counts: tuple[int, ...]) -> int:
    """Count vertex subsets of m disjoint K_n with the given clique-size histogram."""
    total = 0
    for sizes in itertools.product(range(n + 1), repeat=m):
        hist = [sizes.count(i) for i in range(1, n + 1)]
        padded = list(counts) + [0] * (n - len(counts))
        if hist == padded[:n]:
            total += math.prod(math.comb(n, k) for k in sizes)
    return total

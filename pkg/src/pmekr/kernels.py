"""Hot loops, each with a numba path and a numpy / pure Python fallback.

Public wrappers dispatch on :func:`pmekr._accel.use_numba`.  Both paths of a
kernel return identical results; the clique search even visits the same nodes
in the same order, which the test-suite checks.

Array conventions: an order batch is a pair ``sigma, tau`` of ``(M, n)``
integer arrays, ``sigma`` holding 0-based edge indices per position.  Interval
tables are ``(M, n)`` ``int64`` masks with column ``i`` the interval starting
at position ``i + 1``.
"""

from __future__ import annotations

import time

import numpy as np

from . import _accel
from ._accel import njit

if _accel.HAVE_NUMBA:
    import numba

_U1 = np.uint64(1)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit
def _popcount(x):
    x = np.uint64(x)
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return int((x * _H01) >> np.uint64(56))


@njit
def _lowbit(x):
    # index of the lowest set bit of a nonzero uint64
    return _popcount((x & (~x + _U1)) - _U1)


# -- interval tables --------------------------------------------------------


@njit
def _interval_tables_nb(sigma, tau, p, s):
    M, n = sigma.shape
    b = np.zeros((M, n), np.int64)
    r = np.zeros((M, n), np.int64)
    w = p + s
    for o in range(M):
        for i in range(n):
            bm = 0
            rm = 0
            for t in range(w):
                pos = (i + t) % n
                e2 = 2 * np.int64(sigma[o, pos])
                tt = np.int64(tau[o, pos])
                if t < p:
                    bm |= np.int64(3) << e2
                else:
                    bm |= np.int64(1) << (e2 + tt)
                if t < s:
                    rm |= np.int64(1) << (e2 + 1 - tt)
                else:
                    rm |= np.int64(3) << e2
            b[o, i] = bm
            r[o, i] = rm
    return b, r


def _interval_tables_np(sigma, tau, p, s):
    M, n = sigma.shape
    cols = np.arange(n)
    b = np.zeros((M, n), np.int64)
    r = np.zeros((M, n), np.int64)
    for t in range(p + s):
        pos = (cols + t) % n
        e2 = 2 * sigma[:, pos].astype(np.int64)
        tt = tau[:, pos].astype(np.int64)
        full = np.int64(3) << e2
        b |= full if t < p else np.int64(1) << (e2 + tt)
        r |= (np.int64(1) << (e2 + 1 - tt)) if t < s else full
    return b, r


def interval_tables(sigma: np.ndarray, tau: np.ndarray, p: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    """B- and R-interval masks for every order and starting position."""
    sigma = np.ascontiguousarray(sigma, dtype=np.int64)
    tau = np.ascontiguousarray(tau, dtype=np.int64)
    if sigma.shape != tau.shape or sigma.ndim != 2:
        raise ValueError("sigma and tau must be (M, n) arrays of equal shape")
    if 2 * sigma.shape[1] > 62:
        raise ValueError("interval tables support n <= 31")
    if _accel.use_numba():
        return _interval_tables_nb(sigma, tau, int(p), int(s))
    return _interval_tables_np(sigma, tau, int(p), int(s))


# -- family lookup ------------------------------------------------------------


@njit
def _lookup_nb(table, family):
    out = np.empty(table.shape, np.int64)
    flat = table.ravel()
    res = out.ravel()
    m = family.shape[0]
    for j in range(flat.shape[0]):
        x = flat[j]
        lo = 0
        hi = m
        while lo < hi:
            mid = (lo + hi) >> 1
            if family[mid] < x:
                lo = mid + 1
            else:
                hi = mid
        res[j] = lo if lo < m and family[lo] == x else -1
    return out


def _lookup_np(table, family):
    if family.shape[0] == 0:
        return np.full(table.shape, -1, np.int64)
    pos = np.searchsorted(family, table)
    pos = np.minimum(pos, family.shape[0] - 1)
    return np.where(family[pos] == table, pos, -1).astype(np.int64)


def lookup(table: np.ndarray, family: np.ndarray) -> np.ndarray:
    """Index of each mask of ``table`` in the sorted ``family`` array, else -1."""
    table = np.ascontiguousarray(table, dtype=np.int64)
    family = np.ascontiguousarray(family, dtype=np.int64)
    if family.shape[0] > 1 and np.any(family[1:] <= family[:-1]):
        raise ValueError("family masks must be strictly increasing")
    if _accel.use_numba():
        return _lookup_nb(table, family)
    return _lookup_np(table, family)


# -- per-order statistics ------------------------------------------------------


@njit
def _order_stats_nb(b, r, bidx, ridx, low, p, s):
    M, n = b.shape
    count = np.zeros(M, np.int64)
    bset = np.zeros(M, np.int64)
    rset = np.zeros(M, np.int64)
    kstat = np.zeros(M, np.int64)
    common = np.zeros(M, np.int64)
    seen = np.empty(2 * n, np.int64)
    for o in range(M):
        c = 0
        acc = np.int64(-1)
        bs = 0
        rs = 0
        for i in range(n):
            if bidx[o, i] >= 0:
                bs |= 1 << i
                m = b[o, i]
                acc &= m
                dup = False
                for j in range(c):
                    if seen[j] == m:
                        dup = True
                        break
                if not dup:
                    seen[c] = m
                    c += 1
        nb_distinct = c
        for i in range(n):
            if ridx[o, i] >= 0:
                rs |= 1 << i
                m = r[o, i]
                acc &= m
                dup = False
                for j in range(c):
                    if seen[j] == m:
                        dup = True
                        break
                if not dup:
                    seen[c] = m
                    c += 1
        count[o] = c
        bset[o] = bs
        rset[o] = rs
        common[o] = acc if c > 0 else 0
        if nb_distinct == 0:
            kstat[o] = 0
        elif nb_distinct == 1:
            kstat[o] = p + s
        else:
            best = 1 << 30
            for a in range(nb_distinct):
                sa = (seen[a] | (seen[a] >> 1)) & low
                for z in range(a + 1, nb_distinct):
                    sz = (seen[z] | (seen[z] >> 1)) & low
                    v = _popcount(sa & sz)
                    if v < best:
                        best = v
            kstat[o] = best
    return count, bset, rset, kstat, common


def _row_distinct(vals):
    # vals: (M, K) with 0 meaning "absent"; counts distinct nonzero per row
    srt = np.sort(vals, axis=1)
    fresh = np.ones(srt.shape, dtype=bool)
    fresh[:, 1:] = srt[:, 1:] != srt[:, :-1]
    return np.count_nonzero(fresh & (srt != 0), axis=1)


def _order_stats_np(b, r, bidx, ridx, low, p, s):
    M, n = b.shape
    bhit = bidx >= 0
    rhit = ridx >= 0
    weights = np.int64(1) << np.arange(n, dtype=np.int64)
    bset = (bhit * weights).sum(axis=1).astype(np.int64)
    rset = (rhit * weights).sum(axis=1).astype(np.int64)
    bv = np.where(bhit, b, 0)
    rv = np.where(rhit, r, 0)
    count = _row_distinct(np.concatenate([bv, rv], axis=1)).astype(np.int64)
    allones = np.int64(-1)
    acc = np.bitwise_and.reduce(np.where(bhit, b, allones), axis=1)
    acc &= np.bitwise_and.reduce(np.where(rhit, r, allones), axis=1)
    common = np.where(count > 0, acc, 0).astype(np.int64)

    nb_distinct = _row_distinct(bv)
    sup = (bv | (bv >> 1)) & np.int64(low)
    inter = np.bitwise_count(sup[:, :, None] & sup[:, None, :]).astype(np.int64)
    valid = bhit[:, :, None] & bhit[:, None, :] & (bv[:, :, None] != bv[:, None, :])
    big = np.int64(1 << 30)
    kmin = np.where(valid, inter, big).min(axis=(1, 2)) if n else np.full(M, big)
    kstat = np.where(nb_distinct == 0, 0, np.where(nb_distinct == 1, p + s, kmin)).astype(np.int64)
    return count, bset, rset, kstat, common


def order_stats(b, r, bidx, ridx, n: int, p: int, s: int) -> dict[str, np.ndarray]:
    """Realisation statistics of one family in a batch of orders.

    Returns arrays keyed ``count`` (distinct realised members), ``bset`` and
    ``rset`` (bit ``i`` set when the interval at position ``i + 1`` is a
    member), ``k`` (0 when no B-interval is realised) and ``common`` (AND of
    the realised masks, 0 when nothing is realised).
    """
    low = int("01" * n, 2)
    args = [np.ascontiguousarray(a, dtype=np.int64) for a in (b, r, bidx, ridx)]
    if _accel.use_numba():
        out = _order_stats_nb(*args, np.int64(low), int(p), int(s))
    else:
        out = _order_stats_np(*args, low, int(p), int(s))
    return dict(zip(("count", "bset", "rset", "k", "common"), out))


# -- clique search -----------------------------------------------------------
#
# Maximum clique in the intersection graph G (= maximum independent set in the
# disjointness graph D), Tomita-style: colour the candidates greedily, branch on
# the highest colour first, prune when |R| + colour cannot beat the incumbent.
# A colour class is a clique of D built by lookahead: start from the lowest
# candidate, then repeatedly add the D-neighbour that keeps the most D-common
# neighbours, ties to fewer remaining D-neighbours, then to the lower index.

STATUS_DONE = 0
STATUS_NODE_LIMIT = 1
STATUS_TIME_LIMIT = 2
STATUS_CAP = 3


@njit
def _colour_nb(P, dadj, order, cols):
    W = P.shape[0]
    U = P.copy()
    Q = np.empty(W, np.uint64)
    cnt = 0
    k = 0
    while True:
        v = -1
        for w in range(W):
            if U[w] != 0:
                v = w * 64 + _lowbit(U[w])
                break
        if v < 0:
            break
        k += 1
        U[v >> 6] &= ~(_U1 << np.uint64(v & 63))
        order[cnt] = v
        cols[cnt] = k
        cnt += 1
        live = False
        for x in range(W):
            Q[x] = U[x] & dadj[v, x]
            if Q[x] != 0:
                live = True
        while live:
            bc = -1
            bd = 0
            bu = -1
            for x in range(W):
                m = Q[x]
                while m != 0:
                    u = x * 64 + _lowbit(m)
                    m &= m - _U1
                    c = 0
                    d = 0
                    for y in range(W):
                        c += _popcount(Q[y] & dadj[u, y])
                        d += _popcount(U[y] & dadj[u, y])
                    if c > bc or (c == bc and d < bd):
                        bc = c
                        bd = d
                        bu = u
            U[bu >> 6] &= ~(_U1 << np.uint64(bu & 63))
            order[cnt] = bu
            cols[cnt] = k
            cnt += 1
            live = False
            for x in range(W):
                Q[x] &= dadj[bu, x]
                if Q[x] != 0:
                    live = True
    return cnt


if _accel.HAVE_NUMBA:

    @njit
    def _now():
        with numba.objmode(t="float64"):
            t = time.perf_counter()
        return t

else:  # pragma: no cover

    def _now():
        return time.perf_counter()


@njit
def _clique_search_nb(gadj, dadj, P0, depth0, best0, enum, target, cap, node_limit, deadline):
    N, W = gadj.shape
    # depth never exceeds the root colour count, so size the stacks by it
    root_order = np.zeros(N, np.int64)
    root_cols = np.zeros(N, np.int64)
    cnt0 = _colour_nb(P0, dadj, root_order, root_cols)
    maxd = 1
    if cnt0 > 0:
        maxd = root_cols[cnt0 - 1] + 1
    P = np.zeros((maxd + 1, W), np.uint64)
    order = np.zeros((maxd + 1, N), np.int64)
    cols = np.zeros((maxd + 1, N), np.int64)
    idx = np.zeros(maxd + 1, np.int64)
    rsel = np.zeros(maxd + 1, np.int64)
    found = np.zeros((max(cap, 1), W), np.uint64)
    nfound = 0
    best = best0
    best_set = np.zeros(W, np.uint64)
    for w in range(W):
        P[0, w] = P0[w]
    for j in range(cnt0):
        order[0, j] = root_order[j]
        cols[0, j] = root_cols[j]
    idx[0] = cnt0 - 1
    nodes = 1
    status = STATUS_DONE
    d = 0
    if cnt0 == 0:
        # no candidates: the forced part is the whole clique
        if enum:
            if depth0 == target and cap > 0:
                nfound = 1
            elif depth0 == target:
                status = STATUS_CAP
        elif depth0 > best:
            best = depth0
        return best, best_set, nodes, nfound, found, status
    while d >= 0:
        i = idx[d]
        if i < 0:
            d -= 1
            continue
        size = depth0 + d
        c = cols[d, i]
        if enum:
            if size + c < target:
                idx[d] = -1
                continue
        elif size + c <= best:
            idx[d] = -1
            continue
        v = order[d, i]
        idx[d] = i - 1
        rsel[d] = v
        empty = True
        for w in range(W):
            P[d + 1, w] = P[d, w] & gadj[v, w]
            if P[d + 1, w] != 0:
                empty = False
        P[d, v >> 6] &= ~(_U1 << np.uint64(v & 63))
        if empty:
            if enum:
                if size + 1 == target:
                    if nfound >= cap:
                        status = STATUS_CAP
                        break
                    for j in range(d + 1):
                        u = rsel[j]
                        found[nfound, u >> 6] |= _U1 << np.uint64(u & 63)
                    nfound += 1
            elif size + 1 > best:
                best = size + 1
                for w in range(W):
                    best_set[w] = 0
                for j in range(d + 1):
                    u = rsel[j]
                    best_set[u >> 6] |= _U1 << np.uint64(u & 63)
            continue
        nodes += 1
        if node_limit > 0 and nodes > node_limit:
            status = STATUS_NODE_LIMIT
            break
        if deadline > 0.0 and (nodes & 1023) == 0:
            if _now() > deadline:
                status = STATUS_TIME_LIMIT
                break
        d += 1
        cnt = _colour_nb(P[d], dadj, order[d], cols[d])
        idx[d] = cnt - 1
    return best, best_set, nodes, nfound, found, status


def _colour_py(P, dadj):
    order = []
    cols = []
    U = P
    k = 0
    while U:
        low = U & -U
        v = low.bit_length() - 1
        U ^= low
        k += 1
        order.append(v)
        cols.append(k)
        Q = U & dadj[v]
        while Q:
            bc, bd, bu = -1, 0, -1
            m = Q
            while m:
                lb = m & -m
                u = lb.bit_length() - 1
                m ^= lb
                du = dadj[u]
                c = (Q & du).bit_count()
                dd = (U & du).bit_count()
                if c > bc or (c == bc and dd < bd):
                    bc, bd, bu = c, dd, u
            U &= ~(1 << bu)
            order.append(bu)
            cols.append(k)
            Q &= dadj[bu]
    return order, cols


def _clique_search_py(gadj, dadj, P0, depth0, best0, enum, target, cap, node_limit, deadline):
    best = best0
    best_set = 0
    found = []
    nodes = 1
    status = STATUS_DONE
    o0, c0 = _colour_py(P0, dadj)
    if not o0:
        if enum:
            if depth0 == target:
                if cap > 0:
                    found.append(0)
                else:
                    status = STATUS_CAP
        elif depth0 > best:
            best = depth0
        return best, best_set, nodes, found, status
    stackP = [P0]
    stackO = [o0]
    stackC = [c0]
    stackI = [len(o0) - 1]
    rsel = []
    d = 0
    while d >= 0:
        i = stackI[d]
        if i < 0:
            stackP.pop()
            stackO.pop()
            stackC.pop()
            stackI.pop()
            if rsel:
                rsel.pop()
            d -= 1
            continue
        size = depth0 + d
        c = stackC[d][i]
        if (enum and size + c < target) or (not enum and size + c <= best):
            stackI[d] = -1
            continue
        v = stackO[d][i]
        stackI[d] = i - 1
        child = stackP[d] & gadj[v]
        stackP[d] &= ~(1 << v)
        if not child:
            if enum:
                if size + 1 == target:
                    if len(found) >= cap:
                        status = STATUS_CAP
                        break
                    found.append(_bits_of(rsel) | 1 << v)
            elif size + 1 > best:
                best = size + 1
                best_set = _bits_of(rsel) | 1 << v
            continue
        nodes += 1
        if node_limit > 0 and nodes > node_limit:
            status = STATUS_NODE_LIMIT
            break
        if deadline > 0.0 and (nodes & 1023) == 0 and time.perf_counter() > deadline:
            status = STATUS_TIME_LIMIT
            break
        rsel.append(v)
        o, cc = _colour_py(child, dadj)
        stackP.append(child)
        stackO.append(o)
        stackC.append(cc)
        stackI.append(len(o) - 1)
        d += 1
    return best, best_set, nodes, found, status


def _bits_of(vertices) -> int:
    out = 0
    for v in vertices:
        out |= 1 << v
    return out


def words_from_int(x: int, W: int) -> np.ndarray:
    out = np.zeros(W, np.uint64)
    for w in range(W):
        out[w] = (x >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    return out


def int_from_words(words: np.ndarray) -> int:
    out = 0
    for w, val in enumerate(words.tolist()):
        out |= int(val) << (64 * w)
    return out


def clique_search(
    gadj: list[int],
    dadj: list[int],
    candidates: int,
    *,
    depth0: int = 0,
    best0: int = 0,
    enumerate_target: int | None = None,
    cap: int = 0,
    node_limit: int = 0,
    time_limit: float = 0.0,
) -> dict:
    """Run the clique search on bitset adjacency lists (Python ints).

    ``candidates`` is the starting candidate set; ``depth0`` counts vertices
    already forced into the clique (their common neighbourhood should be
    ``candidates``).  Optimisation mode looks for cliques larger than
    ``best0``; enumeration mode (``enumerate_target`` set) collects up to
    ``cap`` cliques of exactly that total size.  Returned vertex sets exclude
    the forced vertices.
    """
    enum = enumerate_target is not None
    target = int(enumerate_target) if enum else 0
    deadline = time.perf_counter() + time_limit if time_limit and time_limit > 0 else 0.0
    N = len(gadj)
    if _accel.use_numba() and N > 0:
        W = max(1, (N + 63) // 64)
        G = np.zeros((N, W), np.uint64)
        D = np.zeros((N, W), np.uint64)
        for v in range(N):
            G[v] = words_from_int(gadj[v], W)
            D[v] = words_from_int(dadj[v], W)
        best, best_set, nodes, nfound, found, status = _clique_search_nb(
            G, D, words_from_int(candidates, W), depth0, best0, enum, target, cap, node_limit, deadline
        )
        cliques = [int_from_words(found[j]) for j in range(nfound)]
        best_set = int_from_words(best_set)
    else:
        best, best_set, nodes, cliques, status = _clique_search_py(
            gadj, dadj, candidates, depth0, best0, enum, target, cap, node_limit, deadline
        )
    return {
        "best": int(best),
        "best_set": int(best_set),
        "nodes": int(nodes),
        "cliques": cliques,
        "status": int(status),
    }

from __future__ import annotations

import pytest

import oracles
from pmekr import _accel, kernels
from pmekr.constructions import avoid_vertex_family, star_family
from pmekr.matching import CapacityError, Subgraph, is_intersecting_family
from pmekr.search import (
    all_maximum_families,
    build_disjointness_graph,
    ekr_verdict,
    enumerate_maximum_independent_sets,
    graph_from_masks,
    is_star,
    max_intersecting,
    maximum_independent_set,
)

ORACLE_CASES = [(3, 1, 1), (4, 1, 1), (5, 1, 1), (3, 0, 2), (4, 2, 0), (3, 1, 0), (4, 0, 1), (4, 0, 2), (3, 0, 3), (2, 1, 1), (5, 2, 0)]


@pytest.mark.parametrize("n,p,s", ORACLE_CASES)
def test_maximum_matches_clique_oracle(backend, n, p, s):
    best, fams = oracles.maximum_intersecting(oracles.brute_family(n, p, s))
    res = max_intersecting(n, (p, s))
    assert res.exact and res.size == best
    assert is_intersecting_family(res.witness)
    got, complete = all_maximum_families(n, (p, s), cap=10_000)
    assert complete
    assert {frozenset(frozenset(F.tokens()) for F in W) for W in got} == {
        frozenset(frozenset(x) for x in W) for W in fams
    }


def test_initial_and_symmetry_do_not_change_size():
    for n, p, s in [(5, 1, 1), (5, 1, 2), (4, 1, 2)]:
        a = max_intersecting(n, (p, s))
        b = max_intersecting(n, (p, s), initial="none")
        c = max_intersecting(n, (p, s), symmetry=True)
        assert a.size == b.size == c.size
        assert is_intersecting_family(b.witness) and is_intersecting_family(c.witness)
    with pytest.raises(ValueError):
        max_intersecting(4, (1, 1), initial="greedy")


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="needs numba")
@pytest.mark.parametrize("n,p,s", [(5, 1, 2), (6, 2, 1), (4, 1, 2)])
def test_backends_walk_identical_trees(n, p, s):
    g = build_disjointness_graph(n, (p, s))
    gadj, dadj, full = g.intersecting(), g.disjoint, (1 << g.size) - 1
    out = {}
    before = _accel.backend()
    try:
        for name in ("numba", "numpy"):
            _accel.set_backend(name)
            opt = kernels.clique_search(gadj, dadj, full)
            enum = kernels.clique_search(gadj, dadj, full, enumerate_target=opt["best"], cap=1000)
            out[name] = (opt, enum)
    finally:
        _accel.set_backend(before)
    assert out["numba"] == out["numpy"]


def test_node_limit_reports_inexact():
    v = ekr_verdict(6, (2, 1), node_limit=5)
    assert not v.exact
    assert v.status == "node_limit"
    assert v.ekr is None and v.strongly_ekr is None
    assert v.max_size >= v.star_size


def test_time_limit_status():
    g = build_disjointness_graph(6, (1, 2))
    res = maximum_independent_set(g, time_limit=1e-9)
    assert res.status in ("time_limit", "done")


def test_enumeration_cap():
    g = build_disjointness_graph(3, (1, 1))
    sets, complete, _ = enumerate_maximum_independent_sets(g, 6, cap=5)
    assert len(sets) == 5 and not complete


def test_graph_python_path_matches_numpy():
    masks = [int(m) for m in build_disjointness_graph(4, (1, 1)).masks]
    a = graph_from_masks(masks)
    b = graph_from_masks([m << 62 for m in masks])
    assert a.disjoint == b.disjoint
    assert a.edge_count == 24 * 4 // 2 or a.edge_count > 0


def test_disjointness_graph_degree():
    g = build_disjointness_graph(5, (1, 1))
    # members avoiding {l1, r1, l2}: a full edge among edges 3..5, then a
    # singleton that is r2 or one of the 4 vertices of the two unused edges
    assert set(g.degrees()) == {3 * (1 + 4)}
    assert g.is_independent([i for i, m in enumerate(g.masks) if m & 1])


def test_capacity_refusal():
    with pytest.raises(CapacityError):
        build_disjointness_graph(10, (2, 3))


def test_is_star_kinds():
    S = star_family(4, (1, 1), "r2")
    st = is_star(S)
    assert st.kind == "star" and st.center == 3 and st.describe() == "star at r2"
    part = is_star(S[:-2])
    assert part.kind == "sub-star" and 3 in part.centers
    assert is_star(avoid_vertex_family(3, (1, 1), "l3")).kind == "absent"
    assert is_star([]).kind == "absent"
    with pytest.raises(ValueError):
        is_star([Subgraph.parse("l1 r1", 2), Subgraph.parse("l1", 2)])


@pytest.mark.parametrize(
    "n,p,s,mx,ekr,strong",
    [(3, 1, 1, 6, True, False), (4, 1, 1, 9, True, True), (5, 1, 1, 12, True, True), (4, 1, 2, 24, True, False)],
)
def test_verdicts(n, p, s, mx, ekr, strong):
    v = ekr_verdict(n, (p, s))
    assert (v.max_size, v.ekr, v.strongly_ekr) == (mx, ekr, strong)
    if not strong:
        assert v.non_star_witness is not None
        assert is_star(v.non_star_witness).kind != "star"
        assert is_intersecting_family(v.non_star_witness)
    d = v.to_dict()
    assert d["ekr"] == "true" and "seconds" not in d


def test_degenerate_instance():
    # n = p + s with s = 0 has one member
    v = ekr_verdict(2, (2, 0))
    assert v.degenerate and v.max_size == 1 and v.ekr and v.strongly_ekr


@pytest.mark.parametrize("n,p,s", [(3, 1, 1), (4, 1, 1), (4, 0, 2)])
def test_root_split_matches_serial(n, p, s):
    g = build_disjointness_graph(n, (p, s))
    serial = maximum_independent_set(g)
    split = maximum_independent_set(g, jobs=2)
    assert split.exact and split.size == serial.size
    assert g.is_independent(split.witness)
    a, ca, _ = enumerate_maximum_independent_sets(g, serial.size, 10_000)
    b, cb, _ = enumerate_maximum_independent_sets(g, serial.size, 10_000, jobs=2)
    assert ca and cb
    assert {tuple(sorted(x)) for x in a} == {tuple(sorted(x)) for x in b}
    assert len(a) == len(b)


def test_root_split_verdict_matches_serial():
    a = ekr_verdict(4, (1, 1))
    b = ekr_verdict(4, (1, 1), jobs=2)
    assert (a.max_size, a.ekr, a.strongly_ekr, a.maximum_families_found) == (
        b.max_size, b.ekr, b.strongly_ekr, b.maximum_families_found)

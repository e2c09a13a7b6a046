from __future__ import annotations

import pytest

import oracles
from pmekr.constructions import avoid_vertex_family, star_family
from pmekr.cycles import b_interval, enumerate_orders, r_interval
from pmekr.matching import Subgraph, complement, family_list, family_size
from pmekr.search import build_disjointness_graph, ekr_verdict, is_star, max_intersecting


@pytest.mark.parametrize("p,s", [(1, 1), (1, 2), (2, 0), (0, 3), (2, 1)])
def test_max_is_half_at_tight_n(p, s):
    # at n = 2p+s every member's complement is its only disjoint partner
    n = 2 * p + s
    mr = max_intersecting(n, (p, s))
    assert mr.exact and mr.size == family_size(n, (p, s)) // 2


def test_tight_graph_is_perfect_matching():
    g = build_disjointness_graph(3, (1, 1))
    assert g.size == 12 and g.edge_count == 6
    assert g.degrees() == [1] * 12
    for i in range(g.size):
        (j,) = g.neighbours(i)
        assert g.masks[i] ^ g.masks[j] == (1 << 6) - 1


def test_cap_one_keeps_one_witness():
    v = ekr_verdict(3, (1, 1), 1)
    assert v.maximum_families_found == 1 and not v.enumeration_complete
    assert v.strongly_ekr is not True


def test_single_member_is_sub_star():
    st = is_star([Subgraph.from_vertices(2, ["l1", "r1", "l2"])])
    assert st.kind == "sub-star" and len(st.centers) == 3


def test_star_at_named_vertex():
    fam = star_family(6, (1, 2), "r4")
    assert len(fam) == 80 and is_star(fam).describe() == "star at r4"


@pytest.mark.parametrize("n,p,s,x", [(4, 1, 1, "l1"), (5, 1, 2, "r3"), (4, 0, 2, "l4")])
def test_star_and_avoid_partition(n, p, s, x):
    a = {F.mask for F in star_family(n, (p, s), x)}
    b = {F.mask for F in avoid_vertex_family(n, (p, s), x)}
    assert not a & b and a | b == {F.mask for F in family_list(n, (p, s))}


@pytest.mark.parametrize("p,s", [(1, 1), (1, 2), (0, 4)])
def test_avoid_family_picks_one_of_each_complement_pair(p, s):
    n = 2 * p + s
    avoid = {F.mask for F in avoid_vertex_family(n, (p, s), "l1")}
    for F in family_list(n, (p, s)):
        assert (F.mask in avoid) != (complement(F).mask in avoid)


@pytest.mark.parametrize("n,p,s", [(4, 1, 1), (5, 1, 2), (5, 2, 0), (4, 0, 3)])
def test_every_interval_has_the_signature(n, p, s):
    for C in enumerate_orders(n, restricted=True):
        for i in range(1, n + 1):
            for F in (b_interval(C, i, (p, s)), r_interval(C, i, (p, s))):
                assert (F.signature.p, F.signature.s) == (p, s)


@pytest.mark.parametrize("n,p,s", [(4, 1, 1), (5, 1, 2)])
def test_rotation_does_not_change_intervals(n, p, s):
    # the canonical sigma(n) = n representative loses nothing
    for C in enumerate_orders(n, restricted=True):
        base = {oracles.b_interval(C.sigma, C.tau, i, p, s) for i in range(1, n + 1)}
        base |= {oracles.r_interval(C.sigma, C.tau, i, p, s) for i in range(1, n + 1)}
        for r in range(1, n):
            sig = C.sigma[r:] + C.sigma[:r]
            tau = C.tau[r:] + C.tau[:r]
            rot = {oracles.b_interval(sig, tau, i, p, s) for i in range(1, n + 1)}
            rot |= {oracles.r_interval(sig, tau, i, p, s) for i in range(1, n + 1)}
            assert rot == base

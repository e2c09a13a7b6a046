from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_family, star, to_mask
from pmekr.matching import (
    CapacityError,
    MatchingGraph,
    Signature,
    SignatureError,
    Subgraph,
    complement,
    enumerate_family,
    family_masks,
    family_size,
    first_disjoint_pair,
    identity_check,
    intersects,
    is_intersecting_family,
    iter_masks,
    parse_vertex,
    star_size,
    star_size_by_parts,
    vertex_name,
)

SMALL = [(n, p, s) for n in range(1, 6) for p in range(n + 1) for s in range(n + 1 - p) if 2 * p + s >= 1]


@pytest.mark.parametrize("n,p,s", SMALL)
def test_enumeration_matches_brute_force(n, p, s):
    oracle = {to_mask(F) for F in brute_family(n, p, s)}
    got = list(iter_masks(n, (p, s)))
    assert len(got) == len(set(got))
    assert set(got) == oracle
    assert len(got) == family_size(n, (p, s))


@pytest.mark.parametrize("n,p,s", SMALL)
def test_star_size_matches_brute_force(n, p, s):
    fam = brute_family(n, p, s)
    sizes = {len(star(fam, f"{side}{e}")) for e in range(1, n + 1) for side in "lr"}
    assert sizes == {star_size(n, (p, s))}
    assert star_size_by_parts(n, (p, s)) == star_size(n, (p, s))
    assert identity_check(n, (p, s))


@pytest.mark.parametrize(
    "n,p,s,fam,st_",
    [(3, 1, 1, 12, 6), (6, 1, 2, 240, 80), (4, 1, 1, 24, 9), (5, 1, 1, 40, 12), (6, 2, 1, 120, 50), (4, 1, 2, 48, 24)],
)
def test_known_counts(n, p, s, fam, st_):
    assert family_size(n, (p, s)) == fam
    assert star_size(n, (p, s)) == st_


def test_masks_ascending_and_int64():
    arr = family_masks(6, (1, 2))
    assert arr.dtype.name == "int64"
    assert (arr[1:] > arr[:-1]).all()


def test_signature_validation():
    with pytest.raises(SignatureError):
        Signature(0, 0)
    with pytest.raises(SignatureError):
        Signature(-1, 2)
    with pytest.raises(SignatureError, match="p\\+s > n"):
        family_size(2, (1, 2))
    with pytest.raises(SignatureError):
        family_size(0, (1, 0))


def test_enumeration_cap():
    with pytest.raises(CapacityError):
        next(iter_masks(40, (1, 1)))


def test_vertex_names_round_trip():
    for slot in range(16):
        assert parse_vertex(vertex_name(slot)) == slot
    assert parse_vertex("l1") == 0 and parse_vertex("r1") == 1 and parse_vertex("l3") == 4
    with pytest.raises(ValueError):
        parse_vertex("x1")
    with pytest.raises(ValueError):
        parse_vertex("l4", 3)


def test_subgraph_structure():
    F = Subgraph.parse("l1 r1 l2", 3)
    assert F.full_edges == (1,)
    assert F.singletons == (2,)
    assert F.signature == Signature(1, 1)
    assert "l2" in F and "r2" not in F
    assert str(F) == "l1 r1 l2"
    assert F.to_dict() == {"vertices": ["l1", "r1", "l2"], "mask": "0x7"}
    with pytest.raises(ValueError):
        Subgraph(2, 1 << 4)


def test_graph_shape():
    g = MatchingGraph(3)
    assert g.edges() == [(0, 1), (2, 3), (4, 5)]
    assert g.neighbour(4) == 5 and g.neighbour(5) == 4
    assert g.full_mask() == 0b111111


def test_intersections():
    a = Subgraph.parse("l1 r1", 3)
    b = Subgraph.parse("r1 l2", 3)
    c = Subgraph.parse("l3", 3)
    assert intersects(a, b) and not intersects(a, c)
    assert is_intersecting_family([a, b])
    assert not is_intersecting_family([a, b, c])
    assert first_disjoint_pair([a, b, c]) == (a, c)
    assert is_intersecting_family([])
    with pytest.raises(ValueError):
        intersects(a, Subgraph(4, 1))


def test_complement():
    F = Subgraph.parse("l1 r1 l2", 3)
    C = complement(F)
    assert str(C) == "r2 l3 r3"
    assert complement(C) == F


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << (2 * n)) - 1))))
def test_parse_tokens_round_trip(arg):
    n, mask = arg
    F = Subgraph(n, mask)
    assert Subgraph.parse(" ".join(F.tokens()), n) == F
    p, s = len(F.full_edges), len(F.singletons)
    assert 2 * p + s == len(F)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(0, n)).flatmap(
        lambda np_: st.tuples(st.just(np_[0]), st.just(np_[1]), st.integers(0, np_[0] - np_[1])))))
def test_counting_identity_property(args):
    n, p, s = args
    if 2 * p + s == 0:
        return
    assert 2 * n * star_size(n, (p, s)) == (2 * p + s) * family_size(n, (p, s))
    assert family_size(n, (p, s)) == math.comb(n, p) * math.comb(n - p, s) * 2**s


def test_enumerate_family_yields_subgraphs():
    members = list(enumerate_family(3, (1, 1)))
    assert all(F.signature == Signature(1, 1) for F in members)
    assert [F.mask for F in members] == sorted(F.mask for F in members)

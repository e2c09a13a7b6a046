from __future__ import annotations

import pytest

import oracles
from pmekr.constructions import (
    avoid_vertex_family,
    is_maximal_intersecting,
    random_maximal_intersecting,
    star_family,
)
from pmekr.cycles import CyclicOrder, enumerate_orders, sample_orders
from pmekr.lemmas import (
    check_lemma1,
    check_lemma2_structure,
    check_lemma3,
    check_lemma4,
    check_reflection,
    lemma1_over_families,
    run_mask,
    sweep_lemmas,
)
from pmekr.matching import is_intersecting_family


def _oracle_runs_ok(bpos, rpos, k, n, p, s):
    """Some start i gives B = i..i+p+s-k and R = i-(k-1)..i+p-1, cyclically."""
    for i in range(1, n + 1):
        B = {(i - 1 + t) % n + 1 for t in range(p + s - k + 1)}
        R = {(i - k + t) % n + 1 for t in range(p + k - 1)}
        if B == set(bpos) and R == set(rpos):
            return True
    return False


def test_run_mask_wraps():
    assert run_mask(4, 3, 5) == 0b11001
    assert run_mask(0, 2, 5) == 0b10001


def test_star_sweep_all_pass(backend):
    n, p, s = 5, 1, 1
    res = sweep_lemmas(n, (p, s), star_family(n, (p, s), "l5"))
    for key in "1234":
        assert res[key].status == "pass", res[key].to_dict()
        assert res[key].details["orders"] == 384
    assert res["1"].details["equality_orders"] == 384
    assert res["4"].details["center"] == 8
    assert res["4"].details["centered_orders"] == 384


def test_sweep_against_oracle():
    n, p, s = 5, 1, 1
    fam = star_family(n, (p, s), "r3")
    names = {frozenset(F.tokens()) for F in fam}
    k_hist = {}
    for sigma, tau in oracles.all_orders(n, restricted=True):
        bpos, rpos, members = oracles.realised(sigma, tau, names, p, s)
        assert len(members) == 2 * p + s
        k = oracles.k_stat(sigma, tau, names, p, s)
        assert k in (1, s + 1)
        assert _oracle_runs_ok(bpos, rpos, k, n, p, s)
        k_hist[k] = k_hist.get(k, 0) + 1
    res = sweep_lemmas(n, (p, s), fam, lemmas=(1, 2, 3))
    assert res["3"].details["k_histogram"] == {str(k): v for k, v in sorted(k_hist.items())}
    assert res["2"].status == "pass" and res["2"].checked == 384


def test_per_order_checks_agree_with_sweep():
    n, p, s = 5, 1, 1
    fam = star_family(n, (p, s), "l2")
    for C in list(enumerate_orders(n, restricted=True))[::17]:
        assert check_lemma1(C, fam, (p, s)).count == 3
        l2 = check_lemma2_structure(C, fam, (p, s))
        assert l2.status == "ok"
        assert set(l2.b_positions) == set(l2.expected_b)
        l3 = check_lemma3(C, fam, (p, s))
        assert l3.holds and l3.applicable


def test_lemma1_not_applicable_below_threshold():
    fam = avoid_vertex_family(3, (1, 1), "l3")
    res = sweep_lemmas(3, (1, 1), fam, lemmas=(1,))
    assert res["1"].status == "not_applicable"
    assert "n < 2(p+s)" in res["1"].note
    assert not check_lemma1(CyclicOrder((1, 2, 3), (0, 0, 0)), fam, (1, 1)).applicable


def test_non_maximum_family_is_not_judged():
    fam = star_family(5, (1, 1), "l1")[:-1]
    res = sweep_lemmas(5, (1, 1), fam, lemmas=(2, 3, 4))
    assert {r.status for r in res.values()} == {"not_applicable"}


def test_boundary_n_is_observational():
    # n = 2(p+s): lemmas 2-4 are reported but never failed
    res = sweep_lemmas(4, (1, 1), star_family(4, (1, 1), "l4"), lemmas=(1, 2, 3, 4))
    assert res["1"].status == "pass"
    assert {res[k].status for k in "234"} == {"observational"}


def test_random_maximal_families():
    for seed in range(10):
        fam = random_maximal_intersecting(5, (1, 1), seed)
        assert is_intersecting_family(fam)
        assert is_maximal_intersecting(fam, 5, (1, 1))
    assert random_maximal_intersecting(5, (1, 1), 3) == random_maximal_intersecting(5, (1, 1), 3)


def test_lemma1_over_random_families(backend):
    n, p, s = 5, 1, 1
    fams = [random_maximal_intersecting(n, (p, s), seed) for seed in range(20)]
    rows = lemma1_over_families(n, (p, s), fams)
    assert all(r["violations"] == 0 and r["orders"] == 384 for r in rows)
    # same answer as the per-family sweep
    assert rows[3]["max_count"] == sweep_lemmas(n, (p, s), fams[3], lemmas=(1,))["1"].details["max_count"]


def test_lemma4_records_extra_swaps():
    res = check_lemma4(star_family(7, (1, 2), "l7"), (1, 2), 7, sample=2000, seed=1)
    assert res.status == "pass"
    assert res.details["swap_position"] == 3
    assert set(res.details["extra_swaps"]) == {"3", "4"}
    assert res.details["orders"] == 2000


def test_sampled_sweep_is_reproducible():
    fam = star_family(7, (1, 2), "l7")
    a = sweep_lemmas(7, (1, 2), fam, lemmas=(1, 3), sample=500, seed=9)
    b = sweep_lemmas(7, (1, 2), fam, lemmas=(1, 3), sample=500, seed=9)
    assert {k: v.to_dict() for k, v in a.items()} == {k: v.to_dict() for k, v in b.items()}
    orders = list(sample_orders(7, 5, seed=9))
    assert all(C.restricted for C in orders)


@pytest.mark.parametrize("n,p,s", [(4, 1, 1), (5, 1, 1), (5, 1, 2)])
def test_reflection_report(n, p, s):
    rep = check_reflection(n, (p, s), star_family(n, (p, s), f"l{n}"))
    assert rep.passed
    assert rep.k_pairs > 0


def test_unknown_lemma_rejected():
    with pytest.raises(ValueError):
        sweep_lemmas(5, (1, 1), star_family(5, (1, 1), "l5"), lemmas=(5,))

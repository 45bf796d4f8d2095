from __future__ import annotations

from fractions import Fraction

import pytest

from padic_modelset.limitperiodic import (
    BOUNDARY,
    LENGTHS,
    boundary_report,
    corrupted_centers,
    formation_offsets,
    invariance_under_inflation,
    limit_measure,
    mixed_classes,
    safe_radius,
    substitution_anchors,
    tail_measure,
    truncated_measure,
    verify_against_substitution,
    windows_abc,
)
from padic_modelset.padic import Coset


def cosets(cu):
    return {(c.center[0], c.level) for c in cu.normalized().cosets}


def test_k2_windows():
    w = windows_abc(2)
    assert cosets(w["a"]) == {(1, 2)}
    assert cosets(w["b"]) == {(3, 2)}
    assert cosets(w["c"]) == {(0, 2)}


def test_k3_adds_4_mod_27():
    assert w_contains(windows_abc(3)["a"], 4, 3)


def test_k4_adds_minus_12_mod_81():
    assert w_contains(windows_abc(4)["c"], -12 % 81, 4)


def w_contains(cu, center, level):
    return cu.contains_coset(Coset((center,), level))


def test_k_below_two_rejected():
    with pytest.raises(ValueError):
        windows_abc(1)


@pytest.mark.parametrize("K", range(2, 13))
def test_disjoint_and_measures(K):
    w = windows_abc(K)
    for s, t in (("a", "b"), ("a", "c"), ("b", "c")):
        assert w[s].intersection(w[t]).is_empty()
    assert w["a"].haar_measure() == w["b"].haar_measure() == truncated_measure(K)
    assert w["c"].haar_measure() == Fraction(1, 9) + sum(Fraction(1, 3**k) for k in range(3, K + 1))
    total = sum(w[t].haar_measure() for t in "abc")
    assert total + tail_measure(K) == Fraction(1, 2)


def test_limit_and_weighted_covering():
    assert limit_measure() == Fraction(1, 6)
    assert sum(LENGTHS[t] * limit_measure() for t in "abc") == 1
    # truncated weighted covering approaches 1 from below
    prev = Fraction(0)
    for K in range(2, 15):
        w = windows_abc(K)
        cur = sum(LENGTHS[t] * w[t].haar_measure() for t in "abc")
        assert prev < cur < 1
        prev = cur


def test_boundaries():
    rep = boundary_report(20)
    for t in "abc":
        assert rep[t]["chain_limit_matches"]
        assert not rep[t]["contains_integer"]
        assert len(rep[t]["boundary"]) <= 2
    assert BOUNDARY["a"] == Fraction(-1, 2)


def test_mixed_classes_sit_on_boundary():
    from padic_modelset.padic import padic_residue

    for t in "abc":
        for lv in (1, 2, 3):
            assert mixed_classes(t, lv) == [padic_residue(BOUNDARY[t], 3, lv)]


def test_verify_k6_r100():
    rep = verify_against_substitution(6, 100)
    assert rep["ok"] and rep["mismatches"] == 0
    for t in "abc":
        assert abs(rep["types"][t]["model_count"] - 200 / 6) < 4


def test_verify_k6_r19_type_a():
    anchors = substitution_anchors(19)
    assert [x for x in anchors["a"] if x >= 0] == [1, 4, 10, 13, 19]
    assert verify_against_substitution(6, 19)["ok"]


def test_verify_k2_r2():
    rep = verify_against_substitution(2, 2)
    assert rep["ok"]
    anchors = substitution_anchors(2)
    assert [x for x in anchors["a"] if x >= 0] == [1]
    assert [x for x in anchors["b"] if x >= 0] == []


@pytest.mark.parametrize("K", range(2, 9))
def test_safe_radius_is_sharp(K):
    R = safe_radius(K)
    assert verify_against_substitution(K, R)["ok"]
    assert not verify_against_substitution(K, R + 2)["ok"]


def test_strict_refuses_beyond_safe_radius():
    with pytest.raises(ValueError, match="safe radius"):
        verify_against_substitution(6, 729, strict=True)
    with pytest.raises(ValueError):
        verify_against_substitution(6, -1)


def test_naive_radius_bound_fails_for_k2():
    # R = 3^(K-1) = 3 already reaches -3, which lives in a deeper coset
    rep = verify_against_substitution(2, 3)
    assert not rep["ok"]
    assert rep["first_mismatch"]["point"] == -3


def test_formation_offsets():
    # right ends of the tiles of a -> ab, b -> abc, c -> abcc relative to 3x
    assert formation_offsets() == {
        "a": [("a", -2), ("b", 0)],
        "b": [("a", -5), ("b", -3), ("c", 0)],
        "c": [("a", -8), ("b", -6), ("c", -3), ("c", 0)],
    }


@pytest.mark.parametrize("K", [2, 5, 8])
def test_invariance(K):
    rep = invariance_under_inflation(K)
    assert rep["ok"] and rep["checked"] > 0


def test_corrupted_window_breaks_invariance():
    assert not invariance_under_inflation(5, corrupted_centers(1))["ok"]

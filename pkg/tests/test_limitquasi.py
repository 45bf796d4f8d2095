from __future__ import annotations

import math

import pytest

from padic_modelset.exactnum import LAMBDA, QuadInt, QuadRational
from padic_modelset.limitquasi import (
    BRANCHES,
    FULL_STRIP,
    INNER_STRIP,
    MU,
    VALID_STRIP,
    PhiData,
    _union_1d,
    empirical_substrip,
    expected_measures,
    frequencies,
    generate_sequence_exact,
    hausdorff_1d,
    ifs_windows,
    in_strip,
    inner_strip_connectivity,
    lift_to_lattice,
    point_density,
    sandwich_check,
    strip_beta,
    strip_violations,
)

R2 = math.sqrt(2)


def test_phi_data():
    assert PhiData().check()


def test_seed():
    s = generate_sequence_exact(0)
    assert s.lifts() == {"a": {(0, 0)}, "b": {(0, -1)}}


def test_one_inflation():
    lifts = generate_sequence_exact(1).lifts()
    assert {(0, 0), (1, 0), (-1, -1), (-2, -2)} <= lifts["a"]
    assert {(2, 0), (0, -1), (-1, -2)} <= lifts["b"]


def test_step_guard():
    with pytest.raises(ValueError):
        generate_sequence_exact(15)


def test_lift_examples():
    assert lift_to_lattice(2) == (2, 0)
    assert lift_to_lattice(QuadInt(-1, -1)) == (-1, -1)
    assert lift_to_lattice(LAMBDA * QuadInt(1, 0)) == (2, 1)


def test_lift_commutes_with_inflation():
    for v in generate_sequence_exact(4).lifts()["a"]:
        x = QuadInt(*v)
        m, n = v
        assert lift_to_lattice(LAMBDA * x) == (2 * m + 2 * n, m + 2 * n)


def test_inflated_points_are_type_a():
    s = generate_sequence_exact(6)
    lifts = s.lifts()
    lo, hi = s.extent
    for v in lifts["a"] | lifts["b"]:
        img = LAMBDA * QuadInt(*v)
        if lo <= img < hi:
            assert lift_to_lattice(img) in lifts["a"]


def test_beta_examples():
    assert strip_beta((0, 0)) == QuadRational(0, 0)
    assert strip_beta((2, 0)) == QuadRational(0, -1)
    assert in_strip((2, 0), FULL_STRIP)
    assert in_strip((0, 0), FULL_STRIP)


@pytest.mark.parametrize("n", [0, 3, 6, 8])
def test_all_lifts_in_full_strip(n):
    assert strip_violations(generate_sequence_exact(n)) == []


def test_frequencies_and_density():
    s = generate_sequence_exact(10)
    fa, fb = frequencies(s)
    assert abs(fa - (2 - R2)) < 1e-2
    assert abs(fb - (R2 - 1)) < 1e-2
    assert abs(point_density(s) - (2 + R2) / 4) < 1e-2


def test_wide_inner_strip_holds_a_non_point():
    rep = inner_strip_connectivity(0)
    assert rep["not_sequence_points"] == [[1, -1]]
    assert not rep["strip_points_are_sequence_points"]
    assert rep["sequence_connected"]


def test_valid_strip_is_all_sequence_points():
    rep = inner_strip_connectivity(6, strip=VALID_STRIP)
    assert rep["strip_points_are_sequence_points"]
    assert rep["sequence_connected"]


def test_valid_strip_sits_inside_wide_strip():
    lo, hi, _, _ = INNER_STRIP
    vlo, vhi, _, _ = VALID_STRIP
    assert lo <= vlo and vhi <= hi
    assert vhi - vlo == QuadRational(1, 0)


def test_empirical_substrip_edges():
    rep = empirical_substrip(6)
    assert rep["lower_point"] == [1, -1]
    assert rep["lower_excluded"] == str(VALID_STRIP[0])


@pytest.mark.parametrize("p", [(0, 0), (1, 0), (2, 0)])
def test_removing_a_point_breaks_connectivity(p):
    assert not inner_strip_connectivity(4, remove=p, strip=VALID_STRIP)["sequence_connected"]


def test_branch_count_and_contraction():
    assert len(BRANCHES) == 7
    assert sum(1 for _, _, d in BRANCHES if d == "a") == 4
    assert abs(float(MU) - (2 - R2)) < 1e-15


def test_cell_growth_bounded():
    w = ifs_windows(6)
    for d, c in enumerate(w.counts):
        assert c <= 2 * 7**d


def test_outer_measures_tend_to_expected():
    w = ifs_windows(12)
    exp = expected_measures()
    for t in "ab":
        got = float(w.outer_measure(t))
        assert got >= float(exp[t]) - 1e-12
        assert got - float(exp[t]) < 5e-3


def test_hausdorff_stability():
    layers = [_union_1d(ifs_windows(d).outer) for d in range(7)]
    size = layers[0][-1][1] - layers[0][0][0]
    for d in range(6):
        assert hausdorff_1d(layers[d], layers[d + 1]) <= (2 - R2) ** d * size + 1e-12


def test_hausdorff_helper():
    assert hausdorff_1d([(0.0, 1.0)], [(0.0, 1.0)]) == 0
    assert hausdorff_1d([(0.0, 1.0)], [(0.0, 2.0)]) == pytest.approx(1.0)
    assert hausdorff_1d([(0.0, 3.0)], [(0.0, 1.0), (2.0, 3.0)]) == pytest.approx(0.5)


def test_sandwich_trivial():
    rep = sandwich_check(0, 3)
    assert rep["ok"]


def test_sandwich_small():
    rep = sandwich_check(4, 6)
    assert rep["ok"]
    for t in "ab":
        assert rep["types"][t]["inner_not_in_sequence"] == []
        assert rep["types"][t]["sequence_not_in_outer"] == []


def test_discrepancy_shrinks_with_depth():
    # refinement beyond depth n acts at scales the patch cannot see, so the trend flattens there
    d = [sandwich_check(4, depth)["discrepancy_density"] for depth in (0, 2, 4, 6, 8)]
    assert d[0] > d[1] > d[2]
    assert d[2] >= d[3] >= d[4]

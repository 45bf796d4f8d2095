from __future__ import annotations

import math
from fractions import Fraction

import pytest

from padic_modelset.exactnum import IntMatrix2
from padic_modelset.limitperiodic import windows_abc
from padic_modelset.padic import (
    Coset,
    CosetUnion,
    MatrixFiltration,
    PadicFiltration,
    PadicTrunc,
    ProfiniteByMatrix,
    coset_chain_limit,
    coset_contains,
    coset_normalize,
    haar_measure,
    padic_digits,
    padic_distance,
    padic_residue,
    valuation,
)


def Z3(*cosets):
    return CosetUnion.padic(3, 1, [Coset((c,), k) for c, k in cosets])


class TestValuation:
    def test_integer(self):
        assert valuation(9, 3) == 2

    def test_zero_is_infinite(self):
        assert valuation(0, 3) == math.inf

    def test_rational(self):
        assert valuation(Fraction(1, 3), 3) == -1

    def test_non_prime_rejected(self):
        with pytest.raises(ValueError):
            valuation(12, 6)


class TestDistance:
    def test_basic(self):
        assert padic_distance(1, 10, 3) == Fraction(1, 9)

    def test_identity(self):
        assert padic_distance(Fraction(5, 7), Fraction(5, 7), 5) == 0

    def test_negative_valuation(self):
        assert padic_distance(0, Fraction(1, 3), 3) == 3


def test_digits_of_minus_half():
    assert padic_digits(Fraction(-1, 2), 3, 8) == [1] * 8


def test_residue_of_rational():
    assert padic_residue(Fraction(-1, 2), 3, 5) == 121


class TestNormalize:
    def test_full_sibling_set_merges(self):
        u = coset_normalize(Z3((0, 1), (1, 1), (2, 1)))
        assert u.cosets == (Coset((0,), 0),)

    def test_duplicates_removed(self):
        assert coset_normalize(Z3((1, 2), (1, 2))).cosets == (Coset((1,), 2),)

    def test_disjoint_non_siblings_unchanged(self):
        assert coset_normalize(Z3((0, 2), (4, 3))).cosets == (Coset((0,), 2), Coset((4,), 3))

    def test_contained_coset_dropped(self):
        assert coset_normalize(Z3((1, 1), (4, 2), (13, 3))).cosets == (Coset((1,), 1),)

    def test_cascading_merge(self):
        kids = [(r, 2) for r in range(9)]
        assert coset_normalize(Z3(*kids)).cosets == (Coset((0,), 0),)


class TestMeasure:
    def test_single_coset(self):
        assert haar_measure(Z3((1, 2))) == Fraction(1, 9)

    def test_truncated_type_a_window(self):
        assert haar_measure(windows_abc(2)["a"]) == Fraction(1, 9)

    def test_full_group(self):
        assert haar_measure(CosetUnion.whole(PadicFiltration(3))) == 1

    def test_scaled_coset(self):
        u = CosetUnion.padic(2, 2, [Coset((0, 0), 0, scale=4)])
        assert u.haar_measure() == Fraction(1, 16)

    def test_matrix_filtration(self):
        theta = IntMatrix2(2, 2, 1, 2)
        u = CosetUnion.by_matrix(theta, [Coset((0, 0), 3)])
        assert u.haar_measure() == Fraction(1, 8)

    def test_complement_adds_up(self):
        u = Z3((0, 2), (4, 3))
        assert u.haar_measure() + u.complement().haar_measure() == 1
        assert u.complement().haar_measure() == Fraction(23, 27)


class TestContains:
    def test_type_a_contains_19(self):
        assert coset_contains(windows_abc(6)["a"], (19,))

    def test_type_c_contains_24(self):
        assert coset_contains(windows_abc(6)["c"], (24,))

    def test_type_b_excludes_1(self):
        assert not coset_contains(windows_abc(8)["b"], (1,))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            coset_contains(Z3((0, 1)), (0, 0))

    def test_contains_coset(self):
        u = Z3((1, 1))
        assert u.contains_coset(Coset((4,), 2))
        assert not u.contains_coset(Coset((0,), 2))
        assert not u.contains_coset(Coset((0,), 0))


class TestChainLimit:
    def test_geometric_chain(self):
        lim = coset_chain_limit(lambda k: (3 ** (k - 1) - 1) // 2, 3, 10)
        assert lim.residue[0] == padic_residue(Fraction(-1, 2), 3, 10)

    def test_shifted_chain(self):
        lim = coset_chain_limit(lambda k: (3 ** (k - 1) - 1) // 2 + 2, 3, 10)
        assert lim.residue[0] == padic_residue(Fraction(3, 2), 3, 10)

    def test_constant_chain(self):
        assert coset_chain_limit(lambda k: 0, 3, 6).residue == (0,)

    def test_non_cauchy_rejected(self):
        with pytest.raises(ValueError, match="not Cauchy"):
            coset_chain_limit(lambda k: k, 3, 4)


def test_truncation_compatibility():
    x = PadicTrunc.of(-5, 3, 4)
    y = PadicTrunc.of(11, 3, 4)
    assert (x + y).reduce(2) == x.reduce(2) + y.reduce(2)


def test_matrix_residue_compatibility():
    theta = IntMatrix2(2, 2, 1, 2)
    x = ProfiniteByMatrix.of((3, -7), theta, 5)
    y = ProfiniteByMatrix.of((-4, 9), theta, 5)
    assert (x + y).reduce(3) == x.reduce(3) + y.reduce(3)


def test_matrix_index():
    f = MatrixFiltration(IntMatrix2(2, 2, 1, 2))
    for i in range(6):
        assert len(f.residues(i)) == 2**i


def test_coprime_scale_rejected():
    with pytest.raises(ValueError):
        Z3((0, 1)).union(CosetUnion.padic(3, 1, [Coset((0,), 1, scale=2)])).normalized()


def test_json_round_trip_is_canonical():
    u = Z3((4, 3), (0, 2), (0, 2))
    text = u.to_json()
    assert text == '{"cosets":[{"center":[0],"level":2,"scale":1},{"center":[4],"level":3,"scale":1}],"dim":1,"p":3}'
    assert CosetUnion.from_json(text).normalized() == u.normalized()

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from padic_modelset.exactnum import QuadInt
from padic_modelset.limitperiodic import LENGTHS
from padic_modelset.substitution import (
    SubstitutionSystem,
    dekking_coincidence,
    fixed_point_patch,
    geometric_points,
    is_primitive,
    letter_counts,
    named_system,
    pf_data,
    recode_pairs,
    self_similarity_check,
    subst_matrix,
)

S3 = named_system("limitperiodic3").system
SQ = named_system("limitquasi").system
Q_LENGTHS = {"a": QuadInt(1, 0), "b": QuadInt(0, 1)}


def patch3(n=4):
    return geometric_points(fixed_point_patch(S3, ("c", "a"), n), LENGTHS, "right")


class TestParse:
    def test_alphabet_in_first_appearance_order(self):
        s = SubstitutionSystem.parse("# comment\nb -> ba\na -> ab\n")
        assert s.alphabet == ("b", "a")

    def test_malformed_line(self):
        with pytest.raises(ValueError, match="line 1"):
            SubstitutionSystem.parse("a => ab")

    def test_unknown_letter(self):
        with pytest.raises(ValueError):
            SubstitutionSystem.parse("a -> ab")

    def test_duplicate_rule(self):
        with pytest.raises(ValueError):
            SubstitutionSystem.parse("a -> a\na -> aa")


class TestMatrix:
    def test_three_letter_system(self):
        assert subst_matrix(S3).tolist() == [[1, 1, 1], [1, 1, 1], [0, 1, 2]]

    def test_two_letter_system(self):
        assert subst_matrix(SQ).tolist() == [[2, 2], [1, 2]]

    def test_identity_substitution(self):
        s = SubstitutionSystem.parse("x -> x\ny -> y")
        assert subst_matrix(s).tolist() == [[1, 0], [0, 1]]
        assert not is_primitive(s)

    @pytest.mark.parametrize("name", ["limitperiodic3", "limitquasi", "thuemorse", "perioddoubling"])
    def test_word_growth_matches_matrix_power(self, name):
        s = named_system(name).system
        m = subst_matrix(s)
        for n in range(1, 9):
            mn = np.linalg.matrix_power(m, n)
            for j, letter in enumerate(s.alphabet):
                w = s.iterate(letter, n)
                assert len(w) == mn[:, j].sum()
                assert letter_counts(w, s.alphabet) == mn[:, j].tolist()


class TestPF:
    def test_integer_inflation(self):
        pf = pf_data(S3)
        assert pf.inflation_exact == 3
        assert pf.lengths_exact == (1, 2, 3)
        assert pf.frequencies_exact == (Fraction(1, 3),) * 3

    def test_quadratic_inflation(self):
        pf = pf_data(SQ)
        assert pf.inflation_exact == QuadInt(2, 1)
        assert pf.lengths_exact == (1, QuadInt(0, 1))
        assert pf.frequencies_exact == (QuadInt(2, -1), QuadInt(-1, 1))
        assert abs(sum(pf.frequencies) - 1) < 1e-12
        assert pf.residual < 1e-12

    def test_single_letter(self):
        pf = pf_data(SubstitutionSystem.parse("x -> xx"))
        assert pf.inflation_exact == 2
        assert pf.frequencies == (1.0,)

    def test_non_primitive_rejected(self):
        with pytest.raises(ValueError):
            pf_data(SubstitutionSystem.parse("a -> ab\nb -> b"))

    def test_frequencies_match_empirical(self):
        pf = pf_data(SQ)
        w = SQ.iterate("a", 10)
        emp = [c / len(w) for c in letter_counts(w, SQ.alphabet)]
        assert max(abs(e - f) for e, f in zip(emp, pf.frequencies)) < 1e-3


class TestFixedPoint:
    def test_two_steps(self):
        assert fixed_point_patch(S3, "ca", 2).right_word == "ababc"

    def test_four_steps_prefix(self):
        want = "ab abc ab abc abcc ab abc ab abc abcc".replace(" ", "")
        assert fixed_point_patch(S3, "ca", 4).right_word.startswith(want)

    def test_zero_steps(self):
        p = fixed_point_patch(S3, "ca", 0)
        assert (p.left_word, p.right_word) == ("c", "a")

    def test_illegal_seed(self):
        with pytest.raises(ValueError, match="not legal"):
            fixed_point_patch(S3, "aa", 2)

    def test_extension(self):
        for n in range(6):
            a, b = fixed_point_patch(S3, "ca", n), fixed_point_patch(S3, "ca", n + 1)
            assert b.left_word.endswith(a.left_word) and b.right_word.startswith(a.right_word)


class TestGeometry:
    def test_positive_right_ends(self):
        pts = patch3()
        got = sorted(x for x in pts.all_points() if 0 < x <= 19)
        assert got == [1, 3, 4, 6, 9, 10, 12, 13, 15, 18, 19]

    def test_negative_side_layout(self):
        pts = patch3()
        got = sorted((x for x in pts.all_points() if -26 <= x <= 0), reverse=True)
        assert got == [0, -3, -6, -8, -9, -12, -15, -17, -18, -21, -23, -24, -26]

    def test_one_quadratic_step(self):
        pts = geometric_points(fixed_point_patch(SQ, "ba", 1), Q_LENGTHS, "left")
        assert {QuadInt(-2, -2), QuadInt(-1, -1), QuadInt(0, 0), QuadInt(1, 0)} <= set(pts.per_letter["a"])
        assert {QuadInt(-1, -2), QuadInt(0, -1), QuadInt(2, 0)} <= set(pts.per_letter["b"])

    def test_consecutive_gaps_are_tile_lengths(self):
        pts = patch3(5)
        for ch, lo, hi in pts.tiles:
            assert hi - lo == LENGTHS[ch]
        ends = sorted(pts.all_points())
        assert all(b > a for a, b in zip(ends, ends[1:]))

    def test_extent_scales_with_inflation(self):
        for n in range(1, 7):
            pts = geometric_points(fixed_point_patch(S3, "ca", n), LENGTHS, "right")
            assert pts.extent == (-(3**n) * 3, 3**n * 1)

    def test_csv_export(self):
        pts = geometric_points(fixed_point_patch(SQ, "ba", 0), Q_LENGTHS, "left")
        assert pts.to_csv() == "letter,coordinate\nb,0-1*sqrt2\na,0+0*sqrt2\n"

    def test_non_positive_length(self):
        with pytest.raises(ValueError):
            geometric_points(fixed_point_patch(S3, "ca", 1), {"a": 1, "b": 0, "c": 1})


class TestSelfSimilarity:
    def test_scaling_by_three(self):
        assert self_similarity_check(patch3(), 3, -27, 27).ok

    def test_scaling_by_two_fails(self):
        r = self_similarity_check(patch3(), 2, -27, 27)
        assert not r.ok and (1, 2) in r.counterexamples

    def test_identity_factor(self):
        assert self_similarity_check(patch3(), 1, -27, 27).ok

    def test_range_beyond_patch(self):
        with pytest.raises(ValueError):
            self_similarity_check(patch3(2), 3, -100, 100)

    def test_quadratic_inflation_lands_in_type_a(self):
        pts = geometric_points(fixed_point_patch(SQ, "ba", 6), Q_LENGTHS, "left")
        lo, hi = pts.extent
        # the right edge of the patch is not a left end point inside it
        r = self_similarity_check(pts, QuadInt(2, 1), lo, hi - 1, target=["a"])
        assert r.ok and r.checked > 100


class TestDekking:
    def test_recoded_system(self):
        c = dekking_coincidence(SubstitutionSystem.parse("A -> AAc\nc -> Acc"))
        assert c.found and (c.depth, c.position) == (1, 0)

    def test_thue_morse(self):
        assert not dekking_coincidence(named_system("thuemorse").system, 8)

    def test_period_doubling(self):
        assert dekking_coincidence(named_system("perioddoubling").system)

    def test_non_constant_length(self):
        with pytest.raises(ValueError):
            dekking_coincidence(S3)


class TestRecode:
    def test_induced_rule(self):
        induced, _ = recode_pairs(fixed_point_patch(S3, "ca", 5), "ab", "A")
        assert induced.rule == {"A": "AAc", "c": "Acc"}

    def test_new_tile_lengths(self):
        _, patch = recode_pairs(fixed_point_patch(S3, "ca", 5), "ab", "A")
        assert set(patch.word) == {"A", "c"}
        assert 3 * len(patch.word) == sum(LENGTHS[ch] for ch in fixed_point_patch(S3, "ca", 5).word)

    def test_vacuous_recode(self):
        p = fixed_point_patch(S3, "ca", 0)
        induced, q = recode_pairs(p, "ab", "A")
        assert induced == S3 and q == p

    def test_non_block_pair(self):
        with pytest.raises(ValueError):
            recode_pairs(fixed_point_patch(S3, "ca", 4), "bc", "X")

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from padic_modelset.diffraction import (
    SCHEMA,
    FourierModuleElement,
    WeightedPointPatch,
    amplitude_assignment_check,
    amplitudes_3adic,
    autocorrelation,
    chair_patch,
    dyadic_grid,
    fourier_bohr_numeric,
    fourier_module,
    intensity,
    lattice_patch,
    numeric_spectrum,
    rows_to_csv,
    spectrum_compare,
    substitution_patch,
    thread_count,
)


@pytest.fixture(scope="module")
def lp7():
    return substitution_patch("limitperiodic3", 3**7)


# -- Fourier module ---------------------------------------------------------


def test_module_n2_unit_window():
    els = fourier_module(2, 0, 1)
    assert [e.m for e in els] == list(range(10))
    assert all(e.n == 2 for e in els)


def test_module_zero_window():
    assert fourier_module(5, 0, 0) == [FourierModuleElement(0, 2)]


def test_module_values_unique_and_sorted():
    els = fourier_module(5, 0, 2)
    vals = [e.value for e in els]
    assert vals == sorted(vals)
    assert len(set(vals)) == len(vals)
    assert Fraction(3, 27) in vals
    assert FourierModuleElement.of(Fraction(3, 27)) == FourierModuleElement(1, 2)


def test_non_canonical_rejected():
    with pytest.raises(ValueError):
        FourierModuleElement(3, 3)
    with pytest.raises(ValueError):
        FourierModuleElement(1, 1)
    with pytest.raises(ValueError):
        FourierModuleElement.of(Fraction(1, 2))
    with pytest.raises(ValueError):
        fourier_module(1)


# -- analytic side ----------------------------------------------------------


def test_amplitudes_at_zero():
    for a in amplitudes_3adic(FourierModuleElement(0, 2)):
        assert a == pytest.approx(1 / 6)


def test_amplitudes_at_one():
    for a in amplitudes_3adic(FourierModuleElement(9, 2)):
        assert abs(a) == pytest.approx(1 / 6)


def test_amplitude_modulus_1_3():
    a = amplitudes_3adic(FourierModuleElement(1, 3))[0]
    assert abs(a) == pytest.approx(math.sqrt(3) / 2 / 27)


def test_intensity_examples():
    assert intensity(FourierModuleElement(0, 2), (1, 1, 1)) == pytest.approx(0.25)
    assert intensity(FourierModuleElement(9, 2), (1, 1, 1)) == pytest.approx(0.25)
    assert intensity(FourierModuleElement(4, 3), (0, 0, 0)) == 0


def test_intensity_at_zero_is_weighted_density_squared():
    h = (0.3, -1.2, 2.0)
    assert intensity(FourierModuleElement(0, 2), h) == pytest.approx((sum(h) / 6) ** 2)


# -- patches and autocorrelation ---------------------------------------------


def test_patch_ball_enforced():
    with pytest.raises(ValueError):
        WeightedPointPatch(np.array([[5]]), np.array([1.0]), 3)
    with pytest.raises(ValueError):
        WeightedPointPatch(np.array([[1], [2]]), np.array([1.0]), 3)


def test_lattice_autocorrelation():
    ac = autocorrelation(lattice_patch(100), 5)
    assert ac[0] == pytest.approx(1, abs=1e-2)
    assert ac[1] == pytest.approx(1, abs=2e-2)
    assert ac[1] <= ac[0]
    assert ac[-3] == ac[3]


def test_autocorrelation_cutoff_guard():
    with pytest.raises(ValueError):
        autocorrelation(lattice_patch(3), 7)


def test_empty_patch():
    p = WeightedPointPatch(np.zeros((0, 1), dtype=np.int64), np.zeros(0), 10)
    assert autocorrelation(p, 4).coefficients == {}
    assert fourier_bohr_numeric(p, Fraction(1, 3)) == 0


def test_limitperiodic_autocorrelation_at_zero(lp7):
    assert autocorrelation(lp7, 3)[0] == pytest.approx(0.5, abs=1e-2)


def test_float_points_autocorrelation_symmetric():
    p = substitution_patch("limitquasi", 40)
    ac = autocorrelation(p, 3)
    for z, v in ac.coefficients.items():
        assert ac[round(-z, 9) + 0.0] == pytest.approx(v)


# -- numeric estimator --------------------------------------------------------


def test_lattice_bragg_peaks():
    p = lattice_patch(200)
    assert abs(fourier_bohr_numeric(p, 0)) == pytest.approx(1, abs=1e-2)
    assert abs(fourier_bohr_numeric(p, 3)) == pytest.approx(1, abs=1e-2)
    assert abs(fourier_bohr_numeric(p, Fraction(1, 2))) < 1e-2


def test_density_at_zero(lp7):
    assert abs(fourier_bohr_numeric(lp7, 0)) == pytest.approx(0.5, abs=1e-2)


def test_one_ninth_within_five_percent(lp7):
    e = FourierModuleElement(1, 2)
    num = abs(fourier_bohr_numeric(lp7, e.value)) ** 2
    assert num == pytest.approx(intensity(e), rel=0.05)


def test_third_formula_belongs_to_type_c(lp7):
    r = 3**7
    patches = {t: substitution_patch("limitperiodic3", r, {x: float(x == t) for x in "abc"}) for t in "abc"}
    rep = amplitude_assignment_check(patches, fourier_module(4, 0, 1))
    assert {k: v["matches"] for k, v in rep.items()} == {"a": "a", "b": "b", "c": "c"}
    assert all(v["max_abs_dev"] < 1e-3 for v in rep.values())


def test_weight_scaling_both_paths(lp7):
    e = FourierModuleElement(2, 3)
    h = (0.5, 1.5, -1.0)
    s = 3.0
    assert intensity(e, [s * x for x in h]) == pytest.approx(s**2 * intensity(e, h))
    a = abs(fourier_bohr_numeric(lp7, e.value)) ** 2
    b = abs(fourier_bohr_numeric(lp7.scaled(s), e.value)) ** 2
    assert b == pytest.approx(s**2 * a)


def test_off_module_decay():
    ks = [math.sqrt(2) * j / 7 + 0.013 * j for j in range(1, 11)]
    small = substitution_patch("limitperiodic3", 3**6)
    big = substitution_patch("limitperiodic3", 3**7)
    # single k values wobble at the 1/r noise level, so compare the mean modulus
    m_small = sum(abs(fourier_bohr_numeric(small, k)) for k in ks) / len(ks)
    m_big = sum(abs(fourier_bohr_numeric(big, k)) for k in ks) / len(ks)
    assert m_big < m_small
    assert max(abs(fourier_bohr_numeric(big, k)) for k in ks) < 10 / big.radius


def test_thue_morse_peak_candidates_shrink():
    vals = [abs(fourier_bohr_numeric(substitution_patch("thuemorse", r), Fraction(1, 3))) ** 2
            for r in (243, 729, 2187)]
    assert vals[0] > vals[1] > vals[2]


def test_numeric_spectrum_threads_agree(lp7):
    ks = [e.value for e in fourier_module(3, 0, 1)]
    assert numeric_spectrum(lp7, ks, 1) == numeric_spectrum(lp7, ks, 4)


def test_thread_count(monkeypatch):
    monkeypatch.delenv("PADIC_MODELSET_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("PADIC_MODELSET_THREADS", "3")
    assert thread_count() == 3
    with pytest.raises(ValueError):
        thread_count(0)


def test_chair_patch_density():
    p = chair_patch(4)
    assert abs(fourier_bohr_numeric(p, (0, 0))) == pytest.approx(1)
    assert len(dyadic_grid(2)) == 25


# -- comparison ------------------------------------------------------------


def test_spectrum_compare_small(lp7):
    rep = spectrum_compare(lp7, (1, 1, 1), fourier_module(4, 0, 2), strongest=10)
    assert rep["schema"] == SCHEMA
    assert rep["scored"] == 10
    assert rep["max_rel_err"] <= 0.05
    assert all(r.numeric >= 0 and r.analytic >= 0 for r in rep["rows"])


def test_crystal_control():
    p = lattice_patch(500)
    rep = spectrum_compare(p, (1, 1, 1), fourier_module(2, 0, 2), strongest=3)
    top = [Fraction(m, 3**n) for m, n in rep["strongest"]]
    assert top == [0, 1, 2]
    for r in rep["rows"]:
        if r.k.denominator == 1:
            assert r.numeric == pytest.approx(1, abs=1e-2)


def test_csv_header(lp7):
    rep = spectrum_compare(lp7, None, fourier_module(2, 0, 1), strongest=2)
    text = rows_to_csv(rep["rows"])
    lines = text.splitlines()
    assert lines[0] == "m,n,k,analytic_re,analytic_im_abs2,numeric_abs2,rel_err"
    assert len(lines) == 11

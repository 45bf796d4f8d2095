"""Autocorrelation and Bragg spectra of weighted Dirac combs.

Analytic amplitudes are available for the 3-adic limit-periodic chain;
every other system only gets the finite-patch Fourier-Bohr estimator
``(1/vol) sum_t h_t exp(-2 pi i k.t)``.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

SCHEMA = "padic-modelset/spectrum/1"
DEFAULT_WEIGHTS = {"a": 1.0, "b": 1.0, "c": 1.0}


@dataclass
class WeightedPointPatch:
    """Points of ``Lambda`` inside the ball of radius ``radius`` with per-point weights."""

    points: np.ndarray  # (N, dim), sorted lexicographically
    weights: np.ndarray
    radius: float
    dim: int = 1
    labels: tuple = field(default=(), repr=False)
    vol: float | None = None  # overrides the ball volume, e.g. for square patches

    def __post_init__(self):
        pts = np.asarray(self.points).reshape(-1, self.dim)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(pts) != len(w):
            raise ValueError("points and weights differ in length")
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        norm = np.abs(pts[:, 0]) if self.dim == 1 else np.hypot(pts[:, 0].astype(float), pts[:, 1].astype(float))
        if self.vol is None and np.any(norm > self.radius + 1e-12):
            raise ValueError("patch points must lie in the ball of the given radius")
        order = np.lexsort(pts.T[::-1]) if len(pts) else np.arange(0)
        self.points = pts[order]
        self.weights = w[order]
        if self.labels:
            self.labels = tuple(self.labels[i] for i in order)

    @property
    def volume(self) -> float:
        if self.vol is not None:
            return self.vol
        return 2.0 * self.radius if self.dim == 1 else math.pi * self.radius**2

    def scaled(self, s: float) -> "WeightedPointPatch":
        return WeightedPointPatch(self.points, self.weights * s, self.radius, self.dim, self.labels, self.vol)

    @classmethod
    def from_labelled(cls, labelled: Iterable[tuple], weights: dict, radius: float, dim: int = 1):
        """``labelled`` holds (coordinate, label); points outside the ball are dropped."""
        pts, ws, labs = [], [], []
        for x, lab in labelled:
            v = tuple(x) if dim == 2 else (x,)
            r = abs(v[0]) if dim == 1 else math.hypot(v[0], v[1])
            if r <= radius:
                pts.append(v)
                ws.append(weights[lab])
                labs.append(lab)
        arr = np.array(pts, dtype=np.int64 if all(isinstance(c, (int, np.integer)) for p in pts for c in p) else float)
        return cls(arr.reshape(-1, dim), np.array(ws, dtype=float), radius, dim, tuple(labs))


def lattice_patch(radius: int, weight: float = 1.0) -> WeightedPointPatch:
    xs = np.arange(-radius, radius + 1, dtype=np.int64)
    return WeightedPointPatch(xs.reshape(-1, 1), np.full(len(xs), weight), radius)


def _weights(h) -> dict:
    if h is None:
        return dict(DEFAULT_WEIGHTS)
    if isinstance(h, dict):
        return {k: float(v) for k, v in h.items()}
    return dict(zip("abc", (float(v) for v in h)))


def substitution_patch(name: str, radius: int, h=None) -> WeightedPointPatch:
    """Patch of a catalogued 1D substitution with natural lengths (all 1 for constant length)."""
    from .limitperiodic import LENGTHS, substitution_anchors
    from .substitution import fixed_point_patch, geometric_points, named_system

    if name == "limitperiodic3":
        anc = substitution_anchors(radius)
        return WeightedPointPatch.from_labelled(((x, t) for t, xs in anc.items() for x in xs), _weights(h), radius)
    ns = named_system(name)
    if name == "thuemorse" and h is None:
        h = {"a": 1.0, "b": -1.0}
    n = 1
    while True:
        patch = fixed_point_patch(ns.system, ns.seed, n)
        if min(len(patch.left_word), len(patch.right_word)) > radius:
            break
        n += 1
    w = _weights(h) if isinstance(h, dict) else dict(zip(ns.system.alphabet, (float(v) for v in (h or [1.0] * 3))))
    if name == "limitquasi":
        from .limitquasi import generate_sequence_exact
        seq = generate_sequence_exact(n)
        lab = [(float(x), t) for t in ("a", "b") for x in seq.physical(t)]
        return WeightedPointPatch.from_labelled(lab, w, radius)
    lengths = LENGTHS if name.startswith("variant") else {c: 1 for c in ns.system.alphabet}
    pts = geometric_points(patch, lengths, ns.anchor)
    return WeightedPointPatch.from_labelled(pts.labelled(), w, radius)


def chair_patch(level: int, h: Sequence[float] | None = None) -> WeightedPointPatch:
    """Integer points of ``T^level C`` weighted by orientation class (default all 1).

    The normalising volume is the area ``4^level`` of the square, not a ball.
    """
    from .chair import chair_recursion

    state = chair_recursion(level)
    h = list(h) if h is not None else [1.0] * 4
    pts = np.concatenate(state.level(level))
    ws = np.concatenate([np.full(len(p), h[k]) for k, p in enumerate(state.level(level))])
    radius = float(np.max(np.hypot(pts[:, 0], pts[:, 1]))) if len(pts) else 0.0
    return WeightedPointPatch(pts, ws, radius, 2, vol=float(4**level))


# ---------------------------------------------------------------------------
# autocorrelation


@dataclass
class AutocorrelationApprox:
    coefficients: dict
    radius: float
    cutoff: float

    def __getitem__(self, z) -> float:
        return self.coefficients.get(z, 0.0)


def autocorrelation(patch: WeightedPointPatch, cutoff: float) -> AutocorrelationApprox:
    """``gamma(z) = (1/vol) sum_{t - s = z} h_t h_s`` for ``|z| <= cutoff``."""
    if cutoff > 2 * patch.radius:
        raise ValueError("cutoff must not exceed twice the radius")
    if len(patch.points) == 0 or patch.volume == 0:
        return AutocorrelationApprox({}, patch.radius, cutoff)
    pts, w = patch.points, patch.weights
    coeffs: dict = {}
    if np.issubdtype(pts.dtype, np.integer):
        lo = pts.min(axis=0)
        shape = tuple(int(s) for s in pts.max(axis=0) - lo + 1)
        grid = np.zeros(shape)
        np.add.at(grid, tuple((pts - lo).T), w)
        # correlation via zero-padded FFT, exact up to rounding on integer supports
        full = tuple(2 * s - 1 for s in shape)
        axes = list(range(len(full)))
        f = np.fft.rfftn(grid, full, axes=axes)
        corr = np.fft.irfftn(f * np.conj(f), full, axes=axes)
        c = int(math.floor(cutoff))
        for off in np.ndindex(*(2 * c + 1,) * patch.dim):
            z = tuple(o - c for o in off)
            if patch.dim == 2 and math.hypot(*z) > cutoff:
                continue
            if any(abs(zz) >= s for zz, s in zip(z, shape)):
                continue
            val = corr[tuple(zz % n for zz, n in zip(z, full))] / patch.volume
            if abs(val) > 1e-12:
                coeffs[z if patch.dim == 2 else z[0]] = float(round(val, 12))
    else:
        diff = pts[:, None, :] - pts[None, :, :]
        prod = w[:, None] * w[None, :]
        for d, p in zip(diff.reshape(-1, patch.dim), prod.reshape(-1)):
            if np.linalg.norm(d) <= cutoff:
                key = tuple(round(float(x), 9) for x in d)
                key = key if patch.dim == 2 else key[0]
                coeffs[key] = coeffs.get(key, 0.0) + p / patch.volume
    return AutocorrelationApprox(coeffs, patch.radius, cutoff)


# ---------------------------------------------------------------------------
# Fourier module of the 3-adic chain


@dataclass(frozen=True, order=True)
class FourierModuleElement:
    m: int
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.n >= 3 and self.m % 3 == 0:
            raise ValueError(f"({self.m}, {self.n}) is not canonical: 3 divides m")

    @property
    def value(self) -> Fraction:
        return Fraction(self.m, 3**self.n)

    @classmethod
    def of(cls, k) -> "FourierModuleElement":
        k = Fraction(k)
        den = k.denominator
        n = 0
        while den % 3 == 0:
            den //= 3
            n += 1
        if den != 1:
            raise ValueError(f"{k} has a denominator that is not a power of 3")
        n = max(n, 2)
        return cls(int(k * 3**n), n)


def fourier_module(n_max: int, lo=0, hi=1) -> list[FourierModuleElement]:
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    lo, hi = Fraction(lo), Fraction(hi)
    out = []
    for n in range(2, n_max + 1):
        q = 3**n
        for m in range(math.ceil(lo * q), math.floor(hi * q) + 1):
            if n == 2 or m % 3:
                out.append(FourierModuleElement(m, n))
    out.sort(key=lambda e: e.value)
    return out


def amplitudes_3adic(e: FourierModuleElement) -> tuple[complex, complex, complex]:
    m, n = e.m, e.n
    s = (-1) ** (m % 2) / 2
    scale = 3.0**-n
    inner_minus = cmath.exp(-1j * math.pi * (m % 6) / 3) + s
    inner_plus = cmath.exp(1j * math.pi * (m % 6) / 3) + s
    # phases reduced mod 2 * 3^n (resp. 2 * 3^(n-1)) before leaving the integers
    ph_a = cmath.exp(1j * math.pi * (m % (2 * 3**n)) / 3**n)
    ph_bc = cmath.exp(-1j * math.pi * (m % (2 * 3 ** (n - 1))) / 3 ** (n - 1))
    return scale * ph_a * inner_minus, scale * ph_bc * inner_minus, scale * ph_bc * inner_plus


def intensity(e: FourierModuleElement, h=None) -> float:
    h = _weights(h)
    a, b, c = amplitudes_3adic(e)
    return abs(h["a"] * a + h["b"] * b + h["c"] * c) ** 2


# ---------------------------------------------------------------------------
# numeric estimator


def _phase_turns(points: np.ndarray, k) -> np.ndarray:
    """``k.t mod 1`` per point, exact for rational ``k`` on integer points."""
    ks = k if isinstance(k, (tuple, list)) else (k,)
    if np.issubdtype(points.dtype, np.integer) and all(isinstance(x, (int, Fraction)) for x in ks):
        ks = [Fraction(x) for x in ks]
        den = math.lcm(*(x.denominator for x in ks))
        acc = np.zeros(len(points), dtype=object if den > 2**20 else np.int64)
        for j, x in enumerate(ks):
            num = int(x * den) % den
            acc = (acc + (points[:, j].astype(acc.dtype) % den) * num) % den
        return acc.astype(float) / den
    t = np.zeros(len(points))
    for j, x in enumerate(ks):
        t = t + points[:, j].astype(float) * float(x)
    return np.mod(t, 1.0)


def fourier_bohr_numeric(patch: WeightedPointPatch, k) -> complex:
    if patch.radius < 1:
        raise ValueError("patch radius must be at least 1")
    if len(patch.points) == 0:
        return 0j
    turns = _phase_turns(patch.points, k)
    terms = patch.weights * np.exp(-2j * np.pi * turns)
    # points are kept sorted, so the summation order is fixed
    return complex(math.fsum(terms.real), math.fsum(terms.imag)) / patch.volume


def thread_count(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("PADIC_MODELSET_THREADS")
        threads = int(env) if env else 1
    if threads < 1:
        raise ValueError("thread count must be positive")
    return threads


def numeric_spectrum(patch: WeightedPointPatch, ks: Sequence, threads: int | None = None) -> list[tuple]:
    """``[(k, |estimate|^2)]`` in the order of ``ks``."""
    n = thread_count(threads)
    if n == 1:
        vals = [fourier_bohr_numeric(patch, k) for k in ks]
    else:
        with ThreadPoolExecutor(n) as ex:
            vals = list(ex.map(lambda k: fourier_bohr_numeric(patch, k), ks))
    return [(k, abs(v) ** 2) for k, v in zip(ks, vals)]


def dyadic_grid(n_max: int, kmax: int = 1) -> list[tuple[Fraction, Fraction]]:
    """2D wave vectors ``(m1, m2)/2^n_max`` in ``[0, kmax]^2``."""
    q = 2**n_max
    return [(Fraction(i, q), Fraction(j, q)) for i in range(kmax * q + 1) for j in range(kmax * q + 1)]


@dataclass
class SpectrumEntry:
    k: object
    analytic: float | None
    amplitude: complex | None
    numeric: float
    rel_err: float | None
    m: int | None = None
    n: int | None = None


def spectrum_compare(patch: WeightedPointPatch, h, elements: Sequence[FourierModuleElement], strongest: int = 20,
                     floor: float = 1e-3, threads: int | None = None) -> dict:
    """Analytic against numeric intensities; the summary covers the ``strongest`` analytic peaks.

    Peaks below ``floor`` times the maximum analytic intensity are tabulated
    but not scored.
    """
    h = _weights(h)
    elements = sorted(set(elements), key=lambda e: e.value)
    amp = {e: sum(h[t] * a for t, a in zip("abc", amplitudes_3adic(e))) for e in elements}
    analytic = {e: abs(amp[e]) ** 2 for e in elements}
    numeric = dict(zip(elements, (v for _, v in numeric_spectrum(patch, [e.value for e in elements], threads))))
    top = sorted(elements, key=lambda e: (-round(analytic[e], 12), e.value))[:strongest]
    imax = max(analytic.values(), default=0.0)
    rows, scored = [], []
    for e in elements:
        a, num = analytic[e], numeric[e]
        rel = abs(num - a) / a if a > 0 else None
        rows.append(SpectrumEntry(e.value, a, amp[e], num, rel, e.m, e.n))
        if e in top and a >= floor * imax:
            scored.append(rel)
    return {
        "schema": SCHEMA,
        "radius": patch.radius,
        "weights": h,
        "rows": rows,
        "strongest": [[e.m, e.n] for e in top],
        "max_rel_err": max(scored, default=0.0),
        "scored": len(scored),
    }


def amplitude_assignment_check(patch_by_type: dict[str, WeightedPointPatch], elements: Sequence[FourierModuleElement]) -> dict:
    """Match each analytic amplitude formula to the per-type numeric amplitudes.

    Returns, per formula index, the type whose numeric amplitudes it fits
    best together with the worst absolute deviation.
    """
    out = {}
    for idx in range(3):
        best = None
        for t, p in patch_by_type.items():
            dev = max(abs(amplitudes_3adic(e)[idx] - fourier_bohr_numeric(p, e.value)) for e in elements)
            if best is None or dev < best[1]:
                best = (t, dev)
        out["abc"[idx]] = {"matches": best[0], "max_abs_dev": best[1]}
    return out


def rows_to_csv(rows: Sequence[SpectrumEntry]) -> str:
    """Columns: Re of the weighted analytic amplitude, analytic intensity, numeric intensity."""
    lines = ["m,n,k,analytic_re,analytic_im_abs2,numeric_abs2,rel_err"]
    for r in rows:
        lines.append(",".join([
            "" if r.m is None else str(r.m),
            "" if r.n is None else str(r.n),
            str(r.k) if not isinstance(r.k, tuple) else " ".join(str(x) for x in r.k),
            "" if r.amplitude is None else f"{r.amplitude.real:.17g}",
            "" if r.analytic is None else f"{r.analytic:.17g}",
            f"{r.numeric:.17g}",
            "" if r.rel_err is None else f"{r.rel_err:.17g}",
        ]))
    return "\n".join(lines) + "\n"

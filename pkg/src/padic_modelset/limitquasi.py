"""Limit-quasiperiodic example: a -> aab, b -> abab with inflation 2 + sqrt2.

Left end points live in Z[sqrt2]; sending ``a + b*sqrt2`` to ``(a, b)`` turns
multiplication by the inflation into the integer matrix ``phi``. The
internal space is ``R x`` (completion of Z^2 along ``phi``); the Euclidean
coordinate of a lattice point ``(m, n)`` is its offset ``beta = n - m/sqrt2``
along ``(0, 1)`` after removing the component along the expanding
eigenvector ``(sqrt2, 1)``. Multiplication by the inflation acts on ``beta``
as multiplication by the conjugate ``2 - sqrt2``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cutproject import PHI, beta_of
from .exactnum import LAMBDA, QuadInt, QuadRational, sign_sqrt2
from .padic import MatrixFiltration
from .substitution import GeometricPointSets

MU = QuadRational(2, -1)  # conjugate eigenvalue, the contraction on beta
MAX_STEPS = 14
MAX_DEPTH = 20

# left end offsets of the sub-tiles: (source type, offset, target type)
BRANCHES = (
    ("a", QuadInt(0, 0), "a"),
    ("a", QuadInt(1, 0), "a"),
    ("b", QuadInt(0, 0), "a"),
    ("b", QuadInt(1, 1), "a"),
    ("a", QuadInt(2, 0), "b"),
    ("b", QuadInt(1, 0), "b"),
    ("b", QuadInt(2, 1), "b"),
)


@dataclass(frozen=True)
class PhiData:
    phi: tuple = PHI.rows()
    eigenvalues: tuple = (QuadInt(2, 1), QuadInt(2, -1))
    eigenvector: tuple = (QuadInt(0, 1), QuadInt(1, 0))
    complement: tuple = (0, 1)

    def check(self) -> bool:
        (a, b), (c, d) = self.phi
        vx, vy = self.eigenvector
        lam = self.eigenvalues[0]
        return (a * vx + b * vy == lam * vx) and (c * vx + d * vy == lam * vy) and a * d - b * c == 2


def lift_to_lattice(x) -> tuple[int, int]:
    x = QuadInt.coerce(x)
    return (x.a, x.b)


def strip_beta(v) -> QuadRational:
    return beta_of(v)


def sign_sqrt2_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact sign of ``a + b*sqrt2`` for integer arrays."""
    a = np.asarray(a, dtype=object) if np.max(np.abs(a), initial=0) > 2**30 else np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=a.dtype)
    sa, sb = np.sign(a), np.sign(b)
    mag = np.sign(a * a - 2 * b * b)  # >0: |a| dominates
    return np.where(sb == 0, sa, np.where(sa == 0, sb, np.where(sa == sb, sa, np.where(mag > 0, sa, sb)))).astype(int)


# strips in beta as (lo, hi, lo_open, hi_open)
FULL_STRIP = (QuadRational(-1, -1), QuadRational(0, 0), False, False)
# offset -sqrt2/2 and extent 1 + sqrt2/2, taken open (the lower edge holds the non-point (2, -1))
INNER_STRIP = (QuadRational(-1, -1), QuadRational(0, Fraction(-1, 2)), True, True)
# what the lifted sequence actually fills: width 1, the lower edge holds the non-point (1, -1)
VALID_STRIP = (QuadRational(-1, Fraction(-1, 2)), QuadRational(0, Fraction(-1, 2)), True, False)


def in_strip(v, strip=FULL_STRIP) -> bool:
    lo, hi, lo_open, hi_open = strip
    b = beta_of(v)
    ok_lo = lo < b if lo_open else lo <= b
    ok_hi = b < hi if hi_open else b <= hi
    return ok_lo and ok_hi


# ---------------------------------------------------------------------------
# sequence


@dataclass
class QuasiSequence:
    steps: int
    lift_a: np.ndarray
    lift_b: np.ndarray

    @property
    def extent(self) -> tuple[QuadInt, QuadInt]:
        lam_n = LAMBDA**self.steps
        return (-(lam_n * QuadInt(0, 1)), lam_n)

    def points(self) -> GeometricPointSets:
        per = {
            "a": sorted(QuadInt(int(m), int(n)) for m, n in self.lift_a),
            "b": sorted(QuadInt(int(m), int(n)) for m, n in self.lift_b),
        }
        return GeometricPointSets(per, "left", self.extent)

    def lifts(self) -> dict[str, set]:
        return {"a": {(int(m), int(n)) for m, n in self.lift_a}, "b": {(int(m), int(n)) for m, n in self.lift_b}}

    def physical(self, t: str) -> np.ndarray:
        arr = self.lift_a if t == "a" else self.lift_b
        return arr[:, 0] + math.sqrt(2) * arr[:, 1]


def _phi(arr: np.ndarray) -> np.ndarray:
    return np.stack([2 * arr[:, 0] + 2 * arr[:, 1], arr[:, 0] + 2 * arr[:, 1]], axis=1)


def generate_sequence_exact(n: int) -> QuasiSequence:
    """Left end points after ``n`` inflations of the seed ``b|a`` (origin at the junction)."""
    if not 0 <= n <= MAX_STEPS:
        raise ValueError(f"steps must lie in [0, {MAX_STEPS}]")
    la = np.array([[0, 0]], dtype=np.int64)
    lb = np.array([[0, -1]], dtype=np.int64)
    for _ in range(n):
        pa, pb = _phi(la), _phi(lb)
        new = {"a": [], "b": []}
        for src, off, dst in BRANCHES:
            base = pa if src == "a" else pb
            new[dst].append(base + np.array([off.a, off.b], dtype=np.int64))
        out = {}
        for t in ("a", "b"):
            cat = np.concatenate(new[t])
            if len(np.unique(cat, axis=0)) != len(cat):
                raise AssertionError(f"recursion branches for type {t} overlap")
            out[t] = cat
        la, lb = out["a"], out["b"]
    if len(np.unique(np.concatenate([la, lb]), axis=0)) != len(la) + len(lb):
        raise AssertionError("types a and b overlap")
    order_a = np.argsort(la[:, 0] + math.sqrt(2) * la[:, 1], kind="stable")
    order_b = np.argsort(lb[:, 0] + math.sqrt(2) * lb[:, 1], kind="stable")
    return QuasiSequence(n, la[order_a], lb[order_b])


def strip_violations(seq: QuasiSequence) -> list[tuple[int, int]]:
    """Lifted points whose beta leaves the full strip ``[-1-sqrt2, 0]`` (exact)."""
    pts = np.concatenate([seq.lift_a, seq.lift_b])
    m, n = pts[:, 0], pts[:, 1]
    # 2*beta = 2n - m*sqrt2 <= 0 and 2*beta + 2 + 2*sqrt2 >= 0
    upper = sign_sqrt2_array(2 * n, -m) <= 0
    lower = sign_sqrt2_array(2 * n + 2, 2 - m) >= 0
    bad = pts[~(upper & lower)]
    return [(int(a), int(b)) for a, b in bad]


def _lattice_in_strip(lo: QuadRational, hi: QuadRational, x_lo: QuadInt, x_hi: QuadInt, strip) -> list[tuple]:
    """Lattice points with physical coordinate in ``[x_lo, x_hi)`` and beta in ``strip``."""
    r2 = math.sqrt(2)
    blo, bhi = float(strip[0]) - 1e-9, float(strip[1]) + 1e-9
    flo, fhi = float(x_lo), float(x_hi)
    out = []
    for n in range(math.floor((flo + r2 * blo) / (2 * r2)) - 1, math.ceil((fhi + r2 * bhi) / (2 * r2)) + 2):
        # beta = n - m/sqrt2 pins m to a window of width about sqrt2 * (strip width)
        m_lo = max(math.floor(r2 * (n - bhi)), math.floor(flo - r2 * n)) - 1
        m_hi = min(math.ceil(r2 * (n - blo)), math.ceil(fhi - r2 * n)) + 1
        for m in range(m_lo, m_hi + 1):
            x = QuadInt(m, n)
            if x_lo <= x < x_hi and in_strip((m, n), strip):
                out.append((m, n))
    return out


def connected(points: set) -> bool:
    if not points:
        return True
    start = next(iter(points))
    seen = {start}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nb in points and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return len(seen) == len(points)


def strip_census(n: int, strip=FULL_STRIP) -> tuple[list[tuple], set]:
    seq = generate_sequence_exact(n)
    lifts = seq.lifts()
    lo, hi = seq.extent
    return _lattice_in_strip(strip[0], strip[1], lo, hi, strip), lifts["a"] | lifts["b"]


def empirical_substrip(n: int) -> dict:
    """Longest beta-run of full-strip lattice points that are all sequence lifts.

    Bounds are the betas of the neighbouring non-sequence points (excluded).
    """
    pts, seq = strip_census(n)
    ranked = sorted(pts, key=lambda v: float(beta_of(v)))
    best, start = None, None
    for i, v in enumerate(ranked):
        if v in seq:
            if start is None:
                start = i
            length = float(beta_of(v)) - float(beta_of(ranked[start]))
            if best is None or length > best[0]:
                best = (length, start, i)
        else:
            start = None
    if best is None:
        return {"n": n, "lower": None, "upper": None}
    _, i0, i1 = best
    below = ranked[i0 - 1] if i0 > 0 else None
    above = ranked[i1 + 1] if i1 + 1 < len(ranked) else None
    return {
        "n": n,
        "lower_excluded": str(beta_of(below)) if below else None,
        "lower_point": list(below) if below else None,
        "upper_excluded": str(beta_of(above)) if above else None,
        "upper_point": list(above) if above else None,
        "lowest_member": str(beta_of(ranked[i0])),
        "highest_member": str(beta_of(ranked[i1])),
    }


def inner_strip_connectivity(n: int, remove: tuple[int, int] | None = None, strip=INNER_STRIP) -> dict:
    """Are the lattice points of ``strip`` sequence lifts, and do they form a connected staircase?

    ``remove`` drops one point from both sets before the connectivity tests.
    """
    if not 0 <= n <= 12:
        raise ValueError("n must lie in [0, 12]")
    inner, allpts = strip_census(n, strip)
    missing = sorted(v for v in inner if v not in allpts)
    inner_set = set(inner)
    if remove is not None:
        inner_set.discard(tuple(remove))
        allpts = allpts - {tuple(remove)}
    return {
        "n": n,
        "strip": [str(strip[0]), str(strip[1])],
        "strip_points": len(inner),
        "not_sequence_points": [list(v) for v in missing],
        "strip_points_are_sequence_points": not missing,
        "sequence_connected": connected(allpts),
        "strip_connected": connected(inner_set),
        "removed": list(remove) if remove is not None else None,
    }


# ---------------------------------------------------------------------------
# IFS windows
#
# Interval endpoints are stored as integer pairs (p, q) meaning (p + q*sqrt2)/2;
# every endpoint reachable from the hulls has this form.

def _half(x: QuadRational) -> tuple[int, int]:
    y = x * 2
    if y.a.denominator != 1 or y.b.denominator != 1:
        raise ValueError(f"{x} is not in (1/2)Z[sqrt2]")
    return (int(y.a), int(y.b))


def _key(e: tuple[int, int]) -> float:
    return (e[0] + e[1] * math.sqrt(2)) / 2


def _cmp(x: tuple[int, int], y: tuple[int, int]) -> int:
    return sign_sqrt2(x[0] - y[0], x[1] - y[1])


def _contract(e: tuple[int, int], shift: tuple[int, int]) -> tuple[int, int]:
    """``(2 - sqrt2) * e + shift`` on half-integer pairs."""
    p, q = e
    return (2 * p - 2 * q + shift[0], 2 * q - p + shift[1])


def _to_q(e: tuple[int, int]) -> QuadRational:
    return QuadRational(Fraction(e[0], 2), Fraction(e[1], 2))


HULL = {
    "a": (_half(QuadRational(-1, Fraction(-1, 2))), _half(QuadRational(0, 0))),
    "b": (_half(QuadRational(-1, -1)), _half(QuadRational(-1, 0))),
}
# inside the valid strip every lattice point is a sequence point; above beta = -1 it
# cannot be of type b (outside the b hull), so (-1, -sqrt2/2) x G lies in the a window
INNER_SEED = {
    "a": [(_half(QuadRational(-1, 0)), _half(QuadRational(0, Fraction(-1, 2))))],
    "b": [],
}


@dataclass
class CellLayer:
    """Intervals per residue class mod ``phi^level`` (sorted, pairwise disjoint after merging)."""

    level: int
    cells: dict[str, dict[tuple[int, int], list[tuple]]]

    def count(self) -> int:
        return sum(len(ivs) for per in self.cells.values() for ivs in per.values())

    def measure(self, t: str) -> QuadRational:
        total = QuadRational(0, 0)
        for ivs in self.cells[t].values():
            for lo, hi in ivs:
                total = total + _to_q(hi) - _to_q(lo)
        return total / (2**self.level)


def _merge(ivs: list[tuple]) -> list[tuple]:
    ivs = sorted(ivs, key=lambda iv: _key(iv[0]))
    out: list[list] = []
    for lo, hi in ivs:
        if out and _cmp(lo, out[-1][1]) <= 0:
            if _cmp(hi, out[-1][1]) > 0:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


def _step(layer: CellLayer, filt: MatrixFiltration, merge: bool) -> CellLayer:
    lv = layer.level + 1
    new: dict[str, dict] = {"a": {}, "b": {}}
    for src, off, dst in BRANCHES:
        shift = _half(beta_of((off.a, off.b)))
        for r, ivs in layer.cells[src].items():
            w = PHI.apply(r)
            rr = filt.reduce((w[0] + off.a, w[1] + off.b), lv)
            bucket = new[dst].setdefault(rr, [])
            for lo, hi in ivs:
                bucket.append((_contract(lo, shift), _contract(hi, shift)))
    if merge:
        new = {t: {r: _merge(ivs) for r, ivs in per.items()} for t, per in new.items()}
    else:
        new = {t: {r: sorted(set(ivs), key=lambda iv: _key(iv[0])) for r, ivs in per.items()} for t, per in new.items()}
    return CellLayer(lv, new)


@dataclass
class QuasiWindows:
    depth: int
    outer: CellLayer
    inner: list[CellLayer]
    counts: list[int] = field(default_factory=list)

    def contains_outer(self, t: str, v) -> bool:
        return _lookup(self.outer, t, v, closed=True)

    def contains_inner(self, t: str, v) -> bool:
        return any(_lookup(layer, t, v, closed=False) for layer in self.inner)

    def outer_measure(self, t: str) -> QuadRational:
        return self.outer.measure(t)


_FILT = MatrixFiltration(PHI)


def _lookup(layer: CellLayer, t: str, v, closed: bool) -> bool:
    r = _FILT.reduce(v, layer.level)
    ivs = layer.cells[t].get(r)
    if not ivs:
        return False
    b = _half(beta_of(v))
    for lo, hi in ivs:
        if closed:
            if _cmp(lo, b) <= 0 <= _cmp(hi, b):
                return True
        elif _cmp(lo, b) < 0 < _cmp(hi, b):
            return True
    return False


def ifs_windows(depth: int) -> QuasiWindows:
    """Outer cells ``F^depth(hull x G)`` and inner cells ``U_{j <= depth} F^j(seed x G)``."""
    if not 0 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must lie in [0, {MAX_DEPTH}]")
    outer = CellLayer(0, {t: {(0, 0): [HULL[t]]} for t in ("a", "b")})
    inner = CellLayer(0, {t: ({(0, 0): list(INNER_SEED[t])} if INNER_SEED[t] else {}) for t in ("a", "b")})
    inner_layers = [inner]
    counts = [outer.count()]
    for _ in range(depth):
        outer = _step(outer, _FILT, merge=True)
        inner = _step(inner, _FILT, merge=False)
        inner_layers.append(inner)
        counts.append(outer.count())
    return QuasiWindows(depth, outer, inner_layers, counts)


def _union_1d(layer: CellLayer) -> list[tuple[float, float]]:
    ivs = [(_key(lo), _key(hi)) for per in layer.cells.values() for ivs in per.values() for lo, hi in ivs]
    ivs.sort()
    out: list[list[float]] = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [tuple(x) for x in out]


def hausdorff_1d(a: list[tuple[float, float]], b: list[tuple[float, float]]) -> float:
    """Hausdorff distance between two finite unions of closed intervals."""

    def dist(x: float, ivs) -> float:
        return min(0.0 if lo <= x <= hi else min(abs(x - lo), abs(x - hi)) for lo, hi in ivs)

    def one_way(p, q) -> float:
        cand = [e for iv in p for e in iv]
        # gaps of q inside p
        for (l0, h0), (l1, h1) in zip(q, q[1:]):
            mid = (h0 + l1) / 2
            if any(lo <= mid <= hi for lo, hi in p):
                cand.append(mid)
        return max(dist(x, q) for x in cand)

    return max(one_way(a, b), one_way(b, a))


def sandwich_check(n: int, depth: int) -> dict:
    """``Lambda(U) <= Lambda <= Lambda(Omega)`` per type on the physical span of the patch."""
    seq = generate_sequence_exact(n)
    win = ifs_windows(depth)
    lifts = seq.lifts()
    lo, hi = seq.extent
    lattice = _lattice_in_strip(FULL_STRIP[0], FULL_STRIP[1], lo, hi, FULL_STRIP)
    report = {"n": n, "depth": depth, "lattice_points": len(lattice), "types": {}}
    ok = True
    for t in ("a", "b"):
        seq_t = {v for v in lifts[t] if lo <= QuadInt(*v) < hi}
        inner_t = {v for v in lattice if win.contains_inner(t, v)}
        outer_t = {v for v in lattice if win.contains_outer(t, v)}
        not_seq = sorted(inner_t - seq_t)
        not_outer = sorted(seq_t - outer_t)
        ok = ok and not not_seq and not not_outer
        report["types"][t] = {
            "sequence": len(seq_t),
            "inner_model": len(inner_t),
            "outer_model": len(outer_t),
            "inner_not_in_sequence": [list(v) for v in not_seq],
            "sequence_not_in_outer": [list(v) for v in not_outer],
            "discrepancy": len(outer_t - inner_t),
            "outer_measure": str(win.outer_measure(t)),
        }
    span = float(hi - lo)
    report["discrepancy_density"] = sum(v["discrepancy"] for v in report["types"].values()) / span
    report["ok"] = ok
    return report


def frequencies(seq: QuasiSequence) -> tuple[float, float]:
    na, nb = len(seq.lift_a), len(seq.lift_b)
    return na / (na + nb), nb / (na + nb)


def point_density(seq: QuasiSequence) -> float:
    """Anchors per unit length on ``[0, lambda^n)``."""
    hi = float(LAMBDA**seq.steps)
    xs = np.concatenate([seq.physical("a"), seq.physical("b")])
    return float(((xs >= 0) & (xs < hi)).sum()) / hi


def expected_measures() -> dict[str, QuadRational]:
    """Window measures that reproduce the letter densities with (x, beta) covolume 2."""
    return {"a": QuadRational(1, 0), "b": QuadRational(0, Fraction(1, 2))}

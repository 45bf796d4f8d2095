"""Cut-and-project schemes with Euclidean and profinite internal factors.

A scheme is a lattice ``L`` (here always Z or Z^2) with a physical
projection and an internal projection (the star map). Windows are finite
unions of *cells*; a cell is one part per internal factor, an
:class:`Interval` for a Euclidean line and a :class:`CosetUnion` for a
profinite factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .exactnum import IntMatrix2, QuadInt, QuadRational
from .padic import (
    Coset,
    CosetUnion,
    MatrixFiltration,
    PadicFiltration,
    padic_residue,
)

PHI = IntMatrix2(2, 2, 1, 2)


@dataclass(frozen=True)
class Interval:
    lo: QuadRational
    hi: QuadRational
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", QuadRational.coerce(self.lo))
        object.__setattr__(self, "hi", QuadRational.coerce(self.hi))
        if self.hi < self.lo or (self.hi == self.lo and (self.lo_open or self.hi_open)):
            raise ValueError(f"empty interval {self}")

    def __contains__(self, x) -> bool:
        lo_ok = self.lo < x if self.lo_open else self.lo <= x
        hi_ok = x < self.hi if self.hi_open else x <= self.hi
        return lo_ok and hi_ok

    @property
    def length(self) -> QuadRational:
        return self.hi - self.lo

    def scaled(self, factor, shift=0) -> "Interval":
        """Image under ``x -> factor*x + shift`` (``factor > 0``)."""
        return Interval(self.lo * factor + shift, self.hi * factor + shift, self.lo_open, self.hi_open)

    def __str__(self) -> str:
        return f"{'(' if self.lo_open else '['}{self.lo}, {self.hi}{')' if self.hi_open else ']'}"


@dataclass(frozen=True)
class EuclideanLine:
    kind = "euclideanLine"


@dataclass(frozen=True)
class PadicFactor:
    p: int
    dim: int = 1
    kind = "padic"

    @property
    def filtration(self) -> PadicFiltration:
        return PadicFiltration(self.p, self.dim)


@dataclass(frozen=True)
class MatrixFactor:
    theta: IntMatrix2
    kind = "profiniteByMatrix"

    @property
    def filtration(self) -> MatrixFiltration:
        return MatrixFiltration(self.theta)


Factor = EuclideanLine | PadicFactor | MatrixFactor


@dataclass(frozen=True)
class Window:
    """Union of cells; every cell has one part per internal factor."""

    cells: tuple[tuple, ...]

    @classmethod
    def single(cls, *parts) -> "Window":
        return cls((tuple(parts),))

    @classmethod
    def empty(cls) -> "Window":
        return cls(())

    def is_empty(self) -> bool:
        return not self.cells or all(
            any(isinstance(p, CosetUnion) and p.is_empty() for p in cell) for cell in self.cells
        )


def _contains(part, coord) -> bool:
    if isinstance(part, Interval):
        return coord in part
    return part.contains(coord)


@dataclass(frozen=True)
class CutProjectScheme:
    """Lattice ``Z^rank`` with a physical map and a star map into ``factors``.

    ``physical`` maps a lattice vector to its physical coordinate (an int,
    an int pair or a :class:`QuadInt`). ``star`` maps it to a tuple with one
    entry per factor: an exact real for a Euclidean line, an integer vector
    (the lattice point itself, reduced on demand) for a profinite factor.
    ``covolume`` is the covolume of the lattice in physical x Euclidean space.
    """

    name: str
    physical_dim: int
    rank: int
    factors: tuple
    physical: Callable[[tuple], object]
    star_exact: Callable[[tuple], tuple]
    covolume: object = 1
    enumerate_fn: Callable | None = field(default=None, repr=False, compare=False)

    def star(self, v: Sequence[int], level: int) -> tuple:
        """Internal coordinates of ``v`` with profinite parts truncated at ``level``."""
        out = []
        for f, c in zip(self.factors, self.star_exact(tuple(v))):
            if isinstance(f, EuclideanLine):
                out.append(c)
            else:
                out.append(f.filtration.reduce(c, level))
        return tuple(out)

    def lattice_points(self, lo, hi, window: Window | None = None) -> Iterator[tuple]:
        return self.enumerate_fn(lo, hi, window)


def star_map(scheme: CutProjectScheme, v: Sequence[int], level: int) -> tuple:
    return scheme.star(v, level)


def in_window(scheme: CutProjectScheme, window: Window, v: Sequence[int]) -> bool:
    coords = scheme.star_exact(tuple(v))
    return any(all(_contains(p, c) for p, c in zip(cell, coords)) for cell in window.cells)


def model_set_points(scheme: CutProjectScheme, windows: Window | dict, lo, hi) -> list[tuple]:
    """``(physical point, label)`` for lattice points in ``[lo, hi]`` inside a window.

    ``windows`` is one window (label ``None``) or a mapping label -> window;
    a point in several windows is reported once per label. Output is sorted
    by physical coordinate and then label.
    """
    if isinstance(windows, Window):
        windows = {None: windows}
    out = []
    seen: dict = {}
    bound = _euclid_bounds(scheme, list(windows.values()))
    for v in scheme.lattice_points(lo, hi, bound):
        x = scheme.physical(v)
        if x in seen and seen[x] != v:
            raise AssertionError(f"physical projection is not injective: {seen[x]} and {v} both map to {x}")
        seen[x] = v
        for label, w in windows.items():
            if in_window(scheme, w, v):
                out.append((x, label))
    out.sort(key=lambda t: (t[0], str(t[1])))
    return out


def _euclid_bounds(scheme: CutProjectScheme, windows: list[Window]):
    idx = [i for i, f in enumerate(scheme.factors) if isinstance(f, EuclideanLine)]
    if not idx:
        return None
    i = idx[0]
    ivs = [cell[i] for w in windows for cell in w.cells]
    if not ivs:
        return None
    return (min(iv.lo for iv in ivs), max(iv.hi for iv in ivs))


def density(scheme: CutProjectScheme, window: Window):
    """Exact density of the model set: window measure divided by covolume."""
    if window.is_empty():
        return Fraction(0)
    eu = [i for i, f in enumerate(scheme.factors) if isinstance(f, EuclideanLine)]
    pro = [i for i, f in enumerate(scheme.factors) if not isinstance(f, EuclideanLine)]
    if len(eu) > 1 or len(pro) > 1:
        raise NotImplementedError("density supports at most one factor of each kind")
    if not eu:
        total = window.cells[0][pro[0]]
        for cell in window.cells[1:]:
            total = total.union(cell[pro[0]])
        return total.haar_measure() / scheme.covolume
    e = eu[0]
    if not pro:
        return _interval_union_length([cell[e] for cell in window.cells]) / scheme.covolume
    p = pro[0]
    filt = scheme.factors[p].filtration
    # refine every cell to a common level, then merge intervals residue-wise
    level = max(cell[p].max_level() for cell in window.cells)
    per_residue: dict[tuple, list[Interval]] = {}
    for cell in window.cells:
        for c in cell[p].normalized().cosets:
            for r in _descendants(filt, c, level):
                per_residue.setdefault(r, []).append(cell[e])
    length = sum((_interval_union_length(ivs) for ivs in per_residue.values()), QuadRational(0, 0))
    return length * filt.coset_measure(level) / scheme.covolume


def _descendants(filt, c: Coset, level: int) -> Iterator[tuple]:
    frontier = [c.center]
    for lv in range(c.level, level):
        frontier = [k for r in frontier for k in filt.children(r, lv)]
    return iter(frontier)


def _interval_union_length(ivs: Iterable[Interval]) -> QuadRational:
    spans = sorted((iv.lo, iv.hi) for iv in ivs)
    total = QuadRational(0, 0)
    cur_lo = cur_hi = None
    for lo, hi in spans:
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total = total + (cur_hi - cur_lo)
            cur_lo, cur_hi = lo, hi
        elif hi > cur_hi:
            cur_hi = hi
    if cur_hi is not None:
        total = total + (cur_hi - cur_lo)
    return total


# ---------------------------------------------------------------------------
# regularity


@dataclass
class RegularityVerdict:
    regular: bool
    offenders: list = field(default_factory=list)
    shift: object = 0

    def __bool__(self) -> bool:
        return self.regular


def _as_vector(x) -> tuple:
    return tuple(x) if isinstance(x, (tuple, list)) else (x,)


def regularity_check(scheme: CutProjectScheme, boundary_points: Iterable, shift=0) -> RegularityVerdict:
    """Does any (shifted) boundary point coincide with a lattice image?

    For the diagonal embeddings used here the image of ``L`` is the set of
    integer vectors, and a rational p-adic integer equals such an image iff
    it is itself an integer, so the test is exact rather than level-wise.
    """
    if any(isinstance(f, EuclideanLine) for f in scheme.factors):
        raise NotImplementedError("regularity is only decided for purely profinite internal spaces")
    sh = _as_vector(shift)
    offenders = []
    for b in boundary_points:
        bv = _as_vector(b)
        if len(sh) == 1 and len(bv) > 1:
            shv = sh * len(bv)
        else:
            shv = sh
        moved = tuple(Fraction(x) + Fraction(s) for x, s in zip(bv, shv))
        if all(m.denominator == 1 for m in moved):
            n = tuple(int(m) for m in moved)
            offenders.append(n[0] if len(n) == 1 else n)
    return RegularityVerdict(not offenders, offenders, shift)


def shift_search(scheme: CutProjectScheme, boundary_points: Sequence, candidates: Iterable) -> RegularityVerdict:
    tried = []
    for c in candidates:
        verdict = regularity_check(scheme, boundary_points, shift=c)
        if verdict:
            return verdict
        tried.append(c)
    raise ValueError(
        f"no candidate shift among {tried} avoids the lattice image; supply a deeper candidate list "
        "(for example non-integer rational p-adic integers)"
    )


def dense_check(scheme: CutProjectScheme, level: int) -> bool:
    """Every level-``level`` residue class of each profinite factor meets the lattice."""
    for i, f in enumerate(scheme.factors):
        if isinstance(f, EuclideanLine):
            continue
        filt = f.filtration
        if isinstance(filt, PadicFiltration):
            m = filt.p**level
            hit = {filt.reduce(v, level) for v in _box(scheme.rank, m)}
            if len(hit) != m**filt.dim:
                return False
        else:
            a, b, c = filt.basis(level) if level else (1, 0, 1)
            hit = {filt.reduce(v, level) for v in _box(2, max(a, c))}
            if len(hit) != a * c:
                return False
    return True


def _box(rank: int, m: int) -> Iterator[tuple]:
    if rank == 1:
        return ((n,) for n in range(m))
    return ((x, y) for x in range(m) for y in range(m))


# ---------------------------------------------------------------------------
# catalog


def _diag_enum(lo, hi, bound):
    for n in range(math.ceil(lo), math.floor(hi) + 1):
        yield (n,)


def _diag2_enum(lo, hi, bound):
    (x0, y0), (x1, y1) = lo, hi
    for x in range(math.ceil(x0), math.floor(x1) + 1):
        for y in range(math.ceil(y0), math.floor(y1) + 1):
            yield (x, y)


def beta_of(v: Sequence[int]) -> QuadRational:
    """Offset along (0, 1) in ``v = alpha*(sqrt2, 1) + beta*(0, 1)``: ``n - m/sqrt2``."""
    m, n = v
    return QuadRational(Fraction(n), Fraction(-m, 2))


def _sqrt2_enum(lo, hi, bound):
    if bound is None:
        raise ValueError("the sqrt2 scheme needs a bounded Euclidean window part")
    blo, bhi = float(bound[0]) - 1e-9, float(bound[1]) + 1e-9
    r2 = math.sqrt(2)
    lo_f, hi_f = float(QuadRational.coerce(lo)), float(QuadRational.coerce(hi))
    n_lo = math.floor((lo_f + r2 * blo) / (2 * r2)) - 1
    n_hi = math.ceil((hi_f + r2 * bhi) / (2 * r2)) + 1
    lo_q, hi_q = QuadRational.coerce(lo), QuadRational.coerce(hi)
    b_lo, b_hi = QuadRational.coerce(bound[0]), QuadRational.coerce(bound[1])
    for n in range(n_lo, n_hi + 1):
        m_lo = max(math.floor(r2 * (n - bhi)), math.floor(lo_f - r2 * n)) - 1
        m_hi = min(math.ceil(r2 * (n - blo)), math.ceil(hi_f - r2 * n)) + 1
        for m in range(m_lo, m_hi + 1):
            x = QuadInt(m, n)
            if lo_q <= x <= hi_q:
                b = beta_of((m, n))
                if b_lo <= b <= b_hi:
                    yield (m, n)


def diagonal_scheme(p: int, dim: int = 1, name: str | None = None) -> CutProjectScheme:
    factor = PadicFactor(p, dim)
    if dim == 1:
        return CutProjectScheme(name or f"diagonal-Z-{p}adic", 1, 1, (factor,), lambda v: v[0],
                                lambda v: (v,), 1, _diag_enum)
    if dim == 2:
        return CutProjectScheme(name or f"diagonal-Z2-{p}adic", 2, 2, (factor,), lambda v: tuple(v),
                                lambda v: (v,), 1, _diag2_enum)
    raise ValueError("only dimensions 1 and 2 are catalogued")


def sqrt2_phi_scheme() -> CutProjectScheme:
    """Z^2 -> R x (R x completion along phi); covolume of (x, beta) is 2."""
    return CutProjectScheme(
        "sqrt2-phi", 1, 2, (EuclideanLine(), MatrixFactor(PHI)),
        lambda v: QuadInt(v[0], v[1]),
        lambda v: (beta_of(v), v),
        2,
        _sqrt2_enum,
    )


SCHEMES: dict[str, Callable[[], CutProjectScheme]] = {
    "diagonal-Z-3adic": lambda: diagonal_scheme(3, 1),
    "diagonal-Z2-2adic": lambda: diagonal_scheme(2, 2),
    "chair": lambda: diagonal_scheme(2, 2, "chair"),
    "sqrt2-phi": sqrt2_phi_scheme,
}


def scheme_by_name(name: str) -> CutProjectScheme:
    try:
        return SCHEMES[name]()
    except KeyError:
        raise ValueError(f"unknown lattice {name!r}; choose from {sorted(SCHEMES)}") from None


def scheme_from_config(obj: dict) -> tuple[CutProjectScheme, dict[str, Window]]:
    """Load ``{"lattice": name, "physical_dim": d, "windows": {label: cosetunion-json}}``."""
    scheme = scheme_by_name(obj["lattice"])
    if "physical_dim" in obj and int(obj["physical_dim"]) != scheme.physical_dim:
        raise ValueError(f"lattice {scheme.name} has physical dimension {scheme.physical_dim}")
    windows = {}
    for label, w in obj.get("windows", {}).items():
        if any(isinstance(f, EuclideanLine) for f in scheme.factors):
            raise ValueError("JSON windows are only supported for purely profinite schemes")
        cu = CosetUnion.from_json_obj(w)
        if cu.filtration != scheme.factors[0].filtration:
            raise ValueError(f"window {label!r} lives in the wrong group")
        windows[label] = Window.single(cu)
    return scheme, windows


def padic_star(n: int, p: int, level: int) -> int:
    """Diagonal star map of an integer: its residue mod ``p^level``."""
    return padic_residue(n, p, level)

"""Chair tiling in decorated-square form.

Orientation classes ``P_k`` (k = 0..3) of the unit squares centred at
integer points are grown by the affine recursion

    P_{k,i+1} = U_l  T^i M_l T^-i ( P_{(k - n_l) mod 4, i} )

with ``T x = 2 R x + (1/2, 1/2)`` and ``R`` the quarter turn. Windows in
``(Z_2)^2`` come from the tile-level rule behind the recursion: every
square has a parent square and its orientation is the parent's plus
``n_l``. Residue classes whose orientation is forced by that rule form the
window cosets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exactnum import AffineMap2, IntMatrix2
from .padic import Coset, CosetUnion, PadicFiltration

ROT = IntMatrix2(0, -1, 1, 0)
HALF = (Fraction(1, 2), Fraction(1, 2))
T_MAP = AffineMap2.from_matrix(IntMatrix2(0, -2, 2, 0), HALF)
M_MAPS = (
    AffineMap2.identity(),
    AffineMap2.from_matrix(ROT, (1, 0)),
    AffineMap2.from_matrix(ROT @ ROT, (1, 1)),
    AffineMap2.from_matrix(ROT, (0, 1)),
)
NL = (0, 1, 2, 1)
COLORS = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a")
MAX_LEVEL = 12


def rotate(v, k: int = 1) -> tuple:
    x, y = v
    for _ in range(k % 4):
        x, y = -y, x
    return (x, y)


def conjugated_map(i: int, l: int) -> AffineMap2:
    """``T^i M_l T^-i``."""
    t = AffineMap2.identity()
    for _ in range(i):
        t = T_MAP.compose(t)
    return t.compose(M_MAPS[l]).compose(t.inverse())


def square_bounds(i: int) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """Bounding box of ``T^i C`` with ``C = [-1/2, 1/2]^2`` (it is the box itself)."""
    t = AffineMap2.identity()
    for _ in range(i):
        t = T_MAP.compose(t)
    h = Fraction(1, 2)
    corners = [t((sx * h, sy * h)) for sx in (-1, 1) for sy in (-1, 1)]
    xs, ys = [c[0] for c in corners], [c[1] for c in corners]
    return (min(xs), max(xs)), (min(ys), max(ys))


@dataclass
class ChairState:
    i_max: int
    pki: dict[tuple[int, int], np.ndarray]
    maps: dict[tuple[int, int], AffineMap2] = field(default_factory=dict, repr=False)

    def level(self, i: int) -> list[np.ndarray]:
        return [self.pki[(k, i)] for k in range(4)]

    def labels(self, i: int | None = None) -> dict[tuple[int, int], int]:
        i = self.i_max if i is None else i
        return {(int(x), int(y)): k for k in range(4) for x, y in self.pki[(k, i)]}


def _apply(f: AffineMap2, pts: np.ndarray) -> np.ndarray:
    if not f.is_integral():
        raise ArithmeticError(f"map {f} does not preserve Z^2; the recursion is mis-transcribed")
    a, b, c, d = (int(v) for v in f.linear)
    tx, ty = (int(v) for v in f.translation)
    out = np.empty_like(pts)
    out[:, 0] = a * pts[:, 0] + b * pts[:, 1] + tx
    out[:, 1] = c * pts[:, 0] + d * pts[:, 1] + ty
    return out


def _canonical(pts: np.ndarray) -> np.ndarray:
    if len(pts) == 0:
        return pts.reshape(0, 2)
    pts = np.unique(pts, axis=0)
    return pts


def chair_recursion(i_max: int) -> ChairState:
    if not 0 <= i_max <= MAX_LEVEL:
        raise ValueError(f"i_max must lie in [0, {MAX_LEVEL}]")
    empty = np.zeros((0, 2), dtype=np.int64)
    pki = {(0, 0): np.array([[0, 0]], dtype=np.int64)}
    for k in (1, 2, 3):
        pki[(k, 0)] = empty
    maps = {}
    for i in range(i_max):
        for l in range(4):
            maps[(i, l)] = conjugated_map(i, l)
        for k in range(4):
            parts = [_apply(maps[(i, l)], pki[((k - NL[l]) % 4, i)]) for l in range(4)]
            pki[(k, i + 1)] = _canonical(np.concatenate(parts))
    return ChairState(i_max, pki, maps)


def check_invariants(state: ChairState) -> dict:
    """Counts, disjointness and the partition of the integer points of ``T^i C``."""
    rows = []
    for i in range(state.i_max + 1):
        sets = state.level(i)
        counts = [len(s) for s in sets]
        allpts = np.concatenate(sets)
        disjoint = len(np.unique(allpts, axis=0)) == len(allpts)
        (x0, x1), (y0, y1) = square_bounds(i)
        xs = np.arange(int(np.ceil(x0)), int(np.floor(x1)) + 1)
        ys = np.arange(int(np.ceil(y0)), int(np.floor(y1)) + 1)
        grid = np.array([(x, y) for x in xs for y in ys], dtype=np.int64).reshape(-1, 2)
        partition = disjoint and len(grid) == len(allpts) and bool(
            (np.unique(grid, axis=0) == np.unique(allpts, axis=0)).all()
        )
        rows.append({"level": i, "counts": counts, "total": sum(counts), "expected": 4**i,
                     "disjoint": disjoint, "partition": partition})
    ok = all(r["total"] == r["expected"] and r["partition"] for r in rows)
    return {"levels": rows, "ok": ok}


# ---------------------------------------------------------------------------
# tile-level rule and certified windows

_OFFSETS = tuple((Fraction(m(( 0, 0))[0]) - HALF[0], Fraction(m((0, 0))[1]) - HALF[1]) for m in M_MAPS)


def parent(x: tuple[int, int]) -> tuple[tuple[int, int], tuple[Fraction, Fraction]]:
    """Parent square ``c`` and offset ``d`` of ``x`` from its block centre ``T c``."""
    rx, ry = x[0] % 2, x[1] % 2
    u = ((x[0] - rx) // 2, (x[1] - ry) // 2)
    c = rotate(u, 3)
    return c, (Fraction(rx) - HALF[0], Fraction(ry) - HALF[1])


def child_label(parent_label: int, d) -> int:
    dd = rotate(d, -parent_label)
    return (parent_label + NL[_OFFSETS.index(dd)]) % 4


def rule_labels(points, known: dict) -> dict:
    """Orientation of each point from its parent's orientation in ``known``."""
    out = {}
    for x in points:
        c, d = parent(x)
        if c in known:
            out[x] = child_label(known[c], d)
    return out


@dataclass
class ChairWindows:
    omega: tuple[CosetUnion, CosetUnion, CosetUnion, CosetUnion]
    built_to_level: int
    depth: int
    undecided_classes: list[int] = field(default_factory=list)

    def measures(self) -> list[Fraction]:
        return [w.haar_measure() for w in self.omega]

    def deficit(self) -> Fraction:
        return 1 - sum(self.measures(), Fraction(0))

    def lookup(self) -> dict[tuple[int, tuple], int]:
        return {(c.level, c.center): k for k, w in enumerate(self.omega) for c in w.normalized().cosets}


def label_set_classes(depth: int) -> tuple[dict, list[int]]:
    pure, counts, _ = _classes(depth)
    return pure, counts


def _classes(depth: int) -> tuple[dict, list[int], dict]:
    """Forced orientations of residue classes mod ``2^m``, ``m <= depth``.

    Returns ``{(m, residue): k}`` for classes that become pure at level ``m``
    (their parent class was not yet pure) and the number of impure classes
    per level.
    """
    pure: dict[tuple[int, tuple], int] = {}
    impure = {(0, 0): frozenset(range(4))}
    counts = [1]
    for m in range(depth):
        nxt = {}
        step = 2**m
        for r, labels in impure.items():
            for ex in (0, 1):
                for ey in (0, 1):
                    x = (r[0] + ex * step, r[1] + ey * step)
                    c, d = parent(x)
                    cm = (c[0] % step, c[1] % step)
                    src = impure.get(cm)
                    if src is None:
                        # parent class already pure at a shallower level
                        src = frozenset([_pure_label(pure, cm, m)])
                    ls = frozenset(child_label(j, d) for j in src)
                    if len(ls) == 1:
                        pure[(m + 1, x)] = next(iter(ls))
                    else:
                        nxt[x] = ls
        impure = nxt
        counts.append(len(impure))
    return pure, counts, impure


def _pure_label(pure: dict, r: tuple, m: int) -> int:
    for lv in range(m, -1, -1):
        key = (lv, (r[0] % 2**lv, r[1] % 2**lv))
        if key in pure:
            return pure[key]
    raise KeyError(r)


def chair_windows(state: ChairState, depth: int | None = None) -> ChairWindows:
    """Certified windows: residue classes mod ``2^m`` (``m <= depth``) with forced orientation.

    ``depth`` defaults to ``i_max + 2``, the level of the cosets
    ``t + 2^i * 4 Z_2^2`` at ``i = i_max``.
    """
    depth = state.i_max + 2 if depth is None else depth
    pure, counts = label_set_classes(depth)
    per_k: list[list[Coset]] = [[], [], [], []]
    for (m, r), k in pure.items():
        per_k[k].append(Coset(r, m))
    filt = PadicFiltration(2, 2)
    omega = tuple(CosetUnion(filt, tuple(cs)).normalized() for cs in per_k)
    return ChairWindows(omega, state.i_max, depth, counts)


def literal_windows(state: ChairState) -> ChairWindows:
    """Union of ``t + 2^i * 4 Z_2^2`` over ``t`` in ``P_{k,i}``, first contribution wins."""
    filt = PadicFiltration(2, 2)
    covered: dict[int, set] = {}
    per_k: list[list[Coset]] = [[], [], [], []]
    for i in range(state.i_max + 1):
        lv = i + 2
        m = 2**lv
        for k in range(4):
            for x, y in state.pki[(k, i)]:
                r = (int(x) % m, int(y) % m)
                if any((r[0] % 2**l, r[1] % 2**l) in rs for l, rs in covered.items() if l <= lv):
                    continue
                covered.setdefault(lv, set()).add(r)
                per_k[k].append(Coset(r, lv))
    omega = tuple(CosetUnion(filt, tuple(cs)).normalized() for cs in per_k)
    return ChairWindows(omega, state.i_max, state.i_max + 2)


def boundary_report(depth: int, radius: int) -> dict:
    """Integer points of ``[-radius, radius]^2`` whose class mod ``2^depth`` is still undecided.

    Such points are the only lattice images that can lie on a window
    boundary; an empty list at growing depth is evidence for regularity,
    not a proof.
    """
    if radius >= 2 ** (depth - 1):
        raise ValueError("radius must stay below 2^(depth-1) so residues identify points")
    _, counts, impure = _classes(depth)
    m = 2**depth
    hits = sorted((x, y) for x in range(-radius, radius + 1) for y in range(-radius, radius + 1)
                  if (x % m, y % m) in impure)
    return {"depth": depth, "radius": radius, "undecided_classes": counts[-1],
            "undecided_measure": str(Fraction(counts[-1], 4**depth)), "candidates": [list(h) for h in hits]}


def periodicity_violations(state: ChairState, i: int) -> int:
    """Points of ``T^{i_max} C`` congruent mod ``2^i * 4`` to some ``t`` in ``P_{k,i}`` but labelled otherwise."""
    m = 2 ** (i + 2)
    classes = {}
    for k in range(4):
        for x, y in state.pki[(k, i)]:
            classes[(int(x) % m, int(y) % m)] = k
    bad = 0
    for k in range(4):
        for x, y in state.pki[(k, state.i_max)]:
            want = classes.get((int(x) % m, int(y) % m))
            if want is not None and want != k:
                bad += 1
    return bad


def chair_model_set(windows: ChairWindows, points) -> dict:
    """Label each integer point by the window holding its residue, else ``None``."""
    table = windows.lookup()
    levels = sorted({lv for lv, _ in table})
    out = {}
    for p in points:
        x, y = int(p[0]), int(p[1])
        lab = None
        for lv in levels:
            m = 2**lv
            k = table.get((lv, (x % m, y % m)))
            if k is not None:
                lab = k
                break
        out[(x, y)] = lab
    return out


def integer_points(i: int) -> list[tuple[int, int]]:
    (x0, x1), (y0, y1) = square_bounds(i)
    return [(x, y) for x in range(int(np.ceil(x0)), int(np.floor(x1)) + 1)
            for y in range(int(np.ceil(y0)), int(np.floor(y1)) + 1)]


def oracle_compare(windows: ChairWindows, state: ChairState, level: int) -> dict:
    truth = state.labels(level)
    got = chair_model_set(windows, integer_points(level))
    undecided = sorted(p for p, k in got.items() if k is None)
    mismatched = sorted(p for p, k in got.items() if k is not None and truth.get(p) != k)
    return {"level": level, "points": len(got), "undecided": len(undecided),
            "mismatches": len(mismatched), "first_undecided": undecided[:5], "first_mismatch": mismatched[:5]}


# ---------------------------------------------------------------------------
# rendering


def chair_svg(labelled, style: dict | None = None) -> str:
    """Squares coloured by orientation with an arrow toward the rotated upper-right corner.

    ``labelled`` is a :class:`ChairState` (top level is drawn) or an iterable
    of ``((x, y), k)``.
    """
    style = {"unit": 20, "colors": COLORS, "stroke": "#333333", "arrow": "#000000", **(style or {})}
    if isinstance(labelled, ChairState):
        items = sorted(labelled.labels().items())
    else:
        items = sorted(((int(p[0]), int(p[1])), int(k)) for p, k in labelled)
    u = style["unit"]
    if items:
        xs = [p[0] for p, _ in items]
        ys = [p[1] for p, _ in items]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0 = x1 = y0 = y1 = 0
    w, h = (x1 - x0 + 1) * u, (y1 - y0 + 1) * u
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    for (x, y), k in items:
        # svg y grows downward
        left = (x - x0) * u
        top = (y1 - y) * u
        cx, cy = left + u / 2, top + u / 2
        tx, ty = rotate((1, 1), k)
        ex, ey = cx + tx * 0.35 * u, cy - ty * 0.35 * u
        lines.append(
            f'<rect x="{left}" y="{top}" width="{u}" height="{u}" fill="{style["colors"][k]}" '
            f'stroke="{style["stroke"]}" stroke-width="0.5"/>'
        )
        lines.append(
            f'<line x1="{cx:g}" y1="{cy:g}" x2="{ex:g}" y2="{ey:g}" stroke="{style["arrow"]}" stroke-width="1"/>'
        )
        lines.append(f'<circle cx="{ex:g}" cy="{ey:g}" r="{u * 0.08:g}" fill="{style["arrow"]}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def state_to_json_obj(state: ChairState, level: int | None = None) -> dict:
    level = state.i_max if level is None else level
    return {"level": level,
            "sets": {str(k): [[int(x), int(y)] for x, y in state.pki[(k, level)]] for k in range(4)}}

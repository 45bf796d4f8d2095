"""Limit-periodic 3-adic example: a -> ab, b -> abc, c -> abcc.

Tiles are identified with their right end points. The anchors of each tile
type form a model set over Z x Z_3 whose window is a countable union of
cosets; :func:`windows_abc` truncates it at level ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cutproject import Window, diagonal_scheme, model_set_points
from .padic import Coset, CosetUnion, PadicFiltration, coset_chain_limit, padic_residue
from .substitution import fixed_point_patch, geometric_points, named_system

P = 3
TYPES = ("a", "b", "c")
LENGTHS = {"a": 1, "b": 2, "c": 3}


def center_a(k: int) -> int:
    """``1 + 3 + ... + 3^(k-2)``."""
    return (3 ** (k - 1) - 1) // 2


def center_b(k: int) -> int:
    return center_a(k) + 2


def center_c(k: int) -> int:
    """``0`` for ``k = 2``, else ``-(3 + ... + 3^(k-2))``."""
    return 0 if k == 2 else 1 - center_a(k)


CENTERS = {"a": center_a, "b": center_b, "c": center_c}

# closed-form p-adic limits of the centre chains (geometric series in Z_3)
BOUNDARY = {"a": Fraction(-1, 2), "b": Fraction(3, 2), "c": Fraction(3, 2)}


@dataclass(frozen=True)
class WindowFamily3:
    K: int
    omega_a: CosetUnion
    omega_b: CosetUnion
    omega_c: CosetUnion

    def __getitem__(self, t: str) -> CosetUnion:
        return {"a": self.omega_a, "b": self.omega_b, "c": self.omega_c}[t]

    def items(self):
        return [(t, self[t]) for t in TYPES]


def windows_abc(K: int, centers=None) -> WindowFamily3:
    if K < 2:
        raise ValueError("truncation level K must be at least 2")
    centers = centers or CENTERS
    filt = PadicFiltration(P, 1)
    fam = {t: CosetUnion(filt, tuple(Coset((centers[t](k),), k) for k in range(2, K + 1))).normalized() for t in TYPES}
    return WindowFamily3(K, fam["a"], fam["b"], fam["c"])


def truncated_measure(K: int) -> Fraction:
    """``sum_{k=2}^K 3^-k``, the measure of each truncated window."""
    return Fraction(1, 6) * (1 - Fraction(1, 3 ** (K - 1)))


def limit_measure() -> Fraction:
    first, ratio = Fraction(1, 9), Fraction(1, 3)
    return first / (1 - ratio)


def tail_measure(K: int) -> Fraction:
    """Measure of the three windows' cosets beyond level ``K``."""
    return 3 * Fraction(1, 3**K) / 2


def boundary_report(levels: int = 30) -> dict:
    """Check each chain against its closed-form limit at every level up to ``levels``."""
    out = {}
    for t in TYPES:
        ok = all(
            coset_chain_limit(CENTERS[t], P, L, start=2, gap=1).residue[0] == padic_residue(BOUNDARY[t], P, L)
            for L in range(1, levels + 1)
        )
        out[t] = {"boundary": [str(BOUNDARY[t])], "chain_limit_matches": ok,
                  "contains_integer": BOUNDARY[t].denominator == 1}
    return out


def mixed_classes(t: str, level: int, depth: int | None = None) -> list[int]:
    """Residues mod ``3^level`` whose coset meets both the window and its complement.

    The window is approximated by its truncation at ``depth`` (default
    ``level + 4``); boundary points of the untruncated window sit in exactly
    these classes.
    """
    depth = depth or level + 4
    w = windows_abc(depth)[t]
    out = []
    for r in range(3**level):
        c = Coset((r,), level)
        part = w.intersect_coset(c)
        if not part.is_empty() and part.haar_measure() < w.filtration.coset_measure(level):
            out.append(r)
    return out


def safe_radius(K: int) -> int:
    """Largest ``R`` such that no integer in ``[-R, R]`` sits in a window coset deeper than ``K``.

    A coset of level ``k > K`` has centre congruent to the boundary point
    mod ``3^K``, so only integers congruent to a boundary point mod ``3^K``
    can be missed by the truncation.
    """
    m = P**K
    best = None
    for b in set(BOUNDARY.values()):
        r = padic_residue(b, P, K)
        d = min(abs(r), abs(r - m))
        best = d if best is None else min(best, d)
    return best - 1


def substitution_anchors(R: int) -> dict[str, list[int]]:
    ns = named_system("limitperiodic3")
    n = max(1, math.ceil(math.log(max(R, 1), 3)) + 1)
    while 3**n < R:
        n += 1
    patch = fixed_point_patch(ns.system, ns.seed, n)
    pts = geometric_points(patch, LENGTHS, "right")
    return {t: [x for x in pts.per_letter[t] if -R <= x <= R] for t in TYPES}


def verify_against_substitution(K: int, R: int, strict: bool = False) -> dict:
    """Compare truncated-window model sets with substitution anchors on ``[-R, R]``.

    With ``strict`` a radius beyond :func:`safe_radius` is refused; otherwise
    the comparison runs anyway and mismatches are reported.
    """
    if R < 0:
        raise ValueError("R must be non-negative")
    safe = safe_radius(K)
    if strict and R > safe:
        raise ValueError(f"R={R} exceeds the safe radius {safe} for K={K}")
    fam = windows_abc(K)
    scheme = diagonal_scheme(P)
    model = model_set_points(scheme, {t: Window.single(fam[t]) for t in TYPES}, -R, R)
    got = {t: sorted(x for x, lab in model if lab == t) for t in TYPES}
    want = substitution_anchors(R)
    per_type = {}
    first = None
    for t in TYPES:
        g, w = set(got[t]), set(want[t])
        missing, extra = sorted(w - g), sorted(g - w)
        per_type[t] = {"model_count": len(g), "substitution_count": len(w), "missing": missing, "extra": extra}
        for x in missing + extra:
            if first is None or abs(x) < abs(first["point"]):
                first = {"type": t, "point": x, "kind": "missing" if x in missing else "extra"}
    mismatches = sum(len(v["missing"]) + len(v["extra"]) for v in per_type.values())
    return {
        "K": K,
        "R": R,
        "safe_radius": safe,
        "within_safe_radius": R <= safe,
        "types": per_type,
        "mismatches": mismatches,
        "first_mismatch": first,
        "ok": mismatches == 0,
    }


def formation_offsets(lam: int = 3) -> dict[str, list[tuple[str, int]]]:
    """Right ends of the tiles of ``sigma(t)`` relative to ``lam * x`` (``x`` = right end of ``t``)."""
    ns = named_system("limitperiodic3")
    out = {}
    for t in TYPES:
        pos = -lam * LENGTHS[t]
        items = []
        for ch in ns.system.rule[t]:
            pos += LENGTHS[ch]
            items.append((ch, pos))
        out[t] = items
    return out


def invariance_under_inflation(K: int, centers: dict | None = None) -> dict:
    """Each coset image ``3(c + 3^k Z_3) + off`` must land inside the window of its new type.

    ``centers`` replaces the closed-form centre chains (source and target
    families are both built from it), which is how perturbed families are
    tested.
    """
    family = windows_abc(K, centers)
    target = windows_abc(K + 1, centers)
    failures = []
    checked = 0
    for t, items in formation_offsets().items():
        for coset in family[t].normalized().cosets:
            for new_t, off in items:
                img = Coset((3 * coset.center[0] + off,), coset.level + 1)
                checked += 1
                if not target[new_t].contains_coset(img):
                    failures.append({"from": t, "coset": [coset.center[0], coset.level], "to": new_t,
                                     "image": [img.center[0], img.level]})
    return {"K": K, "checked": checked, "failures": failures, "ok": not failures}


def corrupted_centers(shift: int = 1) -> dict:
    c = dict(CENTERS)
    c["a"] = lambda k: center_a(k) + shift
    return c

"""p-adic valuations, truncated profinite elements and clopen coset windows.

Two kinds of profinite completion of a lattice Z^d are supported, both
described by a *filtration* of sublattices ``L_0 ⊃ L_1 ⊃ ...``:

* :class:`PadicFiltration` -- ``L_k = p^k Z^d``, completion ``(Z_p)^d``;
* :class:`MatrixFiltration` -- ``L_k = theta^k Z^2`` for an integer matrix
  ``theta`` with ``|det theta| >= 2``.

A coset ``r + closure(L_k)`` is stored as ``(level k, canonical residue r)``.
Two cosets of one filtration are nested or disjoint, which is what makes
:class:`CosetUnion` normalisation and exact Haar measures cheap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Iterator, Sequence

from .exactnum import IntMatrix2, hermite_basis, lattice_reduce

INFINITY = math.inf


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")


def valuation(a, p: int):
    """p-adic valuation of a rational ``a``; ``INFINITY`` for ``a == 0``.

    >>> valuation(9, 3), valuation(Fraction(1, 3), 3)
    (2, -1)
    """
    _check_prime(p)
    q = Fraction(a)
    if q == 0:
        return INFINITY

    def v(n: int) -> int:
        n, k = abs(n), 0
        while n % p == 0:
            n //= p
            k += 1
        return k

    return v(q.numerator) - v(q.denominator)


def padic_distance(x, y, p: int) -> Fraction:
    """``p ** -valuation(y - x)``, and 0 when ``x == y``."""
    v = valuation(Fraction(y) - Fraction(x), p)
    if v == INFINITY:
        return Fraction(0)
    return Fraction(p) ** (-v)


def padic_digits(x, p: int, n: int) -> list[int]:
    """First ``n`` p-adic digits of a rational p-adic integer ``x``."""
    r = padic_residue(x, p, n)
    out = []
    for _ in range(n):
        out.append(r % p)
        r //= p
    return out


def padic_residue(x, p: int, level: int) -> int:
    """Image of the rational ``x`` in ``Z / p^level Z`` (needs ``valuation(x) >= 0``)."""
    q = Fraction(x)
    if q.denominator % p == 0:
        raise ValueError(f"{x} is not a {p}-adic integer")
    m = p**level
    if m == 1:
        return 0
    return q.numerator * pow(q.denominator, -1, m) % m


# ---------------------------------------------------------------------------
# filtrations


class PadicFiltration:
    """``p^k Z^dim``; residues are tuples with entries in ``[0, p^k)``."""

    def __init__(self, p: int, dim: int = 1):
        _check_prime(p)
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.p = p
        self.dim = dim
        self.branching = p**dim

    def __eq__(self, other) -> bool:
        return isinstance(other, PadicFiltration) and (self.p, self.dim) == (other.p, other.dim)

    def __hash__(self) -> int:
        return hash(("padic", self.p, self.dim))

    def __repr__(self) -> str:
        return f"PadicFiltration(p={self.p}, dim={self.dim})"

    def reduce(self, v: Sequence[int], level: int) -> tuple[int, ...]:
        m = self.p**level
        return tuple(int(x) % m for x in v)

    def children(self, r: tuple[int, ...], level: int) -> Iterator[tuple[int, ...]]:
        m = self.p**level
        for digits in product(range(self.p), repeat=self.dim):
            yield tuple(x + d * m for x, d in zip(r, digits))

    def coset_measure(self, level: int) -> Fraction:
        return Fraction(1, self.p ** (level * self.dim))

    def fold_scale(self, level: int, scale: int) -> int:
        """Absorb a scale factor ``p^e`` into the level."""
        e = 0
        s = scale
        while s % self.p == 0:
            s //= self.p
            e += 1
        if s != 1:
            raise ValueError(
                f"scale {scale} is not a power of {self.p}; such scales are units in Z_{self.p}"
            )
        return level + e

    def header(self) -> dict:
        return {"p": self.p, "dim": self.dim}


class MatrixFiltration:
    """``theta^k Z^2``; residues are Hermite-reduced representatives."""

    def __init__(self, theta: IntMatrix2):
        if abs(theta.det()) < 2:
            raise ValueError("theta must satisfy |det| >= 2")
        self.theta = theta
        self.dim = 2
        self.branching = abs(theta.det())
        self._bases: dict[int, tuple[int, int, int]] = {}
        self._powers: dict[int, IntMatrix2] = {}
        # representatives of Z^2 / theta Z^2
        a, b, c = hermite_basis(theta)
        self._digits = [(x, y) for y in range(c) for x in range(a)]

    def __eq__(self, other) -> bool:
        return isinstance(other, MatrixFiltration) and self.theta == other.theta

    def __hash__(self) -> int:
        return hash(("matrix", self.theta))

    def __repr__(self) -> str:
        return f"MatrixFiltration(theta={self.theta.rows()})"

    def power(self, level: int) -> IntMatrix2:
        if level not in self._powers:
            self._powers[level] = self.theta**level
        return self._powers[level]

    def basis(self, level: int) -> tuple[int, int, int]:
        if level not in self._bases:
            self._bases[level] = hermite_basis(self.power(level))
        return self._bases[level]

    def reduce(self, v: Sequence[int], level: int) -> tuple[int, int]:
        if level == 0:
            return (0, 0)
        return lattice_reduce((int(v[0]), int(v[1])), self.basis(level))

    def children(self, r: tuple[int, int], level: int) -> Iterator[tuple[int, int]]:
        t = self.power(level)
        for d in self._digits:
            w = t.apply(d)
            yield self.reduce((r[0] + w[0], r[1] + w[1]), level + 1)

    def residues(self, level: int) -> list[tuple[int, int]]:
        """The fixed enumeration of ``Z^2 / theta^level Z^2``."""
        a, b, c = self.basis(level) if level else (1, 0, 1)
        return [(x, y) for y in range(c) for x in range(a)]

    def coset_measure(self, level: int) -> Fraction:
        return Fraction(1, self.branching**level)

    def fold_scale(self, level: int, scale: int) -> int:
        if scale != 1:
            raise ValueError("scaled cosets are only defined for p-adic filtrations")
        return level

    def header(self) -> dict:
        return {"theta": [list(r) for r in self.theta.rows()], "dim": 2}


Filtration = PadicFiltration | MatrixFiltration


# ---------------------------------------------------------------------------
# truncated elements


@dataclass(frozen=True)
class PadicTrunc:
    """An element of ``(Z_p)^dim`` known modulo ``p^level``."""

    p: int
    dim: int
    level: int
    residue: tuple[int, ...]

    def __post_init__(self):
        m = self.p**self.level
        if len(self.residue) != self.dim or any(not 0 <= x < m for x in self.residue):
            raise ValueError(f"residue {self.residue} not reduced mod {self.p}^{self.level}")

    @classmethod
    def of(cls, x, p: int, level: int) -> "PadicTrunc":
        """Truncate an integer vector or a rational p-adic integer (dim 1)."""
        if isinstance(x, (tuple, list)):
            m = p**level
            return cls(p, len(x), level, tuple(int(c) % m for c in x))
        return cls(p, 1, level, (padic_residue(x, p, level),))

    def reduce(self, level: int) -> "PadicTrunc":
        if level > self.level:
            raise ValueError("cannot refine a truncation")
        m = self.p**level
        return PadicTrunc(self.p, self.dim, level, tuple(x % m for x in self.residue))

    def __add__(self, other: "PadicTrunc") -> "PadicTrunc":
        lv = min(self.level, other.level)
        a, b = self.reduce(lv), other.reduce(lv)
        m = self.p**lv
        return PadicTrunc(self.p, self.dim, lv, tuple((x + y) % m for x, y in zip(a.residue, b.residue)))

    def digits(self) -> list[list[int]]:
        out = []
        for x in self.residue:
            ds = []
            for _ in range(self.level):
                ds.append(x % self.p)
                x //= self.p
            out.append(ds)
        return out


@dataclass(frozen=True)
class ProfiniteByMatrix:
    """An element of the completion of Z^2 along ``theta``, known mod ``theta^level``."""

    theta: IntMatrix2
    level: int
    residue: tuple[int, int]

    @classmethod
    def of(cls, v, theta: IntMatrix2, level: int) -> "ProfiniteByMatrix":
        return cls(theta, level, MatrixFiltration(theta).reduce(v, level))

    def reduce(self, level: int) -> "ProfiniteByMatrix":
        if level > self.level:
            raise ValueError("cannot refine a truncation")
        return ProfiniteByMatrix(self.theta, level, MatrixFiltration(self.theta).reduce(self.residue, level))

    def __add__(self, other: "ProfiniteByMatrix") -> "ProfiniteByMatrix":
        lv = min(self.level, other.level)
        v = (self.residue[0] + other.residue[0], self.residue[1] + other.residue[1])
        return ProfiniteByMatrix.of(v, self.theta, lv)


# ---------------------------------------------------------------------------
# cosets and unions


@dataclass(frozen=True, order=True)
class Coset:
    """``center + scale * closure(L_level)``.

    ``scale`` is only meaningful for p-adic filtrations, where it must be a
    power of ``p``; normalisation folds it into ``level``.
    """

    center: tuple[int, ...]
    level: int
    scale: int = 1

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(int(x) for x in self.center))
        if self.level < 0 or self.scale < 1:
            raise ValueError("level must be >= 0 and scale >= 1")


@dataclass(frozen=True)
class CosetUnion:
    """Finite union of clopen cosets of one filtration."""

    filtration: Filtration
    cosets: tuple[Coset, ...] = ()
    _canonical: bool = field(default=False, compare=False, repr=False)

    @classmethod
    def padic(cls, p: int, dim: int, cosets: Iterable[Coset] = ()) -> "CosetUnion":
        return cls(PadicFiltration(p, dim), tuple(cosets))

    @classmethod
    def by_matrix(cls, theta: IntMatrix2, cosets: Iterable[Coset] = ()) -> "CosetUnion":
        return cls(MatrixFiltration(theta), tuple(cosets))

    @classmethod
    def whole(cls, filtration: Filtration) -> "CosetUnion":
        return cls(filtration, (Coset((0,) * filtration.dim, 0),)).normalized()

    @property
    def dim(self) -> int:
        return self.filtration.dim

    def _canon(self, c: Coset) -> Coset:
        if len(c.center) != self.dim:
            raise ValueError(f"coset center {c.center} has wrong dimension (expected {self.dim})")
        lv = self.filtration.fold_scale(c.level, c.scale)
        return Coset(self.filtration.reduce(c.center, lv), lv)

    def canonical_cosets(self) -> list[Coset]:
        return [self._canon(c) for c in self.cosets]

    def normalized(self) -> "CosetUnion":
        if self._canonical:
            return self
        return CosetUnion(self.filtration, tuple(coset_normalize_list(self.filtration, self.canonical_cosets())), True)

    def contains(self, x: Sequence[int]) -> bool:
        if len(x) != self.dim:
            raise ValueError(f"point {x} has dimension {len(x)}, window has {self.dim}")
        f = self.filtration
        return any(f.reduce(x, c.level) == c.center for c in self.canonical_cosets())

    def contains_coset(self, c: Coset) -> bool:
        """True iff the whole coset ``c`` lies inside the union."""
        c = self._canon(c)
        return self.intersect_coset(c).haar_measure() == self.filtration.coset_measure(c.level)

    def intersect_coset(self, c: Coset) -> "CosetUnion":
        c = self._canon(c)
        f = self.filtration
        out = []
        for d in self.normalized().cosets:
            if d.level <= c.level and f.reduce(c.center, d.level) == d.center:
                return CosetUnion(f, (c,), True)
            if d.level > c.level and f.reduce(d.center, c.level) == c.center:
                out.append(d)
        return CosetUnion(f, tuple(out)).normalized()

    def is_empty(self) -> bool:
        return not self.cosets

    def union(self, other: "CosetUnion") -> "CosetUnion":
        self._same(other)
        return CosetUnion(self.filtration, self.cosets + other.cosets).normalized()

    def intersection(self, other: "CosetUnion") -> "CosetUnion":
        self._same(other)
        parts: list[Coset] = []
        for c in self.normalized().cosets:
            parts.extend(other.intersect_coset(c).cosets)
        return CosetUnion(self.filtration, tuple(parts)).normalized()

    def difference(self, other: "CosetUnion") -> "CosetUnion":
        self._same(other)
        out: list[Coset] = []
        for c in self.normalized().cosets:
            out.extend(other.complement(within=c).cosets)
        return CosetUnion(self.filtration, tuple(out)).normalized()

    def complement(self, within: Coset | None = None) -> "CosetUnion":
        """Set complement of the union inside ``within`` (default: the whole group)."""
        f = self.filtration
        start = self._canon(within) if within is not None else Coset((0,) * self.dim, 0)
        members = self.normalized().cosets
        out: list[Coset] = []

        def rec(c: Coset, relevant: list[Coset]) -> None:
            inside = [d for d in relevant if d.level >= c.level and f.reduce(d.center, c.level) == c.center]
            if any(d.level <= c.level and f.reduce(c.center, d.level) == d.center for d in relevant):
                return
            if not inside:
                out.append(c)
                return
            for r in f.children(c.center, c.level):
                rec(Coset(r, c.level + 1), inside)

        rec(start, list(members))
        return CosetUnion(f, tuple(out)).normalized()

    def haar_measure(self) -> Fraction:
        f = self.filtration
        return sum((f.coset_measure(c.level) for c in self.normalized().cosets), Fraction(0))

    def max_level(self) -> int:
        return max((c.level for c in self.canonical_cosets()), default=0)

    def _same(self, other: "CosetUnion") -> None:
        if self.filtration != other.filtration:
            raise ValueError("coset unions live in different groups")

    # -- serialisation -----------------------------------------------------

    def to_json_obj(self) -> dict:
        u = self.normalized()
        obj = dict(u.filtration.header())
        obj["cosets"] = [{"center": list(c.center), "level": c.level, "scale": c.scale} for c in u.cosets]
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: dict) -> "CosetUnion":
        if "theta" in obj:
            filt: Filtration = MatrixFiltration(IntMatrix2.of(obj["theta"]))
        else:
            filt = PadicFiltration(int(obj["p"]), int(obj["dim"]))
        cosets = tuple(Coset(tuple(c["center"]), int(c["level"]), int(c.get("scale", 1))) for c in obj["cosets"])
        return cls(filt, cosets)

    @classmethod
    def from_json(cls, text: str) -> "CosetUnion":
        return cls.from_json_obj(json.loads(text))


def coset_normalize_list(f: Filtration, cosets: Iterable[Coset]) -> list[Coset]:
    """Disjoint, maximally merged, sorted form of canonical cosets."""
    by_level: dict[int, set] = {}
    for c in sorted(set(cosets), key=lambda c: c.level):
        if any(f.reduce(c.center, lv) in rs for lv, rs in by_level.items() if lv <= c.level):
            continue
        by_level.setdefault(c.level, set()).add(c.center)
    # drop deeper cosets swallowed by shallower ones added later in the same pass
    levels = sorted(by_level)
    for i, lv in enumerate(levels):
        for shallow in levels[:i]:
            by_level[lv] = {r for r in by_level[lv] if f.reduce(r, shallow) not in by_level[shallow]}
    # merge complete sibling families bottom-up
    changed = True
    while changed:
        changed = False
        for lv in sorted((lv for lv in by_level if lv > 0), reverse=True):
            groups: dict[tuple, list] = {}
            for r in by_level[lv]:
                groups.setdefault(f.reduce(r, lv - 1), []).append(r)
            for parent, kids in groups.items():
                if len(kids) == f.branching:
                    by_level[lv].difference_update(kids)
                    by_level.setdefault(lv - 1, set()).add(parent)
                    changed = True
    return [Coset(r, lv) for lv in sorted(by_level) for r in sorted(by_level[lv])]


def coset_normalize(u: CosetUnion) -> CosetUnion:
    return u.normalized()


def haar_measure(u: CosetUnion) -> Fraction:
    return u.haar_measure()


def coset_contains(u: CosetUnion, x: Sequence[int]) -> bool:
    return u.contains(x)


def coset_chain_limit(center: Callable[[int], int], p: int, level: int, start: int = 2, gap: int = 1) -> PadicTrunc:
    """Truncation mod ``p^level`` of the p-adic limit of the centres ``center(k)``.

    The chain must satisfy ``center(k+1) ≡ center(k) (mod p^(k-gap))`` for
    ``k >= start``; this is checked on every step that influences the
    result (plus two more) and a violation raises ``ValueError``.
    """
    _check_prime(p)
    stop = max(start, level + gap) + 2
    for k in range(start, stop):
        e = max(k - gap, 0)
        if (center(k + 1) - center(k)) % p**e:
            raise ValueError(
                f"centres are not Cauchy: c({k + 1}) - c({k}) = {center(k + 1) - center(k)} "
                f"is not divisible by {p}^{e}"
            )
    k = max(start, level + gap)
    return PadicTrunc(p, 1, level, (center(k) % p**level,))

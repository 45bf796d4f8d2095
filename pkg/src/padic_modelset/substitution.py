"""Substitution systems on finite alphabets.

Matrix and Perron-Frobenius analysis, two-sided fixed points grown from a
legal seed pair, geometric realisation as anchored point sets, scaling
self-similarity, Dekking coincidence and block recoding.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Sequence

import numpy as np

from .exactnum import QuadInt, QuadRational


@dataclass(frozen=True)
class SubstitutionSystem:
    alphabet: tuple[str, ...]
    rules: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet has repeated letters")
        keys = [k for k, _ in self.rules]
        if sorted(keys) != sorted(self.alphabet):
            raise ValueError("every letter needs exactly one rule")
        for k, w in self.rules:
            if not w:
                raise ValueError(f"rule for {k!r} has an empty image")
            bad = set(w) - set(self.alphabet)
            if bad:
                raise ValueError(f"rule {k} -> {w} uses unknown letters {sorted(bad)}")

    @classmethod
    def from_rules(cls, rules: dict[str, str] | Iterable[tuple[str, str]]) -> "SubstitutionSystem":
        items = list(rules.items()) if isinstance(rules, dict) else list(rules)
        order: list[str] = []
        for k, w in items:
            for ch in k + w:
                if ch not in order:
                    order.append(ch)
        return cls(tuple(order), tuple(sorted(items, key=lambda kv: order.index(kv[0]))))

    @classmethod
    def parse(cls, text: str) -> "SubstitutionSystem":
        """Read lines ``a -> ab``; ``#`` starts a comment."""
        items = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "->" not in line:
                raise ValueError(f"line {lineno}: expected 'x -> word', got {raw!r}")
            lhs, rhs = (s.strip() for s in line.split("->", 1))
            if len(lhs) != 1 or not rhs or any(ch.isspace() for ch in rhs):
                raise ValueError(f"line {lineno}: malformed rule {raw!r}")
            items.append((lhs, rhs))
        if not items:
            raise ValueError("no rules found")
        if len({k for k, _ in items}) != len(items):
            raise ValueError("a letter has more than one rule")
        return cls.from_rules(items)

    @property
    def rule(self) -> dict[str, str]:
        return dict(self.rules)

    def apply(self, word: str) -> str:
        r = self.rule
        return "".join(r[ch] for ch in word)

    def iterate(self, word: str, n: int) -> str:
        for _ in range(n):
            word = self.apply(word)
        return word

    def index(self, letter: str) -> int:
        return self.alphabet.index(letter)

    def constant_length(self) -> int | None:
        sizes = {len(w) for _, w in self.rules}
        return sizes.pop() if len(sizes) == 1 else None

    def __str__(self) -> str:
        return "\n".join(f"{k} -> {w}" for k, w in self.rules)


def subst_matrix(s: SubstitutionSystem) -> np.ndarray:
    """Entry ``(i, j)``: occurrences of letter ``i`` in the image of letter ``j``."""
    n = len(s.alphabet)
    m = np.zeros((n, n), dtype=np.int64)
    for j, letter in enumerate(s.alphabet):
        for ch in s.rule[letter]:
            m[s.index(ch), j] += 1
    return m


def is_primitive(s: SubstitutionSystem) -> bool:
    m = (subst_matrix(s) > 0).astype(np.int64)
    n = m.shape[0]
    p = m.copy()
    # Wielandt: primitive iff M^((n-1)^2 + 1) > 0
    for _ in range((n - 1) ** 2):
        p = ((p @ m) > 0).astype(np.int64)
    return bool(p.all())


# ---------------------------------------------------------------------------
# Perron-Frobenius data


@dataclass(frozen=True)
class PFData:
    inflation: float
    lengths: tuple[float, ...]
    frequencies: tuple[float, ...]
    inflation_exact: object = None
    lengths_exact: tuple | None = None
    frequencies_exact: tuple | None = None
    residual: float = 0.0


def _simplify(x):
    if isinstance(x, QuadRational):
        if x.b == 0:
            x = x.a
        elif x.is_integral():
            return x.to_quadint()
        else:
            return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def _null_vector(rows: list[list], pivot: int = 0) -> list | None:
    """A kernel vector of a singular square matrix over an exact field, or None."""
    a = [list(r) for r in rows]
    n = len(a)
    where = [-1] * n
    r = 0
    for col in range(n):
        sel = next((i for i in range(r, n) if a[i][col] != 0), None)
        if sel is None:
            continue
        a[r], a[sel] = a[sel], a[r]
        inv = 1 / a[r][col]
        a[r] = [v * inv for v in a[r]]
        for i in range(n):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        where[col] = r
        r += 1
    free = [c for c in range(n) if where[c] < 0]
    if not free:
        return None
    fc = free[0]
    vec = [0] * n
    vec[fc] = 1
    for c in range(n):
        if where[c] >= 0:
            vec[c] = -a[where[c]][fc]
    return vec


def _exact_eigen(m: np.ndarray, lam: float):
    """Exact form of the PF eigenvalue when it is an integer or lies in Q(sqrt2)."""
    n = m.shape[0]
    ints = [[int(v) for v in row] for row in m]

    def shifted(value, field):
        return [[field(ints[i][j]) - (value if i == j else 0) for j in range(n)] for i in range(n)]

    k = round(lam)
    if abs(k - lam) < 1e-9 and _null_vector(shifted(Fraction(k), Fraction)) is not None:
        return Fraction(k), Fraction
    for mu in np.linalg.eigvals(m.astype(float)):
        if abs(mu.imag) > 1e-9 or abs(mu.real - lam) < 1e-9:
            continue
        t, d = round(lam + mu.real), round(lam * mu.real)
        disc = t * t - 4 * d
        if disc <= 0 or disc % 2:
            continue
        s = int(round((disc // 2) ** 0.5))
        if s * s != disc // 2:
            continue
        cand = QuadRational(Fraction(t, 2), Fraction(s, 2))
        if abs(float(cand) - lam) < 1e-9 and _null_vector(shifted(cand, QuadRational.coerce)) is not None:
            return cand, QuadRational.coerce
    return None, None


def pf_data(s: SubstitutionSystem, tol: float = 1e-12, max_iter: int = 100000) -> PFData:
    if not is_primitive(s):
        raise ValueError("substitution is not primitive")
    m = subst_matrix(s).astype(float)

    def power(a: np.ndarray) -> tuple[float, np.ndarray]:
        v = np.ones(a.shape[0]) / np.sqrt(a.shape[0])
        for _ in range(max_iter):
            w = a @ v
            w /= np.linalg.norm(w)
            if np.abs(w - v).max() < 1e-16:
                break
            v = w
        lam = float(w @ a @ w)
        if np.linalg.norm(a @ w - lam * w) > tol * max(1.0, lam):
            raise ArithmeticError("power iteration did not converge")
        return lam, w

    lam, right = power(m)
    _, left = power(m.T)
    lengths = left / left[0]
    freqs = right / right.sum()
    residual = float(max(np.abs(m.T @ lengths - lam * lengths).max(), np.abs(m @ freqs - lam * freqs).max()))

    exact, field = _exact_eigen(subst_matrix(s), lam)
    l_ex = f_ex = None
    if exact is not None:
        n = m.shape[0]
        ints = subst_matrix(s).tolist()
        mt = [[field(ints[j][i]) - (exact if i == j else 0) for j in range(n)] for i in range(n)]
        mm = [[field(ints[i][j]) - (exact if i == j else 0) for j in range(n)] for i in range(n)]
        lv, fv = _null_vector(mt), _null_vector(mm)
        lv = [x / lv[0] for x in lv]
        total = sum(fv[1:], fv[0])
        fv = [x / total for x in fv]
        l_ex = tuple(_simplify(x) for x in lv)
        f_ex = tuple(_simplify(x) for x in fv)
        exact = _simplify(exact)
    return PFData(lam, tuple(lengths.tolist()), tuple(freqs.tolist()), exact, l_ex, f_ex, residual)


# ---------------------------------------------------------------------------
# fixed points and geometry


@dataclass(frozen=True)
class FixedPointPatch:
    system: SubstitutionSystem
    seed: tuple[str, str]
    iterations: int
    left_word: str
    right_word: str

    @property
    def word(self) -> str:
        return self.left_word + self.right_word


def legal_pairs(s: SubstitutionSystem, depth: int = 5) -> set[str]:
    out = set()
    for letter in s.alphabet:
        w = s.iterate(letter, depth)
        out.update(w[i : i + 2] for i in range(len(w) - 1))
    return out


def fixed_point_patch(s: SubstitutionSystem, seed: Sequence[str], n: int) -> FixedPointPatch:
    left, right = seed
    if left not in s.alphabet or right not in s.alphabet:
        raise ValueError(f"seed {left}|{right} uses letters outside the alphabet")
    if left + right not in legal_pairs(s):
        raise ValueError(f"seed {left}|{right} never occurs in an iterated image; it is not legal")
    if n < 0:
        raise ValueError("iterations must be non-negative")
    return FixedPointPatch(s, (left, right), n, s.iterate(left, n), s.iterate(right, n))


@dataclass
class GeometricPointSets:
    per_letter: dict[str, list]
    anchor: str
    extent: tuple = (0, 0)
    tiles: list = field(default_factory=list, repr=False)

    def all_points(self) -> list:
        return sorted(x for xs in self.per_letter.values() for x in xs)

    def labelled(self) -> list[tuple]:
        return sorted(((x, k) for k, xs in self.per_letter.items() for x in xs), key=lambda t: t[0])

    def restrict(self, lo, hi) -> "GeometricPointSets":
        return GeometricPointSets(
            {k: [x for x in xs if lo <= x <= hi] for k, xs in self.per_letter.items()},
            self.anchor,
            (lo, hi),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["letter", "coordinate"])
        for x, k in self.labelled():
            w.writerow([k, str(x)])
        return buf.getvalue()


def geometric_points(p: FixedPointPatch, lengths: dict[str, object] | Sequence, anchor: str = "right") -> GeometricPointSets:
    """Lay the tiles of ``p`` end to end with the origin at the seed junction."""
    if anchor not in ("right", "left"):
        raise ValueError("anchor must be 'right' or 'left'")
    if not isinstance(lengths, dict):
        lengths = dict(zip(p.system.alphabet, lengths))
    for k, v in lengths.items():
        if not v > 0:
            raise ValueError(f"length of {k!r} must be positive")
    zero = 0 * next(iter(lengths.values()))
    # right side: tile i spans [ends[i-1], ends[i]]
    r_ends = list(accumulate((lengths[ch] for ch in p.right_word), initial=zero))
    l_ends = list(accumulate((lengths[ch] for ch in reversed(p.left_word)), initial=zero))
    per: dict[str, list] = {ch: [] for ch in p.system.alphabet}
    tiles = []
    for i, ch in enumerate(p.right_word):
        tiles.append((ch, r_ends[i], r_ends[i + 1]))
    for i, ch in enumerate(reversed(p.left_word)):
        tiles.append((ch, -l_ends[i + 1], -l_ends[i]))
    tiles.sort(key=lambda t: t[1])
    for ch, lo, hi in tiles:
        per[ch].append(hi if anchor == "right" else lo)
    return GeometricPointSets(per, anchor, (-l_ends[-1], r_ends[-1]), tiles)


@dataclass
class SimilarityResult:
    ok: bool
    checked: int
    counterexamples: list

    def __bool__(self) -> bool:
        return self.ok


def self_similarity_check(points: GeometricPointSets, factor, lo, hi, source: Iterable[str] | None = None,
                          target: Iterable[str] | None = None) -> SimilarityResult:
    """Is ``factor * x`` an anchor (of a ``target`` letter) for every ``source`` anchor with image in ``[lo, hi]``?"""
    if not factor >= 1:
        raise ValueError("factor must be at least 1")
    e_lo, e_hi = points.extent
    if lo < e_lo or hi > e_hi:
        raise ValueError(f"range [{lo}, {hi}] exceeds the generated patch [{e_lo}, {e_hi}]")
    src = list(source) if source is not None else list(points.per_letter)
    tgt = list(target) if target is not None else list(points.per_letter)
    targets = {x for k in tgt for x in points.per_letter[k]}
    bad, checked = [], 0
    for k in src:
        for x in points.per_letter[k]:
            y = factor * x
            if lo <= y <= hi:
                checked += 1
                if y not in targets:
                    bad.append((x, y))
    bad.sort()
    return SimilarityResult(not bad, checked, bad)


@dataclass
class Coincidence:
    found: bool
    depth: int | None = None
    position: int | None = None

    def __bool__(self) -> bool:
        return self.found


def dekking_coincidence(s: SubstitutionSystem, max_depth: int = 8) -> Coincidence:
    if s.constant_length() is None:
        raise ValueError("coincidence is only defined for constant-length substitutions")
    words = list(s.alphabet)
    for depth in range(1, max_depth + 1):
        words = [s.apply(w) for w in words]
        for j, column in enumerate(zip(*words)):
            if len(set(column)) == 1:
                return Coincidence(True, depth, j)
    return Coincidence(False)


def recode_pairs(p: FixedPointPatch, pair: str, new_letter: str) -> tuple[SubstitutionSystem, FixedPointPatch]:
    """Replace every block ``pair`` by ``new_letter`` and return the induced substitution."""
    if len(pair) != 2 or pair[0] == pair[1]:
        raise ValueError("pair must be two distinct letters")
    s = p.system
    if pair not in p.word:
        return s, p
    if new_letter in s.alphabet:
        raise ValueError(f"{new_letter!r} is already a letter")
    x, y = pair

    def consistent(w: str) -> bool:
        for i, ch in enumerate(w):
            if ch == x and i + 1 < len(w) and w[i + 1] != y:
                return False
            if ch == y and i > 0 and w[i - 1] != x:
                return False
        return True

    def recode(w: str) -> str:
        if w.startswith(y) or w.endswith(x) or not consistent(w):
            raise ValueError(f"word {w!r} splits a {pair} block")
        return w.replace(pair, new_letter)

    if not consistent(p.word):
        raise ValueError(f"{pair} does not occur as a rigid block in the patch")
    if p.left_word.endswith(x) and p.right_word.startswith(y):
        raise ValueError(f"seed junction splits a {pair} block")
    rules = {new_letter: recode(s.apply(pair))}
    for ch in s.alphabet:
        if ch not in pair:
            rules[ch] = recode(s.rule[ch])
    induced = SubstitutionSystem.from_rules(rules)
    left, right = recode(p.left_word), recode(p.right_word)
    patch = FixedPointPatch(induced, (left[-1], right[0]), p.iterations, left, right)
    return induced, patch


# ---------------------------------------------------------------------------
# named systems


@dataclass(frozen=True)
class NamedSystem:
    name: str
    system: SubstitutionSystem
    seed: tuple[str, str]
    anchor: str
    note: str = ""


def _named(name: str, rules: str, seed: str, anchor: str, note: str = "") -> NamedSystem:
    return NamedSystem(name, SubstitutionSystem.parse(rules), (seed[0], seed[1]), anchor, note)


CATALOG: dict[str, NamedSystem] = {
    n.name: n
    for n in (
        _named("limitperiodic3", "a -> ab\nb -> abc\nc -> abcc", "ca", "right"),
        _named("limitquasi", "a -> aab\nb -> abab", "ba", "left"),
        _named("perioddoubling", "a -> ba\nb -> aa", "aa", "left"),
        _named("thuemorse", "a -> ab\nb -> ba", "ba", "left", "negative control: not a model set"),
        _named("recoded3", "A -> AAc\nc -> Acc", "cA", "right"),
        _named("variant3", "a -> ab\nb -> abc\nc -> ccab", "ca", "right"),
    )
}


def named_system(name: str) -> NamedSystem:
    try:
        return CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown system {name!r}; choose from {sorted(CATALOG)}") from None


def letter_counts(word: str, alphabet: Sequence[str]) -> list[int]:
    return [word.count(ch) for ch in alphabet]

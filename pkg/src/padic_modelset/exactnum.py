"""Exact arithmetic: rationals, the ring Z[sqrt2], 2x2 matrices and affine maps.

Rationals are plain :class:`fractions.Fraction`. Nothing in here touches
floating point except the explicit conversions (``float(x)``,
:func:`quad_embed_real`).
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import total_ordering
from math import isqrt
from numbers import Rational as _RationalABC
from typing import Iterable, Union

Rational = Fraction
Number = Union[int, Fraction]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sign_sqrt2(a, b) -> int:
    """Exact sign of ``a + b*sqrt(2)`` for rational ``a``, ``b``."""
    sa, sb = _sign(a), _sign(b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with 2 b^2
    return sa * _sign(a * a - 2 * b * b)


class _Sqrt2Mixin:
    """Shared behaviour for ``a + b*sqrt2`` numbers (``a``, ``b`` exact)."""

    a: Number
    b: Number

    def sign(self) -> int:
        return sign_sqrt2(self.a, self.b)

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * 2.0**0.5

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __str__(self) -> str:
        return f"{self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}*sqrt2"


@total_ordering
@dataclass(frozen=True, eq=False)
class QuadInt(_Sqrt2Mixin):
    """Element ``a + b*sqrt(2)`` of the ring Z[sqrt2]."""

    a: int = 0
    b: int = 0

    def __post_init__(self):
        if not (isinstance(self.a, int) and isinstance(self.b, int)):
            raise TypeError("QuadInt coefficients must be integers")

    @classmethod
    def coerce(cls, x) -> "QuadInt":
        if isinstance(x, QuadInt):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        raise TypeError(f"cannot coerce {x!r} to QuadInt")

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadInt):
            return self.a == other.a and self.b == other.b
        if isinstance(other, QuadRational):
            return other == self
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __add__(self, other):
        if isinstance(other, QuadRational) or isinstance(other, Fraction):
            return QuadRational.coerce(self) + other
        try:
            o = QuadInt.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadInt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> "QuadInt":
        return QuadInt(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QuadRational) or isinstance(other, Fraction):
            return QuadRational.coerce(self) * other
        try:
            o = QuadInt.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadInt(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return QuadRational.coerce(self) / other

    def __rtruediv__(self, other):
        return QuadRational.coerce(other) / QuadRational.coerce(self)

    def __pow__(self, n: int) -> "QuadInt":
        if n < 0:
            raise ValueError("negative powers leave Z[sqrt2]")
        out, base = QuadInt(1, 0), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "QuadInt":
        return QuadInt(self.a, -self.b)

    def norm(self) -> int:
        return self.a * self.a - 2 * self.b * self.b

    def __repr__(self) -> str:
        return f"QuadInt({self.a}, {self.b})"


@total_ordering
@dataclass(frozen=True, eq=False)
class QuadRational(_Sqrt2Mixin):
    """Element ``a + b*sqrt(2)`` of the field Q(sqrt2)."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def coerce(cls, x) -> "QuadRational":
        if isinstance(x, QuadRational):
            return x
        if isinstance(x, QuadInt):
            return cls(x.a, x.b)
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        raise TypeError(f"cannot coerce {x!r} to QuadRational")

    def __eq__(self, other) -> bool:
        try:
            o = QuadRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self) -> int:
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __add__(self, other):
        try:
            o = QuadRational.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadRational(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> "QuadRational":
        return QuadRational(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QuadRational.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadRational(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QuadRational.coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        num = self * o.conj()
        return QuadRational(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        return QuadRational.coerce(other) / self

    def conj(self) -> "QuadRational":
        return QuadRational(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 2 * self.b * self.b

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def to_quadint(self) -> QuadInt:
        if not self.is_integral():
            raise ValueError(f"{self} is not in Z[sqrt2]")
        return QuadInt(int(self.a), int(self.b))

    def __str__(self) -> str:
        return f"{self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}*sqrt2"

    def __repr__(self) -> str:
        return f"QuadRational({self.a!s}, {self.b!s})"


SQRT2 = QuadInt(0, 1)
LAMBDA = QuadInt(2, 1)  # 2 + sqrt2


def parse_quad(text: str) -> QuadRational:
    """Inverse of ``str`` for Q(sqrt2) numbers, e.g. ``"-1/2+3*sqrt2"``."""
    s = text.replace(" ", "")
    if not s.endswith("*sqrt2"):
        return QuadRational(Fraction(s), 0)
    body = s[: -len("*sqrt2")]
    # split at the last sign that is not a leading sign or exponent
    for i in range(len(body) - 1, 0, -1):
        if body[i] in "+-" and body[i - 1] not in "eE/":
            return QuadRational(Fraction(body[:i]), Fraction(body[i:]))
    return QuadRational(0, Fraction(body))


def quad_embed_real(x, precision: int = 30) -> Decimal:
    """Real value of ``x = a + b*sqrt2`` with absolute error below ``10**-precision``.

    ``x`` may be an int, Fraction, QuadInt or QuadRational. The integer part
    of ``b*sqrt2`` is computed with :func:`math.isqrt`, so the only error is
    the final truncation; the precision is raised until the sign of the
    result agrees with the exact sign.
    """
    q = QuadRational.coerce(x)
    exact_sign = q.sign()
    digits = precision + 2
    while True:
        scale = 10**digits
        bb = abs(q.b * scale)
        # floor(|b| sqrt2 10^d) = floor(isqrt(2 num^2) / den)
        r = isqrt(2 * bb.numerator**2) // bb.denominator
        approx = q.a + Fraction(r if q.b >= 0 else -r, scale)
        with localcontext() as ctx:
            ctx.prec = digits + len(str(abs(approx.numerator) // approx.denominator)) + 10
            value = Decimal(approx.numerator) / Decimal(approx.denominator)
        if q.b == 0 or exact_sign == 0:
            return value
        if _sign(value) == exact_sign and abs(value) > Decimal(10) ** (-digits + 1):
            return value
        digits += 10


# ---------------------------------------------------------------------------
# 2x2 matrices and affine maps


@dataclass(frozen=True)
class IntMatrix2:
    """Integer 2x2 matrix ``[[a, b], [c, d]]`` acting on column vectors."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix2":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    @classmethod
    def identity(cls) -> "IntMatrix2":
        return cls(1, 0, 0, 1)

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def adjugate(self) -> "IntMatrix2":
        return IntMatrix2(self.d, -self.b, -self.c, self.a)

    def apply(self, v):
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def __matmul__(self, other: "IntMatrix2") -> "IntMatrix2":
        return IntMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __pow__(self, n: int) -> "IntMatrix2":
        if n < 0:
            raise ValueError("use AffineMap2 for inverses")
        out, base = IntMatrix2.identity(), self
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out


def hermite_basis(m: IntMatrix2) -> tuple[int, int, int]:
    """Basis ``(a, 0), (b, c)`` of the lattice spanned by the columns of ``m``.

    ``a, c > 0``, ``0 <= b < a`` and ``a*c == |det m|``. This is the
    canonical (Hermite) form used to pick coset representatives.
    """
    if m.det() == 0:
        raise ValueError("matrix is singular")
    # columns u=(m.a, m.c), v=(m.b, m.d); eliminate the second coordinate
    u, v = [m.a, m.c], [m.b, m.d]
    while v[1] != 0:
        q = u[1] // v[1]
        u, v = v, [u[0] - q * v[0], u[1] - q * v[1]]
    # now v = (x, 0) and u has second coordinate = +-gcd
    if u[1] < 0:
        u = [-u[0], -u[1]]
    a = abs(v[0])
    c = u[1]
    b = u[0] % a
    return a, b, c


def lattice_reduce(v, basis: tuple[int, int, int]) -> tuple[int, int]:
    """Canonical representative of ``v`` modulo the lattice with Hermite ``basis``."""
    a, b, c = basis
    x, y = v
    q = y // c
    x, y = x - q * b, y - q * c
    return (x % a, y)


@dataclass(frozen=True)
class AffineMap2:
    """``x -> L x + t`` on Q^2 with an exact rational linear part."""

    linear: tuple[Fraction, Fraction, Fraction, Fraction]
    translation: tuple[Fraction, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "linear", tuple(Fraction(x) for x in self.linear))
        object.__setattr__(self, "translation", tuple(Fraction(x) for x in self.translation))

    @classmethod
    def from_matrix(cls, m: IntMatrix2, t=(0, 0)) -> "AffineMap2":
        return cls((m.a, m.b, m.c, m.d), t)

    @classmethod
    def identity(cls) -> "AffineMap2":
        return cls((1, 0, 0, 1), (0, 0))

    def __call__(self, v):
        a, b, c, d = self.linear
        x, y = v
        return (a * x + b * y + self.translation[0], c * x + d * y + self.translation[1])

    def compose(self, other: "AffineMap2") -> "AffineMap2":
        """``self ∘ other``."""
        a, b, c, d = self.linear
        e, f, g, h = other.linear
        lin = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
        return AffineMap2(lin, self(other.translation))

    def inverse(self) -> "AffineMap2":
        a, b, c, d = self.linear
        det = a * d - b * c
        if det == 0:
            raise ValueError("affine map is not invertible")
        lin = (d / det, -b / det, -c / det, a / det)
        inv = AffineMap2(lin, (0, 0))
        tx, ty = inv(self.translation)
        return AffineMap2(lin, (-tx, -ty))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.linear + self.translation)

    def apply_int(self, v) -> tuple[int, int]:
        """Apply to an integer vector; raise if the image is not integral."""
        x, y = self(v)
        if x.denominator != 1 or y.denominator != 1:
            raise ArithmeticError(f"non-integer image {x}, {y} of {v}")
        return (int(x), int(y))


def affine_compose(f: AffineMap2, g: AffineMap2) -> AffineMap2:
    return f.compose(g)


def is_rational(x) -> bool:
    return isinstance(x, (int, _RationalABC))

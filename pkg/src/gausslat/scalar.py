"""Exact scalars: Gaussian integers and rationals, Q(zeta_8) and Q(sqrt 2).

Everything here is immutable and uses Python integers / Fractions, so no
rounding ever enters a comparison.  ``float()`` conversions exist for
reports only.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from typing import Union

IntLike = Union[int, "GaussInt"]


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class GaussInt:
    __slots__ = ("re", "im")

    def __init__(self, re: int = 0, im: int = 0) -> None:
        object.__setattr__(self, "re", int(re))
        object.__setattr__(self, "im", int(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussInt is immutable")

    @classmethod
    def coerce(cls, x) -> GaussInt:
        if isinstance(x, GaussInt):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        if isinstance(x, GaussRat) and x.den == 1:
            return cls(x.re_num, x.im_num)
        if isinstance(x, complex) and x.real.is_integer() and x.imag.is_integer():
            return cls(int(x.real), int(x.imag))
        raise TypeError(f"cannot interpret {x!r} as a Gaussian integer")

    def __repr__(self) -> str:
        return f"GaussInt({self.re}, {self.im})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        return f"{self.re}{self.im:+d}i"

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussInt):
            return self.re == other.re and self.im == other.im
        if isinstance(other, int):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussRat):
            return other == self
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im)) if self.im else hash(self.re)

    def __bool__(self) -> bool:
        return bool(self.re or self.im)

    def __neg__(self) -> GaussInt:
        return GaussInt(-self.re, -self.im)

    def __add__(self, other):
        if isinstance(other, int):
            return GaussInt(self.re + other, self.im)
        if isinstance(other, GaussInt):
            return GaussInt(self.re + other.re, self.im + other.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return GaussInt(self.re - other, self.im)
        if isinstance(other, GaussInt):
            return GaussInt(self.re - other.re, self.im - other.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return GaussInt(self.re * other, self.im * other)
        if isinstance(other, GaussInt):
            return GaussInt(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int) -> GaussInt:
        if k < 0:
            raise ValueError("negative power of a Gaussian integer")
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        return GaussRat.coerce(self) / other

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) / self

    def conj(self) -> GaussInt:
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_unit(self) -> bool:
        return self.norm() == 1

    def divmod(self, d: IntLike) -> tuple[GaussInt, GaussInt]:
        """Euclidean division with the quotient rounded to the nearest lattice point.

        The remainder satisfies ``norm(r) <= norm(d) / 2``.
        """
        d = GaussInt.coerce(d)
        n = d.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian integer")
        num = self * d.conj()
        q = GaussInt(_round_div(num.re, n), _round_div(num.im, n))
        return q, self - q * d

    def __floordiv__(self, d):
        return self.divmod(d)[0]

    def __mod__(self, d):
        return self.divmod(d)[1]

    def divides(self, x: IntLike) -> bool:
        x = GaussInt.coerce(x)
        if not self:
            return not x
        return not x.divmod(self)[1]

    def associate(self) -> tuple[GaussInt, GaussInt]:
        """Return ``(canonical, u)`` with ``canonical = u * self``, u a unit.

        The canonical associate of a nonzero element has ``re > 0`` and
        ``im >= 0``.
        """
        x, u = self, ONE
        if not x:
            return x, u
        while not (x.re > 0 and x.im >= 0):
            x, u = x * I, u * I
        return x, u

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


def _round_div(a: int, n: int) -> int:
    # nearest integer to a/n (n > 0), ties toward +inf
    return (2 * a + n) // (2 * n)


ZERO = GaussInt(0, 0)
ONE = GaussInt(1, 0)
I = GaussInt(0, 1)
P = GaussInt(1, 1)
PBAR = GaussInt(1, -1)
UNITS = (ONE, I, -ONE, -I)


def gnorm(x: IntLike) -> int:
    return GaussInt.coerce(x).norm()


def p_divides(x: IntLike) -> bool:
    x = GaussInt.coerce(x)
    return (x.re + x.im) % 2 == 0


def ggcd(a: IntLike, b: IntLike) -> GaussInt:
    a, b = GaussInt.coerce(a), GaussInt.coerce(b)
    while b:
        a, b = b, a.divmod(b)[1]
    return a.associate()[0]


def gauss_ball(m: int) -> list[GaussInt]:
    """All Gaussian integers of norm <= m, ordered by (norm, re, im)."""
    if m < 0:
        return []
    r = math.isqrt(m)
    out = [
        GaussInt(a, b)
        for a in range(-r, r + 1)
        for b in range(-r, r + 1)
        if a * a + b * b <= m
    ]
    out.sort(key=lambda z: (z.norm(), z.re, z.im))
    return out


class GaussRat:
    """An element (re_num + i*im_num)/den of Q(i), den > 0, fully reduced."""

    __slots__ = ("re_num", "im_num", "den")

    def __init__(self, re_num: int = 0, im_num: int = 0, den: int = 1) -> None:
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            re_num, im_num, den = -re_num, -im_num, -den
        g = math.gcd(math.gcd(re_num, im_num), den)
        if g > 1:
            re_num, im_num, den = re_num // g, im_num // g, den // g
        object.__setattr__(self, "re_num", re_num)
        object.__setattr__(self, "im_num", im_num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @classmethod
    def from_parts(cls, re, im=0) -> GaussRat:
        re, im = _as_fraction(re), _as_fraction(im)
        d = re.denominator * im.denominator // math.gcd(re.denominator, im.denominator)
        return cls(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    @classmethod
    def coerce(cls, x) -> GaussRat:
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, GaussInt):
            return cls(x.re, x.im, 1)
        if isinstance(x, int):
            return cls(x, 0, 1)
        if isinstance(x, Fraction):
            return cls(x.numerator, 0, x.denominator)
        raise TypeError(f"cannot interpret {x!r} as a Gaussian rational")

    @property
    def numerator(self) -> GaussInt:
        return GaussInt(self.re_num, self.im_num)

    @property
    def real(self) -> Fraction:
        return Fraction(self.re_num, self.den)

    @property
    def imag(self) -> Fraction:
        return Fraction(self.im_num, self.den)

    def is_integral(self) -> bool:
        return self.den == 1

    def __repr__(self) -> str:
        return f"GaussRat({self.re_num}, {self.im_num}, {self.den})"

    def __str__(self) -> str:
        s = str(self.numerator)
        return s if self.den == 1 else f"({s})/{self.den}"

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, GaussInt, Fraction)):
            other = GaussRat.coerce(other)
        if isinstance(other, GaussRat):
            return (self.re_num, self.im_num, self.den) == (other.re_num, other.im_num, other.den)
        return NotImplemented

    def __hash__(self) -> int:
        if self.den == 1:
            return hash(self.numerator)
        return hash((self.re_num, self.im_num, self.den))

    def __bool__(self) -> bool:
        return bool(self.re_num or self.im_num)

    def __neg__(self) -> GaussRat:
        return GaussRat(-self.re_num, -self.im_num, self.den)

    def __add__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRat(
            self.re_num * o.den + o.re_num * self.den,
            self.im_num * o.den + o.im_num * self.den,
            self.den * o.den,
        )

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRat(
            self.re_num * o.re_num - self.im_num * o.im_num,
            self.re_num * o.im_num + self.im_num * o.re_num,
            self.den * o.den,
        )

    __rmul__ = __mul__

    def conj(self) -> GaussRat:
        return GaussRat(self.re_num, -self.im_num, self.den)

    def norm(self) -> Fraction:
        return Fraction(self.re_num ** 2 + self.im_num ** 2, self.den ** 2)

    def inverse(self) -> GaussRat:
        n = self.re_num ** 2 + self.im_num ** 2
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussRat(self.re_num * self.den, -self.im_num * self.den, n)

    def __truediv__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) / self

    def __complex__(self) -> complex:
        return complex(self.re_num / self.den, self.im_num / self.den)


def qi(x) -> GaussRat:
    """Coerce ints, Fractions, GaussInts and complex integers to GaussRat."""
    if isinstance(x, complex):
        return GaussRat.coerce(GaussInt.coerce(x))
    return GaussRat.coerce(x)


@total_ordering
class RealQuad:
    """a + b*sqrt(2) with rational a, b; ordered by the real embedding."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0) -> None:
        object.__setattr__(self, "a", _as_fraction(a))
        object.__setattr__(self, "b", _as_fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("RealQuad is immutable")

    @classmethod
    def coerce(cls, x) -> RealQuad:
        if isinstance(x, RealQuad):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        raise TypeError(f"cannot interpret {x!r} as an element of Q(sqrt 2)")

    def __repr__(self) -> str:
        return f"RealQuad({self.a}, {self.b})"

    def __str__(self) -> str:
        return f"{self.a} + {self.b}*sqrt2"

    def sign(self) -> int:
        return rq_sign(self)

    def __eq__(self, other) -> bool:
        try:
            o = RealQuad.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def __lt__(self, other) -> bool:
        try:
            o = RealQuad.coerce(other)
        except TypeError:
            return NotImplemented
        return rq_sign(self - o) < 0

    def __neg__(self) -> RealQuad:
        return RealQuad(-self.a, -self.b)

    def __add__(self, other):
        try:
            o = RealQuad.coerce(other)
        except TypeError:
            return NotImplemented
        return RealQuad(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = RealQuad.coerce(other)
        except TypeError:
            return NotImplemented
        return RealQuad(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = RealQuad.coerce(other)
        except TypeError:
            return NotImplemented
        return RealQuad(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conj(self) -> RealQuad:
        """The Galois conjugate a - b*sqrt(2)."""
        return RealQuad(self.a, -self.b)

    def inverse(self) -> RealQuad:
        n = self.a * self.a - 2 * self.b * self.b
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt 2)")
        return RealQuad(self.a / n, -self.b / n)

    def __truediv__(self, other):
        try:
            o = RealQuad.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return RealQuad.coerce(other) / self

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(2)

    def to_pair(self) -> list[str]:
        return [str(self.a), str(self.b)]


def rq_sign(x: RealQuad) -> int:
    """Exact sign of a + b*sqrt(2) (one of -1, 0, 1)."""
    a, b = x.a, x.b
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sa == sb or sb == 0:
        return sa
    if sa == 0:
        return sb
    # opposite signs: the larger of a^2 and 2 b^2 decides
    lhs, rhs = a * a, 2 * b * b
    if lhs == rhs:
        return 0  # unreachable for rational a, b != 0
    return sa if lhs > rhs else sb


def rq_isqrt_floor(x: RealQuad) -> int:
    """floor(sqrt(x)) for x >= 0, exactly."""
    if rq_sign(x) < 0:
        raise ValueError("square root of a negative number")
    n = math.isqrt(max(int(float(x)), 0))
    while rq_sign(x - (n + 1) ** 2) >= 0:
        n += 1
    while n > 0 and rq_sign(x - n * n) < 0:
        n -= 1
    return n


def rq_floor(x: RealQuad) -> int:
    n = math.floor(float(x))
    while rq_sign(x - (n + 1)) >= 0:
        n += 1
    while rq_sign(x - n) < 0:
        n -= 1
    return n


class Cyclo8:
    """c0 + c1*z + c2*z^2 + c3*z^3 in Q(z), z = exp(i*pi/4), z^4 = -1."""

    __slots__ = ("c",)

    def __init__(self, c0=0, c1=0, c2=0, c3=0) -> None:
        object.__setattr__(self, "c", tuple(_as_fraction(v) for v in (c0, c1, c2, c3)))

    def __setattr__(self, name, value):
        raise AttributeError("Cyclo8 is immutable")

    @classmethod
    def coerce(cls, x) -> Cyclo8:
        if isinstance(x, Cyclo8):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, (GaussInt, GaussRat)):
            g = GaussRat.coerce(x)
            # i = z^2
            return cls(g.real, 0, g.imag, 0)
        if isinstance(x, RealQuad):
            # sqrt2 = z + z^7 = z - z^3
            return cls(x.a, x.b, 0, -x.b)
        raise TypeError(f"cannot interpret {x!r} as an element of Q(zeta8)")

    def __repr__(self) -> str:
        return "Cyclo8({}, {}, {}, {})".format(*self.c)

    def __eq__(self, other) -> bool:
        try:
            o = Cyclo8.coerce(other)
        except TypeError:
            return NotImplemented
        return self.c == o.c

    def __hash__(self) -> int:
        return hash(self.c)

    def __bool__(self) -> bool:
        return any(self.c)

    def __neg__(self) -> Cyclo8:
        return Cyclo8(*(-v for v in self.c))

    def __add__(self, other):
        try:
            o = Cyclo8.coerce(other)
        except TypeError:
            return NotImplemented
        return Cyclo8(*(u + v for u, v in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = Cyclo8.coerce(other)
        except TypeError:
            return NotImplemented
        return Cyclo8(*(u - v for u, v in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = Cyclo8.coerce(other)
        except TypeError:
            return NotImplemented
        out = [Fraction(0)] * 4
        for j, u in enumerate(self.c):
            if not u:
                continue
            for k, v in enumerate(o.c):
                if not v:
                    continue
                e = j + k
                if e >= 4:
                    out[e - 4] -= u * v
                else:
                    out[e] += u * v
        return Cyclo8(*out)

    __rmul__ = __mul__

    def conj(self) -> Cyclo8:
        # z -> z^7 = -z^3, z^2 -> z^6 = -z^2, z^3 -> z^5 = -z
        c0, c1, c2, c3 = self.c
        return Cyclo8(c0, -c3, -c2, -c1)

    def abs2(self) -> RealQuad:
        return cy_abs2(self)

    def real_part(self) -> RealQuad:
        """Re(x) as an element of Q(sqrt 2)."""
        c0, c1, c2, c3 = self.c
        # Re z = sqrt2/2, Re z^3 = -sqrt2/2
        return RealQuad(c0, (c1 - c3) / 2)

    def imag_part(self) -> RealQuad:
        c0, c1, c2, c3 = self.c
        return RealQuad(c2, (c1 + c3) / 2)

    def to_realquad(self) -> RealQuad:
        if self.imag_part() != RealQuad(0):
            raise ValueError(f"{self!r} is not real")
        return self.real_part()

    def __complex__(self) -> complex:
        z = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
        return sum(float(v) * z ** k for k, v in enumerate(self.c))


def cy_abs2(x: Cyclo8) -> RealQuad:
    """|x|^2 = x * conj(x), landing in the real subfield Q(sqrt 2)."""
    return (x * x.conj()).to_realquad()


ZETA8 = Cyclo8(0, 1, 0, 0)
ZETA8_INV = Cyclo8(0, 0, 0, -1)
SQRT2 = RealQuad(0, 1)

"""Exact dense linear algebra over Q(i), plus Hermite normal form over Z[i].

``QiMat`` keeps a matrix as (re + i*im)/den with ``re``/``im`` numpy object
arrays of Python ints, so products never overflow and never round.
"""

from __future__ import annotations

import math
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .scalar import GaussInt, GaussRat, qi


def _obj(a) -> np.ndarray:
    return np.asarray(a, dtype=object)


def _gcd_array(arr: np.ndarray) -> int:
    g = 0
    for v in arr.flat:
        if v:
            g = math.gcd(g, v)
            if g == 1:
                return 1
    return g


class QiMat:
    __slots__ = ("re", "im", "den")

    def __init__(self, re, im=None, den: int = 1, *, _normalize: bool = True) -> None:
        re = _obj(re)
        im = np.zeros(re.shape, dtype=object) if im is None else _obj(im)
        if re.shape != im.shape:
            raise ValueError("shape mismatch between real and imaginary parts")
        if den <= 0:
            raise ValueError("denominator must be positive")
        if _normalize and den != 1:
            g = math.gcd(math.gcd(_gcd_array(re), _gcd_array(im)), den)
            if g > 1:
                re, im, den = _obj(re // g), _obj(im // g), den // g
        self.re, self.im, self.den = re, im, den

    # construction -------------------------------------------------------

    @classmethod
    def from_entries(cls, rows) -> QiMat:
        """Build from (nested) sequences of ints, GaussInts, GaussRats or complex ints."""
        flat = [qi(x) for x in _flatten(rows)]
        shape = _shape(rows)
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (x.den for x in flat), 1)
        re = np.array([x.re_num * (den // x.den) for x in flat], dtype=object).reshape(shape)
        im = np.array([x.im_num * (den // x.den) for x in flat], dtype=object).reshape(shape)
        return cls(re, im, den)

    @classmethod
    def identity(cls, n: int) -> QiMat:
        e = np.zeros((n, n), dtype=object)
        for k in range(n):
            e[k, k] = 1
        return cls(e, np.zeros((n, n), dtype=object), 1)

    @classmethod
    def zeros(cls, shape) -> QiMat:
        return cls(np.zeros(shape, dtype=object), np.zeros(shape, dtype=object), 1)

    @classmethod
    def from_columns(cls, cols: Sequence[QiMat]) -> QiMat:
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.den for c in cols), 1)
        re = np.stack([c.re * (den // c.den) for c in cols], axis=1)
        im = np.stack([c.im * (den // c.den) for c in cols], axis=1)
        return cls(re, im, den)

    @classmethod
    def stack(cls, rows: Sequence[QiMat]) -> QiMat:
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.den for c in rows), 1)
        re = np.stack([c.re * (den // c.den) for c in rows], axis=0)
        im = np.stack([c.im * (den // c.den) for c in rows], axis=0)
        return cls(re, im, den)

    @classmethod
    def concat(cls, parts: Sequence[QiMat]) -> QiMat:
        """Join vectors end to end."""
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.den for c in parts), 1)
        re = np.concatenate([c.re * (den // c.den) for c in parts])
        im = np.concatenate([c.im * (den // c.den) for c in parts])
        return cls(re, im, den)

    # basic protocol -----------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.re.shape

    def __len__(self) -> int:
        return self.shape[0]

    def __getitem__(self, key):
        re, im = self.re[key], self.im[key]
        if isinstance(re, np.ndarray):
            return QiMat(re, im, self.den)
        return GaussRat(int(re), int(im), self.den)

    def entry(self, *idx) -> GaussRat:
        return GaussRat(int(self.re[idx]), int(self.im[idx]), self.den)

    def tolist(self):
        def conv(r, i):
            if isinstance(r, np.ndarray):
                return [conv(a, b) for a, b in zip(r, i)]
            return GaussRat(int(r), int(i), self.den)

        return conv(self.re, self.im)

    def to_gaussint(self) -> list:
        if self.den != 1:
            raise ValueError("matrix is not integral")

        def conv(r, i):
            if isinstance(r, np.ndarray):
                return [conv(a, b) for a, b in zip(r, i)]
            return GaussInt(int(r), int(i))

        return conv(self.re, self.im)

    def __repr__(self) -> str:
        return f"QiMat(shape={self.shape}, den={self.den})"

    def __str__(self) -> str:
        return str(np.vectorize(lambda r, i: str(GaussRat(int(r), int(i), self.den)))(self.re, self.im))

    def __eq__(self, other) -> bool:
        if not isinstance(other, QiMat):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.den == other.den
            and bool(np.all(self.re == other.re))
            and bool(np.all(self.im == other.im))
        )

    def __hash__(self) -> int:
        return hash((self.shape, self.den, tuple(self.re.flat), tuple(self.im.flat)))

    def is_integral(self) -> bool:
        return self.den == 1

    def is_zero(self) -> bool:
        return not any(self.re.flat) and not any(self.im.flat)

    # arithmetic ---------------------------------------------------------

    def _aligned(self, other: QiMat):
        den = self.den * other.den // math.gcd(self.den, other.den)
        a, b = den // self.den, den // other.den
        return self.re * a, self.im * a, other.re * b, other.im * b, den

    def __add__(self, other: QiMat) -> QiMat:
        r1, i1, r2, i2, den = self._aligned(other)
        return QiMat(r1 + r2, i1 + i2, den)

    def __sub__(self, other: QiMat) -> QiMat:
        r1, i1, r2, i2, den = self._aligned(other)
        return QiMat(r1 - r2, i1 - i2, den)

    def __neg__(self) -> QiMat:
        return QiMat(-self.re, -self.im, self.den, _normalize=False)

    def __matmul__(self, other: QiMat) -> QiMat:
        re = self.re.dot(other.re) - self.im.dot(other.im)
        im = self.re.dot(other.im) + self.im.dot(other.re)
        return QiMat(re, im, self.den * other.den)

    def scale(self, c) -> QiMat:
        c = qi(c)
        re = self.re * c.re_num - self.im * c.im_num
        im = self.re * c.im_num + self.im * c.re_num
        return QiMat(re, im, self.den * c.den)

    def __mul__(self, c) -> QiMat:
        return self.scale(c)

    __rmul__ = __mul__

    def conj(self) -> QiMat:
        return QiMat(self.re, -self.im, self.den, _normalize=False)

    @property
    def T(self) -> QiMat:
        return QiMat(self.re.T, self.im.T, self.den, _normalize=False)

    @property
    def H(self) -> QiMat:
        """Conjugate transpose."""
        return QiMat(self.re.T, -self.im.T, self.den, _normalize=False)

    def __pow__(self, k: int) -> QiMat:
        n = self.shape[0]
        if k < 0:
            return self.inverse() ** (-k)
        out, base = QiMat.identity(n), self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    # elimination-based routines ------------------------------------------

    def rref(self) -> tuple[list[list[GaussRat]], list[int]]:
        return _rref(self.tolist())

    def rank(self) -> int:
        return len(self.rref()[1])

    def det(self) -> GaussRat:
        n, m = self.shape
        if n != m:
            raise ValueError("determinant of a non-square matrix")
        a = [row[:] for row in self.tolist()]
        d = qi(1)
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c]), None)
            if piv is None:
                return qi(0)
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                d = -d
            d = d * a[c][c]
            inv = a[c][c].inverse()
            for r in range(c + 1, n):
                if a[r][c]:
                    f = a[r][c] * inv
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return d

    def inverse(self) -> QiMat:
        n, m = self.shape
        if n != m:
            raise ValueError("inverse of a non-square matrix")
        rows = self.tolist()
        aug = [row + [qi(1) if j == k else qi(0) for j in range(n)] for k, row in enumerate(rows)]
        red, piv = _rref(aug)
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return QiMat.from_entries([r[n:] for r in red])

    def solve(self, b: QiMat) -> QiMat | None:
        """Return one x with self @ x == b, or None if inconsistent."""
        rows = self.tolist()
        n_cols = self.shape[1]
        rhs = b.tolist()
        vec = not isinstance(rhs[0], list)
        if vec:
            rhs = [[x] for x in rhs]
        k = len(rhs[0])
        red, piv = _rref([r + list(bb) for r, bb in zip(rows, rhs)])
        if any(p >= n_cols for p in piv):
            return None
        x = [[qi(0)] * k for _ in range(n_cols)]
        for r, c in enumerate(piv):
            x[c] = red[r][n_cols:]
        out = QiMat.from_entries(x)
        return out[:, 0] if vec else out

    def nullspace(self) -> list[QiMat]:
        """Basis of the right kernel {x : self @ x = 0}."""
        red, piv = self.rref()
        n = self.shape[1]
        free = [c for c in range(n) if c not in piv]
        basis = []
        for f in free:
            v = [qi(0)] * n
            v[f] = qi(1)
            for r, c in enumerate(piv):
                v[c] = -red[r][f]
            basis.append(QiMat.from_entries(v))
        return basis


def _flatten(x) -> Iterable:
    if isinstance(x, (list, tuple, np.ndarray)):
        for y in x:
            yield from _flatten(y)
    else:
        yield x


def _shape(x) -> tuple[int, ...]:
    if isinstance(x, (list, tuple, np.ndarray)):
        if len(x) == 0:
            return (0,)
        return (len(x),) + _shape(x[0])
    return ()


def _rref(a: list[list[GaussRat]]) -> tuple[list[list[GaussRat]], list[int]]:
    a = [row[:] for row in a]
    n_rows = len(a)
    n_cols = len(a[0]) if a else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((k for k in range(r, n_rows) if a[k][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c].inverse()
        a[r] = [x * inv for x in a[r]]
        for k in range(n_rows):
            if k != r and a[k][c]:
                f = a[k][c]
                a[k] = [x - f * y for x, y in zip(a[k], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def vec(entries) -> QiMat:
    return QiMat.from_entries(list(entries))


def hermitian_form(gram: QiMat, u: QiMat, v: QiMat) -> GaussRat:
    """<u, v> = u^* G v, conjugate-linear in u."""
    return _scalar(u.conj() @ (gram @ v))


def _scalar(m: QiMat) -> GaussRat:
    return GaussRat(int(m.re[()]), int(m.im[()]), m.den)


# ---------------------------------------------------------------------------
# Hermite normal form over Z[i]


def residue_basis(d: GaussInt) -> tuple[int, int, int]:
    """Integer HNF (A, B, C) of the Z-lattice d*Z[i] inside Z^2.

    The lattice is spanned by (A, B) and (0, C) with A, C > 0 and
    0 <= B < C; reducing (x, y) against it gives a canonical residue.
    """
    a, b = d.re, d.im
    # generators (a, b) and (-b, a) in coordinates (re, im)
    g = math.gcd(a, b)
    A = g  # first coordinates of the lattice form g*Z
    n = a * a + b * b
    C = n // A
    # find a lattice vector with first coordinate g: u*a + v*(-b) = g
    _, u, v = _xgcd(a, -b)
    B = (u * b + v * a) % C
    return A, B, C


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def canonical_residue(x: GaussInt, d: GaussInt) -> GaussInt:
    """The canonical representative of x modulo d (d != 0)."""
    A, B, C = residue_basis(d)
    re, im = x.re, x.im
    k = re // A
    re, im = re - k * A, im - k * B
    im %= C
    return GaussInt(re, im)


def residue_system(d: GaussInt) -> list[GaussInt]:
    """A complete system of residues of Z[i] modulo d, in canonical form."""
    A, B, C = residue_basis(d)
    return [GaussInt(x, y) for x in range(A) for y in range(C)]


def hnf_gauss(rows: Sequence[Sequence[GaussInt]]) -> list[list[GaussInt]]:
    """Row Hermite normal form of a Z[i]-module generated by ``rows``.

    Zero rows are dropped, each pivot is the canonical associate (re > 0,
    im >= 0) and the entries above a pivot are canonical residues mod it,
    so two generating sets span the same module iff their HNFs agree.
    """
    a = [[GaussInt.coerce(x) for x in r] for r in rows]
    if not a:
        return []
    n_cols = len(a[0])
    out: list[list[GaussInt]] = []
    r = 0
    for c in range(n_cols):
        # Euclid on column c among rows r..end
        while True:
            nz = [k for k in range(r, len(a)) if a[k][c]]
            if not nz:
                break
            k_min = min(nz, key=lambda k: a[k][c].norm())
            a[r], a[k_min] = a[k_min], a[r]
            done = True
            for k in range(r + 1, len(a)):
                if a[k][c]:
                    q = a[k][c].divmod(a[r][c])[0]
                    a[k] = [x - q * y for x, y in zip(a[k], a[r])]
                    if a[k][c]:
                        done = False
            if done:
                break
        if r < len(a) and a[r][c]:
            _, u = a[r][c].associate()
            a[r] = [u * x for x in a[r]]
            piv = a[r][c]
            for k in range(r):
                if a[k][c]:
                    red = canonical_residue(a[k][c], piv)
                    q = (a[k][c] - red).divmod(piv)[0]
                    a[k] = [x - q * y for x, y in zip(a[k], a[r])]
            r += 1
            if r == len(a):
                break
    out = [row for row in a[:r] if any(row)]
    return out


def common_denominator(m: QiMat) -> int:
    return m.den


def span_hnf(generators: QiMat, scale: int | None = None) -> tuple[list[list[GaussInt]], int]:
    """HNF of the Z[i]-span of the columns of ``generators`` (rational allowed).

    The columns are multiplied by ``scale`` (default: their common
    denominator) to make them integral; the scale is returned alongside.
    """
    d = generators.den if scale is None else scale
    if d % generators.den:
        raise ValueError("scale does not clear denominators")
    integral = QiMat(generators.re * (d // generators.den), generators.im * (d // generators.den), 1, _normalize=False)
    rows = integral.T.to_gaussint()
    return hnf_gauss(rows), d


def same_span(a: QiMat, b: QiMat) -> bool:
    """True iff the columns of a and b span the same Z[i]-module."""
    d = a.den * b.den // math.gcd(a.den, b.den)
    return span_hnf(a, d)[0] == span_hnf(b, d)[0]


def contains_span(big: QiMat, small: QiMat) -> bool:
    """True iff span(small) is contained in span(big) (columns)."""
    return same_span(QiMat.from_columns([big[:, k] for k in range(big.shape[1])] + [small[:, k] for k in range(small.shape[1])]), big)


def index_in(big: QiMat, small: QiMat) -> int:
    """[span(big) : span(small)] for full-rank column spans with small inside big."""
    if not contains_span(big, small):
        raise ValueError("not a sublattice")
    db = big.den
    ds = small.den
    d = db * ds // math.gcd(db, ds)
    hb = span_hnf(big, d)[0]
    hs = span_hnf(small, d)[0]

    def diag_norm(h):
        prod = 1
        for k, row in enumerate(h):
            piv = next(x for x in row if x)
            prod *= piv.norm()
        return prod

    return diag_norm(hs) // diag_norm(hb)

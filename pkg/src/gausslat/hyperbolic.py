"""Exact distance functionals on complex hyperbolic space B(L).

Every quantity here is a squared cosh, squared sinh or exp(2 d) of a
distance.  They are monotone in the distance, so comparisons stay algebraic:
values live in Q(sqrt2) (``RealQuad``) or, for the horocyclic bounds, in
``Surd`` = a + b sqrt(c) over Q(sqrt2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .lattices import RHO, cy_inner, cy_norm, simple_root_matrix, tau_vector
from .scalar import Cyclo8, GaussRat, RealQuad, qi, rq_sign

KINDS = ("cosh2", "sinh2", "exp2horo")


@dataclass(frozen=True)
class SqDist:
    """A tagged monotone proxy of a distance; only like kinds compare."""

    kind: str
    value: RealQuad

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        floor = 1 if self.kind == "cosh2" else 0
        if self.value < RealQuad(floor):
            raise ValueError(f"{self.kind} value below {floor}")

    def _check(self, other: SqDist) -> None:
        if not isinstance(other, SqDist) or other.kind != self.kind:
            raise TypeError("cannot compare distances of different kinds")

    def __lt__(self, other: SqDist) -> bool:
        self._check(other)
        return self.value < other.value

    def __le__(self, other: SqDist) -> bool:
        self._check(other)
        return self.value < other.value or self.value == other.value

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class Surd:
    """a + b sqrt(c) with a, b, c in Q(sqrt2) and c >= 0."""

    a: RealQuad
    b: RealQuad
    c: RealQuad

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(float(self.c))

    def scale(self, k: RealQuad) -> Surd:
        if k < RealQuad(0):
            raise ValueError("scale factor must be nonnegative")
        return Surd(self.a * k, self.b * k, self.c)

    def ge(self, x) -> bool:
        """Exactly decide x <= a + b sqrt(c)."""
        d = RealQuad.coerce(x) - self.a
        rhs2 = self.b * self.b * self.c
        if rq_sign(self.b) >= 0:
            return rq_sign(d) <= 0 or not (rhs2 < d * d)
        return rq_sign(d) <= 0 and not (d * d < rhs2)


def _cy(v: Sequence) -> list[Cyclo8]:
    out = []
    for x in v:
        if isinstance(x, GaussRat):
            if x.den != 1:
                # scale-invariant functionals: clear the denominator first
                raise ValueError("use integral representatives")
        out.append(Cyclo8.coerce(x))
    return out


def _vec(v) -> list[Cyclo8]:
    if hasattr(v, "tolist"):
        v = v.tolist()
    vals = list(v)
    dens = [x.den for x in vals if isinstance(x, GaussRat)]
    if dens and max(dens) > 1:
        m = math.lcm(*dens)
        vals = [x * qi(m) for x in vals]
    return _cy(vals)


def _norm(v: list[Cyclo8]) -> RealQuad:
    return cy_norm(v)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def cosh2_pt_pt(u, v) -> RealQuad:
    """cosh^2 d(u, v) = |<u,v>|^2 / (u^2 v^2) for negative-norm u, v."""
    u, v = _vec(u), _vec(v)
    nu, nv = _norm(u), _norm(v)
    _require(rq_sign(nu) < 0 and rq_sign(nv) < 0, "points need negative norm")
    return cy_inner(u, v).abs2() / (nu * nv)


def sinh2_pt_mirror(r, v) -> RealQuad:
    """sinh^2 d(r-perp, v) = |<r,v>|^2 / (-r^2 v^2)."""
    r, v = _vec(r), _vec(v)
    nr, nv = _norm(r), _norm(v)
    _require(rq_sign(nr) > 0, "mirror vector needs positive norm")
    _require(rq_sign(nv) < 0, "point needs negative norm")
    return cy_inner(r, v).abs2() / (-(nr * nv))


def _proportional(u: list[Cyclo8], v: list[Cyclo8]) -> bool:
    return all(u[j] * v[k] == u[k] * v[j] for j in range(len(u)) for k in range(j + 1, len(u)))


def _gram2(r, s):
    nr, ns = _norm(r), _norm(s)
    _require(rq_sign(nr) > 0 and rq_sign(ns) > 0, "mirror vectors need positive norm")
    # |<r,s>|^2 = r^2 s^2 does not force proportionality in signature (9,1)
    _require(not _proportional(r, s), "vectors are proportional")
    return nr, ns, cy_inner(r, s).abs2()


def mirrors_meet(r, s) -> bool:
    """r-perp and s-perp meet inside B(L) iff span(r, s) is positive definite.

    A degenerate span (determinant 0) means the mirrors meet only at a boundary point.
    """
    r, s = _vec(r), _vec(s)
    nr, ns, ip2 = _gram2(r, s)
    return rq_sign(nr * ns - ip2) > 0


def cosh2_mirror_mirror(r, s) -> RealQuad:
    """|<r,s>|^2/(r^2 s^2); at least 1 exactly when the mirrors do not meet."""
    r, s = _vec(r), _vec(s)
    nr, ns, ip2 = _gram2(r, s)
    return ip2 / (nr * ns)


def horo_exp2(z, v) -> RealQuad:
    """exp(2 d_z(v)) = |<z,v>|^2 / (-v^2) for a null z."""
    z, v = _vec(z), _vec(v)
    _require(any(z), "null vector must be nonzero")
    _require(_norm(z) == RealQuad(0), "z must be null")
    nv = _norm(v)
    _require(rq_sign(nv) < 0, "point needs negative norm")
    return cy_inner(z, v).abs2() / (-nv)


def height(s, rho: Sequence = RHO):
    """|<s,rho>|^2 / |s^2|, or |<s,rho>|^2 for null s (a Fraction)."""
    sv = _vec(s)
    ip = cy_inner(sv, _vec(rho)).abs2()
    n = _norm(sv)
    val = ip if rq_sign(n) == 0 else ip / (n if rq_sign(n) > 0 else -n)
    if val.b != 0:
        raise ValueError("height of a lattice vector is rational")
    return val.a


def gram3_det(z, x, y) -> RealQuad:
    vs = [_vec(z), _vec(x), _vec(y)]
    g = [[cy_inner(a, b) for b in vs] for a in vs]
    det = (
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
        - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    )
    return det.to_realquad()


@dataclass(frozen=True)
class TriangleCheck:
    det_nonpositive: bool
    inequality: bool
    equality: bool

    @property
    def ok(self) -> bool:
        return self.det_nonpositive and self.inequality


def ideal_triangle_check(z, x, y) -> TriangleCheck:
    """cosh d(x,y) >= cosh |d_z(x) - d_z(y)|, certified through det gram(z,x,y) <= 0."""
    det = gram3_det(z, x, y)
    ex, ey = horo_exp2(z, x), horo_exp2(z, y)
    # cosh^2(D) with e^{2D} = ex/ey
    rhs = (ex / ey + ey / ex + RealQuad(2)) / RealQuad(4)
    lhs = cosh2_pt_pt(x, y)
    return TriangleCheck(rq_sign(det) <= 0, not (lhs < rhs), lhs == rhs)


# ---------------------------------------------------------------------------
# the constants around tau


def tau_norm() -> RealQuad:
    return cy_norm(tau_vector())


def sinh2_d0() -> RealQuad:
    """sinh^2 d(tau, s_v-perp), checked to be the same for all 32 simple roots."""
    S = simple_root_matrix()
    tau = tau_vector()
    vals = {sinh2_pt_mirror([S.entry(r, k) for r in range(10)], tau) for k in range(S.shape[1])}
    if len(vals) != 1:
        raise AssertionError("simple mirrors are not equidistant from tau")
    return vals.pop()


def d0() -> float:
    """The common distance, as a float for display only."""
    return math.asinh(math.sqrt(float(sinh2_d0())))


def two_cosh2_2d0() -> RealQuad:
    """2 cosh^2(2 d0) = 2 (1 + 2 sinh^2 d0)^2."""
    s = sinh2_d0()
    c = RealQuad(1) + RealQuad(2) * s
    return RealQuad(2) * c * c


def exp_2d0() -> Surd:
    """e^{2 d0} = 1 + 2S + 2 sqrt(S(S+1)) with S = sinh^2 d0."""
    s = sinh2_d0()
    return Surd(RealQuad(1) + RealQuad(2) * s, RealQuad(2), s * (s + RealQuad(1)))


def horo_bound(w) -> Surd:
    """e^{2(d0 + d_w(tau))}: the cap on |p^{-1}<w, r>|^2 for a mirror within d0 of tau."""
    return exp_2d0().scale(horo_exp2(w, tau_vector()))

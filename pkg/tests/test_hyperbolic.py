from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausslat import hyperbolic as H
from gausslat import lattices as L
from gausslat import shortvec
from gausslat.scalar import P, PBAR, ZETA8, Cyclo8, GaussInt, RealQuad, rq_sign

ROOTS = L.simple_roots_32()
TAU = L.tau_vector()


def neg_vector(lam, a):
    """(lam; 1, n) with Re(pbar n) = a; its norm is |lam|^2 + 2a."""
    lam = [GaussInt.coerce(x) for x in lam]
    return lam + [GaussInt(1), GaussInt(a, 0)]


def test_cosh2_pt_pt_basic():
    assert H.cosh2_pt_pt(TAU, TAU) == 1
    zt = [ZETA8 * x for x in TAU]
    assert H.cosh2_pt_pt(TAU, zt) == 1
    x = neg_vector([1] + [0] * 7, -3)
    assert H.cosh2_pt_pt(x, TAU) == H.cosh2_pt_pt(TAU, x)
    with pytest.raises(ValueError):
        H.cosh2_pt_pt(ROOTS["a"], TAU)


def test_sinh2_d0_common_value():
    s = H.sinh2_d0()
    assert s == RealQuad(0, 1) / 8
    vals = {H.sinh2_pt_mirror(r, TAU) for r in ROOTS.values()}
    assert vals == {s}
    assert round(math.sinh(0.4090) ** 2, 4) == round(float(s), 4)
    assert abs(H.d0() - 0.4090) < 5e-5


def test_sinh2_pt_mirror_zero_and_scaling():
    d1 = ROOTS["d1"]
    v = [0] * 8 + [1, -1]
    assert rq_sign(L.cy_norm(v)) < 0
    assert H.sinh2_pt_mirror(d1, v) == 0
    s = H.sinh2_pt_mirror(ROOTS["a"], TAU)
    assert H.sinh2_pt_mirror([2 * x for x in ROOTS["a"]], [ZETA8 * x for x in TAU]) == s


def test_mirror_pairs():
    # orthogonal, braiding, and dotted pairs
    assert H.mirrors_meet(ROOTS["c1"], ROOTS["c2"])
    assert H.cosh2_mirror_mirror(ROOTS["c1"], ROOTS["c2"]) == 0
    assert H.mirrors_meet(ROOTS["a"], ROOTS["b1"])
    assert H.cosh2_mirror_mirror(ROOTS["a"], ROOTS["b1"]) == RealQuad(1, 0) / 2
    assert not H.mirrors_meet(ROOTS["a"], ROOTS["z"])
    assert H.cosh2_mirror_mirror(ROOTS["a"], ROOTS["z"]) == 1
    with pytest.raises(ValueError):
        H.mirrors_meet(ROOTS["a"], [2 * x for x in ROOTS["a"]])


def test_cutoff_constants():
    assert round(float(H.two_cosh2_2d0()), 4) == 3.6642
    assert round(float(H.horo_bound(L.RHO1)), 4) == 9.3379
    assert round(float(H.horo_bound(L.l_infinity())), 4) == 3.2043


def test_horo_exp2_invariance():
    e = H.horo_exp2(L.RHO1, TAU)
    assert H.horo_exp2(L.RHO1, [ZETA8 * x for x in TAU]) == e
    with pytest.raises(ValueError):
        H.horo_exp2(ROOTS["a"], TAU)


def test_heights(sv_cache):
    assert H.height(ROOTS["a"]) == 1
    assert H.height(L.RHO1) == 2
    # a second-shell style root (sigma; pbar, -1) with sigma^2 = 6
    bw = L.make_BW16()
    sigma = bw.vec(shortvec.enumerate_norm(bw, 6, sv_cache)[0]).tolist()
    s = sigma + [PBAR, -1]
    assert L.cy_norm(s) == 2
    assert H.height(s) == 2


def test_sqdist_kinds():
    a = H.SqDist("sinh2", RealQuad(1))
    b = H.SqDist("sinh2", RealQuad(0, 1))
    assert a < b and a <= a
    with pytest.raises(TypeError):
        a < H.SqDist("cosh2", RealQuad(2))
    with pytest.raises(ValueError):
        H.SqDist("cosh2", RealQuad(0))
    with pytest.raises(ValueError):
        H.SqDist("volume", RealQuad(1))


def test_surd_comparison():
    e = H.exp_2d0()
    f = float(e)
    s = float(H.sinh2_d0())
    assert abs(f - math.exp(2 * math.asinh(math.sqrt(s)))) < 1e-12
    assert e.ge(RealQuad(2)) and not e.ge(RealQuad(3))
    neg = H.Surd(RealQuad(3), RealQuad(-1), RealQuad(2))
    assert neg.ge(RealQuad(1)) and not neg.ge(RealQuad(2))


def test_ideal_triangle_equal_points():
    x = neg_vector([1, 1] + [0] * 6, -3)
    rep = H.ideal_triangle_check(L.RHO, x, x)
    assert rep.ok and rep.equality


def test_ideal_triangle_geodesic_ray_equality():
    x = neg_vector([1, 1] + [0] * 6, -3)
    # <x, rho> = pbar, so x - t p rho (t > 0) stays on the real geodesic ray toward rho
    assert L.cy_inner(x, L.RHO) == Cyclo8.coerce(PBAR)
    y = [a - 3 * P * GaussInt.coerce(b) for a, b in zip(x, L.RHO)]
    assert rq_sign(L.cy_norm(y)) < 0
    rep = H.ideal_triangle_check(L.RHO, x, y)
    assert rep.ok and rep.equality
    # a real multiple of rho moves off the ray and the inequality is strict
    off = [a - 3 * GaussInt.coerce(b) for a, b in zip(x, L.RHO)]
    rep = H.ideal_triangle_check(L.RHO, x, off)
    assert rep.ok and not rep.equality


small = st.integers(-2, 2)
lam8 = st.lists(st.builds(GaussInt, small, small), min_size=8, max_size=8)


@settings(max_examples=60, deadline=None)
@given(lam8, lam8, st.integers(0, 4), st.integers(0, 4))
def test_ideal_triangle_inequality(l1, l2, k1, k2):
    x = neg_vector(l1, -(sum(t.norm() for t in l1) // 2 + 1 + k1))
    y = neg_vector(l2, -(sum(t.norm() for t in l2) // 2 + 1 + k2))
    for z in (L.RHO, L.p_infinity(), L.l_infinity()):
        assert H.ideal_triangle_check(z, x, y).ok


@settings(max_examples=60, deadline=None)
@given(lam8, st.integers(0, 4))
def test_cosh2_at_least_one(l1, k):
    x = neg_vector(l1, -(sum(t.norm() for t in l1) // 2 + 1 + k))
    assert not (H.cosh2_pt_pt(x, TAU) < RealQuad(1))
    u = [Cyclo8.coerce(t) for t in x]
    assert H.cosh2_pt_pt(u, [ZETA8 * t for t in u]) == 1

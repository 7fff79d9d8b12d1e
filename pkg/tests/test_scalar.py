from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gausslat.scalar import (
    I,
    P,
    SQRT2,
    ZETA8,
    ZETA8_INV,
    Cyclo8,
    GaussInt,
    GaussRat,
    RealQuad,
    cy_abs2,
    gauss_ball,
    ggcd,
    gnorm,
    p_divides,
    rq_floor,
    rq_isqrt_floor,
    rq_sign,
)

small = st.integers(-50, 50)
gints = st.builds(GaussInt, small, small)
fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
rquads = st.builds(RealQuad, fracs, fracs)
cyclos = st.builds(Cyclo8, small, small, small, small)
grats = st.builds(GaussRat, small, small, st.integers(1, 9))


def test_gnorm_examples():
    assert gnorm(P) == 2
    assert gnorm(0) == 0
    x = GaussInt(1, 2) * GaussInt(2, 1)
    assert x == GaussInt(0, 5)
    assert gnorm(x) == 25 == gnorm(GaussInt(1, 2)) * gnorm(GaussInt(2, 1))


def test_p_divides():
    assert p_divides(P)
    assert not p_divides(1)
    assert p_divides(2)
    assert GaussInt(2) == -I * P * P


def test_gauss_ball_sizes():
    assert gauss_ball(0) == [GaussInt(0)]
    assert len(gauss_ball(2)) == 9
    assert len(gauss_ball(9)) == 29
    assert gauss_ball(-1) == []
    assert [z.norm() for z in gauss_ball(5)] == sorted(z.norm() for z in gauss_ball(5))


def test_rq_sign_examples():
    assert rq_sign(RealQuad(1, 0)) == 1
    assert rq_sign(RealQuad(-3, 2)) == -1
    assert rq_sign(RealQuad(0, 0)) == 0
    assert rq_sign(RealQuad(3, -2)) == 1
    assert SQRT2 * SQRT2 == 2


def test_cy_abs2_examples():
    assert cy_abs2(ZETA8) == RealQuad(1)
    assert cy_abs2(Cyclo8(1) + ZETA8 * ZETA8) == RealQuad(2)
    assert cy_abs2(Cyclo8(1) + ZETA8) == RealQuad(2, 1)


def test_zeta8_is_primitive_eighth_root():
    assert ZETA8 * ZETA8 == Cyclo8.coerce(I)
    assert ZETA8 * ZETA8_INV == Cyclo8(1)
    z = Cyclo8(1)
    for _ in range(8):
        z = z * ZETA8
    assert z == Cyclo8(1)


def test_divmod_remainder_bound():
    for a in gauss_ball(40):
        for d in (P, GaussInt(2), GaussInt(3, 1)):
            q, r = a.divmod(d)
            assert q * d + r == a
            assert 2 * r.norm() <= d.norm()


def test_ggcd():
    assert ggcd(GaussInt(2), GaussInt(1, 1)) == GaussInt(1, 1)
    assert ggcd(GaussInt(5), GaussInt(1, 2)) == GaussInt(1, 2)
    assert ggcd(GaussInt(3), GaussInt(1, 2)) == GaussInt(1)


def test_gaussrat_rejects_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        GaussRat(1, 0, 0)


def test_rq_floor_and_isqrt():
    assert rq_floor(SQRT2) == 1
    assert rq_floor(-SQRT2) == -2
    assert rq_isqrt_floor(RealQuad(8, 0)) == 2
    assert rq_isqrt_floor(RealQuad(9, 0)) == 3
    with pytest.raises(ValueError):
        rq_isqrt_floor(RealQuad(0, -1))


@given(gints, gints)
def test_norm_multiplicative(x, y):
    assert (x * y).norm() == x.norm() * y.norm()
    assert x.norm() >= 0 and (x.norm() == 0) == (not x)


@given(grats, grats)
def test_gaussrat_field(x, y):
    assert (x * y).conj() == x.conj() * y.conj()
    assert x.conj().conj() == x
    if y:
        assert (x / y) * y == x


@given(grats, grats)
def test_gaussrat_embeds_in_cyclo8(x, y):
    if x.den == 1 and y.den == 1:
        cx, cy = Cyclo8.coerce(x), Cyclo8.coerce(y)
        assert Cyclo8.coerce(x * y) == cx * cy
        assert Cyclo8.coerce(x + y) == cx + cy


@given(cyclos, cyclos)
def test_cyclo8_conj_and_abs2(x, y):
    assert (x * y).conj() == x.conj() * y.conj()
    assert x.conj().conj() == x
    a = cy_abs2(x)
    assert rq_sign(a) >= 0
    assert (rq_sign(a) == 0) == (not x)
    assert cy_abs2(x * y) == a * cy_abs2(y)


@given(rquads, rquads)
def test_realquad_order_matches_floats(x, y):
    fx, fy = float(x), float(y)
    if abs(fx - fy) > 1e-9:
        assert (x < y) == (fx < fy)
    assert rq_sign(x - y) == -rq_sign(y - x)


@given(rquads)
def test_realquad_inverse(x):
    if x != 0:
        assert x * x.inverse() == 1
    assert x.conj().conj() == x
    assert isinstance((x * x.conj()).b, Fraction) and (x * x.conj()).b == 0

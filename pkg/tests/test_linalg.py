from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from gausslat.linalg import QiMat, canonical_residue, hnf_gauss, index_in, residue_system, same_span
from gausslat.scalar import P, GaussInt, GaussRat

g = st.builds(GaussInt, st.integers(-6, 6), st.integers(-6, 6))
rows3 = st.lists(st.lists(g, min_size=3, max_size=3), min_size=1, max_size=5)


def test_residue_systems():
    assert len(residue_system(P)) == 2
    assert len(residue_system(GaussInt(2))) == 4
    assert len(residue_system(GaussInt(2, 1))) == 5
    d = GaussInt(3, 1)
    for x in (GaussInt(7, -4), GaussInt(-11, 9)):
        r = canonical_residue(x, d)
        assert r in residue_system(d) and d.divides(x - r)


@settings(max_examples=60, deadline=None)
@given(rows3, st.sampled_from([GaussInt(1), GaussInt(0, 1), GaussInt(-1), GaussInt(0, -1)]))
def test_hnf_is_canonical(rows, u):
    h = hnf_gauss(rows)
    # unit scaling, row shuffles and an elementary row operation keep the module
    other = [list(r) for r in reversed(rows)]
    other[0] = [u * x for x in other[0]]
    if len(other) > 1:
        other[1] = [a + GaussInt(2, -1) * b for a, b in zip(other[1], other[0])]
    assert hnf_gauss(other) == h
    for row in h:
        piv = next(x for x in row if x)
        assert piv.re > 0 and piv.im >= 0


def test_inverse_and_det():
    m = QiMat.from_entries([[2, GaussInt(1, 1)], [GaussInt(1, -1), 3]])
    assert m @ m.inverse() == QiMat.identity(2)
    assert m.det() == GaussRat(4, 0)
    assert m.H == m


def test_span_and_index():
    a = QiMat.identity(2)
    b = QiMat.from_entries([[P, 0], [0, 1]])
    assert same_span(a, a.scale(GaussInt(0, 1)))
    assert not same_span(a, b)
    assert index_in(a, b) == 2
    assert index_in(a, a.scale(2)) == 16


def test_nullspace():
    m = QiMat.from_entries([[1, 1, 0], [0, 1, 1]])
    ns = m.nullspace()
    assert len(ns) == 1 and (m @ ns[0]).is_zero()

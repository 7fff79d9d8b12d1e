from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausslat import isometry as iso
from gausslat import lattices as L
from gausslat.linalg import QiMat
from gausslat.scalar import GaussInt, GaussRat

R = L.simple_roots_32()
BW = L.make_BW16()


def test_reflection_orders():
    r = iso.reflection(R["a"])
    one = iso.identity()
    assert r**4 == one and r**2 != one
    half = iso.reflection(R["a"], xi=-1)
    assert half**2 == one
    assert r**2 == half
    assert r.is_unitary()
    assert r.matrix.is_integral()
    assert r.preserves(L.make_L_d4())
    with pytest.raises(ValueError):
        iso.reflection(L.p_infinity())


def test_simple_reflections_preserve_L():
    Ld4 = L.make_L_d4()
    for r in iso.simple_reflections():
        assert r.is_unitary() and r.preserves(Ld4)


def test_pair_relations():
    assert iso.braids(R["a"], R["b1"]) and not iso.commutes(R["a"], R["b1"])
    assert iso.commutes(R["c1"], R["c2"])
    assert iso.length4_relation(R["a"], R["z"]) and not iso.braids(R["a"], R["z"])


def _octagon(names):
    refl = iso.simple_reflections()
    idx = {n: k for k, n in enumerate(L.vertex_names())}
    return [refl[idx[n]] for n in names]


def test_deflation_on_octagons():
    for octo in [("d2", "c2", "b2", "a", "b1", "c1", "d1", "e12"), ("d1", "c1", "b1", "e34", "b2", "c2", "d2", "z")]:
        gens = _octagon(octo)
        assert all(iso.deflation_check(gens, 7, off) for off in range(8))
        # one letter short does not close up
        assert not iso.deflation_check(gens, 6)


def test_frames_do_not_mix():
    with pytest.raises(ValueError):
        iso.identity(frame="bw") @ iso.identity(frame="d4")


def test_conjugate_to_bw_frame():
    phi = L.iso_phi().matrix
    r = iso.reflection(R["a"])
    rb = r.conjugate(phi.inverse(), "bw")
    assert rb.frame == "bw"
    assert rb.is_unitary()
    assert rb.preserves(L.make_L_bw())


def test_valid_translation():
    lam = BW.basis[:, 0]
    half = BW.norm(lam) / 2
    assert iso.valid_translation(lam, GaussRat.from_parts(0, half))
    assert iso.valid_translation(lam, GaussRat.from_parts(0, half + 2))
    assert not iso.valid_translation(lam, GaussRat.from_parts(0, half + 1))
    assert not iso.valid_translation(lam, GaussRat.from_parts(1, half))
    with pytest.raises(ValueError):
        iso.make_translation(lam, GaussRat.from_parts(0, half + 1))


def test_translation_matrix_is_isometry():
    lam = BW.basis[:, 2]
    T = iso.make_translation(lam, GaussRat.from_parts(0, BW.norm(lam) / 2)).isometry
    assert T.is_unitary()
    assert T.preserves(L.make_L_bw())
    assert T(L.RHO) == QiMat.from_entries(L.RHO)


def test_r1r2_identities():
    out = iso.r1r2_identity(BW.basis[:, 5])
    assert all(out.values()), out
    assert out["beta_order_4"]


def test_tstar_reps():
    reps = iso.tstar_reps()
    assert len(reps) == 512
    assert all(iso.valid_translation(t.lam, t.z) for t in reps)
    assert any(t.lam.is_zero() and not t.z for t in reps)


def test_word_to_isometry():
    refl = iso.simple_reflections()
    assert iso.word_to_isometry([1, 33], refl) == iso.identity()
    assert iso.word_to_isometry([2, 3], refl) == refl[2] @ refl[1]


coef = st.lists(st.builds(GaussInt, st.integers(-2, 2), st.integers(-2, 2)), min_size=8, max_size=8)
shift = st.integers(-3, 3)


def _translation(c, k):
    lam = BW.vec(c)
    return iso.make_translation(lam, GaussRat.from_parts(0, BW.norm(lam) / 2 + 2 * k))


@settings(max_examples=30, deadline=None)
@given(coef, shift, coef, shift)
def test_heisenberg_law_matches_matrices(c1, k1, c2, k2):
    t1, t2 = _translation(c1, k1), _translation(c2, k2)
    prod = t1 @ t2
    assert iso.valid_translation(prod.lam, prod.z)
    assert (t1.isometry @ t2.isometry) == prod.isometry
    comm = iso.trans_commutator(t1, t2)
    lhs = t1.isometry @ t2.isometry @ t1.inverse().isometry @ t2.inverse().isometry
    assert lhs == comm.isometry
    assert (t1.isometry @ t1.inverse().isometry) == iso.identity(frame="bw")


@settings(max_examples=10, deadline=None)
@given(coef)
def test_r1r2_commutator_for_random_lambda(c):
    out = iso.r1r2_identity(BW.vec(c))
    assert out["conjugation"] and out["commutator"]

from __future__ import annotations

import itertools

import pytest

from gausslat import fingeom as F
from gausslat.lattices import p_infinity, simple_root_matrix
from gausslat.linalg import QiMat

A = (1, 1, 1, 1)
V = F.vertex_by_name
POINTS = [v for v in F.VERTICES if v.is_point]
HPLANES = [v for v in F.VERTICES if not v.is_point]


def test_vertex_sets():
    assert len(POINTS) == 16 and len(HPLANES) == 16
    assert len(set(F.VERTICES)) == 32
    for h in HPLANES:
        assert sum(a * b for a, b in zip(h.data[0], A)) % 2 == 1
    with pytest.raises(ValueError):
        F.hplane((0, 0, 0, 0), 0)


def test_incidence_examples():
    assert not F.incident(V("a"), V("d1"))
    assert F.incident(V("z"), V("d1"))
    for pt in POINTS:
        assert sum(F.incident(pt, h) for h in HPLANES) == 8


def test_translation_by_a():
    assert F.t_translate(A, V("z")) == V("a")
    for k in range(1, 5):
        assert F.t_translate(A, V(f"d{k}")) == V(f"h{k}")
    for w in itertools.product((0, 1), repeat=4):
        for v in F.VERTICES:
            assert F.t_translate(w, F.t_translate(w, v)) == v


def test_sigma_d():
    for v in F.VERTICES:
        assert F.sigma_D(F.sigma_D(v)) == v
        assert F.sigma_D(v).is_point != v.is_point
        assert F.sigma_D(F.t_translate(A, v)) == F.t_translate(A, F.sigma_D(v))
    for pt in POINTS:
        for h in HPLANES:
            assert F.incident(pt, h) == F.incident(F.sigma_D(h), F.sigma_D(pt))


def test_edge_kinds():
    assert F.edge_kind(V("a"), V("b1")) is F.EdgeKind.SOLID
    assert F.edge_kind(V("a"), V("z")) is F.EdgeKind.DOTTED
    assert F.edge_kind(V("c1"), V("c2")) is F.EdgeKind.NONE
    with pytest.raises(ValueError):
        F.edge_kind(V("a"), V("a"))


def test_gram_table_hermitian():
    g = F.diagram_gram()
    for u in range(32):
        for v in range(32):
            assert g[u][v] == g[v][u].conj()


def test_group_orders_and_orbits():
    Qp, Q = F.group_Qplus(), F.group_Q()
    assert Qp.order == 21504 == 2**4 * 2**3 * 168
    assert Q.order == 43008
    assert sorted(len(o) for o in Qp.orbits()) == [16, 16]
    assert len(Q.orbits()) == 1
    assert F.SIGMA_PERM in Q and F.SIGMA_PERM not in Qp


def test_qplus_is_every_affine_symmetry():
    assert F.all_affine_symmetries() == F.group_Qplus().elements


def test_generators_preserve_edges():
    for g in F.qplus_generators() + [F.SIGMA_PERM]:
        assert F.preserves_edges(g)


def test_perm_helpers():
    g = F.SIGMA_PERM
    assert F.compose(g, F.invert(g)) == F.IDENTITY
    assert F.compose(g, g) == F.IDENTITY


def test_translation_lift_fixes_cusp():
    pinf = QiMat.from_entries(p_infinity())
    S = simple_root_matrix()
    for k in range(4):
        w = tuple(1 if j == k else 0 for j in range(4))
        g = F.perm_of(lambda v, w=w: F.t_translate(w, v))
        M = F.lift_to_isometry(g)
        assert M @ pinf == pinf
        # point mirrors through the cusp are permuted among themselves
        for u in range(32):
            if F.VERTICES[u].is_point:
                assert F.VERTICES[g[u]].is_point
                assert M @ S[:, u] == S[:, g[u]]


def test_sigma_lift_squares_to_minus_i():
    assert F.sigma_square_check()


def test_fixed_locus_is_tau_line():
    rep = F.fixed_locus_check()
    assert rep["commutator_fixed_dim"] == 2
    assert rep["ok"], rep


def test_relation_sweep():
    rep = F.relation_sweep()
    assert rep["pairs"] == 496 == 32 * 31 // 2
    assert rep["by_kind"]["dotted"] == 16
    assert rep["by_kind"]["solid"] == 16 * 8
    assert rep["ok"], rep["failures"]


def test_linear_relations():
    rep = F.linear_relations()
    assert rep["gram_rank"] == 10 and rep["radical_rank"] == 22
    assert all(v for v in rep.values() if isinstance(v, bool)), rep


def test_diagram_export():
    js = F.diagram_json()
    assert len(js["vertices"]) == 32
    assert len(js["edges"]) == 16 * 8 + 16
    dot = F.diagram_dot()
    assert dot.startswith("graph D {") and dot.count("--") == 144

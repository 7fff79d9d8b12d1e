"""The 32-vertex configuration D = F_2^4 + K and its symmetry groups.

Vertices are indexed 0..31 in the order of ``lattices.vertex_names()``.
A point is a 4-bit tuple; a hyperplane is (u, eps) meaning {x : u.x = eps}
with u.a = 1 for a = (1, 1, 1, 1).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .lattices import (
    ambient_L,
    as_vec,
    cy_norm,
    is_primitive,
    l_infinity,
    make_L_d4,
    p_infinity,
    simple_root_matrix,
    simple_roots_32,
    tau_vector,
    vertex_names,
)
from .linalg import QiMat
from .scalar import ZETA8_INV, Cyclo8, GaussInt

Bits = tuple[int, int, int, int]
A_VEC: Bits = (1, 1, 1, 1)


def _add(x: Sequence[int], y: Sequence[int]) -> Bits:
    return tuple((s + t) % 2 for s, t in zip(x, y))  # type: ignore[return-value]


def _dot(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(s * t for s, t in zip(x, y)) % 2


def _unit(k: int) -> Bits:
    return tuple(1 if j == k else 0 for j in range(4))  # type: ignore[return-value]


@dataclass(frozen=True)
class Vertex:
    """A point (kind "pt", data=x) or a hyperplane (kind "hp", data=(u, eps))."""

    kind: str
    data: tuple

    @property
    def is_point(self) -> bool:
        return self.kind == "pt"


def point(x: Sequence[int]) -> Vertex:
    return Vertex("pt", tuple(int(t) % 2 for t in x))


def hplane(u: Sequence[int], eps: int) -> Vertex:
    u = tuple(int(t) % 2 for t in u)
    if _dot(u, A_VEC) != 1:
        raise ValueError("hyperplane normal must satisfy u.a = 1")
    return Vertex("hp", (u, eps % 2))


def vertex_by_name(name: str) -> Vertex:
    if name == "a":
        return point(A_VEC)
    if name == "z":
        return point((0, 0, 0, 0))
    kind = name[0]
    if kind == "e":
        i, j = int(name[1]) - 1, int(name[2]) - 1
        return point(_add(_add(A_VEC, _unit(i)), _unit(j)))
    k = int(name[1]) - 1
    if kind == "c":
        return point(_add(A_VEC, _unit(k)))
    if kind == "g":
        return point(_unit(k))
    if kind == "d":
        return hplane(_unit(k), 0)
    if kind == "h":
        return hplane(_unit(k), 1)
    if kind == "f":
        return hplane(_add(A_VEC, _unit(k)), 0)
    if kind == "b":
        return hplane(_add(A_VEC, _unit(k)), 1)
    raise KeyError(name)


NAMES: list[str] = vertex_names()
VERTICES: list[Vertex] = [vertex_by_name(n) for n in NAMES]
INDEX: dict[Vertex, int] = {v: k for k, v in enumerate(VERTICES)}
NAME_INDEX: dict[str, int] = {n: k for k, n in enumerate(NAMES)}
_HPLANE_FIRST = [k for k in range(32) if not VERTICES[k].is_point] + [k for k in range(32) if VERTICES[k].is_point]


def incident(pt: Vertex, h: Vertex) -> bool:
    """pt lies on h."""
    u, eps = h.data
    return _dot(u, pt.data) == eps


def t_translate(w: Sequence[int], v: Vertex) -> Vertex:
    if v.is_point:
        return point(_add(v.data, w))
    u, eps = v.data
    return hplane(u, eps + _dot(u, w))


def sigma_K(h: Vertex) -> Vertex:
    u, eps = h.data
    s = (u[3] + eps) % 2
    return point(_add((u[0], u[1], u[2], 1), tuple(s for _ in range(4))))


_SIGMA_INV = {sigma_K(VERTICES[k]): VERTICES[k] for k in range(32) if not VERTICES[k].is_point}


def sigma_D(v: Vertex) -> Vertex:
    return _SIGMA_INV[v] if v.is_point else sigma_K(v)


class EdgeKind(Enum):
    SOLID = "solid"
    DOTTED = "dotted"
    NONE = "none"


def edge_kind(u: Vertex, v: Vertex) -> EdgeKind:
    if u == v:
        raise ValueError("edge kind of a vertex with itself")
    if t_translate(A_VEC, u) == v:
        return EdgeKind.DOTTED
    if u.is_point != v.is_point:
        pt, h = (u, v) if u.is_point else (v, u)
        if incident(pt, h):
            return EdgeKind.SOLID
    return EdgeKind.NONE


def gram_entry(u: Vertex, v: Vertex) -> GaussInt:
    """The prescribed inner product <s_u, s_v> of two simple roots."""
    if u == v:
        return GaussInt(2)
    kind = edge_kind(u, v)
    if kind is EdgeKind.DOTTED:
        return GaussInt(-2)
    if kind is EdgeKind.SOLID:
        return GaussInt(1, 1) if u.is_point else GaussInt(1, -1)
    return GaussInt(0)


def diagram_gram() -> list[list[GaussInt]]:
    return [[gram_entry(u, v) for v in VERTICES] for u in VERTICES]


# ---------------------------------------------------------------------------
# permutation groups on the 32 vertices

Perm = tuple[int, ...]


def perm_of(f) -> Perm:
    return tuple(INDEX[f(v)] for v in VERTICES)


def compose(g: Perm, h: Perm) -> Perm:
    """g after h."""
    return tuple(g[h[k]] for k in range(len(h)))


def invert(g: Perm) -> Perm:
    out = [0] * len(g)
    for k, gk in enumerate(g):
        out[gk] = k
    return tuple(out)


IDENTITY: Perm = tuple(range(32))


def affine_perm(A: Sequence[Sequence[int]], w: Sequence[int]) -> Perm | None:
    """Permutation of D induced by x -> A x + w, or None if it does not preserve D."""
    Ainv = _gf2_inverse(A)
    if Ainv is None:
        return None

    def act(v: Vertex) -> Vertex | None:
        if v.is_point:
            x = tuple(_dot(row, v.data) for row in A)
            return point(_add(x, w))
        u, eps = v.data
        # {u.x = eps} -> {(A^{-T} u).y = eps + (A^{-T} u).w}
        un = tuple(_dot([Ainv[r][c] for r in range(4)], u) for c in range(4))
        if _dot(un, A_VEC) != 1:
            return None
        return hplane(un, eps + _dot(un, w))

    out = [0] * 32
    # hyperplanes first: a map that fails usually fails there
    for k in _HPLANE_FIRST:
        x = act(VERTICES[k])
        if x is None or x not in INDEX:
            return None
        out[k] = INDEX[x]
    return tuple(out)


def _gf2_inverse(A: Sequence[Sequence[int]]) -> list[list[int]] | None:
    n = len(A)
    m = [list(A[r]) + [1 if c == r else 0 for c in range(n)] for r in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] % 2), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        for r in range(n):
            if r != c and m[r][c] % 2:
                m[r] = [(x + y) % 2 for x, y in zip(m[r], m[c])]
    return [[x % 2 for x in row[n:]] for row in m]


def qplus_generators() -> list[Perm]:
    """Translations, coordinate transpositions and one transvection fixing a."""
    gens = []
    ident = [[1 if r == c else 0 for c in range(4)] for r in range(4)]
    for k in range(4):
        gens.append(affine_perm(ident, _unit(k)))
    for k in range(3):
        sw = [row[:] for row in ident]
        sw[k], sw[k + 1] = sw[k + 1], sw[k]
        gens.append(affine_perm(sw, (0, 0, 0, 0)))
    # x -> x + (x1 + x2) g3 fixes a since x1 + x2 = 0 at a
    tv = [row[:] for row in ident]
    tv[2] = [1, 1, 1, 0]
    gens.append(affine_perm(tv, (0, 0, 0, 0)))
    if any(g is None for g in gens):
        raise AssertionError("a generator does not preserve D")
    return gens  # type: ignore[return-value]


SIGMA_PERM: Perm = perm_of(sigma_D)


def closure(gens: Iterable[Perm]) -> set[Perm]:
    gens = list(gens)
    seen = {IDENTITY}
    queue = deque([IDENTITY])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = compose(s, g)
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return seen


@dataclass
class PermGroup:
    gens: list[Perm]
    elements: set[Perm]

    @property
    def order(self) -> int:
        return len(self.elements)

    def orbits(self) -> list[list[int]]:
        seen: set[int] = set()
        out = []
        for k in range(32):
            if k in seen:
                continue
            orb = sorted({g[k] for g in self.elements})
            seen.update(orb)
            out.append(orb)
        return out

    def __contains__(self, g: Perm) -> bool:
        return tuple(g) in self.elements


_CACHE: dict[str, PermGroup] = {}


def group_Qplus() -> PermGroup:
    if "Q+" not in _CACHE:
        gens = qplus_generators()
        _CACHE["Q+"] = PermGroup(gens, closure(gens))
    return _CACHE["Q+"]


def group_Q() -> PermGroup:
    if "Q" not in _CACHE:
        gens = qplus_generators() + [SIGMA_PERM]
        _CACHE["Q"] = PermGroup(gens, closure(gens))
    return _CACHE["Q"]


def all_affine_symmetries() -> set[Perm]:
    """Every affine map of F_2^4 preserving D, found by brute force."""
    out = set()
    normals = {v.data[0] for v in VERTICES if not v.is_point}
    for bits in itertools.product((0, 1), repeat=16):
        A = [list(bits[4 * r: 4 * r + 4]) for r in range(4)]
        Ainv = _gf2_inverse(A)
        if Ainv is None:
            continue
        # the normal directions of K depend only on the linear part
        images = {tuple(_dot([Ainv[r][c] for r in range(4)], u) for c in range(4)) for u in normals}
        if images != normals:
            continue
        for w in itertools.product((0, 1), repeat=4):
            g = affine_perm(A, w)
            if g is not None:
                out.add(g)
    return out


def swaps_sides(g: Perm) -> bool:
    return VERTICES[g[0]].is_point != VERTICES[0].is_point


def preserves_edges(g: Perm) -> bool:
    """Edge kinds are preserved; solid edges keep or reverse orientation consistently."""
    for u in range(32):
        for v in range(u + 1, 32):
            if edge_kind(VERTICES[u], VERTICES[v]) != edge_kind(VERTICES[g[u]], VERTICES[g[v]]):
                return False
    return True


# ---------------------------------------------------------------------------
# lifting diagram symmetries to isometries of L


_BASIS_COLS: list[int] | None = None


def _independent_columns() -> list[int]:
    global _BASIS_COLS
    if _BASIS_COLS is None:
        S = simple_root_matrix()
        _, piv = S.rref()
        _BASIS_COLS = piv
        if len(piv) != 10:
            raise AssertionError("simple roots do not span L")
    return _BASIS_COLS


def lift_twists(g: Perm) -> list[GaussInt]:
    """Scalars c_v with lift(g) s_v = c_v s_{g v}: -i on points when g swaps sides."""
    sw = swaps_sides(g)
    return [GaussInt(0, -1) if (sw and VERTICES[v].is_point) else GaussInt(1) for v in range(32)]


def lift_to_isometry(g: Perm) -> QiMat:
    """The linear map of L (d4 frame) with s_v -> c_v s_{g v}; checked on all 32 roots."""
    S = simple_root_matrix()
    cols = _independent_columns()
    tw = lift_twists(g)
    src = QiMat.from_columns([S[:, c] for c in cols])
    dst = QiMat.from_columns([S[:, g[c]].scale(tw[c]) for c in cols])
    M = dst @ src.inverse()
    for v in range(32):
        if M @ S[:, v] != S[:, g[v]].scale(tw[v]):
            raise AssertionError("permutation is not compatible with the Gram table")
    H = ambient_L()
    if M.H @ H @ M != H:
        raise AssertionError("lift does not preserve the Hermitian form")
    return M


def diagram_json() -> dict:
    edges = []
    for u in range(32):
        for v in range(u + 1, 32):
            k = edge_kind(VERTICES[u], VERTICES[v])
            if k is not EdgeKind.NONE:
                edges.append({"u": NAMES[u], "v": NAMES[v], "kind": k.value})
    return {
        "vertices": [{"name": n, "kind": "point" if VERTICES[k].is_point else "hyperplane"} for k, n in enumerate(NAMES)],
        "edges": edges,
    }


def diagram_dot() -> str:
    lines = ["graph D {"]
    for k, n in enumerate(NAMES):
        shape = "circle" if VERTICES[k].is_point else "box"
        lines.append(f'  "{n}" [shape={shape}];')
    for e in diagram_json()["edges"]:
        style = "solid" if e["kind"] == "solid" else "dotted"
        lines.append(f'  "{e["u"]}" -- "{e["v"]}" [style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# exact checks on the lifted symmetries and the reflections


def relation_sweep() -> dict:
    """Braid on solid edges, commute on non-edges, the length-4 relation on dotted edges."""
    from .isometry import braids, commutes, length4_relation

    S = simple_root_matrix()
    counts = {k.value: 0 for k in EdgeKind}
    bad = []
    for u in range(32):
        for v in range(u + 1, 32):
            kind = edge_kind(VERTICES[u], VERTICES[v])
            s, t = S[:, u], S[:, v]
            if kind is EdgeKind.SOLID:
                ok = braids(s, t) and not commutes(s, t)
            elif kind is EdgeKind.DOTTED:
                ok = length4_relation(s, t) and not braids(s, t)
            else:
                ok = commutes(s, t)
            counts[kind.value] += 1
            if not ok:
                bad.append([NAMES[u], NAMES[v]])
    return {"pairs": sum(counts.values()), "by_kind": counts, "failures": bad, "ok": not bad}


def _cy_apply(M: QiMat, v: Sequence) -> list[Cyclo8]:
    rows = M.tolist()
    return [sum((Cyclo8.coerce(a) * x for a, x in zip(row, v)), Cyclo8()) for row in rows]


def _proportional(u: Sequence[Cyclo8], v: Sequence[Cyclo8]) -> bool:
    return all(u[j] * v[k] == u[k] * v[j] for j in range(len(u)) for k in range(j + 1, len(u)))


def fixed_locus_check() -> dict:
    """The lifted Q fixes exactly one point of B(L), namely [tau].

    Any common eigenvector is fixed by every commutator of generators, so it
    lies in F = common kernel of ([g, h] - 1).  We find F = span(p_inf, l_inf),
    check that sigma acts on F with two distinct eigenlines, and that they are
    tau (negative norm, fixed by all generators) and its Galois conjugate
    (positive norm).
    """
    gens = [lift_to_isometry(g) for g in qplus_generators()] + [lift_to_isometry(SIGMA_PERM)]
    inv = [g.inverse() for g in gens]
    one = QiMat.identity(10)
    rows = []
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            C = gens[a] @ gens[b] @ inv[a] @ inv[b] - one
            rows += C.tolist()
    F = QiMat.from_entries(rows).nullspace()
    pl = QiMat.from_columns([as_vec(p_infinity()), as_vec(l_infinity())])
    span_ok = len(F) == 2 and QiMat.from_columns(list(F) + [pl[:, 0], pl[:, 1]]).rank() == 2
    # sigma on F in the basis (p_inf, l_inf)
    sig = gens[-1]
    A = pl.H @ ambient_L() @ pl
    B = pl.H @ ambient_L() @ sig @ pl
    R = A.inverse() @ B
    r = R.tolist()
    tr = r[0][0] + r[1][1]
    det = r[0][0] * r[1][1] - r[0][1] * r[1][0]
    distinct = bool(tr * tr - det * 4)
    tau = tau_vector()
    conj = [-ZETA8_INV * Cyclo8.coerce(l) - Cyclo8.coerce(q) for l, q in zip(l_infinity(), p_infinity())]
    tau_fixed = all(_proportional(_cy_apply(g, tau), tau) for g in gens)
    conj_fixed = _proportional(_cy_apply(sig, conj), conj)
    n_tau, n_conj = cy_norm(tau), cy_norm(conj)
    ok = span_ok and distinct and tau_fixed and conj_fixed and n_tau.sign() < 0 and n_conj.sign() > 0
    return {
        "commutator_fixed_dim": len(F),
        "equals_span_p_l": span_ok,
        "sigma_distinct_eigenlines": distinct,
        "tau_fixed_by_all_generators": tau_fixed,
        "conjugate_fixed_by_sigma": conj_fixed,
        "tau_norm_negative": n_tau.sign() < 0,
        "conjugate_norm_positive": n_conj.sign() > 0,
        "ok": ok,
    }


def sigma_square_check() -> bool:
    """The lift of sigma_D squares to multiplication by -i."""
    M = lift_to_isometry(SIGMA_PERM)
    return M @ M == QiMat.identity(10).scale(GaussInt(0, -1))


def linear_relations() -> dict:
    """The radical relations among the 32 roots, checked as exact vector identities."""
    roots = simple_roots_32()
    vec = {k: as_vec(roots[NAMES[k]]) for k in range(32)}
    pinf, linf = as_vec(p_infinity()), as_vec(l_infinity())
    pts = [k for k in range(32) if VERTICES[k].is_point]
    hps = [k for k in range(32) if not VERTICES[k].is_point]

    def partner(k: int) -> QiMat:
        return vec[INDEX[t_translate(A_VEC, VERTICES[k])]]

    trans_pts = all(vec[k] + partner(k) == pinf for k in pts)
    trans_hps = all(vec[k] + partner(k) == linf for k in hps)
    zero = QiMat.zeros((10,))
    p, pb = GaussInt(1, 1), GaussInt(1, -1)

    def total(ks):
        acc = zero
        for k in ks:
            acc = acc + vec[k]
        return acc

    pfh = all(
        vec[u].scale(p * -2) + total(h for h in hps if incident(VERTICES[u], VERTICES[h])) == linf.scale(4) - pinf.scale(p)
        for u in pts
    )
    hfp = all(
        vec[w].scale(pb * -2) + total(x for x in pts if incident(VERTICES[x], VERTICES[w])) == pinf.scale(4) - linf.scale(pb)
        for w in hps
    )
    H = ambient_L()
    S = simple_root_matrix()
    gram = S.H @ H @ S
    table = QiMat.from_entries(diagram_gram())
    null_ok = all(
        (v.H @ H @ v).is_zero() and is_primitive(v.tolist()) and make_L_d4().member(v) for v in (pinf, linf)
    )
    return {
        "gram_matches_table": gram == table,
        "gram_rank": gram.rank(),
        "radical_rank": 32 - gram.rank(),
        "translation_relation_points": trans_pts,
        "translation_relation_hyperplanes": trans_hps,
        "points_from_hyperplanes": pfh,
        "hyperplanes_from_points": hfp,
        "p_l_primitive_null": null_ok,
    }

"""Hermitian Gaussian lattices and the concrete lattices used throughout.

A lattice is stored by an ambient frame (a Hermitian form on Q(i)^N) and a
basis given as the columns of an N x n matrix.  Two frames matter for the
rank-10 Lorentzian lattice L:

* ``"bw"``: coordinates of BW16 (eight complex numbers) followed by the
  hyperbolic cell (m, n);
* ``"d4"``: four blocks of D4 coordinates followed by (m, n).

In both, <(x; m, n), (x'; m', n')> = sum conj(x_k) x'_k + conj(m) pbar n' + conj(n) p m'.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .linalg import QiMat, index_in, same_span, span_hnf
from .scalar import I, P, PBAR, Cyclo8, GaussInt, GaussRat, RealQuad, ZETA8_INV, qi

# ---------------------------------------------------------------------------
# generic lattice type


def hyperbolic_gram() -> QiMat:
    return QiMat.from_entries([[0, PBAR], [P, 0]])


def block_diag(*blocks: QiMat) -> QiMat:
    n = sum(b.shape[0] for b in blocks)
    rows = [[qi(0)] * n for _ in range(n)]
    off = 0
    for b in blocks:
        k = b.shape[0]
        for r in range(k):
            for c in range(k):
                rows[off + r][off + c] = b.entry(r, c)
        off += k
    return QiMat.from_entries(rows)


def hermitian_signature(gram: QiMat) -> tuple[int, int]:
    """(positive, negative) index of inertia, by exact symmetric elimination."""
    a = [row[:] for row in gram.tolist()]
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        # pick a nonzero diagonal pivot, or manufacture one
        piv = next((k for k in active if a[k][k]), None)
        if piv is None:
            pair = next(((j, k) for j in active for k in active if j != k and a[j][k]), None)
            if pair is None:
                break
            j, k = pair
            # replace e_j by e_j + t e_k with t chosen so the new diagonal is nonzero
            for t in (qi(1), qi(I)):
                d = a[j][j] + t * a[j][k] + t.conj() * a[k][j] + t.norm() * a[k][k]
                if d:
                    break
            for r in range(n):
                a[r][j] = a[r][j] + t * a[r][k]
            for c in range(n):
                a[j][c] = a[j][c] + t.conj() * a[k][c]
            piv = j
        d = a[piv][piv]
        if d.real > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        inv = d.inverse()
        for r in active:
            f = a[r][piv] * inv
            if f:
                for c in active:
                    a[r][c] = a[r][c] - f * a[piv][c]
    return pos, neg


@dataclass(frozen=True, eq=False)
class HermLattice:
    """A Gaussian lattice spanned by the columns of ``basis`` in a Hermitian frame."""

    name: str
    basis: QiMat
    ambient: QiMat
    congruence: Callable[[QiMat], bool] | None = field(default=None, repr=False)
    labels: tuple[str, ...] = ()

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def gram(self) -> QiMat:
        g = self.__dict__.get("_gram")
        if g is None:
            g = self.basis.H @ self.ambient @ self.basis
            object.__setattr__(self, "_gram", g)
        return g

    def signature(self) -> tuple[int, int]:
        return hermitian_signature(self.gram)

    def inner(self, u, v) -> GaussRat:
        return inner(self.ambient, u, v)

    def norm(self, v) -> Fraction:
        return inner(self.ambient, v, v).real

    def coords(self, v) -> QiMat | None:
        """Coordinates of an ambient vector in the basis, or None if not in the span."""
        return self.basis.solve(as_vec(v))

    def member(self, v) -> bool:
        v = as_vec(v)
        if v.shape != (self.dim,):
            raise ValueError("vector has the wrong ambient dimension")
        if self.congruence is not None:
            return self.congruence(v)
        c = self.coords(v)
        return c is not None and c.is_integral()

    def vec(self, coeffs) -> QiMat:
        """The ambient vector with the given basis coordinates."""
        return self.basis @ as_vec(coeffs)

    def to_json(self) -> dict:
        g = self.gram
        return {
            "name": self.name,
            "rank": self.rank,
            "den": g.den,
            "gram": [[[int(g.re[r, c]), int(g.im[r, c])] for c in range(self.rank)] for r in range(self.rank)],
            "labels": list(self.labels),
        }


def lattice_from_json(doc: dict) -> HermLattice:
    """A lattice on the standard basis of Q(i)^n with the stored Gram matrix."""
    n, den = doc["rank"], doc["den"]
    rows = [[GaussRat(re, im, den) for re, im in row] for row in doc["gram"]]
    return HermLattice(doc["name"], QiMat.identity(n), QiMat.from_entries(rows), labels=tuple(doc.get("labels", ())))


def as_vec(v) -> QiMat:
    return v if isinstance(v, QiMat) else QiMat.from_entries(list(v))


def inner(gram: QiMat, u, v) -> GaussRat:
    """<u, v> = u^* G v; conjugate-linear in u."""
    u, v = as_vec(u), as_vec(v)
    w = u.conj() @ (gram @ v)
    return GaussRat(int(w.re[()]), int(w.im[()]), w.den)


def is_integral_lattice(L: HermLattice) -> bool:
    return L.gram.is_integral()


def is_p_modular(L: HermLattice) -> bool:
    """True iff the dual lattice equals p^{-1} L."""
    if not is_integral_lattice(L):
        raise ValueError(f"{L.name} is not integral")
    # the dual has basis columns of gram^{-1}; compare p * gram^{-1} with the identity
    dual_scaled = L.gram.inverse().scale(P)
    return same_span(dual_scaled, QiMat.identity(L.rank))


def disc_group_order(L: HermLattice) -> int:
    """|L^dual / L| = |det gram|^2 (the Z-index of a G-module)."""
    if not is_integral_lattice(L):
        raise ValueError(f"{L.name} is not integral")
    d = L.gram.det()
    return int(d.norm())


def sublattice_index(big: HermLattice, small: HermLattice) -> int:
    return index_in(big.basis, small.basis)


def same_lattice(a: HermLattice, b: HermLattice) -> bool:
    return same_span(a.basis, b.basis)


def basis_from_generators(gens: QiMat) -> QiMat:
    """A basis (as columns) for the G-span of the given generator columns."""
    rows, d = span_hnf(gens)
    return QiMat.from_entries(rows).T.scale(GaussRat(1, 0, d))


# ---------------------------------------------------------------------------
# D4 and friends


def in_d4(x: Sequence) -> bool:
    """x in G^2 with x1 + x2 divisible by p."""
    vals = [qi(t) for t in x]
    if any(t.den != 1 for t in vals):
        return False
    s = vals[0] + vals[1]
    return (s.re_num + s.im_num) % 2 == 0


def d4_basis() -> QiMat:
    """Columns v1 = (1, 1), v2 = (0, pbar)."""
    return QiMat.from_entries([[1, 0], [1, PBAR]])


@functools.cache
def make_D4G() -> HermLattice:
    return HermLattice(
        "D4G", d4_basis(), QiMat.identity(2), congruence=lambda v: in_d4(v.tolist()), labels=("v1", "v2")
    )


@functools.cache
def make_Dn(n: int) -> HermLattice:
    """D_{2n}^G: x in G^n with sum divisible by p."""
    cols = [[P if r == 0 else 0 for r in range(n)]]
    for k in range(1, n):
        cols.append([-1 if r == 0 else (1 if r == k else 0) for r in range(n)])
    basis = QiMat.from_entries(cols).T

    def cong(v: QiMat) -> bool:
        if not v.is_integral():
            return False
        return (sum(int(x) for x in v.re.flat) + sum(int(x) for x in v.im.flat)) % 2 == 0

    return HermLattice(f"D{2 * n}G", basis, QiMat.identity(n), congruence=cong)


def make_D6G() -> HermLattice:
    return make_Dn(3)


@functools.cache
def make_hyp_cell() -> HermLattice:
    """G_{1,1}: two null vectors with <e1, e2> = pbar."""
    return HermLattice("G11", QiMat.identity(2), hyperbolic_gram(), labels=("e1", "e2"))


def _d4_coset_gens() -> list[list[GaussRat]]:
    """Generators v1/pbar, v2/pbar of p^{-1} D4 modulo D4."""
    inv = qi(PBAR).inverse()
    return [[inv, inv], [qi(0), qi(1)]]


def _blocks(v: QiMat) -> list[list[GaussRat]]:
    vals = v.tolist()
    return [vals[2 * j: 2 * j + 2] for j in range(4)]


def _in_p_inv_d4(x: list[GaussRat]) -> bool:
    return in_d4([t * P for t in x])


def _in_p_d4(x: list[GaussRat]) -> bool:
    pinv = qi(P).inverse()
    return in_d4([t * pinv for t in x])


def _m16_congruence(v: QiMat) -> bool:
    blocks = _blocks(v)
    if not all(_in_p_inv_d4(b) for b in blocks):
        return False
    return all(in_d4([x - y for x, y in zip(b, blocks[0])]) for b in blocks[1:])


def _bw_congruence(v: QiMat) -> bool:
    if not _m16_congruence(v):
        return False
    blocks = _blocks(v)
    total = [sum((b[k] for b in blocks), qi(0)) for k in range(2)]
    return _in_p_d4(total)


def _bw_generators() -> QiMat:
    """A spanning set of BW16^G from its congruence description."""
    gens: list[list[GaussRat]] = []
    zero = [qi(0), qi(0)]
    for y in _d4_coset_gens():
        gens.append(y * 4)
    d4 = [[qi(x) for x in col] for col in ([1, 1], [0, PBAR])]
    for d in d4:
        neg = [-t for t in d]
        for k in (1, 2, 3):
            blocks = [d] + [zero] * 3
            blocks[k] = neg
            gens.append([t for b in blocks for t in b])
        gens.append([t * P for t in d] + zero * 3)
    return QiMat.from_entries(gens).T


def _m16_generators() -> QiMat:
    gens: list[list[GaussRat]] = []
    zero = [qi(0), qi(0)]
    for y in _d4_coset_gens():
        gens.append(y * 4)
    d4 = [[qi(x) for x in col] for col in ([1, 1], [0, PBAR])]
    for k in range(4):
        for d in d4:
            blocks = [zero] * 4
            blocks[k] = d
            gens.append([t for b in blocks for t in b])
    return QiMat.from_entries(gens).T


@functools.cache
def make_4D4() -> HermLattice:
    cols = []
    for k in range(4):
        for c in ([1, 1], [0, PBAR]):
            v = [0] * 8
            v[2 * k], v[2 * k + 1] = c
            cols.append(v)
    return HermLattice(
        "4D4G",
        QiMat.from_entries(cols).T,
        QiMat.identity(8),
        congruence=lambda v: v.is_integral() and all(in_d4(b) for b in _blocks(v)),
    )


@functools.cache
def make_BW16() -> HermLattice:
    """BW16^G by its congruence definition, with a reduced HNF basis."""
    return HermLattice("BW16G", basis_from_generators(_bw_generators()), QiMat.identity(8), congruence=_bw_congruence)


def bw16_tensor_generators() -> QiMat:
    """Rows of p^{-1} (1 1; 0 p)^{(x)3}, as columns, in block-interleaved order.

    Coordinate k = 4*k1 + 2*k2 + k3 of the tensor product; the block index is
    (k1, k2) and the position inside a D4 block is k3.
    """
    m = [[1, 1], [0, P]]
    rows = []
    for a, b, c in itertools.product(range(2), repeat=3):
        row = []
        for x, y, z in itertools.product(range(2), repeat=3):
            row.append(qi(m[a][x]) * qi(m[b][y]) * qi(m[c][z]) * qi(P).inverse())
        rows.append(row)
    return QiMat.from_entries(rows).T


@functools.cache
def make_BW16_tensor() -> HermLattice:
    return HermLattice("BW16G_tensor", basis_from_generators(bw16_tensor_generators()), QiMat.identity(8))


@functools.cache
def make_M16() -> HermLattice:
    return HermLattice("M16G", basis_from_generators(_m16_generators()), QiMat.identity(8), congruence=_m16_congruence)


# ---------------------------------------------------------------------------
# the Lorentzian lattice L in two frames

AMBIENT_L = None  # filled lazily


def ambient_L() -> QiMat:
    global AMBIENT_L
    if AMBIENT_L is None:
        AMBIENT_L = block_diag(QiMat.identity(8), hyperbolic_gram())
    return AMBIENT_L


def _direct_sum_basis(b: QiMat) -> QiMat:
    n = b.shape[0]
    cols = [list(b[:, k].tolist()) + [qi(0), qi(0)] for k in range(b.shape[1])]
    cols.append([qi(0)] * n + [qi(1), qi(0)])
    cols.append([qi(0)] * n + [qi(0), qi(1)])
    return QiMat.from_entries(cols).T


def _split(v: QiMat) -> tuple[QiMat, QiMat]:
    return v[:8], v[8:]


@functools.cache
def make_L_bw() -> HermLattice:
    bw = make_BW16()

    def cong(v: QiMat) -> bool:
        x, h = _split(v)
        return h.is_integral() and _bw_congruence(x)

    return HermLattice("L_bw", _direct_sum_basis(bw.basis), ambient_L(), congruence=cong)


@functools.cache
def make_L_d4() -> HermLattice:
    d4 = make_4D4()

    def cong(v: QiMat) -> bool:
        return v.is_integral() and all(in_d4(b) for b in _blocks(v[:8]))

    return HermLattice("L_d4", _direct_sum_basis(d4.basis), ambient_L(), congruence=cong)


# ---------------------------------------------------------------------------
# the 32 simple roots


def _g(x) -> GaussInt:
    return GaussInt.coerce(x)


def _seed_roots() -> dict[str, list]:
    p = P
    return {
        "a": [0, 0, 0, 0, 0, 0, 0, 0, -1, -1],
        "c1": [-1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        "e12": [-1, -1, -1, -1, 0, 0, 0, 0, -I, -1],
        "g1": [0, -2, -1, -1, -1, -1, -1, -1, -2 * I, -2],
        "z": [-1, -1, -1, -1, -1, -1, -1, -1, 1 - 2 * I, -1],
        "f1": [0, 0, 0, p, 0, p, 0, p, I * p, p],
        "b1": [0, p, 0, 0, 0, 0, 0, 0, -1, 0],
        "d1": [-p, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        "h1": [p, p, 0, p, 0, p, 0, p, p - 3, p],
    }


def vertex_names() -> list[str]:
    """The 32 vertex names in their fixed index order."""
    names = ["a"]
    names += [f"b{k}" for k in range(1, 5)]
    names += [f"c{k}" for k in range(1, 5)]
    names += [f"d{k}" for k in range(1, 5)]
    names += [f"e{i}{j}" for i, j in itertools.combinations(range(1, 5), 2)]
    names += [f"f{k}" for k in range(1, 5)]
    names += [f"g{k}" for k in range(1, 5)]
    names += [f"h{k}" for k in range(1, 5)]
    names.append("z")
    return names


def permute_blocks(v: Sequence, perm: Sequence[int]) -> list:
    """Move D4 block j to block perm[j] (0-based); hyperbolic part unchanged."""
    out = [None] * 8
    for j in range(4):
        out[2 * perm[j]: 2 * perm[j] + 2] = v[2 * j: 2 * j + 2]
    return out + list(v[8:])


def rename_vertex(name: str, perm: Sequence[int]) -> str:
    """Image of a vertex name under the coordinate permutation j -> perm[j] (0-based)."""
    if name in ("a", "z"):
        return name
    if name[0] == "e":
        i, j = sorted((perm[int(name[1]) - 1] + 1, perm[int(name[2]) - 1] + 1))
        return f"e{i}{j}"
    return f"{name[0]}{perm[int(name[1]) - 1] + 1}"


@functools.cache
def simple_roots_32() -> dict[str, list[GaussInt]]:
    """The 32 simple roots s_v in the d4 frame, keyed by vertex name.

    The nine seeds are spread by the S4 action permuting the D4 blocks; every
    image of a seed under a permutation fixing its name must agree with it.
    """
    seeds = {k: [_g(x) for x in v] for k, v in _seed_roots().items()}
    roots: dict[str, list[GaussInt]] = {}
    for name, vec in seeds.items():
        for perm in itertools.permutations(range(4)):
            img = rename_vertex(name, perm)
            w = permute_blocks(vec, perm)
            if img in roots:
                if roots[img] != w:
                    raise AssertionError(f"seed {name} is not invariant under its stabiliser")
            else:
                roots[img] = w
    names = vertex_names()
    if sorted(roots) != sorted(names):
        raise AssertionError("simple roots do not cover the 32 vertices")
    return {k: roots[k] for k in names}


@functools.cache
def simple_root_matrix() -> QiMat:
    """10 x 32 matrix whose columns are the simple roots in vertex order."""
    roots = simple_roots_32()
    return QiMat.from_entries([roots[k] for k in vertex_names()]).T


# ---------------------------------------------------------------------------
# special vectors

RHO = [0] * 8 + [0, 1]
RHO1 = [0] * 8 + [1, 0]


def p_infinity() -> list[GaussInt]:
    return [_g(-1)] * 8 + [_g(-2 * I), _g(-2)]


def l_infinity() -> list[GaussInt]:
    return [_g(x) for x in (0, P, 0, P, 0, P, 0, P, P - 3, P)]


def tau_vector() -> list[Cyclo8]:
    """tau = exp(-i pi/4) l_inf - p_inf, with Cyclo8 coordinates."""
    return [ZETA8_INV * Cyclo8.coerce(l) - Cyclo8.coerce(q) for l, q in zip(l_infinity(), p_infinity())]


def special_vectors() -> dict[str, list]:
    return {
        "rho": [_g(x) for x in RHO],
        "rho1": [_g(x) for x in RHO1],
        "p_inf": p_infinity(),
        "l_inf": l_infinity(),
        "tau": tau_vector(),
    }


def cy_inner(u: Sequence, v: Sequence) -> Cyclo8:
    """<u, v> in the L frame with Cyclo8 (or coercible) coordinates."""
    u = [Cyclo8.coerce(x) for x in u]
    v = [Cyclo8.coerce(x) for x in v]
    acc = Cyclo8()
    for k in range(8):
        acc = acc + u[k].conj() * v[k]
    acc = acc + u[8].conj() * Cyclo8.coerce(PBAR) * v[9] + u[9].conj() * Cyclo8.coerce(P) * v[8]
    return acc


def cy_norm(v: Sequence) -> RealQuad:
    return cy_inner(v, v).to_realquad()


def is_primitive(v: Sequence) -> bool:
    """No non-unit Gaussian integer divides every coordinate."""
    from .scalar import ggcd

    g = GaussInt(0, 0)
    for x in v:
        g = ggcd(g, _g(x))
    return g.is_unit()


# ---------------------------------------------------------------------------
# the isomorphism between the two frames


def _iso_source() -> list[list[GaussRat]]:
    p, pb = qi(P), qi(PBAR)
    half = GaussRat(1, 0, 2)

    def h(vals):
        return [qi(x) * half for x in vals]

    v1 = h([p, p, pb, -pb, pb, -pb, p, p, 2, -2])
    v2 = [-x for x in h([pb, p, p, pb, p, -pb, -pb, p, 2, -2])]
    v3 = [qi(x) for x in [0, p, 0, 0, 0, 0, 0, p, 1, -1]]
    v4 = [-qi(x) for x in [1, I, 0, 0, 1, I, 0, 0, 1, -1]]
    v5 = h([pb, p, p, -pb, p, -pb, pb, p, 2, -2])
    v6 = [-qi(x) for x in [1, I, 0, 0, 0, 0, I, 1, 1, -1]]
    v7 = h([p, p, p, p, p, p, p, p, 2, -2])
    v8 = [-x for x in h([pb, p, -p, -pb, p, -pb, -pb, p, 2, -2])]
    v9 = h([3 * pb, 4 + p, pb, p, 2 + pb, 1 + 3 * qi(I), p, 4 + pb, 4 - 6 * qi(I), -4 * pb])
    v10 = [-qi(x) - y for x, y in zip([0] * 8 + [1, I], v9)]
    return [v1, v2, v3, v4, v5, v6, v7, v8, v9, v10]


def _iso_target() -> list[list[GaussInt]]:
    r = simple_roots_32()
    out = []
    for k in range(1, 5):
        out += [r[f"d{k}"], r[f"c{k}"]]
    out.append([_g(x) for x in RHO1])
    out.append([_g(x) for x in RHO])
    return out


@dataclass(frozen=True, eq=False)
class IsoMap:
    source: HermLattice
    target: HermLattice
    matrix: QiMat

    def __call__(self, v) -> QiMat:
        return self.matrix @ as_vec(v)

    def inverse(self) -> IsoMap:
        return IsoMap(self.target, self.source, self.matrix.inverse())


@functools.cache
def iso_phi() -> IsoMap:
    """The explicit isometry from the bw frame of L onto the d4 frame."""
    src = QiMat.from_entries(_iso_source()).T
    tgt = QiMat.from_entries(_iso_target()).T
    H = ambient_L()
    g_src = src.H @ H @ src
    g_tgt = tgt.H @ H @ tgt
    if g_src != g_tgt:
        raise AssertionError("source and target vectors have different Gram matrices")
    phi = tgt @ src.inverse()
    if phi.H @ H @ phi != H:
        raise AssertionError("frame change does not preserve the form")
    return IsoMap(make_L_bw(), make_L_d4(), phi)

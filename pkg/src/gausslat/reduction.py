"""Height reduction toward the cusp rho and toward tau, and the generator sets S0, S1, S2.

Two engines live here.  The first reduces heights |<x, rho>|^2 with first and
second shell reflections, working exactly in the bw frame.  The second is the
greedy descent toward tau by the 32 simple reflections; it runs on int64
numpy arrays in the d4 frame with exact integer comparisons of values
P - sqrt2 Q, so no float ever decides a step.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .fingeom import NAME_INDEX, NAMES, EdgeKind, edge_kind, vertex_by_name
from .isometry import Isometry, deflation_check, make_translation, reflection, simple_reflections, word_to_isometry
from .lattices import (
    RHO,
    ambient_L,
    as_vec,
    inner,
    iso_phi,
    l_infinity,
    make_BW16,
    make_L_d4,
    p_infinity,
    rename_vertex,
    simple_root_matrix,
)
from .linalg import QiMat, residue_system
from .scalar import I, P, PBAR, UNITS, GaussInt, GaussRat, qi
from .shortvec import ShortVectorCache, cvp, min_norm_coset_reps, within

Y_ROOT = [GaussInt(1, 2), 3, GaussInt(1, 1), GaussInt(5, 1), GaussInt(1, 2), GaussInt(4, 1), GaussInt(1, 2), GaussInt(4, 1), 7, GaussInt(0, -6)]

# ---------------------------------------------------------------------------
# shell roots and the disc criterion


def _h8() -> QiMat:
    return QiMat.identity(8)


@dataclass(frozen=True, eq=False)
class ShellRoot:
    """s = i^r (sigma; m, p conj(m)^{-1} ((2 - sigma^2)/4 + nu)) in the bw frame."""

    sigma: QiMat
    m: GaussInt
    nu: GaussRat
    unit: int = 0

    def vector(self) -> QiMat:
        s2 = inner(_h8(), self.sigma, self.sigma)
        last = qi(P) / qi(self.m.conj()) * ((qi(2) - s2) * GaussRat(1, 0, 4) + self.nu)
        v = QiMat.concat([self.sigma, QiMat.from_entries([qi(self.m), last])])
        return v.scale(qi(UNITS[self.unit % 4]))

    @property
    def height(self) -> int:
        return self.m.norm()

    @classmethod
    def from_vector(cls, v) -> ShellRoot:
        v = as_vec(v)
        vals = v.tolist()
        m = GaussInt.coerce(vals[8])
        if not m:
            raise ValueError("root lies in rho-perp")
        sigma = v[:8]
        s2 = inner(_h8(), sigma, sigma)
        nu = vals[9] * qi(m.conj()) / qi(P) - (qi(2) - s2) * GaussRat(1, 0, 4)
        if nu.re_num != 0:
            raise ValueError("not a norm 2 vector")
        return cls(sigma, m, nu)


def y_of(s, l) -> GaussRat:
    """y(s, l) = |m|^2 <s/m, l/h> = m <s, l> / h."""
    s, l = as_vec(s), as_vec(l)
    m, h = s.tolist()[8], l.tolist()[8]
    if not m or not h:
        raise ValueError("height coordinate is zero")
    return m * inner(ambient_L(), s, l) / h


def disc_condition(y) -> GaussRat | None:
    """xi in {i, -i} with |y - (1 - conj(xi))|^2 < 2, or None."""
    y = qi(y)
    for xi in (qi(I), qi(-I)):
        if (y - (qi(1) - xi.conj())).norm() < 2:
            return xi
    return None


def height(v, rho: Sequence = RHO) -> Fraction:
    v = as_vec(v)
    ip = inner(ambient_L(), v, rho).norm()
    n = inner(ambient_L(), v, v).real
    return ip if n == 0 else ip / abs(n)


def _round_half_down(x: Fraction) -> int:
    # the nearest integer, choosing the smaller one at a tie
    f = x.numerator // x.denominator
    return f if x - f <= Fraction(1, 2) else f + 1


def _first_shell(sigma: QiMat, l: QiMat) -> ShellRoot:
    s2 = inner(_h8(), sigma, sigma).real
    base = QiMat.concat([sigma, QiMat.from_entries([qi(1), qi(1 - s2 / 2)])])
    y0 = y_of(base, l)
    # the third coordinate n = 1 - sigma^2/2 + i p k shifts Im(y) by -2k
    k = _round_half_down(y0.imag / 2)
    n = qi(1 - s2 / 2) + qi(I) * qi(P) * k
    return ShellRoot.from_vector(QiMat.concat([sigma, QiMat.from_entries([qi(1), n])]))


def _second_shell(sigma: QiMat, l: QiMat) -> ShellRoot:
    s2 = inner(_h8(), sigma, sigma).real
    half = (1 - s2 / 2) / 2
    base = QiMat.concat([sigma, QiMat.from_entries([qi(PBAR), qi(half)])])
    y0 = y_of(base, l)
    k = _round_half_down(y0.imag / 2)
    n = qi(half) + qi(I) * k
    return ShellRoot.from_vector(QiMat.concat([sigma, QiMat.from_entries([qi(PBAR), n])]))


def find_shell_reducer(l) -> tuple[ShellRoot, GaussRat] | None:
    """A first or second shell root s and xi with R_s^xi lowering the height of l."""
    l = as_vec(l)
    vals = l.tolist()
    h = vals[8]
    if not h:
        raise ValueError("height coordinate is zero")
    bw = make_BW16()
    lam = l[:8]
    null = inner(ambient_L(), l, l) == 0
    hn = h.norm()
    target = lam.scale(h.inverse())
    if null or hn > 1:
        close, d2 = cvp(bw, target, radius2=2)
        for sigma in close:
            s = _first_shell(sigma, l)
            xi = disc_condition(y_of(s.vector(), l))
            if xi is not None:
                return s, xi
    if null or hn > 2:
        # sigma/pbar within 1 of lam/h, i.e. sigma within sqrt2 of pbar lam/h
        cands = sorted(within(bw, target.scale(qi(PBAR)), 2), key=lambda t: t[1])
        for sigma, _ in cands:
            if inner(_h8(), sigma, sigma).real % 4 != 2:
                continue
            s = _second_shell(sigma, l)
            xi = disc_condition(y_of(s.vector(), l))
            if xi is not None:
                return s, xi
    return None


@dataclass
class HeightReduction:
    start: QiMat
    steps: list[tuple[QiMat, GaussRat]] = field(default_factory=list)
    heights: list[Fraction] = field(default_factory=list)
    end: QiMat | None = None

    def isometry(self) -> Isometry:
        g = Isometry(QiMat.identity(10), "bw")
        for s, xi in self.steps:
            g = reflection(s, xi, frame="bw") @ g
        return g


def reduce_null_to_rho(z, max_steps: int = 10_000) -> HeightReduction:
    """Reflections carrying a primitive null vector to a unit multiple of rho."""
    z = as_vec(z)
    if inner(ambient_L(), z, z) != 0:
        raise ValueError("vector is not null")
    out = HeightReduction(z)
    cur = z
    out.heights.append(height(cur))
    while cur.tolist()[8]:
        if len(out.steps) >= max_steps:
            raise RuntimeError("height reduction did not terminate")
        found = find_shell_reducer(cur)
        if found is None:
            raise RuntimeError("no shell reflection lowers the height; the vector is orthogonal to a root")
        s, xi = found
        v = s.vector()
        cur = reflection(v, xi, frame="bw")(cur)
        hgt = height(cur)
        if not hgt < out.heights[-1]:
            raise AssertionError("height did not decrease")
        out.steps.append((v, xi))
        out.heights.append(hgt)
    out.end = cur
    return out


# ---------------------------------------------------------------------------
# int64 views of vectors


@dataclass
class IntVecs:
    """A batch of Gaussian integer vectors as separate real and imaginary int64 arrays."""

    re: np.ndarray
    im: np.ndarray

    def __len__(self) -> int:
        return self.re.shape[0]

    def row(self, k: int) -> list[GaussInt]:
        return [GaussInt(int(a), int(b)) for a, b in zip(self.re[k], self.im[k])]

    def qimat(self, k: int) -> QiMat:
        return QiMat(self.re[k].astype(object), self.im[k].astype(object), 1)

    def take(self, idx) -> IntVecs:
        return IntVecs(self.re[idx], self.im[idx])

    @staticmethod
    def concat(parts: Sequence[IntVecs]) -> IntVecs:
        return IntVecs(np.concatenate([p.re for p in parts]), np.concatenate([p.im for p in parts]))


def _qimat_to_int(m: QiMat) -> tuple[np.ndarray, np.ndarray]:
    if m.den != 1:
        raise ValueError("matrix is not integral")
    return np.array(m.re, dtype=np.int64), np.array(m.im, dtype=np.int64)


def _cmatmul(ar, ai, br, bi):
    return ar @ br - ai @ bi, ar @ bi + ai @ br


def _phi_int() -> tuple[np.ndarray, np.ndarray, int]:
    phi = iso_phi().matrix
    return np.array(phi.re, dtype=np.int64), np.array(phi.im, dtype=np.int64), phi.den


def bw_to_d4(re: np.ndarray, im: np.ndarray, den: int) -> IntVecs:
    """Map rows (re + i im)/den from the bw frame to integral d4-frame rows."""
    pr, pi, pd = _phi_int()
    yr, yi = _cmatmul(re, im, pr.T, pi.T)
    q = den * pd
    if np.any(yr % q) or np.any(yi % q):
        raise ArithmeticError("frame change produced a non-integral vector")
    return IntVecs(yr // q, yi // q)


# ---------------------------------------------------------------------------
# the generator sets


@dataclass
class RootSet:
    name: str
    bw_re: np.ndarray  # numerators, common denominator bw_den
    bw_im: np.ndarray
    bw_den: int
    d4: IntVecs
    notes: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.d4)

    def bw_vector(self, k: int) -> QiMat:
        return QiMat(self.bw_re[k].astype(object), self.bw_im[k].astype(object), self.bw_den)

    def ids(self) -> list[str]:
        return [f"{self.name}:{k}" for k in range(len(self))]


def _from_qimats(name: str, vecs: Sequence[QiMat], notes: dict | None = None) -> RootSet:
    den = 1
    for v in vecs:
        den = np.lcm(den, v.den)
    den = int(den)
    re = np.array([[int(x) * (den // v.den) for x in v.re] for v in vecs], dtype=np.int64)
    im = np.array([[int(x) * (den // v.den) for x in v.im] for v in vecs], dtype=np.int64)
    return RootSet(name, re, im, den, bw_to_d4(re, im, den), notes or {})


R_1 = [0] * 8 + [1, 1]
R_2 = [0] * 8 + [1, I]


def build_S0() -> RootSet:
    """r_k, T_{lam_j, z_j}(r_k), T_{i lam_j, z_j}(r_k) with z_j = i lam_j^2/2."""
    bw = make_BW16()
    rs = [as_vec(R_1), as_vec(R_2)]
    out = list(rs)
    for j in range(8):
        lam = bw.basis[:, j]
        z = GaussRat.from_parts(0, inner(_h8(), lam, lam).real / 2)
        for lv in (lam, lam.scale(I)):
            T = make_translation(lv, z).isometry
            out += [T(r) for r in rs]
    return _from_qimats("S0", out, {"z_choice": "i*lambda_j^2/2", "basis": "HNF basis of BW16^G"})


def _bw_int_basis() -> tuple[np.ndarray, np.ndarray, int]:
    b = make_BW16().basis
    return np.array(b.re, dtype=np.int64), np.array(b.im, dtype=np.int64), b.den


def _digit_vectors(m: GaussInt) -> tuple[np.ndarray, np.ndarray]:
    """All coefficient vectors with entries in the residue system mod m (canonical order)."""
    digits = residue_system(m)
    n = len(digits)
    idx = np.indices((n,) * 8).reshape(8, -1).T  # lexicographic, first coordinate slowest
    dr = np.array([d.re for d in digits], dtype=np.int64)
    di = np.array([d.im for d in digits], dtype=np.int64)
    return dr[idx], di[idx]


def _digit_norms(m: GaussInt) -> np.ndarray:
    """Norms of the digit representatives of Lambda/m (any system of reps has the same classes mod 4)."""
    br, bi, den = _bw_int_basis()
    cr, ci = _digit_vectors(m)
    sr, si = _cmatmul(cr, ci, br.T, bi.T)
    n2 = (sr * sr + si * si).sum(axis=1)
    if np.any(n2 % (den * den)):
        raise ArithmeticError("non-integral norm")
    return n2 // (den * den)


def coset_sigmas(m: GaussInt, cache: ShortVectorCache | None = None, norm_class: int | None = None):
    """Minimal-norm representatives of Lambda/m as scaled rows, with their norms.

    Ties are broken by the smallest HNF coordinate tuple; the zero coset is
    represented by 0.  With ``norm_class`` only cosets whose norms are that
    class mod 4 are returned.
    """
    bw = make_BW16()
    m = GaussInt.coerce(m)
    reps = min_norm_coset_reps(bw, m, 6, cache)
    zero_key = tuple((0, 0) for _ in range(bw.rank))
    items = [(zero_key, (Fraction(0), [GaussInt(0)] * bw.rank))] + sorted(reps.items())
    digits = _digit_norms(m)
    want = len(digits) if norm_class is None else int(np.count_nonzero(digits % 4 == norm_class))
    if norm_class is not None:
        items = [it for it in items if int(it[1][0]) % 4 == norm_class]
    if len(items) != want:
        raise AssertionError(f"short vectors meet {len(items)} of {want} cosets")
    coords = [c for _, (_, c) in items]
    cr = np.array([[t.re for t in c] for c in coords], dtype=np.int64)
    ci = np.array([[t.im for t in c] for c in coords], dtype=np.int64)
    br, bi, den = _bw_int_basis()
    sr, si = _cmatmul(cr, ci, br.T, bi.T)
    n2 = np.array([int(q) for _, (q, _) in items], dtype=np.int64)
    if not np.array_equal((sr * sr + si * si).sum(axis=1), n2 * den * den):
        raise ArithmeticError("representative norms disagree")
    return sr, si, den, n2


def build_S1(cache: ShortVectorCache | None = None) -> RootSet:
    """(sigma; 1, 1 - sigma^2/2 + i p k), sigma over Lambda/p, k = 0, 1."""
    sr, si, den, n2 = coset_sigmas(P, cache)
    rows_r, rows_i = [], []
    for k in range(len(n2)):
        for kk in range(2):
            # i p k = i (1 + i) kk = -kk + i kk
            nr = 1 - n2[k] // 2 - kk
            ni = kk
            rows_r.append(np.concatenate([sr[k], [den, nr * den]]))
            rows_i.append(np.concatenate([si[k], [0, ni * den]]))
    re, im = np.array(rows_r, dtype=np.int64), np.array(rows_i, dtype=np.int64)
    return RootSet("S1", re, im, den, bw_to_d4(re, im, den))


def build_S2(cache: ShortVectorCache | None = None) -> RootSet:
    """(sigma; pbar, (1 - sigma^2/2)/2 + i k), sigma over Lambda/2 of norm 2 mod 4, k = 0..3."""
    sr, si, den, n2 = coset_sigmas(GaussInt(2), cache, norm_class=2)
    keep = np.arange(len(n2))
    nk = len(keep)
    base_r = np.repeat(sr[keep], 4, axis=0)
    base_i = np.repeat(si[keep], 4, axis=0)
    kk = np.tile(np.arange(4, dtype=np.int64), nk)
    half = np.repeat((1 - n2[keep] // 2) // 2, 4)
    tail_r = np.stack([np.full(4 * nk, den), half * den], axis=1)
    tail_i = np.stack([np.full(4 * nk, -den), kk * den], axis=1)
    re = np.concatenate([base_r, tail_r], axis=1)
    im = np.concatenate([base_i, tail_i], axis=1)
    return RootSet("S2", re, im, den, bw_to_d4(re, im, den), {"class2_cosets": int(nk)})


def build_all(cache: ShortVectorCache | None = None) -> list[RootSet]:
    return [build_S0(), build_S1(cache), build_S2(cache)]


def check_roots(rs: RootSet) -> dict:
    """Exact norm and membership checks for a whole set, in the d4 frame."""
    x = rs.d4
    H = ambient_L()
    hr, hi = _qimat_to_int(H)
    yr, yi = _cmatmul(x.re, x.im, hr, hi)  # rows x^T H; norm = sum conj(x) (H x)
    gr, gi = _cmatmul(x.re, x.im, hr.T, hi.T)
    norm_re = (x.re * gr + x.im * gi).sum(axis=1)
    del yr, yi
    blocks_ok = np.ones(len(x), dtype=bool)
    for j in range(4):
        s = x.re[:, 2 * j] + x.im[:, 2 * j] + x.re[:, 2 * j + 1] + x.im[:, 2 * j + 1]
        blocks_ok &= s % 2 == 0
    return {"count": len(x), "all_norm_2": bool(np.all(norm_re == 2)), "all_in_L": bool(np.all(blocks_ok))}


# ---------------------------------------------------------------------------
# greedy descent toward tau


def _less_sqrt2(dp: np.ndarray, dq: np.ndarray) -> np.ndarray:
    """Exactly dp < sqrt2 * dq, elementwise for integers."""
    lhs = dp * dp
    rhs = 2 * dq * dq
    return np.where(
        dq > 0,
        (dp <= 0) | (lhs < rhs),
        np.where(dq == 0, dp < 0, (dp < 0) & (lhs > rhs)),
    )


class TauEngine:
    """|<x, tau>|^2 = P - sqrt2 Q with P = |A|^2 + |B|^2, Q = Re(A conj B) + Im(A conj B).

    Here A = <x, l_inf>, B = <x, p_inf>.  Candidate steps R_s^xi for the 32
    simple roots and xi in (i, -1, -i) are scored in the order (root, xi).
    """

    LIMIT = 1 << 30

    def __init__(self) -> None:
        S = simple_root_matrix()
        self.sr, self.si = _qimat_to_int(S.T)  # (32, 10)
        hr, hi = _qimat_to_int(ambient_L())
        cols = QiMat.from_columns([S[:, k] for k in range(32)] + [as_vec(l_infinity()), as_vec(p_infinity())])
        mr, mi = _qimat_to_int(ambient_L() @ cols)
        self.mr, self.mi = mr, mi  # (10, 34): H [s_1..s_32 l p]
        lp = QiMat.from_columns([as_vec(l_infinity()), as_vec(p_infinity())])
        g = S.H @ ambient_L() @ lp  # <s_j, l>, <s_j, p>
        ar, ai = _qimat_to_int(g)
        self.a = (ar[:, 0], ai[:, 0])
        self.b = (ar[:, 1], ai[:, 1])

    def products(self, x: IntVecs):
        """(G, A, B) with G_j = <s_j, x>."""
        if np.abs(x.re).max(initial=0) > self.LIMIT or np.abs(x.im).max(initial=0) > self.LIMIT:
            raise OverflowError("coordinates too large for int64 scoring")
        # <x, v> = sum conj(x_k) (Hv)_k
        r = x.re @ self.mr + x.im @ self.mi
        i = x.re @ self.mi - x.im @ self.mr
        G = (r[:, :32], -i[:, :32])
        return G, (r[:, 32], i[:, 32]), (r[:, 33], i[:, 33])

    @staticmethod
    def value(A, B):
        ar, ai = A
        br, bi = B
        P = ar * ar + ai * ai + br * br + bi * bi
        # A conj(B) = (ar br + ai bi) + i (ai br - ar bi)
        Q = (ar * br + ai * bi) + (ai * br - ar * bi)
        return P, Q

    @staticmethod
    def _choose(P, Q, P0, Q0, policy: str):
        n, k = P.shape
        if policy == "first":
            ok = _less_sqrt2(P - P0[:, None], Q - Q0[:, None])
            best = np.where(ok.any(axis=1), ok.argmax(axis=1), 0)
            rows = np.arange(n)
            return best, P[rows, best], Q[rows, best]
        # float prefilter, then an exact tournament over the near-minimal columns
        val = P - np.sqrt(2.0) * Q
        lo = val.min(axis=1)
        near = val <= lo[:, None] + 1e-6 * (1.0 + np.abs(lo[:, None]))
        cols = np.nonzero(near.any(axis=0))[0]
        best = np.full(n, cols[0], dtype=np.int64)
        big = np.iinfo(np.int64).max // 4
        bp = np.where(near[:, cols[0]], P[:, cols[0]], big)
        bq = np.where(near[:, cols[0]], Q[:, cols[0]], 0)
        for col in cols[1:]:
            cand = near[:, col]
            better = cand & ((bp == big) | _less_sqrt2(P[:, col] - bp, Q[:, col] - bq))
            best = np.where(better, col, best)
            bp = np.where(better, P[:, col], bp)
            bq = np.where(better, Q[:, col], bq)
        return best, bp, bq

    @staticmethod
    def coefficients(G):
        """c = (1 - xi) <s, x> / 2 for xi = i, -1, -i; shape (N, 32, 3)."""
        gr, gi = G
        if np.any((gr + gi) % 2):
            raise ArithmeticError("<s, x> not divisible by p")
        c_i = ((gr + gi) // 2, (gi - gr) // 2)
        c_m = (gr, gi)
        c_mi = ((gr - gi) // 2, (gr + gi) // 2)
        return np.stack([c_i[0], c_m[0], c_mi[0]], -1), np.stack([c_i[1], c_m[1], c_mi[1]], -1)

    def candidates(self, G, A, B):
        cr, ci = self.coefficients(G)
        # A' = A - conj(c) a_j
        ar, ai = self.a[0][None, :, None], self.a[1][None, :, None]
        br, bi = self.b[0][None, :, None], self.b[1][None, :, None]
        A2 = (A[0][:, None, None] - (cr * ar + ci * ai), A[1][:, None, None] - (cr * ai - ci * ar))
        B2 = (B[0][:, None, None] - (cr * br + ci * bi), B[1][:, None, None] - (cr * bi - ci * br))
        P, Q = self.value(A2, B2)
        return P.reshape(len(P), -1), Q.reshape(len(Q), -1), cr.reshape(len(cr), -1), ci.reshape(len(ci), -1)

    def unit_match(self, x: IntVecs, G) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """For each row: is x = u s_j for some simple root?  Returns (hit, j, unit exponent)."""
        gr, gi = G
        n = len(x)
        hit = np.zeros(n, dtype=bool)
        jj = np.full(n, -1, dtype=np.int64)
        ue = np.full(n, -1, dtype=np.int64)
        rows, cols = np.nonzero((gr * gr + gi * gi) == 4)
        if len(rows) == 0:
            return hit, jj, ue
        # x = u s_j forces u = <s_j, x>/2
        ur, ui = gr[rows, cols] // 2, gi[rows, cols] // 2
        vr = ur[:, None] * self.sr[cols] - ui[:, None] * self.si[cols]
        vi = ur[:, None] * self.si[cols] + ui[:, None] * self.sr[cols]
        eq = (vr == x.re[rows]).all(axis=1) & (vi == x.im[rows]).all(axis=1)
        rows, cols, ur, ui = rows[eq][::-1], cols[eq][::-1], ur[eq][::-1], ui[eq][::-1]
        # reversed so the smallest j wins the assignment
        hit[rows] = True
        jj[rows] = cols
        ue[rows] = np.where(ur == 1, 0, np.where(ui == 1, 1, np.where(ur == -1, 2, 3)))
        return hit, jj, ue

    def run(self, x: IntVecs, max_steps: int = 100_000, policy: str = "steepest") -> GreedyResult:
        """Descend until each row is a unit times a simple root (status 1) or stuck (status 2).

        ``steepest`` takes the lowest value with ties to the smallest (root, xi);
        ``first`` takes the first (root, xi) that decreases the value.
        """
        if policy not in ("steepest", "first"):
            raise ValueError(f"unknown policy {policy!r}")
        n = len(x)
        cur = IntVecs(x.re.copy(), x.im.copy())
        status = np.zeros(n, dtype=np.int8)  # 0 active, 1 reduced, 2 stuck
        final_j = np.full(n, -1, dtype=np.int64)
        final_u = np.full(n, -1, dtype=np.int64)
        steps: list[tuple[np.ndarray, np.ndarray]] = []  # (rows, move index) per iteration
        prev_p = np.zeros(n, dtype=np.int64)
        prev_q = np.zeros(n, dtype=np.int64)
        active = np.arange(n)
        for it in range(max_steps + 1):
            if len(active) == 0:
                break
            xa = cur.take(active)
            G, A, B = self.products(xa)
            hit, jj, ue = self.unit_match(xa, G)
            status[active[hit]] = 1
            final_j[active[hit]] = jj[hit]
            final_u[active[hit]] = ue[hit]
            keep = ~hit
            active = active[keep]
            if len(active) == 0:
                break
            if it == max_steps:
                raise RuntimeError("descent toward tau did not terminate")
            G = (G[0][keep], G[1][keep])
            A = (A[0][keep], A[1][keep])
            B = (B[0][keep], B[1][keep])
            P0, Q0 = self.value(A, B)
            # monitor: the value reached by the previous step is the current value
            if it > 0 and not (np.array_equal(P0, prev_p[active]) and np.array_equal(Q0, prev_q[active])):
                raise AssertionError("descent bookkeeping is inconsistent")
            P, Q, cr, ci = self.candidates(G, A, B)
            best, bp, bq = self._choose(P, Q, P0, Q0, policy)
            dec = _less_sqrt2(bp - P0, bq - Q0)
            status[active[~dec]] = 2
            mv = active[dec]
            bsel = best[dec]
            steps.append((mv, bsel))
            j = bsel // 3
            rr = np.nonzero(dec)[0]
            c_r, c_i = cr[rr, bsel], ci[rr, bsel]
            # x <- x - c s_j
            cur.re[mv] -= c_r[:, None] * self.sr[j] - c_i[:, None] * self.si[j]
            cur.im[mv] -= c_r[:, None] * self.si[j] + c_i[:, None] * self.sr[j]
            prev_p[mv], prev_q[mv] = bp[dec], bq[dec]
            active = mv
        moves: list[list[int]] = [[] for _ in range(n)]
        for rows, cols in steps:
            for r, c in zip(rows.tolist(), cols.tolist()):
                moves[r].append(c)
        return GreedyResult(status, final_j, final_u, moves, cur)


@dataclass
class GreedyResult:
    status: np.ndarray
    final_j: np.ndarray
    final_u: np.ndarray
    moves: list[list[int]]
    end: IntVecs

    def word(self, k: int) -> list[int]:
        return moves_to_word(self.moves[k])


def moves_to_word(moves: Iterable[int]) -> list[int]:
    """Move (root j, xi = i^(e+1)) -> letters in 1..64: R^i = j+1, R^-1 = twice, R^-i = j+33."""
    out: list[int] = []
    for mv in moves:
        j, e = divmod(int(mv), 3)
        out += [j + 1] if e == 0 else ([j + 1, j + 1] if e == 1 else [j + 33])
    return out


def inverse_word(word: Sequence[int]) -> list[int]:
    return [w + 32 if w <= 32 else w - 32 for w in reversed(word)]


_ENGINE: TauEngine | None = None


def tau_engine() -> TauEngine:
    global _ENGINE
    if _ENGINE is None:
        _ENGINE = TauEngine()
    return _ENGINE


def tau_value(x) -> tuple[int, int]:
    """(P, Q) with |<x, tau>|^2 = P - sqrt2 Q for a d4-frame lattice vector."""
    eng = tau_engine()
    xv = _as_intvecs([x])
    _, A, B = eng.products(xv)
    P, Q = eng.value(A, B)
    return int(P[0]), int(Q[0])


def _as_intvecs(vecs) -> IntVecs:
    rows = [[GaussInt.coerce(t) for t in (v.tolist() if hasattr(v, "tolist") else v)] for v in vecs]
    return IntVecs(np.array([[t.re for t in r] for r in rows], dtype=np.int64), np.array([[t.im for t in r] for r in rows], dtype=np.int64))


def tau_step(x) -> tuple[int, GaussInt, QiMat] | None:
    """One greedy step toward tau: (simple index, xi, new root), or None at a local minimum."""
    eng = tau_engine()
    xv = _as_intvecs([x])
    G, A, B = eng.products(xv)
    P0, Q0 = eng.value(A, B)
    P, Q, cr, ci = eng.candidates(G, A, B)
    best, bp, bq = 0, P[0, 0], Q[0, 0]
    for col in range(1, P.shape[1]):
        if _less_sqrt2(np.array(P[0, col] - bp), np.array(Q[0, col] - bq)):
            best, bp, bq = col, P[0, col], Q[0, col]
    if not _less_sqrt2(np.array(bp - P0[0]), np.array(bq - Q0[0])):
        return None
    j, e = divmod(best, 3)
    xi = [GaussInt(0, 1), GaussInt(-1), GaussInt(0, -1)][e]
    c = GaussInt(int(cr[0, best]), int(ci[0, best]))
    S = simple_root_matrix()
    new = as_vec(x) - S[:, j].scale(c)
    return j, xi, new


# ---------------------------------------------------------------------------
# proving generation


@dataclass
class PathRecord:
    id: str
    via: str
    word: list[int]

    def to_json(self) -> str:
        return json.dumps({"id": self.id, "via": self.via, "word": self.word}, separators=(",", ":"))


def _run_chunks(eng: TauEngine, x: IntVecs, threads: int) -> GreedyResult:
    n = len(x)
    if threads <= 1 or n < 2048:
        return eng.run(x)
    bounds = np.linspace(0, n, threads + 1).astype(int)
    parts = [x.take(slice(a, b)) for a, b in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        res = list(ex.map(eng.run, parts))
    return GreedyResult(
        np.concatenate([r.status for r in res]),
        np.concatenate([r.final_j for r in res]),
        np.concatenate([r.final_u for r in res]),
        [m for r in res for m in r.moves],
        IntVecs.concat([r.end for r in res]),
    )


def y_root() -> IntVecs:
    return _as_intvecs([Y_ROOT])


def y_reflection_word(eng: TauEngine | None = None) -> tuple[list[int], dict]:
    """A word for R_y: g, then R_s, then g^{-1}, where g carries y to a unit multiple of s."""
    eng = eng or tau_engine()
    y = y_root()
    if not make_L_d4().member(as_vec(Y_ROOT)) or inner(ambient_L(), Y_ROOT, Y_ROOT) != 2:
        raise AssertionError("y is not a root of L")
    res = eng.run(y)
    if res.status[0] != 1:
        raise AssertionError("y does not reduce to a simple root")
    g = res.word(0)
    k = int(res.final_j[0])
    return g + [k + 1] + inverse_word(g), {"y_word_length": len(g), "y_lands_on": NAMES[k]}


def _apply_reflection_y(x: IntVecs) -> IntVecs:
    """R_y^i(x) = x - c y with c = (1 - i) <y, x> / 2, exactly on integer rows."""
    y = y_root()
    hr, hi = _qimat_to_int(ambient_L())
    # <y, x> = conj(y)^T H x
    wr = y.re @ hr + y.im @ hi
    wi = y.re @ hi - y.im @ hr
    gr = x.re @ wr[0] - x.im @ wi[0]
    gi = x.re @ wi[0] + x.im @ wr[0]
    if np.any((gr + gi) % 2):
        raise ArithmeticError("<y, x> not divisible by p")
    cr, ci = (gr + gi) // 2, (gi - gr) // 2
    re = x.re - (cr[:, None] * y.re[0] - ci[:, None] * y.im[0])
    im = x.im - (cr[:, None] * y.im[0] + ci[:, None] * y.re[0])
    return IntVecs(re, im)


def y_in_S2(S2: RootSet) -> bool:
    """Whether the published y, moved to the bw frame, is one of our S2 representatives."""
    yb = iso_phi().inverse()(as_vec(Y_ROOT))
    scaled = yb.scale(qi(S2.bw_den))
    if not scaled.is_integral():
        return False
    r = np.array([int(v) for v in scaled.re], dtype=np.int64)
    i = np.array([int(v) for v in scaled.im], dtype=np.int64)
    hit = np.all(S2.bw_re == r, axis=1) & np.all(S2.bw_im == i, axis=1)
    return bool(hit.any())


@dataclass
class GenerationReport:
    counts: dict
    roots_total: int
    reduced_directly: int
    stuck: int
    stuck_all_in_S2: bool
    y_unblocks_all: bool
    unwitnessed: int
    max_word_length: int
    total_letters: int
    y_info: dict
    wall_time: float
    path_sha256: str | None = None
    checks: dict = field(default_factory=dict)
    stuck_outside_S2: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.unwitnessed == 0
            and self.stuck_all_in_S2
            and self.y_unblocks_all
            and self.roots_total == 123426
            and all(v for c in self.checks.values() for v in c.values() if isinstance(v, bool))
        )

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def prove_generation(threads: int = 1, emit_paths: str | Path | None = None, sets: list[RootSet] | None = None) -> tuple[GenerationReport, list[PathRecord]]:
    """Witness words in the 32 simple reflections for every root of S0, S1, S2."""
    t0 = time.perf_counter()
    sets = build_all() if sets is None else sets
    eng = tau_engine()
    checks = {rs.name: check_roots(rs) for rs in sets}
    x = IntVecs.concat([rs.d4 for rs in sets])
    ids = [i for rs in sets for i in rs.ids()]
    owner = np.concatenate([np.full(len(rs), k) for k, rs in enumerate(sets)])
    res = _run_chunks(eng, x, threads)
    stuck = np.nonzero(res.status == 2)[0]
    s2_index = next((k for k, rs in enumerate(sets) if rs.name == "S2"), -1)
    stuck_in_s2 = bool(np.all(owner[stuck] == s2_index))
    y_word, y_info = y_reflection_word(eng)
    records = [PathRecord(ids[k], "direct", res.word(k)) for k in range(len(ids))]
    y_ok = True
    if len(stuck):
        z = _apply_reflection_y(x.take(stuck))
        res2 = _run_chunks(eng, z, threads)
        for t, k in enumerate(stuck.tolist()):
            if res2.status[t] == 1:
                records[k] = PathRecord(ids[k], "y", y_word + res2.word(t))
            else:
                y_ok = False
                records[k] = PathRecord(ids[k], "unwitnessed", [])
    if s2_index >= 0:
        y_info["y_in_our_S2"] = y_in_S2(sets[s2_index])
    unw = sum(1 for r in records if r.via == "unwitnessed")
    lengths = [len(r.word) for r in records]
    digest = None
    if emit_paths is not None:
        digest = write_paths(emit_paths, records)
    rep = GenerationReport(
        counts={rs.name: len(rs) for rs in sets},
        roots_total=len(ids),
        reduced_directly=int((res.status == 1).sum()),
        stuck=int(len(stuck)),
        stuck_all_in_S2=stuck_in_s2,
        y_unblocks_all=y_ok,
        unwitnessed=unw,
        max_word_length=max(lengths, default=0),
        total_letters=int(sum(lengths)),
        y_info=y_info,
        wall_time=round(time.perf_counter() - t0, 3),
        path_sha256=digest,
        checks=checks,
        stuck_outside_S2=[ids[k] for k in stuck.tolist() if owner[k] != s2_index],
    )
    return rep, records


def write_paths(path: str | Path, records: Sequence[PathRecord]) -> str:
    data = "".join(r.to_json() + "\n" for r in records).encode()
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def read_paths(path: str | Path) -> tuple[list[PathRecord], str]:
    data = Path(path).read_bytes()
    recs = []
    for line in data.decode().splitlines():
        if line.strip():
            d = json.loads(line)
            recs.append(PathRecord(d["id"], d["via"], [int(w) for w in d["word"]]))
    return recs, hashlib.sha256(data).hexdigest()


def _letter_matrices() -> tuple[np.ndarray, np.ndarray, int]:
    """den * R_k (letters 1..32) and den * R_k^{-1} (33..64) as integer arrays, index 0 unused."""
    refl = simple_reflections()
    mats = [QiMat.identity(10)] + [r.matrix for r in refl] + [r.inverse().matrix for r in refl]
    den = math.lcm(*(int(m.den) for m in mats))
    re = np.stack([np.array(m.re, dtype=np.int64) * (den // int(m.den)) for m in mats])
    im = np.stack([np.array(m.im, dtype=np.int64) * (den // int(m.den)) for m in mats])
    return re, im, den


def verify_paths(records: Sequence[PathRecord], sets: list[RootSet] | None = None) -> dict:
    """Replay every word with the reflection matrices and check the end is a unit times a simple root.

    Matrices come from the isometry module, independently of the descent engine.
    """
    sets = build_all() if sets is None else sets
    by_id = {}
    for rs in sets:
        for k, name in enumerate(rs.ids()):
            by_id[name] = (rs, k)
    missing = [r.id for r in records if r.id not in by_id]
    known = [r for r in records if r.id in by_id]
    xr = np.stack([by_id[r.id][0].d4.re[by_id[r.id][1]] for r in known])
    xi = np.stack([by_id[r.id][0].d4.im[by_id[r.id][1]] for r in known])
    mr, mi, den = _letter_matrices()
    L = max((len(r.word) for r in known), default=0)
    W = np.zeros((len(known), L), dtype=np.int64)
    for k, r in enumerate(known):
        W[k, : len(r.word)] = r.word
    for t in range(L):
        col = W[:, t]
        for letter in np.unique(col):
            if letter == 0:
                continue
            rows = np.nonzero(col == letter)[0]
            a, b = xr[rows], xi[rows]
            nr = a @ mr[letter].T - b @ mi[letter].T
            ni = a @ mi[letter].T + b @ mr[letter].T
            if np.any(nr % den) or np.any(ni % den):
                raise ArithmeticError("a reflection left the lattice")
            xr[rows], xi[rows] = nr // den, ni // den
    # targets: u s_j for all units u and simple roots j
    S = simple_root_matrix()
    sr, si = _qimat_to_int(S.T)
    targets = {}
    for e, (ur, ui) in enumerate([(1, 0), (0, 1), (-1, 0), (0, -1)]):
        tr, ti = ur * sr - ui * si, ur * si + ui * sr
        for j in range(32):
            targets[(tr[j].tobytes(), ti[j].tobytes())] = (j, e)
    bad = [known[k].id for k in range(len(known)) if (xr[k].tobytes(), xi[k].tobytes()) not in targets]
    return {
        "records": len(records),
        "verified": len(known) - len(bad),
        "failed": bad[:20],
        "failed_count": len(bad),
        "missing_ids": missing[:20],
        "all_verified": not bad and not missing and len(known) == sum(len(rs) for rs in sets),
    }


# ---------------------------------------------------------------------------
# thirteen generators

OCTAGONS = [
    ("d2", "c2", "b2", "a", "b1", "c1", "d1", "e12"),
    ("d1", "c1", "b1", "e34", "b2", "c2", "d2", "z"),
    ("c2", "b2", "a", "b3", "e24", "d4", "c4", "f1"),
    ("c4", "b4", "e13", "d3", "z", "d2", "c2", "h1"),
    ("d2", "e23", "f3", "c4", "h3", "a", "b2", "g1"),
]

THIRTEEN = ["a"] + [f"{x}{k}" for x in "bcd" for k in range(1, 5)]


def _product_word(seq: Sequence[str], words: dict[str, list[int]]) -> list[int]:
    """Letters for the matrix product seq[0] seq[1] ... (the rightmost acts first)."""
    out: list[int] = []
    for name in reversed(seq):
        out += words[name]
    return out


def _free_reduce(word: list[int]) -> list[int]:
    out: list[int] = []
    for w in word:
        if out and (out[-1] == w + 32 or out[-1] == w - 32):
            out.pop()
        else:
            out.append(w)
    return out


def thirteen_generator_check() -> dict:
    """Words for all 32 simple reflections in the 13 generators, via the five octagons and S4."""
    refl = simple_reflections()
    words: dict[str, list[int]] = {v: [NAME_INDEX[v] + 1] for v in THIRTEEN}
    report: dict = {"octagons": [], "derived": {}}
    for octo in OCTAGONS:
        cyc = all(
            edge_kind(vertex_by_name(octo[k]), vertex_by_name(octo[(k + 1) % 8])) == EdgeKind.SOLID for k in range(8)
        )
        gens = [refl[NAME_INDEX[v]] for v in octo]
        c7 = all(deflation_check(gens, 7, off) for off in range(8))
        report["octagons"].append({"octagon": list(octo), "solid_cycle": cyc, "C7_all_offsets": c7})
    grew = True
    while grew:
        grew = False
        for octo in OCTAGONS:
            for perm in itertools.permutations(range(4)):
                ren = [rename_vertex(v, perm) for v in octo]
                target = ren[7]
                if target in words or not all(v in words for v in ren[:7]):
                    continue
                # y0 ... y6 = y1 ... y7  =>  y7 = (y1 ... y6)^{-1} (y0 ... y6)
                inv_part = inverse_word(_product_word(ren[1:7], words))
                word = _free_reduce(_product_word(ren[0:7], words) + inv_part)
                words[target] = word
                report["derived"][target] = {"octagon": ren, "length": len(word)}
                grew = True
    verified = {}
    for v in NAMES:
        if v not in words:
            verified[v] = False
            continue
        verified[v] = word_to_isometry(words[v], refl) == refl[NAME_INDEX[v]]
    report["words"] = {v: words[v] for v in NAMES if v not in THIRTEEN and v in words}
    allowed = {NAME_INDEX[v] + 1 for v in THIRTEEN}
    allowed |= {a + 32 for a in allowed}
    report["only_13_letters"] = all(set(w) <= allowed for w in words.values())
    report["all_32_expressed"] = len(words) == 32
    report["all_words_verified"] = all(verified.values())
    report["ok"] = (
        report["all_32_expressed"]
        and report["all_words_verified"]
        and report["only_13_letters"]
        and all(o["solid_cycle"] and o["C7_all_offsets"] for o in report["octagons"])
    )
    return report


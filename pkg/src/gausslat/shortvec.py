"""Short vectors, closest vectors, coset representatives and the covering sampler.

Enumeration runs Fincke-Pohst on the real form of a Gaussian lattice: the
basis b_1..b_n, i b_1..i b_n of the underlying Z-lattice with bilinear form
Re<,>.  The LDL^T factorisation and every pruning bound use Fractions, so the
enumeration is exact.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .lattices import HermLattice, as_vec, inner, make_BW16
from .linalg import QiMat, canonical_residue, hnf_gauss, residue_system
from .scalar import P, GaussInt, GaussRat, qi

# ---------------------------------------------------------------------------
# real form and reduction


def real_gram(L: HermLattice) -> list[list[Fraction]]:
    """Gram of Re<,> on the real basis (b_1..b_n, i b_1..i b_n)."""
    g = L.gram
    n = L.rank
    Q = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for j in range(n):
        for k in range(n):
            e = g.entry(j, k)
            Q[j][k] = e.real
            Q[n + j][n + k] = e.real
            Q[j][n + k] = -e.imag
            Q[n + j][k] = e.imag
    return Q


def real_to_gauss(x: Sequence[int], n: int) -> list[GaussInt]:
    return [GaussInt(x[k], x[n + k]) for k in range(n)]


def gauss_to_real(c: Sequence, n: int) -> list[int]:
    c = [GaussInt.coerce(t) for t in c]
    return [t.re for t in c] + [t.im for t in c]


def _qform(Q, x) -> Fraction:
    return sum((Q[r][c] * x[r] * x[c] for r in range(len(x)) for c in range(len(x)) if x[r] and x[c]), Fraction(0))


def lll_gram(Q: list[list[Fraction]], delta: Fraction = Fraction(99, 100)) -> tuple[list[list[Fraction]], list[list[int]]]:
    """LLL reduction driven by a Gram matrix.

    Returns the reduced Gram and the unimodular matrix U (rows are the new
    basis vectors in old coordinates), so new_gram = U Q U^T.
    """
    n = len(Q)
    U = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    G = [row[:] for row in Q]

    def gs():
        mu = [[Fraction(0)] * n for _ in range(n)]
        B = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = G[i][j] - sum((mu[j][k] * mu[i][k] * B[k] for k in range(j)), Fraction(0))
                mu[i][j] = s / B[j]
            B[i] = G[i][i] - sum((mu[i][k] ** 2 * B[k] for k in range(i)), Fraction(0))
        return mu, B

    def reduce(i: int, j: int, q: int) -> None:
        # b_i <- b_i - q b_j
        for c in range(n):
            U[i][c] -= q * U[j][c]
        for c in range(n):
            G[i][c] -= q * G[j][c]
        for r in range(n):
            G[r][i] -= q * G[r][j]

    def swap(i: int) -> None:
        U[i], U[i - 1] = U[i - 1], U[i]
        G[i], G[i - 1] = G[i - 1], G[i]
        for row in G:
            row[i], row[i - 1] = row[i - 1], row[i]

    k = 1
    mu, B = gs()
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                reduce(k, j, q)
                mu, B = gs()
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            swap(k)
            mu, B = gs()
            k = max(k - 1, 1)
    return G, U


def ldl(Q: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Q = sum_i D_i (x_i + sum_{j>i} M[i][j] x_j)^2 for positive definite Q."""
    n = len(Q)
    A = [row[:] for row in Q]
    M = [[Fraction(0)] * n for _ in range(n)]
    D = [Fraction(0)] * n
    for i in range(n):
        D[i] = A[i][i]
        if D[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            M[i][j] = A[i][j] / D[i]
        for j in range(i + 1, n):
            for k in range(j, n):
                A[j][k] -= M[i][j] * M[i][k] * D[i]
                A[k][j] = A[j][k]
    return M, D


def _int_range(c: Fraction, t: Fraction, d: Fraction) -> tuple[int, int]:
    """All integers x with d (x + c)^2 <= t, as an inclusive range (lo > hi if none)."""
    if t < 0:
        return 1, 0
    r2 = t / d  # (x + c)^2 <= r2
    # floor(sqrt(r2)) exactly
    s = math.isqrt(r2.numerator // r2.denominator)
    while Fraction((s + 1) ** 2) <= r2:
        s += 1
    lo = math.ceil(-c - s - 1)
    hi = math.floor(-c + s + 1)
    while lo <= hi and (lo + c) ** 2 > r2:
        lo += 1
    while hi >= lo and (hi + c) ** 2 > r2:
        hi -= 1
    return lo, hi


@dataclass
class _Prepared:
    U: list[list[int]]
    M: list[list[Fraction]]
    D: list[Fraction]
    Q: list[list[Fraction]]


_PREP: dict[tuple, _Prepared] = {}


def _prepare(L: HermLattice) -> _Prepared:
    key = _lattice_key(L)
    if key not in _PREP:
        Q = real_gram(L)
        G, U = lll_gram(Q)
        M, D = ldl(G)
        _PREP[key] = _Prepared(U, M, D, Q)
    return _PREP[key]


def _fp_search(M, D, bound: Fraction, center: Sequence[Fraction] | None = None) -> Iterator[tuple[list[int], Fraction]]:
    """All integer y with sum_i D_i (y_i - e_i + sum_{j>i} M_ij (y_j - e_j))^2 <= bound."""
    n = len(D)
    e = [Fraction(0)] * n if center is None else list(center)
    y = [0] * n

    def level_range(i: int, used: Fraction) -> Iterator[int]:
        c = -e[i] + sum((M[i][j] * (y[j] - e[j]) for j in range(i + 1, n)), Fraction(0))
        lo, hi = _int_range(c, bound - used, D[i])
        # zig-zag order is unnecessary; ascending keeps output deterministic
        return iter(range(lo, hi + 1))

    i = n - 1
    used = [Fraction(0)] * (n + 1)
    its: list[Iterator[int] | None] = [None] * n
    its[i] = level_range(i, used[n])
    while i < n:
        nxt = next(its[i], None)
        if nxt is None:
            i += 1
            continue
        y[i] = nxt
        c = -e[i] + sum((M[i][j] * (y[j] - e[j]) for j in range(i + 1, n)), Fraction(0))
        used[i] = used[i + 1] + D[i] * (y[i] + c) ** 2
        if i == 0:
            yield list(y), used[0]
        else:
            i -= 1
            its[i] = level_range(i, used[i + 1])


def _to_original(U: list[list[int]], y: Sequence[int]) -> list[int]:
    n = len(U)
    return [sum(y[r] * U[r][c] for r in range(n)) for c in range(n)]


def enumerate_upto(L: HermLattice, N) -> list[tuple[list[GaussInt], Fraction]]:
    """All nonzero v in L with v^2 <= N, as (basis coordinates, norm)."""
    N = Fraction(N)
    if N <= 0:
        raise ValueError("norm bound must be positive")
    prep = _prepare(L)
    out = []
    for y, q in _fp_search(prep.M, prep.D, N):
        if q == 0:
            continue
        x = _to_original(prep.U, y)
        out.append((real_to_gauss(x, L.rank), q))
    return out


def _coord_key(c: Sequence[GaussInt]) -> tuple:
    return tuple((t.re, t.im) for t in c)


_SHELLS: dict[tuple, list[list[GaussInt]]] = {}


def _lattice_key(L: HermLattice) -> tuple:
    return (L.name, hash(L.basis), hash(L.ambient))


def enumerate_norm(L: HermLattice, N, cache: ShortVectorCache | None = None) -> list[list[GaussInt]]:
    """All v in L with v^2 = N (basis coordinates), in canonical order.

    Results are memoised in-process; a disk cache is consulted and filled
    for every shell at or below N found by the same enumeration.
    """
    N = Fraction(N)
    if N <= 0:
        raise ValueError("norm must be positive")
    key = _lattice_key(L)
    if (key, N) in _SHELLS:
        return _SHELLS[(key, N)]
    if cache is not None:
        hit = cache.get(L.name, N)
        if hit is not None:
            _SHELLS[(key, N)] = hit
            return hit
    # integer norms with no vectors are recorded as empty shells too
    shells: dict[Fraction, list[list[GaussInt]]] = {Fraction(q): [] for q in range(1, math.floor(N) + 1)}
    shells[N] = []
    for c, q in enumerate_upto(L, N):
        shells.setdefault(q, []).append(c)
    for q, vecs in shells.items():
        vecs.sort(key=_coord_key)
        if (key, q) not in _SHELLS:
            _SHELLS[(key, q)] = vecs
            if cache is not None:
                cache.put(L.name, q, vecs)
    return _SHELLS[(key, N)]


def min_norm_coset_reps(
    L: HermLattice, m, bound, cache: ShortVectorCache | None = None
) -> dict[tuple, tuple[Fraction, list[GaussInt]]]:
    """Minimal-norm members of each coset of L/mL met by vectors of norm <= bound.

    Keys are the canonical residues of the basis coordinates; ties are broken
    by the smallest coordinate tuple.  Cosets with no vector of norm <= bound
    are absent, and the zero coset is not included.  L must be integral.
    """
    m = GaussInt.coerce(m)
    out: dict[tuple, tuple[Fraction, list[GaussInt]]] = {}
    bound = int(bound)
    enumerate_norm(L, bound, cache)  # one search fills the lower shells
    for q in range(1, bound + 1):
        for c in enumerate_norm(L, q, cache):
            key = tuple((x.re, x.im) for x in (canonical_residue(t, m) for t in c))
            if key not in out:
                out[key] = (Fraction(q), c)
    return out


def cvp(L: HermLattice, t, radius2=None) -> tuple[list[QiMat], Fraction]:
    """Lattice vectors closest to the ambient target t, with the squared distance.

    With ``radius2`` the search is capped: an empty list means nothing lies
    within that squared distance.
    """
    t = as_vec(t)
    c = L.coords(t)
    if c is None:
        raise ValueError("target is not in the span of the lattice")
    n = L.rank
    creal = [x.real for x in c.tolist()] + [x.imag for x in c.tolist()]
    prep = _prepare(L)
    # center in reduced coordinates: x = U^T y, so y = U^{-T} x
    Ut = QiMat.from_entries([[prep.U[r][cc] for r in range(2 * n)] for cc in range(2 * n)])
    e = Ut.solve(QiMat.from_entries(creal))
    e = [v.real for v in e.tolist()]
    if radius2 is None:
        # Babai-style start: distance to the rounded point is an upper bound
        y0 = [round(v) for v in e]
        bound = sum(
            (prep.D[i] * ((y0[i] - e[i]) + sum((prep.M[i][j] * (y0[j] - e[j]) for j in range(i + 1, 2 * n)), Fraction(0))) ** 2
             for i in range(2 * n)),
            Fraction(0),
        )
    else:
        bound = Fraction(radius2)
    best: list[list[int]] = []
    best_q = None
    for y, q in _fp_search(prep.M, prep.D, bound, e):
        if best_q is None or q < best_q:
            best_q, best = q, [y]
        elif q == best_q:
            best.append(y)
    if best_q is None:
        return [], Fraction(-1)
    vecs = [L.vec(real_to_gauss(_to_original(prep.U, y), n)) for y in best]
    return vecs, best_q


def within(L: HermLattice, t, radius2) -> list[tuple[QiMat, Fraction]]:
    """All lattice vectors v with (v - t)^2 <= radius2."""
    t = as_vec(t)
    c = L.coords(t)
    n = L.rank
    creal = [x.real for x in c.tolist()] + [x.imag for x in c.tolist()]
    prep = _prepare(L)
    Ut = QiMat.from_entries([[prep.U[r][cc] for r in range(2 * n)] for cc in range(2 * n)])
    e = [v.real for v in Ut.solve(QiMat.from_entries(creal)).tolist()]
    return [(L.vec(real_to_gauss(_to_original(prep.U, y), n)), q) for y, q in _fp_search(prep.M, prep.D, Fraction(radius2), e)]


# ---------------------------------------------------------------------------
# cosets


def coset_digits(m) -> list[GaussInt]:
    if not GaussInt.coerce(m):
        raise ValueError("modulus must be nonzero")
    return residue_system(GaussInt.coerce(m))


def iter_coset_reps(L: HermLattice, m) -> Iterator[QiMat]:
    """One representative per coset of L/mL: digit vectors against the basis."""
    digits = coset_digits(m)
    for combo in itertools.product(digits, repeat=L.rank):
        yield L.vec(list(combo))


def coset_reps(L: HermLattice, m) -> list[QiMat]:
    return list(iter_coset_reps(L, m))


def quotient_reps(big: HermLattice, small: HermLattice) -> list[QiMat]:
    """Representatives of big/small via the HNF of small in big's coordinates."""
    cols = []
    for k in range(small.rank):
        c = big.coords(small.basis[:, k])
        if c is None or not c.is_integral():
            raise ValueError("not a sublattice")
        cols.append([GaussInt.coerce(x) for x in c.tolist()])
    h = hnf_gauss(cols)
    if len(h) != big.rank:
        raise ValueError("sublattice has smaller rank")
    pivots = [next(x for x in row if x) for row in h]
    out = []
    for combo in itertools.product(*[residue_system(pv) for pv in pivots]):
        coeff = [GaussInt(0)] * big.rank
        for row, r in zip(h, combo):
            col = next(k for k, x in enumerate(row) if x)
            coeff[col] = coeff[col] + r
        out.append(big.vec(coeff))
    return out


def norm_class(lam, L: HermLattice | None = None) -> int:
    """lam^2 mod 4 (0 or 2) for lam in an even lattice."""
    lam = as_vec(lam)
    n2 = inner(QiMat.identity(lam.shape[0]) if L is None else L.ambient, lam, lam).real
    if n2.denominator != 1 or n2.numerator % 2:
        raise ValueError("vector does not have even integral norm")
    return int(n2.numerator % 4)


# ---------------------------------------------------------------------------
# cache


class ShortVectorCache:
    """JSON files of coordinate tuples keyed by (lattice name, norm), with a content hash."""

    def __init__(self, root: str | os.PathLike) -> None:
        self.root = Path(root)
        self.warnings: list[str] = []

    def _path(self, name: str, N: Fraction) -> Path:
        return self.root / f"shortvec_{name}_{N.numerator}_{N.denominator}.json"

    @staticmethod
    def _digest(vecs) -> str:
        return hashlib.sha256(json.dumps(vecs, separators=(",", ":")).encode()).hexdigest()

    def get(self, name: str, N: Fraction) -> list[list[GaussInt]] | None:
        path = self._path(name, N)
        if not path.exists():
            return None
        try:
            doc = json.loads(path.read_text())
            vecs = doc["vectors"]
            if doc["sha256"] != self._digest(vecs) or doc["lattice"] != name:
                raise ValueError("hash mismatch")
            return [[GaussInt(a, b) for a, b in v] for v in vecs]
        except (ValueError, KeyError, TypeError) as exc:
            self.warnings.append(f"ignored corrupted cache file {path.name}: {exc}")
            return None

    def put(self, name: str, N: Fraction, vecs: list[list[GaussInt]]) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        raw = [[[t.re, t.im] for t in v] for v in vecs]
        doc = {"lattice": name, "norm": str(N), "sha256": self._digest(raw), "vectors": raw}
        self._path(name, N).write_text(json.dumps(doc))


# ---------------------------------------------------------------------------
# covering sampler for Lambda = BW16^G


def _d4_decode(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest D4 points (integer 4-vectors with even sum) to real 4-vectors w[..., 4].

    Returns (point, squared distance).
    """
    r = np.rint(w)
    err = w - r
    odd = (r.sum(axis=-1) % 2) != 0
    # flip the coordinate with the largest rounding error
    k = np.argmax(np.abs(err), axis=-1)
    idx = np.indices(k.shape)
    flip = np.where(err[(*idx, k)] >= 0, 1.0, -1.0)
    r2 = r.copy()
    r2[(*idx, k)] += flip
    r = np.where(odd[..., None], r2, r)
    d2 = ((w - r) ** 2).sum(axis=-1)
    return r, d2


def _c2r(z: np.ndarray) -> np.ndarray:
    """(..., 2) complex -> (..., 4) real (re1, im1, re2, im2)."""
    return np.stack([z[..., 0].real, z[..., 0].imag, z[..., 1].real, z[..., 1].imag], axis=-1)


def _r2c(x: np.ndarray) -> np.ndarray:
    return np.stack([x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3]], axis=-1)


_D4_ROOTS = np.array(
    [v for v in itertools.product((-1, 0, 1), repeat=4) if sum(abs(t) for t in v) == 2], dtype=float
)


@dataclass
class CoveringReport:
    trials: int
    seed: int
    branch1: int = 0
    branch2: int = 0
    exact_fallback: int = 0
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "covered_by_lattice": self.branch1,
            "covered_by_half_class2": self.branch2,
            "exact_fallback": self.exact_fallback,
            "failures": len(self.failures),
        }


class _CoveringData:
    def __init__(self) -> None:
        bw = make_BW16()
        from .lattices import make_4D4

        sub = HermLattice("pD4^4", make_4D4().basis.scale(P), QiMat.identity(8))
        reps = quotient_reps(bw, sub)
        self.bw = bw
        self.reps = np.array([[complex(x) for x in r.tolist()] for r in reps])  # (256, 8)
        self.rep_exact = reps
        self.rep_norm = np.array([int(inner(QiMat.identity(8), r, r).real) for r in reps])
        basis = bw.basis
        self.real_basis = np.array(
            [[complex(basis.entry(r, k)) for r in range(8)] for k in range(8)]
            + [[1j * complex(basis.entry(r, k)) for r in range(8)] for k in range(8)]
        )  # (16, 8)


_COVER: _CoveringData | None = None


def _covering_data() -> _CoveringData:
    global _COVER
    if _COVER is None:
        _COVER = _CoveringData()
    return _COVER


def _nearest_in_cosets(x: np.ndarray, data: _CoveringData):
    """Nearest point of Lambda to each row of x (N, 8) complex: (coset index, D4 points, dist2)."""
    N = x.shape[0]
    y = x[:, None, :] - data.reps[None, :, :]  # (N, 256, 8)
    w = y.reshape(N, -1, 4, 2) / (1 + 1j)
    pts, d2 = _d4_decode(_c2r(w))  # (N,256,4,4), (N,256,4)
    tot = 2.0 * d2.sum(axis=-1)
    best = np.argmin(tot, axis=1)
    ar = np.arange(N)
    return best, pts[ar, best], tot[ar, best]


def _parity_bits(c_blocks: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Re(p <c_j, d_j>) mod 2 per block; c_blocks (...,4,2) complex, d (...,4,4) real points."""
    dz = _r2c(d)
    ip = (np.conj(c_blocks) * dz).sum(axis=-1) * (1 + 1j)
    return np.rint(ip.real).astype(np.int64) % 2


def _nearest_class2(x: np.ndarray, data: _CoveringData):
    """Heuristic nearest class-2 vector of Lambda to each row of x (N, 8) complex.

    For every coset c + (pD4)^4 the class of c + p d is c^2 + 2 f(d) mod 4 with
    f a parity functional that splits over the four blocks, so we decode each
    block for both parities (nearest point, and nearest root-neighbour of the
    other parity) and combine the blocks by a two-state dynamic program.
    """
    N = x.shape[0]
    K = data.reps.shape[0]
    y = x[:, None, :] - data.reps[None, :, :]
    w = _c2r(y.reshape(N, K, 4, 2) / (1 + 1j))  # (N,K,4,4)
    d0, e0 = _d4_decode(w)
    cb = np.broadcast_to(data.reps.reshape(1, K, 4, 2), (N, K, 4, 2))
    f0 = _parity_bits(cb, d0)
    # candidates with the other parity: d0 + r over D4 roots r
    cand = d0[..., None, :] + _D4_ROOTS  # (N,K,4,24,4)
    cd2 = ((w[..., None, :] - cand) ** 2).sum(axis=-1)
    cf = _parity_bits(np.broadcast_to(cb[..., :, None, :], cand.shape[:-1] + (2,)), cand)
    cd2 = np.where(cf != f0[..., None], cd2, np.inf)
    j1 = np.argmin(cd2, axis=-1)
    e1 = np.take_along_axis(cd2, j1[..., None], axis=-1)[..., 0]
    d1 = np.take_along_axis(cand, j1[..., None, None], axis=-2)[..., 0, :]
    # per block: cost for parity 0 and 1
    cost = np.where(f0[..., None] == 0, np.stack([e0, e1], -1), np.stack([e1, e0], -1))  # (N,K,4,2)
    pts = np.where(
        (f0[..., None] == 0)[..., None],
        np.stack([d0, d1], -2),
        np.stack([d1, d0], -2),
    )  # (N,K,4,2,4)
    target = ((2 - data.rep_norm) // 2) % 2  # required parity sum per coset
    # DP over blocks
    best = np.full((N, K, 2), np.inf)
    choice = np.zeros((N, K, 4, 2), dtype=np.int64)
    best[..., 0] = cost[..., 0, 0]
    best[..., 1] = cost[..., 0, 1]
    choice[..., 0, 0], choice[..., 0, 1] = 0, 1
    paths = np.zeros((N, K, 2, 4), dtype=np.int64)
    paths[..., 0, 0], paths[..., 1, 0] = 0, 1
    for b in range(1, 4):
        nb = np.empty_like(best)
        npaths = np.empty_like(paths)
        for s in range(2):
            a = best[..., s] + cost[..., b, 0]  # stay parity s with block bit 0
            c = best[..., 1 - s] + cost[..., b, 1]
            take_a = a <= c
            nb[..., s] = np.where(take_a, a, c)
            pa = paths[..., s, :].copy()
            pa[..., b] = 0
            pc = paths[..., 1 - s, :].copy()
            pc[..., b] = 1
            npaths[..., s, :] = np.where(take_a[..., None], pa, pc)
        best, paths = nb, npaths
    ar = np.arange(K)
    tot = 2.0 * best[:, ar, target]  # (N,K)
    sel = paths[:, ar, target, :]  # (N,K,4)
    k = np.argmin(tot, axis=1)
    n_ar = np.arange(N)
    bits = sel[n_ar, k]  # (N,4)
    chosen = pts[n_ar, k]  # (N,4,2,4)
    blocks = np.take_along_axis(chosen, bits[:, :, None, None], axis=2)[:, :, 0, :]  # (N,4,4)
    return k, blocks, tot[n_ar, k]


def _witness_vector(data: _CoveringData, k: int, blocks: np.ndarray) -> list[GaussRat]:
    c = data.rep_exact[k].tolist()
    out = []
    for j in range(4):
        b = [int(round(t)) for t in blocks[j]]
        d = [GaussInt(b[0], b[1]), GaussInt(b[2], b[3])]
        out += [c[2 * j] + qi(d[0] * P), c[2 * j + 1] + qi(d[1] * P)]
    return out


def _exact_dist2(x: Sequence[GaussRat], v: Sequence[GaussRat]) -> Fraction:
    return sum(((a - b).norm() for a, b in zip(x, v)), Fraction(0))


def covering_sample(trials: int, seed: int = 0, denominator_bits: int = 16, chunk: int = 512) -> CoveringReport:
    """Sample rational points of a fundamental domain of Lambda and certify coverage exactly."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    data = _covering_data()
    rng = np.random.default_rng(seed)
    rep = CoveringReport(trials, seed)
    den = 1 << denominator_bits
    done = 0
    basis_exact = data.bw.basis
    while done < trials:
        n = min(chunk, trials - done)
        T = rng.integers(0, den, size=(n, 16))
        x = (T @ data.real_basis) / den
        k1, b1, d1 = _nearest_in_cosets(x, data)
        need2 = d1 > 2.0 - 1e-6
        idx2 = np.nonzero(need2)[0]
        if len(idx2):
            parts = [_nearest_class2(x[idx2[s:s + 32]] * (1 + 1j), data) for s in range(0, len(idx2), 32)]
            k2 = np.concatenate([q[0] for q in parts])
            b2 = np.concatenate([q[1] for q in parts])
        for r in range(n):
            xe = _exact_point(T[r], den, basis_exact)
            ok = False
            if not need2[r]:
                v = _witness_vector(data, int(k1[r]), b1[r])
                ok = _exact_dist2(xe, v) <= 2
                if ok:
                    rep.branch1 += 1
            if not ok and need2[r]:
                j = int(np.searchsorted(idx2, r))
                v = _witness_vector(data, int(k2[j]), b2[j])
                px = [t * qi(P) for t in xe]
                ok = _exact_dist2(px, v) <= 2 and norm_class(as_vec(v)) == 2
                if ok:
                    rep.branch2 += 1
            if not ok:
                rep.exact_fallback += 1
                if not _exact_covered(xe, data):
                    rep.failures.append([str(t) for t in xe])
        done += n
    return rep


def _exact_point(t_row: np.ndarray, den: int, basis: QiMat) -> list[GaussRat]:
    n = basis.shape[1]
    coeff = [GaussRat(int(t_row[k]), int(t_row[n + k]), den) for k in range(n)]
    return (basis @ QiMat.from_entries(coeff)).tolist()


def _exact_covered(xe: Sequence[GaussRat], data: _CoveringData) -> bool:
    bw = data.bw
    if within(bw, xe, 2):
        return True
    px = [t * qi(P) for t in xe]
    return any(norm_class(v) == 2 for v, _ in within(bw, px, 2))

"""Roots of L whose mirrors come within d0 of tau.

A root r is written r = p^{-1} (c_1 v_1 + ... + c_10 v_10) in the basis from
``tau_basis``.  The horoball and mirror-distance bounds confine the c_j to a
finite box, which is derived here from the exact cutoffs rather than assumed.
Candidates are generated pair by pair under the congruence and norm budget,
then screened with integer arithmetic: |<r, tau>|^2 = P - sqrt2 Q.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .hyperbolic import Surd, horo_bound, sinh2_d0, sinh2_pt_mirror, two_cosh2_2d0
from .lattices import RHO1, ambient_L, inner, l_infinity, make_L_d4, simple_roots_32, tau_vector
from .reduction import IntVecs, _less_sqrt2, tau_engine
from .scalar import UNITS, GaussInt, RealQuad, gauss_ball, rq_floor


def tau_basis() -> list[list[GaussInt]]:
    """v_1..v_8 = -s_d1, s_b1, ..., -s_d4, s_b4; v_9 = (0^8; 1, 0); v_10 = l_inf."""
    roots = simple_roots_32()
    vs: list[list[GaussInt]] = []
    for k in range(1, 5):
        vs.append([-x for x in roots[f"d{k}"]])
        vs.append(list(roots[f"b{k}"]))
    vs.append([GaussInt.coerce(x) for x in RHO1])
    vs.append(l_infinity())
    H = ambient_L()
    for a in range(10):
        for b in range(10):
            want = 2 if (a == b and a < 8) or {a, b} == {8, 9} else 0
            if inner(H, vs[a], vs[b]) != want:
                raise AssertionError(f"tau basis: <v{a + 1}, v{b + 1}> != {want}")
    return vs


# ---------------------------------------------------------------------------
# the box


def _surd_floor(s: Surd) -> int:
    n = int(float(s))
    while s.ge(n + 1):
        n += 1
    while n > 0 and not s.ge(n):
        n -= 1
    return n


@dataclass(frozen=True)
class CBox:
    """Norm caps: c_1..c_8 by the mirror bound, c_9 and c_10 by horoball bounds."""

    pair_cap: int
    c9_cap: int
    c10_cap: int
    cutoffs: dict = field(default_factory=dict, compare=False)


def derive_box() -> CBox:
    a = two_cosh2_2d0()
    h9 = horo_bound(RHO1)  # caps |c_10|^2 = |p^{-1}<v_9, r>|^2
    h10 = horo_bound(l_infinity())  # caps |c_9|^2
    cut = {
        "two_cosh2_2d0": float(a),
        "horo_v9": float(h9),
        "horo_v10": float(h10),
    }
    return CBox(rq_floor(a), _surd_floor(h10), _surd_floor(h9), cut)


# ---------------------------------------------------------------------------
# candidate tuples


@dataclass(frozen=True)
class CTuple:
    c: tuple[GaussInt, ...]

    @classmethod
    def from_rows(cls, cr: np.ndarray, ci: np.ndarray, k: int) -> CTuple:
        return cls(tuple(GaussInt(int(a), int(b)) for a, b in zip(cr[k], ci[k])))

    def budget(self) -> int:
        return sum(x.norm() for x in self.c[:8])

    def valid(self, box: CBox) -> bool:
        """The box, the congruences mod p, the norm budget and the c_9 normalisation."""
        c = self.c
        if len(c) != 10 or any(x.norm() > box.pair_cap for x in c[:8]):
            return False
        if c[8] not in c9_choices(box.c9_cap) or c[9].norm() > box.c10_cap:
            return False
        t = _cls(c[9].re, c[9].im)
        if any(_cls(c[j].re + c[j + 1].re, c[j].im + c[j + 1].im) != t for j in (0, 2, 4, 6)):
            return False
        B = self.budget()
        return B == 2 - 2 * (c[8].conj() * c[9]).re and B >= 2


def _cls(re, im):
    return (re + im) % 2  # residue mod p


def _pair_table(cap: int):
    ball = gauss_ball(cap)
    br = np.array([z.re for z in ball], dtype=np.int64)
    bi = np.array([z.im for z in ball], dtype=np.int64)
    ia, ib = np.meshgrid(np.arange(len(ball)), np.arange(len(ball)), indexing="ij")
    ia, ib = ia.ravel(), ib.ravel()
    pr = np.stack([br[ia], br[ib]], 1)
    pi = np.stack([bi[ia], bi[ib]], 1)
    cls = _cls(pr.sum(1), pi.sum(1))
    nrm = (pr * pr + pi * pi).sum(1)
    return pr, pi, cls, nrm


def _halves(cap: int, t: int) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Pairs of pairs (c_1..c_4 shape) in congruence class t, grouped by norm."""
    pr, pi, cls, nrm = _pair_table(cap)
    keep = np.nonzero(cls == t)[0]
    pr, pi, nrm = pr[keep], pi[keep], nrm[keep]
    ia, ib = np.meshgrid(np.arange(len(keep)), np.arange(len(keep)), indexing="ij")
    ia, ib = ia.ravel(), ib.ravel()
    hr = np.concatenate([pr[ia], pr[ib]], 1)
    hi = np.concatenate([pi[ia], pi[ib]], 1)
    hn = nrm[ia] + nrm[ib]
    return {int(n): (hr[hn == n], hi[hn == n]) for n in np.unique(hn)}


def c9_choices(cap: int) -> list[GaussInt]:
    """0 and one member of each unit class, with re > 0 and im >= 0: {0, 1, p} for cap 2."""
    return [z for z in gauss_ball(cap) if z.norm() == 0 or (z.re > 0 and z.im >= 0)]


def _c9_c10(box: CBox) -> list[tuple[GaussInt, GaussInt, int]]:
    out = []
    for c10 in gauss_ball(box.c10_cap):
        for c9 in c9_choices(box.c9_cap):
            B = 2 - 2 * (c9.conj() * c10).re
            if 2 <= B:
                out.append((c9, c10, B))
    return out


def _tuple_blocks(c9: GaussInt, c10: GaussInt, B: int, halves) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """All (c_1..c_10) with the given c_9, c_10 and budget, as (N, 10) arrays, block by block."""
    for n1, (ar, ai) in halves.items():
        if B - n1 not in halves:
            continue
        br, bi = halves[B - n1]
        ia, ib = np.meshgrid(np.arange(len(ar)), np.arange(len(br)), indexing="ij")
        ia, ib = ia.ravel(), ib.ravel()
        N = len(ia)
        yield (
            np.concatenate([ar[ia], br[ib], np.full((N, 1), c9.re), np.full((N, 1), c10.re)], 1),
            np.concatenate([ai[ia], bi[ib], np.full((N, 1), c9.im), np.full((N, 1), c10.im)], 1),
        )


def enumerate_candidates(box: CBox | None = None) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Batches of tuples satisfying the box, congruence, budget and c_9 normalisation."""
    box = derive_box() if box is None else box
    halves = {t: _halves(box.pair_cap, t) for t in (0, 1)}
    for c9, c10, B in _c9_c10(box):
        yield from _tuple_blocks(c9, c10, B, halves[_cls(c10.re, c10.im)])


# ---------------------------------------------------------------------------
# tuples to roots


def _basis_arrays() -> tuple[np.ndarray, np.ndarray]:
    vs = tau_basis()
    return (np.array([[x.re for x in v] for v in vs], dtype=np.int64), np.array([[x.im for x in v] for v in vs], dtype=np.int64))


def _div_p(xr: np.ndarray, xi: np.ndarray):
    """x / p where divisible (x pbar / 2); returns (ok, re, im)."""
    ar, ai = xr + xi, xi - xr
    ok = (ar % 2 == 0) & (ai % 2 == 0)
    return ok, ar // 2, ai // 2


def _r9_formula(cr: np.ndarray, ci: np.ndarray):
    """r_9 = (c_9 + (p - 3) c_10 - c_2 - c_4 - c_6 - c_8) / p."""
    # (p - 3) c10 = (-2 + i) c10
    nr = cr[:, 8] + (-2 * cr[:, 9] - ci[:, 9]) - cr[:, 1] - cr[:, 3] - cr[:, 5] - cr[:, 7]
    ni = ci[:, 8] + (-2 * ci[:, 9] + cr[:, 9]) - ci[:, 1] - ci[:, 3] - ci[:, 5] - ci[:, 7]
    return _div_p(nr, ni)


def roots_from_tuples(cr: np.ndarray, ci: np.ndarray) -> tuple[np.ndarray, IntVecs]:
    """Integrality mask and r = p^{-1} sum c_j v_j for the integral rows.

    The direct linear combination is checked against the coordinate formula
    r = (c_1, c_2 + c_10, ..., c_8 + c_10; r_9, c_10).
    """
    vr, vi = _basis_arrays()
    xr = cr @ vr - ci @ vi
    xi = cr @ vi + ci @ vr
    ok, rr, ri = _div_p(xr, xi)
    direct = ok.all(axis=1)
    ok9, r9r, r9i = _r9_formula(cr, ci)
    if not np.array_equal(direct, ok9):
        raise AssertionError("r_9 integrality disagrees with the direct combination")
    rr, ri = rr[direct], ri[direct]
    fr = cr[direct].copy()
    fi = ci[direct].copy()
    for j in (1, 3, 5, 7):
        fr[:, j] += fr[:, 9]
        fi[:, j] += fi[:, 9]
    fr[:, 8], fi[:, 8] = r9r[direct], r9i[direct]
    if not (np.array_equal(fr, rr) and np.array_equal(fi, ri)):
        raise AssertionError("coordinate formula disagrees with the direct combination")
    return direct, IntVecs(rr, ri)


def c_to_root(c: Sequence) -> list[GaussInt] | None:
    """The root p^{-1} sum c_j v_j, or None when r_9 is not integral."""
    cs = [GaussInt.coerce(x) for x in c]
    cr = np.array([[x.re for x in cs]], dtype=np.int64)
    ci = np.array([[x.im for x in cs]], dtype=np.int64)
    mask, r = roots_from_tuples(cr, ci)
    return r.row(0) if mask[0] else None


def root_to_c(r: Sequence) -> list[GaussInt]:
    """c_j = pbar^{-1} <v_j, r>, with v_9 and v_10 swapped as the dual pairing requires."""
    vs = tau_basis()
    H = ambient_L()
    pb = GaussInt(1, -1)
    order = list(range(8)) + [9, 8]
    out = []
    for j in order:
        g = inner(H, vs[j], r)
        q = g / pb
        if q.den != 1:
            raise ValueError("not a vector of L")
        out.append(GaussInt(int(q.re_num), int(q.im_num)))
    return out


def unit_class(r: Sequence) -> tuple:
    """A canonical key for {u r : u a unit}."""
    r = [GaussInt.coerce(x) for x in r]
    return min(tuple((y.re, y.im) for y in (u * x for x in r)) for u in UNITS)


# ---------------------------------------------------------------------------
# the theorem check


def _norms(x: IntVecs) -> np.ndarray:
    """Exact x^2 for a batch in the d4 frame."""
    H = ambient_L()
    hr = np.array(H.re, dtype=np.int64)
    hi = np.array(H.im, dtype=np.int64)
    gr = x.re @ hr.T - x.im @ hi.T
    gi = x.re @ hi.T + x.im @ hr.T
    return (x.re * gr + x.im * gi).sum(axis=1)


def _in_L(x: IntVecs) -> np.ndarray:
    ok = np.ones(len(x), dtype=bool)
    for j in range(4):
        s = x.re[:, 2 * j] + x.im[:, 2 * j] + x.re[:, 2 * j + 1] + x.im[:, 2 * j + 1]
        ok &= s % 2 == 0
    return ok


@dataclass
class _Batch:
    visited: int = 0
    roots: int = 0
    through_tau: int = 0
    near: list[list[GaussInt]] = field(default_factory=list)

    def add(self, other: _Batch) -> None:
        self.visited += other.visited
        self.roots += other.roots
        self.through_tau += other.through_tau
        self.near += other.near


def _screen(cr: np.ndarray, ci: np.ndarray) -> _Batch:
    mask, r = roots_from_tuples(cr, ci)
    if len(r) and not (np.all(_norms(r) == 2) and np.all(_in_L(r))):
        raise AssertionError("an integral tuple did not give a root of L")
    eng = tau_engine()
    _, A, B = eng.products(r)
    Pv, Qv = eng.value(A, B)
    # within d0 iff |<r, tau>|^2 = P - sqrt2 Q <= 2
    near = ~_less_sqrt2(2 - Pv, -Qv)
    zero = (Pv == 0) & (Qv == 0)
    return _Batch(len(cr), len(r), int(zero.sum()), [r.row(k) for k in np.nonzero(near)[0]])


def _run_box(box: CBox, threads: int) -> _Batch:
    halves = {t: _halves(box.pair_cap, t) for t in (0, 1)}

    def work(job) -> _Batch:
        c9, c10, B = job
        acc = _Batch()
        for cr, ci in _tuple_blocks(c9, c10, B, halves[_cls(c10.re, c10.im)]):
            acc.add(_screen(cr, ci))
        return acc

    jobs = _c9_c10(box)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, jobs))
    else:
        parts = [work(j) for j in jobs]
    total = _Batch()
    for b in parts:  # merged in job order, so the result does not depend on threads
        total.add(b)
    return total


def enlarged_box(box: CBox) -> CBox:
    """Each cap raised to the next norm that occurs in Z[i]."""

    def bump(n: int) -> int:
        return next(m for m in range(n + 1, n + 4) if any(z.norm() == m for z in gauss_ball(m)))

    return CBox(bump(box.pair_cap), bump(box.c9_cap), bump(box.c10_cap), {"enlarged_from": [box.pair_cap, box.c9_cap, box.c10_cap]})


def _box_json(box: CBox) -> dict:
    return {"pair_cap": box.pair_cap, "c9_cap": box.c9_cap, "c10_cap": box.c10_cap, **box.cutoffs}


@dataclass
class NearTauReport:
    box: dict
    candidates_visited: int
    roots_found: int
    within_d0: int
    mirrors_found: int
    all_at_equality: bool
    matches_simple_roots: bool
    tau_on_mirror: bool
    budget_zero_roots: int
    sinh2_d0: dict
    certificates: list[dict]
    wall_time: float
    enlarged: dict | None = None

    @property
    def ok(self) -> bool:
        return (
            self.mirrors_found == 32
            and self.all_at_equality
            and self.matches_simple_roots
            and not self.tau_on_mirror
            and self.budget_zero_roots == 0
            and (self.enlarged is None or self.enlarged["matches_simple_roots"])
        )

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def rq_json(x: RealQuad) -> dict:
    return {"a": [x.a.numerator, x.a.denominator], "b": [x.b.numerator, x.b.denominator], "float": float(x)}


def _budget_zero_roots(box: CBox) -> int:
    """Roots of L with c_1 = ... = c_8 = 0, i.e. Re(conj c_9 c_10) = 1; there should be none."""
    rows = []
    for c10 in gauss_ball(box.c10_cap):
        if _cls(c10.re, c10.im):
            continue  # the congruence forces c_10 = 0 mod p
        for c9 in c9_choices(box.c9_cap):
            if (c9.conj() * c10).re == 1:
                rows.append([0] * 8 + [c9, c10])
    if not rows:
        return 0
    cr = np.array([[GaussInt.coerce(x).re for x in r] for r in rows], dtype=np.int64)
    ci = np.array([[GaussInt.coerce(x).im for x in r] for r in rows], dtype=np.int64)
    mask, _ = roots_from_tuples(cr, ci)
    return int(mask.sum())


def _classes(near: list[list[GaussInt]]) -> dict[tuple, list[GaussInt]]:
    return dict(sorted({unit_class(r): r for r in near}.items()))


def mirrors_within_d0(threads: int = 1, cross_check: bool = False) -> NearTauReport:
    """Enumerate the box and keep the roots whose mirrors lie within d0 of tau.

    With ``cross_check`` the enumeration is repeated on a strictly larger box,
    which must give the same mirrors.
    """
    t0 = time.perf_counter()
    box = derive_box()
    res = _run_box(box, threads)
    near = _classes(res.near)
    simple = {unit_class(v): k for k, v in simple_roots_32().items()}
    s0 = sinh2_d0()
    tau = tau_vector()
    certs = []
    for key, r in near.items():
        if not make_L_d4().member(r):
            raise AssertionError("a near root is not in L")
        val = sinh2_pt_mirror(r, tau)
        certs.append({"vertex": simple.get(key), "root": [[x.re, x.im] for x in r], "sinh2": rq_json(val), "equal": val == s0})
    enlarged = None
    if cross_check:
        big = enlarged_box(box)
        res2 = _run_box(big, threads)
        near2 = _classes(res2.near)
        enlarged = {
            "box": _box_json(big),
            "candidates_visited": res2.visited,
            "mirrors_found": len(near2),
            "matches_simple_roots": set(near2) == set(simple),
            "tau_on_mirror": res2.through_tau > 0,
        }
    return NearTauReport(
        box=_box_json(box),
        candidates_visited=res.visited,
        roots_found=res.roots,
        within_d0=len(res.near),
        mirrors_found=len(near),
        all_at_equality=all(c["equal"] for c in certs),
        matches_simple_roots=set(near) == set(simple),
        tau_on_mirror=res.through_tau > 0,
        budget_zero_roots=_budget_zero_roots(box),
        sinh2_d0=rq_json(s0),
        certificates=certs,
        wall_time=round(time.perf_counter() - t0, 3),
        enlarged=enlarged,
    )

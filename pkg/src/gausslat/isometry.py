"""Reflections, Heisenberg translations and exact checks of group relations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .lattices import HermLattice, ambient_L, as_vec, inner, make_BW16, simple_root_matrix
from .linalg import QiMat, same_span
from .scalar import I, P, PBAR, GaussInt, GaussRat, qi

UNIT_EXPONENTS = {1: GaussInt(0, 1), 2: GaussInt(-1), 3: GaussInt(0, -1)}


@dataclass(frozen=True, eq=False)
class Isometry:
    matrix: QiMat
    frame: str = "d4"

    def __matmul__(self, other: Isometry) -> Isometry:
        if self.frame != other.frame:
            raise ValueError(f"cannot compose {self.frame} with {other.frame}; convert frames first")
        return Isometry(self.matrix @ other.matrix, self.frame)

    def __eq__(self, other) -> bool:
        return isinstance(other, Isometry) and self.frame == other.frame and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __call__(self, v) -> QiMat:
        return self.matrix @ as_vec(v)

    def inverse(self) -> Isometry:
        return Isometry(self.matrix.inverse(), self.frame)

    def __pow__(self, k: int) -> Isometry:
        return Isometry(self.matrix ** k, self.frame)

    def is_unitary(self, gram: QiMat | None = None) -> bool:
        g = ambient_L() if gram is None else gram
        return self.matrix.H @ g @ self.matrix == g

    def preserves(self, L: HermLattice) -> bool:
        return same_span(self.matrix @ L.basis, L.basis)

    def conjugate(self, phi: QiMat, frame: str) -> Isometry:
        """phi g phi^{-1}: the same isometry expressed in another frame."""
        return Isometry(phi @ self.matrix @ phi.inverse(), frame)


def identity(n: int = 10, frame: str = "d4") -> Isometry:
    return Isometry(QiMat.identity(n), frame)


def reflection(v, xi=I, gram: QiMat | None = None, frame: str = "d4") -> Isometry:
    """R_v^xi(x) = x - (1 - xi) <v, x> / v^2 v."""
    g = ambient_L() if gram is None else gram
    v = as_vec(v)
    n2 = inner(g, v, v)
    if not n2:
        raise ValueError("reflection in a null vector")
    coef = (qi(1) - qi(xi)) / n2
    col = QiMat(v.re.reshape(-1, 1), v.im.reshape(-1, 1), v.den)
    outer = col @ (col.H @ g)
    return Isometry(QiMat.identity(v.shape[0]) - outer.scale(coef), frame)


def braids(s, t, gram: QiMat | None = None) -> bool:
    rs, rt = reflection(s, gram=gram), reflection(t, gram=gram)
    return rs @ rt @ rs == rt @ rs @ rt


def commutes(s, t, gram: QiMat | None = None) -> bool:
    rs, rt = reflection(s, gram=gram), reflection(t, gram=gram)
    return rs @ rt == rt @ rs


def length4_relation(s, t, gram: QiMat | None = None) -> bool:
    """R_s R_t R_s R_t = R_t R_s R_t R_s together with i R_s R_t R_s (t) = t."""
    rs, rt = reflection(s, gram=gram), reflection(t, gram=gram)
    ok = rs @ rt @ rs @ rt == rt @ rs @ rt @ rs
    img = (rs @ rt @ rs)(t).scale(I)
    return ok and img == as_vec(t)


def word_product(gens: Sequence[Isometry], start: int, m: int) -> Isometry:
    k = len(gens)
    out = gens[start % k]
    for j in range(1, m):
        out = out @ gens[(start + j) % k]
    return out


def deflation_check(gens: Sequence[Isometry], m: int, offset: int = 0) -> bool:
    """x_o x_{o+1} ... x_{o+m-1} = x_{o+1} ... x_{o+m}, indices mod len(gens)."""
    return word_product(gens, offset, m) == word_product(gens, offset + 1, m)


# ---------------------------------------------------------------------------
# Heisenberg translations in the bw frame (Lambda = BW16^G)


def _purely_imaginary(z: GaussRat) -> bool:
    return z.re_num == 0


def valid_translation(lam, z, bw: HermLattice | None = None) -> bool:
    """lam in Lambda and z in i(lam^2/2 + 2Z)."""
    bw = make_BW16() if bw is None else bw
    lam = as_vec(lam)
    if not bw.member(lam):
        return False
    z = qi(z)
    if not _purely_imaginary(z):
        return False
    half = inner(QiMat.identity(8), lam, lam).real / 2
    k = (z.imag - half) / 2
    return k.denominator == 1


@dataclass(frozen=True, eq=False)
class Translation:
    lam: QiMat
    z: GaussRat

    @property
    def isometry(self) -> Isometry:
        return Isometry(translation_matrix(self.lam, self.z), "bw")

    def __matmul__(self, other: Translation) -> Translation:
        return trans_mul(self, other)

    def inverse(self) -> Translation:
        return Translation(-self.lam, -self.z)

    def key(self) -> tuple:
        return (tuple(self.lam.tolist()), self.z)


def make_translation(lam, z, check: bool = True) -> Translation:
    lam, z = as_vec(lam), qi(z)
    if check and not valid_translation(lam, z):
        raise ValueError("z must lie in i(lam^2/2 + 2Z) with lam in Lambda")
    return Translation(lam, z)


def translation_matrix(lam, z) -> QiMat:
    """Matrix of (l; a, b) -> (l + a lam; a, -pbar^{-1}<lam, l> + a pbar^{-1}(z - lam^2/2) + b)."""
    lam, z = as_vec(lam), qi(z)
    pbinv = qi(PBAR).inverse()
    n2 = inner(QiMat.identity(8), lam, lam)
    rows = [[qi(0)] * 10 for _ in range(10)]
    lv = lam.tolist()
    for k in range(8):
        rows[k][k] = qi(1)
        rows[k][8] = lv[k]
    rows[8][8] = qi(1)
    for k in range(8):
        rows[9][k] = -pbinv * lv[k].conj()
    rows[9][8] = pbinv * (z - n2 * GaussRat(1, 0, 2))
    rows[9][9] = qi(1)
    return QiMat.from_entries(rows)


def im_part(w: GaussRat) -> GaussRat:
    """The purely imaginary part i*Im(w)."""
    return GaussRat(0, w.im_num, w.den)


def trans_mul(t1: Translation, t2: Translation) -> Translation:
    """T_{l,z} T_{l',z'} = T_{l+l', z+z'+i Im<l', l>}."""
    c = inner(QiMat.identity(8), t2.lam, t1.lam)
    return Translation(t1.lam + t2.lam, t1.z + t2.z + im_part(c))


def trans_commutator(t1: Translation, t2: Translation) -> Translation:
    c = inner(QiMat.identity(8), t2.lam, t1.lam)
    return Translation(QiMat.zeros((8,)), im_part(c) * 2)


def beta() -> Isometry:
    """Identity on Lambda, multiplication by -i on the hyperbolic cell."""
    d = [qi(1)] * 8 + [qi(-I), qi(-I)]
    return Isometry(QiMat.from_entries([[d[r] if r == c else qi(0) for c in range(10)] for r in range(10)]), "bw")


R1_ROOT = [0] * 8 + [1, 1]
R2_ROOT = [0] * 8 + [1, I]


def r1r2() -> Isometry:
    return reflection(R1_ROOT, frame="bw") @ reflection(R2_ROOT, frame="bw")


def r1r2_identity(lam=None) -> dict[str, bool]:
    """R1 R2 = beta T_{0,-4i}, and the two conjugation identities for a given lam."""
    zero = QiMat.zeros((8,))
    rr = r1r2()
    out = {"R1R2_eq_beta_T0": rr == beta() @ make_translation(zero, -4 * qi(I)).isometry}
    out["beta_order_4"] = beta() ** 4 == identity(frame="bw")
    if lam is not None:
        lam = as_vec(lam)
        half = inner(QiMat.identity(8), lam, lam).real / 2
        z = GaussRat.from_parts(0, half)
        T = make_translation(lam, z)
        conj = rr @ T.isometry @ rr.inverse()
        out["conjugation"] = conj == make_translation(lam.scale(I), z).isometry
        comm = T.isometry @ rr @ T.isometry.inverse() @ rr.inverse()
        n2 = inner(QiMat.identity(8), lam, lam)
        out["commutator"] = comm == make_translation(lam.scale(PBAR), n2 * qi(I)).isometry
    return out


def tstar_reps(reps: Sequence[QiMat] | None = None) -> list[Translation]:
    """T_{sigma, i sigma^2/2} and T_{sigma, 2i + i sigma^2/2} over Lambda/p representatives."""
    if reps is None:
        from .shortvec import coset_reps

        reps = coset_reps(make_BW16(), P)
    out = []
    for s in reps:
        half = inner(QiMat.identity(8), s, s).real / 2
        out.append(make_translation(s, GaussRat.from_parts(0, half)))
        out.append(make_translation(s, GaussRat.from_parts(0, half + 2)))
    return out


# ---------------------------------------------------------------------------
# the simple reflections


def simple_reflections(xi=I) -> list[Isometry]:
    S = simple_root_matrix()
    return [reflection(S[:, k], xi) for k in range(32)]


def word_to_isometry(word: Sequence[int], refl: Sequence[Isometry] | None = None) -> Isometry:
    """R_{n_k} ... R_{n_1} for a word (n_1, ..., n_k) with entries in 1..64."""
    refl = simple_reflections() if refl is None else refl
    inv = [r.inverse() for r in refl]
    out = identity()
    for n in word:
        g = refl[n - 1] if n <= 32 else inv[n - 33]
        out = g @ out
    return out

"""Irrep labels, group elements, Wigner D-matrices, Clebsch-Gordan
coefficients, representation assembly, generators and Haar quadrature for
SU(2) and Z_N.

Conventions:
  * Half-integers are stored as doubled integers (two_j, two_m) so irrep
    bookkeeping is exact.
  * Irrep carrier bases are ordered by descending weight m = j, j-1, ..., -j.
  * Clebsch-Gordan coefficients are real in the Condon-Shortley convention.
  * SU(2) elements are zyz Euler triples (alpha, beta, gamma) with
    beta in [0, pi]; alpha, gamma live mod 4*pi (double cover).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

SU2 = "su2"
ZN = "zn"

_GIMBAL_EPS = 1e-12


@dataclass(frozen=True)
class IrrepLabel:
    kind: str
    two_j: int = 0          # SU(2) spin, doubled
    charge: int = 0         # Z_N charge, stored reduced mod N
    modulus: int = 0        # N for Z_N

    def __post_init__(self):
        if self.kind == SU2:
            if self.two_j < 0:
                raise ValueError("two_j must be non-negative")
        elif self.kind == ZN:
            if self.modulus <= 0:
                raise ValueError("Z_N modulus must be positive")
            object.__setattr__(self, "charge", self.charge % self.modulus)
        else:
            raise ValueError(f"unknown group kind {self.kind!r}")

    @staticmethod
    def su2(two_j: int) -> "IrrepLabel":
        return IrrepLabel(SU2, two_j=two_j)

    @staticmethod
    def zn(charge: int, modulus: int) -> "IrrepLabel":
        return IrrepLabel(ZN, charge=charge, modulus=modulus)

    @property
    def dim(self) -> int:
        return self.two_j + 1 if self.kind == SU2 else 1

    def dual(self) -> "IrrepLabel":
        """Dual (conjugate) irrep label."""
        if self.kind == SU2:
            return self
        return IrrepLabel.zn(-self.charge, self.modulus)

    def components(self) -> list[int]:
        """Component indices: doubled weights for SU(2), [0] for Z_N."""
        if self.kind == SU2:
            return list(range(self.two_j, -self.two_j - 2, -2))
        return [0]


@dataclass(frozen=True)
class GroupElement:
    kind: str
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    g: int = 0
    modulus: int = 0

    def __post_init__(self):
        if self.kind == ZN:
            if self.modulus <= 0:
                raise ValueError("Z_N modulus must be positive")
            object.__setattr__(self, "g", self.g % self.modulus)
        elif self.kind != SU2:
            raise ValueError(f"unknown group kind {self.kind!r}")

    @staticmethod
    def su2(alpha: float, beta: float, gamma: float) -> "GroupElement":
        return GroupElement(SU2, alpha=alpha, beta=beta, gamma=gamma)

    @staticmethod
    def zn(g: int, modulus: int) -> "GroupElement":
        return GroupElement(ZN, g=g, modulus=modulus)

    @staticmethod
    def identity(kind: str, modulus: int = 0) -> "GroupElement":
        if kind == SU2:
            return GroupElement.su2(0.0, 0.0, 0.0)
        return GroupElement.zn(0, modulus)


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return math.factorial(n)


def _wigner_d_entry(two_j: int, two_mp: int, two_m: int, beta: float) -> float:
    """Small Wigner d^j_{m'm}(beta) via the explicit factorial sum."""
    if (two_j + two_mp) % 2 or (two_j + two_m) % 2:
        raise ValueError("m labels must have the parity of j")
    jpm, jmm = (two_j + two_m) // 2, (two_j - two_m) // 2
    jpmp, jmmp = (two_j + two_mp) // 2, (two_j - two_mp) // 2
    dmp = (two_mp - two_m) // 2  # m' - m (integer)
    pref = math.sqrt(_fact(jpmp) * _fact(jmmp) * _fact(jpm) * _fact(jmm))
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    total = 0.0
    for k in range(max(0, -dmp), min(jpm, jmmp) + 1):
        denom = _fact(jpm - k) * _fact(k) * _fact(dmp + k) * _fact(jmmp - k)
        total += ((-1) ** (dmp + k) / denom) * c ** (two_j - dmp - 2 * k) * s ** (dmp + 2 * k)
    return pref * total


def wigner_D(j: IrrepLabel, g: GroupElement) -> np.ndarray:
    """Unitary irrep matrix in the descending-weight basis.

    For SU(2): D^j(a,b,c)_{m'm} = exp(-i m' a) d^j_{m'm}(b) exp(-i m c).
    For Z_N:   the 1x1 phase omega^(charge * g), omega = exp(2 pi i / N).
    """
    if j.kind != g.kind:
        raise ValueError("group kind mismatch between irrep and element")
    if j.kind == ZN:
        return np.array([[np.exp(2j * np.pi * j.charge * g.g / j.modulus)]])
    two_j = j.two_j
    ms = j.components()
    D = np.empty((two_j + 1, two_j + 1), dtype=complex)
    for r, two_mp in enumerate(ms):
        for c, two_m in enumerate(ms):
            D[r, c] = (
                np.exp(-1j * (two_mp / 2) * g.alpha)
                * _wigner_d_entry(two_j, two_mp, two_m, g.beta)
                * np.exp(-1j * (two_m / 2) * g.gamma)
            )
    return D


def mode_matrix(j: IrrepLabel, g: GroupElement) -> np.ndarray:
    """Coefficient matrix V(g) of the adjoint action on tensor components.

    Irreducible tensor families built here satisfy the column-form law
    U_g T_k U_g^dag = sum_j D(g)_{jk} T_j, i.e. T_k picks up column k of the
    Wigner matrix.  Read as "T_k -> sum_j V_{kj} T_j" this is V(g) = D(g)^T,
    which composes contravariantly (V(g1 g2) = V(g2) V(g1)) as required for
    a conjugation action.
    """
    return wigner_D(j, g).T


def dual_sign_permutation(j: IrrepLabel) -> np.ndarray:
    """Intertwiner Y with D(g)^* = Y D(g) Y^{-1} in the descending basis.

    For SU(2), Y_{rk} pairs weight m with -m carrying the phase (-1)^(j-m);
    a tensor family S_k := sum_r Y_{kr} T_r transforms in the dual irrep.
    For Z_N irreps (1-dimensional) the dual is a different label and Y = [1].
    """
    if j.kind == ZN:
        return np.eye(1)
    ms = j.components()
    n = len(ms)
    Y = np.zeros((n, n))
    for r, two_m in enumerate(ms):
        Y[ms.index(-two_m), r] = (-1.0) ** ((j.two_j - two_m) // 2)
    return Y


def su2_matrix(g: GroupElement) -> np.ndarray:
    """Fundamental (spin-1/2) matrix of an SU(2) element."""
    return wigner_D(IrrepLabel.su2(1), g)


def su2_from_matrix(U: np.ndarray) -> GroupElement:
    """Euler extraction from a 2x2 SU(2) matrix.

    Gimbal cases beta in {0, pi} use the convention gamma = 0.  The returned
    triple reconstructs U exactly (as an SU(2) element, alpha mod 4*pi).
    """
    U = np.asarray(U, dtype=complex)
    c, s = abs(U[0, 0]), abs(U[1, 0])
    beta = 2.0 * math.atan2(s, c)
    if s <= _GIMBAL_EPS:
        return GroupElement.su2(-2.0 * np.angle(U[0, 0]), 0.0, 0.0)
    if c <= _GIMBAL_EPS:
        return GroupElement.su2(2.0 * np.angle(U[1, 0]), math.pi, 0.0)
    apg = -2.0 * np.angle(U[0, 0])
    amg = 2.0 * np.angle(U[1, 0])
    return GroupElement.su2((apg + amg) / 2.0, beta, (apg - amg) / 2.0)


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """Group composition g1 * g2."""
    if g1.kind != g2.kind:
        raise ValueError("group kind mismatch")
    if g1.kind == ZN:
        if g1.modulus != g2.modulus:
            raise ValueError("Z_N modulus mismatch")
        return GroupElement.zn(g1.g + g2.g, g1.modulus)
    return su2_from_matrix(su2_matrix(g1) @ su2_matrix(g2))


def inverse(g: GroupElement) -> GroupElement:
    if g.kind == ZN:
        return GroupElement.zn(-g.g, g.modulus)
    return su2_from_matrix(su2_matrix(g).conj().T)


def random_su2(rng: np.random.Generator) -> GroupElement:
    """Haar-distributed SU(2) element."""
    z = rng.normal(size=4)
    z /= np.linalg.norm(z)
    a, b = z[0] + 1j * z[1], z[2] + 1j * z[3]
    return su2_from_matrix(np.array([[a, -np.conj(b)], [b, np.conj(a)]]))


@lru_cache(maxsize=None)
def _cgc_doubled(two_j1: int, two_m1: int, two_j2: int, two_m2: int,
                 two_J: int, two_M: int) -> float:
    if two_M != two_m1 + two_m2:
        return 0.0
    if abs(two_m1) > two_j1 or abs(two_m2) > two_j2 or abs(two_M) > two_J:
        return 0.0
    if (two_j1 + two_m1) % 2 or (two_j2 + two_m2) % 2 or (two_J + two_M) % 2:
        return 0.0
    if two_J < abs(two_j1 - two_j2) or two_J > two_j1 + two_j2:
        raise ValueError("J outside the Clebsch-Gordan series of j1 x j2")
    if (two_j1 + two_j2 + two_J) % 2:
        return 0.0

    def h(x: int) -> int:
        return x // 2

    # Racah's closed form; all factorial arguments are exact integers.
    norm = Fraction(
        (two_J + 1)
        * _fact(h(two_J + two_j1 - two_j2))
        * _fact(h(two_J - two_j1 + two_j2))
        * _fact(h(two_j1 + two_j2 - two_J)),
        _fact(h(two_j1 + two_j2 + two_J) + 1),
    ) * Fraction(
        _fact(h(two_J + two_M)) * _fact(h(two_J - two_M))
        * _fact(h(two_j1 - two_m1)) * _fact(h(two_j1 + two_m1))
        * _fact(h(two_j2 - two_m2)) * _fact(h(two_j2 + two_m2)),
        1,
    )
    total = Fraction(0)
    k_min = max(0, h(two_j2 - two_J - two_m1), h(two_j1 - two_J + two_m2))
    k_max = min(
        h(two_j1 + two_j2 - two_J),
        h(two_j1 - two_m1),
        h(two_j2 + two_m2),
    )
    for k in range(k_min, k_max + 1):
        denom = (
            _fact(k)
            * _fact(h(two_j1 + two_j2 - two_J) - k)
            * _fact(h(two_j1 - two_m1) - k)
            * _fact(h(two_j2 + two_m2) - k)
            * _fact(h(two_J - two_j2 + two_m1) + k)
            * _fact(h(two_J - two_j1 - two_m2) + k)
        )
        total += Fraction((-1) ** k, denom)
    if total == 0:
        return 0.0
    sign = 1.0 if total > 0 else -1.0
    return sign * math.sqrt(float(norm * total * total))


def cgc(j1: IrrepLabel, m1: int, j2: IrrepLabel, m2: int,
        J: IrrepLabel, M: int) -> float:
    """Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>.

    m arguments are doubled weights for SU(2) and ignored (0) for Z_N, where
    the coefficient is 1 when J = j1 + j2 mod N and 0 otherwise.
    """
    kinds = {j1.kind, j2.kind, J.kind}
    if len(kinds) != 1:
        raise ValueError("mixed group kinds in CGC")
    if j1.kind == ZN:
        if J.charge == (j1.charge + j2.charge) % j1.modulus:
            return 1.0
        raise ValueError("J outside the Clebsch-Gordan series of j1 x j2")
    return _cgc_doubled(j1.two_j, m1, j2.two_j, m2, J.two_j, M)


@dataclass(frozen=True)
class RepSpec:
    """An ordered direct sum of irreps, optionally conjugated by a fixed
    intertwiner unitary applied after the block-diagonal canonical form."""

    kind: str
    blocks: tuple  # tuple of (IrrepLabel, multiplicity)
    intertwiner: np.ndarray | None = None

    def __post_init__(self):
        for lab, mult in self.blocks:
            if lab.kind != self.kind:
                raise ValueError("block irrep kind mismatch")
            if mult <= 0:
                raise ValueError("multiplicities must be positive")
        if self.intertwiner is not None:
            Q = np.asarray(self.intertwiner, dtype=complex)
            if Q.shape != (self.dim, self.dim):
                raise ValueError("intertwiner shape mismatch")
            if np.linalg.norm(Q @ Q.conj().T - np.eye(self.dim)) > 1e-12:
                raise ValueError("intertwiner is not unitary to 1e-12")
            object.__setattr__(self, "intertwiner", Q)

    @staticmethod
    def su2_spins(two_js, intertwiner=None) -> "RepSpec":
        return RepSpec(SU2, tuple((IrrepLabel.su2(t), 1) for t in two_js),
                       intertwiner=intertwiner)

    @staticmethod
    def zn_charges(charges, modulus: int, intertwiner=None) -> "RepSpec":
        return RepSpec(ZN, tuple((IrrepLabel.zn(c, modulus), 1) for c in charges),
                       intertwiner=intertwiner)

    @property
    def dim(self) -> int:
        return sum(lab.dim * mult for lab, mult in self.blocks)

    @property
    def modulus(self) -> int:
        if self.kind != ZN:
            raise ValueError("modulus only defined for Z_N reps")
        return self.blocks[0][0].modulus

    def irrep_blocks(self):
        """Yield (IrrepLabel, block_index, offset) for each irrep copy."""
        off = 0
        idx = 0
        for lab, mult in self.blocks:
            for _ in range(mult):
                yield lab, idx, off
                idx += 1
                off += lab.dim


def rep_matrix(R: RepSpec, g: GroupElement) -> np.ndarray:
    """Unitary representation matrix: block-diagonal canonical form,
    conjugated by the intertwiner if present."""
    if R.kind != g.kind:
        raise ValueError("group kind mismatch")
    blocks = []
    for lab, _, _ in R.irrep_blocks():
        blocks.append(wigner_D(lab, g))
    U = _block_diag(blocks)
    if R.intertwiner is not None:
        U = R.intertwiner @ U @ R.intertwiner.conj().T
    return U


def _block_diag(blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    off = 0
    for b in blocks:
        d = b.shape[0]
        out[off:off + d, off:off + d] = b
        off += d
    return out


def _spin_matrices(two_j: int):
    """(Jx, Jy, Jz) for a single spin-j block, descending-weight basis."""
    j = two_j / 2.0
    dim = two_j + 1
    ms = [j - i for i in range(dim)]
    Jz = np.diag(ms).astype(complex)
    Jp = np.zeros((dim, dim), dtype=complex)
    for i in range(1, dim):
        m = ms[i]
        # J+ |j,m> = sqrt((j-m)(j+m+1)) |j,m+1>; raising moves up one row.
        Jp[i - 1, i] = math.sqrt((j - m) * (j + m + 1))
    Jm = Jp.conj().T
    Jx = (Jp + Jm) / 2
    Jy = (Jp - Jm) / 2j
    return Jx, Jy, Jz


def generators(R: RepSpec) -> list[np.ndarray]:
    """SU(2): (Jx, Jy, Jz); Z_N: the integer charge operator."""
    if R.kind == SU2:
        gens = [[], [], []]
        for lab, _, _ in R.irrep_blocks():
            for i, Jc in enumerate(_spin_matrices(lab.two_j)):
                gens[i].append(Jc)
        out = [_block_diag(parts) for parts in gens]
    else:
        diag = []
        for lab, _, _ in R.irrep_blocks():
            diag.append(np.array([[float(lab.charge)]], dtype=complex))
        out = [_block_diag(diag)]
    if R.intertwiner is not None:
        out = [R.intertwiner @ J @ R.intertwiner.conj().T for J in out]
    return out


@dataclass(frozen=True)
class HaarQuadrature:
    """Nodes and weights integrating matrix-coefficient products exactly.

    Exact for products f * conj(h) of matrix coefficients of irreps up to the
    bandlimit (doubled spin two_j for SU(2); always exact for Z_N).
    """

    kind: str
    nodes: tuple  # tuple of (GroupElement, float weight)
    bandlimit: int

    def integrate(self, f) -> complex:
        return sum(w * f(g) for g, w in self.nodes)


def haar_quadrature(kind: str, bandlimit: int, modulus: int = 0) -> HaarQuadrature:
    """SU(2): uniform alpha, gamma on [0, 4 pi) times Gauss-Legendre in
    cos(beta).  Z_N: the exact uniform sum over all N elements."""
    if kind == ZN:
        if modulus <= 0:
            raise ValueError("Z_N quadrature requires a modulus")
        nodes = tuple(
            (GroupElement.zn(k, modulus), 1.0 / modulus) for k in range(modulus)
        )
        return HaarQuadrature(ZN, nodes, bandlimit)
    two_b = max(int(bandlimit), 0)
    n_ang = 2 * two_b + 2
    n_beta = two_b + 1
    xs, ws = np.polynomial.legendre.leggauss(n_beta)
    nodes = []
    for ia in range(n_ang):
        alpha = 4.0 * math.pi * ia / n_ang
        for x, wb in zip(xs, ws):
            beta = math.acos(float(np.clip(x, -1.0, 1.0)))
            for ic in range(n_ang):
                gamma = 4.0 * math.pi * ic / n_ang
                w = (wb / 2.0) / (n_ang * n_ang)
                nodes.append((GroupElement.su2(alpha, beta, gamma), w))
    return HaarQuadrature(SU2, tuple(nodes), two_b)


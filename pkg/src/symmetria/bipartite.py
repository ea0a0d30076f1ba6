"""Globally symmetric bipartite superoperators: the invariant basis built
from dual pairs of local process modes, diagram classification, and the
complete two-qubit catalogs (injection region, relational region, extremal
processes, Heisenberg unitary).

Every globally symmetric process on A (x) B decomposes over elements

    chi_theta = sum_k (-1)^(lam-k) Phi^lam_{A,k} (x) Phi^lam_{B,-k}

(one per pair of local diagrams carrying mutually dual irreps; for Z_N the
pairing is Phi^lam (x) Phi^{-lam}).  Each chi_theta is invariant under the
diagonal group action and <chi, chi> = dim(lam).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .groups import SU2, ZN, GroupElement, RepSpec
from .linalg_core import (Superoperator, apply, check_cptp, hs_inner,
                          unitary_channel, vec)
from .process_modes import (Diagram, ProcessModeBasis, build_canonical_modes,
                            superop_group_action)

LOCAL = "local"
INJECTION = "injection"
RELATIONAL = "relational"


@dataclass(frozen=True)
class BipartiteDiagram:
    """A pair of local diagrams carrying mutually dual irreps."""

    diag_a: Diagram
    diag_b: Diagram

    def __post_init__(self):
        la, lb = self.diag_a.lam, self.diag_b.lam
        if la.dual() != lb:
            raise ValueError("B-side irrep must be dual to the A-side irrep")

    def __str__(self):
        return f"{self.diag_a} (x) {self.diag_b}"


def _is_trivial(lam) -> bool:
    return lam.two_j == 0 if lam.kind == SU2 else lam.charge == 0


def classify(theta: BipartiteDiagram) -> str:
    """Local iff the exchanged irrep is trivial; injection iff one output
    state-mode is trivial; relational otherwise."""
    if _is_trivial(theta.diag_a.lam):
        return LOCAL
    a_out_trivial = _is_trivial(theta.diag_a.a_out[0])
    b_out_trivial = _is_trivial(theta.diag_b.a_out[0])
    if a_out_trivial or b_out_trivial:
        return INJECTION
    return RELATIONAL


@dataclass(frozen=True)
class SymmetricElement:
    diagram: BipartiteDiagram
    op: Superoperator  # chi_theta, norm sqrt(dim lam)


@dataclass(frozen=True)
class SymmetricBasis:
    basis_a: ProcessModeBasis
    basis_b: ProcessModeBasis
    elements: tuple  # of SymmetricElement

    def element(self, theta: BipartiteDiagram) -> SymmetricElement:
        for e in self.elements:
            if e.diagram == theta:
                return e
        raise KeyError(f"no symmetric basis element for {theta}")


def _chi(basis_a: ProcessModeBasis, basis_b: ProcessModeBasis,
         theta: BipartiteDiagram) -> Superoperator:
    fam_a = basis_a.family(theta.diag_a)
    fam_b = {m.k: m for m in basis_b.family(theta.diag_b)}
    kind = theta.diag_a.lam.kind
    acc = None
    for ma in fam_a:
        if kind == SU2:
            sign = (-1.0) ** ((theta.diag_a.lam.two_j - ma.k) // 2)
            mb = fam_b[-ma.k]
        else:
            sign = 1.0
            mb = fam_b[ma.k]
        term = sign * ma.op.tensor(mb.op)
        acc = term if acc is None else acc + term
    return acc


def build_symmetric_basis(rep_a_in: RepSpec, rep_a_out: RepSpec,
                          rep_b_in: RepSpec, rep_b_out: RepSpec) -> SymmetricBasis:
    """All invariant basis elements chi_theta for T(AB, A'B')."""
    kinds = {rep_a_in.kind, rep_a_out.kind, rep_b_in.kind, rep_b_out.kind}
    if len(kinds) != 1:
        raise ValueError("all four reps must share the group kind")
    basis_a = build_canonical_modes(rep_a_in, rep_a_out)
    basis_b = build_canonical_modes(rep_b_in, rep_b_out)
    diags_b = basis_b.diagrams()
    elements = []
    for da in basis_a.diagrams():
        dual = da.lam.dual()
        for db in diags_b:
            if db.lam != dual:
                continue
            theta = BipartiteDiagram(da, db)
            elements.append(SymmetricElement(theta, _chi(basis_a, basis_b, theta)))
    return SymmetricBasis(basis_a, basis_b, tuple(elements))


@dataclass(frozen=True)
class SymmetricCoefficients:
    basis: SymmetricBasis
    values: dict  # BipartiteDiagram -> complex
    residual: float

    def reconstruct(self) -> Superoperator:
        el = self.basis.elements[0].op
        out = Superoperator.zero(el.dim_in, el.dim_out)
        for e in self.basis.elements:
            out = out + self.values[e.diagram] * e.op
        return out


def decompose_symmetric(S: Superoperator, basis: SymmetricBasis) -> SymmetricCoefficients:
    """Expand S over the invariant basis; the residual is the norm of the
    non-invariant part of S."""
    values = {}
    for e in basis.elements:
        values[e.diagram] = hs_inner(e.op, S) / hs_inner(e.op, e.op)
    out = SymmetricCoefficients(basis, values, 0.0)
    residual = (S - out.reconstruct()).norm()
    return SymmetricCoefficients(basis, values, float(residual))


def twirl_rank(basis: SymmetricBasis, tol: float = 1e-8) -> int:
    """Rank of the invariant subspace, computed from the basis Gram matrix."""
    V = np.array([vec(e.op.choi) for e in basis.elements])
    G = V.conj() @ V.T
    return int(np.linalg.matrix_rank(G, tol=tol))


# ---------------------------------------------------------------------------
# two-qubit catalogs
# ---------------------------------------------------------------------------

_QUBIT = RepSpec.su2_spins([1])

_SIG = [
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
]
_ID2 = np.eye(2, dtype=complex)


def state_from_bloch(a, b, T) -> np.ndarray:
    """Two-qubit state 1/4 (1 + a.sigma (x) 1 + 1 (x) b.sigma + T_ij s_i s_j)."""
    a, b, T = np.asarray(a, float), np.asarray(b, float), np.asarray(T, float)
    rho = np.kron(_ID2, _ID2).astype(complex)
    for i in range(3):
        rho += a[i] * np.kron(_SIG[i], _ID2)
        rho += b[i] * np.kron(_ID2, _SIG[i])
        for j in range(3):
            rho += T[i, j] * np.kron(_SIG[i], _SIG[j])
    return rho / 4.0


def bloch_of_state(rho: np.ndarray):
    """Inverse of state_from_bloch: (a, b, T)."""
    a = np.array([np.trace(rho @ np.kron(s, _ID2)).real for s in _SIG])
    b = np.array([np.trace(rho @ np.kron(_ID2, s)).real for s in _SIG])
    T = np.array(
        [
            [np.trace(rho @ np.kron(si, sj)).real for sj in _SIG]
            for si in _SIG
        ]
    )
    return a, b, T


def _two_qubit_basis() -> SymmetricBasis:
    return build_symmetric_basis(_QUBIT, _QUBIT, _QUBIT, _QUBIT)


def _diagram_key(theta: BipartiteDiagram):
    da, db = theta.diag_a, theta.diag_b
    return (
        da.a_in[0].two_j, da.a_out[0].two_j, da.lam.two_j,
        db.a_in[0].two_j, db.a_out[0].two_j,
    )


# Named two-qubit diagrams, keyed by halved state-mode/irrep labels
# (aA_in, aA_out, lam, aB_in, aB_out) in doubled-j units.
_THETA_KEYS = {
    "theta1": (2, 2, 0, 0, 0),   # [(1,1) ->0-> (0,0)]: keeps the A Bloch vector
    "theta2": (0, 2, 2, 2, 0),   # [(0,1) ->1-> (1,0)]: injects b into A
    "theta3": (2, 2, 2, 2, 0),   # [(1,1) ->1-> (1,0)]: injects T into A
    "theta4": (0, 2, 2, 0, 2),
    "theta5": (2, 2, 2, 2, 2),
    "theta6": (2, 2, 2, 0, 2),
    "theta7": (0, 2, 2, 2, 2),
    "theta8": (2, 2, 4, 2, 2),
}

# Scale factors c_theta such that Phi_theta = c_theta * chi_theta reproduces
# the published closed-form actions (Bloch-vector injection law, relational
# R matrices and Bell-state actions).  Calibrated numerically against those
# formulas and frozen here; see the module tests.
_THETA_SCALES = {
    "theta1": 1.0,
    "theta2": 1.0,
    "theta3": 1.0j,
    "theta4": 1.0,
    "theta5": 1.0,
    "theta6": -4.0,
    "theta7": -4.0,
    "theta8": 1.0,
}


class TwoQubitCatalog:
    """Cached two-qubit symmetric basis plus named diagram lookups."""

    def __init__(self):
        self.basis = _two_qubit_basis()
        self.by_key = {}
        for e in self.basis.elements:
            self.by_key[_diagram_key(e.diagram)] = e
        self.named = {
            name: self.by_key[key] for name, key in _THETA_KEYS.items()
        }

    def phi(self, name: str) -> Superoperator:
        """The published-normalisation diagram superoperator Phi_theta."""
        return _THETA_SCALES[name] * self.named[name].op

    @property
    def e0(self) -> Superoperator:
        """The trace-carrying scaffold rho -> tr(rho) 1/4, forced by trace
        preservation."""
        return self.by_key[(0, 0, 0, 0, 0)].op


_CATALOG = None


def two_qubit_catalog() -> TwoQubitCatalog:
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = TwoQubitCatalog()
    return _CATALOG


def injection_channel(x: float, y: float, z: float) -> Superoperator:
    """E = E0 + x Phi_theta1 + y Phi_theta2 + z Phi_theta3: discard-and-
    reprepare with asymmetry injected into A."""
    cat = two_qubit_catalog()
    return (cat.e0 + x * cat.phi("theta1") + y * cat.phi("theta2")
            + z * cat.phi("theta3"))


def injection_bloch_formula(x, y, z, a, b, T):
    """Closed-form output Bloch vector at A:
    a~ = -(x a / sqrt3 + y b + z T_vec / sqrt2), T_vec_k = eps_kij T_ij."""
    a, b, T = np.asarray(a, float), np.asarray(b, float), np.asarray(T, float)
    tvec = np.array(
        [T[1, 2] - T[2, 1], T[2, 0] - T[0, 2], T[0, 1] - T[1, 0]]
    )
    return -(x * a / math.sqrt(3.0) + y * b + z * tvec / math.sqrt(2.0))


def injection_coords(x: float, y: float, z: float):
    """Paraboloid-normal-form coordinates of an injection process."""
    X = (1.0 + math.sqrt(3.0) * x - 3.0 * y) / 2.0
    Y = 1.0 - 3.0 * y
    Z = 3.0 * z / math.sqrt(2.0)
    return X, Y, Z


@dataclass(frozen=True)
class RegionVerdict:
    inside_analytic: bool
    is_cptp: bool
    min_choi_eig: float
    coords: tuple


def injection_region_test(x: float, y: float, z: float,
                          boundary_tol: float = 1e-9) -> RegionVerdict:
    """Membership of (x, y, z) in the injection region: analytic boundary
    (elliptic paraboloid X^2 + Z^2 = Y capped by the plane 2 + X - Y = 0)
    versus the numeric CPTP verdict on the assembled channel."""
    X, Y, Z = injection_coords(x, y, z)
    inside = (X * X + Z * Z <= Y + boundary_tol) and (2.0 + X - Y >= -boundary_tol)
    rep = check_cptp(injection_channel(x, y, z), psd_tol=1e-8, tp_tol=1e-8)
    return RegionVerdict(inside, rep.is_cptp, rep.min_choi_eigenvalue, (X, Y, Z))


def relational_channel(x4: float, x5: float, x6: float, x7: float,
                       x8: float) -> Superoperator:
    """E = E0 + x4 Phi_theta4 + ... + x8 Phi_theta8."""
    cat = two_qubit_catalog()
    out = cat.e0
    for name, c in zip(("theta4", "theta5", "theta6", "theta7", "theta8"),
                       (x4, x5, x6, x7, x8)):
        out = out + c * cat.phi(name)
    return out


def relational_r_matrix(name: str, a, b, T) -> np.ndarray:
    """Published correlation-matrix contribution of one relational diagram:
    Phi_theta(rho) = sum_ij R_ij sigma_i (x) sigma_j."""
    a, b, T = np.asarray(a, float), np.asarray(b, float), np.asarray(T, float)
    eye = np.eye(3)
    if name == "theta4":
        return -eye / 4.0
    if name == "theta5":
        # The published list carries +T^T here, but that map is not on the
        # invariant ray of this diagram and contradicts the published
        # Bell-state actions of E1/E2; the oracle fixes the sign to -T^T.
        return (-T.T + np.trace(T) * eye) / 8.0
    if name == "theta6":
        R = np.zeros((3, 3), dtype=complex)
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    R[i, j] += 1j * math.sqrt(2.0) / 2.0 * _EPS[i, j, k] * a[k]
        return R
    if name == "theta7":
        R = np.zeros((3, 3), dtype=complex)
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    R[i, j] -= 1j * math.sqrt(2.0) / 2.0 * _EPS[i, j, k] * b[k]
        return R
    if name == "theta8":
        return (T.T - 2.0 * T / 3.0 + np.trace(T) * eye) / 8.0
    raise KeyError(name)


_EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS[_i, _j, _k] = 1.0
    _EPS[_i, _k, _j] = -1.0


def swap_invariant_relational(x: float, y: float, z: float) -> Superoperator:
    """The swap-invariant relational family E = E0 + x Phi_theta4
    + y Phi_theta5 + z Phi_theta8."""
    return relational_channel(x, y, 0.0, 0.0, z)


def relational_quartics(x: float, y: float, z: float):
    """Signed defects of the four published boundary surfaces (elliptic cone,
    parabolic cylinder, two planes, hyperbolic cylinder).  The planes and
    hyperbolic cylinder apply only on their stated x-ranges; outside the
    range the defect is reported as nan."""
    q1 = (9 * x + 3 * y + 5 * z - 3) ** 2 \
        - ((5 * z + 21 * y - 12) ** 2 - 108 * (1 - 2 * y) ** 2)
    q2 = (6 * y + 3 * x) ** 2 - (6 * x + 3 + 20 * z)
    q3 = y * y - ((1 - x) / 2) ** 2 if 0 < x <= 1 else float("nan")
    q4 = y * y - ((x + 5 / 3) ** 2 / 4 - 4 / 9) if -1 / 3 <= x <= 0 \
        else float("nan")
    return q1, q2, q3, q4


def relational_region_test(x: float, y: float, z: float) -> RegionVerdict:
    """Swap-invariant relational membership: numeric CPTP verdict (the
    authority) alongside the published quartic surface defects."""
    rep = check_cptp(swap_invariant_relational(x, y, z), psd_tol=1e-8,
                     tp_tol=1e-8)
    return RegionVerdict(rep.is_cptp, rep.is_cptp, rep.min_choi_eigenvalue,
                         relational_quartics(x, y, z))


def singlet_channel() -> Superoperator:
    """E(rho) = |psi-><psi-| tr(rho): the point (1, 0, 0)."""
    return swap_invariant_relational(1.0, 0.0, 0.0)


def extremal_e1() -> Superoperator:
    """E1 = E0 - 1/2 Phi_theta5 + 3/10 Phi_theta8 (unital extremal point)."""
    return swap_invariant_relational(0.0, -0.5, 0.3)


def extremal_e2() -> Superoperator:
    """E2 = E0 + 1/2 Phi_theta5 + 3/10 Phi_theta8 (unital extremal point)."""
    return swap_invariant_relational(0.0, 0.5, 0.3)


def bell_states():
    """phi+, phi-, psi+, psi- density matrices."""
    v = {
        "phi+": np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2),
        "phi-": np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2),
        "psi+": np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2),
        "psi-": np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2),
    }
    return {k: np.outer(u, u.conj()) for k, u in v.items()}


def heisenberg_unitary(t: float) -> Superoperator:
    """Conjugation by V(t) = exp(it (sx sx + sy sy + sz sz)): the only
    nontrivial symmetric two-qubit unitary family."""
    H = sum(np.kron(s, s) for s in _SIG)
    return unitary_channel(expm(1j * t * H))


def diagonal_action(S: Superoperator, g: GroupElement,
                    rep_a: RepSpec = _QUBIT, rep_b: RepSpec = _QUBIT) -> Superoperator:
    """The diagonal (global) group action U_A(g) (x) U_B(g) on a bipartite
    superoperator with equal input and output reps."""
    from .groups import rep_matrix

    U = np.kron(rep_matrix(rep_a, g), rep_matrix(rep_b, g))
    A = np.kron(U, U.conj())
    d = rep_a.dim * rep_b.dim
    return Superoperator.from_transfer(A @ S.transfer @ A.conj().T, d, d)

"""Irreducible tensor operator bases: covariance, orthonormality, phases."""

import numpy as np
import pytest

from symmetria.groups import (GroupElement, IrrepLabel, RepSpec,
                              haar_quadrature, random_su2, rep_matrix,
                              wigner_D)
from symmetria.ito import build_itos, state_mode_project

RNG = np.random.default_rng(17)

REPS = [
    RepSpec.su2_spins([1]),
    RepSpec.su2_spins([2]),
    RepSpec.su2_spins([3]),
    RepSpec.su2_spins([0, 2]),
    RepSpec.su2_spins([1, 1]),
]


def _covariance_defect(basis, g):
    """Column-form law: U T_k U^dag = sum_j D(g)_{jk} T_j, per family."""
    rep = basis.rep
    U = rep_matrix(rep, g)
    worst = 0.0
    for (lam, mult), fam in basis.families():
        D = wigner_D(lam, g)
        mats = [e.matrix for e in fam]
        for c, Tk in enumerate(mats):
            lhs = U @ Tk @ U.conj().T
            rhs = sum(D[r, c] * mats[r] for r in range(len(mats)))
            worst = max(worst, np.linalg.norm(lhs - rhs))
    return worst


@pytest.mark.parametrize("rep", REPS, ids=lambda r: str([b[0].two_j for b in r.blocks]))
def test_ito_covariance_random_rotations(rep):
    basis = build_itos(rep)
    rng = np.random.default_rng(4)
    for _ in range(10):
        assert _covariance_defect(basis, random_su2(rng)) < 1e-10


def test_ito_covariance_at_quadrature_nodes():
    rep = RepSpec.su2_spins([1, 2])
    basis = build_itos(rep)
    quad = haar_quadrature("su2", 2)
    for g, _w in quad.nodes:
        assert _covariance_defect(basis, g) < 1e-10


@pytest.mark.parametrize("rep", REPS, ids=lambda r: str([b[0].two_j for b in r.blocks]))
def test_ito_orthonormal_complete(rep):
    basis = build_itos(rep)
    V = np.array([e.matrix.reshape(-1) for e in basis.elements])
    G = V.conj() @ V.T
    assert V.shape[0] == rep.dim ** 2
    assert np.linalg.norm(G - np.eye(rep.dim ** 2)) < 1e-12


def test_ito_phase_convention_highest_weight():
    # first nonzero entry of the highest-k element of each family is real > 0
    basis = build_itos(RepSpec.su2_spins([1, 2]))
    for (lam, mult), fam in basis.families():
        top = fam[0].matrix.reshape(-1)
        first = top[np.flatnonzero(np.abs(top) > 1e-12)[0]]
        assert abs(first.imag) < 1e-12 and first.real > 0


def test_zn_itos_are_charge_graded():
    N = 5
    rep = RepSpec.zn_charges([0, 1, 3], N)
    basis = build_itos(rep)
    g = GroupElement.zn(1, N)
    U = rep_matrix(rep, g)
    for e in basis.elements:
        lhs = U @ e.matrix @ U.conj().T
        phase = np.exp(2j * np.pi * e.lam.charge / N)
        assert np.linalg.norm(lhs - phase * e.matrix) < 1e-12


def test_state_mode_project_resolves_identity():
    rep = RepSpec.su2_spins([1, 1])
    basis = build_itos(rep)
    rng = np.random.default_rng(1)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    total = np.zeros_like(A)
    for lam in basis.lams():
        total = total + state_mode_project(A, basis, lam)
    assert np.linalg.norm(total - A) < 1e-12

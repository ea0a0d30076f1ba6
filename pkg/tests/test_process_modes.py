"""Process-mode bases: covariance, decomposition, twirl, isotypic parts."""

import numpy as np
import pytest

from symmetria.groups import (GroupElement, IrrepLabel, RepSpec,
                              haar_quadrature, random_su2, wigner_D)
from symmetria.linalg_core import (Superoperator, check_cptp, hs_inner,
                                   random_cptp)
from symmetria.process_modes import (build_canonical_modes, decompose,
                                     is_symmetric, project_isotypic,
                                     project_isotypic_basis,
                                     superop_group_action, twirl)

QUBIT = RepSpec.su2_spins([1])
QUBIT_MODES = build_canonical_modes(QUBIT, QUBIT)


def test_modes_orthonormal_complete():
    V = np.array([m.op.choi.reshape(-1) for m in QUBIT_MODES.modes])
    assert V.shape[0] == 16
    assert np.linalg.norm(V.conj() @ V.T - np.eye(16)) < 1e-12


def test_mode_covariance_law():
    # conjugation rotates each diagram family by the lam Wigner matrix
    rng = np.random.default_rng(6)
    for _ in range(10):
        g = random_su2(rng)
        for diagram in QUBIT_MODES.diagrams():
            fam = QUBIT_MODES.family(diagram)
            D = wigner_D(diagram.lam, g)
            mats = [m.op for m in fam]
            for c, m in enumerate(fam):
                lhs = superop_group_action(m.op, g, QUBIT, QUBIT)
                rhs = Superoperator.zero(2, 2)
                for r in range(len(fam)):
                    rhs = rhs + D[r, c] * mats[r]
                assert (lhs - rhs).norm() < 1e-10


def test_decompose_round_trip_random_channels():
    rng = np.random.default_rng(9)
    for _ in range(20):
        S = random_cptp(2, 2, rng)
        coeffs = decompose(S, QUBIT_MODES)
        assert coeffs.residual < 1e-12
        assert (coeffs.reconstruct() - S).norm() < 1e-12


def test_coefficient_rotation_law():
    # decomposing the rotated channel rotates each diagram's coefficient
    # vector by the lam Wigner matrix
    rng = np.random.default_rng(12)
    for _ in range(10):
        S = random_cptp(2, 2, rng)
        g = random_su2(rng)
        rot = superop_group_action(S, g, QUBIT, QUBIT)
        a = decompose(S, QUBIT_MODES)
        b = decompose(rot, QUBIT_MODES)
        for diagram in QUBIT_MODES.diagrams():
            D = wigner_D(diagram.lam, g)
            assert np.linalg.norm(
                b.by_diagram(diagram) - D @ a.by_diagram(diagram)
            ) < 1e-9


def test_amplitude_modulus_is_orbit_invariant():
    rng = np.random.default_rng(13)
    S = random_cptp(2, 2, rng)
    a = decompose(S, QUBIT_MODES)
    for _ in range(20):
        g = random_su2(rng)
        b = decompose(superop_group_action(S, g, QUBIT, QUBIT), QUBIT_MODES)
        for diagram in QUBIT_MODES.diagrams():
            assert abs(np.linalg.norm(b.by_diagram(diagram))
                       - np.linalg.norm(a.by_diagram(diagram))) < 1e-9


def test_twirl_is_projection_onto_symmetric():
    rng = np.random.default_rng(21)
    quad = haar_quadrature("su2", 4)
    S = random_cptp(2, 2, rng)
    T = twirl(S, quad, QUBIT, QUBIT)
    assert is_symmetric(T, QUBIT_MODES)
    T2 = twirl(T, quad, QUBIT, QUBIT)
    assert (T2 - T).norm() < 1e-10
    # twirling preserves CPTP
    assert check_cptp(T).is_cptp


def test_isotypic_quadrature_matches_basis_route():
    rng = np.random.default_rng(22)
    quad = haar_quadrature("su2", 4)
    S = random_cptp(2, 2, rng)
    total = Superoperator.zero(2, 2)
    for two_l in (0, 2, 4):
        lam = IrrepLabel.su2(two_l)
        P1 = project_isotypic(S, lam, quad, QUBIT, QUBIT)
        P2 = project_isotypic_basis(S, lam, QUBIT_MODES)
        assert (P1 - P2).norm() < 1e-10
        total = total + P2
    assert (total - S).norm() < 1e-10


def test_unphysical_diagram_has_no_weight():
    # trace preservation kills the diagram that sends the trace-carrying
    # input mode to a traceless output family through a nontrivial carrier
    rng = np.random.default_rng(30)
    key = None
    for d in QUBIT_MODES.diagrams():
        if (d.a_in[0].two_j == 2 and d.a_out[0].two_j == 0
                and d.lam.two_j == 2):
            key = d
    assert key is not None
    worst = 0.0
    for _ in range(100):
        S = random_cptp(2, 2, rng)
        c = decompose(S, QUBIT_MODES).by_diagram(key)
        worst = max(worst, float(np.linalg.norm(c)))
    assert worst <= 1e-10


def test_zn_modes_decompose_exactly():
    rep = RepSpec.zn_charges([0, 1], 7)
    basis = build_canonical_modes(rep, rep)
    rng = np.random.default_rng(2)
    S = random_cptp(2, 2, rng)
    coeffs = decompose(S, basis)
    assert coeffs.residual < 1e-12
    quad = haar_quadrature("zn", 0, modulus=7)
    T = twirl(S, quad, rep, rep)
    assert is_symmetric(T, basis)

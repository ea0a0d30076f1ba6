"""Wigner matrices, Clebsch-Gordan coefficients, and Haar quadrature."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symmetria.groups import (GroupElement, IrrepLabel, RepSpec, cgc, compose,
                              dual_sign_permutation, generators,
                              haar_quadrature, inverse, mode_matrix,
                              random_su2, rep_matrix, su2_from_matrix,
                              su2_matrix, wigner_D)

RNG = np.random.default_rng(8)


@given(st.integers(min_value=0, max_value=4),
       st.integers(min_value=0, max_value=2 ** 31 - 1))
@settings(max_examples=40, deadline=None)
def test_wigner_homomorphism_and_unitarity(two_j, seed):
    rng = np.random.default_rng(seed)
    j = IrrepLabel.su2(two_j)
    g1, g2 = random_su2(rng), random_su2(rng)
    D1, D2 = wigner_D(j, g1), wigner_D(j, g2)
    D12 = wigner_D(j, compose(g1, g2))
    assert np.linalg.norm(D1 @ D2 - D12) < 1e-10
    assert np.linalg.norm(D1 @ D1.conj().T - np.eye(two_j + 1)) < 1e-12
    assert np.linalg.norm(
        wigner_D(j, inverse(g1)) - D1.conj().T
    ) < 1e-10


def test_su2_euler_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = random_su2(rng)
        U = su2_matrix(g)
        g2 = su2_from_matrix(U)
        assert np.linalg.norm(su2_matrix(g2) - U) < 1e-10


def test_cgc_orthogonality_exact():
    # sum over (m1, m2) of <j1 m1 j2 m2|J M><j1 m1 j2 m2|J' M'> = delta
    two_j1, two_j2 = 2, 1
    Js = range(abs(two_j1 - two_j2), two_j1 + two_j2 + 2, 2)
    j1 = IrrepLabel.su2(two_j1)
    j2 = IrrepLabel.su2(two_j2)
    pairs = [(m1, m2) for m1 in j1.components() for m2 in j2.components()]
    cols = []
    for two_J in Js:
        J = IrrepLabel.su2(two_J)
        for two_M in J.components():
            cols.append(np.array(
                [cgc(j1, m1, j2, m2, J, two_M) for (m1, m2) in pairs]
            ))
    G = np.array([[c1 @ c2 for c2 in cols] for c1 in cols])
    assert np.linalg.norm(G - np.eye(len(cols))) < 1e-14


def test_cgc_couples_to_total_weight():
    j1 = IrrepLabel.su2(3)
    j2 = IrrepLabel.su2(2)
    J = IrrepLabel.su2(3)
    for m1 in j1.components():
        for m2 in j2.components():
            for M in J.components():
                if m1 + m2 != M:
                    assert cgc(j1, m1, j2, m2, J, M) == 0.0


def test_dual_sign_permutation_intertwines_conjugate():
    rng = np.random.default_rng(11)
    for two_j in (1, 2, 3):
        j = IrrepLabel.su2(two_j)
        C = dual_sign_permutation(j)
        for _ in range(5):
            g = random_su2(rng)
            D = wigner_D(j, g)
            assert np.linalg.norm(C @ D.conj() @ np.linalg.inv(C) - D) < 1e-10


def test_generators_match_derivative():
    rep = RepSpec.su2_spins([1, 2])
    Jx, Jy, Jz = generators(rep)
    eps = 1e-6
    # D(alpha, 0, 0) = exp(-i alpha Jz), so the derivative at 0 is -i Jz
    g = GroupElement.su2(eps, 0.0, 0.0)
    num = (rep_matrix(rep, g) - np.eye(rep.dim)) / eps
    assert np.linalg.norm(num + 1j * Jz) < 1e-5


def test_haar_quadrature_exactness_su2():
    quad = haar_quadrature("su2", 4)
    # character orthogonality: int chi_j(g) conj(chi_k(g)) dg = delta_jk
    for two_j in range(0, 5):
        for two_k in range(0, 5):
            val = quad.integrate(
                lambda g: np.trace(wigner_D(IrrepLabel.su2(two_j), g))
                * np.conj(np.trace(wigner_D(IrrepLabel.su2(two_k), g)))
            )
            assert abs(val - (1.0 if two_j == two_k else 0.0)) < 1e-10


def test_haar_quadrature_zn():
    quad = haar_quadrature("zn", 0, modulus=5)
    for c in range(5):
        val = quad.integrate(
            lambda g: np.exp(2j * np.pi * c * g.g / 5)
        )
        assert abs(val - (1.0 if c == 0 else 0.0)) < 1e-14


def test_mode_matrix_is_transpose_of_wigner():
    rng = np.random.default_rng(2)
    j = IrrepLabel.su2(2)
    g = random_su2(rng)
    assert np.linalg.norm(mode_matrix(j, g) - wigner_D(j, g).T) < 1e-12


def test_zn_rep_matrix_phases():
    rep = RepSpec.zn_charges([0, 1, 3], 4)
    g = GroupElement.zn(1, 4)
    w = np.exp(2j * np.pi / 4)
    expect = np.diag([1.0, w, w ** 3])
    assert np.linalg.norm(rep_matrix(rep, g) - expect) < 1e-14

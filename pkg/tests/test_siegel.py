import numpy as np
import pytest

from curvetheta.siegel import (
    SiegelPoint,
    SymplecticMatrix,
    laplacian_coeffs,
    metric_det_residual,
    metric_invariance_residual,
    metric_matrix,
    modular_act,
    random_siegel_point,
    random_symplectic,
)
from curvetheta.symindex import build_table, sym_power


def test_siegel_point_validation():
    with pytest.raises(ValueError):
        SiegelPoint(np.array([[1j, 0.5], [0.0, 1j]]))  # not symmetric
    with pytest.raises(ValueError):
        SiegelPoint(np.array([[1.0 - 1j]]))  # Im not positive
    Z = SiegelPoint(np.array([[0.3 + 1.0j]]))
    assert Z.g == 1


def test_symplectic_validation():
    g = 2
    I = np.eye(g, dtype=int)
    with pytest.raises(ValueError):
        SymplecticMatrix(I, I, I, I)
    G = SymplecticMatrix.inversion(g)
    got = G.inv() @ G
    assert np.array_equal(got.matrix(), SymplecticMatrix.identity(g).matrix())


def test_modular_act_identity_and_fixed_point():
    Z = SiegelPoint(np.array([[0.25 + 1.5j]]))
    G = SymplecticMatrix.identity(1)
    assert np.allclose(modular_act(G, Z).Z, Z.Z)
    # inversion fixes i in genus 1
    S = SymplecticMatrix.inversion(1)
    Zi = SiegelPoint(np.array([[1j]]))
    assert np.allclose(modular_act(S, Zi).Z, 1j)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_modular_act_group_law_and_closure(g):
    rng = np.random.default_rng(7 + g)
    for _ in range(5):
        Z = random_siegel_point(g, rng)
        G1 = random_symplectic(g, rng)
        G2 = random_symplectic(g, rng)
        lhs = modular_act(G1 @ G2, Z).Z
        rhs = modular_act(G1, modular_act(G2, Z)).Z
        assert np.linalg.norm(lhs - rhs) < 1e-10 * max(1.0, np.linalg.norm(rhs))
        W = modular_act(G1, Z)  # construction asserts symmetry + Im > 0
        assert np.all(np.linalg.eigvalsh(W.Y) > 0)


def test_metric_matrix_g2_identity():
    got = metric_matrix(np.eye(2))
    assert np.allclose(got, np.diag([1.0, 1.0, 2.0]))
    assert np.isclose(np.linalg.det(got), 2.0)  # 2^(M-g) / det(Y)^(g+1)


def test_metric_matrix_diagonal_Y():
    lam = np.array([0.7, 1.9, 3.1])
    det = np.linalg.det(metric_matrix(np.diag(lam)))
    M, g = 6, 3
    assert np.isclose(det, 2.0 ** (M - g) * np.prod(lam) ** -(g + 1))


@pytest.mark.parametrize("g", [2, 3, 4, 5])
def test_metric_det_residual_random(g):
    rng = np.random.default_rng(21 + g)
    for _ in range(5):
        W = rng.normal(size=(g, g))
        Y = W @ W.T + g * np.eye(g)
        assert metric_det_residual(Y) < 1e-10


def test_metric_matrix_positive_definite():
    rng = np.random.default_rng(3)
    for g in (2, 3, 4):
        W = rng.normal(size=(g, g))
        Y = W @ W.T + np.eye(g)
        gs = metric_matrix(Y)
        assert np.allclose(gs, gs.T)
        np.linalg.cholesky(gs)  # raises if not positive definite


@pytest.mark.parametrize("g", [1, 2, 3])
def test_metric_invariance(g):
    rng = np.random.default_rng(11 * g + 1)
    for _ in range(4):
        Z = random_siegel_point(g, rng)
        G = random_symplectic(g, rng)
        dZ = rng.normal(size=(g, g)) + 1j * rng.normal(size=(g, g))
        dZ = 0.5 * (dZ + dZ.T)
        assert metric_invariance_residual(G, Z, dZ) < 1e-9
    G = SymplecticMatrix.identity(g)
    Z = random_siegel_point(g, rng)
    assert metric_invariance_residual(G, Z, np.zeros((g, g))) == 0.0


def test_laplacian_g1():
    Z = SiegelPoint(np.array([[0.4 + 0.9j]]))
    got = laplacian_coeffs(Z)
    assert np.allclose(got, [[0.9 ** 2]])


def test_laplacian_identity_Y():
    Z = SiegelPoint(1j * np.eye(2) + np.zeros((2, 2)))
    assert np.allclose(laplacian_coeffs(Z), np.diag([1.0, 1.0, 0.5]))


def test_laplacian_matches_sym_power():
    rng = np.random.default_rng(5)
    Z = random_siegel_point(3, rng)
    tab = build_table(3, 2)
    assert np.allclose(laplacian_coeffs(Z), 0.5 * sym_power(Z.Y, 2, tab).real)


def test_metric_inverse_consistency():
    # chi-weighted contraction of g^S with (YY)/2 gives the identity
    rng = np.random.default_rng(17)
    for g in (2, 3):
        tab = build_table(g, 2)
        W = rng.normal(size=(g, g))
        Y = W @ W.T + np.eye(g)
        gs = metric_matrix(Y, tab)
        gs_up = 0.5 * sym_power(Y, 2, tab).real
        # the chi factors built into g^S make this a plain matrix inverse pair
        assert np.linalg.norm(gs @ gs_up - np.eye(tab.size)) < 1e-10


def test_volume_minor_expansion_g2():
    # for g=2, N=M=3 and the single top minor of (tau2^-1 tau2^-1)-type
    # matrices reproduces det g^S
    rng = np.random.default_rng(2)
    W = rng.normal(size=(2, 2))
    Y = W @ W.T + np.eye(2)
    tab = build_table(2, 2)
    chi = np.array(tab.chi, dtype=float)
    P = sym_power(np.linalg.inv(Y), 2, tab).real
    minor = np.linalg.det(P / np.outer(chi, chi))
    assert np.isclose(minor * 2.0 ** 3, np.linalg.det(metric_matrix(Y, tab)))

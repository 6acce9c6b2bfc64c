import numpy as np
import pytest

from curvetheta.siegel import SiegelPoint, SymplecticMatrix, random_siegel_point, random_symplectic
from curvetheta.theta import (
    Characteristic,
    ThetaFunction,
    count_parity,
    enumerate_half_characteristics,
    modular_covariance_residual,
    quasiperiod_residual,
    theta,
    theta_deriv,
)


def brute_theta(z, Z, a, b, box):
    """Box-truncated reference sum, independent of the ellipsoid code path."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    g = Z.shape[0]
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    grids = np.meshgrid(*([np.arange(-box, box + 1)] * g), indexing="ij")
    K = np.stack([gg.ravel() for gg in grids], axis=1) + a
    quad = np.einsum("ij,jk,ik->i", K, Z, K)
    return np.exp(1j * np.pi * quad + 2j * np.pi * K @ (z + b)).sum()


def test_g1_reference_value():
    # sum over k of exp(i pi k^2 i) = sum exp(-pi k^2)
    val = theta([0.0], [[1j]])
    ref = brute_theta([0.0], [[1j]], [0.0], [0.0], 30)
    assert abs(val - ref) < 1e-13
    assert abs(val - 1.0864348112133080) < 1e-12


@pytest.mark.parametrize("g", [1, 2, 3])
def test_matches_box_oracle(g):
    rng = np.random.default_rng(g)
    Z = random_siegel_point(g, rng).Z
    z = rng.normal(size=g) + 1j * 0.2 * rng.normal(size=g)
    a = rng.integers(0, 2, size=g) / 2.0
    b = rng.integers(0, 2, size=g) / 2.0
    val = theta(z, Z, Characteristic(a, b))
    ref = brute_theta(z, Z, a, b, 12)
    assert abs(val - ref) < 1e-11 * max(1.0, abs(ref))


def test_doubling_radius_changes_little():
    rng = np.random.default_rng(5)
    Z = random_siegel_point(2, rng)
    th1 = ThetaFunction(Z, eps=1e-13)
    z = np.array([0.21 + 0.11j, -0.35 + 0.04j])
    v1 = th1.value(z)
    # shrink eps drastically; value must be stable at the 1e-13 level
    th2 = ThetaFunction(Z, eps=1e-20)
    v2 = th2.value(z)
    assert abs(v1 - v2) < 1e-12 * max(1.0, abs(v2))


def test_reduction_identity():
    rng = np.random.default_rng(9)
    for g in (1, 2):
        Z = random_siegel_point(g, rng)
        th = ThetaFunction(Z)
        a = rng.normal(size=g) * 0.4
        b = rng.normal(size=g) * 0.4
        z = rng.normal(size=g) + 1j * 0.1 * rng.normal(size=g)
        lhs = th.value(z, Characteristic(a, b))
        pref = np.exp(1j * np.pi * a @ Z.Z @ a + 2j * np.pi * a @ (z + b))
        rhs = pref * th.value(z + b + Z.Z @ a)
        assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), abs(rhs))


def test_odd_half_characteristic_vanishes_at_zero():
    rng = np.random.default_rng(2)
    for g in (1, 2, 3):
        Z = random_siegel_point(g, rng)
        th = ThetaFunction(Z)
        for c in enumerate_half_characteristics(g):
            if c.parity == -1:
                assert abs(th.value(np.zeros(g), c)) < 1e-11


def test_parity_in_z():
    rng = np.random.default_rng(3)
    for g in (1, 2):
        Z = random_siegel_point(g, rng)
        th = ThetaFunction(Z)
        z = rng.normal(size=g) + 1j * 0.15 * rng.normal(size=g)
        for c in enumerate_half_characteristics(g)[:8]:
            lhs = th.value(-z, c)
            rhs = c.parity * th.value(z, c)
            assert abs(lhs - rhs) < 1e-11 * max(1.0, abs(rhs))


def test_even_gradient_vanishes():
    rng = np.random.default_rng(4)
    Z = random_siegel_point(2, rng)
    th = ThetaFunction(Z)
    for c in enumerate_half_characteristics(2):
        if c.parity == 1:
            assert np.linalg.norm(th.gradient(np.zeros(2), c)) < 1e-11


def test_deriv_matches_finite_difference():
    rng = np.random.default_rng(6)
    Z = random_siegel_point(2, rng)
    th = ThetaFunction(Z)
    z = np.array([0.13 - 0.07j, -0.22 + 0.19j])
    h = 1e-4
    for i in range(2):
        e = np.zeros(2)
        e[i] = 1.0
        fd = (th.value(z + h * e) - th.value(z - h * e)) / (2 * h)
        assert abs(fd - th.value(z, deriv=(i,))) < 1e-7 * max(1.0, abs(fd))
    # second derivative
    fd2 = (th.value(z + h * np.array([1, 0])) - 2 * th.value(z)
           + th.value(z - h * np.array([1, 0]))) / h ** 2
    assert abs(fd2 - th.value(z, deriv=(0, 0))) < 1e-5 * max(1.0, abs(fd2))


def test_heat_equation():
    rng = np.random.default_rng(8)
    Z = random_siegel_point(2, rng)
    th = ThetaFunction(Z)
    z = np.array([0.31 + 0.02j, -0.11 - 0.06j])
    for (j, k) in [(0, 0), (0, 1), (1, 1)]:
        dZ = th.dZ_entry(z, j, k)
        dz2 = th.value(z, deriv=(j, k))
        rel = abs(dZ - dz2 / (2j * np.pi * (1 + (j == k))))
        assert rel < 1e-10 * max(1.0, abs(dZ))


def test_quasiperiodicity():
    rng = np.random.default_rng(11)
    # g=1 pinned case
    r = quasiperiod_residual(Characteristic.zero(1), [0.3 + 0.2j], [[1j]], [1], [0])
    assert r < 1e-11
    for g in (2, 3):
        Z = random_siegel_point(g, rng)
        for _ in range(4):
            bits = rng.integers(0, 2, size=2 * g)
            c = Characteristic.half(bits[:g], bits[g:])
            z = rng.normal(size=g) + 1j * 0.1 * rng.normal(size=g)
            m = rng.integers(-2, 3, size=g)
            n = rng.integers(-2, 3, size=g)
            assert quasiperiod_residual(c, z, Z, m, n) < 1e-10
    # m = n = 0 gives zero residual
    assert quasiperiod_residual(Characteristic.zero(2), np.zeros(2),
                                random_siegel_point(2, rng), [0, 0], [0, 0]) < 1e-15


def test_characteristic_integer_shift():
    # a -> a + p shifts theta by a unit phase exp(2 pi i p . (z + b))-type factor;
    # here assert the exact relation theta[a+p;b] = theta[a;b]
    rng = np.random.default_rng(12)
    Z = random_siegel_point(2, rng)
    th = ThetaFunction(Z)
    a = np.array([0.5, 0.0])
    b = np.array([0.0, 0.5])
    z = rng.normal(size=2) + 1j * 0.1 * rng.normal(size=2)
    p = np.array([1.0, -2.0])
    lhs = th.value(z, Characteristic(a + p, b))
    rhs = np.exp(2j * np.pi * p @ b) * th.value(z, Characteristic(a, b))
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


def test_modular_covariance():
    rng = np.random.default_rng(13)
    # identity: exact
    Z = random_siegel_point(2, rng)
    c = Characteristic.half([1, 0], [0, 1])
    m, p8 = modular_covariance_residual(SymplecticMatrix.identity(2), c,
                                        0.1 * rng.normal(size=2), Z)
    assert m < 1e-14 and p8 < 1e-12
    # g=1 translation Z -> Z+1
    T = SymplecticMatrix.translation(np.array([[1]]))
    Z1 = SiegelPoint(np.array([[0.3 + 0.8j]]))
    for bits in [(0, 0), (1, 0), (0, 1), (1, 1)]:
        c = Characteristic.half([bits[0]], [bits[1]])
        m, p8 = modular_covariance_residual(T, c, [0.2 + 0.1j], Z1)
        assert m < 1e-10 and p8 < 1e-8
    # g=1 inversion
    S = SymplecticMatrix.inversion(1)
    m, p8 = modular_covariance_residual(S, Characteristic.zero(1), [0.05 + 0.02j], Z1)
    assert m < 1e-10 and p8 < 1e-8
    # g=2 random words
    for _ in range(4):
        G = random_symplectic(2, rng)
        Z = random_siegel_point(2, rng)
        bits = rng.integers(0, 2, size=4)
        c = Characteristic.half(bits[:2], bits[2:])
        z = 0.2 * rng.normal(size=2) + 0.05j * rng.normal(size=2)
        m, p8 = modular_covariance_residual(G, c, z, Z)
        assert m < 1e-8 and p8 < 1e-8


def test_half_characteristic_counts():
    for g in (1, 2, 3):
        chars = enumerate_half_characteristics(g)
        assert len(chars) == 4 ** g
        evens, odds = count_parity(chars)
        assert evens == 2 ** (g - 1) * (2 ** g + 1)
        assert odds == 2 ** (g - 1) * (2 ** g - 1)
    # the single odd one in genus 1 is (1/2, 1/2)
    odd = [c for c in enumerate_half_characteristics(1) if c.parity == -1]
    assert odd == [Characteristic.half([1], [1])]


def test_deriv_order_cap_and_batch():
    Z = SiegelPoint(np.array([[1j]]))
    th = ThetaFunction(Z)
    with pytest.raises(ValueError):
        th.value([0.0], deriv=(0,) * 5)
    zs = np.array([[0.1], [0.2], [0.3]], dtype=complex)
    batch = th.many(zs)
    single = [th.value(z) for z in zs]
    assert np.allclose(batch, single)


def test_extended_precision_mode_agrees():
    Z = SiegelPoint(np.array([[0.2 + 1.1j]]))
    z = [0.17 + 0.05j]
    d = ThetaFunction(Z, precision="double").value(z)
    e = ThetaFunction(Z, precision="extended", dps=30).value(z)
    assert abs(d - e) < 1e-12 * max(1.0, abs(d))

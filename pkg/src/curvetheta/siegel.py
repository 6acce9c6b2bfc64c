"""Siegel upper half-space: points, symplectic action, invariant metric.

A point is a symmetric complex g x g matrix with positive definite
imaginary part. The invariant metric ds^2 = Tr(Y^-1 dZ Y^-1 dZbar) is
exposed through its coefficient matrix over the M = g(g+1)/2 independent
entries of Z, in the diagonal-first pair ordering of `symindex`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symindex import Convention, MultiIndexTable, build_table, sym_power

__all__ = [
    "SiegelPoint",
    "SymplecticMatrix",
    "modular_act",
    "random_symplectic",
    "metric_matrix",
    "metric_det_residual",
    "metric_invariance_residual",
    "laplacian_coeffs",
    "random_siegel_point",
]

_SYM_TOL = 1e-12


@dataclass(frozen=True)
class SiegelPoint:
    """Validated point of the Siegel upper half-space."""

    Z: np.ndarray
    cholesky: np.ndarray  # lower factor of Y = Im Z

    def __init__(self, Z, sym_tol: float = _SYM_TOL):
        Z = np.asarray(Z, dtype=np.complex128)
        if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
            raise ValueError("Z must be square")
        scale = max(np.linalg.norm(Z), 1e-300)
        if np.linalg.norm(Z - Z.T) > sym_tol * scale:
            raise ValueError(
                f"Z not symmetric: residual {np.linalg.norm(Z - Z.T) / scale:.3e}")
        Z = 0.5 * (Z + Z.T)
        try:
            L = np.linalg.cholesky(Z.imag)
        except np.linalg.LinAlgError as exc:
            raise ValueError("Im Z is not positive definite") from exc
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "cholesky", L)

    @property
    def g(self) -> int:
        return self.Z.shape[0]

    @property
    def Y(self) -> np.ndarray:
        return self.Z.imag

    @property
    def X(self) -> np.ndarray:
        return self.Z.real


@dataclass(frozen=True)
class SymplecticMatrix:
    """Integer block matrix (A B; C D) with A^T C, B^T D symmetric and A^T D - C^T B = I."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __init__(self, A, B, C, D):
        A, B, C, D = (np.asarray(m, dtype=np.int64) for m in (A, B, C, D))
        g = A.shape[0]
        for m in (A, B, C, D):
            if m.shape != (g, g):
                raise ValueError("blocks must be square of equal size")
        if not (np.array_equal(A.T @ C, C.T @ A)
                and np.array_equal(B.T @ D, D.T @ B)
                and np.array_equal(A.T @ D - C.T @ B, np.eye(g, dtype=np.int64))):
            raise ValueError("blocks do not satisfy the symplectic relations")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def g(self) -> int:
        return self.A.shape[0]

    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        m = self.matrix() @ other.matrix()
        g = self.g
        return SymplecticMatrix(m[:g, :g], m[:g, g:], m[g:, :g], m[g:, g:])

    def inv(self) -> "SymplecticMatrix":
        # inverse of a symplectic matrix: (D^T -B^T; -C^T A^T)
        return SymplecticMatrix(self.D.T, -self.B.T, -self.C.T, self.A.T)

    @staticmethod
    def identity(g: int) -> "SymplecticMatrix":
        I, O = np.eye(g, dtype=np.int64), np.zeros((g, g), dtype=np.int64)
        return SymplecticMatrix(I, O, O, I)

    @staticmethod
    def inversion(g: int) -> "SymplecticMatrix":
        I, O = np.eye(g, dtype=np.int64), np.zeros((g, g), dtype=np.int64)
        return SymplecticMatrix(O, -I, I, O)

    @staticmethod
    def translation(S) -> "SymplecticMatrix":
        S = np.asarray(S, dtype=np.int64)
        if not np.array_equal(S, S.T):
            raise ValueError("translation block must be symmetric")
        g = S.shape[0]
        I, O = np.eye(g, dtype=np.int64), np.zeros((g, g), dtype=np.int64)
        return SymplecticMatrix(I, S, O, I)

    @staticmethod
    def gl_part(U) -> "SymplecticMatrix":
        U = np.asarray(U, dtype=np.int64)
        if round(abs(np.linalg.det(U.astype(float)))) != 1:
            raise ValueError("GL block must be unimodular")
        g = U.shape[0]
        O = np.zeros((g, g), dtype=np.int64)
        Uinv = np.round(np.linalg.inv(U.astype(float))).astype(np.int64)
        return SymplecticMatrix(U, O, O, Uinv.T)


def modular_act(G: SymplecticMatrix, Z: SiegelPoint) -> SiegelPoint:
    """(A Z + B)(C Z + D)^-1, staying in the upper half-space."""
    num = G.A @ Z.Z + G.B
    den = G.C @ Z.Z + G.D
    Zp = num @ np.linalg.inv(den)
    return SiegelPoint(Zp, sym_tol=1e-9)


def random_symplectic(g: int, rng, n_factors: int = 6) -> SymplecticMatrix:
    """Random word in the standard generators (translations, inversion, GL)."""
    G = SymplecticMatrix.identity(g)
    for _ in range(n_factors):
        kind = rng.integers(0, 3)
        if kind == 0:
            S = rng.integers(-2, 3, size=(g, g))
            G = G @ SymplecticMatrix.translation(S + S.T)
        elif kind == 1:
            G = G @ SymplecticMatrix.inversion(g)
        else:
            U = np.eye(g, dtype=np.int64)
            if g > 1:
                i, j = rng.choice(g, size=2, replace=False)
                U[i, j] = rng.integers(-2, 3)
            G = G @ SymplecticMatrix.gl_part(U)
    return G


def random_siegel_point(g: int, rng, scale: float = 1.0) -> SiegelPoint:
    X = rng.normal(size=(g, g))
    X = 0.5 * (X + X.T)
    W = rng.normal(size=(g, g))
    Y = W @ W.T + g * np.eye(g)
    return SiegelPoint(X + 1j * scale * Y)


def _pair_table(g: int) -> MultiIndexTable:
    return build_table(g, 2, Convention.PAPER_ORDER)


def metric_matrix(Y: np.ndarray, table: MultiIndexTable | None = None) -> np.ndarray:
    """Coefficients g^S_ij = 2 chi_i^-1 chi_j^-1 (Y^-1 Y^-1)_ij over pair indices."""
    Y = np.asarray(Y, dtype=np.float64)
    g = Y.shape[0]
    tab = table or _pair_table(g)
    Yinv = np.linalg.inv(Y)
    P = sym_power(Yinv, 2, tab).real
    chi = np.array(tab.chi, dtype=np.float64)
    return 2.0 * P / np.outer(chi, chi)


def metric_det_residual(Y: np.ndarray) -> float:
    """Relative gap between det g^S and 2^(M-g) (det Y)^-(g+1)."""
    Y = np.asarray(Y, dtype=np.float64)
    g = Y.shape[0]
    M = g * (g + 1) // 2
    direct = np.linalg.det(metric_matrix(Y))
    closed = 2.0 ** (M - g) / np.linalg.det(Y) ** (g + 1)
    return abs(direct - closed) / max(abs(closed), 1e-300)


def metric_invariance_residual(G: SymplecticMatrix, Z: SiegelPoint, dZ: np.ndarray) -> float:
    """Invariance of Tr(Y^-1 dZ Y^-1 conj(dZ)) under the symplectic action.

    The tangent vector pushes forward as dZ' = (CZ+D)^-T dZ (CZ+D)^-1.
    """
    dZ = np.asarray(dZ, dtype=np.complex128)
    if np.linalg.norm(dZ - dZ.T) > 1e-12 * max(np.linalg.norm(dZ), 1e-300):
        raise ValueError("dZ must be symmetric")

    def _len(Zp: SiegelPoint, dZp: np.ndarray) -> float:
        Yi = np.linalg.inv(Zp.Y)
        return float(np.trace(Yi @ dZp @ Yi @ np.conj(dZp)).real)

    den = G.C @ Z.Z + G.D
    den_inv = np.linalg.inv(den)
    Zp = modular_act(G, Z)
    dZp = den_inv.T @ dZ @ den_inv
    a, b = _len(Zp, dZp), _len(Z, dZ)
    return abs(a - b) / max(abs(b), 1e-300)


def laplacian_coeffs(Z: SiegelPoint, table: MultiIndexTable | None = None) -> np.ndarray:
    """Coefficients (1/2)(YY)_ij of d/dZ_i d/dZbar_j in the invariant Laplacian.

    This is the operator normalization with g^{S,ij} = (YY)_ij / 2; the
    equivalent classical form 4 Tr(Y (Y d/dZbar)^T d/dZ) differs only by
    the bookkeeping of repeated matrix entries.
    """
    tab = table or _pair_table(Z.g)
    return 0.5 * sym_power(Z.Y, 2, tab).real

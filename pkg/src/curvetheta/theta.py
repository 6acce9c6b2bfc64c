"""Riemann theta functions with characteristics.

Values are truncated lattice sums

    theta[a;b](z, Z) = sum_k exp(i pi (k+a)' Z (k+a) + 2 pi i (k+a)'(z+b)),

with the summation region the ellipsoid |T(k + a + Y^-1 Im z)| <= R, T the
upper Cholesky factor of Y = Im Z. R is chosen from the Gaussian tail bound
so that the dropped terms are below the requested absolute tolerance
(relative to the Gaussian peak factor exp(pi Im z' Y^-1 Im z) that scales
the whole sum). Derivatives are term-wise differentiated sums with the
radius enlarged to absorb the polynomial prefactors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from .siegel import SiegelPoint, SymplecticMatrix, modular_act

__all__ = [
    "Characteristic",
    "ThetaFunction",
    "theta",
    "theta_deriv",
    "quasiperiod_residual",
    "modular_covariance_residual",
    "enumerate_half_characteristics",
    "count_parity",
]

_HARD_RADIUS_CAP = 40.0


@dataclass(frozen=True)
class Characteristic:
    """Theta characteristic (a, b); half-integer entries give a spin structure."""

    a: tuple[float, ...]
    b: tuple[float, ...]

    def __init__(self, a, b):
        a = tuple(float(x) for x in np.atleast_1d(a))
        b = tuple(float(x) for x in np.atleast_1d(b))
        if len(a) != len(b):
            raise ValueError("a and b must have equal length")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def g(self) -> int:
        return len(self.a)

    @property
    def is_half(self) -> bool:
        return all(2 * x == round(2 * x) for x in self.a + self.b)

    @property
    def parity(self) -> int:
        """+1 for even, -1 for odd half characteristics."""
        if not self.is_half:
            raise ValueError("parity is defined for half characteristics only")
        e = np.exp(4j * np.pi * np.dot(self.a, self.b))
        return int(round(e.real))

    @staticmethod
    def zero(g: int) -> "Characteristic":
        return Characteristic([0.0] * g, [0.0] * g)

    @staticmethod
    def half(a_twice, b_twice) -> "Characteristic":
        """Build from doubled integer entries (0/1 vectors)."""
        return Characteristic(np.asarray(a_twice) / 2.0, np.asarray(b_twice) / 2.0)


def enumerate_half_characteristics(g: int) -> list[Characteristic]:
    """All 4^g half characteristics, even ones first within each parity kept stable."""
    if g > 6:
        raise ValueError("half-characteristic enumeration limited to g <= 6")
    out = []
    for bits in itertools.product((0, 1), repeat=2 * g):
        out.append(Characteristic.half(bits[:g], bits[g:]))
    return out


def count_parity(chars) -> tuple[int, int]:
    evens = sum(1 for c in chars if c.parity == 1)
    return evens, len(chars) - evens


def _lattice_points(T: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """Integer vectors k with |T (k + center)| <= radius; T upper triangular."""
    g = T.shape[0]
    ks = np.zeros((1, 0), dtype=np.int64)
    budget = np.array([radius * radius])
    for i in range(g - 1, -1, -1):
        if ks.shape[0] == 0:
            return np.zeros((0, g), dtype=np.int64)
        tail = ks + center[i + 1:]
        shift = tail @ T[i, i + 1:] if tail.shape[1] else np.zeros(ks.shape[0])
        halfwidth = np.sqrt(np.maximum(budget, 0.0))
        lo = np.ceil((-halfwidth - shift) / T[i, i] - center[i] - 1e-12).astype(np.int64)
        hi = np.floor((halfwidth - shift) / T[i, i] - center[i] + 1e-12).astype(np.int64)
        counts = np.maximum(hi - lo + 1, 0)
        total = int(counts.sum())
        if total == 0:
            return np.zeros((0, g), dtype=np.int64)
        rep = np.repeat(np.arange(ks.shape[0]), counts)
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        new_col = (lo[rep] + offs).astype(np.int64)
        term = T[i, i] * (new_col + center[i]) + shift[rep]
        budget = budget[rep] - term * term
        keep = budget >= -1e-9
        ks = np.column_stack([new_col[keep], ks[rep[keep]]])
        budget = budget[keep]
    return ks


class ThetaFunction:
    """Theta sums bound to one Siegel point, with cached Cholesky data."""

    def __init__(self, Z: SiegelPoint | np.ndarray, eps: float = 1e-13,
                 precision: str = "double", dps: int = 40):
        if not isinstance(Z, SiegelPoint):
            Z = SiegelPoint(np.atleast_2d(Z))
        self.Z = Z
        self.eps = float(eps)
        if precision not in ("double", "extended"):
            raise ValueError("precision must be 'double' or 'extended'")
        self.precision = precision
        self.dps = dps
        self.T = Z.cholesky.T  # upper triangular, Y = T' T
        self.Yinv = np.linalg.inv(Z.Y)
        # shortest-vector proxy for the tail bound
        self._rho = float(min(np.linalg.svd(self.T, compute_uv=False)))

    # -- truncation ---------------------------------------------------------

    def _radius(self, deriv_order: int, peak: float) -> float:
        g = self.Z.g
        rho = self._rho
        target = self.eps / max(peak, 1.0)
        lead = (g / 2.0) * (2.0 / rho) ** g * (2.0 * math.pi) ** deriv_order
        R = max(1.0, rho)
        while R < _HARD_RADIUS_CAP:
            # tail of the Gaussian sum over shells beyond R, with a polynomial
            # factor R^order absorbed into the incomplete-Gamma parameter
            s = (g + 2.0 * deriv_order) / 2.0
            x = math.pi * max(R - rho / 2.0, 0.1) ** 2
            bound = lead * gammaincc(s, x) * math.gamma(s) / math.gamma(g / 2.0)
            if bound <= target:
                return R
            R += 0.25
        raise RuntimeError(
            "theta truncation radius exceeds the hard cap; Im Z too ill-conditioned")

    def _points_and_phases(self, zs: np.ndarray, char: Characteristic,
                           deriv: tuple[int, ...]):
        g = self.Z.g
        a = np.array(char.a)
        b = np.array(char.b)
        imz = zs.imag @ self.Yinv
        peak_quad = np.einsum("ij,ij->i", imz, zs.imag)
        peak = float(np.exp(np.pi * np.max(peak_quad)))
        R = self._radius(len(deriv), peak)
        centers = a + imz
        mid = 0.5 * (centers.max(axis=0) + centers.min(axis=0))
        spread = float(np.max(np.linalg.norm((centers - mid) @ self.T.T, axis=1))) if len(zs) else 0.0
        ks = _lattice_points(self.T, mid, R + spread)
        if ks.shape[0] == 0:
            ks = np.zeros((1, g), dtype=np.int64)
        return ks, a, b

    # -- evaluation ---------------------------------------------------------

    def many(self, zs, char: Characteristic | None = None,
             deriv: tuple[int, ...] = ()) -> np.ndarray:
        """Evaluate theta (or a z-derivative) at a batch of arguments."""
        zs = np.atleast_2d(np.asarray(zs, dtype=np.complex128))
        g = self.Z.g
        if zs.shape[1] != g:
            raise ValueError(f"arguments must have length {g}")
        char = char or Characteristic.zero(g)
        deriv = tuple(int(d) for d in deriv)
        if len(deriv) > 4:
            raise ValueError("derivative order is limited to 4")
        if self.precision == "extended":
            return self._many_mp(zs, char, deriv)
        ks, a, b = self._points_and_phases(zs, char, deriv)
        V = ks + a  # (m, g)
        quad = np.einsum("ij,jk,ik->i", V, self.Z.Z, V)
        poly = np.ones(V.shape[0], dtype=np.complex128)
        for d in deriv:
            poly = poly * (2j * np.pi * V[:, d])
        log_base = 1j * np.pi * quad + 2j * np.pi * (V @ b)
        out = np.empty(zs.shape[0], dtype=np.complex128)
        chunk = max(1, int(4e6 // max(V.shape[0], 1)))
        for lo in range(0, zs.shape[0], chunk):
            zc = zs[lo:lo + chunk]
            # combine the exponents before exponentiating; the k- and z-parts
            # can overflow separately even when the product is moderate
            E = log_base[None, :] + 2j * np.pi * (zc @ V.T)
            M = E.real.max(axis=1, keepdims=True)
            out[lo:lo + chunk] = np.exp(M[:, 0]) * (np.exp(E - M) @ poly)
        return out

    def value(self, z, char: Characteristic | None = None,
              deriv: tuple[int, ...] = ()) -> complex:
        return complex(self.many(np.atleast_2d(z), char, deriv)[0])

    def gradient(self, z, char: Characteristic | None = None) -> np.ndarray:
        return np.array([self.value(z, char, (i,)) for i in range(self.Z.g)])

    def hessian(self, z, char: Characteristic | None = None) -> np.ndarray:
        g = self.Z.g
        H = np.empty((g, g), dtype=np.complex128)
        for i in range(g):
            for j in range(i, g):
                H[i, j] = H[j, i] = self.value(z, char, (i, j))
        return H

    def dZ_entry(self, z, j: int, k: int, char: Characteristic | None = None) -> complex:
        """Term-wise derivative with respect to the matrix entry Z_jk = Z_kj."""
        char = char or Characteristic.zero(self.Z.g)
        ks, a, b = self._points_and_phases(np.atleast_2d(z), char, (0, 0))
        V = ks + a
        quad = np.einsum("ij,jk,ik->i", V, self.Z.Z, V)
        pref = 1j * np.pi * (2.0 - (j == k)) * V[:, j] * V[:, k]
        E = 1j * np.pi * quad + 2j * np.pi * (V @ (np.asarray(z) + b))
        M = E.real.max()
        return complex(np.exp(M) * (pref * np.exp(E - M)).sum())

    def _many_mp(self, zs, char, deriv):
        import mpmath as mp
        with mp.workdps(self.dps):
            ks, a, b = self._points_and_phases(zs, char, deriv)
            Zm = mp.matrix(self.Z.Z.tolist())
            out = []
            for z in zs:
                zv = mp.matrix((np.asarray(z) + b).tolist())
                acc = mp.mpc(0)
                for k in ks:
                    v = mp.matrix((k + a).tolist())
                    quad = (v.T * Zm * v)[0, 0]
                    lin = (v.T * zv)[0, 0]
                    term = mp.e ** (1j * mp.pi * quad + 2j * mp.pi * lin)
                    for d in deriv:
                        term *= 2j * mp.pi * v[d]
                    acc += term
                out.append(complex(acc))
        return np.array(out, dtype=np.complex128)


def theta(z, Z, char: Characteristic | None = None, eps: float = 1e-13) -> complex:
    return ThetaFunction(Z, eps=eps).value(z, char)


def theta_deriv(z, Z, deriv, char: Characteristic | None = None, eps: float = 1e-13) -> complex:
    return ThetaFunction(Z, eps=eps).value(z, char, tuple(deriv))


def quasiperiod_residual(char: Characteristic, z, Z, m, n, eps: float = 1e-13) -> float:
    """|theta(z + n + Z m) - factor * theta(z)| relative to the larger value."""
    th = ThetaFunction(Z, eps=eps)
    z = np.asarray(z, dtype=np.complex128)
    m = np.asarray(m, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    a, b = np.array(char.a), np.array(char.b)
    lhs = th.value(z + n + th.Z.Z @ m, char)
    factor = np.exp(-1j * np.pi * m @ th.Z.Z @ m - 2j * np.pi * m @ z
                    + 2j * np.pi * (a @ n - b @ m))
    rhs = factor * th.value(z, char)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-30)


def _phi_cocycle(char: Characteristic, G: SymplecticMatrix) -> float:
    a, b = np.array(char.a), np.array(char.b)
    A, B, C, D = (m.astype(float) for m in (G.A, G.B, G.C, G.D))
    quad = (-a @ (B.T @ D) @ a + 2 * a @ (B.T @ C) @ b - b @ (A.T @ C) @ b)
    lin = np.diag(A @ B.T) @ (D @ a - C @ b)
    return 0.5 * (quad + lin)


def transform_characteristic(char: Characteristic, G: SymplecticMatrix) -> Characteristic:
    a, b = np.array(char.a), np.array(char.b)
    A, B, C, D = (m.astype(float) for m in (G.A, G.B, G.C, G.D))
    a2 = D @ a - C @ b + 0.5 * np.diag(C @ D.T)
    b2 = -B @ a + A @ b + 0.5 * np.diag(A @ B.T)
    return Characteristic(a2, b2)


def modular_covariance_residual(G: SymplecticMatrix, char: Characteristic,
                                z, Z, eps: float = 1e-13) -> tuple[float, float]:
    """(modulus residual, eighth-power phase residual) of the transformation law.

    The cocycle fixes the ratio up to an eighth root of unity, so only
    |ratio| and ratio^8 are pinned.
    """
    Zpt = Z if isinstance(Z, SiegelPoint) else SiegelPoint(np.atleast_2d(Z))
    z = np.asarray(z, dtype=np.complex128)
    den = G.C.astype(float) @ Zpt.Z + G.D.astype(float)
    den_inv = np.linalg.inv(den)
    Zp = modular_act(G, Zpt)
    zp = den_inv.T @ z
    charp = transform_characteristic(char, G)
    th = ThetaFunction(Zpt, eps=eps)
    thp = ThetaFunction(Zp, eps=eps)
    lhs = thp.value(zp, charp)
    detfac = np.sqrt(complex(np.linalg.det(den)))
    phase = np.exp(2j * np.pi * _phi_cocycle(char, G)
                   + 1j * np.pi * z @ den_inv @ G.C.astype(float) @ z)
    rhs = detfac * phase * th.value(z, char)
    scale = max(abs(lhs), abs(rhs), 1e-30)
    mod_res = abs(abs(lhs) - abs(rhs)) / scale
    ratio = lhs / rhs if abs(rhs) > 0 else np.inf
    phase8_res = abs(ratio ** 8 - 1.0)
    return mod_res, phase8_res

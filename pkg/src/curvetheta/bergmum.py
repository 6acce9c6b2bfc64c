"""Bergman kernel determinants, induced moduli metric, and Mumford data.

The kernel B_A(z, wbar) = sum omega_i(z) A_ij conj(omega_j(w)) has the
factorization property: determinants of its n-th power at N_n x N_n point
grids split into a holomorphic determinant, an antiholomorphic one and a
constant assembled from minors of the symmetric power of A. The same
machinery feeds the metric induced on the moduli of curves (through the
pair-product coefficient matrices) and the normalized Mumford quantity
whose genus-2 value ties the whole stack to the constant 1 / pi^12.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import curve as cv
from . import detcomb as dc
from . import quadrics as qd
from .jactheta import JacobianContext, JactError, kappa_basis, kappa_omega_det_route
from .siegel import SiegelPoint, SymplecticMatrix, metric_matrix, modular_act
from .symindex import Convention, build_table, sym_power
from .theta import Characteristic, ThetaFunction, enumerate_half_characteristics

__all__ = [
    "bergman",
    "dim_n_differentials",
    "product_basis_values",
    "K_n_constant",
    "factorization_residual",
    "fattorbb_residual",
    "det_bergman_gram",
    "induced_metric",
    "mumford_F",
    "psi10",
    "psi18",
    "flagship_residuals",
    "odd_spin_divisors",
    "k4_from_sections",
    "k_g_section_sum",
    "psi_weight_residual",
]

MINOR_BUDGET = 10 ** 6
PERM_BUDGET = 10 ** 7


def bergman(ctx: JacobianContext, A, z, w) -> complex:
    """Kernel value sum omega_i(z) A_ij conj(omega_j(w)) in the x-chart."""
    A = np.asarray(A, dtype=np.complex128)
    return complex(ctx.omega(z) @ A @ np.conj(ctx.omega(w)))


def default_weight(ctx: JacobianContext) -> np.ndarray:
    return np.linalg.inv(ctx.tau.Y)


def dim_n_differentials(g: int, n: int) -> int:
    if g == 1:
        return 1
    return (2 * n - 1) * (g - 1) + (1 if n == 1 else 0)


def product_basis_values(ctx: JacobianContext, n: int, points) -> np.ndarray:
    """Values of the first N_n canonical n-fold products at the points.

    Rows follow the diagonal-first tuple order; on hyperelliptic curves of
    genus >= 3 these stop spanning for n >= 2 and callers must treat the
    resulting determinants as degenerate.
    """
    g = ctx.g
    N = dim_n_differentials(g, n)
    tab = build_table(g, n, Convention.PAPER_ORDER)
    out = np.empty((N, len(points)), dtype=np.complex128)
    for j, p in enumerate(points):
        om = ctx.omega(p)
        for i in range(N):
            out[i, j] = np.prod([om[t] for t in tab.tuples[i]])
    return out


def _minor_ratios(ctx: JacobianContext, n: int, ref_points) -> tuple[np.ndarray, list]:
    """det of each N_n-subset of products against the reference basis det."""
    g = ctx.g
    N = dim_n_differentials(g, n)
    tab = build_table(g, n, Convention.PAPER_ORDER)
    Mn = tab.size
    if math.comb(Mn, N) ** 2 > MINOR_BUDGET:
        raise JactError("minor enumeration exceeds the configured budget")
    vals = np.empty((Mn, N), dtype=np.complex128)
    for j, p in enumerate(ref_points):
        om = ctx.omega(p)
        for i in range(Mn):
            vals[i, j] = np.prod([om[t] for t in tab.tuples[i]])
    ref = np.linalg.det(vals[:N, :])
    scale = np.abs(vals).max() ** N
    if abs(ref) < 1e-10 * scale:
        raise JactError(
            "reference product basis is degenerate at the sample points "
            "(products do not span on this curve)")
    sels = list(itertools.combinations(range(Mn), N))
    ratios = np.array([np.linalg.det(vals[list(s), :]) / ref for s in sels])
    return ratios, sels


def K_n_constant(ctx: JacobianContext, A, n: int, ref_points=None) -> complex:
    """The minor-sum constant of the kernel-power factorization, normalized
    against the canonical product basis (absorbing |kappa[phi^n]|^2)."""
    g = ctx.g
    N = dim_n_differentials(g, n)
    if ref_points is None:
        ref_points = ctx.random_points(N, np.random.default_rng(777))
    A = np.asarray(A, dtype=np.complex128)
    tab = build_table(g, n, Convention.PAPER_ORDER)
    ratios, sels = _minor_ratios(ctx, n, ref_points)
    P = sym_power(A, n, tab)
    chi = np.array(tab.chi, dtype=np.float64)
    total = 0.0 + 0.0j
    for a, sa in enumerate(sels):
        for b, sb in enumerate(sels):
            minor = np.linalg.det(P[np.ix_(list(sa), list(sb))])
            weight = np.prod(chi[list(sa)]) * np.prod(chi[list(sb)])
            total += ratios[a] * (minor / weight) * np.conj(ratios[b])
    # the n-th kernel power expands with n! (A...A)_kl / (chi_k chi_l) per
    # entry, so the N x N determinant carries (n!)^N
    total *= float(math.factorial(n)) ** dim_n_differentials(g, n)
    kap = kappa_basis(ctx, product_basis_values(ctx, n, ref_points), n, ref_points)
    return complex(abs(kap) ** 2 * total)


def det_bergman_gram(ctx: JacobianContext, A, n: int, zs, ws) -> complex:
    A = np.asarray(A, dtype=np.complex128)
    N = len(zs)
    M = np.empty((N, N), dtype=np.complex128)
    for i, z in enumerate(zs):
        for j, w in enumerate(ws):
            M[i, j] = bergman(ctx, A, z, w) ** n
    return complex(np.linalg.det(M))


def factorization_residual(ctx: JacobianContext, A, n: int, zs, ws,
                           ref_points=None) -> float:
    """|det B_A^n(z_i, wbar_j) - |kappa|^-2 det phi(z) conj(det phi(w)) K_n(A)|."""
    g = ctx.g
    N = dim_n_differentials(g, n)
    if len(zs) != N or len(ws) != N:
        raise ValueError(f"need N = {N} points on each side")
    if ref_points is None:
        ref_points = ctx.random_points(N, np.random.default_rng(777))
    lhs = det_bergman_gram(ctx, A, n, zs, ws)
    kap = kappa_basis(ctx, product_basis_values(ctx, n, ref_points), n, ref_points)
    det_z = np.linalg.det(product_basis_values(ctx, n, zs))
    det_w = np.linalg.det(product_basis_values(ctx, n, ws))
    rhs = abs(kap) ** -2 * det_z * np.conj(det_w) * K_n_constant(ctx, A, n, ref_points)
    return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-30))


def fattorbb_residual(ctx: JacobianContext, A, n: int, zs, ref_points=None) -> float:
    """Same-point factorization against the explicit theta/prime-form modulus."""
    if n < 2:
        raise ValueError("the same-point form is stated for n >= 2")
    N = dim_n_differentials(ctx.g, n)
    if len(zs) != N:
        raise ValueError(f"need N = {N} points")
    lhs = det_bergman_gram(ctx, A, n, zs, zs)
    block = (ctx.theta_D(list(zs), n_delta=2 * n - 1)
             * np.prod([ctx.E(zs[i], zs[j]) for i in range(N) for j in range(i + 1, N)])
             * np.prod([ctx.sigma(z) for z in zs]) ** (2 * n - 1))
    rhs = abs(block) ** 2 * K_n_constant(ctx, A, n, ref_points)
    return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-30))


# -- induced metric -------------------------------------------------------------


def induced_metric(ctx: JacobianContext, config, sample_points=None):
    """Coefficient matrix of the induced metric over the v-basis, its defining
    kernel identity residual and the determinant identity residual.

    Returns (g_Xi, identity_residual, det_residual). For hyperelliptic
    contexts of genus >= 3 the pair products are rank deficient; the
    coefficient solve then runs in the least-squares sense and the
    determinant identity degenerates to 0 = 0, which the cross-multiplied
    residual reports faithfully.
    """
    g = ctx.g
    N = 3 * (g - 1) if g > 1 else 1
    tab = build_table(g, 2, Convention.PAPER_ORDER)
    M = tab.size
    if sample_points is None:
        sample_points = ctx.random_points(N, np.random.default_rng(901))
    zs = sample_points[:N]
    V = np.empty((N, N), dtype=np.complex128)   # v_j(z_k)
    W = np.empty((N, M), dtype=np.complex128)   # ww_i(z_k)
    for k, z in enumerate(zs):
        V[k] = qd.v_values(ctx, config, z)[:N]
        om = ctx.omega(z)
        W[k] = [om[a] * om[b] for a, b in tab.tuples]
    B = np.linalg.lstsq(V, W, rcond=None)[0]    # ww_i = sum_j B[j, i] v_j
    g_tau = metric_matrix(ctx.tau.Y, tab)
    g_xi = B @ g_tau @ np.conj(B).T

    B2 = np.empty((N, N), dtype=np.complex128)
    for i, z in enumerate(zs):
        for j, w in enumerate(zs):
            B2[i, j] = bergman(ctx, default_weight(ctx), z, w) ** 2
    lhs = V @ g_xi @ np.conj(V).T
    id_res = float(np.abs(lhs - B2).max() / np.abs(B2).max())
    det_lhs = np.linalg.det(g_xi) * abs(np.linalg.det(V)) ** 2
    det_rhs = np.linalg.det(B2)
    det_res = float(abs(det_lhs - det_rhs)
                    / max(abs(det_lhs), abs(det_rhs), np.abs(B2).max() ** N))
    return g_xi, id_res, det_res


# -- Mumford data ----------------------------------------------------------------


def psi10(tau: SiegelPoint) -> complex:
    """Product of the squared even theta constants in genus 2."""
    if tau.g != 2:
        raise ValueError("defined for genus 2")
    th = ThetaFunction(tau)
    evens = [c for c in enumerate_half_characteristics(2) if c.parity == 1]
    return complex(np.prod([th.value(np.zeros(2), c) ** 2 for c in evens]))


def psi18(tau: SiegelPoint) -> complex:
    """Product of the 36 even theta constants in genus 3."""
    if tau.g != 3:
        raise ValueError("defined for genus 3")
    th = ThetaFunction(tau)
    evens = [c for c in enumerate_half_characteristics(3) if c.parity == 1]
    return complex(np.prod([th.value(np.zeros(3), c) for c in evens]))


def mumford_F(ctx: JacobianContext, n: int, points=None) -> dict:
    """The normalized section value by both routes.

    KAPPA_RATIO: kappa[omega]^((2n-1)^2) / kappa[phi^n] with the canonical
    product basis. FAY_FORM: the theta/prime-form expression with
    c(p) = 1 / (kappa[omega] sigma(p)^(g-1)); only computed when the point
    exponent (2n-1)/(g-1) is an integer.
    """
    g = ctx.g
    N = dim_n_differentials(g, n)
    rng = np.random.default_rng(333)
    if points is None:
        points = ctx.random_points(N, rng)
    kom = kappa_omega_det_route(ctx, ctx.random_points(g, np.random.default_rng(334)))
    vals = product_basis_values(ctx, n, points)
    kphi = kappa_basis(ctx, vals, n, points)
    out = {"KAPPA_RATIO": kom ** ((2 * n - 1) ** 2) / kphi}
    if g > 1 and (2 * n - 1) % (g - 1) == 0:
        expo = (2 * n - 1) // (g - 1)
        det_phi = np.linalg.det(vals)
        Eprod = np.prod([ctx.E(points[i], points[j])
                         for i in range(N) for j in range(i + 1, N)])
        cvals = np.array([1.0 / (kom * ctx.sigma(p) ** (g - 1)) for p in points])
        fay = (ctx.theta_D(list(points), n_delta=2 * n - 1) * Eprod
               / (det_phi * np.prod(cvals ** expo)))
        out["FAY_FORM"] = fay
    return out


def flagship_residuals(ctx: JacobianContext, triples_rng=None) -> dict:
    """The quantitative genus-2 anchors tying the stack to 1 / pi^12.

    With this module's theta-shift lift conventions the sigma-free
    combination closes with a relative minus sign between the two terms;
    the constant itself is the exact 1 / pi^12 in both routes.
    """
    if ctx.g != 2:
        raise ValueError("flagship checks are genus-2 statements")
    rng = triples_rng or np.random.default_rng(246)
    F = mumford_F(ctx, 2)["KAPPA_RATIO"]
    psi = psi10(ctx.tau)
    res_F = abs(F * psi - np.pi ** -12) * np.pi ** 12
    worst = 0.0
    for _ in range(3):
        p = ctx.random_points(3, rng)
        ww = product_basis_values(ctx, 2, p)
        det2 = np.linalg.det(ww) ** 2
        num = np.prod([
            ctx.theta_D([p[j] for j in range(3) if j != i], minus=[p[i]],
                        n_delta=1) ** 3
            for i in range(3)])
        den = (psi * ctx.theta_D(p, n_delta=3)
               * np.prod([ctx.E(p[i], p[j]) ** 4
                          for i in range(3) for j in range(i + 1, 3)]))
        combo = det2 - np.pi ** -12 * num / den
        worst = max(worst, float(abs(combo) / abs(det2)))
    return {"F_psi10": float(res_F), "sigma_free": worst}


def psi_weight_residual(tau: SiegelPoint, G: SymplecticMatrix) -> float:
    """Modulus of the genus-2 even-constant product transforms with
    |det(C tau + D)|^10."""
    lhs = abs(psi10(modular_act(G, tau)))
    den = G.C.astype(float) @ tau.Z + G.D.astype(float)
    rhs = abs(np.linalg.det(den)) ** 10 * abs(psi10(tau))
    return float(abs(lhs - rhs) / max(lhs, rhs))


# -- spin divisors and the even-genus sections ------------------------------------


def odd_spin_divisors(ctx: JacobianContext, tol: float = 1e-6) -> dict:
    """Map each odd half characteristic to the branch-point subset whose
    Abel image realizes it. Requires a curve-backed context."""
    if not ctx.is_curve_backed:
        raise JactError("spin divisor resolution needs branch points")
    g = ctx.g
    curve = ctx.curve
    tau = ctx.tau.Z
    branch_pts = [cv.CurvePoint(complex(e), 1) for e in curve.branch_points]
    images = [ctx.abel(p) for p in branch_pts]
    odds = [c for c in enumerate_half_characteristics(g) if c.parity == -1]
    out = {}
    for nu in odds:
        target = np.array(nu.b) + tau @ np.array(nu.a)
        found = None
        for subset in itertools.combinations(range(len(images)), g - 1):
            v = sum(images[i] for i in subset) + ctx.K - target
            _, _, dist = cv.lattice_reduce(v, tau)
            if dist < tol:
                found = (subset, dist)
                break
        if found is None:
            raise JactError(f"no branch-point divisor matches characteristic {nu}")
        out[(nu.a, nu.b)] = found
    return out


def k4_from_sections(ctx: JacobianContext, points=None, xs=None):
    """det k(p_i, p_j) / (det omega_i(p_j))^2 at a 4-point sample,
    with the scale of the underlying permutation sums."""
    if ctx.g != 4:
        raise ValueError("defined for genus 4")
    rng = np.random.default_rng(555)
    points = points or ctx.random_points(4, rng)
    xs = xs or ctx.random_points(7, np.random.default_rng(556))
    kmat = np.empty((4, 4), dtype=np.complex128)
    scale = 0.0
    for i in range(4):
        for j in range(i, 4):
            _, kv, sc = qd.K_section(ctx, [points[i], points[j]], xs)
            kmat[i, j] = kmat[j, i] = kv
            scale = max(scale, sc)
    domega = np.linalg.det(np.column_stack([ctx.omega(p) for p in points]))
    return np.linalg.det(kmat) / domega ** 2, scale ** 4 / abs(domega) ** 2


def k_g_section_sum(ctx: JacobianContext, points=None, xs=None):
    """The antisymmetrized even-genus section sum at its genus-4 desk scale.

    Sums sgn(s1) sgn(s2) prod_j k(p_(s1_j), p_(s2_j)) over permutation
    pairs; the term count is gated by a fixed budget.
    """
    g = ctx.g
    if g % 2:
        raise ValueError("the section is defined for even genus")
    Nn = dim_n_differentials(g, g - 3) if g > 4 else g
    if math.factorial(Nn) ** (g - 2) > PERM_BUDGET:
        raise JactError("permutation sum exceeds the configured budget")
    rng = np.random.default_rng(557)
    points = points or ctx.random_points(Nn, rng)
    xs = xs or ctx.random_points(2 * g - 1, np.random.default_rng(558))
    kmat = np.empty((Nn, Nn), dtype=np.complex128)
    scale = 0.0
    for i in range(Nn):
        for j in range(i, Nn):
            _, kv, sc = qd.K_section(ctx, [points[i], points[j]], xs)
            kmat[i, j] = kmat[j, i] = kv
            scale = max(scale, sc)
    perms = list(itertools.permutations(range(Nn)))
    signs = dc._perm_sign_rows(np.array(perms))
    total = 0.0 + 0.0j
    for a, s1 in enumerate(perms):
        for b, s2 in enumerate(perms):
            total += signs[a] * signs[b] * np.prod([kmat[s1[j], s2[j]] for j in range(Nn)])
    return total, scale ** Nn * math.factorial(Nn) ** 2

"""Point-dual bases, quadric coefficients and the K/H obstruction sections.

Everything runs over a frozen JacobianContext. A point configuration
p_1..p_g fixes the dual basis sigma_i (sigma_i(p_j) = delta_ij) through
theta gradients; two-fold products of the dual basis give the v-basis of
quadratic differentials whose coefficient matrices against the canonical
products are symmetric powers of the basis change. The K section is the
permutation sum detecting when those products fail to span; it vanishes
identically on hyperelliptic curves, so the non-degenerate branches only
run on supplied external data.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import detcomb as dc
from .jactheta import JacobianContext, JactError, kappa_basis
from .symindex import Convention, build_table, sym_power

__all__ = [
    "DegenerateConfigError",
    "PointConfig",
    "point_config",
    "X_omega",
    "X_omega_sym",
    "v_values",
    "v_reconstruction_residual",
    "Y_omega",
    "Y_omega_sym",
    "phi3_reconstruction_residual",
    "quadratic_span_residual",
    "K_section",
    "H_section",
    "HK_ratio_residual",
    "C_omega",
    "singular_point",
    "hessian_theta",
    "riemann_quadric_residual",
    "lambda_coefficients",
    "v_identity_residual",
]


class DegenerateConfigError(RuntimeError):
    pass


@dataclass
class PointConfig:
    """g points with the dual-basis data [omega]^-1 and its denominators."""

    points: list
    B: np.ndarray        # [omega]^{-1}: sigma_i = sum_j B[i, j] omega_j
    D: np.ndarray        # D_i = sum_k grad_i[k] omega_k(p_i)
    grads: np.ndarray    # grads[i] = theta-gradient at the reduced divisor a_i


def point_config(ctx: JacobianContext, points, tol: float = 1e-8) -> PointConfig:
    """Dual-basis data for p_1..p_g; rejects configurations where the
    differentials fail to be independent at the points."""
    g = ctx.g
    if len(points) != g:
        raise ValueError(f"need exactly g = {g} points")
    omegas = np.column_stack([ctx.omega(p) for p in points])  # omega_i(p_j)
    scale = np.abs(omegas).max() ** g
    if abs(np.linalg.det(omegas)) < tol * scale:
        raise DegenerateConfigError("det omega_i(p_j) is numerically zero")
    grads = np.empty((g, g), dtype=np.complex128)
    D = np.empty(g, dtype=np.complex128)
    for i in range(g):
        a_i = [pt for k, pt in enumerate(points) if k != i]
        grads[i] = ctx.grad_theta_D(a_i, n_delta=1)
        D[i] = grads[i] @ ctx.omega(points[i])
        if abs(D[i]) < tol * np.abs(grads[i]).max() * np.abs(omegas).max():
            raise DegenerateConfigError(f"vanishing normalization at point {i}")
    B = grads / D[:, None]
    return PointConfig(points=list(points), B=B, D=D, grads=grads)


def sigma_at(ctx: JacobianContext, config: PointConfig, z) -> np.ndarray:
    """Values sigma_i(z) of the dual basis."""
    return config.B @ ctx.omega(z)


def v_values(ctx: JacobianContext, config: PointConfig, z) -> np.ndarray:
    """Pair products v_i = sigma sigma_i at z, diagonal-first ordering."""
    tab = build_table(ctx.g, 2, Convention.PAPER_ORDER)
    s = sigma_at(ctx, config, z)
    return np.array([s[a] * s[b] for a, b in tab.tuples])


def X_omega_sym(ctx: JacobianContext, config: PointConfig) -> np.ndarray:
    """Coefficients with v_i = sum_j X[j, i] omegaomega_j, as the chi-weighted
    symmetric square of the basis change."""
    tab = build_table(ctx.g, 2, Convention.PAPER_ORDER)
    P = sym_power(config.B, 2, tab)
    chi = np.array(tab.chi, dtype=np.float64)
    return (P / chi[None, :]).T


def X_omega(ctx: JacobianContext, config: PointConfig) -> np.ndarray:
    """Same coefficients assembled directly from theta gradients."""
    tab = build_table(ctx.g, 2, Convention.PAPER_ORDER)
    g = ctx.g
    M = tab.size
    xi, D = config.grads, config.D
    X = np.empty((M, M), dtype=np.complex128)
    for ii, (a, b) in enumerate(tab.tuples):       # column index: which v
        den = D[a] * D[b]
        for jj, (c, d) in enumerate(tab.tuples):   # row index: which omegaomega
            num = xi[a, c] * xi[b, d] + xi[b, c] * xi[a, d]
            X[jj, ii] = num / ((1 + (c == d)) * den)
    return X


def v_reconstruction_residual(ctx: JacobianContext, config: PointConfig, zs) -> float:
    """max over sample points of |v_i(z) - sum_j X[j,i] ww_j(z)| / scale."""
    tab = build_table(ctx.g, 2, Convention.PAPER_ORDER)
    X = X_omega(ctx, config)
    worst = 0.0
    for z in zs:
        om = ctx.omega(z)
        ww = np.array([om[a] * om[b] for a, b in tab.tuples])
        v = v_values(ctx, config, z)
        got = X.T @ ww
        worst = max(worst, float(np.max(np.abs(v - got)) / max(np.max(np.abs(v)), 1e-30)))
    return worst


def Y_omega_sym(ctx: JacobianContext, config: PointConfig) -> np.ndarray:
    """Triple-product coefficients phi_j = sum_k Y[k, j] www_k via sym_power."""
    tab = build_table(ctx.g, 3, Convention.PAPER_ORDER)
    P = sym_power(config.B, 3, tab)
    chi = np.array(tab.chi, dtype=np.float64)
    return (P / chi[None, :]).T


def Y_omega(ctx: JacobianContext, config: PointConfig) -> np.ndarray:
    """Triple-product coefficients from theta gradients: the permutation sum
    over the three slots divided by the repetition count of the product tuple."""
    tab = build_table(ctx.g, 3, Convention.PAPER_ORDER)
    M3 = tab.size
    xi, D = config.grads, config.D
    Y = np.empty((M3, M3), dtype=np.complex128)
    chi = np.array(tab.chi, dtype=np.float64)
    for ii, ti in enumerate(tab.tuples):
        den = D[ti[0]] * D[ti[1]] * D[ti[2]]
        for jj, tj in enumerate(tab.tuples):
            acc = 0.0 + 0.0j
            for s in itertools.permutations(range(3)):
                acc += xi[ti[0], tj[s[0]]] * xi[ti[1], tj[s[1]]] * xi[ti[2], tj[s[2]]]
            Y[jj, ii] = acc / (chi[jj] * den)
    return Y


def phi3_reconstruction_residual(ctx: JacobianContext, config: PointConfig, zs) -> float:
    tab = build_table(ctx.g, 3, Convention.PAPER_ORDER)
    Y = Y_omega_sym(ctx, config)
    worst = 0.0
    for z in zs:
        om = ctx.omega(z)
        www = np.array([om[a] * om[b] * om[c] for a, b, c in tab.tuples])
        s = sigma_at(ctx, config, z)
        phi = np.array([s[a] * s[b] * s[c] for a, b, c in tab.tuples])
        got = Y.T @ www
        worst = max(worst, float(np.max(np.abs(phi - got)) / max(np.max(np.abs(phi)), 1e-30)))
    return worst


# -- span identities -----------------------------------------------------------


def quadratic_span_residual(ctx: JacobianContext, xs) -> float:
    """Identity residual for determinants of pair products of the
    normalized differentials at M = g(g+1)/2 points.

    g = 2, 3: relative residual of the expansion into products of plain
    determinants; g = 4: normalized vanishing of the signed permutation sum
    (the pair-product determinant is rank deficient for every curve).
    """
    g = ctx.g
    M = g * (g + 1) // 2
    if len(xs) != M:
        raise ValueError(f"need M = {M} points")
    fx = np.column_stack([ctx.omega(x) for x in xs])
    if g in (2, 3):
        return dc.lemma1_residual(g, g, fx)
    if g != 4:
        raise ValueError("span identities implemented for g = 2, 3, 4")
    perms = dc.pprime_perms(4)
    signs = dc._perm_sign_rows(perms)
    prod = np.ones(perms.shape[0], dtype=np.complex128)
    for k in range(g + 1):
        pos = np.array(dc._row_positions_full(g, k))
        mats = np.moveaxis(fx[:, perms[:, pos]], 1, 0)
        prod = prod * np.linalg.det(mats)
    terms = signs * prod
    return float(abs(terms.sum()) / max(np.abs(terms).sum(), 1e-300))


# -- K and H sections ------------------------------------------------------------


def _k_sum(ctx: JacobianContext, ps, xs):
    """The shared permutation sum of both obstruction sections.

    ps: the g-2 fixed points; xs: 2g-1 expansion points. Returns
    (signless sum, mean |term|).
    """
    g = ctx.g
    n = 2 * g - 1
    if len(ps) != g - 2 or len(xs) != n:
        raise ValueError("need g-2 fixed points and 2g-1 expansion points")

    S_cache: dict = {}

    def S_of(idx_set):
        key = frozenset(idx_set)
        if key not in S_cache:
            S_cache[key] = ctx.S([xs[i] for i in idx_set])
        return S_cache[key]

    Sb_cache: dict = {}

    def S_pair_b(i, j):
        key = frozenset((i, j))
        if key not in Sb_cache:
            Sb_cache[key] = ctx.S([xs[i], xs[j], *ps])
        return Sb_cache[key]

    Exx = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                Exx[(i, j)] = ctx.E(xs[i], xs[j])
    Exp = {(i, k): ctx.E(xs[i], ps[k]) for i in range(n) for k in range(len(ps))}

    total = 0.0 + 0.0j
    abssum = 0.0
    for s in itertools.permutations(range(n)):
        first = S_of(s[:g])
        second = S_of(s[g - 1:])
        den_p = np.prod([Exp[(s[g - 1], k)] for k in range(len(ps))]) if ps else 1.0
        term = first * second / den_p
        for i in range(g - 1):
            num = S_pair_b(s[i], s[i + g])
            den = 1.0 + 0.0j
            for j in range(g - 1):
                if j != i:
                    den *= Exx[(s[i], s[j + g])]
            term *= num / den
        total += term
        abssum += abs(term)
    return total, abssum / math.factorial(n)


def K_section(ctx: JacobianContext, ps, xs):
    """The obstruction section and its weight-adjusted differential form.

    Returns (K, k, scale): K from the permutation-sum definition, k with
    the prime-form and sigma weights re-attached, and the mean term size
    of the sum relative to the same denominator for the identically-zero
    tests.
    """
    g = ctx.g
    total, mean_term = _k_sum(ctx, ps, xs)
    den = (ctx.theta_D(list(xs) + list(ps), n_delta=3)
           * np.prod([ctx.sigma(x) for x in xs])
           * (np.prod([ctx.sigma(p) for p in ps]) if ps else 1.0))
    K = total / den
    scale = mean_term / abs(den)
    Epp = np.prod([ctx.E(ps[i], ps[j])
                   for i in range(len(ps)) for j in range(i + 1, len(ps))]) if len(ps) > 1 else 1.0
    sig_p = np.prod([ctx.sigma(p) for p in ps]) if ps else 1.0
    k_val = K * Epp ** (g - 2) * sig_p ** (g - 3)
    return K, k_val, scale


def H_section(ctx: JacobianContext, config: PointConfig, xs):
    """The companion section over a full g-point configuration."""
    g = ctx.g
    ps_all = config.points
    p1, p2, rest = ps_all[0], ps_all[1], ps_all[2:]
    total, mean_term = _k_sum(ctx, rest, xs)
    Sa = ctx.S(ps_all)
    pref = Sa ** (5 * g - 7) * ctx.E(p1, p2) ** (g + 1)
    for i, pi in enumerate(rest):
        tail = np.prod([ctx.E(pi, pj) for pj in rest[i + 1:]]) if rest[i + 1:] else 1.0
        pref *= (ctx.E(p1, pi) ** 4 * ctx.E(p2, pi) ** 4 * tail ** 5
                 / ctx.sigma(pi))
    den = (ctx.theta_D(list(xs) + list(rest), n_delta=3)
           * np.prod([ctx.sigma(x) for x in xs]))
    H = pref * total / den
    scale = abs(pref) * mean_term / abs(den)
    return H, scale


def HK_ratio_residual(ctx: JacobianContext, config: PointConfig, xs) -> float:
    """Consistency of H / K with the explicit prime-form product."""
    g = ctx.g
    ps_all = config.points
    p1, p2, rest = ps_all[0], ps_all[1], ps_all[2:]
    H, h_scale = H_section(ctx, config, xs)
    K, _, k_scale = K_section(ctx, rest, xs)
    Sa = ctx.S(ps_all)
    prod = Sa ** (5 * g - 7) * ctx.E(p1, p2) ** (g + 1)
    for i, pi in enumerate(rest):
        tail = np.prod([ctx.E(pi, pj) for pj in rest[i + 1:]]) if rest[i + 1:] else 1.0
        prod *= (ctx.E(p1, pi) * ctx.E(p2, pi)) ** 4 * tail ** 5
    lhs, rhs = H, K * prod
    floor = max(h_scale, k_scale * abs(prod))
    return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs), floor))


def kappa_chain_residual(ctx: JacobianContext, config: PointConfig, xs) -> float:
    """K from the permutation sum against the kappa-ratio route."""
    g = ctx.g
    rest = config.points[2:]
    K, _, scale = K_section(ctx, rest, xs)
    # kappa[v] over kappa[sigma]^(g+1) with the explicit weight factors
    N = 3 * (g - 1)
    sample = ctx.random_points(N, np.random.default_rng(404))
    vmat = np.column_stack([v_values(ctx, config, z)[:N] for z in sample])
    kv = kappa_basis(ctx, vmat, 2, sample)
    pts_s = ctx.random_points(g, np.random.default_rng(405))
    smat = np.column_stack([sigma_at(ctx, config, z) for z in pts_s])
    ks = kappa_basis(ctx, smat, 1, pts_s)
    c_g2 = dc.c_constant(g, 2)
    rhs = (-1) ** (g + 1) * c_g2 * kv / ks ** (g + 1)
    if len(rest) > 1:
        rhs *= np.prod([ctx.E(rest[i], rest[j]) for i in range(len(rest))
                        for j in range(i + 1, len(rest))]) ** (2 - g)
    if rest:
        rhs *= np.prod([ctx.sigma(p) for p in rest]) ** (3 - g)
    return float(abs(K - rhs) / max(abs(K), abs(rhs), scale))


# -- quadric relation coefficients ----------------------------------------------


def C_omega(ctx: JacobianContext, config: PointConfig, eval_points,
            k_threshold: float = 1e-8):
    """The M-N independent relation rows against the canonical pair products.

    Requires a configuration where the pair products still span (the
    obstruction section must be away from zero); on hyperelliptic data this
    always fails, by construction, with a DegenerateConfigError.
    """
    g = ctx.g
    if g < 4:
        raise ValueError("relations exist only for g >= 4")
    rest = config.points[2:]
    rng = np.random.default_rng(808)
    xs = (ctx.random_points(2 * g - 1, rng) if ctx.is_curve_backed
          else eval_points[: 2 * g - 1])
    K, _, scale = K_section(ctx, rest, xs)
    if abs(K) < k_threshold * max(scale, 1e-300):
        raise DegenerateConfigError(
            "obstruction section vanishes (hyperelliptic or special locus); "
            "quadric relations are not defined here")
    tab = build_table(g, 2, Convention.PAPER_ORDER)
    M = tab.size
    N = 3 * (g - 1)
    X = X_omega(ctx, config)
    if len(eval_points) < N:
        raise ValueError(f"need at least N = {N} evaluation points")
    pts = eval_points[:N]
    vmat = np.column_stack([v_values(ctx, config, z)[:N] for z in pts])
    det_v = np.linalg.det(vmat)
    om = [ctx.omega(z) for z in pts]
    ww_all = np.array([[o[a] * o[b] for a, b in tab.tuples] for o in om])  # (N, M)
    C = np.zeros((M - N, M), dtype=np.complex128)
    rows = list(range(N))
    for r, i in enumerate(range(N, M)):
        for j in range(M):
            acc = 0.0 + 0.0j
            for comb in itertools.combinations(range(M), N):
                sub = ww_all[:, list(comb)]
                kap_ratio = np.linalg.det(sub) / det_v
                cols = list(comb) + [j]
                minor = np.linalg.det(X[np.ix_(rows + [i], cols)])
                acc += minor * kap_ratio
            C[r, j] = acc * math.factorial(N) / math.factorial(N)
        C[r] /= C[r, i]
    return C


# -- singular points of the theta divisor ----------------------------------------


def singular_point(ctx: JacobianContext, q, x) -> np.ndarray:
    """A double point of the theta divisor from the special divisor
    q + x + iota(x) + ... on a genus-4 hyperelliptic context."""
    if ctx.g != 4:
        raise ValueError("the explicit construction targets genus 4")
    return ctx.abel(q) + ctx.K


def hessian_theta(ctx: JacobianContext, e, tol: float = 1e-7):
    """Hessian determinant at a verified double point e of the theta divisor."""
    g = ctx.g
    e = np.asarray(e, dtype=np.complex128)
    scale = 1.0 + abs(ctx.theta_at(0.17 * np.ones(g) + e * 0))
    th = abs(ctx.theta_at(e))
    grad = np.array([ctx.theta_at(e, (i,)) for i in range(g)])
    H = np.empty((g, g), dtype=np.complex128)
    for i in range(g):
        for j in range(i, g):
            H[i, j] = H[j, i] = ctx.theta_at(e, (i, j))
    hess_scale = np.abs(H).max()
    if th > tol * scale or np.linalg.norm(grad) > tol * max(scale, hess_scale):
        raise ValueError(
            f"point is not singular to tolerance: |theta| = {th:.3e}, "
            f"|grad| = {np.linalg.norm(grad):.3e}")
    return np.linalg.det(H), H


def riemann_quadric_residual(ctx: JacobianContext, e, zs) -> float:
    """max_z |sum theta_ij(e) w_i w_j(z)| over a normalization scale."""
    g = ctx.g
    _, H = hessian_theta(ctx, e)
    worst = 0.0
    for z in zs:
        om = ctx.omega(z)
        num = abs(om @ H @ om)
        den = np.abs(H).max() * np.linalg.norm(om) ** 2
        worst = max(worst, float(num / max(den, 1e-30)))
    return worst


def lambda_coefficients(ctx: JacobianContext, c_points, p_points, i: int) -> np.ndarray:
    """Second-derivative pairings Lambda_(jk) at the shifted divisor
    c + sum_(l != i) p_l, for the supplied configuration."""
    g = ctx.g
    pts = list(c_points) + [p for k, p in enumerate(p_points) if k != i]
    e = sum(ctx.abel(p) for p in pts) + ctx.K
    H = np.empty((g, g), dtype=np.complex128)
    for a in range(g):
        for b in range(a, g):
            H[a, b] = H[b, a] = ctx.theta_at(e, (a, b))
    oms = [ctx.omega(p) for p in p_points]
    out = np.empty((len(p_points), len(p_points)), dtype=np.complex128)
    for j in range(len(p_points)):
        for k in range(len(p_points)):
            out[j, k] = oms[j] @ H @ oms[k]
    return out


# -- the antisymmetrized relation sum ---------------------------------------------


def v_identity_residual(ctx: JacobianContext, ps, xs, i1: int, i2: int) -> float:
    """Normalized value of the antisymmetrized 2g-point relation sum.

    ps: the g-2 fixed points (0-based positions in the full configuration
    являются 3..g, so i1, i2 index into ps); xs: 2g points.
    """
    g = ctx.g
    n = 2 * g
    if len(xs) != n or len(ps) != g - 2:
        raise ValueError("need 2g expansion points and g-2 fixed points")

    S_cache: dict = {}

    def S_set(idx):
        key = ("s", frozenset(idx))
        if key not in S_cache:
            S_cache[key] = ctx.S([xs[i] for i in idx])
        return S_cache[key]

    def S_trip_b(ia, ib, ic, drop):
        key = ("t", frozenset((ia, ib, ic)), drop)
        if key not in S_cache:
            base = [p for k, p in enumerate(ps) if k != drop]
            S_cache[key] = ctx.S([xs[ia], xs[ib], xs[ic], *base])
        return S_cache[key]

    def S_pair_b(ia, ib):
        key = ("p", frozenset((ia, ib)))
        if key not in S_cache:
            S_cache[key] = ctx.S([xs[ia], xs[ib], *ps])
        return S_cache[key]

    Exx = {(i, j): ctx.E(xs[i], xs[j]) for i in range(n) for j in range(n) if i != j}
    Exp = {(i, k): ctx.E(xs[i], ps[k]) for i in range(n) for k in range(g - 2)}

    perms = list(itertools.permutations(range(n)))
    total = 0.0 + 0.0j
    abssum = 0.0
    for s in perms:
        sign = dc._perm_sign_rows(np.array(s)[None, :])[0]
        term = complex(sign)
        for kk, drop in ((0, i1), (1, i2)):
            num = (S_trip_b(s[kk], s[g + kk], s[n - 1], drop)
                   * Exx[(s[kk], s[n - 1])] * Exx[(s[kk + g], s[n - 1])])
            den = (Exp[(s[kk], drop)] * Exp[(s[kk + g], drop)]
                   * Exp[(s[n - 1], drop)])
            term *= num / den
        for kk in range(g - 1):
            term *= Exx[(s[kk], s[kk + g])]
            for jj in range(g - 2):
                term *= Exp[(s[kk], jj)] * Exp[(s[kk + g], jj)]
        term *= S_set(s[:g])
        for a in range(g):
            for b in range(a + 1, g):
                term *= Exx[(s[a], s[b])]
        term *= S_set(s[g - 1: n - 1])
        for a in range(g - 1, n - 1):
            for b in range(a + 1, n - 1):
                term *= Exx[(s[a], s[b])]
        for kk in range(2, g - 1):
            term *= S_pair_b(s[kk], s[kk + g])
        for jj in range(g - 2):
            term *= Exp[(s[n - 1], jj)] ** 2
        total += term
        abssum += abs(term)
    return float(abs(total) / max(abssum / len(perms), 1e-300))

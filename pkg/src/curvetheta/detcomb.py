"""Determinant combinatorics for pair products of functions.

Implements the index surjection m(i,j) on unordered pairs (row-major upper
triangle, which makes {m(i,j): min(i,j) <= n} an initial segment), the
g-tuples d^k(s), the map varkappa built from tuples of permutations, the
integer constants obtained by summing signs of varkappa over permutation
tuples, and numerical evaluators for both sides of the two determinant
expansion identities.

Everything here is 0-based; the docstrings quote 1-based examples where
that is clearer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "lam_matrix",
    "pair_list",
    "d_tuples",
    "varkappa_full",
    "varkappa_reduced",
    "c_constant",
    "c_prime_constant",
    "c_ratio_oracle",
    "lemma1_sides",
    "lemma1_residual",
    "lemma2_sides",
    "lemma2_residual",
    "pprime_perms",
    "random_condition_data",
    "ENUM_BUDGET",
]

ENUM_BUDGET = 10 ** 8


@lru_cache(maxsize=None)
def lam_matrix(g: int) -> np.ndarray:
    """Symmetric pair index m(i,j): row-major over the upper triangle."""
    mm = np.zeros((g, g), dtype=np.int64)
    k = 0
    for i in range(g):
        for j in range(i, g):
            mm[i, j] = mm[j, i] = k
            k += 1
    mm.setflags(write=False)
    return mm


@lru_cache(maxsize=None)
def pair_list(g: int) -> tuple[tuple[int, int], ...]:
    """Inverse of `lam_matrix`: position -> (i, j) with i <= j."""
    out = []
    for i in range(g):
        for j in range(i, g):
            out.append((i, j))
    return tuple(out)


def d_tuples(s, g: int) -> np.ndarray:
    """The g+1 rows d^k(s), each of length g, with d^i_j = d^{j+1}_i = s[m(i,j)].

    `s` is any integer map defined on the M = g(g+1)/2 pair positions.
    """
    s = np.asarray(s)
    mm = lam_matrix(g)
    D = np.empty((g + 1, g), dtype=s.dtype)
    for i in range(g):
        for j in range(i, g):
            val = s[mm[i, j]]
            D[i, j] = val
            D[j + 1, i] = val
    return D


def _perm_sign_rows(rows: np.ndarray) -> np.ndarray:
    """Vectorized permutation sign of each row; 0 when entries repeat."""
    n = rows.shape[1]
    inv = np.zeros(rows.shape[0], dtype=np.int64)
    ok = np.ones(rows.shape[0], dtype=bool)
    for a in range(n):
        for b in range(a + 1, n):
            inv += rows[:, a] > rows[:, b]
            ok &= rows[:, a] != rows[:, b]
    sign = np.where(inv % 2 == 0, 1, -1)
    return np.where(ok, sign, 0)


def varkappa_full(rs, g: int) -> tuple[np.ndarray, int]:
    """varkappa over all pair positions from g+1 permutations of {0..g-1}.

    Returns (values over positions, sign); sign is 0 unless the values are a
    permutation of all positions.
    """
    rs = [np.asarray(r) for r in rs]
    if len(rs) != g + 1 or any(sorted(r) != list(range(g)) for r in rs):
        raise ValueError(f"need g+1 = {g + 1} permutations of 0..{g - 1}")
    mm = lam_matrix(g)
    M = g * (g + 1) // 2
    out = np.empty(M, dtype=np.int64)
    for i in range(g):
        for j in range(i, g):
            out[mm[i, j]] = mm[rs[i][j], rs[j + 1][i]]
    sign = int(_perm_sign_rows(out[None, :])[0])
    return out, sign


def varkappa_reduced(rs, g: int, n: int) -> tuple[np.ndarray, int]:
    """varkappa restricted to the first L positions, from n permutations of
    {0..g-1} followed by g+1-n permutations of {0..n-1}."""
    rs = [np.asarray(r) for r in rs]
    if len(rs) != g + 1:
        raise ValueError("need g+1 permutation entries")
    for k, r in enumerate(rs):
        want = g if k < n else n
        if sorted(r) != list(range(want)):
            raise ValueError(f"slot {k} must be a permutation of 0..{want - 1}")
    mm = lam_matrix(g)
    L = g * (g + 1) // 2 - (g - n) * (g - n + 1) // 2
    out = np.empty(L, dtype=np.int64)
    for i in range(n):
        for j in range(i, g):
            out[mm[i, j]] = mm[rs[i][j], rs[j + 1][i]]
    rows = out[None, :]
    in_range = bool((rows < L).all())
    sign = int(_perm_sign_rows(rows)[0]) if in_range else 0
    return out, sign


# -- signed enumeration engine ----------------------------------------------


@dataclass(frozen=True)
class _Slot:
    values: np.ndarray          # (count, width) permutation value rows
    signs: np.ndarray           # (count,)
    colmap: dict                # raw index -> column in `values`


@lru_cache(maxsize=None)
def _perm_table(width: int) -> tuple[np.ndarray, np.ndarray]:
    vals = np.array(list(itertools.permutations(range(width))), dtype=np.int64)
    return vals, _perm_sign_rows(vals)


def _subset_slot(raw_indices: tuple[int, ...]) -> _Slot:
    """Permutations of an ordered index subset, as raw-value rows."""
    raw = sorted(raw_indices)
    vals, signs = _perm_table(len(raw))
    rows = np.array(raw, dtype=np.int64)[vals]
    return _Slot(rows, signs, {r: c for c, r in enumerate(raw)})


def _full_slot(g: int) -> _Slot:
    vals, signs = _perm_table(g)
    return _Slot(vals, signs, {i: i for i in range(g)})


def _signed_sum(slots: list[_Slot], positions, target: list[int], g: int) -> int:
    """sum over slot tuples of prod(slot signs) * sign(varkappa on `target`).

    positions[t] = (slot_a, raw_a, slot_b, raw_b) builds the value
    mm[v_a, v_b] expected to land at target[t]; the row is alive only when
    its values are a permutation of `target`.
    """
    mm = lam_matrix(g)
    M = g * (g + 1) // 2
    L = len(target)
    rank = -np.ones(M, dtype=np.int64)
    rank[np.array(target)] = np.arange(L)

    sizes = [s.values.shape[0] for s in slots]
    rest_shape = tuple(sizes[1:])
    total_rest = int(np.prod(rest_shape)) if rest_shape else 1

    def rest_axis(arr_1d, axis):
        shape = [1] * len(rest_shape)
        shape[axis] = len(arr_1d)
        return arr_1d.reshape(shape)

    sign_rest = np.ones(rest_shape if rest_shape else (1,), dtype=np.int64)
    for s_idx in range(1, len(slots)):
        sign_rest = sign_rest * rest_axis(slots[s_idx].signs, s_idx - 1)
    sign_rest = sign_rest.ravel()

    total = 0
    mapped = np.empty((total_rest, L), dtype=np.int64)
    for t0 in range(sizes[0]):
        for t, (sa, ra, sb, rb) in enumerate(positions):
            if sa == 0:
                va = slots[0].values[t0, slots[0].colmap[ra]]
                va_arr = None
            else:
                va_arr = rest_axis(slots[sa].values[:, slots[sa].colmap[ra]], sa - 1)
            if sb == 0:
                vb = slots[0].values[t0, slots[0].colmap[rb]]
                vb_arr = None
            else:
                vb_arr = rest_axis(slots[sb].values[:, slots[sb].colmap[rb]], sb - 1)
            if va_arr is None and vb_arr is None:
                vals = np.full(rest_shape if rest_shape else (1,), mm[va, vb])
            elif va_arr is None:
                vals = mm[va, vb_arr]
            elif vb_arr is None:
                vals = mm[va_arr, vb]
            else:
                vals = mm[va_arr, vb_arr]
            mapped[:, t] = np.broadcast_to(rank[vals], rest_shape or (1,)).ravel()
        alive = (mapped >= 0).all(axis=1)
        ksign = _perm_sign_rows(mapped)
        total += int(slots[0].signs[t0]) * int((sign_rest * ksign * alive).sum())
    return total


def _check_budget(g: int, n: int, widths: list[int]):
    count = 1
    for w in widths:
        count *= math.factorial(w)
    if count > ENUM_BUDGET:
        raise ValueError(
            f"enumeration of {count:.2e} permutation tuples exceeds the "
            f"budget {ENUM_BUDGET:.0e}; use c_ratio_oracle instead")


def _positions_reduced(g: int, n: int):
    mm = lam_matrix(g)
    target, positions = [], []
    for i in range(n):
        for j in range(i, g):
            target.append(int(mm[i, j]))
            positions.append((i, j, j + 1, i))
    order = np.argsort(target)
    return [positions[k] for k in order], sorted(target)


@lru_cache(maxsize=None)
def c_constant(g: int, n: int) -> int:
    """Exact integer sum of signed varkappa values over permutation tuples.

    c(g,g) gives 6, 360, 302400 for g = 2, 3, 4; c(g,1) = g! and
    c(g,2) = g!(g-1)!(2g-1).
    """
    if not 1 <= n <= g:
        raise ValueError("need 1 <= n <= g")
    widths = [g] * n + [n] * (g + 1 - n)
    _check_budget(g, n, widths)
    slots = [_full_slot(g) if k < n else _subset_slot(tuple(range(n)))
             for k in range(g + 1)]
    positions, target = _positions_reduced(g, n)
    return _signed_sum(slots, positions, target, g)


@lru_cache(maxsize=None)
def c_prime_constant(g: int, n: int, i: int, j: int) -> int:
    """Constant for the one-extra-row expansion; (i, j) 0-based with n <= i <= j < g."""
    if not (n < g and n <= i <= j < g):
        raise ValueError("need n < g and n <= i <= j < g (0-based)")
    widths = [g] * n + [n + 1, n + 1] + [n] * (g - n - 1)
    _check_budget(g, n, widths)
    mm = lam_matrix(g)
    slots = []
    for k in range(g + 1):
        if k < n:
            slots.append(_full_slot(g))
        elif k == i:
            slots.append(_subset_slot(tuple(range(n)) + (j,)))
        elif k == j + 1:
            slots.append(_subset_slot(tuple(range(n)) + (i,)))
        else:
            slots.append(_subset_slot(tuple(range(n))))
    positions, raw_targets = [], []
    for a in range(n):
        for b in range(a, g):
            positions.append((a, b, b + 1, a))
            raw_targets.append(int(mm[a, b]))
    positions.append((i, j, j + 1, i))
    raw_targets.append(int(mm[i, j]))
    order = np.argsort(raw_targets)
    positions = [positions[k] for k in order]
    target = sorted(raw_targets)
    return _signed_sum(slots, positions, target, g)


@lru_cache(maxsize=None)
def pprime_perms(g: int) -> np.ndarray:
    """The reduced permutation set of the full-pair identity (0-based rows).

    Conditions (1-based): s_1 = 1, s_2 < ... < s_g, and s_2 < s_i for
    g+1 <= i <= 2g-1. Summing over it counts each term once instead of
    (g+1)! times.
    """
    M = g * (g + 1) // 2
    rows = []
    for p in itertools.permutations(range(1, M)):
        s = (0,) + p
        if any(s[k] >= s[k + 1] for k in range(1, g - 1)):
            continue
        if any(s[k] <= s[1] for k in range(g, 2 * g - 1)):
            continue
        rows.append(s)
    return np.array(rows, dtype=np.int64)


# -- determinant evaluators --------------------------------------------------


def _row_positions_full(g: int, k: int) -> list[int]:
    """Pair positions feeding row d^k (0-based k), all g entries."""
    mm = lam_matrix(g)
    out = []
    for j in range(g):
        if j <= k - 1:
            out.append(int(mm[j, k - 1]))
        else:
            out.append(int(mm[k, j]))
    return out


def _row_positions_partial(g: int, n: int, k: int) -> list[int]:
    """First n entries of row d^k for k >= n (0-based)."""
    mm = lam_matrix(g)
    return [int(mm[a, k - 1]) for a in range(n)]


def _batched_dets(mat: np.ndarray) -> np.ndarray:
    return np.linalg.det(mat)


def _pair_det_lhs(fx: np.ndarray, target: list[int], g: int) -> complex:
    """det over pair positions `target` of f_i f_j at the first len(target) points."""
    pairs = pair_list(g)
    L = len(target)
    cols = np.stack([fx[pairs[p][0], :L] * fx[pairs[p][1], :L] for p in target], axis=1)
    return complex(np.linalg.det(cols))


def lemma1_sides(g: int, n: int, fx: np.ndarray, fp: np.ndarray | None,
                 use_pprime: bool = True) -> tuple[complex, complex, float]:
    """Both sides of the pair-determinant expansion; returns (lhs, rhs, term scale).

    fx: (g, L) function values at the expansion points, L = M - (g-n)(g-n+1)/2.
    fp: (g, g-n) values at the condition points p_{n+1}..p_g (None when n = g);
    the identity presumes f_i(p_j) = delta_{ij} for i <= j on those columns.
    """
    M = g * (g + 1) // 2
    L = M - (g - n) * (g - n + 1) // 2
    fx = np.asarray(fx, dtype=np.complex128)
    if fx.shape != (g, L):
        raise ValueError(f"fx must be (g, {L})")
    if n < g:
        fp = np.asarray(fp, dtype=np.complex128)
        if fp.shape != (g, g - n):
            raise ValueError(f"fp must be (g, {g - n})")
        for a in range(g):
            for b in range(g - n):
                want = 1.0 if a == n + b else 0.0
                if a <= n + b and abs(fp[a, b] - want) > 1e-12:
                    raise ValueError("condition values f_i(p_j) = delta_ij violated")

    _, target = _positions_reduced(g, n)
    lhs = _pair_det_lhs(fx, target, g)

    if n == g:
        perms = pprime_perms(g)
        c = c_constant(g, g) / math.factorial(g + 1)
    else:
        perms = np.array(list(itertools.permutations(range(L))), dtype=np.int64)
        c = c_constant(g, n)
    rank = -np.ones(M, dtype=np.int64)
    rank[np.array(target)] = np.arange(L)
    signs = _perm_sign_rows(perms)

    prod = np.ones(perms.shape[0], dtype=np.complex128)
    for k in range(g + 1):
        if k < n or n == g:
            pos = np.array([rank[p] for p in _row_positions_full(g, k)])
            idx = perms[:, pos]                       # (S, g) point indices
            mats = fx[:, idx]                         # (g, S, g)
            mats = np.moveaxis(mats, 1, 0)            # (S, g, g)
        else:
            pos = np.array([rank[p] for p in _row_positions_partial(g, n, k)])
            idx = perms[:, pos]                       # (S, n)
            xcols = np.moveaxis(fx[:, idx], 1, 0)     # (S, g, n)
            pcols = np.broadcast_to(fp, (perms.shape[0],) + fp.shape)
            mats = np.concatenate([xcols, pcols], axis=2)
        prod = prod * _batched_dets(mats)
    terms = signs * prod
    rhs = complex(terms.sum() / c)
    scale = float(np.abs(terms).mean() / abs(c)) if len(terms) else 0.0
    return lhs, rhs, scale


def lemma1_residual(g: int, n: int, fx, fp=None) -> float:
    lhs, rhs, scale = lemma1_sides(g, n, fx, fp)
    floor = max(1.0, scale)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), floor)


def lemma2_sides(g: int, n: int, i: int, j: int, fx: np.ndarray,
                 fp: np.ndarray) -> tuple[complex, complex, float]:
    """Both sides of the one-extra-row expansion, (i, j) 0-based, n <= i <= j < g.

    fx: (g, L+1) values; fp: (g, g-n) values at the condition points with
    f_a(p_b) = delta_ab (the evaluator uses the full-matrix determinants, so
    tests supply data with both triangles of the delta condition).
    """
    if not (n < g and n <= i <= j < g):
        raise ValueError("need n < g and n <= i <= j < g (0-based)")
    mm = lam_matrix(g)
    M = g * (g + 1) // 2
    L = M - (g - n) * (g - n + 1) // 2
    fx = np.asarray(fx, dtype=np.complex128)
    fp = np.asarray(fp, dtype=np.complex128)
    if fx.shape != (g, L + 1):
        raise ValueError(f"fx must be (g, {L + 1})")

    target = sorted([int(mm[a, b]) for a in range(n) for b in range(a, g)]
                    + [int(mm[i, j])])
    lhs = _pair_det_lhs(fx, target, g)

    rank = -np.ones(M, dtype=np.int64)
    rank[np.array(target)] = np.arange(L + 1)
    perms = np.array(list(itertools.permutations(range(L + 1))), dtype=np.int64)
    signs = _perm_sign_rows(perms)
    extra_pos = rank[mm[i, j]]

    prod = np.ones(perms.shape[0], dtype=np.complex128)
    for k in range(g + 1):
        if k < n:
            pos = np.array([rank[p] for p in _row_positions_full(g, k)])
            mats = np.moveaxis(fx[:, perms[:, pos]], 1, 0)
        else:
            pos = np.array([rank[p] for p in _row_positions_partial(g, n, k)])
            idx = perms[:, pos]
            xcols = np.moveaxis(fx[:, idx], 1, 0)     # (S, g, n)
            if k == i or k == j + 1:
                # the shared extra point joins both special factors, and the
                # condition point checked off is the partner index
                extra = np.moveaxis(fx[:, perms[:, [extra_pos]]], 1, 0)
                drop = j if k == i else i
                keep = [b for b in range(g - n) if n + b != drop]
                pcols = np.broadcast_to(fp[:, keep], (perms.shape[0], g, len(keep)))
                mats = np.concatenate([xcols, extra, pcols], axis=2)
            else:
                pcols = np.broadcast_to(fp, (perms.shape[0],) + fp.shape)
                mats = np.concatenate([xcols, pcols], axis=2)
        prod = prod * _batched_dets(mats)
    cpr = c_prime_constant(g, n, i, j)
    if cpr == 0:
        raise ArithmeticError("degenerate expansion constant")
    # interleaving the checked function rows past the condition block costs
    # one transposition parity per special factor
    block_sign = (-1) ** (i + j)
    terms = block_sign * signs * prod
    rhs = complex(terms.sum() / cpr)
    scale = float(np.abs(terms).mean() / abs(cpr))
    return lhs, rhs, scale


def lemma2_residual(g: int, n: int, i: int, j: int, fx, fp) -> float:
    lhs, rhs, scale = lemma2_sides(g, n, i, j, fx, fp)
    floor = max(1.0, scale)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), floor)


def random_condition_data(g: int, n: int, n_points: int, rng,
                          strict_triangle: bool = False):
    """Random complex f-values (g, n_points) plus condition values (g, g-n).

    The condition block is the identity pattern f_a(p_b) = delta_{a,n+b};
    with strict_triangle the lower part is random (only the i <= j part of
    the condition is imposed).
    """
    fx = rng.normal(size=(g, n_points)) + 1j * rng.normal(size=(g, n_points))
    if n == g:
        return fx, None
    fp = np.zeros((g, g - n), dtype=np.complex128)
    for b in range(g - n):
        fp[n + b, b] = 1.0
        if strict_triangle:
            low = np.arange(g) > n + b
            fp[low, b] = rng.normal(size=low.sum()) + 1j * rng.normal(size=low.sum())
    return fx, fp


def c_ratio_oracle(g: int, n: int, seed: int = 0, max_tries: int = 8) -> complex:
    """Estimate the expansion constant from random data as rhs_sum / lhs_det."""
    rng = np.random.default_rng(seed)
    M = g * (g + 1) // 2
    L = M - (g - n) * (g - n + 1) // 2
    for _ in range(max_tries):
        fx, fp = random_condition_data(g, n, L, rng)
        lhs, rhs_over_c, scale = lemma1_sides(g, n, fx, fp)
        # rhs_over_c already divides by the constant; undo it
        if n == g:
            c_used = c_constant(g, g) / math.factorial(g + 1)
            raw = rhs_over_c * c_used * math.factorial(g + 1)
        else:
            raw = rhs_over_c * c_constant(g, n)
        if abs(lhs) > 1e-9 * max(1.0, scale):
            return raw / lhs
    raise ArithmeticError("could not find a well-conditioned sample")

"""Multi-index bookkeeping for symmetric powers of C^g.

A nondecreasing n-tuple over {1..g} labels one coordinate of Sym^n C^g;
this module fixes the orderings of those tuples, the repetition
multiplicities chi, and the induced symmetric power of a g x g matrix.

Index conventions are 1-based in the math and 0-based in the arrays;
tuples stored here use 0-based entries.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "Convention",
    "MultiIndexTable",
    "build_table",
    "sym_power",
    "sym_embed",
    "sym_dim",
]


class Convention(Enum):
    # diagonal tuples first, then off-diagonal blocks row by row
    PAPER_ORDER = "paper"
    # plain lexicographic order on nondecreasing tuples
    LEX_ORDER = "lex"
    # row-major upper triangle (pairs only); makes the index subsets
    # {m(i,j): min(i,j) <= n} initial segments
    LAM_SURJECTION = "lam"


def sym_dim(g: int, n: int) -> int:
    """Dimension of Sym^n C^g, binom(g+n-1, n)."""
    return math.comb(g + n - 1, n)


def _chi(tup: tuple[int, ...], g: int) -> int:
    counts = [0] * g
    for t in tup:
        counts[t] += 1
    out = 1
    for c in counts:
        out *= math.factorial(c)
    return out


def _paper_order_pairs(g: int) -> list[tuple[int, int]]:
    tuples = [(i, i) for i in range(g)]
    for i in range(g):
        for j in range(i + 1, g):
            tuples.append((i, j))
    return tuples


def _paper_order_triples(g: int) -> list[tuple[int, int, int]]:
    head: list[tuple[int, int, int]] = [(i, i, i) for i in range(g)]
    head += [(0, 0, k) for k in range(1, g)]
    head += [(1, 1, k) for k in range(2, g)]
    head += [(0, 1, k) for k in range(1, g)]
    head += [(0, k, k) for k in range(2, g)]
    head += [(1, k, k) for k in range(2, g)]
    seen = set(head)
    tail = [t for t in itertools.combinations_with_replacement(range(g), 3)
            if t not in seen]
    return head + sorted(tail)


@dataclass(frozen=True)
class MultiIndexTable:
    """Ordered list of nondecreasing n-tuples over {0..g-1} with multiplicities."""

    g: int
    n: int
    convention: Convention
    tuples: tuple[tuple[int, ...], ...]
    chi: tuple[int, ...]
    _pos: dict[tuple[int, ...], int] = field(repr=False, compare=False, default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.tuples)

    def index_of(self, tup) -> int:
        """Position of the (unordered) tuple in the table."""
        return self._pos[tuple(sorted(tup))]

    def pair_index(self, i: int, j: int) -> int:
        """m(i,j) for n = 2, 0-based in and out."""
        if self.n != 2:
            raise ValueError("pair_index requires an n=2 table")
        return self._pos[(min(i, j), max(i, j))]

    def to_json(self) -> str:
        return json.dumps({
            "g": self.g, "n": self.n, "convention": self.convention.value,
            "tuples": [[t + 1 for t in tup] for tup in self.tuples],
            "chi": list(self.chi),
        })


def build_table(g: int, n: int, convention: Convention = Convention.PAPER_ORDER) -> MultiIndexTable:
    """Enumerate the nondecreasing n-tuples over {1..g} in the given order."""
    if g < 1:
        raise ValueError("g must be a positive integer")
    if n < 1:
        raise ValueError("n must be a positive integer")
    if convention is Convention.LAM_SURJECTION:
        if n != 2:
            raise ValueError("LAM_SURJECTION is defined for n=2 only")
        tuples = [(i, j) for i in range(g) for j in range(i, g)]
    elif convention is Convention.PAPER_ORDER:
        if n == 1:
            tuples = [(i,) for i in range(g)]
        elif n == 2:
            tuples = _paper_order_pairs(g)
        elif n == 3:
            tuples = _paper_order_triples(g)
        else:
            diag = [(i,) * n for i in range(g)]
            seen = set(diag)
            rest = [t for t in itertools.combinations_with_replacement(range(g), n)
                    if t not in seen]
            tuples = diag + sorted(rest)
    else:
        tuples = sorted(itertools.combinations_with_replacement(range(g), n))

    size = sym_dim(g, n)
    if len(tuples) != size or len(set(tuples)) != size:
        raise AssertionError("tuple enumeration does not match binom(g+n-1,n)")
    chi = tuple(_chi(t, g) for t in tuples)
    pos = {t: k for k, t in enumerate(tuples)}
    return MultiIndexTable(g=g, n=n, convention=convention,
                           tuples=tuple(tuples), chi=chi, _pos=pos)


def sym_power(B: np.ndarray, n: int, table: MultiIndexTable) -> np.ndarray:
    """Symmetric n-fold power (B...B)_{ij} = sum_{s in P_n} prod_m B[m_i, s(m)_j].

    For B the identity this is diag(chi). Direct sum over n! permutations;
    fine for the n <= 3 used in practice.
    """
    B = np.asarray(B)
    g, n_, tab = table.g, table.n, table
    if n != n_:
        raise ValueError("table order does not match n")
    if B.shape != (g, g):
        raise ValueError(f"B must be {g}x{g}, got {B.shape}")
    T = np.array(tab.tuples)                      # (M, n)
    M = tab.size
    if B.dtype == object:
        out = np.zeros((M, M), dtype=object)
    else:
        out = np.zeros((M, M), dtype=np.complex128)
    for s in itertools.permutations(range(n)):
        term = None
        for m in range(n):
            f = B[T[:, None, m], T[None, :, s[m]]]
            term = f if term is None else term * f
        out = out + term
    return out


def sym_embed(u: np.ndarray, n: int, table: MultiIndexTable) -> np.ndarray:
    """Coordinates of u^{tensor n} in the table basis: chi_i^{-1} prod u_{m_i}.

    Compatibility: sym_embed(B @ u) == diag(chi)^{-1} @ sym_power(B) @ sym_embed(u).
    """
    u = np.asarray(u)
    if u.shape != (table.g,):
        raise ValueError(f"u must have length {table.g}")
    T = np.array(table.tuples)
    prods = np.prod(u[T], axis=1)
    return prods / np.array(table.chi)


def sym_sum_check(f, g: int, n: int, table: MultiIndexTable | None = None) -> tuple:
    """Both sides of the reindexing identity

        sum_{i_1..i_n} f(i_1..i_n) = sum_i chi_i^{-1} sum_{s in P_n} f(s(m)_i ...)

    evaluated exactly for integer-valued f (returns a Fraction-free pair).
    """
    tab = table or build_table(g, n)
    lhs = 0
    for idx in itertools.product(range(g), repeat=n):
        lhs += f(*idx)
    rhs_num = 0
    # accumulate over a common denominator lcm(chi) to stay exact
    denom = math.lcm(*tab.chi)
    for tup, chi in zip(tab.tuples, tab.chi):
        s_sum = 0
        for s in itertools.permutations(tup):
            s_sum += f(*s)
        rhs_num += s_sum * (denom // chi)
    return lhs, rhs_num, denom

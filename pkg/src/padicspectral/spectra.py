"""Spectral pairs of finite sets through exact character matrices.

For finite sets the pairing is ``(c, d) -> exp(2 pi i c d / p^gamma)`` on
residues, or ``chi(c d)`` for points of Q_p.  Orthogonality of two rows
reduces to the vanishing of a root-of-unity sum over differences, which is
decided exactly by the progression test on its exponent counts.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .cyclotomic import progressions_constant, progressions_constant_rows, sparse_sum_vanishes
from .padic import PAdicScaled, RootOfUnity, check_prime
from .trees import dual_tree, recover_structure

DEFAULT_MAX_SCALE = 81


class ScaleGuardError(ValueError):
    pass


def check_scale(N: int, max_scale: Optional[int], what: str = "exhaustive search") -> None:
    limit = DEFAULT_MAX_SCALE if max_scale is None else max_scale
    if N > limit:
        raise ScaleGuardError(
            f"p^gamma = {N} exceeds the {what} limit {limit}; "
            f"raise it with max_scale (CLI: --max-scale)")


def pairing_exponents(C: Sequence, D: Sequence, p: int, gamma: Optional[int]):
    """Integers X, Y and a level L with pairing(c_i, d_j) = w_{p^L}^(X_i Y_j).

    Residue inputs use level gamma directly.  For points of Q_p both sides are
    scaled to integers and the level absorbs the scales.
    """
    if all(isinstance(c, (int, np.integer)) for c in list(C) + list(D)):
        if gamma is None:
            raise ValueError("gamma is required for residue inputs")
        return [int(c) for c in C], [int(d) for d in D], gamma
    C = [PAdicScaled.of(p, c) if not isinstance(c, PAdicScaled) else c for c in C]
    D = [PAdicScaled.of(p, d) if not isinstance(d, PAdicScaled) else d for d in D]
    a = max(c.m for c in C)
    b = max(d.m for d in D)
    X = [c.scale(a).a for c in C]
    Y = [d.scale(b).a for d in D]
    return X, Y, max(a + b, 0)


@dataclass(frozen=True)
class CharacterMatrix:
    C: tuple
    D: tuple
    p: int
    level: int
    entries: tuple  # rows of RootOfUnity

    @property
    def shape(self):
        return (len(self.C), len(self.D))

    def to_complex(self) -> np.ndarray:
        return np.array([[r.to_complex() for r in row] for row in self.entries])

    def exponents(self) -> np.ndarray:
        """Entry exponents at the common level."""
        return np.array([[r.exponent_at(self.level) for r in row] for row in self.entries], dtype=np.int64)


def character_matrix(C: Sequence, D: Sequence, p: int, gamma: Optional[int] = None) -> CharacterMatrix:
    check_prime(p)
    X, Y, L = pairing_exponents(C, D, p, gamma)
    entries = tuple(tuple(RootOfUnity(p, L, x * y) for y in Y) for x in X)
    return CharacterMatrix(tuple(C), tuple(D), p, L, entries)


class _SumOracle:
    """Decides whether sum_{y in Y} w_{p^L}^(delta y) vanishes, memoised on delta mod p^L."""

    DENSE_LIMIT = 1 << 16

    def __init__(self, Y: Sequence[int], p: int, L: int):
        self.p, self.L, self.N = p, L, p ** L
        self.dense = self.N <= self.DENSE_LIMIT
        ys = [y % self.N for y in Y]
        self.Y = np.array(ys, dtype=np.int64) if self.dense else ys
        self.cache: dict = {}

    def vanishes(self, delta: int) -> bool:
        delta %= self.N
        hit = self.cache.get(delta)
        if hit is None:
            if self.dense:
                counts = np.bincount((self.Y * delta) % self.N, minlength=self.N)
                hit = progressions_constant(counts, self.p, self.L)
            else:
                hit = sparse_sum_vanishes((y * delta for y in self.Y), self.p, self.L)
            self.cache[delta] = hit
        return hit


def is_hadamard(C: Sequence, D: Sequence, p: int, gamma: Optional[int] = None) -> bool:
    """Exact test that the character matrix H satisfies H H^* = #C * Id."""
    C, D = list(C), list(D)
    if len(C) != len(D):
        raise ValueError(f"dimension mismatch: #C={len(C)}, #D={len(D)}")
    check_prime(p)
    if len(set(C)) != len(C) or len(set(D)) != len(D):
        return False
    X, Y, L = pairing_exponents(C, D, p, gamma)
    if len(X) <= 1:
        return True
    N = p ** L
    if N <= _SumOracle.DENSE_LIMIT and len(X) * len(X) <= 1 << 24:
        Xa = np.array([x % N for x in X], dtype=np.int64)
        iu = np.triu_indices(len(Xa), 1)
        deltas = np.unique((Xa[:, None] - Xa[None, :])[iu] % N)
        if deltas[0] == 0:
            return False  # two rows coincide
        Ya = np.array([y % N for y in Y], dtype=np.int64)
        step = max(1, (1 << 22) // N)
        for lo in range(0, len(deltas), step):
            rows = (deltas[lo:lo + step, None] * Ya[None, :]) % N
            counts = np.zeros((rows.shape[0], N), dtype=np.int64)
            np.add.at(counts, (np.repeat(np.arange(rows.shape[0]), rows.shape[1]), rows.ravel()), 1)
            if not progressions_constant_rows(counts, p, L).all():
                return False
        return True
    oracle = _SumOracle(Y, p, L)
    return all(oracle.vanishes(x - x2) for i, x in enumerate(X) for x2 in X[i + 1:])


def gram_matrix_float(C: Sequence, D: Sequence, p: int, gamma: Optional[int] = None) -> np.ndarray:
    H = character_matrix(C, D, p, gamma).to_complex()
    return H @ H.conj().T


def spectrum_for_homogeneous(C: Iterable[int], p: int, gamma: int) -> list:
    t = recover_structure(C, p, gamma)
    if t is None:
        raise ValueError("C is not p-homogeneous")
    return dual_tree(t).leaves()


def zero_set(C: Iterable[int], p: int, gamma: int) -> np.ndarray:
    """Boolean mask over Z/p^gamma: entry d is True iff sum_{c in C} w^(c d) = 0."""
    N = p ** gamma
    C = np.array(sorted(set(int(c) % N for c in C)), dtype=np.int64)
    d = np.arange(N, dtype=np.int64)
    exps = np.outer(d, C) % N
    counts = np.zeros((N, N), dtype=np.int64)
    np.add.at(counts, (np.repeat(d, len(C)), exps.ravel()), 1)
    return progressions_constant_rows(counts, p, gamma)


def difference_mask(C: Iterable[int], N: int) -> np.ndarray:
    """Boolean mask of C - C mod N."""
    C = np.array(sorted(set(int(c) % N for c in C)), dtype=np.int64)
    mask = np.zeros(N, dtype=bool)
    mask[(C[:, None] - C[None, :]).ravel() % N] = True
    return mask


def min_difference_clique(allowed: np.ndarray, size: int) -> Optional[list]:
    """Lexicographically smallest sorted S in Z/N with 0 in S, #S = size and all differences allowed.

    ``allowed`` is a boolean mask over Z/N (must be symmetric under negation).
    """
    N = len(allowed)
    if size == 0:
        return []
    if size > N:
        return None
    if size == 1:
        return [0]
    allowed_bits = 0
    for d in range(1, N):
        if allowed[d]:
            allowed_bits |= 1 << d
    full = (1 << N) - 1

    def adj(x: int) -> int:
        # elements y > x with y - x allowed: rotate allowed mask by x
        rot = ((allowed_bits << x) | (allowed_bits >> (N - x))) & full
        return rot & ~((1 << (x + 1)) - 1)

    adjs = [adj(x) for x in range(N)]

    def dfs(chosen: list, cand: int) -> Optional[list]:
        need = size - len(chosen)
        if need == 0:
            return chosen
        while cand:
            if cand.bit_count() < need:
                return None
            low = cand & -cand
            x = low.bit_length() - 1
            cand ^= low
            found = dfs(chosen + [x], cand & adjs[x])
            if found is not None:
                return found
        return None

    return dfs([0], adjs[0])


def spectrum_search(C: Iterable[int], p: int, gamma: int, max_scale: Optional[int] = None) -> Optional[list]:
    """Lexicographically smallest spectrum D (with 0 in D) of C in Z/p^gamma, or None."""
    check_prime(p)
    N = p ** gamma
    check_scale(N, max_scale)
    C = list(C)
    if len(set(C)) != len(C):
        raise ValueError("C has repeated residues")
    if not C:
        return []
    Z = zero_set(C, p, gamma)
    return min_difference_clique(Z, len(C))

"""Exact arithmetic in Z[w] for w a primitive p**n-th root of unity.

Elements are coefficient vectors ``c`` of length ``p**n`` standing for
``sum_j c[j] w**j``.  The representation is not unique; zero testing uses
the fact that the integer relations among ``1, w, ..., w**(p**n - 1)`` are
exactly the vectors constant on every progression
``{i, i + p**(n-1), ..., i + (p-1) p**(n-1)}``.
"""
from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .padic import PAdicScaled, RootOfUnity, character, check_prime, frac_part, valuation


def progressions_constant(counts: np.ndarray, p: int, n: int) -> bool:
    """Zero test on a raw coefficient array of length p**n (any integer dtype)."""
    if n == 0:
        return counts[0] == 0
    block = p ** (n - 1)
    rows = np.asarray(counts).reshape(p, block)
    return bool((rows == rows[0]).all())


def progressions_constant_rows(counts: np.ndarray, p: int, n: int) -> np.ndarray:
    """Row-wise zero test for a 2-d array of coefficient vectors."""
    counts = np.asarray(counts)
    if n == 0:
        return counts[:, 0] == 0
    block = p ** (n - 1)
    rows = counts.reshape(counts.shape[0], p, block)
    return (rows == rows[:, :1, :]).all(axis=(1, 2))


def sparse_sum_vanishes(exponents: Iterable[int], p: int, n: int) -> bool:
    """Zero test for sum w_{p^n}^e over a multiset of exponents, without a dense vector."""
    size = p ** n
    counts = Counter(int(e) % size for e in exponents)
    if n == 0:
        return counts[0] == 0
    block = p ** (n - 1)
    for e, k in counts.items():
        r = e % block
        if any(counts.get(r + j * block, 0) != k for j in range(p)):
            return False
    return True


_EXACT_FLOAT = 2 ** 53
_DENSE_CELLS = 1 << 22


def exponent_rows_vanish(exps: np.ndarray, p: int, n: int, weights=None) -> np.ndarray:
    """For each row r, does sum_j weights[j] * w_{p^n}^exps[r, j] vanish?

    ``weights`` are positive integers shared by all rows (default 1).  Uses a
    dense count table when p**n is small, otherwise a pairwise class count
    that costs O(k^2) per row.
    """
    exps = np.asarray(exps, dtype=np.int64)
    R, k = exps.shape
    if R == 0:
        return np.zeros(0, dtype=bool)
    if weights is None:
        weights = np.ones(k, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.int64)
    if (weights <= 0).any():
        raise ValueError("weights must be positive")
    if int(weights.sum()) >= _EXACT_FLOAT:
        raise OverflowError("weights too large for exact accumulation")
    size = p ** n
    if n == 0:
        return np.zeros(R, dtype=bool)
    exps = exps % size
    out = np.empty(R, dtype=bool)
    if size <= max(k * k, 64):
        step = max(1, _DENSE_CELLS // size)
        w = np.broadcast_to(weights, (min(step, R), k))
        for lo in range(0, R, step):
            block = exps[lo:lo + step]
            r = block.shape[0]
            idx = (np.arange(r, dtype=np.int64)[:, None] * size + block).ravel()
            counts = np.bincount(idx, weights=w[:r].ravel(), minlength=r * size)
            counts = np.rint(counts).astype(np.int64).reshape(r, size)
            out[lo:lo + step] = progressions_constant_rows(counts, p, n)
        return out
    block_size = p ** (n - 1)
    step = max(1, _DENSE_CELLS // (k * k))
    for lo in range(0, R, step):
        e = exps[lo:lo + step]
        cls = e % block_size
        same_cls = cls[:, :, None] == cls[:, None, :]
        same_exp = e[:, :, None] == e[:, None, :]
        w_cls = (same_cls * weights[None, None, :]).sum(axis=2)
        w_exp = (same_exp * weights[None, None, :]).sum(axis=2)
        out[lo:lo + step] = (w_cls == p * w_exp).all(axis=1)
    return out


@dataclass(frozen=True, eq=False)
class CycInt:
    p: int
    n: int
    coeffs: tuple

    def __post_init__(self):
        check_prime(self.p)
        if self.n < 0:
            raise ValueError("level must be >= 0")
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(coeffs) != self.p ** self.n:
            raise ValueError(f"expected {self.p ** self.n} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, p: int, n: int = 0) -> "CycInt":
        return cls(p, n, (0,) * p ** n)

    @classmethod
    def integer(cls, p: int, value: int, n: int = 0) -> "CycInt":
        c = [0] * p ** n
        c[0] = value
        return cls(p, n, c)

    @classmethod
    def from_exponents(cls, p: int, n: int, exponents: Iterable[int], weights=None) -> "CycInt":
        """sum_j weights[j] * w**exponents[j] (unit weights by default)."""
        size = p ** n
        c = [0] * size
        if weights is None:
            for e in exponents:
                c[e % size] += 1
        else:
            for e, wt in zip(exponents, weights):
                c[e % size] += wt
        return cls(p, n, c)

    @classmethod
    def from_root(cls, root: RootOfUnity, level: Optional[int] = None) -> "CycInt":
        level = root.n if level is None else level
        return cls.from_exponents(root.p, level, [root.exponent_at(level)])

    # -- structure -------------------------------------------------------
    def raise_level(self, n2: int) -> "CycInt":
        """Same algebraic number written at level ``n2`` (w_{p^n} = w_{p^n2}^{p^(n2-n)})."""
        if n2 < self.n:
            raise ValueError(f"cannot lower level {self.n} to {n2}")
        if n2 == self.n:
            return self
        step = self.p ** (n2 - self.n)
        c = [0] * self.p ** n2
        for j, a in enumerate(self.coeffs):
            c[j * step] = a
        return CycInt(self.p, n2, c)

    def _align(self, other: "CycInt"):
        if self.p != other.p:
            raise ValueError("prime mismatch")
        n = max(self.n, other.n)
        return self.raise_level(n), other.raise_level(n)

    def is_zero(self) -> bool:
        return progressions_constant(np.array(self.coeffs, dtype=object), self.p, self.n)

    def conj(self) -> "CycInt":
        size = len(self.coeffs)
        return CycInt(self.p, self.n, [self.coeffs[-j % size] for j in range(size)])

    def norm_sq(self) -> "CycInt":
        return self * self.conj()

    def reduced(self) -> "CycInt":
        """Power-basis form: zero the top progression entry, then drop redundant levels.

        Two representations of the same number reduce to identical vectors;
        used for stable serialisation only.
        """
        p, n, c = self.p, self.n, list(self.coeffs)
        if n == 0:
            return self
        block = p ** (n - 1)
        for i in range(block):
            top = c[i + (p - 1) * block]
            if top:
                for j in range(p):
                    c[i + j * block] -= top
        # a number from a smaller level has its basis form on multiples of p
        while n > 0 and all(c[j] == 0 for j in range(len(c)) if j % p):
            c = c[::p]
            n -= 1
        return CycInt(p, n, c)

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            other = CycInt.integer(self.p, other)
        a, b = self._align(other)
        return CycInt(a.p, a.n, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.p, self.n, [-x for x in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, int):
            other = CycInt.integer(self.p, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.p, self.n, [x * other for x in self.coeffs])
        a, b = self._align(other)
        size = len(a.coeffs)
        out = [0] * size
        bnz = [(j, y) for j, y in enumerate(b.coeffs) if y]
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in bnz:
                    out[(i + j) % size] += x * y
        return CycInt(a.p, a.n, out)

    __rmul__ = __mul__

    def times_root(self, root: RootOfUnity) -> "CycInt":
        n = max(self.n, root.n)
        z = self.raise_level(n)
        shift = root.exponent_at(n)
        size = len(z.coeffs)
        out = [0] * size
        for j, x in enumerate(z.coeffs):
            out[(j + shift) % size] = x
        return CycInt(z.p, n, out)

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def to_complex(self) -> complex:
        size = len(self.coeffs)
        return sum(a * cmath.exp(2j * cmath.pi * j / size) for j, a in enumerate(self.coeffs) if a)

    def __repr__(self):
        return f"CycInt(p={self.p}, n={self.n}, {list(self.coeffs)})"


def cyc_arith(op: str, a: CycInt, b: CycInt) -> CycInt:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def is_zero(z: CycInt) -> bool:
    return z.is_zero()


def conj(z: CycInt) -> CycInt:
    return z.conj()


def norm_sq(z: CycInt) -> CycInt:
    return z.norm_sq()


def raise_level(z: CycInt, n2: int) -> CycInt:
    return z.raise_level(n2)


@dataclass(frozen=True, eq=False)
class CycRat:
    """``num / den`` with ``num`` a cyclotomic integer and ``den > 0``."""

    num: CycInt
    den: int = 1

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        g = self.den
        for c in self.num.coeffs:
            if g == 1:
                break
            g = math.gcd(g, c)
        if g > 1:
            object.__setattr__(self, "num", CycInt(self.num.p, self.num.n, [c // g for c in self.num.coeffs]))
            object.__setattr__(self, "den", self.den // g)

    @property
    def p(self) -> int:
        return self.num.p

    @classmethod
    def rational(cls, p: int, q, n: int = 0) -> "CycRat":
        q = Fraction(q)
        return cls(CycInt.integer(p, q.numerator, n), q.denominator)

    @classmethod
    def root(cls, root: RootOfUnity, coeff=1) -> "CycRat":
        q = Fraction(coeff)
        return cls(CycInt.from_root(root) * q.numerator, q.denominator)

    def __add__(self, other):
        if not isinstance(other, CycRat):
            other = CycRat.rational(self.p, other)
        return CycRat(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return CycRat(-self.num, self.den)

    def __sub__(self, other):
        if not isinstance(other, CycRat):
            other = CycRat.rational(self.p, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, CycRat):
            return CycRat(self.num * other.num, self.den * other.den)
        if isinstance(other, RootOfUnity):
            return CycRat(self.num.times_root(other), self.den)
        q = Fraction(other)
        return CycRat(self.num * q.numerator, self.den * q.denominator)

    __rmul__ = __mul__

    def conj(self) -> "CycRat":
        return CycRat(self.num.conj(), self.den)

    def norm_sq(self) -> "CycRat":
        return CycRat(self.num.norm_sq(), self.den * self.den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def equals(self, other) -> bool:
        """Exact equality: is_zero(num_a * den_b - num_b * den_a)."""
        if not isinstance(other, CycRat):
            q = Fraction(other)
            return (self.num * q.denominator - q.numerator * self.den).is_zero()
        return (self.num * other.den - other.num * self.den).is_zero()

    def is_one(self) -> bool:
        return (self.num - self.den).is_zero()

    def to_complex(self) -> complex:
        return self.num.to_complex() / self.den

    def __repr__(self):
        return f"CycRat({self.num!r} / {self.den})"


# -- vanishing sums -----------------------------------------------------------


def vanishing_decompose(exponents: Sequence[int], p: int, n: int) -> Optional[list[tuple[int, ...]]]:
    """Split a multiset of exponents mod p**n into p-cycles when its root sum vanishes.

    Returns cycles ``(r, r + p**(n-1), ..., r + (p-1) p**(n-1))`` in increasing
    order of ``r`` (repeated as often as they occur), or ``None`` when
    ``sum w**e`` is nonzero.
    """
    check_prime(p)
    size = p ** n
    counts = Counter(e % size for e in exponents)
    if n == 0:
        return [] if counts[0] == 0 else None
    block = p ** (n - 1)
    cycles = []
    for r in range(block):
        k = counts[r]
        if any(counts[r + j * block] != k for j in range(1, p)):
            return None
        cycles.extend([tuple(r + j * block for j in range(p))] * k)
    return cycles


def is_pn_cycle(C: Iterable[PAdicScaled], n: int) -> bool:
    """Is C = {s + j p^n + z_j : 0 <= j < p} with every |z_j| <= p^(-n-1)?

    Equivalently #C = p and every pairwise difference has valuation exactly n.
    """
    C = list(C)
    if not C:
        return False
    p = C[0].p
    if len(C) != p or len(set(C)) != p:
        return False
    return all(valuation(x - y) == n for i, x in enumerate(C) for y in C[i + 1:])


def cycle_level_for(xi: PAdicScaled) -> int:
    """The cycle index n such that sum_{c in C} chi(xi c) = 0 iff C splits into p^n-cycles.

    The spacing p^n of such cycles has |p^n|_p = p / |xi|_p, i.e. n = -1 - v_p(xi).
    """
    v = valuation(xi)
    if v == math.inf:
        raise ValueError("xi = 0 gives a nonvanishing sum")
    return -1 - int(v)


def split_into_cycles(C: Sequence[PAdicScaled], n: int) -> Optional[list[tuple[PAdicScaled, ...]]]:
    """Partition C into p^n-cycles if possible (deterministic; ``None`` otherwise).

    Points are grouped by their class mod p^(n+1) Z_p; a partition exists iff
    every coset of p^n Z_p meets the p sub-classes equally often.
    """
    C = sorted(set(C))
    if not C:
        return []
    p = C[0].p
    # class of x mod p^(n+1) Z_p, keyed inside its coset mod p^n Z_p
    by_coset: dict = {}
    for x in C:
        coarse = _residue_key(x, n)
        digit = _digit_at(x, n)
        by_coset.setdefault(coarse, {}).setdefault(digit, []).append(x)
    cycles = []
    for coarse in sorted(by_coset, key=lambda k: (k[1], k[0])):
        groups = by_coset[coarse]
        sizes = {len(groups.get(d, [])) for d in range(p)}
        if len(sizes) != 1:
            return None
        k = sizes.pop()
        for i in range(k):
            cycles.append(tuple(groups[d][i] for d in range(p)))
    return cycles


def _residue_key(x: PAdicScaled, n: int):
    """x mod p^n Z_p as a hashable key (numerator, denominator of the fraction part)."""
    f = frac_part(x.scale(-n))
    return (f.numerator, f.denominator)


def _digit_at(x: PAdicScaled, n: int) -> int:
    """Hensel digit of x at position n."""
    f = frac_part(x.scale(-n - 1))  # x / p^(n+1) mod Z_p, its top digit is a_n
    return int(f * x.p) % x.p


def character_sum(C: Iterable[PAdicScaled], xi: PAdicScaled) -> CycInt:
    """sum_{c in C} chi(xi c) exactly."""
    roots = [character(xi, c) for c in C]
    if not roots:
        return CycInt.zero(xi.p)
    level = max(r.n for r in roots)
    return CycInt.from_exponents(xi.p, level, [r.exponent_at(level) for r in roots])

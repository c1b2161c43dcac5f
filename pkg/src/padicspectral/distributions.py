"""Exact locally constant, compactly supported functions on Q_p.

A test function with constancy exponent ``lo`` and support exponent ``hi``
is stored on the grid of cells ``B(a p^-hi, p^lo)``, ``a`` in Z/p^(hi-lo).
Each cell value is a cyclotomic rational: an integer coefficient row in the
power basis of Q(w_{p^level}) over a shared denominator.  The canonical form
has the smallest support ball, the coarsest cells, the lowest level and a
reduced denominator, so equal functions have identical data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np

from .cyclotomic import CycInt, CycRat
from .measures import BallMeasure, DiscreteSetQp
from .padic import Ball, PAdicScaled, check_prime


def _reduce_rows(num: np.ndarray, p: int, level: int):
    """Power-basis rows at the lowest level that holds every row."""
    if level == 0:
        return num, 0
    block = p ** (level - 1)
    R = num.reshape(num.shape[0], p, block)
    num = (R - R[:, p - 1:p, :]).reshape(num.shape[0], -1)
    while level > 0:
        off = np.ones(num.shape[1], dtype=bool)
        off[::p] = False
        if num[:, off].any():
            break
        num = num[:, ::p]
        level -= 1
    return num, level


def _raise_level(num: np.ndarray, p: int, level: int, target: int) -> np.ndarray:
    if target == level:
        return num
    out = np.zeros((num.shape[0], p ** target), dtype=object)
    out[:, ::p ** (target - level)] = num
    return out


def _cyc_products(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise products in Z[x]/(x^P - 1): out[i] = A[i] * B[i]."""
    P = A.shape[1]
    out = np.zeros_like(A)
    for j in range(P):
        col = A[:, j:j + 1]
        if col.any():
            out += col * np.roll(B, j, axis=1)
    return out


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Finite linear combination of ball indicators with cyclotomic coefficients."""

    __test__ = False  # not a pytest class

    p: int
    lo: int
    hi: int
    level: int
    num: np.ndarray  # object array, shape (p^(hi-lo), p^level)
    den: int = 1

    def __post_init__(self):
        check_prime(self.p)
        if self.hi < self.lo:
            raise ValueError("support exponent must be >= constancy exponent")
        num = np.array(self.num, dtype=object).reshape(self.p ** (self.hi - self.lo), self.p ** self.level)
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        lo, hi, level, den = self.lo, self.hi, self.level, int(self.den)
        num, level = _reduce_rows(num, self.p, level)
        if not num.any():
            num, lo, hi, level, den = np.zeros((1, 1), dtype=object), 0, 0, 0, 1
        else:
            num, lo, hi = _shrink(num, self.p, lo, hi)
            g = den
            for v in num.flat:
                if g == 1:
                    break
                g = math.gcd(g, int(v))
            if g > 1:
                num = num // g
                den //= g
        num.setflags(write=False)
        for name, val in (("num", num), ("lo", lo), ("hi", hi), ("level", level), ("den", den)):
            object.__setattr__(self, name, val)

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, p: int) -> "TestFunction":
        return cls(p, 0, 0, 0, np.zeros((1, 1), dtype=object))

    @classmethod
    def from_cells(cls, p: int, lo: int, hi: int, values: Iterable) -> "TestFunction":
        """Values (ints, Fractions or CycRat) on the cells B(a p^-hi, p^lo), a = 0, 1, ..."""
        values = [_as_cycrat(p, v) for v in values]
        if len(values) != p ** (hi - lo):
            raise ValueError(f"expected {p ** (hi - lo)} cell values, got {len(values)}")
        level = max(v.num.n for v in values)
        den = math.lcm(*(v.den for v in values))
        num = np.zeros((len(values), p ** level), dtype=object)
        for i, v in enumerate(values):
            row = v.num.raise_level(level).coeffs
            num[i] = [c * (den // v.den) for c in row]
        return cls(p, lo, hi, level, num, den)

    @classmethod
    def indicator(cls, p: int, center, k: int) -> "TestFunction":
        """1_{B(center, p^k)}."""
        c = center if isinstance(center, PAdicScaled) else PAdicScaled.of(p, center)
        hi = max(k, c.m) if not c.is_zero() else k
        N = p ** (hi - k)
        num = np.zeros((N, 1), dtype=object)
        num[0 if c.is_zero() else (c.a * p ** (hi - c.m)) % N, 0] = 1
        return cls(p, k, hi, 0, num)

    @classmethod
    def from_balls(cls, p: int, terms: Iterable) -> "TestFunction":
        """Sum of coeff * 1_B over (Ball, coeff) pairs; balls may overlap."""
        out = cls.zero(p)
        for ball, coeff in terms:
            out = out + cls.indicator(p, ball.center, ball.radius_exp) * coeff
        return out

    # -- structure -------------------------------------------------------
    @property
    def ell(self) -> int:
        """Parameter of constancy."""
        return self.lo

    @property
    def ell_prime(self) -> int:
        """Parameter of compactness."""
        return self.hi

    def is_zero(self) -> bool:
        return not self.num.any()

    def cell_value(self, a: int) -> CycRat:
        row = self.num[a % self.num.shape[0]]
        return CycRat(CycInt(self.p, self.level, row.tolist()), self.den)

    def to_balls(self) -> list:
        """Disjoint (Ball, CycRat) pairs with nonzero values."""
        out = []
        for a in range(self.num.shape[0]):
            if self.num[a].any():
                out.append((Ball(PAdicScaled(self.p, a, self.hi), self.lo), self.cell_value(a)))
        return out

    def __call__(self, x) -> CycRat:
        x = x if isinstance(x, PAdicScaled) else PAdicScaled.of(self.p, x)
        y = x.scale(self.hi)
        if y.m > 0:
            return CycRat.rational(self.p, 0)
        return self.cell_value(y.a)

    def to_complex(self, x) -> complex:
        return self(x).to_complex()

    def grid(self, lo: int, hi: int, level: int) -> np.ndarray:
        """Numerators on the finer grid (lo, hi) at coefficient level ``level``."""
        if lo > self.lo or hi < self.hi or level < self.level:
            raise ValueError("target grid must refine the function's grid")
        p = self.p
        N = p ** (hi - lo)
        a = np.arange(N)
        step = p ** (hi - self.hi)
        inside = a % step == 0
        src = (a[inside] // step) % self.num.shape[0]
        out = np.zeros((N, p ** level), dtype=object)
        out[inside] = _raise_level(self.num, p, self.level, level)[src]
        return out

    def equals(self, other: "TestFunction") -> bool:
        return (self.p == other.p and self.lo == other.lo and self.hi == other.hi
                and self.level == other.level and self.den == other.den
                and np.array_equal(self.num, other.num))

    def __eq__(self, other):
        if not isinstance(other, TestFunction):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __repr__(self):
        return f"TestFunction(p={self.p}, ell={self.lo}, ell'={self.hi}, cells={len(self.to_balls())})"

    # -- arithmetic ------------------------------------------------------
    def _common(self, other: "TestFunction"):
        if self.p != other.p:
            raise ValueError("prime mismatch")
        lo, hi, level = min(self.lo, other.lo), max(self.hi, other.hi), max(self.level, other.level)
        return lo, hi, level, self.grid(lo, hi, level), other.grid(lo, hi, level)

    def __add__(self, other):
        lo, hi, level, A, B = self._common(other)
        return TestFunction(self.p, lo, hi, level, A * other.den + B * self.den, self.den * other.den)

    def __neg__(self):
        return TestFunction(self.p, self.lo, self.hi, self.level, -self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        """Scalar multiple by an int, Fraction or CycRat."""
        if isinstance(c, TestFunction):
            return multiply_test(self, c)
        c = _as_cycrat(self.p, c)
        level = max(self.level, c.num.n)
        A = _raise_level(self.num, self.p, self.level, level)
        row = np.array(c.num.raise_level(level).coeffs, dtype=object)
        B = np.broadcast_to(row, A.shape).copy()
        return TestFunction(self.p, self.lo, self.hi, level, _cyc_products(A, B), self.den * c.den)

    __rmul__ = __mul__

    def reflect(self) -> "TestFunction":
        """x -> f(-x)."""
        N = self.num.shape[0]
        return TestFunction(self.p, self.lo, self.hi, self.level, self.num[(-np.arange(N)) % N], self.den)


def _shrink(num: np.ndarray, p: int, lo: int, hi: int):
    """Smallest support ball, then coarsest cells."""
    changed = True
    while changed and hi > lo:
        changed = False
        if not num[np.arange(num.shape[0]) % p != 0].any():
            num, hi, changed = num[::p], hi - 1, True
            continue
        rest = num.shape[0] // p
        R = num.reshape(p, rest, num.shape[1])
        if (R == R[:1]).all():
            num, lo, changed = R[0], lo + 1, True
    return num, lo, hi


def _as_cycrat(p: int, v) -> CycRat:
    if isinstance(v, CycRat):
        if v.p != p:
            raise ValueError("prime mismatch")
        return v
    if isinstance(v, CycInt):
        return CycRat(v)
    return CycRat.rational(p, Fraction(v))


def _scaled(num: np.ndarray, den: int, p: int, e: int):
    """(num, den) times p^e."""
    return (num * p ** e, den) if e >= 0 else (num, den * p ** -e)


def fourier_test(phi: TestFunction) -> TestFunction:
    """Fourier transform, built cell by cell from the transform of a ball indicator."""
    p, lo, hi = phi.p, phi.lo, phi.hi
    L = hi - lo
    N = p ** L
    level = max(phi.level, L)
    P = p ** level
    V = _raise_level(phi.num, p, phi.level, level)
    step = p ** (level - L)
    a = np.arange(N)
    j = np.arange(P)
    out = np.zeros((N, P), dtype=object)
    for b in range(N):
        # cell a times w_{p^L}^(-a b): coefficient j moves to j - a b step
        idx = (j[None, :] + (a[:, None] * b * step)) % P
        out[b] = np.take_along_axis(V, idx, axis=1).sum(axis=0)
    num, den = _scaled(out, phi.den, p, lo)
    return TestFunction(p, -hi, -lo, level, num, den)


def inverse_fourier_test(phi: TestFunction) -> TestFunction:
    return fourier_test(phi).reflect()


def convolve_test(phi: TestFunction, psi: TestFunction) -> TestFunction:
    """(phi * psi)(x) = integral of phi(y) psi(x - y) dy."""
    lo, hi, level, A, B = phi._common(psi)
    N = A.shape[0]
    out = np.zeros_like(A)
    for a in range(N):
        if A[a].any():
            # rows c of the shifted copy hold psi[c - a]
            out += _cyc_products(np.broadcast_to(A[a], A.shape).copy(), np.roll(B, a, axis=0))
    num, den = _scaled(out, phi.den * psi.den, phi.p, lo)
    return TestFunction(phi.p, lo, hi, level, num, den)


def multiply_test(phi: TestFunction, psi: TestFunction) -> TestFunction:
    lo, hi, level, A, B = phi._common(psi)
    return TestFunction(phi.p, lo, hi, level, _cyc_products(A, B), phi.den * psi.den)


def delta_k(p: int, k: int) -> TestFunction:
    """Indicator of B(0, p^k)."""
    return TestFunction.indicator(p, 0, k)


def theta_k(p: int, k: int) -> TestFunction:
    """p^k times the indicator of B(0, p^-k); the Fourier transform of delta_k."""
    return TestFunction.indicator(p, 0, -k) * Fraction(p) ** k


def measure_density(mu: BallMeasure) -> TestFunction:
    """A cell measure as the function with constant density on each cell."""
    p, s, g = mu.p, mu.scale, mu.gamma
    num = np.zeros((p ** g, 1), dtype=object)
    den = 1
    for _, w in mu.masses:
        den = math.lcm(den, Fraction(w).denominator)
    for r, w in mu.masses:
        num[r % p ** g, 0] = int(Fraction(w) * den)
    num, den = _scaled(num, den, p, g - s)
    return TestFunction(p, s - g, s, 0, num, den)


Pairable = Union[TestFunction, BallMeasure, DiscreteSetQp]


def pair(f: Pairable, phi: TestFunction) -> CycRat:
    """<f, phi>: the integral of f phi, or the sum of phi over a discrete set."""
    if isinstance(f, DiscreteSetQp):
        if f.p != phi.p:
            raise ValueError("prime mismatch")
        total = CycRat.rational(phi.p, 0)
        for x in f:
            total = total + phi(x)
        return total
    if isinstance(f, BallMeasure):
        f = measure_density(f)
    lo, hi, level, A, B = f._common(phi)
    row = _cyc_products(A, B).sum(axis=0)
    num, den = _scaled(row[None, :], f.den * phi.den, f.p, lo)
    return CycRat(CycInt(f.p, level, num[0].tolist()), den)


def regularize(f: Pairable, k: int) -> TestFunction:
    """delta_k times (f convolved with theta_k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if isinstance(f, DiscreteSetQp):
        p = f.p
        N = p ** (2 * k)
        num = np.zeros((N, 1), dtype=object)
        for x in f:
            if x.m <= k:
                num[(x.a * p ** (k - x.m)) % N, 0] += 1
        num, den = _scaled(num, 1, p, k)
        return TestFunction(p, -k, k, 0, num, den)
    if isinstance(f, BallMeasure):
        f = measure_density(f)
    return multiply_test(delta_k(f.p, k), convolve_test(f, theta_k(f.p, k)))


def stabilization_threshold(phi: TestFunction) -> int:
    """Smallest k >= 1 from which regularized pairings against phi are exact."""
    return max(-phi.lo, phi.hi, 1)

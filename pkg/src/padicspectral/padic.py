"""Exact p-adic rationals, balls, and the standard additive character.

Every number handled by the package is a rational ``a / p**m``; these are
dense in Q_p and are the only values that appear in finite truncations of
the constructions, so all comparisons below are exact.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

INF = math.inf

_SCALED_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*(?:\^\s*(\d+))?)?\s*$")


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all 64-bit inputs."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or isinstance(p, bool) or not is_prime(p):
        raise ValueError(f"p must be prime, got {p!r}")
    return p


def vp_int(a: int, p: int) -> float:
    """p-adic valuation of an integer (``inf`` for 0)."""
    if a == 0:
        return INF
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


Number = Union["PAdicScaled", int, Fraction]


@dataclass(frozen=True, eq=False)
class PAdicScaled:
    """The p-adic rational ``a / p**m``.

    Stored in canonical form: ``m >= 0`` and ``p`` does not divide ``a``
    whenever ``m > 0``; zero is ``(0, 0)``.  ``precision``, when given,
    means the value is only known modulo ``p**precision``.
    """

    p: int
    a: int
    m: int = 0
    precision: Optional[int] = None

    def __post_init__(self):
        check_prime(self.p)
        a, m = int(self.a), int(self.m)
        if m < 0:
            a *= self.p ** (-m)
            m = 0
        if a == 0:
            m = 0
        while m > 0 and a % self.p == 0:
            a //= self.p
            m -= 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "m", m)
        if self.precision is not None and not self.precision > -m:
            raise ValueError(
                f"precision {self.precision} leaves no meaningful digit of {a}/{self.p}^{m}"
            )

    # -- construction -----------------------------------------------------
    @classmethod
    def of(cls, p: int, x: Number) -> "PAdicScaled":
        if isinstance(x, PAdicScaled):
            if x.p != p:
                raise ValueError(f"prime mismatch: {x.p} vs {p}")
            return x
        x = Fraction(x)
        den = x.denominator
        m = 0
        while den % p == 0:
            den //= p
            m += 1
        if den != 1:
            raise ValueError(f"{x} has a denominator prime to {p}; not representable")
        return cls(p, x.numerator, m)

    @classmethod
    def parse(cls, p: int, text: str) -> "PAdicScaled":
        """Parse ``"a/p^m"``, ``"a/N"`` (N a power of p) or a decimal integer."""
        match = _SCALED_RE.match(str(text))
        if not match:
            raise ValueError(f"cannot parse p-adic rational {text!r}")
        a, base, exp = match.groups()
        if base is None:
            return cls(p, int(a), 0)
        if exp is not None:
            if int(base) != p:
                raise ValueError(f"{text!r}: base {base} is not p={p}")
            return cls(p, int(a), int(exp))
        return cls.of(p, Fraction(int(a), int(base)))

    # -- basic queries ----------------------------------------------------
    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.p ** self.m)

    def valuation(self) -> float:
        return valuation(self)

    def norm(self) -> Fraction:
        """|x|_p as an exact rational (0 for x = 0)."""
        v = self.valuation()
        if v == INF:
            return Fraction(0)
        return Fraction(self.p) ** (-int(v))

    def is_zero(self) -> bool:
        return self.a == 0

    def is_integral(self) -> bool:
        return self.m == 0

    def to_string(self) -> str:
        if self.m == 0:
            return str(self.a)
        return f"{self.a}/{self.p}^{self.m}"

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"PAdicScaled({self.to_string()}, p={self.p})"

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "PAdicScaled":
        return PAdicScaled.of(self.p, other)

    def _prec(self, other: "PAdicScaled") -> Optional[int]:
        precs = [q for q in (self.precision, other.precision) if q is not None]
        return min(precs) if precs else None

    def __add__(self, other):
        o = self._coerce(other)
        m = max(self.m, o.m)
        a = self.a * self.p ** (m - self.m) + o.a * self.p ** (m - o.m)
        return _with_precision(self.p, a, m, self._prec(o))

    __radd__ = __add__

    def __neg__(self):
        return PAdicScaled(self.p, -self.a, self.m, self.precision)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        prec = None
        # x known mod p^N, y exact: xy known mod p^(N + v(y))
        if self.precision is not None or o.precision is not None:
            cands = []
            if self.precision is not None and o.a != 0:
                cands.append(self.precision + int(vp_int(o.a, self.p)) - o.m)
            if o.precision is not None and self.a != 0:
                cands.append(o.precision + int(vp_int(self.a, self.p)) - self.m)
            prec = min(cands) if cands else None
        return _with_precision(self.p, self.a * o.a, self.m + o.m, prec)

    __rmul__ = __mul__

    def scale(self, k: int) -> "PAdicScaled":
        """Multiply by ``p**k`` (k may be negative)."""
        if k >= 0:
            return PAdicScaled(self.p, self.a * self.p ** k, self.m)
        return PAdicScaled(self.p, self.a, self.m - k)

    def __eq__(self, other):
        if isinstance(other, PAdicScaled):
            return self.p == other.p and self.a == other.a and self.m == other.m
        try:
            return self.value == Fraction(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.p, self.a, self.m))

    def __lt__(self, other):
        # real-number order; only used to give sets a deterministic layout
        return self.value < self._coerce(other).value


def _with_precision(p, a, m, prec):
    if prec is not None and prec <= -_canonical_m(p, a, m):
        prec = None
    return PAdicScaled(p, a, m, prec)


def _canonical_m(p, a, m):
    if a == 0:
        return 0
    while m > 0 and a % p == 0:
        a //= p
        m -= 1
    return max(m, 0)


def valuation(x: PAdicScaled) -> float:
    """v_p(x); ``math.inf`` for zero."""
    if x.a == 0:
        return INF
    return vp_int(x.a, x.p) - x.m


def frac_part(x: PAdicScaled) -> Fraction:
    """The fractional part {x}: the rational in [0, 1) with x - {x} in Z_p."""
    if x.m == 0:
        return Fraction(0)
    q = x.p ** x.m
    return Fraction(x.a % q, q)


# -- roots of unity ---------------------------------------------------------


@dataclass(frozen=True)
class RootOfUnity:
    """``exp(2 pi i k / p**n)``, stored at minimal level."""

    p: int
    n: int
    k: int

    def __post_init__(self):
        n, k = self.n, self.k
        if n < 0:
            raise ValueError("level must be >= 0")
        k %= self.p ** n
        while n > 0 and k % self.p == 0:
            k //= self.p
            n -= 1
        if k == 0:
            n = 0
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_fraction(cls, p: int, t: Fraction) -> "RootOfUnity":
        """exp(2 pi i t) for t with p-power denominator."""
        t = Fraction(t) % 1
        den, n = t.denominator, 0
        while den % p == 0:
            den //= p
            n += 1
        if den != 1:
            raise ValueError(f"{t} is not a p-power root of unity for p={p}")
        return cls(p, n, t.numerator)

    @property
    def angle(self) -> Fraction:
        """k / p^n in [0, 1)."""
        return Fraction(self.k, self.p ** self.n)

    def exponent_at(self, level: int) -> int:
        if level < self.n:
            raise ValueError(f"root of level {self.n} is not defined at level {level}")
        return self.k * self.p ** (level - self.n)

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        n = max(self.n, other.n)
        return RootOfUnity(self.p, n, self.exponent_at(n) + other.exponent_at(n))

    def conj(self) -> "RootOfUnity":
        return RootOfUnity(self.p, self.n, -self.k)

    def __pow__(self, e: int) -> "RootOfUnity":
        return RootOfUnity(self.p, self.n, self.k * e)

    def is_one(self) -> bool:
        return self.k == 0

    def to_complex(self) -> complex:
        return cmath.exp(2j * cmath.pi * self.k / self.p ** self.n)


def character(xi: PAdicScaled, x: PAdicScaled) -> RootOfUnity:
    """chi(xi * x) = exp(2 pi i {xi x}) as an exact root of unity."""
    if xi.p != x.p:
        raise ValueError("prime mismatch")
    return RootOfUnity.from_fraction(x.p, frac_part(xi * x))


# -- balls ------------------------------------------------------------------

EQUAL = "equal"
SUBSET = "b1<b2"
SUPERSET = "b2<b1"
DISJOINT = "disjoint"


@dataclass(frozen=True, eq=False)
class Ball:
    """The closed ball B(center, p**radius_exp) = center + p**(-radius_exp) Z_p."""

    center: PAdicScaled
    radius_exp: int

    @property
    def p(self) -> int:
        return self.center.p

    def contains(self, x: Number) -> bool:
        x = PAdicScaled.of(self.p, x)
        return valuation(x - self.center) >= -self.radius_exp

    def __contains__(self, x):
        return self.contains(x)

    def canonical_center(self) -> PAdicScaled:
        """Center reduced mod p^(-radius_exp) Z_p; equal balls share it."""
        n = self.radius_exp
        f = frac_part(self.center.scale(n))
        return PAdicScaled.of(self.p, f).scale(-n)

    def __eq__(self, other):
        if not isinstance(other, Ball):
            return NotImplemented
        return ball_relation(self, other) == EQUAL

    def __hash__(self):
        return hash((self.canonical_center(), self.radius_exp))

    def __repr__(self):
        return f"B({self.center.to_string()}, {self.p}^{self.radius_exp})"

    def in_sphere(self, x: Number) -> bool:
        """Membership in S(center, p^radius_exp) = B(c, p^n) minus B(c, p^(n-1))."""
        x = PAdicScaled.of(self.p, x)
        return valuation(x - self.center) == -self.radius_exp


def ball_relation(b1: Ball, b2: Ball) -> str:
    """One of ``equal``, ``b1<b2``, ``b2<b1``, ``disjoint``; balls never partially overlap."""
    if b1.p != b2.p:
        raise ValueError("prime mismatch")
    v = valuation(b1.center - b2.center)
    big = max(b1.radius_exp, b2.radius_exp)
    if v < -big:
        return DISJOINT
    if b1.radius_exp == b2.radius_exp:
        return EQUAL
    return SUBSET if b1.radius_exp < b2.radius_exp else SUPERSET


def sphere_contains(p: int, n: int, x: Number) -> bool:
    """Is x in the sphere S(0, p^-n), i.e. v_p(x) == n?"""
    return valuation(PAdicScaled.of(p, x)) == n


def hensel_digits(x: PAdicScaled, count: int) -> tuple[int, list[int]]:
    """``(v0, digits)`` with ``digits[j]`` the Hensel digit of x at position ``v0 + j``.

    ``v0 = -m`` so the expansion starts at the lowest possibly nonzero digit.
    """
    n = x.a % x.p ** count
    out = []
    for _ in range(count):
        n, r = divmod(n, x.p)
        out.append(r)
    return -x.m, out

"""Finite-scale dimension and density estimates for measures and discrete sets.

Every estimator returns the sequence of finite sections; limits are
never claimed.  Values are exact rationals whenever the underlying masses
or counts are powers of p, and floats otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .measures import BallMeasure, DiscreteSetQp, Levels, NuTower, levels_below, spectrum_truncation
from .padic import PAdicScaled, frac_part

Number = Union[Fraction, float]


def exact_log(q: Fraction, p: int) -> Optional[int]:
    """e with q = p^e, or None if q is not an integer power of p."""
    q = Fraction(q)
    if q <= 0:
        return None
    num, den = q.numerator, q.denominator
    if num != 1 and den != 1:
        return None
    x, sign = (den, -1) if num == 1 else (num, 1)
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return sign * e if x == 1 else None


def log_p(q: Fraction, p: int) -> Number:
    e = exact_log(q, p)
    return Fraction(e) if e is not None else math.log(q) / math.log(p)


@dataclass(frozen=True)
class DimensionEstimate:
    values: tuple  # ((k, value), ...)

    @property
    def tail(self) -> list:
        """The final half of the sections (at least one)."""
        vals = [v for _, v in self.values]
        return vals[len(vals) // 2:] if vals else []

    @property
    def liminf_estimate(self) -> Optional[Number]:
        return min(self.tail, default=None)

    @property
    def limsup_estimate(self) -> Optional[Number]:
        return max(self.tail, default=None)

    def as_dict(self) -> dict:
        return dict(self.values)


def count_levels(I: Levels, k: int) -> int:
    """#(I intersected with {0, ..., k-1})."""
    return len(levels_below(I, k))


def shannon_entropy(mu: BallMeasure, n: int) -> Number:
    """Base-p entropy of mu over its depth-n cells."""
    if n > mu.gamma:
        raise ValueError(f"depth {n} exceeds the measure's resolution {mu.gamma}")
    if n < 0:
        raise ValueError("depth must be >= 0")
    cells = mu.coarsen(n)
    exps = [exact_log(w, mu.p) for _, w in cells.masses]
    if all(e is not None for e in exps):
        return sum((-w * e for (_, w), e in zip(cells.masses, exps)), Fraction(0))
    return float(sum(-float(w) * math.log(w) for _, w in cells.masses) / math.log(mu.p))


def entropy_dimension_estimates(I: Levels, k_range: Iterable[int]) -> DimensionEstimate:
    vals = []
    for k in k_range:
        if k < 1:
            raise ValueError("k must be >= 1")
        vals.append((k, Fraction(count_levels(I, k), k)))
    return DimensionEstimate(tuple(vals))


def _truncation(mu_tower, k: int) -> BallMeasure:
    if isinstance(mu_tower, NuTower):
        return mu_tower.truncation(k)
    if isinstance(mu_tower, BallMeasure):
        return mu_tower
    return mu_tower(k)


def ball_mass(mu: BallMeasure, x, k: int) -> Fraction:
    """mu(B(x, p^-k)) for k resolved by the measure's cells."""
    p, s = mu.p, mu.scale
    depth = k + s
    if not 0 <= depth <= mu.gamma:
        raise ValueError(f"radius p^-{k} is not resolved by cells of depth {mu.gamma}, scale {s}")
    x = x if isinstance(x, PAdicScaled) else PAdicScaled.of(p, x)
    y = x.scale(s)
    if y.m > 0:
        return Fraction(0)  # x lies outside p^-s Z_p where the measure lives
    mod = p ** depth
    r = y.a % mod
    if depth == mu.gamma:
        return mu.mass_map.get(r, Fraction(0))
    return sum((w for c, w in mu.masses if c % mod == r), Fraction(0))


def local_dimension_estimate(mu_tower, x, k: int) -> Number:
    """log mu(B(x, p^-k)) / log p^-k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    mu = _truncation(mu_tower, k)
    m = ball_mass(mu, x, k)
    if m == 0:
        raise ValueError(f"{x} is outside the support at depth {k}")
    v = log_p(m, mu.p)
    return -v / k


def _ball_counts(E: DiscreteSetQp, k: int) -> dict:
    """Counts of E in the balls of radius p^k, keyed by the ball's label x p^k mod Z_p."""
    counts: dict = {}
    for x in E:
        key = frac_part(x.scale(k))
        counts[key] = counts.get(key, 0) + 1
    return counts


def count_in_ball(E: DiscreteSetQp, x, k: int) -> int:
    """#(E intersected with B(x, p^k))."""
    x = x if isinstance(x, PAdicScaled) else PAdicScaled.of(E.p, x)
    key = frac_part(x.scale(k))
    return sum(1 for y in E if frac_part(y.scale(k)) == key)


def _power(h: int, r) -> Number:
    r = Fraction(r) if not isinstance(r, float) else r
    if isinstance(r, Fraction) and r.denominator == 1:
        return Fraction(h) ** int(r)
    root = round(h ** float(r))
    if isinstance(r, Fraction) and root > 0 and Fraction(root) ** r.denominator == Fraction(h) ** r.numerator:
        return Fraction(root)
    return float(h) ** float(r)


@dataclass(frozen=True)
class BeurlingReport:
    r: object
    upper: tuple  # ((k, sup_x count / h^r), ...)
    lower: tuple  # ((k, inf over centers in E of count / h^r), ...)
    dimension: DimensionEstimate  # log_p(max count) / k


def beurling_estimates(Lambda: DiscreteSetQp, r, h_list: Sequence[int]) -> BeurlingReport:
    """Upper and lower Beurling densities at radii h = p^k, plus count-growth exponents.

    The sup runs over every ball of radius h meeting Lambda; the inf over balls
    centred at points of Lambda.  Both are exact (finitely many classes).
    """
    if not r > 0:
        raise ValueError("r must be positive")
    p = Lambda.p
    upper, lower, dims = [], [], []
    for h in h_list:
        k = _exponent_of(h, p)
        counts = _ball_counts(Lambda, k)
        hr = _power(h, r)
        top = max(counts.values(), default=0)
        low = min(counts.values(), default=0)
        upper.append((k, top / hr if isinstance(hr, float) else Fraction(top) / hr))
        lower.append((k, low / hr if isinstance(hr, float) else Fraction(low) / hr))
        if k >= 1:
            dims.append((k, log_p(Fraction(top), p) / k if top else Fraction(0)))
    return BeurlingReport(r, tuple(upper), tuple(lower), DimensionEstimate(tuple(dims)))


def _exponent_of(h: int, p: int) -> int:
    e = exact_log(Fraction(h), p)
    if e is None:
        raise ValueError(f"h = {h} is not a power of {p}")
    return e


@dataclass(frozen=True)
class DensityEstimate:
    k: int
    value: Fraction
    second_center: Optional[str]
    second_value: Optional[Fraction]

    @property
    def center_independent(self) -> Optional[bool]:
        return None if self.second_value is None else self.second_value == self.value


def density_estimates(E: Union[DiscreteSetQp, Callable[[int], DiscreteSetQp]],
                      k_range: Iterable[int]) -> list:
    """#(E intersected with B(0, p^k)) / p^k, cross-checked at a second centre.

    ``E`` may be a fixed finite set or a callable returning a set adequate for
    radius p^k.  The second centre is the point of E nearest to 0 outside the
    ball, when there is one.
    """
    out = []
    for k in k_range:
        Ek = E(k) if callable(E) else E
        p = Ek.p
        zero = PAdicScaled(p, 0)
        val = count_in_ball(Ek, zero, k) / Fraction(p) ** k
        outside = [x for x in Ek if x.norm() > Fraction(p) ** k]
        second = min(outside, key=lambda x: (x.norm(), x)) if outside else None
        if second is None:
            out.append(DensityEstimate(k, val, None, None))
        else:
            v2 = count_in_ball(Ek, second, k) / Fraction(p) ** k
            out.append(DensityEstimate(k, val, str(second), v2))
    return out


def spectrum_tower(p: int, I: Levels, extra: int = 2) -> Callable[[int], DiscreteSetQp]:
    """k -> a spectrum truncation deep enough to show every ball of radius p^k near 0."""
    return lambda k: spectrum_truncation(p, I, max(k, 0) + extra)

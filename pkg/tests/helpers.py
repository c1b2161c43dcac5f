"""Random generators shared by the test modules."""
import math
import random

from padicspectral.cyclotomic import CycInt, CycRat
from padicspectral.distributions import TestFunction
from padicspectral.padic import PAdicScaled, frac_part


def random_cycrat(rng: random.Random, p: int, max_level: int = 1) -> CycRat:
    n = rng.randint(0, max_level)
    coeffs = [rng.randint(-2, 2) for _ in range(p ** n)]
    return CycRat(CycInt(p, n, coeffs), rng.choice([1, 1, 2, 3, p]))


def random_test_function(rng: random.Random, p: int, max_depth: int = 3, lo_range=(-1, 0),
                         max_level: int = 1) -> TestFunction:
    lo = rng.randint(*lo_range)
    hi = lo + rng.randint(0, max_depth)
    vals = [random_cycrat(rng, p, max_level) if rng.random() < 0.6 else 0 for _ in range(p ** (hi - lo))]
    return TestFunction.from_cells(p, lo, hi, vals)


def chi(x: PAdicScaled) -> complex:
    return complex(math.cos(2 * math.pi * frac_part(x)), math.sin(2 * math.pi * frac_part(x)))


def grid_points(p: int, r: int, R: int):
    """Representatives of the cells of radius p^r inside B(0, p^R), with the cell volume."""
    return [PAdicScaled(p, t, R) for t in range(p ** (R - r))], float(p) ** r

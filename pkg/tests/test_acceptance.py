"""Acceptance suite: one recorded PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py``; the lines appear in the
``acceptance`` section of the terminal summary.
"""
import cmath
import math
import random
import time
from fractions import Fraction

import numpy as np

from helpers import chi, random_test_function
from padicspectral.cyclotomic import CycInt, vanishing_decompose
from padicspectral.dimensions import (
    beurling_estimates, density_estimates, entropy_dimension_estimates, local_dimension_estimate, shannon_entropy,
    spectrum_tower,
)
from padicspectral.distributions import (
    convolve_test, fourier_test, inverse_fourier_test, multiply_test, pair, regularize, stabilization_threshold,
)
from padicspectral.fuglede import equivalence_scan
from padicspectral.measures import (
    BallMeasure, DiscreteSetQp, NuTower, check_functional_equation, check_orthobasis, frequency_grid, I_TAG,
    nu_truncation, recover_structure_pipeline, spectrum_truncation, zero_spheres_discrete,
)
from padicspectral.padic import PAdicScaled
from padicspectral.spectra import is_hadamard
from padicspectral.trees import HomoTree, dual_tree, random_choice


def random_levels(rng, gamma):
    return frozenset(l for l in range(gamma) if rng.random() < 0.5)


def spectral_pairs():
    """Random (measure, spectrum) truncations for p in {2, 3}, gamma <= 5, plus the extreme level sets."""
    rng = random.Random(2024)
    out = []
    for p in (2, 3):
        for gamma in range(1, 6):
            level_sets = [frozenset(), frozenset(range(gamma))] + [random_levels(rng, gamma) for _ in range(6)]
            for I in level_sets:
                choice = random_choice(p, rng.randrange(10 ** 9))
                out.append((p, gamma, I, nu_truncation(p, I, gamma, choice), spectrum_truncation(p, I, gamma)))
    return out


PAIRS = spectral_pairs()


def test_hadamard_duality(acceptance):
    rng = random.Random(1)
    t0 = time.perf_counter()
    failures = []
    count = 0
    for p in (2, 3, 5):
        for gamma in range(1, 5):
            for _ in range(200):
                t = HomoTree.build(p, gamma, random_levels(rng, gamma), random_choice(p, rng.randrange(10 ** 9)))
                count += 1
                if not is_hadamard(t.leaves(), dual_tree(t).leaves(), p, gamma):
                    failures.append((p, gamma, sorted(t.I)))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 30
    acceptance(1, "dual tree leaves give a Hadamard pair", ok,
               f"{count} trees, {len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures[:5]


def test_truncated_pairs_are_spectral(acceptance):
    t0 = time.perf_counter()
    failures = []
    for p, gamma, I, mu, Lam in PAIRS:
        grid = frequency_grid(p, gamma + 1)
        if not (check_orthobasis(mu, Lam) and check_functional_equation(mu, Lam, grid)):
            failures.append((p, gamma, sorted(I)))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 60
    acceptance(2, "truncated pairs pass orthobasis and the functional equation", ok,
               f"{len(PAIRS)} pairs, {len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures[:5]


def _move_mass(mu, rng):
    """Move half of one cell's mass to another cell (inside the support when possible)."""
    support = mu.support()
    a = rng.choice(support)
    others = [c for c in support if c != a] or [c for c in range(mu.N) if c != a]
    b = rng.choice(others)
    masses = dict(mu.masses)
    half = masses[a] / 2
    masses[a] -= half
    masses[b] = masses.get(b, Fraction(0)) + half
    return BallMeasure(mu.p, mu.gamma, mu.scale, masses)


def _float_gram_is_identity(mu, points):
    cells = [PAdicScaled(mu.p, c) for c in mu.support()]
    w = np.array([float(mu.mass(c)) for c in mu.support()])
    H = np.array([[chi(lam * x) for x in cells] for lam in points])
    G = (H * w) @ H.conj().T
    return np.allclose(G, np.eye(len(points)), atol=1e-9)


def test_recovery_pipeline_and_mutations(acceptance):
    rng = random.Random(5)
    failures, missed = [], []
    mutations = 0
    for p, gamma, I, mu, Lam in PAIRS:
        if not recover_structure_pipeline(mu, Lam)["passed"]:
            failures.append((p, gamma, sorted(I)))
        variants = [(_move_mass(mu, rng), Lam, "mass")]
        pts = list(Lam)
        i = rng.randrange(len(pts))
        off = pts[:i] + [pts[i] + PAdicScaled(p, 1, gamma + 1)] + pts[i + 1:]
        variants.append((mu, DiscreteSetQp(p, off), "off-lattice point"))
        lattice = [PAdicScaled(p, c, gamma) for c in range(p ** gamma)]
        free = [x for x in lattice if x not in set(pts)]
        if free:
            moved = pts[:i] + [rng.choice(free)] + pts[i + 1:]
            if not _float_gram_is_identity(mu, moved):
                variants.append((mu, DiscreteSetQp(p, moved), "lattice point"))
        for mu2, Lam2, kind in variants:
            mutations += 1
            if recover_structure_pipeline(mu2, Lam2)["passed"]:
                missed.append((p, gamma, sorted(I), kind))
    ok = not failures and not missed
    acceptance(3, "recovery pipeline passes and rejects mutations", ok,
               f"{len(PAIRS)} pairs, {len(failures)} failures; {mutations} mutations, {len(missed)} undetected")
    assert ok, (failures[:5], missed[:5])


def random_multiset(rng):
    p = rng.choice([2, 3, 5])
    n = rng.randint(0, 3)
    size = p ** n
    kind = rng.random()
    if n == 0:
        return p, n, [0] * rng.randint(0, 4)
    block = size // p
    cycles = [[r + j * block for j in range(p)] for r in (rng.randrange(block) for _ in range(rng.randint(0, 4)))]
    exps = [e for c in cycles for e in c]
    if kind < 0.4:
        pass  # a union of cycles
    elif kind < 0.7 and exps:
        exps.pop(rng.randrange(len(exps)))
        exps.append(rng.randrange(size))  # one element moved, usually no longer vanishing
    else:
        exps = [rng.randrange(size) for _ in range(rng.randint(0, 12))]
    rng.shuffle(exps)
    return p, n, exps


def test_vanishing_decomposition(acceptance):
    rng = random.Random(6)
    exact_bad = float_bad = vanishing = 0
    for _ in range(10_000):
        p, n, exps = random_multiset(rng)
        cycles = vanishing_decompose(exps, p, n)
        zero = CycInt.from_exponents(p, n, exps).is_zero()
        total = sum(cmath.exp(2j * math.pi * e / p ** n) for e in exps)
        vanishing += zero
        exact_bad += (cycles is not None) != zero
        float_bad += (cycles is not None) != (abs(total) < 1e-9)
    ok = exact_bad == 0 and float_bad == 0
    acceptance(4, "cycle decomposition agrees with exact and float zero tests", ok,
               f"10000 multisets ({vanishing} vanishing), {exact_bad} exact and {float_bad} float disagreements")
    assert ok


def test_fuglede_scans(acceptance):
    t0 = time.perf_counter()
    reports = [equivalence_scan(2, 2), equivalence_scan(2, 3), equivalence_scan(3, 2),
               equivalence_scan(2, 4, "ppower"), equivalence_scan(3, 3, "ppower")]
    elapsed = time.perf_counter() - t0
    bad = sum(len(r.counterexamples) for r in reports)
    ok = all(r.all_agree for r in reports) and elapsed < 600
    sizes = ", ".join(f"{r.p}^{r.gamma} {r.source} {r.total}" for r in reports)
    acceptance(5, "tile, spectral and homogeneous verdicts agree", ok,
               f"{sizes}; {bad} disagreements, {elapsed:.1f}s")
    assert ok


def test_dimension_estimates_for_even_levels(acceptance):
    even = lambda l: l % 2 == 0
    tower = NuTower(2, even)
    spectra = spectrum_tower(2, even)
    wrong = []
    dens = density_estimates(spectra, range(1, 13))
    for k in range(1, 13):
        want = Fraction(sum(1 for l in range(k) if even(l)), k)
        got = {
            "entropy": entropy_dimension_estimates(even, [k]).values[0][1],
            "shannon": shannon_entropy(tower.truncation(k), k) / k,
            "local": local_dimension_estimate(tower, 0, k),
            "beurling": beurling_estimates(spectra(k), 1, [2 ** k]).dimension.values[0][1],
        }
        wrong += [(k, name, v) for name, v in got.items() if not (isinstance(v, Fraction) and v == want)]
        if dens[k - 1].value != Fraction(2) ** (math.ceil(k / 2) - k):
            wrong.append((k, "density", dens[k - 1].value))
    values = [d.value for d in dens]
    monotone = all(a >= b for a, b in zip(values, values[1:])) and values[-1] < values[0]
    ok = not wrong and monotone
    acceptance(6, "dimension estimates agree and density decays", ok,
               f"k = 1..12, {len(wrong)} mismatches, density {values[-1]} at k = 12")
    assert ok, wrong[:5]


def random_discrete_set(rng):
    """Random points, or unions of a few cosets of p^k Z_p-spaced cycles, at scales <= 3."""
    p = rng.choice([2, 3, 5])
    pts = set()
    if rng.random() < 0.5:
        k = rng.randint(-3, 1)
        step = PAdicScaled.of(p, Fraction(p) ** k)
        for _ in range(rng.randint(1, 16 // p)):
            m = rng.randint(max(0, -k), 3)
            b = PAdicScaled(p, rng.randrange(p ** (m + 2)), m)
            pts.update(b + PAdicScaled(p, j) * step for j in range(p))
        if len(pts) < 16 and rng.random() < 0.3:
            pts.add(PAdicScaled(p, rng.randrange(p ** 2)))
    size = rng.randint(2, 16)
    while len(pts) < 2 or (len(pts) < size and rng.random() < 0.5):
        m = rng.randint(0, 3)
        pts.add(PAdicScaled(p, rng.randrange(p ** (m + 2)), m))
    return DiscreteSetQp(p, tuple(sorted(pts)[:16]))


def _sphere_vanishes_float(E, n):
    """Float evaluation of the transform at every unit representative of sphere n."""
    p, M = E.p, E.max_scale
    L = M - n
    size = p ** L
    u = np.array([t for t in range(size) if t % p], dtype=np.int64)
    A = np.array([a % size for a in E.integer_points(M)], dtype=np.int64)
    phases = np.exp(-2j * np.pi * ((u[:, None] * A[None, :]) % size) / size)
    return bool(np.all(np.abs(phases.sum(axis=1)) < 1e-9))


def test_zero_sphere_bounds(acceptance):
    rng = random.Random(7)
    outside, partial, unchecked = [], [], []
    tagged = 0
    for _ in range(1000):
        E = random_discrete_set(rng)
        nE = E.n_E
        cls = zero_spheres_discrete(E, (-nE - 3, E.max_scale + 1))
        I_sph = cls.tagged(I_TAG)
        tagged += len(I_sph)
        outside += [(E, n) for n in I_sph if n < -nE - 1]
        if cls.partial:
            partial.append(E)
        unchecked += [(E, n) for n in I_sph if not _sphere_vanishes_float(E, n)]
    ok = not outside and not partial and not unchecked
    acceptance(7, "zero spheres of finite sets stay inside the bound", ok,
               f"1000 sets, {tagged} zero spheres, {len(outside)} outside, {len(partial)} partial, "
               f"{len(unchecked)} failing the float check")
    assert ok


def test_distribution_identities(acceptance):
    rng = random.Random(8)
    failures = []
    for i in range(500):
        p = rng.choice([2, 3])
        f = random_test_function(rng, p, max_depth=3)
        g = random_test_function(rng, p, max_depth=3)
        F = fourier_test(f)
        checks = {
            "fourth power": fourier_test(fourier_test(fourier_test(F))) == f,
            "square is reflection": fourier_test(F) == f.reflect(),
            "inverse": inverse_fourier_test(F) == f,
            "convolution exchange": fourier_test(convolve_test(f, g)) == multiply_test(F, fourier_test(g)),
            "product exchange": fourier_test(multiply_test(f, g)) == convolve_test(F, fourier_test(g)),
        }
        k0 = stabilization_threshold(g)
        exact = pair(f, g)
        checks["stabilization"] = all(pair(regularize(f, k), g).equals(exact) for k in (k0, k0 + 1))
        failures += [(i, name) for name, ok in checks.items() if not ok]
    ok = not failures
    acceptance(8, "Fourier, exchange and stabilization identities on test functions", ok,
               f"500 functions, {len(failures)} failures")
    assert ok, failures[:5]

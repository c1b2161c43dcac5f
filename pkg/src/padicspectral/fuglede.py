"""Tiling, spectrality and homogeneity of subsets of Z/p^gamma, and scans comparing them.

The single-set predicates are pure Python.  Bulk scans run compiled bitmask
kernels and re-derive witnesses with the pure-Python predicates, so every
reported disagreement is confirmed by both code paths.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .padic import check_prime
from .spectra import check_scale, difference_mask, min_difference_clique, spectrum_search
from .trees import recover_structure

EXHAUSTIVE_LIMIT = 16
PPOWER_LIMIT = 27
KERNEL_LIMIT = 62
SOURCES = ("exhaustive", "ppower", "random")


@dataclass(frozen=True)
class TileResult:
    complement: Optional[list]
    reason: str = ""

    def __bool__(self):
        return self.complement is not None


def _residues(C: Iterable[int], N: int) -> list:
    C = [int(c) for c in C]
    if any(not 0 <= c < N for c in C):
        raise ValueError(f"residues must lie in [0, {N})")
    if len(set(C)) != len(C):
        raise ValueError("C has repeated residues")
    return sorted(C)


def tile_search(C: Iterable[int], p: int, gamma: int, max_scale: Optional[int] = None) -> TileResult:
    """Lexicographically smallest T (0 in T) with C + T = Z/p^gamma uniquely, with a reason when none exists."""
    check_prime(p)
    N = p ** gamma
    check_scale(N, max_scale)
    C = _residues(C, N)
    if not C:
        return TileResult(None, "C is empty")
    if N % len(C):
        return TileResult(None, f"#C = {len(C)} does not divide {N}")
    diff = difference_mask(C, N)
    allowed = ~diff
    allowed[0] = False
    T = min_difference_clique(allowed, N // len(C))
    if T is None:
        return TileResult(None, "no complement exists")
    return TileResult(T)


def is_tile(C: Iterable[int], p: int, gamma: int, max_scale: Optional[int] = None) -> Optional[list]:
    return tile_search(C, p, gamma, max_scale).complement


def is_spectral_set(C: Iterable[int], p: int, gamma: int, max_scale: Optional[int] = None) -> Optional[list]:
    C = list(C)
    if not C:
        return None
    return spectrum_search(C, p, gamma, max_scale)


def homogeneous_levels(C: Iterable[int], p: int, gamma: int) -> Optional[tuple]:
    """(I, J) of C's tree when it is homogeneous, else None."""
    C = list(C)
    if not C:
        return None
    t = recover_structure(C, p, gamma)
    if t is None:
        return None
    return sorted(t.I), sorted(t.J)


def mask_to_set(mask: int) -> list:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def set_to_mask(C: Iterable[int]) -> int:
    m = 0
    for c in C:
        m |= 1 << int(c)
    return m


@dataclass
class SubsetVerdict:
    mask: int
    tile: bool
    spectral: bool
    homogeneous: bool
    T: Optional[list] = None
    D: Optional[list] = None
    levels: Optional[tuple] = None

    @property
    def agree(self) -> bool:
        return self.tile == self.spectral == self.homogeneous

    def as_dict(self) -> dict:
        return {
            "subset": hex(self.mask),
            "tile": self.tile,
            "spectral": self.spectral,
            "homogeneous": self.homogeneous,
            "agree": self.agree,
            "T": self.T,
            "D": self.D,
            "IJ": None if self.levels is None else {"I": self.levels[0], "J": self.levels[1]},
        }


def classify(C: Iterable[int], p: int, gamma: int, max_scale: Optional[int] = None) -> SubsetVerdict:
    """All three predicates with their witnesses, by the pure-Python code paths."""
    C = list(C)
    T = is_tile(C, p, gamma, max_scale)
    D = is_spectral_set(C, p, gamma, max_scale)
    lv = homogeneous_levels(C, p, gamma)
    return SubsetVerdict(set_to_mask(C), T is not None, D is not None, lv is not None, T, D, lv)


@dataclass
class ScanReport:
    p: int
    gamma: int
    source: str
    seed: Optional[int]
    total: int
    counts: dict  # (tile, spectral, homogeneous) -> number of subsets
    counterexamples: list = field(default_factory=list)  # SubsetVerdict
    rows: list = field(default_factory=list)  # SubsetVerdict, when requested

    @property
    def all_agree(self) -> bool:
        return not self.counterexamples

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "gamma": self.gamma,
            "source": self.source,
            "seed": self.seed,
            "total": self.total,
            "counts": {",".join(str(int(b)) for b in k): v for k, v in sorted(self.counts.items())},
            "all_agree": self.all_agree,
            "counterexamples": [v.as_dict() for v in self.counterexamples],
            "subsets": [v.as_dict() for v in self.rows],
        }

    def tsv(self) -> str:
        head = "subset\ttile\tspectral\thomogeneous\tT\tD\tI\tJ"
        lines = [head]
        for v in self.rows or self.counterexamples:
            d = v.as_dict()
            ij = d["IJ"] or {"I": None, "J": None}
            cells = [d["subset"], d["tile"], d["spectral"], d["homogeneous"], d["T"], d["D"], ij["I"], ij["J"]]
            lines.append("\t".join("" if c is None else _tsv_cell(c) for c in cells))
        return "\n".join(lines) + "\n"


def _tsv_cell(c) -> str:
    if isinstance(c, bool):
        return "true" if c else "false"
    if isinstance(c, list):
        return ",".join(str(x) for x in c)
    return str(c)


def _classify_chunk(args):
    masks, p, gamma = args
    children = _kernels.child_table(p, gamma)
    n = len(masks)
    t = np.zeros(n, dtype=np.bool_)
    s = np.zeros(n, dtype=np.bool_)
    h = np.zeros(n, dtype=np.bool_)
    _kernels.classify_masks(masks, p, gamma, children, t, s, h)
    return t, s, h


def classify_masks(masks: np.ndarray, p: int, gamma: int, jobs: int = 1):
    """Kernel verdicts (tile, spectral, homogeneous) for an int64 array of subset masks."""
    if p ** gamma > KERNEL_LIMIT:
        raise ValueError(f"bitmask kernels handle p^gamma <= {KERNEL_LIMIT}")
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    if jobs <= 1 or len(masks) < 4096:
        return _classify_chunk((masks, p, gamma))
    chunks = np.array_split(masks, jobs * 4)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_classify_chunk, [(c, p, gamma) for c in chunks]))
    return tuple(np.concatenate([part[i] for part in parts]) for i in range(3))


def subsets_of_size(N: int, k: int) -> np.ndarray:
    out = np.zeros(math.comb(N, k), dtype=np.int64)
    if len(out):
        _kernels.fixed_size_masks(N, k, out)
    return out


def _source_masks(p: int, gamma: int, source: str, samples: int, seed: Optional[int],
                  sizes: Optional[Sequence[int]]) -> np.ndarray:
    N = p ** gamma
    if source == "exhaustive":
        if N > EXHAUSTIVE_LIMIT:
            raise ValueError(f"exhaustive scans need p^gamma <= {EXHAUSTIVE_LIMIT}")
        if sizes is None:
            return np.arange(1 << N, dtype=np.int64)
        return np.concatenate([subsets_of_size(N, k) for k in sorted(set(sizes))])
    if source == "ppower":
        if N > PPOWER_LIMIT:
            raise ValueError(f"p-power scans need p^gamma <= {PPOWER_LIMIT}")
        ks = [p ** j for j in range(gamma + 1)]
        if sizes is not None:
            bad = [k for k in sizes if k not in ks]
            if bad:
                raise ValueError(f"sizes {bad} are not powers of {p} up to {N}")
            ks = sorted(set(sizes))
        return np.concatenate([subsets_of_size(N, k) for k in ks])
    if source == "random":
        if N > KERNEL_LIMIT:
            raise ValueError(f"random scans need p^gamma <= {KERNEL_LIMIT}")
        rng = random.Random(seed)
        out = []
        for _ in range(samples):
            k = rng.choice(list(sizes)) if sizes else rng.randint(1, N)
            out.append(set_to_mask(rng.sample(range(N), k)))
        return np.array(out, dtype=np.int64)
    raise ValueError(f"unknown subset source {source!r}; expected one of {SOURCES}")


def equivalence_scan(p: int, gamma: int, source: str = "exhaustive", *, samples: int = 1000,
                     seed: Optional[int] = None, sizes: Optional[Sequence[int]] = None,
                     jobs: int = 1, keep_rows: bool = False,
                     max_scale: Optional[int] = None) -> ScanReport:
    """Tile, spectral and homogeneous verdicts for every subset from ``source``.

    The empty subset counts as neither a tile, spectral nor homogeneous.
    Counterexamples carry witnesses recomputed by the pure-Python predicates.
    """
    check_prime(p)
    check_scale(p ** gamma, max_scale, "equivalence scan")
    if source == "random" and seed is None:
        seed = random.SystemRandom().randrange(1 << 31)
    masks = _source_masks(p, gamma, source, samples, seed, sizes)
    t, s, h = classify_masks(masks, p, gamma, jobs)
    key = t.astype(np.int64) * 4 + s.astype(np.int64) * 2 + h.astype(np.int64)
    hist = np.bincount(key, minlength=8)
    counts = {(bool(k & 4), bool(k & 2), bool(k & 1)): int(hist[k]) for k in range(8) if hist[k]}
    bad = np.nonzero((key != 0) & (key != 7))[0]
    counterexamples = [classify(mask_to_set(int(masks[i])), p, gamma, max_scale)
                       for i in sorted(set(bad.tolist()), key=lambda i: int(masks[i]))]
    rows = []
    if keep_rows:
        rows = [classify(mask_to_set(int(m)), p, gamma, max_scale) for m in sorted(set(masks.tolist()))]
    return ScanReport(p, gamma, source, seed, int(len(masks)), counts, counterexamples, rows)

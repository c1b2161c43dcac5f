"""Finite p-homogeneous trees: construction, recognition, extension and duals.

A subset C of Z/p^gamma is read as the tree of its digit prefixes.  The
tree is homogeneous when at each level every node has either p children
(levels in I) or exactly one child (levels in J).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .padic import PAdicScaled, check_prime, valuation

Prefix = tuple
ChoiceFn = Callable[[int, Prefix], int]


def zero_choice(level: int, prefix: Prefix) -> int:
    return 0


def random_choice(p: int, seed) -> ChoiceFn:
    """Deterministic pseudo-random choice: the digit depends only on (seed, level, prefix)."""

    def choose(level: int, prefix: Prefix) -> int:
        return random.Random(f"{seed}:{level}:{prefix}").randrange(p)

    return choose


def digits(x: int, p: int, count: int) -> tuple:
    out = []
    for _ in range(count):
        x, d = divmod(x, p)
        out.append(d)
    return tuple(out)


def _check_levels(I: Iterable[int], gamma: int) -> frozenset:
    I = frozenset(int(i) for i in I)
    bad = [i for i in I if not 0 <= i < gamma]
    if bad:
        raise ValueError(f"levels {sorted(bad)} outside 0..{gamma - 1}")
    return I


@dataclass(frozen=True)
class HomoTree:
    """Homogeneous tree of depth ``gamma``; ``choice`` maps each reachable J-prefix to its digit."""

    p: int
    gamma: int
    I: frozenset
    choice: tuple = ()  # sorted ((prefix, digit), ...) over reachable J-prefixes

    def __post_init__(self):
        check_prime(self.p)
        if self.gamma < 0:
            raise ValueError("depth must be >= 0")
        object.__setattr__(self, "I", _check_levels(self.I, self.gamma))
        cmap = dict(self.choice)
        reachable = set(self._j_prefixes())
        missing = reachable - cmap.keys()
        if missing:
            raise ValueError(f"choice undefined at prefixes {sorted(missing)[:5]}")
        for pre, d in cmap.items():
            if not 0 <= d < self.p:
                raise ValueError(f"choice digit {d} out of range at {pre}")
        object.__setattr__(self, "choice", tuple(sorted((k, cmap[k]) for k in reachable)))

    @classmethod
    def build(cls, p: int, gamma: int, I: Iterable[int],
              choice: Union[ChoiceFn, Mapping, None] = None) -> "HomoTree":
        I = _check_levels(I, gamma)
        if choice is None:
            fn = zero_choice
        elif callable(choice):
            fn = choice
        else:
            fn = lambda level, prefix: choice[prefix]  # noqa: E731
        prefixes = [()]
        cmap = {}
        for level in range(gamma):
            if level in I:
                prefixes = [pre + (d,) for pre in prefixes for d in range(p)]
            else:
                nxt = []
                for pre in prefixes:
                    d = fn(level, pre)
                    cmap[pre] = d
                    nxt.append(pre + (d,))
                prefixes = nxt
        return cls(p, gamma, I, tuple(cmap.items()))

    @property
    def J(self) -> frozenset:
        return frozenset(range(self.gamma)) - self.I

    @property
    def choice_map(self) -> dict:
        return dict(self.choice)

    def _j_prefixes(self):
        cmap = dict(self.choice)
        prefixes = [()]
        for level in range(self.gamma):
            if level in self.I:
                prefixes = [pre + (d,) for pre in prefixes for d in range(self.p)]
            else:
                for pre in prefixes:
                    yield pre
                prefixes = [pre + (cmap.get(pre, 0),) for pre in prefixes]

    def leaf_digits(self) -> list:
        cmap = dict(self.choice)
        prefixes = [()]
        for level in range(self.gamma):
            if level in self.I:
                prefixes = [pre + (d,) for pre in prefixes for d in range(self.p)]
            else:
                prefixes = [pre + (cmap[pre],) for pre in prefixes]
        return prefixes

    def leaves(self) -> list:
        p = self.p
        return sorted(sum(d * p ** i for i, d in enumerate(pre)) for pre in self.leaf_digits())

    def extend(self, k: int) -> "HomoTree":
        """Same leaves multiplied by p^k, seen at depth gamma + k (k new single-child levels on top)."""
        if k < 0:
            raise ValueError("k must be >= 0")
        pad = (0,) * k
        cmap = {pad[:j]: 0 for j in range(k)}
        cmap.update({pad + pre: d for pre, d in self.choice})
        return HomoTree(self.p, self.gamma + k, frozenset(i + k for i in self.I), tuple(cmap.items()))


def leaves(t: HomoTree) -> list:
    return t.leaves()


def recover_structure(C: Iterable[int], p: int, gamma: int) -> Optional[HomoTree]:
    """The homogeneous tree whose leaves are C, or None if C's tree branches irregularly."""
    check_prime(p)
    C = list(C)
    if not C:
        raise ValueError("C must be nonempty")
    if len(set(C)) != len(C):
        raise ValueError("C has repeated residues")
    N = p ** gamma
    if any(not 0 <= c < N for c in C):
        raise ValueError(f"residues must lie in [0, {N})")
    I = set()
    cmap = {}
    for level in range(gamma):
        mod = p ** level
        children: dict = {}
        for c in C:
            children.setdefault(c % mod, set()).add((c // mod) % p)
        sizes = {len(v) for v in children.values()}
        if sizes == {p}:
            I.add(level)
        elif sizes == {1}:
            for node, kids in children.items():
                cmap[digits(node, p, level)] = next(iter(kids))
        else:
            return None
    return HomoTree(p, gamma, frozenset(I), tuple(cmap.items()))


@dataclass(frozen=True)
class QpTreeStructure:
    """(n, gamma, I, J): p^n C lies in Z_p and its reduction mod p^gamma is homogeneous with these levels."""

    n: int
    gamma: int
    I: frozenset
    tree: Optional[HomoTree] = field(default=None, compare=False)

    @property
    def J(self) -> frozenset:
        return frozenset(range(self.gamma)) - self.I

    def describes(self, C: Iterable[PAdicScaled]) -> bool:
        """Do the points p^n c reduce injectively mod p^gamma onto the leaves?"""
        if self.tree is None:
            raise ValueError("no tree attached")
        C = list(C)
        N = self.tree.p ** self.gamma
        scaled = [c.scale(self.n) for c in C]
        if any(x.m > 0 for x in scaled):
            return False
        res = sorted(x.a % N for x in scaled)
        return len(set(res)) == len(res) and res == self.tree.leaves()

    def realize(self) -> list:
        """Canonical representatives p^(-n) * leaves of the described set."""
        if self.tree is None:
            raise ValueError("no tree attached")
        p = self.tree.p
        return sorted(PAdicScaled(p, c, self.n) for c in self.tree.leaves())


def integer_scale(C: Sequence[PAdicScaled]) -> int:
    """Minimal n with p^n C inside Z_p (C must have a nonzero element)."""
    vals = [valuation(c) for c in C if not c.is_zero()]
    if not vals:
        raise ValueError("C has no nonzero element")
    return -int(min(vals))


def separating_depth(xs: Sequence[int], p: int) -> int:
    """Minimal gamma with xs distinct mod p^gamma."""
    xs = sorted(set(xs))
    if len(xs) < 2:
        return 0
    gamma = 0
    for i, x in enumerate(xs):
        for y in xs[i + 1:]:
            gamma = max(gamma, int(valuation(PAdicScaled(p, x - y))) + 1)
    return gamma


def qp_structure(C: Iterable[PAdicScaled]) -> Optional[QpTreeStructure]:
    C = list(C)
    if len(set(C)) < 2:
        raise ValueError("need at least two distinct points")
    p = C[0].p
    if any(c.p != p for c in C):
        raise ValueError("mixed primes")
    if len(set(C)) != len(C):
        raise ValueError("C has repeated points")
    n = integer_scale(C)
    ints = [c.scale(n).a for c in C]
    gamma = separating_depth(ints, p)
    N = p ** gamma
    t = recover_structure([x % N for x in ints], p, gamma)
    if t is None:
        return None
    return QpTreeStructure(n, gamma, t.I, t)


def extend_structure(s: QpTreeStructure, k: int) -> QpTreeStructure:
    if k < 0:
        raise ValueError("k must be >= 0")
    tree = s.tree.extend(k) if s.tree is not None else None
    return QpTreeStructure(s.n + k, s.gamma + k, frozenset(i + k for i in s.I), tree)


def dual_levels(I: Iterable[int], gamma: int) -> frozenset:
    return frozenset(gamma - 1 - i for i in I)


def dual_tree(t: HomoTree) -> HomoTree:
    """Tree with mirrored branching levels and all-zero choices; its leaves form a spectrum of t's."""
    return HomoTree.build(t.p, t.gamma, dual_levels(t.I, t.gamma))


def prefix_name(prefix: Prefix) -> str:
    return ".".join(["r"] + [str(d) for d in prefix])


def to_dot(C: Iterable[int], p: int, gamma: int) -> str:
    """DOT digraph of the prefix tree; node ids are 'r', 'r.d0', 'r.d0.d1', ..."""
    C = sorted(set(C))
    if not C:
        raise ValueError("C must be nonempty")
    N = p ** gamma
    if any(not 0 <= c < N for c in C):
        raise ValueError(f"residues must lie in [0, {N})")
    lines = ["digraph T {", '  "r" [label=""];']
    seen = {()}
    for c in C:
        ds = digits(c, p, gamma)
        for j in range(1, gamma + 1):
            pre = ds[:j]
            if pre in seen:
                continue
            seen.add(pre)
            label = str(c) if j == gamma else ""
            shape = ", shape=box" if j == gamma else ""
            lines.append(f'  "{prefix_name(pre)}" [label="{label}"{shape}];')
            lines.append(f'  "{prefix_name(pre[:-1])}" -> "{prefix_name(pre)}" [label="{pre[-1]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

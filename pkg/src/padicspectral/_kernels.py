"""Compiled bitmask kernels for scanning subsets of Z/N, N = p^gamma <= 62.

A subset is an int64 bitmask with bit x set when x is in the subset.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def popcount(x):
    n = 0
    while x:
        x &= x - 1
        n += 1
    return n


@njit(cache=True)
def rotate(m, x, N, full):
    """Translate the subset m by x in Z/N."""
    if x == 0:
        return m
    return ((m << x) | (m >> (N - x))) & full


@njit(cache=True)
def lowest_bit_index(x):
    i = 0
    while (x & 1) == 0:
        x >>= 1
        i += 1
    return i


@njit(cache=True)
def min_clique(allowed, N, size, full, adj, cand, elem):
    """Lexicographically smallest clique containing 0 in the Cayley graph of ``allowed``.

    Returns the clique as a mask, or 0 when none exists.  ``adj``, ``cand``
    and ``elem`` are scratch arrays of length >= N.
    """
    if size <= 0:
        return 0
    if size == 1:
        return 1
    for x in range(N):
        low = (1 << (x + 1)) - 1
        adj[x] = rotate(allowed, x, N, full) & ~low
    need = size - 1
    depth = 0
    cand[0] = adj[0]
    while True:
        if depth == need:
            out = 1
            for i in range(depth):
                out |= 1 << elem[i]
            return out
        c = cand[depth]
        if c == 0 or popcount(c) < need - depth:
            if depth == 0:
                return 0
            depth -= 1
            continue
        x = lowest_bit_index(c)
        c &= ~(1 << x)
        cand[depth] = c
        elem[depth] = x
        cand[depth + 1] = c & adj[x]
        depth += 1


@njit(cache=True)
def difference_mask(m, N, full):
    out = 0
    x = m
    while x:
        c = lowest_bit_index(x)
        x &= x - 1
        out |= rotate(m, (N - c) % N, N, full)
    return out


@njit(cache=True)
def tile_complement(m, N, full, adj, cand, elem):
    k = popcount(m)
    if k == 0 or N % k != 0:
        return 0
    diff = difference_mask(m, N, full)
    allowed = full & ~diff
    return min_clique(allowed, N, N // k, full, adj, cand, elem)


@njit(cache=True)
def zero_set_mask(m, p, gamma, N, counts, elems):
    """Bits d with sum_{c in m} w_N^(c d) = 0."""
    k = 0
    x = m
    while x:
        elems[k] = lowest_bit_index(x)
        x &= x - 1
        k += 1
    block = N // p
    out = 0
    for d in range(1, N):
        for i in range(N):
            counts[i] = 0
        for j in range(k):
            counts[(elems[j] * d) % N] += 1
        ok = True
        for i in range(block):
            v = counts[i]
            for t in range(1, p):
                if counts[i + t * block] != v:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out |= 1 << d
    return out


@njit(cache=True)
def spectrum_mask(m, p, gamma, N, full, adj, cand, elem, counts, elems):
    k = popcount(m)
    if k == 0:
        return 0
    allowed = zero_set_mask(m, p, gamma, N, counts, elems)
    return min_clique(allowed, N, k, full, adj, cand, elem)


@njit(cache=True)
def is_homogeneous_mask(m, p, gamma, children):
    """children[i, r, j]: mask of residues congruent to r + j p^i mod p^(i+1)."""
    if m == 0:
        return False
    for i in range(gamma):
        kind = 0
        nodes = p ** i
        for r in range(nodes):
            cnt = 0
            for j in range(p):
                if m & children[i, r, j]:
                    cnt += 1
            if cnt == 0:
                continue
            if cnt != 1 and cnt != p:
                return False
            if kind == 0:
                kind = cnt
            elif kind != cnt:
                return False
    return True


@njit(cache=True)
def classify_masks(masks, p, gamma, children, tile_out, spec_out, homo_out):
    N = p ** gamma
    full = (1 << N) - 1
    adj = np.zeros(N + 1, dtype=np.int64)
    cand = np.zeros(N + 1, dtype=np.int64)
    elem = np.zeros(N + 1, dtype=np.int64)
    counts = np.zeros(N, dtype=np.int64)
    elems = np.zeros(N, dtype=np.int64)
    for idx in range(masks.shape[0]):
        m = masks[idx]
        tile_out[idx] = tile_complement(m, N, full, adj, cand, elem) != 0
        spec_out[idx] = spectrum_mask(m, p, gamma, N, full, adj, cand, elem, counts, elems) != 0
        homo_out[idx] = is_homogeneous_mask(m, p, gamma, children)


@njit(cache=True)
def fixed_size_masks(N, k, out):
    """All k-subsets of Z/N in increasing mask order (Gosper's hack); out must hold C(N, k)."""
    if k == 0:
        out[0] = 0
        return
    m = (1 << k) - 1
    limit = 1 << N
    i = 0
    while m < limit:
        out[i] = m
        i += 1
        c = m & -m
        r = m + c
        m = (((r ^ m) >> 2) // c) | r


def child_table(p, gamma):
    N = p ** gamma
    width = max(1, p ** max(gamma - 1, 0))
    table = np.zeros((max(gamma, 1), width, p), dtype=np.int64)
    for i in range(gamma):
        mod = p ** (i + 1)
        for x in range(N):
            r = x % (p ** i)
            j = (x % mod) // (p ** i)
            table[i, r, j] |= 1 << x
    return table

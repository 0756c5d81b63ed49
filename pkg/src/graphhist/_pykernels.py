"""Pure-Python versions of the compiled kernels (same signatures, same results)."""

from __future__ import annotations

import numpy as np


def _words_to_ints(adj: np.ndarray) -> list[int]:
    rows = []
    for row in adj:
        x = 0
        for w, word in enumerate(row.tolist()):
            x |= int(word) << (64 * w)
        rows.append(x)
    return rows


def _count_from(rows, full, r, back, root):
    if r == 1:
        return 1
    img = [0] * r
    img[0] = root

    def extend(depth, used):
        c = full & ~used
        nb = int(back[depth])
        i = 0
        while nb:
            if nb & 1:
                c &= rows[img[i]]
            nb >>= 1
            i += 1
        if depth == r - 1:
            return c.bit_count()
        total = 0
        while c:
            bit = c & -c
            img[depth] = bit.bit_length() - 1
            total += extend(depth + 1, used | bit)
            c ^= bit
        return total

    return extend(1, 1 << root)


def rooted_injections(adj, n, back, nthreads=1):
    """Per-root counts of edge-preserving injections of a pattern."""
    rows = _words_to_ints(np.asarray(adj))
    full = (1 << n) - 1
    back = [int(x) for x in back]
    r = len(back)
    return np.array([_count_from(rows, full, r, back, v) for v in range(n)],
                    dtype=np.int64)


def rooted_injections_int(rows: list[int], n: int, back) -> list[int]:
    """Big-integer variant used when counts could overflow 64 bits."""
    full = (1 << n) - 1
    back = [int(x) for x in back]
    return [_count_from(rows, full, len(back), back, v) for v in range(n)]


def scan_masks(n, lo, hi, backs, sizes):
    """Rooted injection counts for every graph with edge mask in [lo, hi)."""
    if n > 8:
        raise ValueError("scan_masks supports n <= 8")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    P = len(sizes)
    out = np.zeros((hi - lo, P, n), dtype=np.int64)
    full = (1 << n) - 1
    for t in range(hi - lo):
        mask = lo + t
        rows = [0] * n
        for b, (i, j) in enumerate(pairs):
            if (mask >> b) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
        for p in range(P):
            r = int(sizes[p])
            back = [int(x) for x in backs[p][:r]]
            for v in range(n):
                out[t, p, v] = _count_from(rows, full, r, back, v)
    return out


def uniformity_scan(cols, a, e_total, eps):
    """Exhaustive search for a subset pair violating eps-uniformity."""
    cols = [int(c) for c in cols]
    b = len(cols)
    if a == 0 or b == 0:
        return None
    d0 = e_total / (a * b)
    tmin = 0
    while tmin <= b and not (tmin >= eps * b):
        tmin += 1
    tmin = max(tmin, 1)
    for amask in range(1, 1 << a):
        a1 = amask.bit_count()
        if not (a1 >= eps * a):
            continue
        degs = [(c & amask).bit_count() for c in cols]
        order = sorted(range(b), key=lambda j: -degs[j])
        top = bot = 0
        for t in range(1, b + 1):
            top += degs[order[t - 1]]
            bot += degs[order[b - t]]
            if t < tmin:
                continue
            which = None
            if abs(top / (a1 * t) - d0) >= eps:
                which = order[:t]
            elif abs(bot / (a1 * t) - d0) >= eps:
                which = order[b - t:]
            if which is not None:
                bmask = 0
                for j in which:
                    bmask |= 1 << j
                return amask, bmask
    return None

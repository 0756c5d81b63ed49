# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: rooted injection counting, bitmask graph scans and the
exhaustive pair-uniformity scan.  ``_pykernels`` mirrors every function here."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange, parallel
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memset
from libc.math cimport fabs

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef int64_t _extend(const uint64_t* adj, const uint64_t* full, int W, int r,
                     const int64_t* back, int depth, int* img,
                     uint64_t* used, uint64_t* cand) noexcept nogil:
    cdef uint64_t* c = cand + depth * W
    cdef int w, i, v
    cdef int64_t total = 0
    cdef int64_t nb = back[depth]
    cdef uint64_t word, bit
    for w in range(W):
        c[w] = full[w] & ~used[w]
    i = 0
    while nb:
        if nb & 1:
            v = img[i]
            for w in range(W):
                c[w] &= adj[v * W + w]
        nb >>= 1
        i += 1
    if depth == r - 1:
        for w in range(W):
            total += __builtin_popcountll(c[w])
        return total
    for w in range(W):
        word = c[w]
        while word:
            bit = word & (~word + 1)
            img[depth] = w * 64 + __builtin_ctzll(word)
            used[w] |= bit
            total += _extend(adj, full, W, r, back, depth + 1, img, used, cand)
            used[w] ^= bit
            word ^= bit
    return total


cdef int64_t _rooted_at(const uint64_t* adj, const uint64_t* full, int W, int r,
                        const int64_t* back, int root, int* img,
                        uint64_t* used, uint64_t* cand) noexcept nogil:
    cdef int w
    if r == 1:
        return 1
    for w in range(W):
        used[w] = 0
    used[root // 64] |= (<uint64_t>1) << (root % 64)
    img[0] = root
    return _extend(adj, full, W, r, back, 1, img, used, cand)


def rooted_injections(cnp.uint64_t[:, ::1] adj, int n, cnp.int64_t[::1] back,
                      int nthreads=1):
    """Per-root counts of edge-preserving injections of a pattern.

    ``back[j]`` is the bitmask of earlier pattern vertices adjacent to pattern
    vertex ``j``; vertex 0 is the root.
    """
    cdef int W = adj.shape[1]
    cdef int r = back.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] outv = out
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] full = np.zeros(W, dtype=np.uint64)
    cdef int v, w
    for v in range(n):
        full[v // 64] |= (<uint64_t>1) << (v % 64)
    cdef const uint64_t* fp = <const uint64_t*> &full[0]
    cdef const uint64_t* ap = <const uint64_t*> &adj[0, 0] if n > 0 else NULL
    cdef const int64_t* bp = <const int64_t*> &back[0]
    cdef int* img
    cdef uint64_t* used
    cdef uint64_t* cand
    if n == 0:
        return out
    if nthreads < 1:
        nthreads = 1
    with nogil, parallel(num_threads=nthreads):
        img = <int*> malloc(r * sizeof(int))
        used = <uint64_t*> malloc(W * sizeof(uint64_t))
        cand = <uint64_t*> malloc(r * W * sizeof(uint64_t))
        for v in prange(n, schedule='dynamic'):
            outv[v] = _rooted_at(ap, fp, W, r, bp, v, img, used, cand)
        free(img)
        free(used)
        free(cand)
    return out


def scan_masks(int n, cnp.int64_t lo, cnp.int64_t hi, cnp.int64_t[:, ::1] backs,
               cnp.int64_t[::1] sizes):
    """Rooted injection counts for every graph with edge mask in [lo, hi).

    Edge bit ``b`` is the b-th pair (i, j), i < j, in lexicographic order.
    Returns an array of shape (hi - lo, P, n).
    """
    cdef int P = backs.shape[0]
    cdef cnp.int64_t count = hi - lo
    cdef cnp.ndarray[cnp.int64_t, ndim=3] out = np.zeros((count, P, n), dtype=np.int64)
    cdef cnp.int64_t[:, :, ::1] o = out
    cdef int npairs = n * (n - 1) // 2
    cdef int pi[64]
    cdef int pj[64]
    cdef int i, j, b, p, v
    cdef cnp.int64_t t, mask
    cdef uint64_t adj[64]
    cdef uint64_t full = ((<uint64_t>1) << n) - 1
    cdef int img[64]
    cdef uint64_t used[1]
    cdef uint64_t cand[64]
    if n > 8:
        raise ValueError("scan_masks supports n <= 8")
    b = 0
    for i in range(n):
        for j in range(i + 1, n):
            pi[b] = i
            pj[b] = j
            b += 1
    with nogil:
        for t in range(count):
            mask = lo + t
            for v in range(n):
                adj[v] = 0
            for b in range(npairs):
                if (mask >> b) & 1:
                    adj[pi[b]] |= (<uint64_t>1) << pj[b]
                    adj[pj[b]] |= (<uint64_t>1) << pi[b]
            for p in range(P):
                for v in range(n):
                    o[t, p, v] = _rooted_at(adj, &full, 1, <int> sizes[p],
                                            <const int64_t*> &backs[p, 0], v, img, used, cand)
    return out


def uniformity_scan(cnp.uint64_t[::1] cols, int a, cnp.int64_t e_total, double eps):
    """Exhaustive search for a subset pair violating eps-uniformity.

    ``cols[j]`` is the neighbourhood of B-vertex j as a bitmask over the
    ``a`` vertices of A.  Every subset A' of A is enumerated; for each size t
    the extreme B' are the t vertices of largest / smallest degree into A'.
    Returns (amask, bmask) of the first violating pair or None.
    """
    cdef int b = cols.shape[0]
    cdef double d0
    cdef cnp.int64_t amask, nmask = (<cnp.int64_t>1) << a
    cdef int a1, t, j, k, dj, tmin
    cdef int deg[64]
    cdef int order[64]
    cdef int bucket[65]
    cdef cnp.int64_t top, bot
    cdef int found = 0, which = 0, ft = 0
    cdef cnp.int64_t fa = 0
    if a > 30 or b > 64:
        raise ValueError("uniformity_scan supports |A| <= 30 and |B| <= 64")
    if a == 0 or b == 0:
        return None
    d0 = <double> e_total / <double> (a * b)
    tmin = 0
    while tmin <= b and not (<double> tmin >= eps * <double> b):
        tmin += 1
    if tmin == 0:
        tmin = 1
    with nogil:
        for amask in range(1, nmask):
            a1 = __builtin_popcountll(<uint64_t> amask)
            if not (<double> a1 >= eps * <double> a):
                continue
            # counting sort of B by degree into A', descending
            memset(bucket, 0, sizeof(int) * (a1 + 2))
            for j in range(b):
                dj = __builtin_popcountll(cols[j] & <uint64_t> amask)
                deg[j] = dj
                bucket[a1 - dj + 1] += 1
            for k in range(1, a1 + 2):
                bucket[k] += bucket[k - 1]
            for j in range(b):
                order[bucket[a1 - deg[j]]] = j
                bucket[a1 - deg[j]] += 1
            top = 0
            bot = 0
            for t in range(1, b + 1):
                top += deg[order[t - 1]]
                bot += deg[order[b - t]]
                if t < tmin:
                    continue
                if fabs(<double> top / <double> (a1 * t) - d0) >= eps:
                    found = 1
                    which = 0
                    ft = t
                    fa = amask
                    break
                if fabs(<double> bot / <double> (a1 * t) - d0) >= eps:
                    found = 1
                    which = 1
                    ft = t
                    fa = amask
                    break
            if found:
                break
    if not found:
        return None
    return int(fa), _extreme_set(cols, fa, ft, which)


cdef object _extreme_set(cnp.uint64_t[::1] cols, cnp.int64_t amask, int t, int which):
    cdef int b = cols.shape[0]
    degs = [__builtin_popcountll(cols[j] & <uint64_t> amask) for j in range(b)]
    # stable order: descending degree, ties by index (matches the counting sort)
    idx = sorted(range(b), key=lambda j: -degs[j])
    chosen = idx[:t] if which == 0 else idx[b - t:]
    mask = 0
    for j in chosen:
        mask |= 1 << j
    return mask

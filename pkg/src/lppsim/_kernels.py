"""Numba kernels for the passage-value dynamic programs.

All four kernels are written as plain sequential recurrences, never as
vectorized prefix scans: the test contract demands that DP values equal
a brute-force enumeration *exactly* in floating point, which holds only
if the DP and the enumeration accumulate candidate sums with the same
association order.  Each kernel folds weights left to right along its
recurrence, so a candidate's value is a left fold over its sites in
visit order; the oracles reproduce that fold.

Weight layout: X has shape (k, N); X[j, i] is the weight of column i+1
at level j+1.
"""

import numpy as np
from numba import njit

NEG_INF = float("-inf")
POS_INF = float("inf")


@njit(cache=True, nogil=True)
def theorem_last(X):
    """max over partitions 0=i_0<=...<=i_k=N of the row-segment sums,
    segments (i_{j-1}, i_j] disjoint, empty segments allowed."""
    k, N = X.shape
    T = np.empty(N + 1)
    T[0] = 0.0
    for m in range(1, N + 1):
        T[m] = NEG_INF
    for j in range(k):
        for m in range(1, N + 1):
            cand = T[m - 1] + X[j, m - 1]
            if cand > T[m]:
                T[m] = cand
    return T[N]


@njit(cache=True, nogil=True)
def theorem_first(X):
    k, N = X.shape
    T = np.empty(N + 1)
    T[0] = 0.0
    for m in range(1, N + 1):
        T[m] = POS_INF
    for j in range(k):
        for m in range(1, N + 1):
            cand = T[m - 1] + X[j, m - 1]
            if cand < T[m]:
                T[m] = cand
    return T[N]


@njit(cache=True, nogil=True)
def path_last(X):
    """max over up/right lattice paths (1,1) -> (N,k) of the site sums."""
    k, N = X.shape
    G = np.empty(N)
    G[0] = X[0, 0]
    for i in range(1, N):
        G[i] = G[i - 1] + X[0, i]
    for j in range(1, k):
        G[0] = G[0] + X[j, 0]
        for i in range(1, N):
            best = G[i] if G[i] > G[i - 1] else G[i - 1]
            G[i] = X[j, i] + best
    return G[N - 1]


@njit(cache=True, nogil=True)
def path_first(X):
    k, N = X.shape
    G = np.empty(N)
    G[0] = X[0, 0]
    for i in range(1, N):
        G[i] = G[i - 1] + X[0, i]
    for j in range(1, k):
        G[0] = G[0] + X[j, 0]
        for i in range(1, N):
            best = G[i] if G[i] < G[i - 1] else G[i - 1]
            G[i] = X[j, i] + best
    return G[N - 1]


@njit(cache=True, nogil=True)
def theorem_table(X, maximize):
    """Full (N+1, k+1) DP table for recovery; T[m, j] covers columns <= m
    with rows <= j."""
    k, N = X.shape
    bad = NEG_INF if maximize else POS_INF
    T = np.empty((N + 1, k + 1))
    T[0, :] = 0.0
    for m in range(1, N + 1):
        T[m, 0] = bad
    for j in range(1, k + 1):
        for m in range(1, N + 1):
            ext = T[m - 1, j] + X[j - 1, m - 1]
            inh = T[m, j - 1]
            if maximize:
                T[m, j] = ext if ext > inh else inh
            else:
                T[m, j] = ext if ext < inh else inh
    return T


@njit(cache=True, nogil=True)
def path_table(X, maximize):
    """Full (N, k) DP table for path recovery; G[i, j] ends at site (i+1, j+1)."""
    k, N = X.shape
    G = np.empty((N, k))
    G[0, 0] = X[0, 0]
    for i in range(1, N):
        G[i, 0] = G[i - 1, 0] + X[0, i]
    for j in range(1, k):
        G[0, j] = G[0, j - 1] + X[j, 0]
        for i in range(1, N):
            a = G[i - 1, j]
            b = G[i, j - 1]
            if maximize:
                best = a if a > b else b
            else:
                best = a if a < b else b
            G[i, j] = X[j, i] + best
    return G

# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled collapsed Gibbs sweep.

Must stay arithmetically identical to ``_gibbs_py.py`` (same RNG, same
operation order) so the two backends are bitwise-interchangeable.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int32_t

cnp.import_array()

cdef double _INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _splitmix64_next(uint64_t *state) nogil:
    cdef uint64_t z
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    z = z ^ (z >> 31)
    return z


def run_gibbs(doc_ids, word_ids, int M, int K, int V, double alpha, double beta,
              int iterations, int burn_in, int thin, seed, bint sample_average=True):
    """Compiled twin of ``_gibbs_py.run_gibbs``; same contract."""
    cdef cnp.ndarray[int32_t, ndim=1] d_arr = np.ascontiguousarray(doc_ids, dtype=np.int32)
    cdef cnp.ndarray[int32_t, ndim=1] w_arr = np.ascontiguousarray(word_ids, dtype=np.int32)
    cdef int n_tokens = d_arr.shape[0]

    cdef cnp.ndarray[int32_t, ndim=1] n_kw = np.zeros(K * V, dtype=np.int32)
    cdef cnp.ndarray[int32_t, ndim=1] n_dk = np.zeros(M * K, dtype=np.int32)
    cdef cnp.ndarray[int32_t, ndim=1] n_k = np.zeros(K, dtype=np.int32)
    cdef cnp.ndarray[int32_t, ndim=1] n_d = np.zeros(M, dtype=np.int32)
    cdef cnp.ndarray[int32_t, ndim=1] z = np.zeros(n_tokens, dtype=np.int32)

    cdef cnp.ndarray[double, ndim=2] phi_acc = np.zeros((K, V), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] theta_acc = np.zeros((M, K), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] cum = np.zeros(K, dtype=np.float64)

    cdef double vbeta = V * beta
    cdef double kalpha = K * alpha
    cdef uint64_t state = <uint64_t>(int(seed) & ((1 << 64) - 1))
    cdef uint64_t r
    cdef double u, total, p
    cdef int t, it, d, w, k, k2, v, dk, kv
    cdef int n_snap = 0
    cdef bint take

    for t in range(n_tokens):
        r = _splitmix64_next(&state)
        u = (r >> 11) * _INV_2_53
        k = <int>(u * K)
        if k == K:
            k = K - 1
        z[t] = k
        d = d_arr[t]
        w = w_arr[t]
        n_kw[k * V + w] += 1
        n_dk[d * K + k] += 1
        n_k[k] += 1
        n_d[d] += 1

    for it in range(1, iterations + 1):
        for t in range(n_tokens):
            d = d_arr[t]
            w = w_arr[t]
            k = z[t]
            n_kw[k * V + w] -= 1
            n_dk[d * K + k] -= 1
            n_k[k] -= 1
            total = 0.0
            dk = d * K
            for k2 in range(K):
                p = (n_kw[k2 * V + w] + beta) / (n_k[k2] + vbeta) \
                    * (n_dk[dk + k2] + alpha)
                total = total + p
                cum[k2] = total
            r = _splitmix64_next(&state)
            u = ((r >> 11) * _INV_2_53) * total
            k = 0
            while k < K - 1 and cum[k] < u:
                k += 1
            z[t] = k
            n_kw[k * V + w] += 1
            n_dk[dk + k] += 1
            n_k[k] += 1

        take = (sample_average and it > burn_in and (it - burn_in) % thin == 0) \
            or (it == iterations and (not sample_average))
        if take:
            _snapshot(phi_acc, theta_acc, n_kw, n_dk, n_k, n_d, K, V, M,
                      alpha, beta, vbeta, kalpha)
            n_snap += 1

    if n_snap == 0:
        _snapshot(phi_acc, theta_acc, n_kw, n_dk, n_k, n_d, K, V, M,
                  alpha, beta, vbeta, kalpha)
        n_snap = 1
    return phi_acc, theta_acc, n_snap


cdef void _snapshot(cnp.ndarray[double, ndim=2] phi_acc,
                    cnp.ndarray[double, ndim=2] theta_acc,
                    cnp.ndarray[int32_t, ndim=1] n_kw,
                    cnp.ndarray[int32_t, ndim=1] n_dk,
                    cnp.ndarray[int32_t, ndim=1] n_k,
                    cnp.ndarray[int32_t, ndim=1] n_d,
                    int K, int V, int M,
                    double alpha, double beta, double vbeta, double kalpha):
    cdef int k, v, d, kv, dk
    cdef double denom
    for k in range(K):
        denom = n_k[k] + vbeta
        kv = k * V
        for v in range(V):
            phi_acc[k, v] += (n_kw[kv + v] + beta) / denom
    for d in range(M):
        denom = n_d[d] + kalpha
        dk = d * K
        for k in range(K):
            theta_acc[d, k] += (n_dk[dk + k] + alpha) / denom

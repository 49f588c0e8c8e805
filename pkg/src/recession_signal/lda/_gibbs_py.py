"""Pure-Python collapsed Gibbs sweep; fallback for the compiled kernel.

Arithmetic and RNG (splitmix64) mirror ``_gibbs.pyx`` operation for
operation, so both backends produce bitwise-identical output for the
same seed. Keep the two files in sync.
"""

import numpy as np

_MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0


def _splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return state, z


def run_gibbs(doc_ids, word_ids, M, K, V, alpha, beta,
              iterations, burn_in, thin, seed, sample_average=True):
    """Run collapsed Gibbs sampling over token topic assignments.

    doc_ids/word_ids are parallel per-token index sequences. Returns
    (phi_acc, theta_acc, n_snapshots) where the accumulators hold sums
    of per-snapshot smoothed estimates.
    """
    doc_ids = [int(d) for d in doc_ids]
    word_ids = [int(w) for w in word_ids]
    n_tokens = len(word_ids)

    n_kw = [0] * (K * V)
    n_dk = [0] * (M * K)
    n_k = [0] * K
    n_d = [0] * M
    z = [0] * n_tokens

    vbeta = V * beta
    kalpha = K * alpha
    state = seed & _MASK

    # random initial assignments
    for t in range(n_tokens):
        state, r = _splitmix64(state)
        u = (r >> 11) * _INV_2_53
        k = int(u * K)
        if k == K:
            k = K - 1
        z[t] = k
        d, w = doc_ids[t], word_ids[t]
        n_kw[k * V + w] += 1
        n_dk[d * K + k] += 1
        n_k[k] += 1
        n_d[d] += 1

    phi_acc = np.zeros((K, V), dtype=np.float64)
    theta_acc = np.zeros((M, K), dtype=np.float64)
    pa = phi_acc.ravel()
    ta = theta_acc.ravel()
    n_snap = 0
    cum = [0.0] * K

    for it in range(1, iterations + 1):
        for t in range(n_tokens):
            d, w = doc_ids[t], word_ids[t]
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
            state, r = _splitmix64(state)
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
            _snapshot(pa, ta, n_kw, n_dk, n_k, n_d, K, V, M, alpha, beta, vbeta, kalpha)
            n_snap += 1

    if n_snap == 0:
        _snapshot(pa, ta, n_kw, n_dk, n_k, n_d, K, V, M, alpha, beta, vbeta, kalpha)
        n_snap = 1
    return phi_acc, theta_acc, n_snap


def _snapshot(pa, ta, n_kw, n_dk, n_k, n_d, K, V, M, alpha, beta, vbeta, kalpha):
    for k in range(K):
        denom = n_k[k] + vbeta
        kv = k * V
        for v in range(V):
            pa[kv + v] += (n_kw[kv + v] + beta) / denom
    for d in range(M):
        denom = n_d[d] + kalpha
        dk = d * K
        for k in range(K):
            ta[dk + k] += (n_dk[dk + k] + alpha) / denom

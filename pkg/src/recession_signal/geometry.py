"""Divergences between topic distributions, the intertopic distance
matrix, the coherence statistic, and the 2D projection."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotADistribution, TooFewTopics

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class DistanceMatrix:
    entries: np.ndarray  # K x K, symmetric, zero diagonal

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Projection2D:
    points: np.ndarray  # K x 2


def _check_pair(P, Q):
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    if P.shape != Q.shape or P.ndim != 1:
        raise DimensionMismatch(f"shapes {P.shape} vs {Q.shape}")
    for name, vec in (("P", P), ("Q", Q)):
        if np.any(vec < 0):
            raise NotADistribution(f"{name} has negative entries")
        if abs(vec.sum() - 1.0) > _SUM_TOL:
            raise NotADistribution(f"{name} sums to {vec.sum()!r}, not 1")
    return P, Q


def kl_divergence(P, Q, base: float = 2.0) -> float:
    """Kullback-Leibler divergence of Q from P; terms with P(i)=0
    contribute 0, and any P(i)>0 with Q(i)=0 gives +inf."""
    P, Q = _check_pair(P, Q)
    mask = P > 0
    if np.any(Q[mask] == 0):
        return math.inf
    ratio = P[mask] / Q[mask]
    return float(np.sum(P[mask] * np.log(ratio)) / math.log(base))


def js_divergence(P, Q, base: float = 2.0) -> float:
    """Jensen-Shannon divergence; finite, symmetric, in [0,1] for base 2."""
    P, Q = _check_pair(P, Q)
    M = 0.5 * (P + Q)
    return 0.5 * kl_divergence(P, M, base) + 0.5 * kl_divergence(Q, M, base)


def js_distance(P, Q, base: float = 2.0) -> float:
    """Square root of the Jensen-Shannon divergence (a metric)."""
    d = js_divergence(P, Q, base)
    # tiny negative values can appear from cancellation when P ~ Q
    return math.sqrt(max(d, 0.0))


def distance_matrix(model, base: float = 2.0) -> DistanceMatrix:
    """K x K matrix of pairwise Jensen-Shannon distances between the
    model's topic-word rows."""
    phi = np.asarray(model.phi, dtype=np.float64)
    K = phi.shape[0]
    out = np.zeros((K, K), dtype=np.float64)
    for i in range(K):
        for j in range(i + 1, K):
            d = js_distance(phi[i], phi[j], base)
            out[i, j] = out[j, i] = d
    return DistanceMatrix(entries=out)


def coherence(m: DistanceMatrix, include_diagonal: bool = True) -> float:
    """Population standard deviation of the distance-matrix entries.

    The literal definition runs over all K^2 entries including the zero
    diagonal; include_diagonal=False restricts to off-diagonal entries
    for sensitivity analysis.
    """
    entries = m.entries
    if not include_diagonal:
        k = entries.shape[0]
        if k < 2:
            return 0.0
        entries = entries[~np.eye(k, dtype=bool)]
    return float(np.sqrt(np.mean((entries - entries.mean()) ** 2)))


def project_2d(m: DistanceMatrix) -> Projection2D:
    """Classical MDS of the distance matrix down to two dimensions.

    Double-center -D^2/2, take the top two eigenpairs, and scale
    eigenvectors by sqrt of the (nonnegative-clamped) eigenvalues.
    Signs are fixed so each axis's largest-magnitude coordinate is
    nonnegative.
    """
    D = m.entries
    K = D.shape[0]
    if K < 2:
        raise TooFewTopics(f"need at least 2 topics, got {K}")
    J = np.eye(K) - np.ones((K, K)) / K
    B = -0.5 * J @ (D ** 2) @ J
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1][:2]
    lams = np.clip(evals[order], 0.0, None)
    pts = evecs[:, order] * np.sqrt(lams)
    for axis in range(2):
        col = pts[:, axis]
        if len(col) and col[np.argmax(np.abs(col))] < 0:
            pts[:, axis] = -col
    return Projection2D(points=pts)

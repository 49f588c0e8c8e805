"""Per-slice LDA fitting via collapsed Gibbs sampling."""

import json
import logging
from dataclasses import dataclass, field, asdict

import numpy as np

from ..corpus import MonthlySlice
from ..errors import EmptySlice, InvalidConfig
from . import backend

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LdaConfig:
    K: int = 30
    alpha: float | None = None  # defaults to 50/K
    beta: float = 0.1
    iterations: int = 1000
    burn_in: int = 500
    thin: int = 10
    sample_average: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise InvalidConfig(f"K must be positive, got {self.K}")
        if self.alpha is not None and self.alpha <= 0:
            raise InvalidConfig(f"alpha must be positive, got {self.alpha}")
        if self.beta <= 0:
            raise InvalidConfig(f"beta must be positive, got {self.beta}")
        if self.iterations < 1:
            raise InvalidConfig("iterations must be positive")
        if not 0 <= self.burn_in < self.iterations:
            raise InvalidConfig("burn_in must satisfy 0 <= burn_in < iterations")
        if self.thin < 1:
            raise InvalidConfig("thin must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidConfig("seed must fit in 64 unsigned bits")

    @property
    def effective_alpha(self) -> float:
        return 50.0 / self.K if self.alpha is None else self.alpha


@dataclass(frozen=True)
class TopicModel:
    phi: np.ndarray        # K x V, row-stochastic
    theta: np.ndarray      # M x K, row-stochastic
    vocabulary: tuple[str, ...]
    config: LdaConfig
    month: str = ""


def fit_lda(slice: MonthlySlice, config: LdaConfig) -> TopicModel:
    """Fit a K-topic model to one monthly slice.

    Vocabulary is per-slice. phi/theta are averages of smoothed
    count estimates over post-burn-in thinned Gibbs snapshots.
    Deterministic given config.seed.
    """
    vocab = sorted({tok for doc in slice.documents for tok in doc.tokens})
    if not vocab:
        raise EmptySlice(f"no tokens in slice {slice.month!r}")
    word_index = {w: i for i, w in enumerate(vocab)}

    doc_ids, word_ids = [], []
    docs = [d for d in slice.documents if d.tokens]
    for di, doc in enumerate(docs):
        for tok in doc.tokens:
            doc_ids.append(di)
            word_ids.append(word_index[tok])

    M, V, K = len(docs), len(vocab), config.K
    phi_acc, theta_acc, n_snap = backend.run_gibbs(
        np.asarray(doc_ids, dtype=np.int32),
        np.asarray(word_ids, dtype=np.int32),
        M, K, V,
        config.effective_alpha, config.beta,
        config.iterations, config.burn_in, config.thin,
        config.seed, config.sample_average,
    )
    phi = np.asarray(phi_acc) / n_snap
    theta = np.asarray(theta_acc) / n_snap
    return TopicModel(phi=phi, theta=theta, vocabulary=tuple(vocab),
                      config=config, month=slice.month)


def held_out_log_likelihood(model: TopicModel, slice: MonthlySlice) -> float:
    """Sum over tokens of log of the per-document topic-mixture word
    probability; tokens outside the model vocabulary are skipped."""
    word_index = {w: i for i, w in enumerate(model.vocabulary)}
    docs = [d for d in slice.documents if d.tokens]
    # Documents align with theta rows by position; extra documents fall
    # back to the corpus-level topic mixture (mean of theta rows).
    mean_theta = model.theta.mean(axis=0)
    total = 0.0
    for di, doc in enumerate(docs):
        theta_d = model.theta[di] if di < model.theta.shape[0] else mean_theta
        for tok in doc.tokens:
            wi = word_index.get(tok)
            if wi is None:
                continue
            total += float(np.log(theta_d @ model.phi[:, wi]))
    return total


def dump_model(model: TopicModel, path) -> None:
    payload = {
        "month": model.month,
        "vocabulary": list(model.vocabulary),
        "phi": model.phi.tolist(),
        "theta": model.theta.tolist(),
        "config": asdict(model.config),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_model(path) -> TopicModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return TopicModel(
        phi=np.asarray(payload["phi"], dtype=np.float64),
        theta=np.asarray(payload["theta"], dtype=np.float64),
        vocabulary=tuple(payload["vocabulary"]),
        config=LdaConfig(**payload["config"]),
        month=payload["month"],
    )

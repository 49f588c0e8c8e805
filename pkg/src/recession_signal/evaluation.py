"""Classification metrics, ROC/AUROC, backtests, block bootstrap, and
Diebold-Mariano forecast comparison."""

import enum
import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import (BlockTooLong, InsufficientTraining, LengthMismatch,
                     OneClassOnly, ZeroLossDifferential)
from .months import month_ordinal
from .probit import DesignMatrix, fit_probit, predict

log = logging.getLogger(__name__)


class Scheme(str, enum.Enum):
    LAST_THIRD = "last_third"      # train first 2/3, test last 1/3
    FIRST_THIRD = "first_third"    # train last 2/3, test first 1/3
    MIDDLE_THIRD = "middle_third"  # train outer thirds, test middle


@dataclass(frozen=True)
class BacktestPlan:
    scheme: Scheme
    n_rows: int

    def test_indices(self) -> np.ndarray:
        third = self.n_rows // 3
        if self.scheme is Scheme.LAST_THIRD:
            return np.arange(2 * third, self.n_rows)
        if self.scheme is Scheme.FIRST_THIRD:
            return np.arange(0, third)
        return np.arange(third, 2 * third)

    def train_indices(self) -> np.ndarray:
        test = set(self.test_indices().tolist())
        return np.array([i for i in range(self.n_rows) if i not in test])


@dataclass(frozen=True)
class RocCurve:
    points: np.ndarray      # (fpr, tpr) pairs, anchored at (0,0) and (1,1)
    thresholds: np.ndarray


@dataclass(frozen=True)
class ClassificationReport:
    f1: float
    precision: float
    recall: float
    confusion: tuple[int, int, int, int]  # tp, fp, fn, tn


def classify(probs, c_star: float = 0.5) -> np.ndarray:
    """1 where probability >= c_star (inclusive threshold)."""
    if not 0 < c_star < 1:
        raise ValueError(f"c_star must lie in (0,1), got {c_star}")
    return (np.asarray(probs, dtype=np.float64) >= c_star).astype(np.int64)


def f1_score(pred, actual) -> ClassificationReport:
    """Precision/recall/F1 on the positive (recession) class; 0/0 is 0."""
    pred = np.asarray(pred, dtype=np.int64)
    actual = np.asarray(actual, dtype=np.int64)
    if pred.shape != actual.shape:
        raise LengthMismatch(f"{pred.shape} vs {actual.shape}")
    tp = int(np.sum((pred == 1) & (actual == 1)))
    fp = int(np.sum((pred == 1) & (actual == 0)))
    fn = int(np.sum((pred == 0) & (actual == 1)))
    tn = int(np.sum((pred == 0) & (actual == 0)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ClassificationReport(f1=f1, precision=precision, recall=recall,
                                confusion=(tp, fp, fn, tn))


def roc_curve(probs, actual) -> RocCurve:
    """ROC points at every distinct predicted probability, plus anchors."""
    probs = np.asarray(probs, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.int64)
    if probs.shape != actual.shape:
        raise LengthMismatch(f"{probs.shape} vs {actual.shape}")
    n_pos = int(np.sum(actual == 1))
    n_neg = int(np.sum(actual == 0))
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly("both classes required for a ROC curve")
    thresholds = np.unique(probs)[::-1]
    pts = [(0.0, 0.0)]
    for thr in thresholds:
        pred = probs >= thr
        tpr = float(np.sum(pred & (actual == 1))) / n_pos
        fpr = float(np.sum(pred & (actual == 0))) / n_neg
        pts.append((fpr, tpr))
    pts.append((1.0, 1.0))
    return RocCurve(points=np.array(pts),
                    thresholds=np.concatenate(([np.inf], thresholds, [-np.inf])))


def auroc(curve: RocCurve) -> float:
    """Trapezoid-rule area under the ROC curve."""
    fpr, tpr = curve.points[:, 0], curve.points[:, 1]
    return float(np.trapezoid(tpr, fpr))


def auroc_from_scores(probs, actual) -> float:
    return auroc(roc_curve(probs, actual))


def recursive_backtest(d: DesignMatrix, plan: BacktestPlan, horizon: int) -> np.ndarray:
    """Out-of-sample probabilities for the plan's test rows.

    For the chronological last-third scheme each test month t is
    predicted by a model refit on every row whose outcome is dated at
    most t-h (expanding window, no lookahead). The first/middle-third
    schemes are retrospective robustness splits, so a single fit on the
    plan's training rows is used. A failed refit carries the last
    successful fit forward with a warning.
    """
    if plan.n_rows != len(d.months):
        raise ValueError("plan size does not match design rows")
    test_idx = plan.test_indices()
    if len(test_idx) == 0:
        raise InsufficientTraining("empty test region")
    ordinals = np.array([month_ordinal(m) for m in d.months])

    if plan.scheme is not Scheme.LAST_THIRD:
        train_idx = plan.train_indices()
        fit = fit_probit(_subset(d, train_idx))
        return predict(fit, d.X[test_idx])

    probs = np.empty(len(test_idx))
    fit = None
    for out_pos, i in enumerate(test_idx):
        cutoff = ordinals[i] - horizon
        train_idx = np.flatnonzero(ordinals <= cutoff)
        try:
            fit = fit_probit(_subset(d, train_idx))
        except Exception as exc:  # carry the previous fit forward
            if fit is None:
                raise InsufficientTraining(
                    f"cannot fit initial model for {d.months[i]}: {exc}") from exc
            log.warning("refit failed for %s (%s); reusing previous fit",
                        d.months[i], exc)
        probs[out_pos] = predict(fit, d.X[i:i + 1])[0]
    return probs


def _subset(d: DesignMatrix, idx) -> DesignMatrix:
    return DesignMatrix(months=tuple(d.months[i] for i in idx),
                        y=d.y[idx], X=d.X[idx], columns=d.columns)


def block_bootstrap(X, y, block_length: int = 24, replications: int = 200,
                    seed: int = 0):
    """Moving-block bootstrap over aligned (X, y) rows.

    Each replicate concatenates ceil(n/block_length) uniformly drawn
    contiguous blocks and truncates to n rows; X and y are resampled
    jointly. Deterministic given the seed.
    """
    X = np.asarray(X)
    y = np.asarray(y)
    n = len(y)
    if block_length > n:
        raise BlockTooLong(f"block length {block_length} exceeds {n} rows")
    if block_length < 1:
        raise ValueError("block length must be positive")
    n_blocks = -(-n // block_length)
    n_starts = n - block_length + 1
    out = []
    for r in range(replications):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(r,)))
        starts = rng.integers(0, n_starts, size=n_blocks)
        idx = np.concatenate([np.arange(s, s + block_length) for s in starts])[:n]
        out.append((X[idx], y[idx]))
    return out


def positional_backtest(X, y, columns, horizon: int, train_frac: float = 2 / 3) -> np.ndarray:
    """Expanding-window backtest over rows treated as consecutive months.

    Used for bootstrap replicates, whose resampled rows have no calendar
    identity: row order is pseudo-time. Predicts each row past the
    train_frac boundary from a fit on rows at least `horizon` positions
    older, carrying failed refits forward.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    start = int(n * train_frac)
    if start < X.shape[1] + 1:
        raise InsufficientTraining("training region shorter than the parameter count")
    dummy_months = tuple(f"r{i}" for i in range(n))
    probs = np.empty(n - start)
    fit = None
    for out_pos, i in enumerate(range(start, n)):
        hi = i - horizon + 1
        try:
            d = DesignMatrix(months=dummy_months[:hi], y=y[:hi], X=X[:hi],
                             columns=tuple(columns))
            fit = fit_probit(d)
        except Exception as exc:
            if fit is None:
                raise InsufficientTraining(
                    f"cannot fit initial bootstrap model: {exc}") from exc
            log.warning("bootstrap refit failed at row %d (%s); reusing previous fit", i, exc)
        probs[out_pos] = predict(fit, X[i:i + 1])[0]
    return probs


def bootstrap_auroc(d: DesignMatrix, horizon: int, block_length: int = 24,
                    replications: int = 200, seed: int = 0) -> np.ndarray:
    """AUROC distribution over block-bootstrap replicates, each evaluated
    by an expanding backtest on its last third."""
    reps = block_bootstrap(d.X, d.y, block_length, replications, seed)
    out = np.full(replications, np.nan)
    for r, (Xr, yr) in enumerate(reps):
        n = len(yr)
        start = int(n * 2 / 3)
        try:
            probs = positional_backtest(Xr, yr, d.columns, horizon)
            out[r] = auroc_from_scores(probs, yr[start:].astype(np.int64))
        except (InsufficientTraining, OneClassOnly) as exc:
            log.warning("bootstrap replicate %d skipped: %s", r, exc)
    return out


def summarize_distribution(values) -> dict:
    """Min/quartiles/median/mean/max over the non-missing values."""
    v = np.asarray(values, dtype=np.float64)
    v = v[~np.isnan(v)]
    if len(v) == 0:
        return {k: float("nan") for k in ("min", "q1", "median", "mean", "q3", "max")}
    return {
        "min": float(v.min()),
        "q1": float(np.quantile(v, 0.25)),
        "median": float(np.median(v)),
        "mean": float(v.mean()),
        "q3": float(np.quantile(v, 0.75)),
        "max": float(v.max()),
    }


def brier_loss(probs, outcomes) -> np.ndarray:
    return (np.asarray(probs, dtype=np.float64) - np.asarray(outcomes, dtype=np.float64)) ** 2


def absolute_loss(probs, outcomes) -> np.ndarray:
    return np.abs(np.asarray(probs, dtype=np.float64) - np.asarray(outcomes, dtype=np.float64))


def diebold_mariano(loss1, loss2, horizon: int = 1, harvey: bool = False) -> dict:
    """Diebold-Mariano test of equal forecast accuracy.

    Long-run variance of the loss differential uses a Bartlett kernel
    with h-1 lags; the p-value is two-sided standard normal. The Harvey
    small-sample correction is off by default.
    """
    loss1 = np.asarray(loss1, dtype=np.float64)
    loss2 = np.asarray(loss2, dtype=np.float64)
    if len(loss1) != len(loss2):
        raise LengthMismatch("loss series lengths differ")
    d = loss1 - loss2
    n = len(d)
    if n < 10:
        raise ValueError(f"need at least 10 observations, have {n}")
    if np.var(d) < 1e-15:
        raise ZeroLossDifferential("loss differential has (near-)zero variance")
    dbar = d.mean()
    dc = d - dbar
    lrv = float(dc @ dc) / n
    for j in range(1, horizon):
        w = 1.0 - j / horizon
        lrv += 2.0 * w * float(dc[j:] @ dc[:-j]) / n
    lrv = max(lrv, 1e-300)
    stat = dbar / np.sqrt(lrv / n)
    if harvey:
        stat *= np.sqrt((n + 1 - 2 * horizon + horizon * (horizon - 1) / n) / n)
    p_value = 2.0 * float(stats.norm.sf(abs(stat)))
    return {"stat": float(stat), "p_value": p_value}

"""Raw and relative sentiment index construction plus regime diagnostics."""

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InsufficientRegimeData, SpanMismatch, WindowTooLarge

log = logging.getLogger(__name__)

_SD_FLOOR = 1e-12


@dataclass(frozen=True)
class SentimentIndex:
    months: tuple[str, ...]
    score: np.ndarray   # monthly lexicon totals
    sigma: np.ndarray   # monthly coherence, NaN where the month is empty
    sent: np.ndarray    # sigma * score
    zsent: np.ndarray   # rolling z-score, NaN during warm-up / gaps


@dataclass(frozen=True)
class RecessionSeries:
    months: tuple[str, ...]
    rec: np.ndarray  # 0/1 ints

    def __post_init__(self):
        if not np.isin(self.rec, (0, 1)).all():
            raise ValueError("recession values must be 0 or 1")


def build_raw_index(scores, coherences) -> SentimentIndex:
    """Combine monthly lexicon scores with coherence values.

    `scores` is a sequence of PeriodScore; `coherences` maps month key
    to sigma (NaN for months with no documents). Month spans must match.
    zsent is left all-NaN here; apply rolling_zscore separately.
    """
    months = tuple(s.period for s in scores)
    if set(months) != set(coherences):
        raise SpanMismatch("score months and coherence months differ")
    score = np.array([s.score for s in scores], dtype=np.float64)
    sigma = np.array([coherences[m] for m in months], dtype=np.float64)
    sent = sigma * score
    return SentimentIndex(months=months, score=score, sigma=sigma, sent=sent,
                          zsent=np.full(len(months), np.nan))


def rolling_zscore(series, window: int = 24) -> np.ndarray:
    """Rolling z-score over an inclusive [t-window, t] window.

    Each defined value needs window+1 present observations; earlier
    entries (and windows containing a gap) are NaN. A window standard
    deviation below the floor yields 0 with a logged warning.
    """
    x = np.asarray(series, dtype=np.float64)
    n = len(x)
    if window < 2:
        raise ValueError(f"window must be >= 2, got {window}")
    if window + 1 > n:
        raise WindowTooLarge(f"window {window} needs {window + 1} observations, have {n}")
    out = np.full(n, np.nan)
    for t in range(window, n):
        win = x[t - window:t + 1]
        if np.isnan(win).any():
            continue
        sd = win.std(ddof=1)
        if sd < _SD_FLOOR:
            log.warning("rolling_zscore: near-zero dispersion at index %d; z set to 0", t)
            out[t] = 0.0
        else:
            out[t] = (x[t] - win.mean()) / sd
    return out


def with_zscore(index: SentimentIndex, window: int = 24) -> SentimentIndex:
    return SentimentIndex(months=index.months, score=index.score,
                          sigma=index.sigma, sent=index.sent,
                          zsent=rolling_zscore(index.sent, window))


def regime_diagnostics(index: SentimentIndex, rec: RecessionSeries) -> dict:
    """Welch t-test and two-sample KS test of the sentiment metric in
    recession vs non-recession months."""
    rec_by_month = dict(zip(rec.months, rec.rec))
    in_rec, out_rec = [], []
    for month, value in zip(index.months, index.sent):
        flag = rec_by_month.get(month)
        if flag is None or math.isnan(value):
            continue
        (in_rec if flag else out_rec).append(value)
    if len(in_rec) < 2 or len(out_rec) < 2:
        raise InsufficientRegimeData(
            f"need >= 2 observations per regime, have {len(in_rec)}/{len(out_rec)}")
    t_stat, t_pvalue = stats.ttest_ind(in_rec, out_rec, equal_var=False)
    ks = stats.ks_2samp(in_rec, out_rec, method="asymp")
    return {
        "mean_rec": float(np.mean(in_rec)),
        "mean_nonrec": float(np.mean(out_rec)),
        "t_stat": float(t_stat),
        "t_pvalue": float(t_pvalue),
        "ks_stat": float(ks.statistic),
        "ks_pvalue": float(min(ks.pvalue, 1.0)),
    }


def load_recessions(path) -> RecessionSeries:
    """CSV `month,rec` with rec in {0,1}."""
    months, values = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            months.append(row["month"])
            values.append(int(row["rec"]))
    return RecessionSeries(months=tuple(months), rec=np.array(values, dtype=np.int64))


def dump_index(index: SentimentIndex, path) -> None:
    """CSV `month,score,sigma,sent,zsent`; missing values are empty cells."""
    def cell(v):
        return "" if math.isnan(v) else repr(float(v))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month", "score", "sigma", "sent", "zsent"])
        for i, month in enumerate(index.months):
            writer.writerow([month, cell(index.score[i]), cell(index.sigma[i]),
                             cell(index.sent[i]), cell(index.zsent[i])])


def load_index(path) -> SentimentIndex:
    months, cols = [], {"score": [], "sigma": [], "sent": [], "zsent": []}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            months.append(row["month"])
            for name in cols:
                cols[name].append(float(row[name]) if row[name] != "" else math.nan)
    return SentimentIndex(months=tuple(months),
                          **{k: np.array(v, dtype=np.float64) for k, v in cols.items()})

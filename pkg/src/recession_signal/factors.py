"""FRED-MD-style macro panel: transforms, interpolation, and principal-
component common factors."""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import AllMissing, NonPositiveForLog, RankDeficient, UnbalancedPanel

_EIG_TOL = 1e-12


@dataclass(frozen=True)
class RawPanel:
    months: tuple[str, ...]
    names: tuple[str, ...]
    data: np.ndarray    # T x N, NaN for missing
    tcodes: tuple[int, ...]


@dataclass(frozen=True)
class FactorSet:
    months: tuple[str, ...]
    factors: np.ndarray             # T x k
    loadings: np.ndarray            # N x k, orthonormal columns
    explained_variance: np.ndarray  # k shares, non-increasing


def apply_tcode(series, code: int):
    """McCracken-Ng transform codes 1-7.

    1 level, 2 first difference, 3 second difference, 4 log, 5 dlog,
    6 d2log, 7 first difference of the simple growth rate. Differencing
    turns leading entries into NaN.
    """
    x = np.asarray(series, dtype=np.float64).copy()
    if code not in range(1, 8):
        raise ValueError(f"invalid transform code {code}")
    if code in (4, 5, 6):
        if np.any(x[~np.isnan(x)] <= 0):
            raise NonPositiveForLog("log transform requires strictly positive levels")
        x = np.log(x)
    if code in (2, 5):
        x = _diff(x, 1)
    elif code in (3, 6):
        x = _diff(x, 2)
    elif code == 7:
        ratio = np.full_like(x, np.nan)
        ratio[1:] = x[1:] / x[:-1] - 1.0
        x = _diff(ratio, 1)
    return x


def _diff(x, order):
    out = x
    for _ in range(order):
        nxt = np.full_like(out, np.nan)
        nxt[1:] = out[1:] - out[:-1]
        out = nxt
    return out


def interpolate_missing(column):
    """Fill interior gaps linearly; leading/trailing gaps stay missing."""
    x = np.asarray(column, dtype=np.float64).copy()
    present = np.flatnonzero(~np.isnan(x))
    if len(present) < 2:
        raise AllMissing(f"need >= 2 present values, have {len(present)}")
    lo, hi = present[0], present[-1]
    idx = np.arange(lo, hi + 1)
    x[lo:hi + 1] = np.interp(idx, present, x[present])
    return x


def _balanced_block(data):
    """Longest contiguous run of rows with no missing values."""
    complete = ~np.isnan(data).any(axis=1)
    best = (0, 0)  # (length, start)
    start = None
    for i, ok in enumerate(list(complete) + [False]):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if i - start > best[0]:
                best = (i - start, start)
            start = None
    if best[0] == 0:
        raise UnbalancedPanel("no contiguous balanced block after transforms")
    return best[1], best[1] + best[0]


def extract_factors(panel: RawPanel, k: int = 15) -> FactorSet:
    """Principal-component common factors of the standardized panel.

    Transforms each series by its tcode, interpolates interior gaps,
    restricts to the maximal contiguous balanced block, standardizes,
    and eigendecomposes the correlation matrix. Loadings carry a
    deterministic sign (largest-magnitude entry positive).
    """
    T, N = panel.data.shape
    cols = np.column_stack([
        interpolate_missing(apply_tcode(panel.data[:, j], panel.tcodes[j]))
        for j in range(N)
    ])
    lo, hi = _balanced_block(cols)
    block = cols[lo:hi]
    months = panel.months[lo:hi]

    mean = block.mean(axis=0)
    sd = block.std(axis=0, ddof=1)
    if np.any(sd < _EIG_TOL):
        raise RankDeficient("constant series in balanced block")
    z = (block - mean) / sd

    corr = (z.T @ z) / (len(z) - 1)
    evals, evecs = np.linalg.eigh(corr)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    if np.sum(evals > _EIG_TOL) < k:
        raise RankDeficient(f"only {int(np.sum(evals > _EIG_TOL))} positive eigenvalues, need {k}")

    loadings = evecs[:, :k].copy()
    for j in range(k):
        col = loadings[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            loadings[:, j] = -col
    factors = z @ loadings
    return FactorSet(months=tuple(months), factors=factors, loadings=loadings,
                     explained_variance=evals[:k] / N)


def load_panel(path) -> RawPanel:
    """FRED-MD CSV convention: header of series names, a `transform:` row
    of tcodes, then `month,value,...` rows (empty cell = missing)."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 3:
        raise ValueError("panel file needs header, transform row, and data rows")
    names = tuple(rows[0][1:])
    if not rows[1][0].strip().lower().startswith("transform"):
        raise ValueError("second row must carry the transform codes")
    tcodes = tuple(int(float(c)) for c in rows[1][1:])
    months, data = [], []
    for row in rows[2:]:
        if not row or not row[0].strip():
            continue
        months.append(row[0].strip())
        data.append([float(c) if c.strip() != "" else np.nan for c in row[1:]])
    return RawPanel(months=tuple(months), names=names,
                    data=np.array(data, dtype=np.float64), tcodes=tcodes)


def dump_factors(fs: FactorSet, path) -> None:
    """CSV `month,f1..fk`."""
    k = fs.factors.shape[1]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month"] + [f"f{i + 1}" for i in range(k)])
        for i, month in enumerate(fs.months):
            writer.writerow([month] + [repr(float(v)) for v in fs.factors[i]])

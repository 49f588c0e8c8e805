"""Lagged probit recession models: design construction, Newton-Raphson
maximum likelihood, prediction, information criteria, and nested tests."""

import csv
import enum
import logging
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .errors import (EmptyAfterLag, NoOverlap, Noninvertible, NotNested,
                     OneClassOnly, SampleMismatch, SchemaMismatch)
from .months import add_months

log = logging.getLogger(__name__)

_GRAD_TOL = 1e-8
_MAX_ITER = 100


class ModelKind(str, enum.Enum):
    FACTORS_ONLY = "factors_only"
    FACTORS_SURVEY = "factors_survey"
    PROPOSED = "proposed"


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    horizon: int
    k_factors: int

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")


@dataclass(frozen=True)
class SurveySeries:
    months: tuple[str, ...]
    mics: np.ndarray
    pmi: np.ndarray


@dataclass(frozen=True)
class DesignMatrix:
    months: tuple[str, ...]   # target months t
    y: np.ndarray             # rec_t
    X: np.ndarray             # regressors dated t - h
    columns: tuple[str, ...]

    def subset_columns(self, columns) -> "DesignMatrix":
        idx = [self.columns.index(c) for c in columns]
        return DesignMatrix(months=self.months, y=self.y,
                            X=self.X[:, idx], columns=tuple(columns))


@dataclass(frozen=True)
class ProbitFit:
    coefficients: dict[str, float]
    standard_errors: dict[str, float]
    log_likelihood: float
    n_obs: int
    converged: bool
    iterations: int
    vcov: np.ndarray
    months: tuple[str, ...] = ()

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(self.coefficients)

    @property
    def beta(self) -> np.ndarray:
        return np.array(list(self.coefficients.values()))


def spec_columns(spec: ModelSpec) -> tuple[str, ...]:
    cols = ["intercept"] + [f"f{i + 1}" for i in range(spec.k_factors)]
    if spec.kind in (ModelKind.FACTORS_SURVEY, ModelKind.PROPOSED):
        cols += ["mics", "pmi"]
    if spec.kind is ModelKind.PROPOSED:
        cols += ["zsent", "zsent_x_mics", "zsent_x_pmi"]
    return tuple(cols)


def _standardize(values):
    x = np.asarray(values, dtype=np.float64)
    present = x[~np.isnan(x)]
    sd = present.std(ddof=1)
    if len(present) < 2 or sd == 0:
        raise ValueError("cannot standardize a constant/empty series")
    return (x - present.mean()) / sd


def build_design(factors, surveys, index, rec, spec: ModelSpec,
                 restrict_months=None) -> DesignMatrix:
    """Assemble the h-lagged design matrix for one model spec.

    Regressor values dated t-h predict rec_t. Survey series are
    standardized over the overlapping span before the interaction
    columns are formed; rows with any missing predictor are dropped.
    restrict_months optionally limits the target months (used to align
    nested models on identical rows).
    """
    k = spec.k_factors
    if factors.factors.shape[1] < k:
        raise ValueError(f"factor set has {factors.factors.shape[1]} factors, need {k}")
    predictors = {m: {} for m in factors.months}
    for i, m in enumerate(factors.months):
        for j in range(k):
            predictors[m][f"f{j + 1}"] = float(factors.factors[i, j])

    need_survey = spec.kind in (ModelKind.FACTORS_SURVEY, ModelKind.PROPOSED)
    if need_survey:
        common = set(factors.months) & set(surveys.months)
        if not common:
            raise NoOverlap("factor and survey months do not overlap")
        keep = [i for i, m in enumerate(surveys.months) if m in common]
        mics = _standardize(surveys.mics[keep])
        pmi = _standardize(surveys.pmi[keep])
        for pos, i in enumerate(keep):
            m = surveys.months[i]
            if m in predictors:
                predictors[m]["mics"] = float(mics[pos])
                predictors[m]["pmi"] = float(pmi[pos])

    if spec.kind is ModelKind.PROPOSED:
        z_by_month = dict(zip(index.months, index.zsent))
        for m, row in predictors.items():
            z = z_by_month.get(m, np.nan)
            if not np.isnan(z) and "mics" in row:
                row["zsent"] = float(z)
                row["zsent_x_mics"] = float(z * row["mics"])
                row["zsent_x_pmi"] = float(z * row["pmi"])

    columns = spec_columns(spec)
    var_names = columns[1:]
    rec_by_month = dict(zip(rec.months, rec.rec))
    if not set(rec.months) & set(predictors):
        raise NoOverlap("recession months and predictor months do not overlap")

    months_out, y_out, rows = [], [], []
    targets = rec.months if restrict_months is None else restrict_months
    for t in targets:
        if t not in rec_by_month:
            continue
        s = add_months(t, -spec.horizon)
        row = predictors.get(s)
        if row is None or any(v not in row for v in var_names):
            continue
        months_out.append(t)
        y_out.append(rec_by_month[t])
        rows.append([1.0] + [row[v] for v in var_names])
    if not rows:
        raise EmptyAfterLag(f"no complete rows at horizon {spec.horizon}")
    return DesignMatrix(months=tuple(months_out),
                        y=np.array(y_out, dtype=np.float64),
                        X=np.array(rows, dtype=np.float64),
                        columns=columns)


def _loglik(y, eta):
    # y*log(Phi(eta)) + (1-y)*log(Phi(-eta)) in stable log-CDF form
    return float(np.sum(np.where(y == 1,
                                 stats.norm.logcdf(eta),
                                 stats.norm.logcdf(-eta))))


def _score_weights(y, eta):
    """Generalized residual lambda_i and the observed-information weight
    lambda_i * (lambda_i + eta_i)."""
    logpdf = stats.norm.logpdf(eta)
    lam = np.where(y == 1,
                   np.exp(logpdf - stats.norm.logcdf(eta)),
                   -np.exp(logpdf - stats.norm.logcdf(-eta)))
    w = lam * (lam + eta)
    return lam, w


def probit_loglik(d: DesignMatrix, beta) -> float:
    return _loglik(d.y, d.X @ np.asarray(beta, dtype=np.float64))


def probit_gradient(d: DesignMatrix, beta) -> np.ndarray:
    lam, _ = _score_weights(d.y, d.X @ np.asarray(beta, dtype=np.float64))
    return d.X.T @ lam


def fit_probit(d: DesignMatrix) -> ProbitFit:
    """Maximize the probit likelihood by Newton-Raphson with step-halving.

    Standard errors come from the inverse observed information at the
    solution. Non-convergence (quasi-separation) is reported through
    converged=False on the best iterate, not raised.
    """
    n, p = d.X.shape
    if n < p + 1:
        raise ValueError(f"need at least {p + 1} rows for {p} coefficients, have {n}")
    classes = np.unique(d.y)
    if len(classes) < 2:
        raise OneClassOnly(f"outcome takes only value {classes[0]!r}")

    beta = np.zeros(p)
    ll = _loglik(d.y, d.X @ beta)
    converged = False
    n_steps = 0
    while n_steps < _MAX_ITER:
        eta = d.X @ beta
        lam, w = _score_weights(d.y, eta)
        grad = d.X.T @ lam
        if np.max(np.abs(grad)) < _GRAD_TOL:
            converged = True
            break
        H = (d.X * w[:, None]).T @ d.X  # negative Hessian
        try:
            step = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            raise Noninvertible("information matrix is singular (collinear columns)") from None
        if not np.all(np.isfinite(step)):
            raise Noninvertible("information matrix is numerically singular")
        scale = 1.0
        improved = False
        for _ in range(50):
            cand = beta + scale * step
            cand_ll = _loglik(d.y, d.X @ cand)
            if cand_ll > ll:
                improved = True
                break
            scale *= 0.5
        if not improved:
            # line search stalled: the log-likelihood cannot be improved at
            # machine precision, so a near-zero gradient means we are at the
            # optimum even if it misses the strict tolerance by rounding
            if np.max(np.abs(grad)) < 1e-6:
                converged = True
            break
        beta, ll = cand, cand_ll
        n_steps += 1

    eta = d.X @ beta
    lam, w = _score_weights(d.y, eta)
    grad = d.X.T @ lam
    if not converged and np.max(np.abs(grad)) < _GRAD_TOL:
        converged = True
    if not converged:
        log.warning("probit fit did not converge after %d iterations "
                    "(max |grad| = %.3g); possible quasi-separation",
                    n_steps, float(np.max(np.abs(grad))))
    H = (d.X * w[:, None]).T @ d.X
    try:
        vcov = np.linalg.inv(H)
    except np.linalg.LinAlgError:
        raise Noninvertible("information matrix is singular at the solution") from None
    se = np.sqrt(np.clip(np.diag(vcov), 0.0, None))
    return ProbitFit(
        coefficients=dict(zip(d.columns, beta.tolist())),
        standard_errors=dict(zip(d.columns, se.tolist())),
        log_likelihood=ll,
        n_obs=n,
        converged=converged,
        iterations=n_steps,
        vcov=vcov,
        months=d.months,
    )


def predict(fit: ProbitFit, X, columns=None) -> np.ndarray:
    """Recession probabilities Phi(x @ beta) for design rows."""
    if columns is not None and tuple(columns) != fit.columns:
        raise SchemaMismatch(f"columns {tuple(columns)} != fit columns {fit.columns}")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != len(fit.columns):
        raise SchemaMismatch(f"{X.shape[1]} columns vs {len(fit.columns)} coefficients")
    return special.ndtr(X @ fit.beta)


def aic(fit: ProbitFit) -> float:
    p = len(fit.coefficients)
    return 2.0 * p - 2.0 * fit.log_likelihood


def bic(fit: ProbitFit) -> float:
    p = len(fit.coefficients)
    return p * np.log(fit.n_obs) - 2.0 * fit.log_likelihood


def nested_lr_test(restricted: ProbitFit, full: ProbitFit) -> dict:
    """Likelihood-ratio chi-square test of nested probit fits."""
    if not set(restricted.columns) <= set(full.columns):
        raise NotNested("restricted columns are not a subset of the full model's")
    if restricted.n_obs != full.n_obs or (
            restricted.months and full.months and restricted.months != full.months):
        raise SampleMismatch("fits use different observation rows")
    df = len(full.columns) - len(restricted.columns)
    stat = max(2.0 * (full.log_likelihood - restricted.log_likelihood), 0.0)
    p_value = 1.0 if df == 0 else float(stats.chi2.sf(stat, df))
    return {"stat": stat, "df": df, "p_value": p_value}


def interaction_gammas(fit: ProbitFit) -> dict | None:
    """Recover the product-form interaction parameters from the linear
    reparameterization delta1*z + delta2*(z*mics) + delta3*(z*pmi)."""
    cols = fit.coefficients
    if not {"zsent", "zsent_x_mics", "zsent_x_pmi"} <= set(cols):
        return None
    d1, d2, d3 = cols["zsent"], cols["zsent_x_mics"], cols["zsent_x_pmi"]
    if abs(d1) <= 1e-8:
        return None
    return {"gamma1": d1, "gamma2": d2 / d1, "gamma3": d3 / d1}


def load_surveys(path) -> SurveySeries:
    """CSV `month,mics,pmi`."""
    months, mics, pmi = [], [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            months.append(row["month"])
            mics.append(float(row["mics"]) if row["mics"] != "" else np.nan)
            pmi.append(float(row["pmi"]) if row["pmi"] != "" else np.nan)
    return SurveySeries(months=tuple(months),
                        mics=np.array(mics, dtype=np.float64),
                        pmi=np.array(pmi, dtype=np.float64))

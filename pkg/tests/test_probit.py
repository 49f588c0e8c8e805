import math

import numpy as np
import pytest
from scipy.special import ndtr, ndtri
from scipy.stats import norm

from recession_signal import probit as pb
from recession_signal.errors import (EmptyAfterLag, NotNested, OneClassOnly,
                                     SampleMismatch, SchemaMismatch)
from recession_signal.factors import FactorSet
from recession_signal.indicator import RecessionSeries, SentimentIndex
from recession_signal.months import month_range


def make_design(X, y, columns=None):
    n, p = X.shape
    return pb.DesignMatrix(months=tuple(month_range("1965-01", "2070-12")[:n]),
                           y=np.asarray(y, dtype=np.float64),
                           X=np.asarray(X, dtype=np.float64),
                           columns=tuple(columns or ["intercept"] + [f"x{i}" for i in range(p - 1)]))


def make_inputs(n_months=60, k=2, seed=0):
    rng = np.random.default_rng(seed)
    months = tuple(month_range("1990-01", "2020-12")[:n_months])
    factors = FactorSet(months=months,
                        factors=rng.normal(size=(n_months, k)),
                        loadings=np.eye(k),
                        explained_variance=np.array([0.5, 0.3][:k]))
    surveys = pb.SurveySeries(months=months,
                              mics=rng.normal(size=n_months) * 10 + 80,
                              pmi=rng.normal(size=n_months) * 5 + 50)
    zsent = rng.normal(size=n_months)
    zsent[:10] = np.nan  # warm-up
    index = SentimentIndex(months=months, score=np.zeros(n_months),
                           sigma=np.ones(n_months), sent=np.zeros(n_months),
                           zsent=zsent)
    rec = RecessionSeries(months=months,
                          rec=(rng.random(n_months) < 0.3).astype(np.int64))
    return factors, surveys, index, rec


def spec(kind, h=1, k=2):
    return pb.ModelSpec(kind=pb.ModelKind(kind), horizon=h, k_factors=k)


# --- build_design ---

def test_row_count_lag_arithmetic():
    factors, surveys, index, rec = make_inputs()
    d1 = pb.build_design(factors, surveys, index, rec, spec("factors_only", h=1))
    d12 = pb.build_design(factors, surveys, index, rec, spec("factors_only", h=12))
    assert len(d1.months) - len(d12.months) == 11


def test_factors_only_column_contract():
    factors, surveys, index, rec = make_inputs()
    d = pb.build_design(factors, surveys, index, rec, spec("factors_only"))
    assert d.columns == ("intercept", "f1", "f2")
    assert d.X.shape[1] == 3


def test_proposed_column_contract():
    factors, surveys, index, rec = make_inputs()
    d = pb.build_design(factors, surveys, index, rec, spec("proposed"))
    assert d.columns == ("intercept", "f1", "f2", "mics", "pmi",
                         "zsent", "zsent_x_mics", "zsent_x_pmi")


def test_hand_alignment():
    months = tuple(month_range("2000-01", "2000-05"))
    factors = FactorSet(months=months,
                        factors=np.arange(5, dtype=np.float64).reshape(5, 1),
                        loadings=np.eye(1), explained_variance=np.array([1.0]))
    rec = RecessionSeries(months=months, rec=np.array([0, 1, 0, 1, 0]))
    d = pb.build_design(factors, None, None, rec,
                        pb.ModelSpec(kind=pb.ModelKind.FACTORS_ONLY, horizon=2, k_factors=1))
    # targets 2000-03..05 predicted by factor values 0,1,2
    assert d.months == ("2000-03", "2000-04", "2000-05")
    assert d.y.tolist() == [0.0, 1.0, 0.0]
    assert d.X[:, 1].tolist() == [0.0, 1.0, 2.0]


def test_missing_zsent_rows_dropped():
    factors, surveys, index, rec = make_inputs()
    d3 = pb.build_design(factors, surveys, index, rec, spec("proposed", h=1))
    d1 = pb.build_design(factors, surveys, index, rec, spec("factors_only", h=1))
    assert len(d3.months) == len(d1.months) - 10


def test_survey_columns_standardized():
    factors, surveys, index, rec = make_inputs()
    d = pb.build_design(factors, surveys, index, rec, spec("factors_survey"))
    mics = d.X[:, d.columns.index("mics")]
    assert abs(mics.mean()) < 0.5  # standardized over span, rows are a subset
    assert 0.5 < mics.std() < 2.0


def test_empty_after_lag():
    factors, surveys, index, rec = make_inputs(n_months=12)
    with pytest.raises(EmptyAfterLag):
        pb.build_design(factors, surveys, index, rec, spec("factors_only", h=12))


def test_restrict_months():
    factors, surveys, index, rec = make_inputs()
    d = pb.build_design(factors, surveys, index, rec, spec("factors_only"))
    keep = d.months[5:15]
    d2 = pb.build_design(factors, surveys, index, rec, spec("factors_only"),
                         restrict_months=keep)
    assert d2.months == keep


# --- fit_probit ---

def test_intercept_only_closed_form():
    y = np.array([1.0] * 30 + [0.0] * 70)
    d = make_design(np.ones((100, 1)), y, ["intercept"])
    fit = pb.fit_probit(d)
    assert fit.coefficients["intercept"] == pytest.approx(ndtri(0.3), abs=1e-8)
    assert fit.converged


def test_intercept_only_balanced_is_zero():
    y = np.array([1.0, 0.0] * 50)
    d = make_design(np.ones((100, 1)), y, ["intercept"])
    fit = pb.fit_probit(d)
    assert fit.coefficients["intercept"] == pytest.approx(0.0, abs=1e-8)


def test_one_regressor_matches_grid_search():
    rng = np.random.default_rng(3)
    n = 300
    x = rng.normal(size=n)
    y = (rng.random(n) < ndtr(0.8 * x)).astype(float)
    d = make_design(x.reshape(-1, 1), y, ["x0"])
    fit = pb.fit_probit(d)

    def loglik(b):
        eta = b * x
        return np.sum(np.where(y == 1, norm.logcdf(eta), norm.logcdf(-eta)))

    grid = np.arange(-3.0, 3.0, 1e-4)
    best = grid[int(np.argmax([loglik(b) for b in grid]))]
    assert fit.coefficients["x0"] == pytest.approx(best, abs=1e-3)


def test_loglik_never_below_null():
    rng = np.random.default_rng(4)
    X = np.column_stack([np.ones(80), rng.normal(size=80)])
    y = (rng.random(80) < 0.4).astype(float)
    d = make_design(X, y)
    fit = pb.fit_probit(d)
    assert fit.log_likelihood >= pb.probit_loglik(d, np.zeros(2))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(5)
    X = np.column_stack([np.ones(120), rng.normal(size=(120, 2))])
    y = (rng.random(120) < ndtr(X @ np.array([-0.3, 0.8, -0.5]))).astype(float)
    d = make_design(X, y)
    beta = np.array([0.1, 0.4, -0.2])
    grad = pb.probit_gradient(d, beta)
    eps = 1e-5
    for j in range(3):
        e = np.zeros(3)
        e[j] = eps
        fd = (pb.probit_loglik(d, beta + e) - pb.probit_loglik(d, beta - e)) / (2 * eps)
        assert grad[j] == pytest.approx(fd, rel=1e-4)


def test_predict_affine_rescaling_invariance():
    rng = np.random.default_rng(6)
    X = np.column_stack([np.ones(150), rng.normal(size=150)])
    y = (rng.random(150) < ndtr(X @ np.array([-0.2, 1.0]))).astype(float)
    fit1 = pb.fit_probit(make_design(X, y))
    X2 = X.copy()
    X2[:, 1] = 3.0 * X2[:, 1] + 5.0
    fit2 = pb.fit_probit(make_design(X2, y))
    p1 = pb.predict(fit1, X)
    p2 = pb.predict(fit2, X2)
    np.testing.assert_allclose(p1, p2, atol=1e-8)


def test_one_class_only():
    d = make_design(np.ones((20, 1)), np.zeros(20), ["intercept"])
    with pytest.raises(OneClassOnly):
        pb.fit_probit(d)


def test_separation_yields_extreme_slope():
    # perfectly separated data: slope diverges until logcdf saturates,
    # so we either stop unconverged or land on a huge finite coefficient
    x = np.concatenate([-np.ones(15), np.ones(15)])
    y = (x > 0).astype(float)
    d = make_design(np.column_stack([np.ones(30), x]), y)
    fit = pb.fit_probit(d)
    assert (not fit.converged) or fit.coefficients["x0"] > 3.0


def test_vcov_symmetric_psd():
    rng = np.random.default_rng(7)
    X = np.column_stack([np.ones(200), rng.normal(size=(200, 2))])
    y = (rng.random(200) < ndtr(X @ np.array([0.1, 0.5, -0.5]))).astype(float)
    fit = pb.fit_probit(make_design(X, y))
    np.testing.assert_allclose(fit.vcov, fit.vcov.T, atol=1e-12)
    assert np.linalg.eigvalsh(fit.vcov).min() > -1e-12


# --- predict ---

def test_predict_zero_beta_gives_half():
    d = make_design(np.ones((40, 1)), np.array([0.0, 1.0] * 20), ["intercept"])
    fit = pb.fit_probit(d)
    assert pb.predict(fit, [[1.0]])[0] == pytest.approx(0.5, abs=1e-8)


def test_predict_phi_of_one():
    fit = _dummy_fit({"x": 1.0}, n=50)
    assert pb.predict(fit, [[1.0]])[0] == pytest.approx(0.8413447460685429, abs=1e-12)


def test_predict_monotone_to_zero():
    fit = _dummy_fit({"x": 1.0}, n=50)
    xs = np.array([[-1.0], [-5.0], [-20.0]])
    probs = pb.predict(fit, xs)
    assert probs[0] > probs[1] > probs[2] >= 0.0


def test_predict_schema_mismatch():
    fit = _dummy_fit({"a": 1.0, "b": 2.0}, n=50)
    with pytest.raises(SchemaMismatch):
        pb.predict(fit, [[1.0]], columns=("a",))
    with pytest.raises(SchemaMismatch):
        pb.predict(fit, [[1.0, 2.0, 3.0]])


def _dummy_fit(coefs, ll=-10.0, n=100, months=()):
    p = len(coefs)
    return pb.ProbitFit(coefficients=dict(coefs),
                        standard_errors={k: 1.0 for k in coefs},
                        log_likelihood=ll, n_obs=n, converged=True,
                        iterations=5, vcov=np.eye(p), months=months)


# --- information criteria and LR tests ---

def test_aic_bic_degenerate():
    fit = _dummy_fit({}, ll=0.0, n=10)
    assert pb.aic(fit) == 0.0
    assert pb.bic(fit) == 0.0


def test_aic_formula():
    fit = _dummy_fit({"a": 1.0, "b": 1.0}, ll=-7.5, n=20)
    assert pb.aic(fit) == pytest.approx(2 * 2 - 2 * (-7.5))
    assert pb.bic(fit) == pytest.approx(2 * math.log(20) + 15.0)


def test_lr_identical_models():
    fit = _dummy_fit({"a": 1.0}, ll=-5.0)
    out = pb.nested_lr_test(fit, fit)
    assert out["stat"] == 0.0
    assert out["p_value"] == 1.0


def test_lr_not_nested():
    f1 = _dummy_fit({"a": 1.0}, ll=-5.0)
    f2 = _dummy_fit({"b": 1.0, "c": 2.0}, ll=-4.0)
    with pytest.raises(NotNested):
        pb.nested_lr_test(f1, f2)


def test_lr_sample_mismatch():
    f1 = _dummy_fit({"a": 1.0}, ll=-5.0, n=100)
    f2 = _dummy_fit({"a": 1.0, "b": 2.0}, ll=-4.0, n=90)
    with pytest.raises(SampleMismatch):
        pb.nested_lr_test(f1, f2)


def test_lr_null_distribution():
    # one pure-noise extra column: LR stat should look chi-square(1)
    rng = np.random.default_rng(8)
    stats_out = []
    for _ in range(200):
        n = 150
        X = np.column_stack([np.ones(n), rng.normal(size=n)])
        y = (rng.random(n) < 0.4).astype(float)
        d_full = make_design(X, y)
        d_restricted = make_design(X[:, :1], y, ["intercept"])
        full = pb.fit_probit(d_full)
        restricted = pb.fit_probit(d_restricted)
        stats_out.append(pb.nested_lr_test(restricted, full)["stat"])
    stats_out = np.array(stats_out)
    # chi2(1): mean 1, P(stat > 3.84) ~ 5%
    assert 0.6 < stats_out.mean() < 1.5
    assert np.mean(stats_out > 3.841) < 0.12


def test_interaction_gammas():
    fit = _dummy_fit({"zsent": 2.0, "zsent_x_mics": 1.0, "zsent_x_pmi": -4.0})
    out = pb.interaction_gammas(fit)
    assert out == {"gamma1": 2.0, "gamma2": 0.5, "gamma3": -2.0}
    assert pb.interaction_gammas(_dummy_fit({"a": 1.0})) is None


def test_load_surveys(tmp_path):
    path = tmp_path / "surveys.csv"
    path.write_text("month,mics,pmi\n2000-01,90.1,52.3\n2000-02,,51.0\n")
    s = pb.load_surveys(path)
    assert s.months == ("2000-01", "2000-02")
    assert math.isnan(s.mics[1])
    assert s.pmi.tolist() == [52.3, 51.0]

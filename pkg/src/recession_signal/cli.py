"""Command-line entry point orchestrating the pipeline stages."""

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import replace

import numpy as np
from scipy import stats

from . import corpus as corpus_mod
from . import evaluation as ev
from . import factors as factors_mod
from . import geometry, indicator, lda, probit
from .config import ConfigError, PipelineConfig, load_config, validate_inputs
from .errors import PipelineError
from .lexicon import load_lexicon, score_period

log = logging.getLogger("recession_signal")

_KINDS = (probit.ModelKind.FACTORS_ONLY, probit.ModelKind.FACTORS_SURVEY,
          probit.ModelKind.PROPOSED)


def _month_seed(base: int, month_index: int) -> int:
    return (base ^ month_index) & ((1 << 64) - 1)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if header:
            writer.writerow(header)
        writer.writerows(rows)


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))


def cmd_index(cfg: PipelineConfig) -> None:
    validate_inputs(cfg, need=("corpus",))
    out = cfg.output
    os.makedirs(os.path.join(out, "distances"), exist_ok=True)
    os.makedirs(os.path.join(out, "projection"), exist_ok=True)

    stopwords = (corpus_mod.load_stopwords(cfg.stopwords) if cfg.stopwords
                 else corpus_mod.default_stopwords())
    lexicon = load_lexicon(cfg.lexicon_positive, cfg.lexicon_negative)
    corpus = corpus_mod.load_documents(cfg.corpus, cfg.corpus_format, stopwords)
    span = (cfg.span_start, cfg.span_end)
    if not span[0] or not span[1]:
        span = corpus_mod.corpus_span(corpus)
    slices = corpus_mod.bucket_monthly(corpus, span)

    scores, coherences = [], {}
    for mi, slice in enumerate(slices):
        scores.append(score_period(slice, lexicon))
        if not any(doc.tokens for doc in slice.documents):
            coherences[slice.month] = math.nan
            log.info("month %s: no documents, marked missing", slice.month)
            continue
        month_cfg = replace(cfg.lda, seed=_month_seed(cfg.lda.seed, mi))
        try:
            model = lda.fit_lda(slice, month_cfg)
        except PipelineError as exc:
            raise type(exc)(f"month {slice.month}: {exc}") from exc
        dm = geometry.distance_matrix(model)
        coherences[slice.month] = geometry.coherence(dm)
        _write_csv(os.path.join(out, "distances", f"{slice.month}.csv"), None,
                   [[_fmt(v) for v in row] for row in dm.entries])
        if dm.size >= 2:
            proj = geometry.project_2d(dm)
            _write_csv(os.path.join(out, "projection", f"{slice.month}.csv"),
                       ["topic", "x", "y"],
                       [[k, _fmt(p[0]), _fmt(p[1])] for k, p in enumerate(proj.points)])
        ll = lda.held_out_log_likelihood(model, slice)
        log.info("month %s: V=%d docs=%d log-likelihood=%.2f sigma=%.4f",
                 slice.month, len(model.vocabulary), len(slice.documents),
                 ll, coherences[slice.month])

    idx = indicator.build_raw_index(scores, coherences)
    idx = indicator.with_zscore(idx, cfg.zscore_window)
    indicator.dump_index(idx, os.path.join(out, "sentiment_index.csv"))
    log.info("wrote %s", os.path.join(out, "sentiment_index.csv"))


def _load_fit_inputs(cfg: PipelineConfig):
    validate_inputs(cfg, need=("panel",))
    index_path = os.path.join(cfg.output, "sentiment_index.csv")
    if not os.path.exists(index_path):
        raise ConfigError(
            f"{index_path} not found: run `recession-signal index` first")
    index = indicator.load_index(index_path)
    panel = factors_mod.load_panel(cfg.panel)
    factor_set = factors_mod.extract_factors(panel, cfg.k_factors)
    surveys = probit.load_surveys(cfg.surveys)
    rec = indicator.load_recessions(cfg.recessions)
    return index, factor_set, surveys, rec


def _aligned_designs(cfg, index, factor_set, surveys, rec, horizon):
    """Designs for the three specs restricted to common target months so
    the nested likelihood-ratio tests compare identical samples."""
    specs = {kind: probit.ModelSpec(kind=kind, horizon=horizon, k_factors=cfg.k_factors)
             for kind in _KINDS}
    designs = {kind: probit.build_design(factor_set, surveys, index, rec, spec)
               for kind, spec in specs.items()}
    common = set.intersection(*(set(d.months) for d in designs.values()))
    designs = {kind: probit.build_design(factor_set, surveys, index, rec, spec,
                                         restrict_months=sorted(common))
               for kind, spec in specs.items()}
    return designs


def _fit_report(fit, lr_tests):
    coef_table = {}
    for name in fit.columns:
        est = fit.coefficients[name]
        se = fit.standard_errors[name]
        z = est / se if se > 0 else math.nan
        p = 2 * float(stats.norm.sf(abs(z))) if not math.isnan(z) else math.nan
        coef_table[name] = {"estimate": est, "std_error": se, "z": z, "p_value": p}
    report = {
        "coefficients": coef_table,
        "log_likelihood": fit.log_likelihood,
        "aic": probit.aic(fit),
        "bic": probit.bic(fit),
        "n_obs": fit.n_obs,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "lr_tests": lr_tests,
    }
    gammas = probit.interaction_gammas(fit)
    if gammas is not None:
        report["interaction_gammas"] = gammas
    return report


def cmd_fit(cfg: PipelineConfig) -> None:
    index, factor_set, surveys, rec = _load_fit_inputs(cfg)
    out = cfg.output
    os.makedirs(out, exist_ok=True)
    for h in cfg.horizons:
        designs = _aligned_designs(cfg, index, factor_set, surveys, rec, h)
        fits = {kind: probit.fit_probit(d) for kind, d in designs.items()}
        lr = {
            "factors_only_vs_factors_survey": probit.nested_lr_test(
                fits[probit.ModelKind.FACTORS_ONLY], fits[probit.ModelKind.FACTORS_SURVEY]),
            "factors_survey_vs_proposed": probit.nested_lr_test(
                fits[probit.ModelKind.FACTORS_SURVEY], fits[probit.ModelKind.PROPOSED]),
            "factors_only_vs_proposed": probit.nested_lr_test(
                fits[probit.ModelKind.FACTORS_ONLY], fits[probit.ModelKind.PROPOSED]),
        }
        for kind, fit in fits.items():
            d = designs[kind]
            with open(os.path.join(out, f"fit_{kind.value}_{h}.json"), "w",
                      encoding="utf-8") as fh:
                json.dump(_fit_report(fit, lr), fh, sort_keys=True, indent=2)
                fh.write("\n")
            probs = probit.predict(fit, d.X)
            _write_csv(os.path.join(out, f"insample_probs_{kind.value}_{h}.csv"),
                       ["month", "prob", "actual"],
                       [[m, _fmt(p), int(y)] for m, p, y in zip(d.months, probs, d.y)])
            log.info("fit %s h=%d: ll=%.3f n=%d converged=%s",
                     kind.value, h, fit.log_likelihood, fit.n_obs, fit.converged)


def cmd_evaluate(cfg: PipelineConfig) -> None:
    index, factor_set, surveys, rec = _load_fit_inputs(cfg)
    out = cfg.output
    for h in cfg.horizons:
        for kind in _KINDS:
            path = os.path.join(out, f"fit_{kind.value}_{h}.json")
            if not os.path.exists(path):
                raise ConfigError(f"{path} not found: run `recession-signal fit` first")

    metrics_rows = []
    boot_rows = []
    dm_rows = []
    for h in cfg.horizons:
        designs = _aligned_designs(cfg, index, factor_set, surveys, rec, h)
        oos_probs = {}
        for kind, d in designs.items():
            probs_path = os.path.join(out, f"insample_probs_{kind.value}_{h}.csv")
            months, probs, actual = _read_probs(probs_path)
            rep = ev.f1_score(ev.classify(probs, cfg.c_star), actual)
            curve = ev.roc_curve(probs, actual)
            _write_csv(os.path.join(out, f"roc_{kind.value}_{h}.csv"),
                       ["threshold", "fpr", "tpr"],
                       [[_fmt(t), _fmt(p[0]), _fmt(p[1])]
                        for t, p in zip(curve.thresholds, curve.points)])
            metrics_rows.append([kind.value, h, "in_sample", _fmt(rep.f1),
                                 _fmt(rep.precision), _fmt(rep.recall),
                                 _fmt(ev.auroc(curve))])

            for scheme in cfg.schemes:
                plan = ev.BacktestPlan(scheme=scheme, n_rows=len(d.months))
                test_idx = plan.test_indices()
                probs_oos = ev.recursive_backtest(d, plan, h)
                y_test = d.y[test_idx].astype(np.int64)
                rep_oos = ev.f1_score(ev.classify(probs_oos, cfg.c_star), y_test)
                try:
                    auc = ev.auroc_from_scores(probs_oos, y_test)
                except PipelineError:
                    auc = math.nan
                metrics_rows.append([kind.value, h, scheme.value, _fmt(rep_oos.f1),
                                     _fmt(rep_oos.precision), _fmt(rep_oos.recall),
                                     _fmt(auc)])
                if scheme is ev.Scheme.LAST_THIRD:
                    oos_probs[kind] = (probs_oos, y_test)

            block = min(cfg.block_length, len(d.months))
            aucs = ev.bootstrap_auroc(d, h, block, cfg.replications, cfg.eval_seed)
            summary = ev.summarize_distribution(aucs)
            boot_rows.append([kind.value, h] + [_fmt(summary[k]) for k in
                                               ("min", "q1", "median", "mean", "q3", "max")])
            log.info("bootstrap %s h=%d: mean AUROC %.4f", kind.value, h, summary["mean"])

        for a, b in ((_KINDS[0], _KINDS[1]), (_KINDS[0], _KINDS[2]), (_KINDS[1], _KINDS[2])):
            if a not in oos_probs or b not in oos_probs:
                continue
            pa, ya = oos_probs[a]
            pb, yb = oos_probs[b]
            try:
                res = ev.diebold_mariano(ev.brier_loss(pa, ya), ev.brier_loss(pb, yb), h)
                dm_rows.append([h, a.value, b.value, _fmt(res["stat"]), _fmt(res["p_value"])])
            except PipelineError as exc:
                log.warning("DM test %s vs %s at h=%d skipped: %s", a.value, b.value, h, exc)
                dm_rows.append([h, a.value, b.value, "", ""])

    _write_csv(os.path.join(out, "metrics.csv"),
               ["model", "horizon", "period", "f1", "precision", "recall", "auroc"],
               metrics_rows)
    _write_csv(os.path.join(out, "bootstrap_auroc.csv"),
               ["model", "horizon", "min", "q1", "median", "mean", "q3", "max"],
               boot_rows)
    _write_csv(os.path.join(out, "dm_tests.csv"),
               ["horizon", "model_a", "model_b", "stat", "p_value"], dm_rows)
    log.info("wrote %s", os.path.join(out, "metrics.csv"))


def _read_probs(path):
    months, probs, actual = [], [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            months.append(row["month"])
            probs.append(float(row["prob"]))
            actual.append(int(row["actual"]))
    return months, np.array(probs), np.array(actual, dtype=np.int64)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="recession-signal",
        description="News-sentiment recession forecasting pipeline")
    parser.add_argument("command", choices=["index", "fit", "evaluate", "all"])
    parser.add_argument("--config", required=True, help="INI configuration file")
    parser.add_argument("--out", help="override the output directory")
    parser.add_argument("--seed", type=int, help="override LDA and bootstrap seeds")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.out:
            cfg.output = args.out
        if args.seed is not None:
            cfg.lda = replace(cfg.lda, seed=args.seed)
            cfg.eval_seed = args.seed
        os.makedirs(cfg.output, exist_ok=True)
    except (ConfigError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    steps = {"index": [cmd_index], "fit": [cmd_fit], "evaluate": [cmd_evaluate],
             "all": [cmd_index, cmd_fit, cmd_evaluate]}[args.command]
    try:
        for step in steps:
            step(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

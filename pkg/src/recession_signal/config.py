"""Pipeline configuration: INI file with sections, paper defaults baked in."""

import configparser
import os
from dataclasses import dataclass, field

from .errors import PipelineError
from .evaluation import Scheme
from .lda import LdaConfig


class ConfigError(PipelineError):
    pass


@dataclass
class PipelineConfig:
    # paths
    corpus: str = ""
    corpus_format: str = "jsonl"
    lexicon_positive: str = ""
    lexicon_negative: str = ""
    stopwords: str = ""          # empty -> packaged default list
    panel: str = ""
    surveys: str = ""
    recessions: str = ""
    output: str = "out"
    # stages
    span_start: str = ""         # empty -> corpus span
    span_end: str = ""
    lda: LdaConfig = field(default_factory=LdaConfig)
    zscore_window: int = 24
    k_factors: int = 15
    horizons: tuple[int, ...] = (1, 3, 6, 12)
    c_star: float = 0.5
    block_length: int = 24
    replications: int = 200
    eval_seed: int = 0
    schemes: tuple[Scheme, ...] = (Scheme.LAST_THIRD,)


def _get(parser, section, key, fallback=None):
    if parser.has_option(section, key):
        value = parser.get(section, key).strip()
        if value != "":
            return value
    return fallback


def load_config(path) -> PipelineConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    parser.read(path, encoding="utf-8")
    cfg = PipelineConfig()

    for key in ("corpus", "corpus_format", "lexicon_positive", "lexicon_negative",
                "stopwords", "panel", "surveys", "recessions", "output"):
        value = _get(parser, "paths", key)
        if value is not None:
            setattr(cfg, key, value)

    cfg.span_start = _get(parser, "corpus", "span_start", cfg.span_start)
    cfg.span_end = _get(parser, "corpus", "span_end", cfg.span_end)

    alpha = _get(parser, "lda", "alpha")
    cfg.lda = LdaConfig(
        K=int(_get(parser, "lda", "k", "30")),
        alpha=float(alpha) if alpha is not None else None,
        beta=float(_get(parser, "lda", "beta", "0.1")),
        iterations=int(_get(parser, "lda", "iterations", "1000")),
        burn_in=int(_get(parser, "lda", "burn_in", "500")),
        thin=int(_get(parser, "lda", "thin", "10")),
        seed=int(_get(parser, "lda", "seed", "0")),
    )
    cfg.zscore_window = int(_get(parser, "indicator", "zscore_window", cfg.zscore_window))
    cfg.k_factors = int(_get(parser, "factors", "k", cfg.k_factors))

    horizons = _get(parser, "models", "horizons")
    if horizons is not None:
        cfg.horizons = tuple(int(h) for h in horizons.split(","))
    if not cfg.horizons:
        raise ConfigError("horizons must be non-empty")

    cfg.c_star = float(_get(parser, "evaluation", "c_star", cfg.c_star))
    cfg.block_length = int(_get(parser, "evaluation", "block_length", cfg.block_length))
    cfg.replications = int(_get(parser, "evaluation", "replications", cfg.replications))
    cfg.eval_seed = int(_get(parser, "evaluation", "seed", cfg.eval_seed))
    schemes = _get(parser, "evaluation", "schemes")
    if schemes is not None:
        try:
            cfg.schemes = tuple(Scheme(s.strip()) for s in schemes.split(","))
        except ValueError as exc:
            raise ConfigError(f"unknown backtest scheme: {exc}") from None
    return cfg


def validate_inputs(cfg: PipelineConfig, need=("corpus",)) -> None:
    """Check that every referenced input file exists."""
    wanted = []
    if "corpus" in need:
        wanted += [("corpus file", cfg.corpus), ("positive lexicon", cfg.lexicon_positive),
                   ("negative lexicon", cfg.lexicon_negative)]
        if cfg.stopwords:
            wanted.append(("stopword file", cfg.stopwords))
    if "panel" in need:
        wanted += [("panel file", cfg.panel), ("survey file", cfg.surveys),
                   ("recession file", cfg.recessions)]
    for label, path in wanted:
        if not path:
            raise ConfigError(f"{label} not configured")
        if not os.path.exists(path):
            raise ConfigError(f"{label} does not exist: {path}")

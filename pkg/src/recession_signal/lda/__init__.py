"""LDA subpackage; picks the compiled Gibbs kernel when available."""

try:
    from . import _gibbs as backend
    BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on build environment
    from . import _gibbs_py as backend
    BACKEND = "python"

from .model import (  # noqa: E402
    LdaConfig,
    TopicModel,
    fit_lda,
    held_out_log_likelihood,
    dump_model,
    load_model,
)

__all__ = [
    "BACKEND",
    "backend",
    "LdaConfig",
    "TopicModel",
    "fit_lda",
    "held_out_log_likelihood",
    "dump_model",
    "load_model",
]

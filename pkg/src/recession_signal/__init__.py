"""News-sentiment leading indicator and recession forecasting pipeline."""

from .lda import BACKEND as LDA_BACKEND

__version__ = "0.1.0"
__all__ = ["LDA_BACKEND", "__version__"]

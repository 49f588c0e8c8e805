"""Opinion-lexicon scoring of documents and monthly totals."""

from dataclasses import dataclass

from .corpus import MonthlySlice


@dataclass(frozen=True)
class Lexicon:
    positive: frozenset[str]
    negative: frozenset[str]

    def __post_init__(self):
        overlap = self.positive & self.negative
        if overlap:
            raise ValueError(f"lexicon sets overlap: {sorted(overlap)[:5]}")


@dataclass(frozen=True)
class PeriodScore:
    period: str
    score: float


def _read_word_file(path) -> frozenset[str]:
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith(";"):
                continue
            words.add(line.lower())
    return frozenset(words)


def load_lexicon(positive_path, negative_path) -> Lexicon:
    """Two word-per-line files; lines starting with ';' are comments."""
    return Lexicon(positive=_read_word_file(positive_path),
                   negative=_read_word_file(negative_path))


def score_document(tokens, lexicon: Lexicon) -> float:
    """Net positive-minus-negative count over total token count; 0 if empty."""
    if not tokens:
        return 0.0
    net = 0
    for tok in tokens:
        if tok in lexicon.positive:
            net += 1
        elif tok in lexicon.negative:
            net -= 1
    return net / len(tokens)


def score_period(slice: MonthlySlice, lexicon: Lexicon) -> PeriodScore:
    """Sum of per-document scores over the month (a sum, not a mean, so
    that months with more stories weigh more)."""
    total = sum(score_document(doc.tokens, lexicon) for doc in slice.documents)
    return PeriodScore(period=slice.month, score=total)

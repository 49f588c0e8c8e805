"""Year-month keys ("YYYY-MM") and calendar arithmetic on them."""

import datetime
import re

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def month_key(date: datetime.date) -> str:
    return f"{date.year:04d}-{date.month:02d}"


def parse_month(key: str) -> tuple[int, int]:
    m = _MONTH_RE.match(key)
    if not m:
        raise ValueError(f"not a YYYY-MM month key: {key!r}")
    year, month = int(m.group(1)), int(m.group(2))
    if not 1 <= month <= 12:
        raise ValueError(f"month out of range in key: {key!r}")
    return year, month


def month_ordinal(key: str) -> int:
    """Months since 0000-01; supports subtraction between keys."""
    year, month = parse_month(key)
    return year * 12 + (month - 1)


def ordinal_to_key(ordinal: int) -> str:
    year, month = divmod(ordinal, 12)
    return f"{year:04d}-{month + 1:02d}"


def add_months(key: str, n: int) -> str:
    return ordinal_to_key(month_ordinal(key) + n)


def month_range(start: str, end: str) -> list[str]:
    """Inclusive list of month keys from start to end."""
    lo, hi = month_ordinal(start), month_ordinal(end)
    if hi < lo:
        raise ValueError(f"empty month range {start}..{end}")
    return [ordinal_to_key(o) for o in range(lo, hi + 1)]

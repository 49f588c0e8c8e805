import datetime

import pytest

from recession_signal.corpus import Document, MonthlySlice


def make_doc(doc_id, date_str, tokens):
    return Document(id=doc_id, date=datetime.date.fromisoformat(date_str),
                    tokens=tuple(tokens))


def make_slice(month, token_lists, date_str=None):
    date_str = date_str or f"{month}-15"
    docs = tuple(make_doc(f"d{i}", date_str, toks) for i, toks in enumerate(token_lists))
    return MonthlySlice(month=month, documents=docs)


@pytest.fixture
def tiny_slice():
    return make_slice("2004-08", [["apple", "banana", "apple"],
                                  ["banana", "cherry"],
                                  ["apple", "cherry", "cherry", "cherry"]])

import doctest

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from lbeta.errors import InvalidDigits
import lbeta.words
from lbeta.words import (
    CodeSeq,
    Verdict,
    compare_sequences,
    compare_words,
    is_shift_maximal,
    shift_verdict,
)

pytestmark = pytest.mark.unit


def test_docstrings():
    results = doctest.testmod(lbeta.words)
    assert results.attempted > 0
    assert results.failed == 0


###
# CodeSeq
###


def test_codeseq_defaults():
    seq = CodeSeq((1, 0, 2))
    assert seq.confidence == 3
    assert not seq.periodic
    assert seq.pattern == ()
    assert seq.available() == 3
    assert str(seq) == "102"


def test_codeseq_periodic_reads_past_digits():
    seq = CodeSeq((2, 1, 0, 1, 0), period_start=1, period_length=2)
    assert seq.pattern == (1, 0)
    assert seq.at(10) == 1
    assert seq.take(7) == (2, 1, 0, 1, 0, 1, 0)
    assert seq.available() is None
    assert seq.exact_length == 3
    assert str(seq) == "2(10)"


def test_codeseq_wide_digits_use_commas():
    assert str(CodeSeq((12, 3))) == "12,3"
    assert str(CodeSeq.periodic_word([11], 3)) == "(11)"
    assert str(CodeSeq((10, 4, 4), period_start=1, period_length=1)) == "10,(4)"


def test_codeseq_non_periodic_read_beyond_fails():
    with pytest.raises(IndexError):
        CodeSeq((1, 2)).at(2)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(digits=(1, -1)),
        dict(digits=(1, 2), confidence=3),
        dict(digits=(1, 2), period_length=1),
        dict(digits=(1, 2), period_start=0),
        dict(digits=(1, 2), period_start=1, period_length=2),
        dict(digits=(1, 0, 0), period_start=0, period_length=2),
    ],
)
def test_codeseq_validation(kwargs):
    with pytest.raises(InvalidDigits):
        CodeSeq(**kwargs)


def test_codeseq_shifted():
    seq = CodeSeq((2, 1, 0), period_start=1, period_length=2)
    assert seq.shifted(1).take(4) == (1, 0, 1, 0)
    assert seq.shifted(2).take(4) == (0, 1, 0, 1)
    assert seq.shifted(2).period_start == 0

    plain = CodeSeq((3, 1, 4), confidence=2)
    assert plain.shifted(1).digits == (1, 4)
    assert plain.shifted(1).confidence == 1


def test_codeseq_extended():
    seq = CodeSeq.periodic_word([1, 0], 2)
    assert len(seq.extended(9)) == 9
    assert seq.extended(9).take(9) == seq.take(9)
    plain = CodeSeq((1,))
    assert plain.extended(5) is plain


###
# comparisons
###


@pytest.mark.parametrize(
    "u,v,expected",
    [
        ((1, 0, 1), (1, 1), -1),
        ((2,), (1, 9), 1),
        ((1, 2), (1, 2, 3), 0),
        ((), (4,), 0),
    ],
)
def test_compare_words(u, v, expected):
    assert compare_words(u, v) == expected


def test_compare_sequences_exact_when_both_periodic():
    u = CodeSeq.periodic_word([1, 0], 2)
    v = CodeSeq((1, 0, 1, 0), period_start=2, period_length=2)
    assert compare_sequences(u, v) == (0, True)


def test_compare_sequences_on_common_horizon():
    u = CodeSeq((1, 0, 1))
    v = CodeSeq.periodic_word([1, 0], 2)
    assert compare_sequences(u, v) == (0, False)
    assert compare_sequences(CodeSeq((1, 1)), v) == (1, False)


###
# shift domination
###


def test_shift_verdict_admissible():
    omega = CodeSeq.periodic_word([2], 8)
    assert shift_verdict(CodeSeq((1, 2, 0, 1)), omega) is Verdict.ADMISSIBLE


def test_shift_verdict_inadmissible():
    omega = CodeSeq.periodic_word([1, 0], 8)
    assert shift_verdict(CodeSeq((1, 1, 0)), omega) is Verdict.INADMISSIBLE


def test_shift_verdict_exact_tie_is_inadmissible():
    omega = CodeSeq.periodic_word([1, 0], 8)
    word = CodeSeq((0, 1, 0), period_start=1, period_length=2)
    assert shift_verdict(word, omega) is Verdict.INADMISSIBLE


def test_shift_verdict_unresolved_tie():
    omega = CodeSeq((2, 1, 1, 0, 2))
    assert shift_verdict(CodeSeq((0, 2, 1)), omega) is Verdict.UNDETERMINED


###
# shift maximal words
###


@pytest.mark.parametrize(
    "word,expected",
    [
        ((2, 1, 2), True),
        ((2, 2, 2), True),
        ((1, 0, 1, 1), False),
        ((3, 0, 0), True),
        ((1, 2), False),
        ((1,), True),
    ],
)
def test_is_shift_maximal(word, expected):
    assert is_shift_maximal(word) == expected


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=4), min_size=1, max_size=8))
def test_shift_maximal_matches_definition(word):
    expected = all(
        tuple(word[k:]) <= tuple(word[: len(word) - k]) for k in range(1, len(word))
    )
    assert is_shift_maximal(word) == expected

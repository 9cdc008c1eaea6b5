"""
The β-transformation S_β(t) = βt - ⌊βt⌋ on [0, 1), greedy β-expansions and
Parry's admissibility criterion.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import mpmath
from mpmath import mpf

from lbeta.errors import AlphabetMismatch, OutOfRange, OutOfUnitInterval
from lbeta.logs import log
from lbeta.numerics import NumericContext, Real, as_real
from lbeta.words import CodeSeq, Verdict, shift_verdict


@dataclass(frozen=True)
class BetaContext:
    """A base β > 1 with a prefix of the quasi-greedy expansion O_β(1) of 1"""

    beta: mpf
    floor_beta: int
    o_one: CodeSeq
    o_one_period: Optional[Tuple[int, int]] = None
    """(start, length) when O_β(1) is known to be eventually periodic"""

    nctx: NumericContext = field(default_factory=NumericContext, repr=False, compare=False)

    @property
    def alphabet_max(self) -> int:
        return self.o_one[0]


def _check_beta(beta: Real) -> mpf:
    beta = as_real(beta, "beta")
    if beta <= 1:
        raise OutOfRange(f"beta must be greater than 1, got {beta}")
    return beta


def _check_unit(t: Real) -> mpf:
    t = as_real(t, "t")
    if not 0 <= t < 1:
        raise OutOfUnitInterval(f"t must lie in [0, 1), got {t}")
    return t


def _s_step(beta: mpf, t: mpf, tol: mpf) -> Tuple[mpf, int, bool]:
    bt = beta * t
    j = int(mpmath.nint(bt))
    if 1 <= j < beta and abs(bt - j) <= tol * j:
        return mpf(0), j, True
    digit = int(mpmath.floor(bt))
    return bt - digit, digit, False


def s_beta(beta: Real, t: Real, nctx: Optional[NumericContext] = None) -> Tuple[mpf, int]:
    """
    One step of S_β.

    When βt is within boundary_tol of an integer j >= 1 the digit is j and the
    image is 0, matching the greedy convention `⌊βt⌋` at exact integers.

    Example::

        >>> from lbeta.beta_shift import s_beta
        >>> s_beta(2, 0.75)
        (mpf('0.5'), 1)
    """
    nctx = nctx or NumericContext()
    with nctx.workprec():
        image, digit, _ = _s_step(_check_beta(beta), _check_unit(t), nctx.boundary_tol)
    return image, digit


def greedy_coding(
    beta: Real, t: Real, n: int, nctx: Optional[NumericContext] = None
) -> CodeSeq:
    """First `n` digits of the greedy β-expansion of t"""
    if n < 1:
        raise OutOfRange(f"horizon must be positive, got {n}")
    nctx = nctx or NumericContext()
    with nctx.workprec():
        beta = _check_beta(beta)
        growth = beta + 1

    with nctx.workprec(n, growth):
        beta = _check_beta(beta)
        point = _check_unit(t)
        tol = nctx.boundary_tol
        digits: List[int] = []
        confidence = None
        zero_from = None
        for k in range(n):
            if point == 0:
                zero_from = k
                digits.extend([0] * (n - k))
                break
            point, digit, near = _s_step(beta, point, tol)
            if near and confidence is None:
                confidence = k
            digits.append(digit)

    if zero_from is not None:
        return CodeSeq(
            digits,
            period_start=zero_from,
            period_length=1,
            confidence=n if confidence is None else confidence,
        )
    return CodeSeq(digits, confidence=confidence)


def o_beta_one(beta: Real, n: int, nctx: Optional[NumericContext] = None) -> CodeSeq:
    """
    First `n` digits of the quasi-greedy expansion O_β(1) of 1.

    This is ⌊β⌋ followed by the greedy expansion of β - ⌊β⌋, except that a
    finite expansion `b_0 ... b_ℓ` is replaced by the periodic repetition of
    `b_0 ... b_{ℓ-1} (b_ℓ - 1)`. For integer β it is (β - 1)(β - 1)...

    Example::

        >>> from lbeta.beta_shift import o_beta_one
        >>> str(o_beta_one(3, 4)), str(o_beta_one("2.25", 3))
        ('(2)', '201')
    """
    if n < 1:
        raise OutOfRange(f"horizon must be positive, got {n}")
    nctx = nctx or NumericContext()
    with nctx.workprec():
        growth = _check_beta(beta) + 1

    with nctx.workprec(n, growth):
        beta = _check_beta(beta)
        tol = nctx.boundary_tol
        nearest = int(mpmath.nint(beta))
        if abs(beta - nearest) <= tol * nearest:
            return CodeSeq.periodic_word([nearest - 1], n)

        floor_beta = int(mpmath.floor(beta))
        digits = [floor_beta]
        point = beta - floor_beta
        while len(digits) < n:
            point, digit, near = _s_step(beta, point, tol)
            digits.append(digit)
            if near or point == 0:
                pattern = digits[:]
                pattern[-1] -= 1
                log.debug(f"expansion of 1 in base {mpmath.nstr(beta, 12)} is finite")
                return CodeSeq.periodic_word(pattern, n)
    return CodeSeq(digits)


def beta_context(
    beta: Real, n: Optional[int] = None, nctx: Optional[NumericContext] = None
) -> BetaContext:
    """Bundle β with O_β(1)"""
    nctx = nctx or NumericContext()
    n = nctx.horizon_default if n is None else n
    o_one = o_beta_one(beta, n, nctx)
    with nctx.workprec():
        beta = _check_beta(beta)
    return context_from_expansion(beta, o_one, nctx)


def context_from_expansion(
    beta: mpf, o_one: CodeSeq, nctx: Optional[NumericContext] = None
) -> BetaContext:
    """A BetaContext whose O_β(1) is already known"""
    nctx = nctx or NumericContext()
    if o_one.periodic and o_one.period_start == 0 and o_one.period_length == 1:
        floor_beta = o_one[0] + 1
    else:
        floor_beta = o_one[0]
    period = (o_one.period_start, o_one.period_length) if o_one.periodic else None
    return BetaContext(beta, floor_beta, o_one, period, nctx)


def parry_admissible(word: Union[Sequence[int], CodeSeq], o_one: CodeSeq) -> Verdict:
    """
    Parry's criterion: a sequence is a greedy β-expansion iff every shift
    strictly precedes O_β(1).

    Raises:
        AlphabetMismatch: a digit is outside {0, ..., O_β(1)[0]}
    """
    code = word if isinstance(word, CodeSeq) else CodeSeq(tuple(word))
    top = o_one[0]
    for digit in code.digits:
        if not 0 <= digit <= top:
            raise AlphabetMismatch(f"digit {digit} outside [0, {top}] in {code}")
    return shift_verdict(code, o_one)


def value_of_digits(
    beta: Real, word: Sequence[int], nctx: Optional[NumericContext] = None
) -> Tuple[mpf, mpf]:
    """
    The value Σ d_k β^-(k+1) of a finite word.

    Returns:
        The value and a bound `c β^-len / (β - 1)` on what any continuation
        over the digits {0, ..., c} can add, where c = ⌈β⌉ - 1 is the largest
        greedy digit

    Example::

        >>> from lbeta.beta_shift import value_of_digits
        >>> value_of_digits(2, [1])
        (mpf('0.5'), mpf('0.5'))

    The tail of 2222 in base 3 is 1/81, the gap to 0.2222... = 1:

        >>> import mpmath
        >>> value, tail = value_of_digits(3, [2, 2, 2, 2])
        >>> mpmath.nstr(value * 81, 10), mpmath.nstr(tail * 81, 10)
        ('80.0', '1.0')
    """
    nctx = nctx or NumericContext()
    with nctx.workprec():
        beta = _check_beta(beta)
        value = mpf(0)
        for digit in reversed(tuple(word)):
            value = (value + digit) / beta
        tail = (mpmath.ceil(beta) - 1) * beta ** (-len(word)) / (beta - 1)
    return value, tail


def value_of_sequence(
    beta: Real, code: CodeSeq, nctx: Optional[NumericContext] = None
) -> mpf:
    """
    The value of a digit sequence in base β, summing the periodic tail of an
    eventually periodic sequence in closed form. A sequence without a known
    period is valued on its stored digits.
    """
    nctx = nctx or NumericContext()
    if not code.periodic:
        return value_of_digits(beta, code.digits, nctx)[0]

    start = code.period_start or 0
    length = code.period_length or 1
    with nctx.workprec():
        beta = _check_beta(beta)
        head = value_of_digits(beta, code.digits[:start], nctx)[0]
        pattern = value_of_digits(beta, code.pattern, nctx)[0]
        return head + beta ** (-start) * pattern / (1 - beta ** (-length))

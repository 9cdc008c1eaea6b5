"""
Digit words, eventually periodic sequences and the lexicographic order.

Both dynamical systems of the library code points by digit sequences and decide
admissibility by comparing every shift of a sequence against a distinguished
reference sequence. The shared pieces live here.
"""

from dataclasses import dataclass
import enum
import itertools
import math
from typing import Iterable, Iterator, Optional, Sequence, Tuple

from lbeta.errors import InvalidDigits


class Verdict(enum.Enum):
    """Outcome of a shift-domination test on a finite amount of information"""

    ADMISSIBLE = "admissible"
    INADMISSIBLE = "inadmissible"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class CodeSeq:
    """
    A finite prefix of a digit sequence, optionally flagged eventually periodic.

    When `period_start` is set, the sequence continues forever by repeating
    `digits[period_start:period_start + period_length]`, and `at()` reads past
    the stored digits accordingly.

    Example::

        >>> from lbeta.words import CodeSeq
        >>> seq = CodeSeq((1, 0), period_start=0, period_length=2)
        >>> seq.take(5)
        (1, 0, 1, 0, 1)
        >>> str(seq)
        '(10)'
    """

    digits: Tuple[int, ...]
    """Stored digits"""

    period_start: Optional[int] = None
    """Index from which the sequence is periodic, if known"""

    period_length: Optional[int] = None
    """Length of the repeating pattern"""

    confidence: Optional[int] = None
    """
    Number of leading digits that are stable under perturbations of size
    boundary_tol. Defaults to the number of stored digits.
    """

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if any(d < 0 for d in self.digits):
            raise InvalidDigits(f"digits must be nonnegative, got {self.digits}")
        if self.confidence is None:
            object.__setattr__(self, "confidence", len(self.digits))
        elif not 0 <= self.confidence <= len(self.digits):
            raise InvalidDigits(
                f"confidence {self.confidence} outside [0, {len(self.digits)}]"
            )

        if self.period_start is None:
            if self.period_length is not None:
                raise InvalidDigits("period_length given without period_start")
            return
        if self.period_length is None or self.period_length < 1:
            raise InvalidDigits("a periodic sequence needs a positive period_length")
        if self.period_start + self.period_length > len(self.digits):
            raise InvalidDigits(
                f"pattern [{self.period_start}, "
                f"{self.period_start + self.period_length}) exceeds the stored digits"
            )
        for i in range(self.period_start + self.period_length, len(self.digits)):
            if self.digits[i] != self.digits[i - self.period_length]:
                raise InvalidDigits(
                    f"digit {i} breaks the period {self.pattern} of {self.digits}"
                )

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)

    def __getitem__(self, index):
        return self.digits[index]

    def __str__(self) -> str:
        sep = "," if any(d > 9 for d in self.digits) else ""
        if not self.periodic:
            return sep.join(str(d) for d in self.digits)
        head = sep.join(str(d) for d in self.digits[: self.period_start])
        pattern = sep.join(str(d) for d in self.pattern)
        return f"{head}{sep if head else ''}({pattern})"

    @property
    def periodic(self) -> bool:
        return self.period_start is not None

    @property
    def pattern(self) -> Tuple[int, ...]:
        if self.period_start is None or self.period_length is None:
            return ()
        return self.digits[self.period_start : self.period_start + self.period_length]

    @property
    def exact_length(self) -> Optional[int]:
        """Number of digits after which the sequence repeats, if it is known exactly"""
        if self.period_start is None or self.period_length is None:
            return None
        return self.period_start + self.period_length

    def at(self, index: int) -> int:
        if index < len(self.digits):
            return self.digits[index]
        if self.period_start is None or self.period_length is None:
            raise IndexError(f"digit {index} beyond a non-periodic prefix")
        offset = (index - self.period_start) % self.period_length
        return self.digits[self.period_start + offset]

    def available(self) -> Optional[int]:
        """Number of readable digits, or None when the sequence is known forever"""
        return None if self.periodic else len(self.digits)

    def take(self, n: int) -> Tuple[int, ...]:
        """First `n` digits, reading through the period when necessary"""
        return tuple(self.at(i) for i in range(n))

    def shifted(self, n: int) -> "CodeSeq":
        """The sequence with its first `n` digits removed"""
        if self.period_start is None or self.period_length is None:
            return CodeSeq(
                self.digits[n:], confidence=max(0, (self.confidence or 0) - n)
            )
        start = max(0, self.period_start - n)
        digits = self.take(max(len(self.digits), n + start + self.period_length))[n:]
        return CodeSeq(digits, period_start=start, period_length=self.period_length)

    def extended(self, n: int) -> "CodeSeq":
        """Store at least `n` digits of a periodic sequence"""
        if not self.periodic or n <= len(self.digits):
            return self
        return CodeSeq(
            self.take(n),
            period_start=self.period_start,
            period_length=self.period_length,
        )

    @classmethod
    def periodic_word(cls, pattern: Sequence[int], n: int) -> "CodeSeq":
        """A purely periodic sequence storing its first `max(n, len(pattern))` digits"""
        pattern = tuple(pattern)
        count = max(n, len(pattern))
        digits = tuple(pattern[i % len(pattern)] for i in range(count))
        return cls(digits, period_start=0, period_length=len(pattern))


def compare_words(u: Iterable[int], v: Iterable[int]) -> int:
    """
    Compare two words on their common prefix.

    Returns:
        -1 if `u` precedes `v`, 1 if it follows, 0 if they agree on the prefix
    """
    for a, b in zip(u, v):
        if a != b:
            return -1 if a < b else 1
    return 0


def compare_sequences(u: CodeSeq, v: CodeSeq) -> Tuple[int, bool]:
    """
    Compare two (possibly periodic) sequences as far as both are known.

    Returns:
        The comparison on the common horizon and whether that horizon covers
        the full infinite sequences (both eventually periodic)
    """
    if u.periodic and v.periodic:
        horizon = max(u.period_start or 0, v.period_start or 0) + math.lcm(
            u.period_length or 1, v.period_length or 1
        )
        return compare_words(u.take(horizon), v.take(horizon)), True

    limits = [n for n in (u.available(), v.available()) if n is not None]
    horizon = min(limits)
    return compare_words(u.take(horizon), v.take(horizon)), False


def shift_verdict(word: CodeSeq, reference: CodeSeq) -> Verdict:
    """
    Decide whether every shift of `word` strictly precedes `reference`.

    A shift that follows the reference makes the word inadmissible. A shift
    that agrees with it is inadmissible when both are known forever, and
    undetermined otherwise.
    """
    count = word.exact_length if word.periodic else len(word.digits)
    undetermined = False
    for n in range(count or 0):
        order, exact = compare_sequences(word.shifted(n), reference)
        if order > 0:
            return Verdict.INADMISSIBLE
        if order == 0:
            if exact:
                return Verdict.INADMISSIBLE
            undetermined = True
    return Verdict.UNDETERMINED if undetermined else Verdict.ADMISSIBLE


def is_shift_maximal(word: Sequence[int]) -> bool:
    """Every suffix precedes or equals the prefix of the same length"""
    return all(
        compare_words(word[k:], word[: len(word) - k]) <= 0
        for k in range(1, len(word))
    )


def longest_run(word: Sequence[int], symbol: int = 0) -> int:
    """
    Length of the longest block of consecutive `symbol` digits.

    Example::

        >>> from lbeta.words import longest_run
        >>> longest_run((1, 0, 0, 2, 0, 0, 0, 1))
        3
    """
    return max(
        (sum(1 for _ in run) for digit, run in itertools.groupby(word) if digit == symbol),
        default=0,
    )

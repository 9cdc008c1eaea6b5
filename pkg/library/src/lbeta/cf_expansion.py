"""
λ-continued fractions in the positive form

    ⟦b_1, ..., b_ℓ⟧ = 1 / (b_1 λ - 1 / (b_2 λ - ... - 1 / (b_ℓ λ)))

and the expansion of a point of [0, ∞) through the coding of its T_λ orbit.
The conversion from a coding to digits is combinatorial; only evaluation
needs λ.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf

from lbeta.errors import DivisionNearZero, InvalidDigits, OutOfRange
from lbeta.lambda_dynamics import LambdaContext, code_orbit, cylinder
from lbeta.logs import log
from lbeta.numerics import NumericContext, Real, as_real
from lbeta.words import CodeSeq


@dataclass(frozen=True)
class CFDigits:
    """
    Partial quotients b_1 ... b_ℓ, all at least 1. The empty list is the
    continued fraction of 0.

    Example::

        >>> from lbeta.cf_expansion import CFDigits
        >>> cf = CFDigits((1, 2, 3))
        >>> str(cf)
        '[[1, 2, 3]]'
        >>> cf.alternating()
        [0, 1, -2, 3]
    """

    digits: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(b) for b in self.digits))
        if any(b < 1 for b in self.digits):
            raise InvalidDigits(f"partial quotients must be >= 1, got {self.digits}")

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __str__(self) -> str:
        return "[[" + ", ".join(str(b) for b in self.digits) + "]]"

    def alternating(self) -> List[int]:
        """The signed form [0, b_1, -b_2, b_3, ...] of the same fraction"""
        return [0] + [b if k % 2 == 0 else -b for k, b in enumerate(self.digits)]

    def is_prefix_of(self, other: "CFDigits") -> bool:
        return other.digits[: len(self.digits)] == self.digits


@dataclass(frozen=True)
class Convergent:
    cf_prefix_len: int
    """Number of partial quotients"""

    value: mpf
    """Left endpoint of the coding cylinder, a lower bound for x"""

    cylinder_width: mpf
    """Width of the coding cylinder, so `0 <= x - value <= cylinder_width`"""

    code_len: int
    """Length of the coding prefix the convergent comes from"""


@dataclass(frozen=True)
class Expansion:
    """Continued fraction of a point together with its convergents"""

    cf: CFDigits
    convergents: Tuple[Convergent, ...]
    code: CodeSeq
    finite: bool
    """The orbit reached 0, so `cf` is exact"""

    @property
    def residual_bound(self) -> mpf:
        if self.finite or not self.convergents:
            return mpf(0)
        return self.convergents[-1].cylinder_width


def eval_cf(
    lam: Real, cf: Sequence[int], tol: Optional[Real] = None, nctx=None
) -> mpf:
    """
    Evaluate ⟦b_1, ..., b_ℓ⟧ at λ from the innermost level outwards.

    Example::

        >>> from lbeta.cf_expansion import eval_cf
        >>> import mpmath
        >>> mpmath.nstr(eval_cf(1.5, [1, 1]), 10)
        '1.2'

    Raises:
        DivisionNearZero: a partial denominator is within `tol` of 0; `level`
            is the 1-based index of its partial quotient
    """
    nctx = nctx or NumericContext()
    digits = CFDigits(tuple(cf)).digits
    with nctx.workprec():
        lam = as_real(lam, "lambda")
        tol = nctx.boundary_tol if tol is None else mpf(tol)
        if not digits:
            return mpf(0)

        y = None
        for level in range(len(digits), 0, -1):
            y = digits[level - 1] * lam - (1 / y if y is not None else 0)
            if abs(y) <= tol:
                raise DivisionNearZero(
                    f"partial denominator {mpmath.nstr(y, 5)} at level {level} of "
                    f"{digits} for lambda={mpmath.nstr(lam, 12)}",
                    level=level,
                )
        return 1 / y


def coding_to_cf(code: Sequence[int]) -> CFDigits:
    """
    Partial quotients of the left endpoint of the cylinder of a coding.

    Written in runs as `0^{e_0} a_0 0^{e_1} a_1 ...` with every a_k > 0, the
    run a_k contributes a_k quotients: `e_0 + 1` (first run) or `e_k + 2`
    (later runs) followed by `a_k - 1` ones. Trailing zeros contribute nothing.

    Example::

        >>> from lbeta.cf_expansion import coding_to_cf
        >>> str(coding_to_cf([0, 1])), str(coding_to_cf([2])), str(coding_to_cf([1, 1]))
        ('[[2]]', '[[1, 1]]', '[[1, 2]]')
    """
    digits: List[int] = []
    zeros = 0
    first = True
    for x in code:
        x = int(x)
        if x < 0:
            raise InvalidDigits(f"coding digits must be nonnegative, got {x}")
        if x == 0:
            zeros += 1
            continue
        digits.append(zeros + (1 if first else 2))
        digits.extend([1] * (x - 1))
        zeros = 0
        first = False
    return CFDigits(tuple(digits))


def apply_branch(i: int, cf: Sequence[int]) -> CFDigits:
    """
    The continued fraction of h_i(y) given that of y:
    h_i(⟦b_1, b_2, ...⟧) = ⟦1^i, 1 + b_1, b_2, ...⟧ and h_i(0) = ⟦1^i⟧.
    """
    if i < 0:
        raise InvalidDigits(f"branch index must be nonnegative, got {i}")
    digits = CFDigits(tuple(cf)).digits
    if not digits:
        return CFDigits((1,) * i)
    return CFDigits((1,) * i + (1 + digits[0],) + digits[1:])


def expand_x(ctx: LambdaContext, x: Real, n: Optional[int] = None) -> Expansion:
    """
    Expand x along its first `n` coding digits.

    Every coding prefix gives a convergent: the left endpoint of its cylinder,
    evaluated from the continued fraction of the prefix, and the cylinder
    width as the error bound.
    """
    n = ctx.nctx.horizon_default if n is None else n
    if n < 1:
        raise OutOfRange(f"horizon must be positive, got {n}")

    code = code_orbit(ctx, x, n)
    finite = code.periodic and code.pattern == (0,)
    convergents = []
    for k in range(1, n + 1):
        prefix = code.digits[:k]
        cf = coding_to_cf(prefix)
        convergents.append(
            Convergent(
                cf_prefix_len=len(cf),
                value=eval_cf(ctx.lam, cf.digits, nctx=ctx.nctx),
                cylinder_width=cylinder(ctx, prefix).width,
                code_len=k,
            )
        )

    cf = coding_to_cf(code.digits)
    log.debug(f"expanded x={x} to {len(cf)} partial quotients, finite={finite}")
    return Expansion(cf, tuple(convergents), code, finite)

"""
Precision policy and monotone root finding.

All reals in lbeta are `mpmath.mpf` values. The working precision is held by
`NumericContext` and installed with its `workprec()` context manager, which every
public operation of the library enters before doing arithmetic. mpmath keeps its
precision in process-global state, so concurrent evaluation uses processes
rather than threads (see `lbeta.scan`).
"""

from contextlib import contextmanager
from dataclasses import dataclass, field, replace
import math
import os
from typing import Callable, Iterator, Optional, Union

import mpmath
from mpmath import mpf

from lbeta.errors import (
    InvalidDegree,
    NoSignChange,
    NonConvergence,
    NonFinite,
    OutOfRange,
)
from lbeta.logs import log

Real = Union[int, float, str, mpf]

DEFAULT_PRECISION_BITS = 192
DEFAULT_HORIZON = 128
GUARD_BITS = 32


def _env_precision() -> int:
    value = os.getenv("LB_PRECISION_BITS", str(DEFAULT_PRECISION_BITS))
    try:
        return int(value)
    except ValueError:
        raise OutOfRange(f"LB_PRECISION_BITS must be an integer, got {value!r}")


@dataclass(frozen=True)
class NumericContext:
    """
    Precision and tolerance settings shared by every lbeta operation.

    Example::

        from lbeta.numerics import NumericContext

        nctx = NumericContext(precision_bits=256)
        with nctx.workprec():
            ...
    """

    precision_bits: int = field(default_factory=_env_precision)
    """Working mantissa size in bits (at least 64)"""

    boundary_tol: Optional[mpf] = None
    """
    Tie tolerance for interval-membership tests. Defaults to half the working
    precision, `2**-(precision_bits // 2)`.
    """

    horizon_default: int = DEFAULT_HORIZON
    """Default orbit length"""

    adaptive: bool = True
    """Add guard bits proportional to the horizon for orbit computations"""

    validate: bool = True
    """Reject settings below the supported precision floor"""

    def __post_init__(self):
        if self.boundary_tol is None:
            tol = mpmath.ldexp(mpf(1), -(self.precision_bits // 2))
            object.__setattr__(self, "boundary_tol", tol)
        else:
            object.__setattr__(self, "boundary_tol", mpf(self.boundary_tol))

        if not self.validate:
            return
        if self.precision_bits < 64:
            raise OutOfRange(
                f"precision_bits must be at least 64, got {self.precision_bits}"
            )
        if not 0 < self.boundary_tol < mpmath.ldexp(mpf(1), -32):
            raise OutOfRange(
                f"boundary_tol must lie in (0, 2**-32), got {self.boundary_tol}"
            )
        if self.horizon_default < 1:
            raise OutOfRange(
                f"horizon_default must be positive, got {self.horizon_default}"
            )

    @classmethod
    def degraded(cls, precision_bits: int) -> "NumericContext":
        """
        Build an unvalidated context at a deliberately low precision. Horizon
        guard bits are disabled so the low precision is actually used.
        """
        log.warning(
            f"Using degraded precision of {precision_bits} bits, results are unreliable"
        )
        return cls(precision_bits=precision_bits, adaptive=False, validate=False)

    def with_precision(self, precision_bits: int) -> "NumericContext":
        """Same tolerances at another working precision"""
        return replace(self, precision_bits=precision_bits)

    def working_bits(
        self, horizon: Optional[int] = None, growth: Optional[Real] = None
    ) -> int:
        """
        Precision needed to follow an orbit for `horizon` steps of a map that
        expands by at most `growth` per step.
        """
        if not self.adaptive or horizon is None or growth is None:
            return self.precision_bits
        rate = max(float(growth), 2.0)
        return self.precision_bits + math.ceil(horizon * math.log2(rate)) + GUARD_BITS

    @contextmanager
    def workprec(
        self, horizon: Optional[int] = None, growth: Optional[Real] = None
    ) -> Iterator[int]:
        """Install the working precision for the duration of the block"""
        bits = self.working_bits(horizon, growth)
        with mpmath.workprec(bits):
            yield bits


def as_real(value: Real, name: str = "value") -> mpf:
    """Convert to `mpf` at the current precision, rejecting NaN and infinities"""
    try:
        x = mpf(value)
    except (TypeError, ValueError):
        raise NonFinite(f"{name} must be a real number, got {value!r}")
    if mpmath.isnan(x) or mpmath.isinf(x):
        raise NonFinite(f"{name} must be finite, got {value!r}")
    return x


def sign(x: mpf) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


@dataclass(frozen=True)
class Bracket:
    """An interval on which a monotone function changes sign"""

    lo: mpf
    hi: mpf
    f_lo_sign: int
    f_hi_sign: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise OutOfRange(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if {self.f_lo_sign, self.f_hi_sign} != {-1, 1}:
            raise NoSignChange(
                f"no sign change on [{self.lo}, {self.hi}] "
                f"(signs {self.f_lo_sign}, {self.f_hi_sign})"
            )

    @classmethod
    def of(cls, f: Callable[[mpf], mpf], lo: Real, hi: Real) -> "Bracket":
        """Evaluate `f` at both ends"""
        lo, hi = mpf(lo), mpf(hi)
        return cls(lo, hi, sign(f(lo)), sign(f(hi)))

    @property
    def width(self) -> mpf:
        return self.hi - self.lo


def bisect(
    f: Callable[[mpf], mpf],
    bracket: Bracket,
    tol: Real,
    ftol: Optional[Real] = None,
    max_iter: Optional[int] = None,
) -> mpf:
    """
    Find the sign change of a monotone function by bisection.

    Example::

        >>> from mpmath import mpf
        >>> from lbeta.numerics import Bracket, bisect
        >>> f = lambda x: x - 1
        >>> bisect(f, Bracket.of(f, 0, 2), mpf("1e-12"))
        mpf('1.0')

    Args:
        f: Monotone function on the bracket
        bracket: Interval with opposite signs of `f` at its ends
        tol: Width of the final bracket
        ftol: Optional early exit once `|f(mid)| <= ftol`
        max_iter: Iteration cap, defaults to 10 times the working precision

    Returns:
        Midpoint of the final bracket (or the exact root if one was hit)

    Raises:
        NonConvergence: the cap was reached or the precision is exhausted
    """
    lo, hi = bracket.lo, bracket.hi
    tol = mpf(tol)
    cap = max_iter if max_iter is not None else 10 * mpmath.mp.prec

    for iteration in range(cap):
        if hi - lo <= tol:
            log.debug(f"bisect converged after {iteration} iterations")
            return (lo + hi) / 2
        mid = (lo + hi) / 2
        if not lo < mid < hi:
            raise NonConvergence(
                f"bracket [{lo}, {hi}] cannot be split further at "
                f"{mpmath.mp.prec} bits (tol {tol})"
            )
        value = f(mid)
        s = sign(value)
        if s == 0 or (ftol is not None and abs(value) <= ftol):
            return mid
        if s == bracket.f_lo_sign:
            lo = mid
        else:
            hi = mid

    if hi - lo <= tol:
        return (lo + hi) / 2
    raise NonConvergence(
        f"bisection did not reach tol {tol} within {cap} iterations "
        f"(last bracket [{lo}, {hi}])"
    )


def solve_monotone(
    f: Callable[[mpf], mpf],
    lo: Real,
    hi: Real,
    tol: Real,
    ftol: Optional[Real] = None,
    max_iter: Optional[int] = None,
) -> mpf:
    """Bracket `f` on `[lo, hi]` and bisect, accepting an exact root at either end"""
    lo, hi = mpf(lo), mpf(hi)
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    bracket = Bracket(lo, hi, sign(f_lo), sign(f_hi))
    return bisect(f, bracket, tol, ftol=ftol, max_iter=max_iter)


def largest_real_root(
    k: int, tol: Real, nctx: Optional[NumericContext] = None
) -> mpf:
    """
    Largest real root of `X**k - X**(k-1) - 1`, which lies in (1, 2].

    The polynomial is -1 at 1 and `2**(k-1) - 1 > 0` at 2.
    """
    if int(k) != k or k < 2:
        raise InvalidDegree(f"degree must be an integer >= 2, got {k}")
    k = int(k)
    nctx = nctx or NumericContext()

    with nctx.workprec():

        def f(x):
            return x**k - x ** (k - 1) - 1

        return solve_monotone(f, 1, 2, tol)

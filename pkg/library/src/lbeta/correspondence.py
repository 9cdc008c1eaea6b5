"""
The order-preserving correspondence λ -> β(λ).

For every 0 < λ < 2 there is a unique β > 1 whose quasi-greedy expansion of 1
is ω_λ(∞), and the map sending the T_λ coding of x to the β-expansion with the
same digits conjugates T_λ on [0, ∞) to S_β on [0, 1). This module solves
for β(λ) and its inverse, evaluates the conjugacy and studies the prefixes of
ω_λ(∞) as λ varies.
"""

from dataclasses import dataclass
import itertools
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf
import numpy as np

from lbeta.beta_shift import (
    BetaContext,
    context_from_expansion,
    o_beta_one,
    value_of_digits,
    value_of_sequence,
)
from lbeta.errors import (
    EmptyInterval,
    NonConvergence,
    NotLsm,
    OutOfRange,
    OutOfUnitInterval,
    PrefixTooShort,
)
from lbeta.lambda_dynamics import (
    LambdaContext,
    branch_matrix,
    build_context,
    code_orbit,
    lambda_from_tau,
    omega_infinity,
)
from lbeta.logs import log
from lbeta.numerics import NumericContext, Real, as_real, solve_monotone
from lbeta.words import CodeSeq, compare_sequences, compare_words, is_shift_maximal

DEFAULT_TOL = mpf("1e-10")
INITIAL_PREFIX = 64
MAX_PREFIX = 2**15


@dataclass(frozen=True)
class PhiValue:
    t: mpf
    """φ_λ(x), valued on the coding prefix"""
    tail_bound: mpf
    """Bound on the contribution of the digits past the prefix; 0 for a finite coding"""


@dataclass(frozen=True)
class CurvePoint:
    """One sample of the curve τ -> β(2cos(π/τ))"""

    tau: mpf
    lam: mpf
    beta: mpf
    omega_prefix: Tuple[int, ...]
    entropy: mpf

    @property
    def omega_string(self) -> str:
        return str(CodeSeq(self.omega_prefix))


@dataclass(frozen=True, order=True)
class LsmWord:
    """
    A lexicographically shift maximal word: nonzero first digit and every
    suffix at most the prefix of the same length.

    Example::

        >>> from lbeta.correspondence import LsmWord
        >>> str(LsmWord((2, 1, 2)))
        '212'
    """

    digits: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if not is_lsm(self.digits):
            raise NotLsm(f"{self.digits} is not lexicographically shift maximal")

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __str__(self) -> str:
        return str(CodeSeq(self.digits))


###
# β(λ) and its inverse
###


def _floor_root(f: Callable[[mpf], mpf], lo: mpf, hi: mpf, tol: mpf) -> mpf:
    """Root of a decreasing function, clamped to `lo` when f(lo) <= 0"""
    if f(lo) <= 0:
        return lo
    return solve_monotone(f, lo, hi, tol)


def beta_of_lambda(ctx: LambdaContext, tol: Real = DEFAULT_TOL) -> BetaContext:
    """
    Solve for the β > 1 whose expansion of 1 is ω_λ(∞).

    A periodic ω_λ(∞) is valued exactly, so β is the root of "the value of the
    periodic word is 1". Otherwise the prefix of length N bounds β between the
    roots of `V_N(β) = 1` and `V_N(β) + ∞_0 β^-N / (β - 1) = 1`, and N grows
    until the two agree within `tol`.

    Example::

        >>> from lbeta.correspondence import beta_of_lambda
        >>> from lbeta.lambda_dynamics import build_context
        >>> round(float(beta_of_lambda(build_context(1)).beta), 9)
        2.0

    Raises:
        PrefixTooShort: the required prefix length exceeds MAX_PREFIX
        NonConvergence: a root bracket could not be refined
    """
    nctx = ctx.nctx
    with nctx.workprec():
        tol = as_real(tol, "tol")
        if tol <= 0:
            raise OutOfRange(f"tol must be positive, got {tol}")

    n = INITIAL_PREFIX
    while True:
        omega = omega_infinity(ctx, n)
        top = omega[0]
        with nctx.workprec():
            lo = 1 + mpmath.ldexp(mpf(1), -40)
            hi = mpf(top + 2)

            if omega.periodic:
                beta = solve_monotone(
                    lambda b: value_of_sequence(b, omega, nctx) - 1, lo, hi, tol / 4
                )
                log.debug(
                    f"beta={mpmath.nstr(beta, 15)} from the period of {omega} "
                    f"for lambda={mpmath.nstr(ctx.lam, 12)}"
                )
                return context_from_expansion(beta, omega, nctx)

            digits = omega.digits

            def lower(b):
                return value_of_digits(b, digits, nctx)[0] - 1

            def upper(b):
                return lower(b) + top * b ** (-n) / (b - 1)

            beta_low = _floor_root(lower, lo, hi, tol / 4)
            beta_up = _floor_root(upper, lo, hi, tol / 4)
            log.debug(f"prefix {n}: beta in [{beta_low}, {beta_up}]")
            if beta_up - beta_low < tol:
                return context_from_expansion((beta_low + beta_up) / 2, omega, nctx)

            base = max(beta_low, lo)
            needed = mpmath.log(4 * top * beta_up**2 / ((base - 1) * tol)) / mpmath.log(
                base
            )
            # the estimate is loose while the lower root sits on the bracket end
            grown = max(2 * n, min(int(mpmath.ceil(needed)), 8 * n))

        if n >= MAX_PREFIX:
            raise PrefixTooShort(
                f"lambda={mpmath.nstr(ctx.lam, 12)} needs more than {MAX_PREFIX} "
                f"digits to reach tol {tol}"
            )
        n = min(grown, MAX_PREFIX)


def lambda_of_beta(
    beta: Real, tol: Real = DEFAULT_TOL, nctx: Optional[NumericContext] = None
) -> mpf:
    """
    Invert β(λ) by bisection on λ.

    The first digit d of O_β(1) pins λ to ]λ_{d+1}, λ_{d+2}], where i_λ = d.
    Each midpoint compares ω_λ(∞) with O_β(1) digit by digit, which still
    separates nearby λ where β(λ) is too flat for its values to do so. When the
    prefixes agree, a periodic O_β(1) is decided by the sign of γ in the
    product of branch matrices over its period (γ < 0 below the solution), and
    anything else by comparing β(λ) with β.

    Raises:
        NonConvergence: the bracket did not shrink, or the result misses β by
            tol or more
    """
    nctx = nctx or NumericContext()
    with nctx.workprec():
        beta = as_real(beta, "beta")
        tol = as_real(tol, "tol")
        if beta <= 1:
            raise OutOfRange(f"beta must be greater than 1, got {beta}")
        if tol <= 0:
            raise OutOfRange(f"tol must be positive, got {tol}")
        inner = tol / 8

    horizon = nctx.horizon_default
    target = o_beta_one(beta, horizon, nctx)
    prefix = target.take(horizon)
    top = prefix[0]
    with nctx.workprec():
        lo = mpf(0) if top == 1 else lambda_from_tau(top + 1, nctx)
        hi = lambda_from_tau(top + 2, nctx)

    def below(lam: mpf) -> bool:
        ctx = build_context(lam, nctx)
        order = compare_words(omega_infinity(ctx, horizon).take(horizon), prefix)
        if order != 0:
            return order < 0
        if target.periodic:
            return branch_matrix(ctx, target.pattern).c < 0
        found = beta_of_lambda(ctx, inner).beta
        with nctx.workprec():
            return found < beta

    with nctx.workprec():
        width = tol * mpf("1e-3")
        for _ in range(10 * nctx.precision_bits):
            if hi - lo <= width:
                break
            mid = (lo + hi) / 2
            if below(mid):
                lo = mid
            else:
                hi = mid
        else:
            raise NonConvergence(f"bracket for beta={beta} did not shrink to {width}")
        lam = (lo + hi) / 2

    found = beta_of_lambda(build_context(lam, nctx), inner).beta
    with nctx.workprec():
        if abs(found - beta) >= tol:
            raise NonConvergence(
                f"lambda={mpmath.nstr(lam, 15)} gives beta={mpmath.nstr(found, 15)}, "
                f"not within {tol} of {mpmath.nstr(beta, 15)}"
            )
    log.debug(f"lambda={mpmath.nstr(lam, 15)} for beta={mpmath.nstr(beta, 15)}")
    return lam


def phi(
    ctx: LambdaContext, bctx: BetaContext, x: Real, n: Optional[int] = None
) -> PhiValue:
    """
    The conjugacy φ_λ(x): the value in base β(λ) of the T_λ coding of x.

    Example::

        >>> from lbeta.correspondence import beta_of_lambda, phi
        >>> from lbeta.lambda_dynamics import build_context
        >>> ctx = build_context(1)
        >>> round(float(phi(ctx, beta_of_lambda(ctx), 2, 16).t), 9)
        0.75
    """
    n = ctx.nctx.horizon_default if n is None else n
    code = code_orbit(ctx, x, n)
    nctx = ctx.nctx
    value, _ = value_of_digits(bctx.beta, code.digits, nctx)
    if code.periodic and code.pattern == (0,):
        return PhiValue(value, mpf(0))
    with nctx.workprec():
        beta = bctx.beta
        tail = bctx.alphabet_max * beta ** (-n) / (beta - 1)
    return PhiValue(value, tail)


def entropy(ctx: LambdaContext, tol: Real = DEFAULT_TOL) -> mpf:
    """Topological entropy of T_λ, which equals log β(λ)"""
    bctx = beta_of_lambda(ctx, tol)
    with ctx.nctx.workprec():
        return mpmath.log(bctx.beta)


###
# Lexicographically shift maximal words
###


def is_lsm(word: Sequence[int]) -> bool:
    word = tuple(word)
    return len(word) > 0 and word[0] > 0 and is_shift_maximal(word)


def succ_lsm(word: Sequence[int]) -> LsmWord:
    """
    The smallest LSM word of the same length that follows `word`: increment
    the rightmost digit that keeps the prefix shift maximal, then fill with
    zeros. A prefix ending in the incremented digit is extendable by zeros
    exactly when it is itself shift maximal.

    Example::

        >>> from lbeta.correspondence import succ_lsm
        >>> [str(succ_lsm(w)) for w in ((2, 0, 1), (2, 2, 2), (1, 0, 0))]
        ['202', '300', '101']

    Raises:
        NotLsm: the word is not LSM
    """
    digits = LsmWord(tuple(word)).digits
    length = len(digits)
    for p in range(length - 1, 0, -1):
        for value in range(digits[p] + 1, digits[0] + 1):
            prefix = digits[:p] + (value,)
            if is_shift_maximal(prefix):
                return LsmWord(prefix + (0,) * (length - p - 1))
    return LsmWord((digits[0] + 1,) + (0,) * (length - 1))


def enumerate_lsm(length: int, alphabet_max: int) -> List[LsmWord]:
    """All LSM words of a given length over {0, ..., alphabet_max}, in increasing order"""
    if length < 1 or alphabet_max < 1:
        raise OutOfRange(
            f"need length >= 1 and alphabet_max >= 1, got {length}, {alphabet_max}"
        )
    return [
        LsmWord(word)
        for word in itertools.product(range(alphabet_max + 1), repeat=length)
        if is_lsm(word)
    ]


def max_prefix(lam: Real, length: int, nctx: Optional[NumericContext] = None) -> Tuple[int, ...]:
    """The first `length` digits of ω_λ(∞)"""
    return omega_infinity(build_context(lam, nctx), length).take(length)


def _boundary(
    holds: Callable[[mpf], bool], good: mpf, bad: mpf, tol: mpf, cap: int
) -> mpf:
    for _ in range(cap):
        if abs(bad - good) <= tol:
            return (good + bad) / 2
        mid = (good + bad) / 2
        if holds(mid):
            good = mid
        else:
            bad = mid
    raise NonConvergence(f"boundary bracket [{good}, {bad}] did not shrink to {tol}")


def lambda_interval_for_prefix(
    word: Sequence[int], tol: Real = DEFAULT_TOL, nctx: Optional[NumericContext] = None
) -> Tuple[mpf, mpf]:
    """
    The interval ]λ_min, λ_max] of parameters for which ω_λ(∞) starts with
    `word`, bracketed by bisection since the prefix is non-decreasing in λ.

    The search runs on [1/√len, λ_{w_0+2}]: ω_λ(∞) starts with 1 0...0 at the
    left end and with w_0 w_0 ... w_0 at the right end.

    Raises:
        NotLsm: the word is not LSM, so no prefix of ω_λ(∞) equals it
        EmptyInterval: no parameter was found before the bracket shrank to tol
    """
    target = LsmWord(tuple(word)).digits
    length = len(target)
    nctx = nctx or NumericContext()
    with nctx.workprec():
        tol = as_real(tol, "tol")
        lo = 1 / mpmath.sqrt(length)
        hi = lambda_from_tau(target[0] + 2, nctx)
    cap = 10 * nctx.precision_bits

    def order(lam):
        return compare_words(max_prefix(lam, length, nctx), target)

    with nctx.workprec():
        low_order, high_order = order(lo), order(hi)
        inside = None
        if low_order == 0:
            inside = lo
        elif high_order == 0:
            inside = hi
        a, b = lo, hi
        for _ in range(cap):
            if inside is not None:
                break
            if b - a < tol:
                raise EmptyInterval(f"no lambda realizes the prefix {target}")
            mid = (a + b) / 2
            found = order(mid)
            if found == 0:
                inside = mid
            elif found < 0:
                a = mid
            else:
                b = mid
        if inside is None:
            raise NonConvergence(f"search for the prefix {target} did not converge")

        if low_order == 0:
            lambda_min = mpf(0)
        else:
            lambda_min = _boundary(lambda lam: order(lam) >= 0, inside, lo, tol, cap)
        if high_order == 0:
            lambda_max = hi
        else:
            lambda_max = _boundary(lambda lam: order(lam) == 0, inside, hi, tol, cap)

    log.debug(f"prefix {target} realized on ]{lambda_min}, {lambda_max}]")
    return lambda_min, lambda_max


###
# Minkowski's question mark function
###


def minkowski_q(x: Real, tol: Real = DEFAULT_TOL, nctx: Optional[NumericContext] = None) -> mpf:
    """
    ?(x) on [0, 1] from the regular continued fraction x = [0; a_1, a_2, ...]:
    ?(x) = 2 Σ (-1)^(k+1) 2^-(a_1 + ... + a_k).

    Example::

        >>> from lbeta.correspondence import minkowski_q
        >>> float(minkowski_q("0.5")), float(minkowski_q(1 / 3))
        (0.5, 0.25)
    """
    nctx = nctx or NumericContext()
    with nctx.workprec():
        x = as_real(x, "x")
        tol = as_real(tol, "tol")
        if not 0 <= x <= 1:
            raise OutOfUnitInterval(f"x must lie in [0, 1], got {x}")
        if x == 0:
            return mpf(0)

        total = mpf(0)
        exponent = 0
        alternate = 1
        remainder = x
        for _ in range(nctx.precision_bits):
            inverse = 1 / remainder
            quotient = int(mpmath.floor(inverse))
            fraction = inverse - quotient
            if 1 - fraction <= tol:
                quotient, fraction = quotient + 1, mpf(0)
            exponent += quotient
            total += alternate * mpmath.ldexp(mpf(1), 1 - exponent)
            alternate = -alternate
            if fraction <= tol or mpmath.ldexp(mpf(1), -exponent) < tol:
                break
            remainder = fraction
        return total


###
# The τ -> β curve
###


def _curve_point(
    tau: mpf, lam: mpf, tol: Real, nctx: NumericContext, prefix_len: int
) -> CurvePoint:
    bctx = beta_of_lambda(build_context(lam, nctx), tol)
    with nctx.workprec():
        return CurvePoint(
            tau=tau,
            lam=lam,
            beta=bctx.beta,
            omega_prefix=bctx.o_one.take(prefix_len),
            entropy=mpmath.log(bctx.beta),
        )


def curve_point(
    tau: Real,
    tol: Real = DEFAULT_TOL,
    nctx: Optional[NumericContext] = None,
    prefix_len: int = 12,
) -> CurvePoint:
    """β and ω_λ(∞) at λ = 2cos(π/τ)"""
    nctx = nctx or NumericContext()
    lam = lambda_from_tau(tau, nctx)
    with nctx.workprec():
        tau = as_real(tau, "tau")
    return _curve_point(tau, lam, tol, nctx, prefix_len)


def point_at_lambda(
    lam: Real,
    tol: Real = DEFAULT_TOL,
    nctx: Optional[NumericContext] = None,
    prefix_len: int = 12,
) -> CurvePoint:
    """The curve point of a given λ, with τ = π / arccos(λ/2)"""
    nctx = nctx or NumericContext()
    with nctx.workprec():
        lam = as_real(lam, "lambda")
        if not 0 < lam < 2:
            raise OutOfRange(f"lambda must lie in (0, 2), got {lam}")
        tau = mpmath.pi / mpmath.acos(lam / 2)
    return _curve_point(tau, lam, tol, nctx, prefix_len)


def curve_increases(
    lower: CurvePoint,
    upper: CurvePoint,
    tol: Real = DEFAULT_TOL,
    nctx: Optional[NumericContext] = None,
) -> bool:
    """
    Whether two points are consistent with a strictly increasing curve.

    β(λ) is too flat near parameters with a periodic ω_λ(∞) for solver values
    to order close neighbours, so a β difference within `tol` is decided by
    the order of ω_λ(∞), which is exact. When the stored prefixes agree, the
    expansions at both λ are recomputed with doubling horizons up to
    `MAX_PREFIX`. Equal points, and expansions that still agree, do not count
    as an increase.
    """
    nctx = nctx or NumericContext()
    with nctx.workprec():
        gap = upper.beta - lower.beta
        if abs(gap) > mpf(tol):
            return gap > 0
    order = compare_words(upper.omega_prefix, lower.omega_prefix)
    if order != 0:
        return order > 0
    if upper.lam == lower.lam:
        return False

    low_ctx = build_context(lower.lam, nctx)
    high_ctx = build_context(upper.lam, nctx)
    horizon = max(INITIAL_PREFIX, 2 * len(upper.omega_prefix))
    while horizon <= MAX_PREFIX:
        order, exhaustive = compare_sequences(
            omega_infinity(high_ctx, horizon), omega_infinity(low_ctx, horizon)
        )
        if order != 0 or exhaustive:
            return order > 0
        horizon *= 2
    log.warning(
        f"omega agrees on {MAX_PREFIX} digits at lambda={mpmath.nstr(lower.lam, 15)} "
        f"and {mpmath.nstr(upper.lam, 15)}"
    )
    return False


def staircase_deviation(
    k: int,
    eps: float = 0.25,
    samples: int = 9,
    tol: Real = DEFAULT_TOL,
    nctx: Optional[NumericContext] = None,
) -> mpf:
    """
    Largest |β(2cos(π/τ)) - (k - 1)| over `samples` equally spaced τ in
    [k - 1/2 + eps, k + 1/2 - eps]. The curve flattens into steps at the
    integers as k grows.
    """
    if k < 3 or not 0 <= eps < 0.5 or samples < 1:
        raise OutOfRange(f"need k >= 3, 0 <= eps < 1/2, samples >= 1; got {k}, {eps}, {samples}")
    taus = np.linspace(k - 0.5 + eps, k + 0.5 - eps, samples)
    worst = mpf(0)
    for tau in taus:
        point = curve_point(repr(float(tau)), tol, nctx, prefix_len=2)
        worst = max(worst, abs(point.beta - (k - 1)))
    return worst


def asymptotic_estimate(omega: CodeSeq) -> Tuple[mpf, mpf]:
    """
    β ≈ k + j/k when ω_λ(∞) starts with the digits k j, with k >= 2.

    Returns:
        The estimate and its error bound 1/k
    """
    k, j = omega.take(2)
    if k < 2:
        raise OutOfRange(f"estimate needs a first digit of at least 2, got {k}")
    return mpf(k) + mpf(j) / k, mpf(1) / k


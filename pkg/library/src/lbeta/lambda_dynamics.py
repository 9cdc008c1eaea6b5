"""
The λ-continued fraction map T_λ on [0, ∞) and the symbolic coding of its orbits.

For 0 < λ < 2 the half line is cut at the breakpoints `m_0 = 0 < m_1 < ... <
m_{i_λ}` with `m_{i+1} = 1 / (λ - m_i)`. On `[m_i, m_{i+1})` the map is the
inverse of `h_i = h^i ∘ h_0`, where `h(y) = 1 / (λ - y)` and
`h_0(y) = y / (λ y + 1)`. Branches are handled as unimodular matrices

    H_i = [[P_{i+1}, P_i], [P_{i+2}, P_{i+1}]]

with `P_0 = 0`, `P_1 = 1` and `P_{i+2} = λ P_{i+1} - P_i`.
"""

from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass, field
import functools
from typing import List, Optional, Sequence, Tuple, Union

import mpmath
from mpmath import mpf

from lbeta.errors import InvalidDigits, NegativeInput, NonConvergence, OutOfRange
from lbeta.logs import log
from lbeta.numerics import NumericContext, Real, as_real
from lbeta.words import CodeSeq, Verdict, shift_verdict

INF = mpmath.inf

MAX_BRANCHES = 10_000
"""Largest supported i_λ; λ closer to 2 than this is rejected"""

Word = Union[Sequence[int], CodeSeq]


@dataclass(frozen=True)
class Homography:
    """
    The Moebius map `x -> (a x + b) / (c x + d)` of a 2x2 matrix with
    determinant 1.

    Example::

        >>> from lbeta.lambda_dynamics import Homography
        >>> shift = Homography(1, 1, 0, 1)
        >>> (shift @ shift)(0)
        mpf('2.0')
    """

    a: mpf
    b: mpf
    c: mpf
    d: mpf

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, mpf(getattr(self, name)))

    @classmethod
    def identity(cls) -> "Homography":
        return cls(1, 0, 0, 1)

    def __matmul__(self, other: "Homography") -> "Homography":
        return Homography(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __call__(self, x: mpf) -> mpf:
        if mpmath.isinf(x):
            return self.a / self.c if self.c != 0 else INF
        den = self.c * x + self.d
        if den == 0:
            return INF
        return (self.a * x + self.b) / den

    @property
    def det(self) -> mpf:
        return self.a * self.d - self.b * self.c

    @property
    def pole(self) -> mpf:
        """The point sent to infinity (+inf for an affine map)"""
        return -self.d / self.c if self.c != 0 else INF

    def inverse(self) -> "Homography":
        return Homography(self.d, -self.b, -self.c, self.a)

    def rows(self) -> Tuple[Tuple[mpf, mpf], Tuple[mpf, mpf]]:
        return ((self.a, self.b), (self.c, self.d))


@dataclass(frozen=True)
class LambdaContext:
    """The branch structure of T_λ for one value of λ. Build with `build_context`."""

    lam: mpf
    """The parameter λ in (0, 2)"""

    theta: mpf
    """Angle in (0, π/2) with λ = 2 cos θ"""

    i_lambda: int
    """Index of the last branch"""

    breakpoints: Tuple[mpf, ...]
    """Left endpoints m_0 = 0, ..., m_{i_λ} of the branch intervals"""

    ell_lambda: mpf
    """Pole of the last branch; +inf in the degenerate case"""

    p_values: Tuple[mpf, ...]
    """P_0(λ), ..., P_{i_λ+2}(λ)"""

    degenerate: bool
    """True when λ = 2cos(π/k), so m_{i_λ} = λ and the last branch is affine"""

    nctx: NumericContext = field(repr=False, compare=False)

    def branch(self, i: int) -> Homography:
        """The matrix H_i of h_i"""
        if not 0 <= i <= self.i_lambda:
            raise InvalidDigits(f"digit {i} outside [0, {self.i_lambda}]")
        p = self.p_values
        return Homography(p[i + 1], p[i], p[i + 2], p[i + 1])

    def domain_end(self, i: int) -> mpf:
        """Right end of the domain of h_i, which is [0, ∞) except for the last branch"""
        return self.ell_lambda if i == self.i_lambda else INF

    def near_breakpoint(self, x: mpf) -> Optional[int]:
        """Index j >= 1 of a breakpoint within boundary_tol of x"""
        tol = self.nctx.boundary_tol
        i = bisect_right(self.breakpoints, x)
        for j in (i - 1, i):
            if 1 <= j <= self.i_lambda:
                m = self.breakpoints[j]
                if abs(x - m) <= tol * max(1, m):
                    return j
        return None

    def locate(self, x: mpf) -> Tuple[int, bool]:
        """
        Digit of the interval containing x, and whether x sits on a breakpoint.
        A point within boundary_tol of m_j is assigned digit j.
        """
        j = self.near_breakpoint(x)
        if j is not None:
            return j, True
        return bisect_right(self.breakpoints, x) - 1, False

    def lifted(self, precision_bits: int) -> "LambdaContext":
        """The same λ with every derived quantity recomputed at more bits"""
        if precision_bits <= self.nctx.precision_bits:
            return self
        return _lifted_context(self.lam, self.nctx.with_precision(precision_bits))


@dataclass(frozen=True)
class Cylinder:
    """The set of points whose coding starts with a given word"""

    left: mpf
    right: mpf
    empty: bool = False

    @property
    def width(self) -> mpf:
        return mpf(0) if self.empty else self.right - self.left

    def __contains__(self, x) -> bool:
        return not self.empty and self.left <= x < self.right


@dataclass(frozen=True)
class OmegaCrossCheck:
    """ω_λ(∞) rebuilt from the orbit of λ"""

    code: CodeSeq
    orbit_hits_zero: bool
    """The orbit of λ hit a breakpoint, so ω_λ(∞) is periodic"""
    hit_index: Optional[int] = None
    """Step at which the orbit of λ sat on a breakpoint"""


@dataclass(frozen=True)
class GeometryState:
    """
    A point x = t_1 / t_0 seen as two consecutive abscissae of points spaced by
    the angle θ on a circle of radius R centred at the origin.
    """

    radius: mpf
    abscissae: Tuple[mpf, ...]
    """t_0, t_1, ... continued by t_{j+1} = λ t_j - t_{j-1} to the first negative one"""
    angle: mpf
    psi: mpf
    """Argument of t_0, so t_j = R cos(psi - j θ)"""

    @property
    def digit(self) -> int:
        """Branch index read off the rotation: the first negative abscissa is t_{digit+2}"""
        return len(self.abscissae) - 3

    def reconstruct(self) -> Tuple[mpf, mpf]:
        """Recompute (t_0, t_1) from the radius and the argument"""
        return (
            self.radius * mpmath.cos(self.psi),
            self.radius * mpmath.cos(self.psi - self.angle),
        )


###
# Construction
###


def lambda_from_tau(tau: Real, nctx: Optional[NumericContext] = None) -> mpf:
    """λ = 2 cos(π/τ) for τ > 2"""
    nctx = nctx or NumericContext()
    with nctx.workprec():
        tau = as_real(tau, "tau")
        if tau <= 2:
            raise OutOfRange(f"tau must be greater than 2, got {tau}")
        return 2 * mpmath.cos(mpmath.pi / tau)


def build_context(lam: Real, nctx: Optional[NumericContext] = None) -> LambdaContext:
    """
    Compute breakpoints, branch polynomials and the pole of the last branch.

    Example::

        >>> from lbeta.lambda_dynamics import build_context
        >>> ctx = build_context(1.5)
        >>> ctx.i_lambda
        3
        >>> build_context(1).degenerate
        True

    Raises:
        OutOfRange: λ is not in (0, 2), or so close to 2 that the branch count
            exceeds MAX_BRANCHES
    """
    nctx = nctx or NumericContext()
    with nctx.workprec():
        lam = as_real(lam, "lambda")
        tol = nctx.boundary_tol
        if not tol < lam < 2:
            raise OutOfRange(f"lambda must lie in (0, 2), got {lam}")

        breakpoints = [mpf(0)]
        while breakpoints[-1] < lam - tol:
            if len(breakpoints) > MAX_BRANCHES:
                raise OutOfRange(
                    f"lambda {lam} is too close to 2 (more than {MAX_BRANCHES} branches)"
                )
            breakpoints.append(1 / (lam - breakpoints[-1]))
        i_lambda = len(breakpoints) - 1
        degenerate = abs(breakpoints[-1] - lam) <= tol

        p_values = [mpf(0), mpf(1)]
        for _ in range(i_lambda + 1):
            p_values.append(lam * p_values[-1] - p_values[-2])
        if degenerate:
            # P_{i+2} vanishes exactly at λ = 2cos(π/k), which forces P_{i+1} = 1
            p_values[i_lambda + 1] = mpf(1)
            p_values[i_lambda + 2] = mpf(0)

        ctx = LambdaContext(
            lam=lam,
            theta=mpmath.acos(lam / 2),
            i_lambda=i_lambda,
            breakpoints=tuple(breakpoints),
            ell_lambda=INF,
            p_values=tuple(p_values),
            degenerate=degenerate,
            nctx=nctx,
        )
        if not degenerate:
            ell = ctx.branch(i_lambda - 1).inverse()(lam)
            object.__setattr__(ctx, "ell_lambda", ell)

    log.debug(
        f"context lambda={mpmath.nstr(lam, 12)} i_lambda={i_lambda} "
        f"degenerate={degenerate}"
    )
    return ctx


@functools.lru_cache(maxsize=128)
def _lifted_context(lam: mpf, nctx: NumericContext) -> LambdaContext:
    return build_context(lam, nctx)


###
# Orbits
###


def _check_point(x: Real) -> mpf:
    x = as_real(x, "x")
    if x < 0:
        raise NegativeInput(f"x must be nonnegative, got {x}")
    return x


def _check_word(ctx: LambdaContext, word: Word) -> Tuple[int, ...]:
    digits = tuple(int(d) for d in word)
    for d in digits:
        if not 0 <= d <= ctx.i_lambda:
            raise InvalidDigits(f"digit {d} outside [0, {ctx.i_lambda}] in {digits}")
    return digits


def _step(ctx: LambdaContext, x: mpf) -> Tuple[mpf, int, bool]:
    digit, near = ctx.locate(x)
    if near:
        # T(m_j) = 0
        return mpf(0), digit, True
    image = ctx.branch(digit).inverse()(x)
    return max(image, mpf(0)), digit, False


def apply_T(ctx: LambdaContext, x: Real) -> Tuple[mpf, int]:
    """
    One step of T_λ.

    Returns:
        The image `h_i^{-1}(x)` and the digit `i` of the interval containing x

    Raises:
        NegativeInput: x < 0
        NonFinite: x is infinite or NaN
    """
    with ctx.nctx.workprec():
        image, digit, _ = _step(ctx, _check_point(x))
    return image, digit


def code_orbit(ctx: LambdaContext, x: Real, n: int) -> CodeSeq:
    """
    First `n` digits of the coding of x.

    The orbit is followed with enough guard bits for the horizon. Once it lands
    exactly on 0 it stays there, and the zero tail is flagged as the period.
    """
    if n < 1:
        raise OutOfRange(f"horizon must be positive, got {n}")

    with ctx.nctx.workprec(n, ctx.i_lambda + 2) as bits:
        point = _check_point(x)
        work = ctx.lifted(bits)
        digits: List[int] = []
        confidence = None
        zero_from = None
        for k in range(n):
            if point == 0:
                zero_from = k
                digits.extend([0] * (n - k))
                break
            point, digit, near = _step(work, point)
            if near and confidence is None:
                log.debug(f"orbit point {k} within boundary_tol of breakpoint {digit}")
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


def _upper_digit(ctx: LambdaContext, pole: mpf) -> Tuple[int, bool]:
    """Largest i with pole > m_i; a pole on m_j counts as below it"""
    if mpmath.isinf(pole):
        return ctx.i_lambda, False
    j = ctx.near_breakpoint(pole)
    if j is not None:
        return j - 1, True
    return bisect_left(ctx.breakpoints, pole) - 1, False


def _pole_state(matrix: Homography, tol: mpf) -> mpf:
    if matrix.c > -tol * abs(matrix.d):
        return INF
    return -matrix.d / matrix.c


def _recurrence(seen: List[Tuple[mpf, int]], pole: mpf, tol: mpf) -> Optional[int]:
    """Earliest step whose finite pole state matches `pole`"""
    pos = bisect_left(seen, (pole, -1))
    matches = [
        index
        for value, index in seen[max(0, pos - 1) : pos + 1]
        if abs(value - pole) <= tol * max(1, abs(pole))
    ]
    return min(matches) if matches else None


def omega_infinity(ctx: LambdaContext, n: int) -> CodeSeq:
    """
    First `n` digits of ω_λ(∞), the coding of the limit x -> ∞.

    The product `H = H_{∞_0} ... H_{∞_k}` is maintained and the next digit is
    the largest i whose breakpoint lies strictly below the pole `-δ/γ` of H
    (the pole is +∞ when γ = 0, which selects i_λ). The pole state determines
    all later digits, so a pole state seen before marks a period. The period
    is declared once the digits have repeated for one full period.

    Example::

        >>> from lbeta.lambda_dynamics import build_context, omega_infinity
        >>> str(omega_infinity(build_context(1), 6))
        '(1)'
    """
    if n < 1:
        raise OutOfRange(f"horizon must be positive, got {n}")

    with ctx.nctx.workprec(n, ctx.i_lambda + 2) as bits:
        work = ctx.lifted(bits)
        tol = work.nctx.boundary_tol
        matrix = Homography.identity()
        pole = INF
        digits: List[int] = []
        finite_poles: List[Tuple[mpf, int]] = []
        confidence = None
        candidate: Optional[Tuple[int, int]] = None
        period: Optional[Tuple[int, int]] = None

        while len(digits) < n or candidate is not None:
            digit, near = _upper_digit(work, pole)
            if near and confidence is None:
                confidence = len(digits)
            digits.append(digit)
            step = len(digits)

            if candidate is not None:
                start, length = candidate
                if digit != digits[step - 1 - length]:
                    log.warning(
                        f"period candidate ({start}, {length}) rejected at digit "
                        f"{step - 1} for lambda={mpmath.nstr(work.lam, 12)}"
                    )
                    candidate = None
                elif step >= start + 2 * length:
                    period = candidate
                    break

            matrix = matrix @ work.branch(digit)
            pole = _pole_state(matrix, tol)

            if candidate is None:
                if mpmath.isinf(pole):
                    candidate = (0, step)
                else:
                    earlier = _recurrence(finite_poles, pole, tol)
                    if earlier is not None:
                        candidate = (earlier, step - earlier)
                    insort(finite_poles, (pole, step))

    if period is not None:
        start, length = period
        stored = max(n, start + length)
        full = digits[: start + length]
        full += [full[start + (i - start) % length] for i in range(len(full), stored)]
        return CodeSeq(full, period_start=start, period_length=length)
    return CodeSeq(digits[:n], confidence=n if confidence is None else min(n, confidence))


def upper_branch(ctx: LambdaContext, n: int) -> List[Homography]:
    """The products H_{∞_0} ... H_{∞_k} for k < n along ω_λ(∞)"""
    omega = omega_infinity(ctx, n)
    matrices = []
    with ctx.nctx.workprec():
        matrix = Homography.identity()
        for digit in omega.take(n):
            matrix = matrix @ ctx.branch(digit)
            matrices.append(matrix)
    return matrices


def cross_check_omega_infinity(ctx: LambdaContext, n: int) -> OmegaCrossCheck:
    """
    ω_λ(∞) from the coding a_0 a_1 ... of λ itself: it is (a_0 + 1) a_1 a_2 ...
    unless the orbit of λ lands on a breakpoint at step j, in which case it is
    the periodic repetition of (a_0 + 1) a_1 ... a_{j-1} (a_j - 1).
    """
    orbit = code_orbit(ctx, ctx.lam, n)
    hit = orbit.confidence if (orbit.confidence or 0) < n else None
    if hit is not None and orbit.periodic and orbit.period_start == hit + 1:
        pattern = list(orbit.digits[: hit + 1])
        pattern[0] += 1
        pattern[hit] -= 1
        return OmegaCrossCheck(
            CodeSeq.periodic_word(pattern, n), orbit_hits_zero=True, hit_index=hit
        )

    digits = list(orbit.digits)
    digits[0] += 1
    return OmegaCrossCheck(
        CodeSeq(digits, confidence=orbit.confidence), orbit_hits_zero=False
    )


###
# Cylinders and matrices
###


def cylinder(ctx: LambdaContext, word: Word) -> Cylinder:
    """
    The interval of points whose coding starts with `word`, built inside out as
    `J = h_a(J ∩ dom h_a)`.

    Example::

        >>> from lbeta.lambda_dynamics import build_context, cylinder
        >>> c = cylinder(build_context(1), [1, 0])
        >>> (c.left, c.right)
        (mpf('1.0'), mpf('2.0'))
    """
    digits = _check_word(ctx, word)
    with ctx.nctx.workprec():
        left, right = mpf(0), INF
        for digit in reversed(digits):
            end = ctx.domain_end(digit)
            if left >= end:
                return Cylinder(mpf(0), mpf(0), empty=True)
            h = ctx.branch(digit)
            unbounded = right >= end
            new_left = h(left)
            if unbounded and digit == ctx.i_lambda:
                new_right = INF
            elif unbounded:
                new_right = h(INF)
            else:
                new_right = h(right)
            left, right = new_left, new_right
            if not left < right:
                return Cylinder(mpf(0), mpf(0), empty=True)
    return Cylinder(left, right)


def branch_matrix(ctx: LambdaContext, word: Word) -> Homography:
    """The product H_{a_0} ... H_{a_n}; the identity for the empty word"""
    digits = _check_word(ctx, word)
    with ctx.nctx.workprec():
        matrix = Homography.identity()
        for digit in digits:
            matrix = matrix @ ctx.branch(digit)
    return matrix


def standard_blocks(
    word: Word, omega: CodeSeq
) -> Tuple[List[Tuple[int, ...]], Tuple[int, ...]]:
    """
    Split a word into blocks `∞_0 ... ∞_{m-1} a_m` with `a_m < ∞_m`.

    Returns:
        The complete blocks and the trailing digits that are still a prefix of ω

    Raises:
        InvalidDigits: the word is not dominated by ω
    """
    digits = tuple(int(d) for d in word)
    limit = omega.available()
    blocks = []
    start = 0
    while start < len(digits):
        m = 0
        while start + m < len(digits):
            if limit is not None and m >= limit:
                return blocks, digits[start:]
            reference = omega.at(m)
            digit = digits[start + m]
            if digit > reference:
                raise InvalidDigits(
                    f"{digits} is not dominated by {omega} at position {start + m}"
                )
            if digit < reference:
                break
            m += 1
        else:
            return blocks, digits[start:]
        blocks.append(digits[start : start + m + 1])
        start += m + 1
    return blocks, ()


def lambda_admissible(
    ctx: LambdaContext, word: Word, omega: Optional[CodeSeq] = None
) -> Verdict:
    """
    Test whether a digit sequence is the coding of some orbit of T_λ: every
    shift must strictly precede ω_λ(∞).
    """
    code = word if isinstance(word, CodeSeq) else CodeSeq(tuple(word))
    _check_word(ctx, code.digits)
    if omega is None:
        omega = omega_infinity(ctx, max(len(code), ctx.nctx.horizon_default))
    return shift_verdict(code, omega)


###
# Geometry
###


def _geometry_state(ctx: LambdaContext, t0: mpf, t1: mpf) -> GeometryState:
    cos_t = ctx.lam / 2
    sin_t = mpmath.sin(ctx.theta)
    radius = mpmath.sqrt((t0**2 + t1**2 - 2 * t0 * t1 * cos_t) / sin_t**2)
    psi = mpmath.atan2((t1 - t0 * cos_t) / sin_t, t0)

    abscissae = [t0, t1]
    while abscissae[-1] >= 0:
        if len(abscissae) > ctx.i_lambda + 4:
            raise NonConvergence(
                f"rotation from ({t0}, {t1}) did not reach a negative abscissa"
            )
        abscissae.append(ctx.lam * abscissae[-1] - abscissae[-2])
    return GeometryState(radius, tuple(abscissae), ctx.theta, psi)


def radius_trace(ctx: LambdaContext, x: Real, n: int) -> List[GeometryState]:
    """
    Follow the orbit of x geometrically: x = t_1 / t_0 starting from t_0 = 1,
    rotate to the first negative abscissa t_{i+2} and restart from the pair
    (-t_{i+2}, t_{i+1}), which represents T_λ(x). The radius never increases.

    Returns:
        n + 1 states, the first for x itself
    """
    with ctx.nctx.workprec(n, ctx.i_lambda + 2) as bits:
        work = ctx.lifted(bits)
        t0, t1 = mpf(1), _check_point(x)
        states = [_geometry_state(work, t0, t1)]
        for _ in range(n):
            abscissae = states[-1].abscissae
            t0, t1 = -abscissae[-1], abscissae[-2]
            states.append(_geometry_state(work, t0, t1))
    return states


def radius_ratios(trace: Sequence[GeometryState]) -> List[mpf]:
    """Measured contraction R_{j+1} / R_j along a trace"""
    return [b.radius / a.radius for a, b in zip(trace, trace[1:])]

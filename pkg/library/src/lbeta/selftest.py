"""
Invariant checks run by `lbeta selftest`.

Each check draws its samples from a seeded `numpy` generator and raises
`CheckFailed` on the first violation. `run_selftest` runs the registered checks
and collects pass/fail details and wall-clock timings.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional

import mpmath
from mpmath import mpf
import numpy as np

from lbeta.beta_shift import o_beta_one, parry_admissible, s_beta
from lbeta.cf_expansion import coding_to_cf, eval_cf
from lbeta.correspondence import (
    DEFAULT_TOL,
    asymptotic_estimate,
    beta_of_lambda,
    curve_increases,
    curve_point,
    enumerate_lsm,
    minkowski_q,
    phi,
    point_at_lambda,
    succ_lsm,
)
from lbeta.lambda_dynamics import (
    apply_T,
    branch_matrix,
    build_context,
    code_orbit,
    cylinder,
    lambda_admissible,
    lambda_from_tau,
    omega_infinity,
    radius_trace,
    upper_branch,
)
from lbeta.logs import log
from lbeta.numerics import NumericContext, largest_real_root
from lbeta.timing import BasicTimer
from lbeta.words import Verdict, longest_run

NEAR_TERMINATING_RUN = 64
"""Codings with a longer block of zeros passed near a breakpoint and barely contract"""

MONOTONE_GRID = 200
"""Grid size on which adjacent gaps bound the continuity of the curve"""

STEP_GAP = mpf("0.15")
PLATEAU_GAP = mpf("1.05")


class CheckFailed(AssertionError):
    """An invariant did not hold"""


def expect(condition: bool, message: str):
    if not condition:
        raise CheckFailed(message)


CheckFunc = Callable[[NumericContext, np.random.Generator, bool], str]


@dataclass(frozen=True)
class Check:
    name: str
    func: CheckFunc
    quick: bool


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class SelfTestReport:
    passed: bool
    results: List[CheckResult] = field(default_factory=list)
    timings: Dict[str, Any] = field(default_factory=dict)

    @property
    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if not result.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": [asdict(result) for result in self.results],
            "timings": self.timings,
        }


REGISTRY: List[Check] = []


def check(name: str, quick: bool = True):
    """Register a check; `quick` checks also run under `--quick`"""

    def decorator(func: CheckFunc) -> CheckFunc:
        REGISTRY.append(Check(name, func, quick))
        return func

    return decorator


def _random_lambdas(rng: np.random.Generator, count: int, lo=0.5, hi=1.9):
    return [mpf(repr(float(v))) for v in rng.uniform(lo, hi, count)]


###
# Checkpoints
###


@check("closed_form")
def closed_form(nctx, rng, full):
    ks = range(3, 13) if full else range(3, 8)
    for k in ks:
        bctx = beta_of_lambda(build_context(lambda_from_tau(k, nctx), nctx))
        error = abs(bctx.beta - (k - 1))
        expect(error <= 1e-9, f"beta(2cos(pi/{k})) is off from {k - 1} by {error}")
    return f"beta(2cos(pi/k)) = k - 1 for k in {ks.start}..{ks.stop - 1}"


@check("root")
def root(nctx, rng, full):
    ks = range(2, 9) if full else range(2, 5)
    for k in ks:
        with nctx.workprec():
            lam = 1 / mpmath.sqrt(k)
        beta = beta_of_lambda(build_context(lam, nctx)).beta
        target = largest_real_root(k, mpf("1e-15"), nctx)
        error = abs(beta - target)
        expect(error <= 1e-9, f"beta(1/sqrt({k})) is off from the root by {error}")
    return f"beta(1/sqrt(k)) solves X^k - X^(k-1) - 1 for k in {ks.start}..{ks.stop - 1}"


@check("beta_of_one")
def beta_of_one(nctx, rng, full):
    beta = beta_of_lambda(build_context(1, nctx)).beta
    expect(abs(beta - 2) <= 1e-9, f"beta(1) = {beta}")
    return "beta(1) = 2"


@check("omega_structure")
def omega_structure(nctx, rng, full):
    cases = [(lambda_from_tau(5, nctx), "(3)"), (1, "(1)")]
    with nctx.workprec():
        cases.append((1 / mpmath.sqrt(2), "(10)"))
    for lam, expected in cases:
        found = str(omega_infinity(build_context(lam, nctx), 16))
        expect(found == expected, f"omega at lambda={lam} is {found}, not {expected}")
    for lam in _random_lambdas(rng, 20 if full else 5):
        ctx = build_context(lam, nctx)
        first = omega_infinity(ctx, 8)[0]
        expect(first == ctx.i_lambda, f"omega at lambda={lam} starts with {first}")
    return "periodic checkpoints and first digit i_lambda"


###
# Structure
###


@check("matrices")
def matrices(nctx, rng, full):
    count = 50 if full else 10
    for lam in _random_lambdas(rng, count, 0.2, 1.95):
        ctx = build_context(lam, nctx)
        tol = ctx.nctx.boundary_tol
        p = ctx.p_values
        with nctx.workprec():
            expect(
                all(p[i] > 0 for i in range(1, ctx.i_lambda + 2)),
                f"P_i not positive at lambda={lam}",
            )
            expect(p[ctx.i_lambda + 2] <= tol, f"P_(i+2) positive at lambda={lam}")
            expect(
                all(p[i] > 1 for i in range(2, ctx.i_lambda + 1)),
                f"P_i <= 1 inside the range at lambda={lam}",
            )
            bound = 1 / mpmath.sin(ctx.theta) + tol
            expect(all(abs(v) <= bound for v in p), f"|P_i| > 1/sin at lambda={lam}")

        word = [int(d) for d in rng.integers(0, ctx.i_lambda + 1, 12)]
        matrix = branch_matrix(ctx, word)
        products = upper_branch(ctx, 12)
        with nctx.workprec():
            det = matrix.det
            expect(abs(det - 1) <= 1e-20, f"det {det} for {word} at lambda={lam}")
            for a, b in zip(products, products[1:]):
                expect(b.d <= a.d + tol, f"delta increased along omega at lambda={lam}")
            expect(
                all(m.c <= tol for m in products),
                f"gamma positive along omega at lambda={lam}",
            )

        omega = omega_infinity(ctx, 12)
        for m in range(4):
            if omega.at(m) == 0:
                break
            last = int(rng.integers(0, omega.at(m)))
            block = list(omega.take(m)) + [last]
            entries = [v for row in branch_matrix(ctx, block).rows() for v in row]
            with nctx.workprec():
                expect(
                    all(v >= -tol for v in entries),
                    f"standard block {block} has a negative entry at lambda={lam}",
                )
    return f"sign lemma, bounds, det, delta and block signs on {count} values of lambda"


@check("geometry")
def geometry(nctx, rng, full):
    count = 100 if full else 10
    lambdas = _random_lambdas(rng, count, 0.2, 1.95)
    points = rng.uniform(0, 8, count)
    for lam, x in zip(lambdas, points):
        ctx = build_context(lam, nctx)
        trace = radius_trace(ctx, repr(float(x)), 50)
        code = code_orbit(ctx, repr(float(x)), 50)
        with nctx.workprec():
            for j, (a, b) in enumerate(zip(trace, trace[1:])):
                expect(
                    b.radius <= a.radius * (1 + mpf("1e-20")),
                    f"radius grew at step {j} for lambda={lam}, x={x}",
                )
        for j in range(min(code.confidence, 50)):
            expect(
                trace[j].digit == code[j],
                f"geometric digit {trace[j].digit} != {code[j]} at step {j}",
            )
    return f"radius non-increasing on {count} orbits of length 50"


@check("cf_round_trip")
def cf_round_trip(nctx, rng, full):
    count = 50 if full else 10
    for lam, x in zip(_random_lambdas(rng, count), rng.uniform(0, 6, count)):
        ctx = build_context(lam, nctx)
        code = code_orbit(ctx, repr(float(x)), 20)
        for k in (1, 5, 20):
            prefix = code.digits[:k]
            cf = coding_to_cf(prefix)
            expect(len(cf) == sum(prefix), f"digit count of {prefix} is {len(cf)}")
            value = eval_cf(lam, cf.digits, nctx=nctx)
            left = cylinder(ctx, prefix).left
            expect(
                abs(value - left) <= 1e-20,
                f"{cf} evaluates to {value}, cylinder starts at {left}",
            )
    return f"cylinder endpoints recovered on {count} codings"


@check("separation", quick=False)
def separation(nctx, rng, full):
    count = 50
    checked = 0
    for lam, x in zip(_random_lambdas(rng, count), rng.uniform(0.1, 5, count)):
        ctx = build_context(lam, nctx)
        code = code_orbit(ctx, repr(float(x)), 200)
        if code.periodic or longest_run(code.digits) > NEAR_TERMINATING_RUN:
            continue
        width = cylinder(ctx, code.digits).width
        expect(width < 1e-12, f"cylinder width {width} at lambda={lam}, x={x}")
        checked += 1
    return f"cylinders of length 200 below 1e-12 on {checked} orbits"


###
# Correspondence
###


@check("lsm_successor")
def lsm_successor(nctx, rng, full):
    longest = 6 if full else 4
    total = 0
    for length in range(1, longest + 1):
        words = enumerate_lsm(length, 4)
        for word, following in zip(words, words[1:]):
            found = succ_lsm(word.digits)
            expect(found == following, f"succ({word}) = {found}, expected {following}")
            total += 1
    return f"{total} successors match enumeration up to length {longest}"


@check("conjugacy")
def conjugacy(nctx, rng, full):
    count = 100 if full else 10
    for lam, x in zip(_random_lambdas(rng, count), rng.uniform(0, 6, count)):
        ctx = build_context(lam, nctx)
        bctx = beta_of_lambda(ctx)
        x = mpf(repr(float(x)))
        image, _ = apply_T(ctx, x)
        left = phi(ctx, bctx, image, 128).t
        right, _ = s_beta(bctx.beta, phi(ctx, bctx, x, 128).t, nctx)
        expect(
            abs(left - right) <= 1e-6,
            f"phi(T x) = {left}, S(phi x) = {right} at lambda={lam}, x={x}",
        )
    return f"phi conjugates T to S on {count} points"


@check("admissibility")
def admissibility(nctx, rng, full):
    count = 100 if full else 10
    for lam, x in zip(_random_lambdas(rng, count), rng.uniform(0, 6, count)):
        ctx = build_context(lam, nctx)
        bctx = beta_of_lambda(ctx)
        code = code_orbit(ctx, repr(float(x)), 64)
        # O_β(1) grows with β, so the upper end of the solver bracket cannot
        # reject a true greedy expansion
        with nctx.workprec():
            upper = bctx.beta + DEFAULT_TOL
        o_one = o_beta_one(upper, 128, nctx)
        expect(
            parry_admissible(code, o_one) is not Verdict.INADMISSIBLE,
            f"coding {code} is not a greedy expansion at lambda={lam}",
        )
        expect(
            lambda_admissible(ctx, code) is not Verdict.INADMISSIBLE,
            f"coding {code} has a shift beyond omega at lambda={lam}",
        )
    return f"codings admissible on {count} points"


@check("minkowski")
def minkowski(nctx, rng, full):
    count = 512 if full else 32
    ctx = build_context(1, nctx)
    bctx = beta_of_lambda(ctx)
    worst = mpf(0)
    with nctx.workprec():
        grid = [mpf(j) / (count - 1) for j in range(count)]
    for x in grid:
        error = abs(phi(ctx, bctx, x).t - minkowski_q(x, nctx=nctx) / 2)
        worst = max(worst, error)
        with nctx.workprec():
            outer = 1 / (1 - x * mpf("0.99"))
            inner = 1 - 1 / outer
        error = abs(phi(ctx, bctx, outer).t - (1 + minkowski_q(inner, nctx=nctx)) / 2)
        worst = max(worst, error)
    expect(worst <= 1e-8, f"phi_1 deviates from ?/2 by {worst}")
    return f"phi_1 = ?/2 on {count} points within {mpmath.nstr(worst, 3)}"


@check("asymptotic", quick=False)
def asymptotic(nctx, rng, full):
    for tau in ("20.3", "30.25", "40.4"):
        lam = lambda_from_tau(tau, nctx)
        ctx = build_context(lam, nctx)
        bctx = beta_of_lambda(ctx)
        estimate, bound = asymptotic_estimate(bctx.o_one)
        error = abs(bctx.beta - estimate)
        expect(error <= bound, f"beta at tau={tau} is {error} from k + j/k")
    return "beta within 1/k of k + j/k"


def _plateau_end(a: mpf, b: mpf) -> bool:
    """Whether a gap from `a` to `b` leaves or reaches an integer step"""
    near = [abs(v - mpmath.nint(v)) <= STEP_GAP for v in (a, b)]
    return any(near) or mpmath.ceil(a) <= mpmath.floor(b)


@check("monotone_curve")
def monotone_curve(nctx, rng, full):
    count = MONOTONE_GRID if full else 20
    lambdas = np.linspace(0.1, 1.95, count)
    points = [point_at_lambda(repr(float(v)), nctx=nctx) for v in lambdas]
    for a, b in zip(points, points[1:]):
        expect(
            curve_increases(a, b, nctx=nctx),
            f"beta does not increase between lambda={mpmath.nstr(a.lam, 8)} "
            f"and {mpmath.nstr(b.lam, 8)}",
        )
    with nctx.workprec():
        gaps = [(b.beta - a.beta, a, b) for a, b in zip(points, points[1:])]
        largest = max(gap for gap, _, _ in gaps)
        if count < MONOTONE_GRID:
            return f"strictly increasing on {count} points, largest gap {mpmath.nstr(largest, 4)}"
        for gap, a, b in gaps:
            where = f"between lambda={mpmath.nstr(a.lam, 8)} and {mpmath.nstr(b.lam, 8)}"
            expect(gap <= PLATEAU_GAP, f"beta jumps by {mpmath.nstr(gap, 4)} {where}")
            expect(
                gap <= STEP_GAP or _plateau_end(a.beta, b.beta),
                f"beta jumps by {mpmath.nstr(gap, 4)} away from a step {where}",
            )
    return (
        f"strictly increasing on {count} points, gaps within {STEP_GAP} "
        f"off the steps, largest gap {mpmath.nstr(largest, 4)}"
    )


@check("curve_integers", quick=False)
def curve_integers(nctx, rng, full):
    for k in (6, 11):
        point = curve_point(k, nctx=nctx)
        expect(abs(point.beta - (k - 1)) <= 1e-9, f"beta at tau={k} is {point.beta}")
    return "curve rows at integer tau sit on the steps"


def run_selftest(
    nctx: Optional[NumericContext] = None, quick: bool = False, seed: int = 0
) -> SelfTestReport:
    """
    Run the registered checks, each with its own generator seeded from `seed`.

    Any exception inside a check, not only `CheckFailed`, marks it failed.
    """
    nctx = nctx or NumericContext()
    timer = BasicTimer()
    results = []
    for index, item in enumerate(REGISTRY):
        if quick and not item.quick:
            continue
        rng = np.random.default_rng(seed + index)
        with timer.measure(item.name):
            try:
                detail = item.func(nctx, rng, not quick)
                results.append(CheckResult(item.name, True, detail))
            except Exception as err:
                log.warning(f"check {item.name} failed: {err}")
                results.append(
                    CheckResult(item.name, False, f"{type(err).__name__}: {err}")
                )
        log.log("METRIC", f"check {item.name} passed={results[-1].passed}")

    report = SelfTestReport(
        passed=all(result.passed for result in results),
        results=results,
        timings=timer.results(),
    )
    log.info(f"{len(results) - len(report.failures)} of {len(results)} checks passed")
    return report

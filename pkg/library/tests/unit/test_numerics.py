import doctest

from hypothesis import given, settings
from hypothesis import strategies as st
import mpmath
from mpmath import mpf
import pytest

from lbeta.errors import (
    InvalidDegree,
    NoSignChange,
    NonConvergence,
    NonFinite,
    OutOfRange,
    PreconditionError,
)
import lbeta.numerics
from lbeta.numerics import (
    DEFAULT_PRECISION_BITS,
    Bracket,
    NumericContext,
    as_real,
    bisect,
    largest_real_root,
    sign,
    solve_monotone,
)

pytestmark = pytest.mark.unit

TOL = mpf("1e-30")


def test_docstrings():
    results = doctest.testmod(lbeta.numerics)
    assert results.failed == 0


###
# NumericContext
###


def test_context_defaults(monkeypatch):
    monkeypatch.delenv("LB_PRECISION_BITS", raising=False)
    nctx = NumericContext()
    assert nctx.precision_bits == DEFAULT_PRECISION_BITS
    assert nctx.boundary_tol == mpmath.ldexp(1, -96)
    assert nctx.horizon_default == 128


def test_context_reads_environment(monkeypatch):
    monkeypatch.setenv("LB_PRECISION_BITS", "256")
    assert NumericContext().precision_bits == 256


def test_context_rejects_bad_environment(monkeypatch):
    monkeypatch.setenv("LB_PRECISION_BITS", "many")
    with pytest.raises(OutOfRange):
        NumericContext()


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(precision_bits=32),
        dict(precision_bits=128, boundary_tol=0),
        dict(precision_bits=128, boundary_tol="0.5"),
        dict(precision_bits=128, horizon_default=0),
    ],
)
def test_context_validation(kwargs):
    with pytest.raises(PreconditionError):
        NumericContext(**kwargs)


def test_degraded_context_warns(caplog):
    nctx = NumericContext.degraded(16)
    assert nctx.precision_bits == 16
    assert not nctx.adaptive
    assert "degraded precision" in caplog.text


def test_workprec_adds_guard_bits():
    nctx = NumericContext(precision_bits=128)
    with nctx.workprec() as bits:
        assert bits == 128
        assert mpmath.mp.prec == 128
    with nctx.workprec(horizon=100, growth=4) as bits:
        assert bits == 128 + 200 + 32
        assert mpmath.mp.prec == bits


def test_workprec_without_adaptive():
    nctx = NumericContext(precision_bits=128, adaptive=False)
    assert nctx.working_bits(horizon=100, growth=4) == 128


def test_workprec_restores_precision():
    before = mpmath.mp.prec
    with NumericContext(precision_bits=300).workprec():
        pass
    assert mpmath.mp.prec == before


def test_with_precision_keeps_tolerance():
    nctx = NumericContext(precision_bits=128)
    lifted = nctx.with_precision(512)
    assert lifted.precision_bits == 512
    assert lifted.boundary_tol == nctx.boundary_tol


###
# helpers
###


@pytest.mark.parametrize("value", ["nan", "inf", "-inf", "abc", None])
def test_as_real_rejects(value):
    with pytest.raises(NonFinite):
        as_real(value)


def test_as_real_accepts_strings():
    with NumericContext().workprec():
        assert as_real("0.1") == mpf("0.1")


@pytest.mark.parametrize("x,expected", [(mpf(-2), -1), (mpf(0), 0), (mpf("1e-50"), 1)])
def test_sign(x, expected):
    assert sign(x) == expected


###
# Bracket and bisect
###


def test_bracket_requires_order():
    with pytest.raises(OutOfRange):
        Bracket(mpf(1), mpf(0), -1, 1)


def test_bracket_requires_sign_change():
    with pytest.raises(NoSignChange):
        Bracket.of(lambda x: x * x + 1, 0, 1)


def test_bracket_rejects_zero_at_end():
    with pytest.raises(NoSignChange):
        Bracket.of(lambda x: x, 0, 1)


@pytest.mark.parametrize(
    "f,lo,hi,expected",
    [
        (lambda x: x - 1, 0, 2, "1"),
        (lambda x: x**2 - x - 1, 1, 2, "1.6180339887498948482"),
        (lambda x: x**3 - x**2 - 1, 1, 2, "1.4655712318767680267"),
        (lambda x: 1 - x, 0, 3, "1"),
    ],
)
def test_bisect_examples(f, lo, hi, expected):
    with NumericContext().workprec():
        root = bisect(f, Bracket.of(f, lo, hi), TOL)
        assert abs(root - mpf(expected)) <= mpf("1e-19")


def test_bisect_iteration_cap():
    f = lambda x: x - mpf(1) / 3  # noqa: E731
    with NumericContext().workprec():
        with pytest.raises(NonConvergence):
            bisect(f, Bracket.of(f, 0, 1), TOL, max_iter=5)


def test_bisect_precision_exhausted():
    with mpmath.workprec(256):
        third = mpf(1) / 3

    def f(x):
        return x - third

    with mpmath.workprec(64):
        with pytest.raises(NonConvergence):
            bisect(f, Bracket.of(f, 0, 1), mpf("1e-40"))


def test_bisect_ftol_exits_early():
    f = lambda x: x - mpf(1) / 3  # noqa: E731
    with NumericContext().workprec():
        root = bisect(f, Bracket.of(f, 0, 1), TOL, ftol=mpf("0.1"))
        assert abs(root - mpf(1) / 3) <= mpf("0.1")
        assert root == mpf("0.5") or root == mpf("0.25")


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-10, max_value=10, allow_nan=False))
def test_bisect_brackets_the_root(target):
    def f(x):
        return x - target

    with NumericContext().workprec():
        tol = mpf("1e-20")
        root = bisect(f, Bracket.of(f, -11, 11), tol)
        assert f(root - tol) <= 0 <= f(root + tol)


def test_solve_monotone_accepts_root_at_end():
    with NumericContext().workprec():
        assert solve_monotone(lambda x: x - 2, 0, 2, TOL) == 2
        assert solve_monotone(lambda x: x, 0, 2, TOL) == 0


###
# largest_real_root
###


@pytest.mark.parametrize(
    "k,expected",
    [(2, "1.6180339887498948482"), (3, "1.4655712318767680267")],
)
def test_largest_real_root_checkpoints(k, expected):
    root = largest_real_root(k, TOL)
    assert abs(root - mpf(expected)) <= mpf("1e-19")


def test_largest_real_root_degree_eight():
    assert 1 < largest_real_root(8, TOL) < mpf("1.24")


def test_largest_real_root_decreases():
    roots = [largest_real_root(k, TOL) for k in range(2, 13)]
    assert all(a > b for a, b in zip(roots, roots[1:]))


@pytest.mark.parametrize("k", [1, 0, -3, 2.5])
def test_largest_real_root_rejects_degree(k):
    with pytest.raises(InvalidDegree):
        largest_real_root(k, TOL)

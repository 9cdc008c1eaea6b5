from mpmath import mpf
import numpy as np
import pytest

from lbeta.numerics import NumericContext
import lbeta.selftest as selftest

pytestmark = pytest.mark.unit


def _run_check(name, nctx, full=False, seed=0):
    # same generator as run_selftest draws for this check
    index, item = next(
        (index, item) for index, item in enumerate(selftest.REGISTRY) if item.name == name
    )
    return item.func(nctx, np.random.default_rng(seed + index), full)


def test_registry():
    names = [item.name for item in selftest.REGISTRY]
    assert len(names) == len(set(names))
    assert {"closed_form", "root", "conjugacy", "monotone_curve"} <= set(names)
    quick = {item.name for item in selftest.REGISTRY if item.quick}
    assert {"closed_form", "root"} <= quick
    assert "separation" not in quick


def test_expect():
    selftest.expect(True, "unused")
    with pytest.raises(selftest.CheckFailed, match="broken"):
        selftest.expect(False, "broken")


@pytest.mark.parametrize(
    "name", ["closed_form", "beta_of_one", "omega_structure", "lsm_successor", "minkowski"]
)
def test_quick_checks_pass(nctx, name):
    assert isinstance(_run_check(name, nctx), str)


def test_failures_are_collected(monkeypatch):
    def broken(nctx, rng, full):
        raise ArithmeticError("no root")

    registry = [selftest.Check("broken", broken, True), selftest.REGISTRY[0]]
    monkeypatch.setattr(selftest, "REGISTRY", registry)
    report = selftest.run_selftest(NumericContext(precision_bits=128), quick=True)

    assert not report.passed
    assert [r.name for r in report.failures] == ["broken"]
    assert report.failures[0].detail == "ArithmeticError: no root"
    assert set(report.timings) == {"broken", registry[1].name}
    assert report.to_dict()["checks"][0] == {
        "name": "broken",
        "passed": False,
        "detail": "ArithmeticError: no root",
    }


def test_quick_skips_full_checks(monkeypatch):
    calls = []

    def record(nctx, rng, full):
        calls.append(full)
        return "ok"

    registry = [selftest.Check("quick", record, True), selftest.Check("full", record, False)]
    monkeypatch.setattr(selftest, "REGISTRY", registry)

    assert selftest.run_selftest(quick=True).passed
    assert calls == [False]
    assert [r.name for r in selftest.run_selftest().results] == ["quick", "full"]
    assert calls == [False, True, True]


@pytest.mark.slow
def test_quick_selftest_passes():
    report = selftest.run_selftest(NumericContext(precision_bits=192), quick=True)
    assert report.passed, report.failures


@pytest.mark.slow
@pytest.mark.parametrize(
    "name", ["matrices", "separation", "asymptotic", "curve_integers", "monotone_curve"]
)
def test_full_checks_pass(nctx, name):
    assert isinstance(_run_check(name, nctx, full=True), str)


def test_plateau_end():
    assert selftest._plateau_end(mpf("4.98"), mpf("5.99"))
    assert selftest._plateau_end(mpf("4.5"), mpf("5.4"))
    assert not selftest._plateau_end(mpf("4.3"), mpf("4.7"))


@pytest.mark.slow
def test_full_selftest_passes():
    report = selftest.run_selftest(NumericContext(precision_bits=192))
    assert report.passed, report.failures
    assert len(report.results) == len(selftest.REGISTRY)


@pytest.mark.slow
def test_degraded_precision_fails():
    report = selftest.run_selftest(NumericContext.degraded(16), quick=True)
    assert not report.passed

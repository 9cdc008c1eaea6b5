import datetime

import pytest

from lbeta import logs
from lbeta.lambda_dynamics import build_context, code_orbit
from lbeta.logs import log

# test the loguru based logs module for proper pytest caplog behavior
# there is a modified caplog fixture in conftest.py

pytestmark = pytest.mark.unit


def function_that_warns():
    log.warning("this is a wally warning")


def function_that_errors():
    log.error("this is a wally error")


@pytest.fixture(autouse=True)
def restore_filters():
    yield
    logs.reset_filters()


def test_warns_function(caplog):
    function_that_warns()
    # because we known function that warns only makes one log message we know
    # that all records should be WARNING
    for record in caplog.records:
        assert record.levelname == "WARNING"
    assert "wally" in caplog.text
    assert "this is a wally warning" in caplog.text


def test_error_function(caplog):
    function_that_errors()
    for record in caplog.records:
        assert record.levelname == "ERROR"
    assert "wally" in caplog.text


def test_update_filters_bare_level_applies_to_lbeta():
    logs.update_filters(["debug"])
    assert logs.filters["lbeta"] == "DEBUG"
    assert logs.is_debug()


def test_update_filters_module_spec():
    logs.update_filters(["mpmath:error"])
    assert logs.filters["mpmath"] == "ERROR"
    assert logs.filters["lbeta"] == "INFO"


def test_update_filters_ignores_unknown_level(caplog):
    logs.update_filters(["lbeta:chatty"])
    assert logs.filters["lbeta"] == "INFO"
    assert "unknown log level" in caplog.text


def test_progress_follows_lbeta_level():
    assert not logs.is_progress()
    logs.update_filters(["progress"])
    assert logs.is_progress()


def test_reset_filters():
    logs.update_filters(["lbeta:trace", "numpy:debug"])
    logs.reset_filters()
    assert logs.filters == logs.default_message_filters


@pytest.mark.parametrize(
    "seconds,expected",
    [(0, "0s"), (5, "5s"), (125, "2m5s"), (3 * 3600 + 7, "3h7s")],
)
def test_duration_string(seconds, expected):
    assert logs.duration_string(datetime.timedelta(seconds=seconds)) == expected


def test_log_method_logs_entry_and_exit(caplog):
    @logs.log_method(level="WARNING")
    def double(x):
        return 2 * x

    assert double(21) == 42
    assert "Entering 'double'" in caplog.text
    assert "Exiting 'double' (result=42)" in caplog.text


def test_breakpoint_hit_is_logged(caplog):
    logs.update_filters(["debug"])
    ctx = build_context(1)
    code_orbit(ctx, 1, 4)
    assert "within boundary_tol of breakpoint 1" in caplog.text

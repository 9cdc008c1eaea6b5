import numpy as np
import pytest

from lbeta.lambda_dynamics import build_context
from lbeta.logs import log
from lbeta.numerics import NumericContext
import lbeta.track


@pytest.fixture
def caplog(caplog):
    # loguru does not go through the logging module, so route its records to
    # the handler pytest listens on
    handler_id = log.add(caplog.handler, format="{message}", level=0)
    yield caplog
    log.remove(handler_id)


@pytest.fixture
def nctx():
    return NumericContext(precision_bits=192)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ctx_one(nctx):
    return build_context(1, nctx)


@pytest.fixture
def ctx_three_halves(nctx):
    return build_context("1.5", nctx)


@pytest.fixture
def reset_params():
    lbeta.track.reset_params()
    yield
    lbeta.track.reset_params()

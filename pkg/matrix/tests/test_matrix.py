import doctest
import os
import threading
import time

import pytest

from lbeta.matrix import Matrix, matrix
import lbeta.matrix.matrix_generation

pytestmark = pytest.mark.unit


def _square_with_pid(x):
    # module level so that process workers can unpickle it
    return x * x, os.getpid()


def _fail_on_three(x):
    if x == 3:
        raise ArithmeticError(x)
    return x


def test_docstrings():
    results = doctest.testmod(lbeta.matrix.matrix_generation)
    assert results.attempted > 0
    assert results.failed == 0


def test_grid_rows():
    @matrix(k=[3, 4], n=[8, 16])
    def horizon(k, n):
        return k * n

    assert horizon.num_rows == 4
    assert list(horizon.matrix) == [
        {"k": 3, "n": 8},
        {"k": 3, "n": 16},
        {"k": 4, "n": 8},
        {"k": 4, "n": 16},
    ]
    assert horizon() == [24, 48, 32, 64]


def test_fixed_value():
    @matrix(k=5, n=range(1, 7, 2))
    def horizon(k, n):
        return k * n

    assert horizon() == [5, 15, 25]


def test_shared_arguments():
    @matrix(k=range(3, 6))
    def shifted(offset, k, scale):
        return scale * k - offset

    assert all(isinstance(r, TypeError) for r in shifted())
    assert shifted(2, scale=10) == [28, 38, 48]


def test_exceptions_in_place():
    err = ValueError()

    @matrix(k=range(5))
    def reject_even(k):
        if k % 2 == 0:
            raise err
        return k

    assert reject_even() == [err, 1, err, 3, err]


def test_override():
    @matrix(k=[3, 4], n=[1, 2])
    def horizon(k, n):
        return k * n

    assert horizon.override(k=10)() == [10, 20]


@pytest.mark.parametrize(
    "start,stop,step,expected",
    [
        (None, None, None, ["ad", "ae", "af", "bd", "be", "bf", "cd", "ce", "cf"]),
        (0, None, 2, ["ad", "af", "be", "cd", "cf"]),
        (1, None, 2, ["ae", "bd", "bf", "ce"]),
        (2, None, 3, ["af", "bf", "cf"]),
        (3, None, 4, ["bd", "ce"]),
        (4, None, 5, ["be"]),
        (5, None, 6, ["bf"]),
        (None, None, 3, ["ad", "bd", "cd"]),
        (0, 6, 2, ["ad", "af", "be"]),
        (2, 6, 2, ["af", "be"]),
        (2, 6, None, ["af", "bd", "be", "bf"]),
    ],
)
def test_partition(start, stop, step, expected):
    @matrix(x="abc", y="def")
    def concat(x, y):
        return f"{x}{y}"

    assert concat[start:stop:step]() == expected


def test_filter():
    @matrix(k=[2, 3], n=[2, 3], m=[0, 1])
    def label(k, n, m):
        return f"{k}{n}{m}"

    assert label.filter(lambda k, n, m: n > k or m == 1)() == [
        "220",
        "320",
        "330",
    ]


def test_dependent_axes():
    def horizons(k):
        return range(k, 5)

    def offsets(k, n):
        return [0, n - k] if n > k else 0

    @matrix(k=[3, 4], n=horizons, m=offsets)
    def label(k, n, m):
        return f"{k}{n}{m}"

    assert label() == ["330", "340", "341", "440"]


def test_parallel_threads():
    @matrix(x="abc", y="def")
    def thread_id(x, y):
        time.sleep(0.01)
        return threading.get_ident()

    ids = set(thread_id.parallel(2)())
    assert threading.get_ident() not in ids
    assert len(ids) == 2


def test_parallel_keeps_row_order():
    @matrix(k=range(8))
    def slow_first(k):
        time.sleep(0.01 * (8 - k))
        return k

    assert slow_first.parallel(4)() == list(range(8))


def test_parallel_shared_arguments_and_override():
    @matrix(k=range(1, 4))
    def shifted(offset, k, scale):
        return scale * k - offset

    assert shifted.parallel(2)(2, scale=10) == [8, 18, 28]
    assert shifted.override(k=[5]).parallel(2)(2, scale=10) == [48]


def test_parallel_partition_and_filter():
    @matrix(x="abc", y="def")
    def concat(x, y):
        return f"{x}{y}"

    assert concat[1::3].parallel(2)() == ["ae", "be", "ce"]
    assert concat.filter(lambda x, y: x != "a").parallel(3)() == ["ad", "ae", "af"]


def test_parallel_progress():
    finished = []

    @matrix(k=range(6))
    def identity(k):
        return k

    assert identity.parallel(3, progress=finished.append)() == list(range(6))
    assert finished == [1] * 6


def test_parallel_processes():
    grid = Matrix(_square_with_pid, kwargs=dict(x=range(6)))
    results = grid.parallel(2, executor="process")()

    assert [value for value, _ in results] == [0, 1, 4, 9, 16, 25]
    assert os.getpid() not in {pid for _, pid in results}


def test_parallel_process_exceptions():
    grid = Matrix(_fail_on_three, kwargs=dict(x=range(5)))
    results = grid.parallel(2, executor="process")()

    assert results[:3] == [0, 1, 2]
    assert isinstance(results[3], ArithmeticError)
    assert results[4] == 4


def test_parallel_timeout():
    @matrix(k=[0, 1])
    def stall(k):
        time.sleep(0.5 * k)
        return k

    results = stall.parallel(2, timeout=0.1)()
    assert results[0] == 0
    assert isinstance(results[1], Exception)


def test_unknown_executor():
    @matrix(k=[1])
    def identity(k):
        return k

    with pytest.raises(ValueError):
        identity.parallel(1, executor="fiber")

"""Parameter grids: evaluate a function on every row of a cartesian product"""

import concurrent.futures
from copy import deepcopy
from typing import (
    Any,
    Callable,
    Dict,
    Generic,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
    Union,
)

# ParamSpec only reached the builtin `typing` in Python 3.10
from typing_extensions import Literal, ParamSpec

Executor = Literal["thread", "process"]


def product(
    prior: Dict[str, Any], remaining: List[Tuple[str, Any]]
) -> Iterable[Mapping[str, Any]]:
    """
    Cartesian product of parameter values, depth first.

    A callable in place of a value range is called with the parameters chosen
    so far and returns the range for its own key, so one axis may depend on
    another. A non-iterable value is a single fixed value; a string is
    iterated like any other sequence.

    Args:
        prior: Parameters chosen so far
        remaining: Remaining (key, values) pairs

    Yields:
        One parameter mapping per row
    """
    if not remaining:
        yield prior
        return

    key, values = remaining[0]
    if callable(values):
        values = values(**prior)
    if not isinstance(values, Iterable):
        values = [values]
    for value in values:
        row = dict(prior)
        row[key] = value
        yield from product(row, remaining[1:])


def is_in_partition(index: int, partition: slice) -> bool:
    """True when row `index` belongs to the slice"""
    if partition.start is not None and index < partition.start:
        return False
    if partition.stop is not None and index >= partition.stop:
        return False
    if partition.step is not None:
        return (index % partition.step) == ((partition.start or 0) % partition.step)
    return True


def create_matrix(
    partition: Optional[slice] = None,
    filter: Optional[Callable[..., bool]] = None,
):
    """
    Build a row generator over the cartesian product of keyword value ranges.

    Example::

        >>> from lbeta.matrix import create_matrix
        >>> list(create_matrix()(tau=[3.0, 4.0], tol=[1e-8]))
        [{'tau': 3.0, 'tol': 1e-08}, {'tau': 4.0, 'tol': 1e-08}]
        >>> list(create_matrix(slice(1, None, 2))(k=[3, 4, 5, 6]))
        [{'k': 4}, {'k': 6}]
        >>> list(create_matrix(None, lambda k, n: n > k)(k=[2, 3], n=[2, 3]))
        [{'k': 2, 'n': 2}, {'k': 3, 'n': 2}, {'k': 3, 'n': 3}]
        >>> list(create_matrix()(k=[2, 3], n=lambda k: range(k, 4)))
        [{'k': 2, 'n': 2}, {'k': 2, 'n': 3}, {'k': 3, 'n': 3}]

    Args:
        partition: Slice of the rows to keep, counted after filtering
        filter: Predicate on a row; rows for which it returns True are dropped

    Returns:
        A function of keyword value ranges yielding one mapping per row
    """

    def _generate(**kwargs) -> Iterable[Mapping[str, Any]]:
        index = 0
        for params in product({}, list(kwargs.items())):
            if filter is not None and filter(**params):
                continue
            if partition is None or is_in_partition(index, partition):
                yield params
            index += 1

    return _generate


P = ParamSpec("P")
T = TypeVar("T")


class Matrix(Generic[P, T]):
    """
    A function bound to a grid of keyword arguments. Calling it evaluates the
    function once per row and returns the results in row order, with any
    exception raised by a row in place of its result.

    Usually created with the `matrix` decorator. For the process executor the
    function and every argument must be picklable, so the function has to be
    defined at module level; `Matrix(func, kwargs=...)` serves that case.
    """

    def __init__(
        self,
        func: Callable[P, T],
        kwargs: Dict,
        partition: Optional[slice] = None,
        filter: Optional[Callable[P, bool]] = None,
    ):
        self.func = func
        self.kwargs = kwargs
        self._partition = partition
        self._filter = filter

    @property
    def matrix(self):
        """The rows of the grid"""
        return create_matrix(
            partition=self._partition,
            filter=self._filter,
        )(**self.kwargs)

    @property
    def num_rows(self):
        return sum(1 for _ in self.matrix)

    def _calls(self, args, kwargs):
        for row in self.matrix:
            row_kwargs = deepcopy(kwargs)
            row_kwargs.update(row)
            yield deepcopy(args), row_kwargs

    def __call__(self, *args, **kwargs) -> Sequence[Union[T, Exception]]:
        """
        Evaluate every row serially. Positional arguments and extra keyword
        arguments are passed to every call; row values take precedence.
        """
        results: List[Union[T, Exception]] = []
        for row_args, row_kwargs in self._calls(args, kwargs):
            try:
                results.append(self.func(*row_args, **row_kwargs))
            except Exception as err:
                results.append(err)
        return results

    def override(self, **kwargs):
        """A copy with some value ranges replaced"""
        new_kwargs = deepcopy(self.kwargs)
        new_kwargs.update(kwargs)
        return Matrix(
            self.func,
            kwargs=new_kwargs,
            partition=self._partition,
            filter=self._filter,
        )

    def __getitem__(self, partition: slice) -> "Matrix[P, T]":
        """A copy restricted to a slice of the rows"""
        return Matrix(
            self.func,
            kwargs=deepcopy(self.kwargs),
            partition=partition,
            filter=self._filter,
        )

    def filter(self, filter: Optional[Callable[P, bool]]):
        """A copy that drops the rows for which `filter` returns True"""
        return Matrix(
            self.func,
            kwargs=deepcopy(self.kwargs),
            partition=self._partition,
            filter=filter,
        )

    def parallel(
        self,
        max_workers: Optional[int],
        timeout: Optional[float] = None,
        executor: Executor = "thread",
        progress: Optional[Callable[[int], Any]] = None,
    ):
        """
        Evaluate the rows on a pool of workers.

        Example::

            @matrix(tau=frange(3, 13, 0.5))
            def point(tau, tol):
                ...

            point.parallel(4, executor="process")(tol=1e-10)

        Args:
            max_workers: Pool size, None for the executor default
            timeout: Seconds to wait for all rows, None for no limit
            executor: "thread", or "process" for work that holds global state
                (such as arbitrary precision settings) or is CPU bound
            progress: Called with the number of finished rows (1) each time a
                row completes

        Returns:
            A function taking the extra call arguments and returning the
            results in row order
        """
        if executor == "thread":
            pool_type = concurrent.futures.ThreadPoolExecutor
        elif executor == "process":
            pool_type = concurrent.futures.ProcessPoolExecutor
        else:
            raise ValueError(f"executor must be 'thread' or 'process', got {executor!r}")

        def _run(*args, **kwargs):
            with pool_type(max_workers=max_workers) as pool:
                futures = [
                    pool.submit(self.func, *row_args, **row_kwargs)
                    for row_args, row_kwargs in self._calls(args, kwargs)
                ]
                try:
                    for _ in concurrent.futures.as_completed(futures, timeout):
                        if progress is not None:
                            progress(1)
                except concurrent.futures.TimeoutError:
                    pass

                results: List[Union[T, Exception]] = []
                for future in futures:
                    if not future.done():
                        future.cancel()
                        results.append(
                            concurrent.futures.TimeoutError(
                                f"row not finished within {timeout} seconds"
                            )
                        )
                        continue
                    try:
                        results.append(future.result())
                    except Exception as err:
                        results.append(err)
                return results

        return _run


def matrix(**kwargs):
    """
    Decorator binding a function to a grid of keyword arguments.

    Example::

        >>> from lbeta.matrix import matrix

        >>> @matrix(k=range(3, 8))
        ... def degree(k, offset):
        ...    return k - offset

        >>> degree(offset=2)
        [1, 2, 3, 4, 5]

        >>> degree.filter(lambda k: k % 2 == 0)(offset=2)
        [1, 3, 5]

        >>> degree[0::2](offset=2)
        [1, 3, 5]
        >>> degree[1::2](offset=2)
        [2, 4]

        >>> degree.override(k=range(10, 12))(offset=2)
        [8, 9]

    Args:
        **kwargs: Value ranges (iterables, single values, or callables of the
            preceding parameters)

    Returns:
        Decorator wrapping a function in a `Matrix`
    """

    def decorator(func: Callable[..., T]):
        return Matrix(func, kwargs=kwargs)

    return decorator

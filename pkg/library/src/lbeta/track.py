"""
Parameter tracking for reproducible results.

Every number the `lbeta` command prints is accompanied by the parameters that
produced it (precision, tolerances, horizons, command arguments). Those are
recorded here while the command runs and embedded as `"metadata"` in its
output.
"""

from contextlib import contextmanager
from copy import deepcopy
from functools import wraps
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar, overload

import mpmath

# ParamSpec only reached the builtin `typing` in Python 3.10
from typing_extensions import ParamSpec

from lbeta.logs import log
from lbeta.numerics import NumericContext

# A stack of parameter stores; the first entry is the implicit global store and
# `tracking_context` pushes the others. Parameters always go to the top store.
_params_stack: List[Dict[str, Any]] = []


def get_current_params() -> Dict[str, Any]:
    """The parameters of the current tracking context"""
    if len(_params_stack) == 0:
        _params_stack.append({})
    return _params_stack[-1]


def track_param(key: str, value: Any):
    """
    Record a parameter in the current tracking context.

    Example::

        from lbeta.track import track_param

        track_param("tol", 1e-10)

    Args:
        key: Parameter name; recording it twice overwrites with a warning
        value: Parameter value
    """
    params = get_current_params()
    if key in params:
        log.warning(
            f"Parameter {key} is already tracked as {params[key]} and is "
            f"overwritten with {value}. Use a unique key or a new "
            "`tracking_context` to avoid this warning."
        )
    params[key] = value


def track_numeric_context(nctx: NumericContext):
    """Record the precision settings every result depends on"""
    track_param("precision_bits", nctx.precision_bits)
    track_param("boundary_tol", nctx.boundary_tol)
    track_param("adaptive", nctx.adaptive)


def reset_params():
    """Clear the current tracking context"""
    get_current_params().clear()


@contextmanager
def tracking_context(nested: bool = False):
    """
    Isolate the parameters recorded inside the block. They are discarded when
    the block exits.

    Example::

        from lbeta.track import tracking_context, track_param

        with tracking_context():
            track_param("n", 128)

    Args:
        nested: Start from a copy of the enclosing context's parameters
    """
    new_context = deepcopy(get_current_params()) if nested else {}
    _params_stack.append(new_context)
    try:
        yield
    finally:
        _params_stack.pop()


def jsonable(value: Any) -> Any:
    """
    Convert a tracked value for JSON output: mpf to float, infinities to the
    string "inf", tuples to lists.
    """
    if isinstance(value, mpmath.mpf):
        if mpmath.isinf(value):
            return "inf" if value > 0 else "-inf"
        return float(value)
    if isinstance(value, float) and value in (float("inf"), float("-inf")):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


def metadata() -> Dict[str, Any]:
    """The current parameters, ready for JSON"""
    return jsonable(get_current_params())


P = ParamSpec("P")
T = TypeVar("T")


@overload
def track_params(
    *,
    prefix: Optional[str] = None,
    ignore: Optional[Sequence[str]] = None,
) -> Callable[[Callable[P, T]], Callable[P, T]]: ...


@overload
def track_params(
    _func: Callable[P, T],
    *,
    prefix: Optional[str] = None,
    ignore: Optional[Sequence[str]] = None,
) -> Callable[P, T]: ...


def track_params(
    _func: Optional[Callable] = None,
    *,
    prefix: Optional[str] = None,
    ignore: Optional[Sequence[str]] = None,
):
    """
    Decorator recording the keyword arguments of every call as
    `<prefix>.<name>` parameters.

    Example::

        from lbeta.track import track_params

        @track_params(prefix="scan", ignore=["out"])
        def run_scan(tau_min, tau_max, step, out):
            ...

        # inline, for a function that cannot be decorated
        track_params(beta_of_lambda)(ctx, tol=1e-10)

    Args:
        _func: Function to decorate directly
        prefix: Key prefix, the function name by default
        ignore: Keyword arguments not to record

    Returns:
        The decorated function when `_func` is given, else a decorator
    """

    def _decorator(func: Callable[P, T]) -> Callable[P, T]:
        @wraps(func)
        def _wrapper(*args: P.args, **kwargs: P.kwargs) -> T:
            _prefix = prefix if prefix else func.__name__
            params = get_current_params()

            if f"{_prefix}._func" in params:
                log.warning(
                    f"Parameters with prefix {_prefix} are already tracked and are "
                    "overwritten. Use a unique prefix or a new `tracking_context` "
                    "to avoid this warning."
                )
                for key in list(params.keys()):
                    if key.startswith(f"{_prefix}."):
                        params.pop(key)

            params[f"{_prefix}._func"] = f"{func.__module__}.{func.__qualname__}"
            for key, val in kwargs.items():
                if ignore and key in ignore:
                    continue
                params[f"{_prefix}.{key}"] = val

            return func(*args, **kwargs)

        return _wrapper

    if _func is None:
        return _decorator
    return _decorator(_func)

"""Float ranges for parameter grids"""

import math
from typing import Iterator, Optional, overload


class frange:
    """
    A range of floating point numbers, `start + step*i` for `i >= 0`, bounded
    by `stop` (exclusive). `start` defaults to `0` and `step` to `1.0`.

    Values are computed from the index rather than accumulated, so long grids
    do not drift, and `decimals` rounds every value to that many places.

    Example::

        >>> from lbeta.matrix.range import frange
        >>> list(frange(3))
        [0.0, 1.0, 2.0]
        >>> list(frange(10.5, 11.0 + 0.05, 0.1, decimals=12))
        [10.5, 10.6, 10.7, 10.8, 10.9, 11.0]
        >>> len(frange(0, -3, -0.5))
        6
    """

    @overload
    def __init__(self, stop: float, /): ...

    @overload
    def __init__(
        self,
        start: float,
        stop: float,
        step: Optional[float] = None,
        decimals: Optional[int] = None,
    ): ...

    def __init__(
        self,
        start: float,
        stop: Optional[float] = None,
        step: Optional[float] = None,
        decimals: Optional[int] = None,
    ):
        if stop is None:
            self.start, self.stop = 0.0, float(start)
        else:
            self.start, self.stop = float(start), float(stop)

        self.step = float(step) if step is not None else 1.0
        if self.step == 0.0 or not math.isfinite(self.step):
            raise ValueError(f"step must be finite and nonzero, got {step}")
        self.decimals = decimals

    def __len__(self) -> int:
        count = math.ceil((self.stop - self.start) / self.step)
        # guard against the last value landing on stop through rounding
        while count > 0 and not self._inside(self.start + (count - 1) * self.step):
            count -= 1
        return max(count, 0)

    def _inside(self, value: float) -> bool:
        return value < self.stop if self.step > 0 else value > self.stop

    def __iter__(self) -> Iterator[float]:
        for i in range(len(self)):
            value = self.start + i * self.step
            yield round(value, self.decimals) if self.decimals is not None else value

    def __repr__(self) -> str:
        return f"frange({self.start}, {self.stop}, {self.step})"

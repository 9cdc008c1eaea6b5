"""
Sample the curve τ -> β(2cos(π/τ)) on a grid and write it as CSV.

Rows are evaluated on worker processes through `lbeta.matrix`, since mpmath
keeps its working precision in process-global state.
"""

import csv
from dataclasses import dataclass, field
import os
from pathlib import Path
import sys
from typing import Iterable, List, Optional, TextIO

import mpmath
from tqdm import tqdm

from lbeta.correspondence import DEFAULT_TOL, CurvePoint, curve_increases, curve_point
from lbeta.errors import OutOfRange
from lbeta.logs import is_progress, log
from lbeta.matrix import Matrix, frange
from lbeta.numerics import NumericContext, _env_precision

CSV_HEADER = ("tau", "lambda", "beta", "entropy", "omega_prefix")
SIGNIFICANT_DIGITS = 15
TAU_DECIMALS = 12


@dataclass
class ScanConfig:
    """Grid and solver settings of one scan"""

    tau_min: float
    tau_max: float
    step: float
    tol: float = float(DEFAULT_TOL)
    workers: Optional[int] = field(default_factory=os.cpu_count)
    precision_bits: int = field(default_factory=_env_precision)
    prefix_len: int = 12

    def __post_init__(self):
        if not self.tau_min > 2:
            raise OutOfRange(f"tau_min must be greater than 2, got {self.tau_min}")
        if not self.tau_min < self.tau_max:
            raise OutOfRange(
                f"empty scan range [{self.tau_min}, {self.tau_max}]: tau_min must be "
                "below tau_max"
            )
        if not 0 < self.step <= self.tau_max - self.tau_min:
            raise OutOfRange(
                f"step must lie in (0, {self.tau_max - self.tau_min}], got {self.step}"
            )
        if not self.tol > 0:
            raise OutOfRange(f"tol must be positive, got {self.tol}")
        if self.workers is not None and self.workers < 1:
            raise OutOfRange(f"workers must be positive, got {self.workers}")
        if self.prefix_len < 1:
            raise OutOfRange(f"prefix_len must be positive, got {self.prefix_len}")
        # validates the precision before any worker starts
        NumericContext(precision_bits=self.precision_bits)

    def grid(self) -> frange:
        """τ values from tau_min to tau_max inclusive"""
        return frange(
            self.tau_min,
            self.tau_max + self.step / 2,
            self.step,
            decimals=TAU_DECIMALS,
        )


def _scan_point(tau: float, tol: float, precision_bits: int, prefix_len: int) -> CurvePoint:
    nctx = NumericContext(precision_bits=precision_bits)
    return curve_point(repr(tau), repr(tol), nctx, prefix_len=prefix_len)


def run_scan(config: ScanConfig) -> List[CurvePoint]:
    """
    Evaluate every grid point and return the rows sorted by τ.

    Raises:
        The first exception raised by any row
    """
    grid = config.grid()
    rows = Matrix(_scan_point, kwargs=dict(tau=grid))
    extra = dict(
        tol=config.tol,
        precision_bits=config.precision_bits,
        prefix_len=config.prefix_len,
    )
    log.info(
        f"scanning {len(grid)} values of tau in [{config.tau_min}, {config.tau_max}] "
        f"on {config.workers or 'default'} workers"
    )

    with tqdm(total=len(grid), disable=not is_progress(), file=sys.stderr) as bar:
        if config.workers == 1:
            results = []
            for result in rows(**extra):
                results.append(result)
                bar.update(1)
        else:
            results = rows.parallel(
                config.workers, executor="process", progress=bar.update
            )(**extra)

    for result in results:
        if isinstance(result, Exception):
            raise result
    return sorted(results, key=lambda point: point.tau)


def is_strictly_increasing(
    points: Iterable[CurvePoint], tol=DEFAULT_TOL, nctx: Optional[NumericContext] = None
) -> bool:
    """Whether consecutive rows are consistent with a strictly increasing curve"""
    points = list(points)
    return all(curve_increases(a, b, tol, nctx) for a, b in zip(points, points[1:]))


def format_number(value) -> str:
    return mpmath.nstr(mpmath.mpf(value), SIGNIFICANT_DIGITS)


def write_csv(points: Iterable[CurvePoint], stream: TextIO):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for point in points:
        writer.writerow(
            [
                format_number(point.tau),
                format_number(point.lam),
                format_number(point.beta),
                format_number(point.entropy),
                point.omega_string,
            ]
        )


def save_csv(points: Iterable[CurvePoint], path: Path):
    """Write the rows to `path`, creating its parent directory"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as stream:
        write_csv(points, stream)
    log.info(f"wrote {path}")

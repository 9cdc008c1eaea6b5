"""
Timers for the self-test and the scan
"""

import contextlib
import time
from typing import Dict, Mapping, Protocol, runtime_checkable

from lbeta.logs import log


@runtime_checkable
class Timer(Protocol):
    @contextlib.contextmanager
    def measure(self, name: str):
        yield

    def reset(self) -> None: ...

    def results(self) -> Mapping[str, Mapping[str, float]]: ...


class NullTimer:
    """Timer that records nothing"""

    def __init__(self):
        self.measurements: Dict[str, Dict[str, float]] = {}

    @contextlib.contextmanager
    def measure(self, name):
        yield

    def reset(self):
        self.measurements = {}

    def results(self):
        return {}


class BasicTimer(NullTimer):
    """Wall-clock timer using `time.perf_counter`"""

    @contextlib.contextmanager
    def measure(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            entry = self.measurements.setdefault(name, {"count": 0, "total": 0.0})
            entry["count"] += 1
            entry["total"] += elapsed

    def results(self):
        results = {}
        for name, entry in self.measurements.items():
            if not entry.get("count"):
                log.warning(f"Timer entry {name} has no measurements")
                continue
            results[name] = {
                "count": entry["count"],
                "total_seconds": entry["total"],
                "mean_seconds": entry["total"] / entry["count"],
            }
        return results

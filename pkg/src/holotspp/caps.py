"""Resource caps for long-running symbolic computations."""

from __future__ import annotations

import resource
import time
from dataclasses import dataclass, field


class CapExceeded(RuntimeError):
    """A configured time, memory or degree limit was hit."""

    def __init__(self, what: str, limit, stage: str = ""):
        self.what = what
        self.limit = limit
        self.stage = stage
        where = f" during {stage}" if stage else ""
        super().__init__(f"{what} cap {limit} exceeded{where}")


def _rss_bytes() -> int:
    # ru_maxrss is in kilobytes on Linux
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


@dataclass
class ResourceCaps:
    """Wall-clock, peak-memory and degree limits.

    ``None`` disables a limit.  The clock starts when the object is created
    or when :meth:`restart` is called.
    """

    seconds: float | None = None
    memory_bytes: int | None = None
    max_degree: int | None = None
    max_basis_size: int | None = None
    started: float = field(default_factory=time.monotonic)

    def restart(self) -> "ResourceCaps":
        self.started = time.monotonic()
        return self

    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def check(self, stage: str = "") -> None:
        if self.seconds is not None and self.elapsed() > self.seconds:
            raise CapExceeded("time", f"{self.seconds}s", stage)
        if self.memory_bytes is not None and _rss_bytes() > self.memory_bytes:
            raise CapExceeded("memory", f"{self.memory_bytes}B", stage)

    def check_degree(self, degree: int, stage: str = "") -> None:
        if self.max_degree is not None and degree > self.max_degree:
            raise CapExceeded("degree", self.max_degree, stage)

    def check_size(self, size: int, stage: str = "") -> None:
        if self.max_basis_size is not None and size > self.max_basis_size:
            raise CapExceeded("basis size", self.max_basis_size, stage)


UNLIMITED = ResourceCaps()


def as_caps(caps: ResourceCaps | None) -> ResourceCaps:
    return caps if caps is not None else ResourceCaps()

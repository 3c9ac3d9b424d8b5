"""Cooperative time and memory budgets for long enumerations.

Long jobs check the budget between work partitions and abort cleanly
with partial diagnostics instead of being killed mid-flight.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .errors import BudgetError

__all__ = ["Budget"]


@dataclass
class Budget:
    """Wall-clock and memory limits, checked cooperatively."""

    time_limit_s: Optional[float] = None
    mem_limit_mb: Optional[float] = None
    _start: float = field(default_factory=time.monotonic, repr=False)

    def elapsed(self) -> float:
        return time.monotonic() - self._start

    def check_time(self, context: str = "") -> None:
        if self.time_limit_s is not None and self.elapsed() > self.time_limit_s:
            where = f" during {context}" if context else ""
            raise BudgetError(
                f"time budget of {self.time_limit_s:.0f}s exceeded{where} "
                f"(elapsed {self.elapsed():.0f}s)"
            )

    def charge_memory(self, bytes_needed: int, context: str = "") -> None:
        """Refuse up front when a planned allocation would bust the cap."""
        if self.mem_limit_mb is not None and bytes_needed > self.mem_limit_mb * 2**20:
            where = f" for {context}" if context else ""
            raise BudgetError(
                f"memory budget of {self.mem_limit_mb:.0f}MB too small{where} "
                f"(needs about {bytes_needed / 2**20:.0f}MB)"
            )

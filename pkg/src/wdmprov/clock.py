"""Simulation clock.

In ``virtual`` mode time advances only through :meth:`VirtualClock.advance`,
which makes scenario runs deterministic and instantaneous.  ``realtime``
mode sleeps for the requested duration instead, for demonstrations against
the wall clock.

Concurrent device operations (for example configuring both ends of a
transceiver pair) are expressed with :meth:`VirtualClock.parallel`: every
branch starts at the group epoch and the clock ends up at the epoch plus
the longest branch, so overlapping windows cost their maximum rather than
their sum.  Outside parallel groups the clock is monotone non-decreasing.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from typing import Iterator


class VirtualClock:
    def __init__(self, start: float = 0.0, mode: str = "virtual"):
        if mode not in ("virtual", "realtime"):
            raise ValueError(f"unknown clock mode: {mode!r}")
        self._now = float(start)
        self.mode = mode

    @property
    def now(self) -> float:
        """Seconds since scenario start."""
        return self._now

    def advance(self, dt: float) -> float:
        if dt < 0:
            raise ValueError(f"cannot advance by {dt} s")
        if self.mode == "realtime" and dt > 0:
            time.sleep(dt)
        self._now += dt
        return self._now

    @contextmanager
    def parallel(self) -> Iterator["ParallelGroup"]:
        group = ParallelGroup(self)
        try:
            yield group
        finally:
            group.close()

    def __repr__(self) -> str:
        return f"VirtualClock(t={self._now:.3f}s, mode={self.mode})"


class ParallelGroup:
    """Tracks branch durations so overlapping work costs max, not sum."""

    def __init__(self, clock: VirtualClock):
        self._clock = clock
        self._epoch = clock.now
        self._longest = 0.0
        self._closed = False

    @contextmanager
    def branch(self) -> Iterator[None]:
        if self._closed:
            raise RuntimeError("parallel group already closed")
        self._clock._now = self._epoch
        try:
            yield
        finally:
            self._longest = max(self._longest, self._clock.now - self._epoch)

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            self._clock._now = self._epoch + self._longest

"""Resource budgets for enumerating operations.

Every enumeration in the package asks the active budget before it commits to
work proportional to a group order, a Grassmannian size or a raw search count.
Exceeding a limit raises :class:`BudgetExceeded`; nothing is allowed to hang.
"""

from __future__ import annotations

import contextlib
import contextvars
import json
import os
import time
from dataclasses import dataclass, field, replace


class BudgetExceeded(RuntimeError):
    """An operation would exceed the active budget."""

    def __init__(self, kind, requested, limit):
        super().__init__(f"{kind} budget exceeded: {requested} > {limit}")
        self.kind = kind
        self.requested = requested
        self.limit = limit


@dataclass(frozen=True)
class Budget:
    max_group_order: int = 10**7
    max_grassmannian: int = 2 * 10**5
    max_enumeration: int = 4 * 10**7
    max_field_size: int = 1 << 16
    time_ceiling: float = 1800.0  # seconds
    started: float = field(default_factory=time.monotonic, compare=False)

    @classmethod
    def from_env(cls, value=None):
        """Defaults overridden by ``GEOMFORGE_BUDGET``.

        Accepts JSON (``{"max_group_order": 1000}``) or ``key=value`` pairs
        separated by commas.
        """
        value = os.environ.get("GEOMFORGE_BUDGET", "") if value is None else value
        value = value.strip()
        if not value:
            return cls()
        if value.startswith("{"):
            items = json.loads(value)
        else:
            items = {}
            for part in value.split(","):
                key, _, val = part.partition("=")
                items[key.strip()] = val.strip()
        kwargs = {}
        for key, val in items.items():
            if key not in cls.__dataclass_fields__ or key == "started":
                raise ValueError(f"unknown budget key {key!r}")
            kwargs[key] = float(val) if key == "time_ceiling" else int(val)
        return cls(**kwargs)

    def as_dict(self):
        return {
            "max_group_order": self.max_group_order,
            "max_grassmannian": self.max_grassmannian,
            "max_enumeration": self.max_enumeration,
            "max_field_size": self.max_field_size,
            "time_ceiling": self.time_ceiling,
        }


_active: contextvars.ContextVar[Budget] = contextvars.ContextVar("geomforge_budget", default=Budget())

# budget counters for reports; reset by callers that want per-run numbers
counters: dict[str, int] = {}


def current() -> Budget:
    return _active.get()


@contextlib.contextmanager
def use(budget: Budget):
    budget = replace(budget, started=time.monotonic())
    token = _active.set(budget)
    try:
        yield budget
    finally:
        _active.reset(token)


def _limit(kind):
    return getattr(current(), "max_" + kind)


def require(kind: str, requested: int):
    """Raise unless ``requested`` fits under the ``max_<kind>`` limit."""
    limit = _limit(kind)
    counters[kind] = max(counters.get(kind, 0), int(requested))
    if requested > limit:
        raise BudgetExceeded(kind, requested, limit)


class Meter:
    """Counts steps of an open-ended search against ``max_enumeration``.

    Also enforces the wall-clock ceiling every few thousand steps.
    """

    __slots__ = ("count", "limit", "_next_clock")

    def __init__(self, kind="enumeration"):
        self.limit = _limit(kind)
        self.count = 0
        self._next_clock = 4096

    def step(self, n=1):
        self.count += n
        if self.count > self.limit:
            raise BudgetExceeded("enumeration", self.count, self.limit)
        if self.count >= self._next_clock:
            self._next_clock = self.count + 4096
            check_time()


def check_time():
    budget = current()
    elapsed = time.monotonic() - budget.started
    if elapsed > budget.time_ceiling:
        raise BudgetExceeded("time", round(elapsed, 3), budget.time_ceiling)

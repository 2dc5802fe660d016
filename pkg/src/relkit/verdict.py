from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Verdict:
    """Outcome of a check.

    ``status`` is ``"ok"`` or ``"violated"`` for verifiers, and
    ``"confirmed"``, ``"violated"`` or ``"hypothesis unmet"`` for lemma checks.
    """

    status: str
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in ("ok", "confirmed")

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"verdict": self.status, "violations": list(self.violations), "notes": list(self.notes)}

    @classmethod
    def from_violations(cls, violations, notes=()) -> "Verdict":
        return cls("ok" if not violations else "violated", list(violations), list(notes))


@dataclass
class SearchResult:
    """Bounded search outcome: a witness, or ``none_up_to(bound)``."""

    found: bool
    bound: int
    witness: Any = None
    stats: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "found" if self.found else "none_up_to"

    def __bool__(self):
        return self.found

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class VerifyReport:
    """Outcome of a range check.  Failures are data, not exceptions."""

    name: str
    passed: bool
    checked: int = 0
    witness: dict[str, Any] | None = None
    counters: dict[str, Any] = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        text = f"{self.name}: {status} ({self.checked} checked)"
        if self.witness:
            inner = ", ".join(f"{k}={v}" for k, v in self.witness.items())
            text += f"; witness {inner}"
        return text

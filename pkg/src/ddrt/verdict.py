"""Prover verdicts: YES with a replayable proof, NO with a witness, or MAYBE."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

YES = "YES"
NO = "NO"
MAYBE = "MAYBE"


@dataclass
class Verdict:
    kind: str  # YES | NO | MAYBE
    criterion: str
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def is_yes(self) -> bool:
        return self.kind == YES

    @property
    def is_no(self) -> bool:
        return self.kind == NO


def yes(criterion: str, **details: Any) -> Verdict:
    return Verdict(YES, criterion, details)


def no(criterion: str, **details: Any) -> Verdict:
    return Verdict(NO, criterion, details)


def maybe(criterion: str, **details: Any) -> Verdict:
    return Verdict(MAYBE, criterion, details)

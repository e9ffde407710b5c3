from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Dict


class Outcome(str, enum.Enum):
    SATISFIED = "SATISFIED"
    VIOLATED = "VIOLATED"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class AuditVerdict:
    """Result of one axiom or lemma check.

    ``instance`` echoes the inputs (profiles, coalitions, thresholds) and
    ``witness`` holds the probabilities and margins behind the outcome, enough
    to recompute a violation from scratch.
    """

    axiom: str
    instance: Dict[str, Any]
    outcome: Outcome
    witness: Dict[str, Any] = field(default_factory=dict)
    reason: str = ""

    @property
    def satisfied(self) -> bool:
        return self.outcome is Outcome.SATISFIED

    @property
    def violated(self) -> bool:
        return self.outcome is Outcome.VIOLATED

    @property
    def inconclusive(self) -> bool:
        return self.outcome is Outcome.INCONCLUSIVE

    def __str__(self):
        extra = f" ({self.reason})" if self.reason else ""
        return f"{self.axiom}: {self.outcome}{extra}"


def verdict(axiom: str, instance, ok: bool, witness=None, reason: str = "") -> AuditVerdict:
    outcome = Outcome.SATISFIED if ok else Outcome.VIOLATED
    return AuditVerdict(axiom, dict(instance), outcome, dict(witness or {}), reason)


def inconclusive(axiom: str, instance, reason: str) -> AuditVerdict:
    return AuditVerdict(axiom, dict(instance), Outcome.INCONCLUSIVE, {}, reason)

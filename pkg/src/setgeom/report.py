from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


def jsonable(obj: Any) -> Any:
    """Convert numpy containers/scalars to plain Python for ``json.dumps``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass
class CheckReport:
    """Outcome of a verification run.

    ``worst_violation`` is signed: the largest observed excess over the
    checked inequality (negative means every sample satisfied it with room
    to spare). ``details`` holds per-axiom sub-results where a check
    covers several inequalities.
    """

    name: str
    passed: bool
    worst_violation: float
    tolerance: float
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return jsonable(
            {
                "name": self.name,
                "pass": self.passed,
                "worst_violation": self.worst_violation,
                "tolerance": self.tolerance,
                "witness": self.witness,
                "details": self.details,
            }
        )

    def __bool__(self):
        return self.passed

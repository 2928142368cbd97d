from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

REL_SLACK = 1e-9


def _ratio(lhs: float, bound: float) -> float:
    if lhs == 0.0:
        return 0.0
    if bound == 0.0:
        return math.inf
    return lhs / bound


@dataclass
class BoundReport:
    """One verified inequality ``lhs <= claimed_constant * rhs``.

    ``ratio`` is ``lhs / (claimed_constant * rhs)``; the check passes when
    ``lhs <= claimed_constant * rhs * (1 + 1e-9)``.  Set-level checks
    (disjointness, coverage) use ``claimed_constant = 1`` with counts or
    0/1 indicators on both sides.
    """

    name: str
    claimed_constant: float
    measured_lhs: float
    measured_rhs: float
    ratio: float = 0.0
    passed: bool = True
    witness: Any = None
    details: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def inequality(cls, name, constant, lhs, rhs, witness=None, **details) -> BoundReport:
        constant, lhs, rhs = float(constant), float(lhs), float(rhs)
        bound = constant * rhs
        passed = lhs <= bound * (1.0 + REL_SLACK) if math.isfinite(lhs) else False
        return cls(name, constant, lhs, rhs, _ratio(lhs, bound), bool(passed), witness, details)

    @classmethod
    def condition(cls, name, ok: bool, witness=None, **details) -> BoundReport:
        """A yes/no property, encoded as ``violations <= 0``."""
        return cls(name, 1.0, 0.0 if ok else 1.0, 0.0, 0.0 if ok else math.inf, bool(ok), witness, details)

    def to_dict(self) -> dict[str, Any]:
        return _jsonable(asdict(self))

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"[{flag}] {self.name}: lhs={self.measured_lhs:.6g} "
            f"C={self.claimed_constant:.6g} rhs={self.measured_rhs:.6g} ratio={self.ratio:.6g}"
        )


def merge(name: str, reports: list[BoundReport]) -> BoundReport:
    """Worst-ratio summary of several reports of the same inequality."""
    if not reports:
        return BoundReport.condition(name, True, details={"count": 0})
    worst = max(reports, key=lambda r: (not r.passed, r.ratio))
    return BoundReport(
        name,
        worst.claimed_constant,
        worst.measured_lhs,
        worst.measured_rhs,
        worst.ratio,
        all(r.passed for r in reports),
        worst.witness,
        {"count": len(reports), "failures": sum(not r.passed for r in reports)},
    )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _jsonable(obj.tolist())
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    return str(obj)

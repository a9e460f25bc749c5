"""Bound-check records with estimator-direction bookkeeping.

Every inequality is stored in the orientation ``lhs <= rhs``.  Besides the
point estimates, each side may carry rigorous brackets ``[lo, hi]`` that the
true value is known to lie in.  The status follows the estimates:

* ``pass``        -- ``rhs - lhs >= -tolerance``
* ``fail``        -- violated, and the brackets prove the true values violate it too
* ``conditional`` -- violated by the estimates, but the brackets leave room for
  the true inequality to hold
* ``skipped``     -- outside the stated domain of the inequality

``certified`` is true when a pass is implied by the brackets alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

INF = math.inf

FAMILIES = (
    "dpi_nonneg",
    "thm1_direct",
    "thm1_converse",
    "miao",
    "miao2",
    "converse2",
    "thm2_direct2",
    "thm2_direct1",
    "corollary_gap",
    "hashing_upper",
    "hashing_lower",
    "mutualinfo_half",
    "eof_wootters",
    "thm3_a",
    "thm3_b",
    "final_a",
    "final_b",
    "phi_chain_a",
    "phi_chain_b",
)


@dataclass(frozen=True)
class BoundCheckRecord:
    name: str
    lhs: float
    rhs: float
    tolerance: float
    instance: str = ""
    applicable: bool = True
    lhs_lo: float = -INF
    lhs_hi: float = INF
    rhs_lo: float = -INF
    rhs_hi: float = INF
    note: str = ""
    slack: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "slack", float(self.rhs) - float(self.lhs))

    @property
    def status(self) -> str:
        if not self.applicable:
            return "skipped"
        if self.slack >= -self.tolerance:
            return "pass"
        if self.lhs_lo > self.rhs_hi + self.tolerance:
            return "fail"
        return "conditional"

    @property
    def certified(self) -> bool:
        return self.status == "pass" and self.lhs_hi <= self.rhs_lo + self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "slack": _num(self.slack),
            "status": self.status,
        }

    def to_full_dict(self) -> dict:
        d = self.to_dict()
        d.update(instance=self.instance, tolerance=self.tolerance,
                 certified=self.certified, note=self.note)
        return d


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def exact(name, lhs, rhs, tolerance, instance="", applicable=True, note="") -> BoundCheckRecord:
    """Record for an inequality whose two sides are computed exactly."""
    return BoundCheckRecord(name, lhs, rhs, tolerance, instance, applicable,
                            lhs, lhs, rhs, rhs, note)


def skipped(name, instance="", note="") -> BoundCheckRecord:
    return BoundCheckRecord(name, math.nan, math.nan, 0.0, instance, False, note=note)


def tally(records) -> dict:
    """Per-family counts of each status."""
    out: dict = {}
    for r in records:
        fam = out.setdefault(r.name, {"pass": 0, "fail": 0, "skipped": 0, "conditional": 0})
        fam[r.status] += 1
    return out

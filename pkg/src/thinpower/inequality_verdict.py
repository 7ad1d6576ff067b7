"""The shared verdict record for every inequality checker."""

from __future__ import annotations

from dataclasses import dataclass, field

from .pmf_core import ToleranceConfig


@dataclass(frozen=True)
class InequalityVerdict:
    """One inequality evaluation.

    The margin is oriented so that `holds` is equivalent to
    margin >= -tol_ineq regardless of which way the statement is written;
    for "lhs >= rhs" statements it is lhs - rhs.  `units` records whether
    the two sides are entropies (nats or bits) or Poisson rates.
    """

    name: str
    lhs: float
    rhs: float
    margin: float
    holds: bool
    inputs: dict = field(default_factory=dict)
    units: str = "nats"
    note: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "holds": self.holds,
            "inputs": self.inputs,
            "units": self.units,
            "note": self.note,
        }


def make_verdict(name: str, lhs: float, rhs: float, margin: float,
                 cfg: ToleranceConfig, inputs=None, units: str = "nats",
                 note: str = "") -> InequalityVerdict:
    return InequalityVerdict(name=name, lhs=float(lhs), rhs=float(rhs),
                             margin=float(margin),
                             holds=bool(margin >= -cfg.tol_ineq),
                             inputs=dict(inputs or {}), units=units, note=note)

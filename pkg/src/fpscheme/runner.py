"""Drive a scheme from an initial point and record the trajectory."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainViolationError, InvalidInputError
from .mappings import EvalCounter, Mapping, evaluate
from .schemes import SchemeSpec, step
from .space import EUCLIDEAN, NormSpec, as_point, distance

STOP_REASONS = ("max_iters", "residual_tol", "error_tol", "fixed_steps", "domain_violation")


@dataclass(frozen=True)
class StopRule:
    """When to stop a run.

    ``max_iters`` and ``fixed_steps`` count records, so the initial point is
    iterate 1. ``fixed_steps`` ignores both tolerances.
    """

    max_iters: int = 10**6
    residual_tol: Optional[float] = 1e-10
    error_tol: Optional[float] = None
    fixed_steps: Optional[int] = None

    def __post_init__(self):
        if self.max_iters is None or self.max_iters < 1:
            raise InvalidInputError("max_iters must be a positive integer")
        if self.fixed_steps is not None:
            if self.fixed_steps < 1:
                raise InvalidInputError("fixed_steps must be a positive integer")
            if self.fixed_steps > self.max_iters:
                raise InvalidInputError("fixed_steps cannot exceed max_iters")
        for name in ("residual_tol", "error_tol"):
            tol = getattr(self, name)
            if tol is not None and not tol > 0:
                raise InvalidInputError(f"{name} must be positive")

    @classmethod
    def fixed(cls, steps: int) -> "StopRule":
        return cls(max_iters=steps, residual_tol=None, fixed_steps=steps)

    def reason(self, n: int, res: float, err: Optional[float]) -> Optional[str]:
        if self.fixed_steps is not None:
            return "fixed_steps" if n >= self.fixed_steps else None
        if self.residual_tol is not None and res <= self.residual_tol:
            return "residual_tol"
        if self.error_tol is not None and err is not None and err <= self.error_tol:
            return "error_tol"
        if n >= self.max_iters:
            return "max_iters"
        return None


@dataclass(frozen=True)
class TrajectoryRecord:
    n: int
    iterate: np.ndarray
    residual: float
    error_to_F: Optional[float]
    cumulative_evals: int


@dataclass(frozen=True, eq=False)
class Trajectory:
    records: tuple
    stop_reason: str
    label: str = ""
    mapping: Optional[Mapping] = None
    spec: Optional[SchemeSpec] = None
    space: NormSpec = EUCLIDEAN

    def __post_init__(self):
        if not self.records:
            raise InvalidInputError("a trajectory holds at least the initial point")

    def __len__(self):
        return len(self.records)

    def __getitem__(self, n: int) -> TrajectoryRecord:
        """Record by 1-based step index, matching the table's step column."""
        if not 1 <= n <= len(self.records):
            raise IndexError(f"step {n} outside 1..{len(self.records)}")
        return self.records[n - 1]

    @property
    def dim(self) -> int:
        return self.records[0].iterate.size

    @property
    def iterates(self) -> np.ndarray:
        return np.array([r.iterate for r in self.records])

    @property
    def residuals(self) -> np.ndarray:
        return np.array([r.residual for r in self.records])

    @property
    def errors(self) -> Optional[np.ndarray]:
        if self.records[0].error_to_F is None:
            return None
        return np.array([r.error_to_F for r in self.records])

    @property
    def final(self) -> TrajectoryRecord:
        return self.records[-1]


def _record(mapping, s, n, space, evals):
    # measuring the residual is not charged to the scheme
    res = distance(space, s, evaluate(mapping, s))
    return TrajectoryRecord(n, s, res, mapping.distance_to_fixed_set(s, space), evals)


def run(mapping: Mapping, spec: SchemeSpec, s1, space: NormSpec = EUCLIDEAN,
        stop: Optional[StopRule] = None, label: Optional[str] = None) -> Trajectory:
    """Iterate ``spec`` on ``mapping`` from ``s1``.

    A point leaving the domain mid-run truncates the trajectory with
    ``stop_reason = "domain_violation"``; an initial point outside the domain
    raises :class:`DomainViolationError`.
    """
    stop = stop or StopRule()
    s = as_point(s1).copy()
    if s.shape != mapping.lower.shape:
        raise InvalidInputError(f"{mapping.id} expects dimension {mapping.dim}, got {s.size}")
    if not mapping.contains(s):
        raise DomainViolationError(f"initial point {s} lies outside the domain of {mapping.id}")
    s.flags.writeable = False
    counter = EvalCounter()
    records = [_record(mapping, s, 1, space, 0)]
    n = 1
    while True:
        reason = stop.reason(n, records[-1].residual, records[-1].error_to_F)
        if reason:
            break
        try:
            s = step(mapping, s, n, spec, counter)
        except DomainViolationError:
            reason = "domain_violation"
            break
        if not mapping.contains(s):
            reason = "domain_violation"
            break
        s.flags.writeable = False
        n += 1
        records.append(_record(mapping, s, n, space, counter.count))
    return Trajectory(tuple(records), reason, label or spec.kind, mapping, spec, space)


def iterations_to_tol(traj: Trajectory, target, tol: float) -> Optional[int]:
    """Smallest step n with ||s_n - target|| <= tol, or None."""
    target = as_point(target)
    for rec in traj.records:
        if distance(traj.space, rec.iterate, target) <= tol:
            return rec.n
    return None


def evals_to_tol(traj: Trajectory, target, tol: float) -> Optional[int]:
    """Cumulative scheme evaluations spent when the iterate first gets within tol."""
    n = iterations_to_tol(traj, target, tol)
    return None if n is None else traj[n].cumulative_evals

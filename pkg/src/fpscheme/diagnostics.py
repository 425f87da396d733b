"""Executable checks of the convergence theory on concrete trajectories."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInputError, UnsupportedMapError
from .mappings import Mapping, residual
from .runner import StopRule, Trajectory, run
from .schemes import ParamSeq, SchemeSpec, equivalent_mann_spec
from .space import EUCLIDEAN, NormSpec, as_point, distance, norm

FEJER_TOL = 1e-12
CONDITION_I_FLOOR = 1e-6


@dataclass
class PropertyReport:
    """Outcome of one property check.

    ``passed`` is true exactly when ``worst_violation <= tolerance``.
    ``value`` carries the measured quantity when it differs from the
    violation (for instance the minimum Condition (I) ratio).
    """

    property_id: str
    passed: bool
    worst_violation: float
    tolerance: float
    witness: Optional[tuple] = None
    value: Optional[float] = None
    note: str = ""
    context: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        witness = None
        if self.witness is not None:
            n, point = self.witness
            witness = {"n": n, "point": [float(v) for v in point]}
        return {
            "property_id": self.property_id,
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "tolerance": self.tolerance,
            "witness": witness,
            "value": self.value,
            "note": self.note,
            "context": self.context,
        }


def check_fejer(traj: Trajectory, w, space: Optional[NormSpec] = None) -> PropertyReport:
    """Per-step monotonicity ||s_{n+1} - w|| <= ||s_n - w|| toward a fixed point w."""
    space = space or traj.space
    w = as_point(w)
    if traj.mapping is not None and residual(traj.mapping, w, space) > 1e-9:
        raise InvalidInputError(f"{w} is not a fixed point of {traj.mapping.id}")
    dists = [distance(space, r.iterate, w) for r in traj.records]
    worst, witness = 0.0, None
    for k in range(1, len(dists)):
        inc = dists[k] - dists[k - 1]
        if witness is None or inc > worst:
            worst, witness = inc, (traj.records[k].n, traj.records[k].iterate)
    worst = max(worst, 0.0)
    return PropertyReport("fejer", worst <= FEJER_TOL, worst, FEJER_TOL,
                          witness if worst > 0 else None)


def check_afps(traj: Trajectory, tail_start: int, tol: float) -> PropertyReport:
    """Residuals vanish: final residual <= tol and no new residual maximum is
    set after step ``tail_start``.

    A running maximum is used instead of strict decrease because residuals can
    plateau (or jitter) at rounding level.
    """
    if not 1 <= tail_start < len(traj):
        raise InvalidInputError(f"tail_start must lie in [1, {len(traj) - 1}]")
    res = traj.residuals
    final = float(res[-1])
    tail = res[tail_start - 1:]
    running = np.maximum.accumulate(tail)
    increases = running - tail[0]
    k = int(np.argmax(increases))
    rise = float(increases[k])
    if final > tol:
        worst, witness = final, (traj.final.n, traj.final.iterate)
    else:
        rec = traj[tail_start + k]
        worst, witness = rise, ((rec.n, rec.iterate) if rise > 0 else None)
    passed = final <= tol and rise <= tol
    return PropertyReport("afps", passed, worst, tol, witness, value=final)


def condition_I_margin(mapping: Mapping, samples: int, seed: int,
                       space: NormSpec = EUCLIDEAN) -> PropertyReport:
    """Empirical lower bound c in ||s - Ks|| >= c d(s, F(K)).

    A positive minimum ratio witnesses the linear Condition (I) function
    m(t) = c t on the sampled points. ``value`` holds the minimum ratio and
    ``worst_violation`` the shortfall below the 1e-6 floor.
    """
    if not mapping.known_fixed_points and mapping.fixed_set_distance is None:
        raise UnsupportedMapError(f"{mapping.id} has no known fixed points")
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    best, witness, used = np.inf, None, 0
    for s in mapping.sample(rng, samples):
        d = mapping.distance_to_fixed_set(s, space)
        if d < 1e-6:
            continue
        used += 1
        ratio = residual(mapping, s, space) / d
        if ratio < best:
            best, witness = ratio, (0, s)
    if used == 0:
        return PropertyReport("condition_I", False, np.inf, 0.0, None, None,
                              note="0 usable samples")
    shortfall = max(0.0, CONDITION_I_FLOOR - best)
    return PropertyReport("condition_I", best >= CONDITION_I_FLOOR, shortfall, 0.0,
                          witness, value=float(best), note=f"{used} usable samples")


def check_mann_equivalence(mapping: Mapping, s1, alpha: ParamSeq, beta: ParamSeq,
                           steps: int, space: NormSpec = EUCLIDEAN) -> PropertyReport:
    """Compare the new scheme with Mann at lambda_n = alpha_n + (1 - alpha_n) beta_n."""
    stop = StopRule.fixed(steps)
    new = run(mapping, SchemeSpec("new", alpha=alpha, beta=beta), s1, space, stop)
    mann = run(mapping, equivalent_mann_spec(alpha, beta, steps), s1, space, stop)
    if len(new) != len(mann):
        return PropertyReport("mann_equivalence", False, np.inf, 0.0,
                              note="trajectories stopped at different steps")
    worst, witness, scale = 0.0, None, 0.0
    for a, b in zip(new.records, mann.records):
        gap = float(np.max(np.abs(a.iterate - b.iterate)))
        scale = max(scale, norm(space, a.iterate))
        if gap > worst:
            worst, witness = gap, (a.n, a.iterate)
    tol = 1e-10 * (1.0 + scale)
    return PropertyReport("mann_equivalence", worst <= tol, worst, tol, witness)

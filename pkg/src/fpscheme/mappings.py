"""Self-maps K: W -> W, evaluation counting, and the built-in catalog."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainViolationError, InvalidInputError
from .space import EUCLIDEAN, NormSpec, as_point, distance, norm

DOMAIN_TOL = 1e-9
FIXED_POINT_TOL = 1e-12


class EvalCounter:
    """Counts mapping evaluations within a single run. Not thread-shared."""

    __slots__ = ("count",)

    def __init__(self, count: int = 0):
        self.count = count

    def tick(self):
        self.count += 1

    def __repr__(self):
        return f"EvalCounter({self.count})"


@dataclass(frozen=True, eq=False)
class Mapping:
    """An evaluatable self-map on a box (or ball) in R^d.

    Parameters
    ----------
    id : str
        Short catalog identifier.
    lower, upper : array_like
        Per-coordinate bounds of the domain box.
    evaluator : callable
        ``x -> K(x)`` on 1-D float arrays. Must be pure.
    known_fixed_points : sequence of array_like
        Finite list of fixed points (possibly only samples of F(K)).
    claims_nonexpansive : bool
        Whether ``K`` is asserted to be 1-Lipschitz.
    ball_radius : float, optional
        If set, the domain is the Euclidean ball of this radius centred at the
        origin rather than the box; the box then only bounds it.
    fixed_set_distance : callable, optional
        ``(x, space) -> d(x, F(K))`` when the whole fixed-point set is known in
        closed form. Without it, distances are taken to the nearest listed
        fixed point, which is only an upper bound when F(K) is not finite.
    """

    id: str
    lower: np.ndarray
    upper: np.ndarray
    evaluator: Callable[[np.ndarray], np.ndarray]
    known_fixed_points: tuple = ()
    claims_nonexpansive: bool = True
    ball_radius: Optional[float] = None
    fixed_set_distance: Optional[Callable[[np.ndarray, NormSpec], float]] = None
    description: str = ""

    def __post_init__(self):
        lower, upper = as_point(self.lower), as_point(self.upper)
        if lower.shape != upper.shape or np.any(lower > upper):
            raise InvalidInputError(f"{self.id}: malformed domain box")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "_lo", tuple(lower.tolist()))
        object.__setattr__(self, "_hi", tuple(upper.tolist()))
        fps = tuple(as_point(w) for w in self.known_fixed_points)
        for w in fps:
            if w.shape != lower.shape:
                raise InvalidInputError(f"{self.id}: fixed point {w} has wrong dimension")
        object.__setattr__(self, "known_fixed_points", fps)

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, x, tol: float = DOMAIN_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != self.lower.shape:
            return False
        vals = x.tolist()
        for v, lo, hi in zip(vals, self._lo, self._hi):
            if not lo - tol <= v <= hi + tol:
                return False
        if self.ball_radius is not None:
            return math.hypot(*vals) <= self.ball_radius + tol
        return True

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` points uniformly from the domain, shape ``(size, dim)``."""
        if self.ball_radius is None:
            return rng.uniform(self.lower, self.upper, size=(size, self.dim))
        # rejection sampling from the bounding box
        out = np.empty((0, self.dim))
        while out.shape[0] < size:
            cand = rng.uniform(self.lower, self.upper, size=(2 * size, self.dim))
            keep = np.linalg.norm(cand, axis=1) <= self.ball_radius
            out = np.vstack([out, cand[keep]])
        return out[:size]

    def distance_to_fixed_set(self, x, space: NormSpec = EUCLIDEAN) -> Optional[float]:
        """d(x, F(K)), or ``None`` when nothing is known about F(K)."""
        if self.fixed_set_distance is not None:
            return float(self.fixed_set_distance(np.asarray(x, dtype=float), space))
        if not self.known_fixed_points:
            return None
        return min(distance(space, x, w) for w in self.known_fixed_points)

    def nearest_fixed_point(self, x, space: NormSpec = EUCLIDEAN) -> Optional[np.ndarray]:
        if not self.known_fixed_points:
            return None
        return min(self.known_fixed_points, key=lambda w: distance(space, x, w))

    def __call__(self, x, counter: Optional[EvalCounter] = None) -> np.ndarray:
        return evaluate(self, x, counter)

    def __repr__(self):
        return f"Mapping({self.id!r}, dim={self.dim})"


def evaluate(mapping: Mapping, x, counter: Optional[EvalCounter] = None) -> np.ndarray:
    """Apply ``mapping`` to ``x``, charging one evaluation to ``counter``."""
    x = as_point(x)
    if x.shape != mapping.lower.shape:
        raise InvalidInputError(f"{mapping.id} expects dimension {mapping.dim}, got {x.size}")
    if not mapping.contains(x):
        raise DomainViolationError(f"{x} lies outside the domain of {mapping.id}")
    y = as_point(mapping.evaluator(x))
    if counter is not None:
        counter.tick()
    return y


def residual(mapping: Mapping, x, space: NormSpec = EUCLIDEAN) -> float:
    """||x - K(x)||; not charged to any counter."""
    return distance(space, x, evaluate(mapping, x))


def nonexpansiveness_probe(mapping: Mapping, trials: int, seed: int,
                           space: NormSpec = EUCLIDEAN) -> float:
    """Largest observed ratio ||Kx - Ky|| / ||x - y|| over random domain pairs."""
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    xs = mapping.sample(rng, trials)
    ys = mapping.sample(rng, trials)
    worst = 0.0
    for x, y in zip(xs, ys):
        gap = norm(space, x - y)
        if gap < 1e-12:
            continue
        worst = max(worst, norm(space, evaluate(mapping, x) - evaluate(mapping, y)) / gap)
    return worst


def affine_map(A, b, lower, upper, id: str = "affine",
               claims_nonexpansive: bool = True) -> Mapping:
    """K(x) = A x + b on a box. The fixed point is attached when I - A is invertible."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = as_point(b)
    d = b.size
    if A.shape != (d, d):
        raise InvalidInputError(f"matrix shape {A.shape} does not match offset of length {d}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix has non-finite entries")

    def evaluator(x, A=A, b=b):
        return A @ x + b

    fixed = []
    try:
        w = np.linalg.solve(np.eye(d) - A, b)
    except np.linalg.LinAlgError:
        pass
    else:
        if np.all(np.isfinite(w)) and float(np.linalg.norm(A @ w + b - w)) <= FIXED_POINT_TOL:
            fixed.append(w)
    mapping = Mapping(id, lower, upper, evaluator, tuple(fixed), claims_nonexpansive,
                      description=f"affine map A x + b in R^{d}")
    if fixed and not mapping.contains(fixed[0]):
        mapping = Mapping(id, lower, upper, evaluator, (), claims_nonexpansive,
                          description=mapping.description)
    return mapping


def _box_distance(lo, hi):
    def dist(x, space):
        return norm(space, x - np.clip(x, lo, hi))
    return dist


def _build_catalog() -> dict:
    # K(x) = 1 - x only maps [-1, 2] into itself; [-1, 1] is not invariant.
    reflect = Mapping(
        "paper_example", [-1.0], [2.0], lambda x: 1.0 - x,
        known_fixed_points=([0.5],),
        description="K(x) = 1 - x, reflection about 0.5; F = {0.5}",
    )
    halving = Mapping(
        "halving", [-1.0], [1.0], lambda x: 0.5 * x,
        known_fixed_points=([0.0],),
        description="K(x) = x / 2, contraction; F = {0}",
    )
    c, s = math.cos(1.0), math.sin(1.0)
    rot = np.array([[c, -s], [s, c]])
    rot_disc = Mapping(
        "rot_disc", [-1.0, -1.0], [1.0, 1.0], lambda x: rot @ x,
        known_fixed_points=([0.0, 0.0],),
        ball_radius=1.0,
        description="rotation by 1 rad on the closed unit disc; F = {0}",
    )
    proj_box = Mapping(
        "proj_box", [-1.0], [1.0], lambda x: np.clip(x, 0.2, 0.8),
        known_fixed_points=([0.2], [0.5], [0.8]),
        fixed_set_distance=_box_distance(0.2, 0.8),
        description="K(x) = clamp(x, 0.2, 0.8), metric projection; F = [0.2, 0.8]",
    )
    return {m.id: m for m in (reflect, halving, rot_disc, proj_box)}


CATALOG = _build_catalog()


def get_map(map_id: str) -> Mapping:
    try:
        return CATALOG[map_id]
    except KeyError:
        raise InvalidInputError(
            f"unknown map {map_id!r}; available: {', '.join(CATALOG)}") from None

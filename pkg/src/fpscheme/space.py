"""Finite-dimensional normed-space primitives.

Points are one-dimensional ``float64`` numpy arrays. All functions here are
pure; none of them mutate their arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, UnsupportedNormError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class NormSpec:
    """Selects the p-norm on R^d. ``p = math.inf`` gives the max-norm."""

    p: float = 2.0

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1:
            raise InvalidInputError(f"norm exponent must satisfy p >= 1, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, text) -> "NormSpec":
        if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "max"):
            return cls(math.inf)
        try:
            return cls(float(text))
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"cannot parse norm exponent {text!r}") from exc

    @property
    def is_euclidean(self) -> bool:
        return self.p == 2.0

    def __str__(self):
        return "inf" if math.isinf(self.p) else f"{self.p:g}"


EUCLIDEAN = NormSpec(2.0)


def as_point(x) -> np.ndarray:
    """Coerce scalars and sequences to a finite 1-D float array.

    A 1-D float64 array is returned as is (points are never mutated in place);
    anything else is copied.
    """
    if isinstance(x, np.ndarray) and x.ndim == 1 and x.dtype == np.float64 and x.size:
        arr = x
    else:
        try:
            arr = np.array(x, dtype=float).reshape(-1)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"cannot interpret {x!r} as a point") from exc
        if arr.size == 0:
            raise InvalidInputError("a point needs at least one coordinate")
    if not all(map(math.isfinite, arr.tolist())):
        raise InvalidInputError(f"point has non-finite coordinates: {arr}")
    return arr


def _same_dim(x: np.ndarray, y: np.ndarray):
    if x.shape != y.shape:
        raise InvalidInputError(f"dimension mismatch: {x.size} vs {y.size}")


def _pnorm(vals: list, p: float) -> float:
    if p == 2.0:
        return math.hypot(*vals)
    if p == 1.0:
        return math.fsum(map(abs, vals))
    if math.isinf(p):
        return max(map(abs, vals))
    scale = max(map(abs, vals))
    if scale == 0.0:
        return 0.0
    return scale * math.fsum((abs(v) / scale) ** p for v in vals) ** (1.0 / p)


def norm(space: NormSpec, x) -> float:
    return _pnorm(as_point(x).tolist(), space.p)


def distance(space: NormSpec, x, y) -> float:
    x, y = as_point(x), as_point(y)
    _same_dim(x, y)
    return _pnorm((x - y).tolist(), space.p)


def affine_combine(lam: float, x, y) -> np.ndarray:
    """Return ``(1 - lam) * x + lam * y``.

    Evaluated as ``x + lam * (y - x)`` so that ``lam = 0`` returns ``x`` and
    ``lam = 1`` returns ``y`` exactly.
    """
    x, y = as_point(x), as_point(y)
    _same_dim(x, y)
    lam = float(lam)
    if not math.isfinite(lam):
        raise InvalidInputError(f"combination weight must be finite, got {lam}")
    if lam == 1.0:
        return y
    return x + lam * (y - x)


def xu_identity_residual(lam: float, s, t, space: NormSpec = EUCLIDEAN) -> float:
    """Defect of the Hilbert-space convexity identity

        ||lam s + (1-lam) t||^2 = lam ||s||^2 + (1-lam) ||t||^2 - lam (1-lam) ||s - t||^2

    which is the p = 2 case of Xu's characterisation of uniform convexity.
    Only the Euclidean norm is supported.
    """
    if not space.is_euclidean:
        raise UnsupportedNormError(f"identity only holds for p = 2, got p = {space}")
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"lambda must lie in [0, 1], got {lam}")
    s, t = as_point(s), as_point(t)
    _same_dim(s, t)
    mix = lam * s + (1.0 - lam) * t
    diff = s - t
    lhs = float(mix @ mix)
    rhs = lam * float(s @ s) + (1.0 - lam) * float(t @ t) - lam * (1.0 - lam) * float(diff @ diff)
    return abs(lhs - rhs)

"""One-step transition maps for Picard, Mann, Ishikawa, Noor and the
two-step averaged scheme

    r_n     = (1 - beta_n) s_n + beta_n K s_n
    s_{n+1} = (1 - alpha_n) r_n + alpha_n K s_n

together with the coefficient sequences that drive them.

Each stepper has an exact evaluation cost: Picard, Mann and the new scheme
call K once, Ishikawa twice, Noor three times.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidParameterError, InvalidSpecError
from .mappings import EvalCounter, Mapping, evaluate
from .space import affine_combine

SCHEME_KINDS = ("picard", "mann", "ishikawa", "noor", "new")
AVERAGED_KINDS = ("mann", "ishikawa", "noor", "new")

_REQUIRED = {
    "picard": (),
    "mann": ("alpha",),
    "ishikawa": ("alpha", "beta"),
    "noor": ("alpha", "beta", "gamma"),
    "new": ("alpha", "beta"),
}


def _check_open_unit(value: float, what: str = "coefficient") -> float:
    if not 0.0 < value < 1.0:
        raise InvalidParameterError(f"{what} must lie strictly inside (0, 1), got {value!r}")
    return value


@dataclass(frozen=True)
class ParamSeq:
    """A coefficient rule n -> value in (0, 1), for n = 1, 2, ...

    ``kind`` is ``"constant"`` (one value), ``"rational"`` (a, b, c, d meaning
    (a n + b) / (c n + d)) or ``"table"`` (explicit values, the last one
    repeated beyond the end).
    """

    kind: str
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.kind == "constant":
            if len(vals) != 1:
                raise InvalidParameterError("constant sequence takes exactly one value")
            _check_open_unit(vals[0])
        elif self.kind == "table":
            if not vals:
                raise InvalidParameterError("table sequence needs at least one value")
            for v in vals:
                _check_open_unit(v)
        elif self.kind == "rational":
            if len(vals) != 4:
                raise InvalidParameterError("rational sequence takes (a, b, c, d)")
            self(1)
        else:
            raise InvalidParameterError(f"unknown sequence kind {self.kind!r}")

    @classmethod
    def constant(cls, c: float) -> "ParamSeq":
        return cls("constant", (c,))

    @classmethod
    def rational(cls, a: float, b: float, c: float, d: float) -> "ParamSeq":
        return cls("rational", (a, b, c, d))

    @classmethod
    def table(cls, values) -> "ParamSeq":
        return cls("table", tuple(values))

    def __call__(self, n: int) -> float:
        if n < 1:
            raise InvalidParameterError(f"sequence index must be >= 1, got {n}")
        if self.kind == "constant":
            return self.values[0]
        if self.kind == "table":
            return self.values[min(n, len(self.values)) - 1]
        a, b, c, d = self.values
        den = c * n + d
        if den == 0:
            raise InvalidParameterError(f"rational sequence has a zero denominator at n = {n}")
        return _check_open_unit((a * n + b) / den, f"coefficient at n = {n}")

    def validate(self, n_max: int):
        """Raise unless every value for n = 1..n_max lies in (0, 1)."""
        if self.kind != "rational":
            return
        n = np.arange(1, int(n_max) + 1, dtype=float)
        a, b, c, d = self.values
        den = c * n + d
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = (a * n + b) / den
        bad = np.flatnonzero((den == 0) | ~(vals > 0) | ~(vals < 1))
        if bad.size:
            k = int(bad[0]) + 1
            raise InvalidParameterError(f"coefficient leaves (0, 1) at n = {k}")

    def to_config(self) -> dict:
        if self.kind == "constant":
            return {"constant": self.values[0]}
        return {self.kind: list(self.values)}

    @classmethod
    def from_config(cls, obj) -> "ParamSeq":
        """Accept ``0.2``, ``{"constant": 0.2}``, ``{"rational": [a, b, c, d]}``
        or ``{"table": [...]}``."""
        if isinstance(obj, ParamSeq):
            return obj
        if isinstance(obj, numbers.Real) and not isinstance(obj, bool):
            return cls.constant(obj)
        if isinstance(obj, dict) and len(obj) == 1:
            (kind, val), = obj.items()
            if kind == "constant" and isinstance(val, numbers.Real):
                return cls.constant(val)
            if kind in ("rational", "table") and isinstance(val, (list, tuple)):
                return cls(kind, tuple(val))
        raise InvalidParameterError(f"cannot interpret {obj!r} as a coefficient sequence")

    @classmethod
    def parse(cls, text: str) -> "ParamSeq":
        """Command-line form: ``0.2``, ``rational:1,0,2,1``, ``table:0.3,0.4``."""
        text = text.strip()
        kind, sep, rest = text.partition(":")
        try:
            if not sep:
                return cls.constant(float(text))
            nums = [float(v) for v in rest.split(",") if v.strip()]
        except ValueError:
            raise InvalidParameterError(f"cannot parse coefficient sequence {text!r}") from None
        if kind == "constant" and len(nums) == 1:
            return cls.constant(nums[0])
        if kind in ("rational", "table"):
            return cls(kind, tuple(nums))
        raise InvalidParameterError(f"cannot parse coefficient sequence {text!r}")

    def __str__(self):
        if self.kind == "constant":
            return f"{self.values[0]:g}"
        return f"{self.kind}:" + ",".join(f"{v:g}" for v in self.values)


def param_value(seq: ParamSeq, n: int) -> float:
    return seq(n)


# The coefficients used for the published comparison table.
PAPER_ALPHA = ParamSeq.constant(0.2)
PAPER_BETA = ParamSeq.rational(1, 0, 2, 1)   # n / (2n + 1)
PAPER_GAMMA = ParamSeq.rational(1, 0, 1, 1)  # n / (n + 1)


@dataclass(frozen=True)
class SchemeSpec:
    kind: str
    alpha: Optional[ParamSeq] = None
    beta: Optional[ParamSeq] = None
    gamma: Optional[ParamSeq] = None

    def __post_init__(self):
        if self.kind not in _REQUIRED:
            raise InvalidSpecError(f"unknown scheme {self.kind!r}; choose from {SCHEME_KINDS}")
        missing = [c for c in _REQUIRED[self.kind] if getattr(self, c) is None]
        if missing:
            raise InvalidSpecError(f"{self.kind} scheme requires {', '.join(missing)}")

    @classmethod
    def paper(cls, kind: str) -> "SchemeSpec":
        """The scheme with the coefficients of the published example."""
        if kind not in _REQUIRED:
            raise InvalidSpecError(f"unknown scheme {kind!r}; choose from {SCHEME_KINDS}")
        coeffs = dict(alpha=PAPER_ALPHA, beta=PAPER_BETA, gamma=PAPER_GAMMA)
        return cls(kind, **{c: coeffs[c] for c in _REQUIRED[kind]})

    @property
    def evals_per_step(self) -> int:
        return {"picard": 1, "mann": 1, "ishikawa": 2, "noor": 3, "new": 1}[self.kind]

    def validate(self, n_max: int):
        for c in _REQUIRED[self.kind]:
            getattr(self, c).validate(n_max)

    def to_config(self) -> dict:
        out = {"kind": self.kind}
        for c in _REQUIRED[self.kind]:
            out[c] = getattr(self, c).to_config()
        return out

    @classmethod
    def from_config(cls, obj) -> "SchemeSpec":
        if isinstance(obj, str):
            return cls.paper(obj)
        if not isinstance(obj, dict) or "kind" not in obj:
            raise InvalidSpecError(f"scheme entry needs a 'kind': {obj!r}")
        kind = obj["kind"]
        if kind not in _REQUIRED:
            raise InvalidSpecError(f"unknown scheme {kind!r}; choose from {SCHEME_KINDS}")
        base = cls.paper(kind)
        coeffs = {c: (ParamSeq.from_config(obj[c]) if c in obj else getattr(base, c))
                  for c in ("alpha", "beta", "gamma")}
        return cls(kind, **coeffs)


def step_picard(mapping: Mapping, s, n: int, spec: SchemeSpec, counter: EvalCounter):
    return evaluate(mapping, s, counter)


def step_mann(mapping: Mapping, s, n: int, spec: SchemeSpec, counter: EvalCounter):
    a = spec.alpha(n)
    return affine_combine(a, s, evaluate(mapping, s, counter))


def step_ishikawa(mapping: Mapping, s, n: int, spec: SchemeSpec, counter: EvalCounter):
    a, b = spec.alpha(n), spec.beta(n)
    t = affine_combine(b, s, evaluate(mapping, s, counter))
    return affine_combine(a, s, evaluate(mapping, t, counter))


def step_noor(mapping: Mapping, s, n: int, spec: SchemeSpec, counter: EvalCounter):
    a, b, g = spec.alpha(n), spec.beta(n), spec.gamma(n)
    r = affine_combine(g, s, evaluate(mapping, s, counter))
    t = affine_combine(b, s, evaluate(mapping, r, counter))
    return affine_combine(a, s, evaluate(mapping, t, counter))


def step_new(mapping: Mapping, s, n: int, spec: SchemeSpec, counter: EvalCounter):
    a, b = spec.alpha(n), spec.beta(n)
    ks = evaluate(mapping, s, counter)
    # the intermediate point (r_n, also written t_n) reuses K s_n
    intermediate = affine_combine(b, s, ks)
    return affine_combine(a, intermediate, ks)


STEPPERS = {
    "picard": step_picard,
    "mann": step_mann,
    "ishikawa": step_ishikawa,
    "noor": step_noor,
    "new": step_new,
}


def step(mapping: Mapping, s, n: int, spec: SchemeSpec, counter: EvalCounter):
    return STEPPERS[spec.kind](mapping, s, n, spec, counter)


def effective_mann_lambda(alpha: float, beta: float) -> float:
    """Mann weight reproducing one step of the new scheme.

    Expanding the two lines gives
    s' = (1 - alpha)(1 - beta) s + (alpha + (1 - alpha) beta) K s,
    so the step is a Mann step with lambda = alpha + (1 - alpha) beta.
    The closed endpoints are accepted to expose the degenerate limits.
    """
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not 0.0 <= v <= 1.0:
            raise InvalidParameterError(f"{name} must lie in [0, 1], got {v!r}")
    return alpha + (1.0 - alpha) * beta


def equivalent_mann_spec(alpha: ParamSeq, beta: ParamSeq, steps: int) -> SchemeSpec:
    """Mann scheme whose n-th weight is ``effective_mann_lambda(alpha(n), beta(n))``."""
    lam = [effective_mann_lambda(alpha(n), beta(n)) for n in range(1, max(steps, 1) + 1)]
    return SchemeSpec("mann", alpha=ParamSeq.table(lam))

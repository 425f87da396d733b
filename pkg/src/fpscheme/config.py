"""Run configuration: a small JSON document validated into :class:`RunConfig`.

Example::

    {
      "map": "paper_example",
      "schemes": ["mann", {"kind": "new", "alpha": {"constant": 0.2},
                           "beta": {"rational": [1, 0, 2, 1]}}],
      "initial_points": [0.01, -0.5],
      "p": 2,
      "stop": {"fixed_steps": 20},
      "tolerances": [1e-3, 1e-5, 1e-8],
      "out": "runs.csv",
      "format": "csv",
      "seed": 0
    }

``map`` may instead be an inline affine map::

    {"affine": {"A": [[0, -1], [1, 0]], "b": [0, 0],
                "lower": [-1, -1], "upper": [1, 1]}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, FixedPointError
from .mappings import Mapping, affine_map, get_map, nonexpansiveness_probe
from .runner import StopRule
from .schemes import AVERAGED_KINDS, SchemeSpec
from .space import EUCLIDEAN, NormSpec, as_point

DEFAULT_TOLERANCES = (1e-3, 1e-5, 1e-8)
PAPER_INITIAL_POINTS = (0.01, -0.5)
FORMATS = ("csv", "json")
_KNOWN_KEYS = {"map", "schemes", "initial_points", "p", "stop", "tolerances",
               "out", "format", "seed"}


@dataclass
class RunConfig:
    mapping: Mapping
    schemes: list
    initial_points: list
    space: NormSpec = EUCLIDEAN
    stop: StopRule = field(default_factory=StopRule)
    tolerances: tuple = DEFAULT_TOLERANCES
    out: Optional[Path] = None
    format: str = "csv"
    seed: int = 0


def _load_map(obj, space, seed, problems) -> Optional[Mapping]:
    if isinstance(obj, str):
        try:
            return get_map(obj)
        except FixedPointError as exc:
            problems.append(f"map: {exc}")
            return None
    if isinstance(obj, dict) and set(obj) == {"affine"} and isinstance(obj["affine"], dict):
        spec = obj["affine"]
        missing = [k for k in ("A", "b", "lower", "upper") if k not in spec]
        if missing:
            problems.append(f"map.affine: missing {', '.join(missing)}")
            return None
        claims = bool(spec.get("claims_nonexpansive", True))
        try:
            mapping = affine_map(spec["A"], spec["b"], spec["lower"], spec["upper"],
                                 id=str(spec.get("id", "affine")), claims_nonexpansive=claims)
        except (FixedPointError, TypeError, ValueError) as exc:
            problems.append(f"map.affine: {exc}")
            return None
        if claims:
            ratio = nonexpansiveness_probe(mapping, 10_000, seed, space)
            if ratio > 1 + 1e-9:
                problems.append(f"map.affine: claims to be nonexpansive but the probe "
                                f"found a Lipschitz ratio of {ratio:.6g}")
        return mapping
    problems.append(f"map: expected a catalog id or {{'affine': {{...}}}}, got {obj!r}")
    return None


def parse_config(doc: dict) -> RunConfig:
    """Validate a config document, reporting every problem at once."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    problems = [f"unknown key {k!r}" for k in doc if k not in _KNOWN_KEYS]

    space = EUCLIDEAN
    try:
        space = NormSpec.parse(doc.get("p", 2))
    except FixedPointError as exc:
        problems.append(f"p: {exc}")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        problems.append(f"seed: expected an integer, got {seed!r}")
        seed = 0

    stop = StopRule()
    stop_doc = doc.get("stop", {})
    try:
        if not isinstance(stop_doc, dict):
            raise TypeError("expected an object")
        stop = StopRule(**stop_doc)
    except (FixedPointError, TypeError) as exc:
        problems.append(f"stop: {exc}")

    mapping = _load_map(doc.get("map", "paper_example"), space, seed, problems)

    schemes = []
    for i, entry in enumerate(doc.get("schemes", list(AVERAGED_KINDS))):
        try:
            spec = SchemeSpec.from_config(entry)
            spec.validate(stop.max_iters)
            schemes.append(spec)
        except FixedPointError as exc:
            problems.append(f"schemes[{i}]: {exc}")

    points = []
    for i, x0 in enumerate(doc.get("initial_points", list(PAPER_INITIAL_POINTS))):
        try:
            x0 = as_point(x0)
        except FixedPointError as exc:
            problems.append(f"initial_points[{i}]: {exc}")
            continue
        if mapping is not None and not mapping.contains(x0):
            problems.append(f"initial_points[{i}]: {x0.tolist()} is outside the domain "
                            f"of {mapping.id}")
        points.append(x0)
    if not points:
        problems.append("initial_points: need at least one point")

    tolerances = doc.get("tolerances", list(DEFAULT_TOLERANCES))
    if not (isinstance(tolerances, list) and tolerances
            and all(isinstance(t, (int, float)) and t > 0 for t in tolerances)):
        problems.append(f"tolerances: expected a list of positive numbers, got {tolerances!r}")
        tolerances = DEFAULT_TOLERANCES

    fmt = doc.get("format", "csv")
    if fmt not in FORMATS:
        problems.append(f"format: expected one of {FORMATS}, got {fmt!r}")

    if problems:
        raise ConfigError(problems)
    out = doc.get("out")
    return RunConfig(mapping, schemes, points, space, stop, tuple(float(t) for t in tolerances),
                     Path(out) if out else None, fmt, seed)


def load_config(path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return parse_config(doc)


def point_label(x0: np.ndarray) -> str:
    return ",".join(f"{v:g}" for v in x0)

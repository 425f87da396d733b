"""Fixed-point iteration schemes for nonexpansive maps.

Provides Picard, Mann, Ishikawa, Noor and a two-step averaged scheme, a
trajectory runner with residual and error tracking, property checks for the
convergence theory, and a regression harness against a published table of
iterates.
"""

from .diagnostics import (PropertyReport, check_afps, check_fejer, check_mann_equivalence,
                          condition_I_margin)
from .errors import (ConfigError, DataFormatError, DomainViolationError, FixedPointError,
                     InvalidInputError, InvalidParameterError, InvalidSpecError,
                     UnsupportedMapError, UnsupportedNormError)
from .mappings import (CATALOG, EvalCounter, Mapping, affine_map, evaluate, get_map,
                       nonexpansiveness_probe, residual)
from .runner import StopRule, Trajectory, TrajectoryRecord, evals_to_tol, iterations_to_tol, run
from .schemes import (ParamSeq, SchemeSpec, effective_mann_lambda, param_value, step,
                      step_ishikawa, step_mann, step_new, step_noor, step_picard)
from .space import EUCLIDEAN, NormSpec, affine_combine, distance, norm, xu_identity_residual

__version__ = "0.1.0"

from fractions import Fraction

import numpy as np
import pytest

import exact_oracle
from fpscheme.errors import DomainViolationError, InvalidInputError
from fpscheme.mappings import CATALOG, affine_map, get_map
from fpscheme.runner import StopRule, evals_to_tol, iterations_to_tol, run
from fpscheme.schemes import AVERAGED_KINDS, SCHEME_KINDS, ParamSeq, SchemeSpec

TABLE = StopRule.fixed(20)


def paper_run(kind, x0, stop=TABLE):
    return run(get_map("paper_example"), SchemeSpec.paper(kind), [x0], stop=stop)


def test_new_scheme_reaches_half_at_step_six():
    traj = paper_run("new", 0.01)
    assert len(traj) == 20 and traj.stop_reason == "fixed_steps"
    assert round(traj[6].iterate[0], 5) == 0.5


def test_mann_step_twenty():
    assert round(paper_run("mann", 0.01)[20].iterate[0], 5) == 0.49997


def test_start_at_fixed_point_stops_immediately():
    for kind in SCHEME_KINDS:
        spec = SchemeSpec("picard") if kind == "picard" else SchemeSpec.paper(kind)
        traj = run(get_map("paper_example"), spec, [0.5], stop=StopRule(residual_tol=1e-10))
        assert len(traj) == 1 and traj.stop_reason == "residual_tol"
        assert traj[1].residual == 0.0 and traj[1].cumulative_evals == 0


def test_record_bookkeeping():
    traj = paper_run("noor", -0.5)
    assert [r.n for r in traj.records] == list(range(1, 21))
    assert [r.cumulative_evals for r in traj.records] == [3 * k for k in range(20)]
    for r in traj.records:
        assert r.residual == pytest.approx(abs(2 * r.iterate[0] - 1), abs=1e-15)
        assert r.error_to_F == pytest.approx(abs(r.iterate[0] - 0.5), abs=1e-15)


# Frozen from the exact rational oracle (tests/exact_oracle.py).
ITERS_5E5 = {("mann", 0.01): 19, ("mann", -0.5): 21, ("ishikawa", 0.01): 41,
             ("ishikawa", -0.5): 44, ("noor", 0.01): 21, ("noor", -0.5): 22,
             ("new", 0.01): 5, ("new", -0.5): 5}
ITERS_5E6 = {("mann", 0.01): 24, ("mann", -0.5): 25, ("ishikawa", 0.01): 51,
             ("ishikawa", -0.5): 54, ("noor", 0.01): 26, ("noor", -0.5): 27,
             ("new", 0.01): 6, ("new", -0.5): 6}


def test_frozen_values_match_oracle():
    for table, tol in ((ITERS_5E5, "5e-5"), (ITERS_5E6, "5e-6")):
        for (kind, x0), n in table.items():
            assert exact_oracle.first_within(kind, Fraction(str(x0)), Fraction(tol)) == n


@pytest.mark.parametrize("kind", AVERAGED_KINDS)
@pytest.mark.parametrize("x0", [0.01, -0.5])
def test_iterations_to_tol(kind, x0):
    traj = paper_run(kind, x0, StopRule.fixed(80))
    assert iterations_to_tol(traj, [0.5], 5e-5) == ITERS_5E5[kind, x0]
    assert iterations_to_tol(traj, [0.5], 5e-6) == ITERS_5E6[kind, x0]


def test_mann_hitting_step_within_derived_range():
    # error 0.49 * 0.6**(n-1) <= 5e-5
    n = next(k for k in range(1, 100) if 0.49 * 0.6 ** (k - 1) <= 5e-5)
    assert 17 <= n <= 25
    assert iterations_to_tol(paper_run("mann", 0.01), [0.5], 5e-5) == n


def test_evals_to_tol():
    new = paper_run("new", 0.01)
    assert evals_to_tol(new, [0.5], 5e-5) == 4
    assert evals_to_tol(new, [0.5], 5e-6) == 5
    ish = paper_run("ishikawa", 0.01, StopRule.fixed(80))
    n = iterations_to_tol(ish, [0.5], 5e-5)
    assert evals_to_tol(ish, [0.5], 5e-5) == 2 * (n - 1)
    start = paper_run("new", 0.5)
    assert iterations_to_tol(start, [0.5], 1e-3) == 1
    assert evals_to_tol(start, [0.5], 1e-3) == 0
    assert iterations_to_tol(paper_run("ishikawa", 0.01), [0.5], 5e-5) is None
    assert evals_to_tol(paper_run("ishikawa", 0.01), [0.5], 5e-5) is None


def test_stop_rule_order_and_validation():
    m = get_map("paper_example")
    spec = SchemeSpec.paper("mann")
    assert run(m, spec, [0.01], stop=StopRule(max_iters=7, residual_tol=None)).stop_reason == "max_iters"
    traj = run(m, spec, [0.01], stop=StopRule(residual_tol=1e-3))
    assert traj.stop_reason == "residual_tol" and traj.final.residual <= 1e-3
    assert traj[len(traj) - 1].residual > 1e-3
    traj = run(m, spec, [0.01], stop=StopRule(residual_tol=1e-9, error_tol=1e-3))
    assert traj.stop_reason == "error_tol"
    # fixed_steps ignores tolerances
    assert len(run(m, spec, [0.5], stop=StopRule.fixed(5))) == 5
    for bad in (dict(max_iters=0), dict(fixed_steps=10, max_iters=5), dict(residual_tol=0.0)):
        with pytest.raises(InvalidInputError):
            StopRule(**bad)


def test_default_stop_rule():
    traj = run(get_map("halving"), SchemeSpec.paper("new"), [0.9])
    assert traj.stop_reason == "residual_tol" and traj.final.residual <= 1e-10


def test_domain_violations():
    grow = affine_map([[1.5]], [0.0], [-1], [1], id="grow", claims_nonexpansive=False)
    traj = run(grow, SchemeSpec("picard"), [0.5], stop=StopRule.fixed(20))
    assert traj.stop_reason == "domain_violation"
    assert all(grow.contains(r.iterate) for r in traj.records)
    assert len(traj) == 2            # 0.5, 0.75; 1.125 escapes
    with pytest.raises(DomainViolationError):
        run(grow, SchemeSpec("picard"), [3.0])


def test_runs_are_bitwise_deterministic():
    m = get_map("rot_disc")
    spec = SchemeSpec("noor", ParamSeq.constant(0.3), ParamSeq.table([0.2, 0.7]),
                      ParamSeq.rational(1, 1, 3, 2))
    a = run(m, spec, [0.3, -0.6], stop=StopRule.fixed(100))
    b = run(m, spec, [0.3, -0.6], stop=StopRule.fixed(100))
    assert a.iterates.tobytes() == b.iterates.tobytes()
    assert a.residuals.tobytes() == b.residuals.tobytes()


def test_input_point_is_not_frozen_by_run():
    x0 = np.array([0.2])
    run(get_map("paper_example"), SchemeSpec.paper("new"), x0, stop=StopRule.fixed(3))
    x0[0] = 0.3


@pytest.mark.parametrize("map_id", sorted(CATALOG))
@pytest.mark.parametrize("kind", SCHEME_KINDS)
def test_iterates_stay_in_domain(map_id, kind):
    m = CATALOG[map_id]
    spec = SchemeSpec("picard") if kind == "picard" else SchemeSpec.paper(kind)
    for x0 in m.sample(np.random.default_rng(3), 5):
        traj = run(m, spec, x0, stop=StopRule.fixed(200))
        assert traj.stop_reason == "fixed_steps"
        assert all(m.contains(r.iterate) for r in traj.records)


@pytest.mark.parametrize("kind", AVERAGED_KINDS)
def test_strong_convergence_after_200_steps(kind):
    for x0 in (0.01, -0.5):
        traj = paper_run(kind, x0, StopRule.fixed(200))
        assert traj.final.error_to_F <= 1e-10
        assert traj.final.residual <= 1e-8

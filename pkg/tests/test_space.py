import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpscheme.errors import InvalidInputError, UnsupportedNormError
from fpscheme.space import (EPS, EUCLIDEAN, NormSpec, affine_combine, as_point, distance, norm,
                            xu_identity_residual)

L1, L2, LINF = NormSpec(1), NormSpec(2), NormSpec(math.inf)

reals = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
unit = st.floats(0.0, 1.0)


def vectors(d=None):
    size = st.integers(1, 8) if d is None else st.just(d)
    return size.flatmap(lambda n: st.lists(reals, min_size=n, max_size=n).map(np.array))


def vector_pairs():
    return st.integers(1, 8).flatmap(lambda n: st.tuples(vectors(n), vectors(n)))


@pytest.mark.parametrize("space, x, expected", [
    (L2, [3, 4], 5.0),
    (L1, [3, -4], 7.0),
    (LINF, [3, -4], 4.0),
    (NormSpec(3), [1, 1], 2 ** (1 / 3)),
])
def test_norm_examples(space, x, expected):
    assert norm(space, x) == pytest.approx(expected, rel=1e-15)


def test_norm_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        norm(L2, [1.0, math.nan])
    with pytest.raises(InvalidInputError):
        as_point([math.inf])


def test_norm_spec_parsing():
    assert NormSpec.parse("inf").p == math.inf
    assert NormSpec.parse("1.5").p == 1.5
    with pytest.raises(InvalidInputError):
        NormSpec(0.5)


def test_distance_examples():
    assert distance(L2, [0.01], [0.5]) == pytest.approx(0.49, abs=1e-15)
    assert distance(L2, [0.3, -2.0], [0.3, -2.0]) == 0.0
    assert distance(L2, [1, 0], [0, 1]) == pytest.approx(math.sqrt(2), rel=1e-15)


def test_distance_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        distance(L2, [1.0], [1.0, 2.0])


def test_affine_combine_examples():
    assert affine_combine(0.2, [0.01], [0.99])[0] == pytest.approx(0.206, abs=1e-15)
    x, y = as_point([0.1, -3.0]), as_point([7.0, 2.5])
    assert np.array_equal(affine_combine(0.0, x, y), x)
    assert np.array_equal(affine_combine(1.0, x, y), y)
    with pytest.raises(InvalidInputError):
        affine_combine(0.5, [1.0], [1.0, 2.0])


@settings(max_examples=300)
@given(unit, reals, reals)
def test_affine_combine_collinear_1d(lam, x, y):
    z = affine_combine(lam, [x], [y])
    lhs = distance(L2, z, [x]) + distance(L2, z, [y])
    assert lhs == pytest.approx(abs(x - y), rel=1e-12, abs=1e-12)


@settings(max_examples=300)
@given(unit, vector_pairs())
def test_affine_combine_commutes(lam, xy):
    x, y = xy
    a = affine_combine(lam, x, y)
    b = affine_combine(1.0 - lam, y, x)
    scale = np.maximum(np.abs(x), np.abs(y))
    assert np.all(np.abs(a - b) <= 4 * EPS * scale)


def test_xu_identity_examples():
    assert xu_identity_residual(0.5, [1.0], [-1.0]) <= 4 * EPS
    # hand expansion: mix = (0.6, 1.4), both sides equal 2.32
    assert xu_identity_residual(0.3, [2.0, 0.0], [0.0, 2.0]) <= 64 * EPS * 8
    assert xu_identity_residual(0.0, [1.3, 2.0], [-0.4, 5.0]) == 0.0


def test_xu_identity_rejects_other_norms():
    with pytest.raises(UnsupportedNormError):
        xu_identity_residual(0.5, [1.0], [0.0], NormSpec(3))
    with pytest.raises(UnsupportedNormError):
        xu_identity_residual(0.5, [1.0], [0.0], LINF)


@settings(max_examples=1000)
@given(unit, vector_pairs())
def test_xu_identity_bound(lam, st_):
    s, t = st_
    bound = 64 * EPS * (float(s @ s) + float(t @ t))
    assert xu_identity_residual(lam, s, t, EUCLIDEAN) <= bound


@pytest.mark.parametrize("space", [L1, L2, LINF], ids=["p1", "p2", "pinf"])
def test_norm_axioms_randomised(space):
    rng = np.random.default_rng(7)
    for _ in range(1000):
        d = int(rng.integers(1, 9))
        x, y = rng.normal(size=d) * 10, rng.normal(size=d) * 10
        c = float(rng.normal() * 5)
        nx, ny = norm(space, x), norm(space, y)
        assert norm(space, x + y) <= (nx + ny) * (1 + 4 * EPS)
        assert norm(space, c * x) == pytest.approx(abs(c) * nx, rel=8 * EPS * d)
    assert norm(space, np.zeros(3)) == 0.0

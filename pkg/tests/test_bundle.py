import math

import numpy as np
import pytest

from cgmlab.core.bundle import (
    BundlePoint,
    BundleTangent,
    CurveDatum,
    MetricParams,
    berger_frame_gram,
    berger_metric,
    canonical_vertical_U,
    connection_split,
    connection_split_datum,
    five_point,
    horizontal_curve,
    horizontal_lift,
    lift_pair,
    metric_h,
    unit_bundle_gram,
    vertical_curve,
    vertical_lift,
)
from cgmlab.core.lie_bridge import frame_images
from cgmlab.core.model_spaces import ambient_dot, frame_fields, hyperbolic_plane, sphere2, sphere3
from cgmlab.core.sampling import sample_bundle_point, sample_point, sample_tangent
from cgmlab.errors import DomainError, InvalidInputError
from cgmlab.schemas import FiberSign


def _euclidean_unit(v):
    return v / float(np.linalg.norm(v.components))


@pytest.fixture
def north():
    base = sphere2(1.0)
    return BundlePoint(base, base.vector((0.0, 0.0, 1.0)), base.vector((1.0, 0.0, 0.0)), unit=True)


# ---------- parameters and points ----------

def test_metric_params_validation():
    with pytest.raises(InvalidInputError):
        MetricParams(m=1.0, r=-0.5, c=1.0)
    with pytest.raises(InvalidInputError):
        MetricParams(m=1.0, r=0.0, c=0.0)
    with pytest.raises(InvalidInputError):
        MetricParams(m=math.inf, r=0.0, c=1.0)


def test_metric_params_for_base_picks_fibre_sign():
    assert MetricParams.for_base(sphere2(2.0), 1.0, 0.0).fiber_sign == FiberSign.definite
    hyper = MetricParams.for_base(hyperbolic_plane(2.0), 1.0, 0.0)
    assert hyper.fiber_sign == FiberSign.indefinite and hyper.sign == -1.0 and hyper.c == 2.0
    with pytest.raises(InvalidInputError):
        MetricParams.for_base(sphere3(1.0), 1.0, 0.0)


def test_omega_domains():
    params = MetricParams(m=1.0, r=1.0, c=1.0)
    assert params.omega(1.0) == 0.5
    with pytest.raises(DomainError):
        params.omega(-1.0)
    with pytest.raises(DomainError):
        params.omega_r(-1.0)


def test_bundle_point_validation():
    base = sphere2(1.0)
    x = base.vector((0.0, 0.0, 1.0))
    with pytest.raises(InvalidInputError):
        BundlePoint(base, x, base.vector((2.0, 0.0, 0.0)), unit=True)
    with pytest.raises(InvalidInputError):
        BundlePoint(base, x, base.vector((0.0, 0.0, 1.0)))
    with pytest.raises(InvalidInputError):
        BundlePoint(sphere3(1.0), sphere3(1.0).vector((1, 0, 0, 0)), sphere3(1.0).vector((0, 1, 0, 0)))


def test_tangents_at_different_points_do_not_mix(north, rng):
    other = sample_bundle_point(sphere2(1.0), rng)
    a = horizontal_lift(north, north.e)
    b = horizontal_lift(other, other.e)
    with pytest.raises(InvalidInputError):
        a + b
    with pytest.raises(InvalidInputError):
        metric_h(MetricParams(m=0.0, r=0.0, c=1.0), a, b)


# ---------- metric_h ----------

def test_metric_blocks_at_unit_point(north):
    f = north.base.vector((0.0, 1.0, 0.0))
    eh, fh = horizontal_lift(north, north.e), horizontal_lift(north, f)
    U, fv = canonical_vertical_U(north), vertical_lift(north, f)
    params = MetricParams(m=1.0, r=1.0, c=1.0)
    assert metric_h(params, eh, eh) == 1.0
    assert metric_h(params, eh, fh) == 0.0
    assert metric_h(params, eh, U) == 0.0
    # omega = 1/2 at a unit vector; r only weighs the U direction
    assert metric_h(params, U, U) == pytest.approx(1.0)
    assert metric_h(params, fv, fv) == pytest.approx(0.5)
    assert metric_h(MetricParams(m=2.0, r=0.0, c=1.0), U, U) == pytest.approx(0.25)


def test_indefinite_metric_flips_fibre(rng):
    base = hyperbolic_plane(1.0)
    bp = sample_bundle_point(base, rng)
    Y = sample_tangent(base, bp.x, rng)
    params = MetricParams.for_base(base, 1.5, 0.0)
    Z = vertical_lift(bp, Y)
    assert metric_h(params, Z, Z) == pytest.approx(-(0.5 ** 1.5) * ambient_dot(Y, Y), rel=1e-12)


def test_indefinite_metric_needs_hyperbolic_base(north):
    params = MetricParams(m=1.0, r=0.0, c=1.0, fiber_sign=FiberSign.indefinite)
    U = canonical_vertical_U(north)
    with pytest.raises(InvalidInputError):
        metric_h(params, U, U)


def test_metric_rejects_parameters_for_another_base(north):
    U = canonical_vertical_U(north)
    with pytest.raises(InvalidInputError):
        metric_h(MetricParams(m=1.0, r=0.0, c=4.0), U, U)
    with pytest.raises(InvalidInputError):
        unit_bundle_gram(MetricParams(m=1.0, r=0.0, c=4.0), [U])


def test_unit_bundle_gram_matches_metric_h(rng):
    params = MetricParams(m=0.7, r=2.0, c=3.0)
    base = sphere2(3.0)
    bp = sample_bundle_point(base, rng)
    tangents = [BundleTangent(bp, sample_tangent(base, bp.x, rng), sample_tangent(base, bp.x, rng)) for _ in range(4)]
    expected = np.array([[metric_h(params, a, b) for b in tangents] for a in tangents])
    assert np.max(np.abs(unit_bundle_gram(params, tangents) - expected)) <= 1e-13
    with pytest.raises(InvalidInputError):
        unit_bundle_gram(params, [])


def test_metric_is_symmetric(rng):
    params = MetricParams(m=0.7, r=2.0, c=3.0)
    base = sphere2(3.0)
    for _ in range(20):
        bp = sample_bundle_point(base, rng, unit=False)
        Z1 = BundleTangent(bp, sample_tangent(base, bp.x, rng), sample_tangent(base, bp.x, rng))
        Z2 = BundleTangent(bp, sample_tangent(base, bp.x, rng), sample_tangent(base, bp.x, rng))
        assert metric_h(params, Z1, Z2) == pytest.approx(metric_h(params, Z2, Z1), rel=1e-14, abs=1e-15)


def test_wrong_m_breaks_the_isometry():
    p = sphere3(1.0).vector((1.0, 0.0, 0.0, 0.0))
    gram = unit_bundle_gram(MetricParams(m=0.0, r=0.0, c=4.0), frame_images(p, 4.0))
    assert np.max(np.abs(gram - np.eye(3))) == pytest.approx(3.0, abs=1e-12)


def test_unit_bundle_gram_ignores_r(rng):
    space = sphere3(0.5)
    for _ in range(20):
        images = frame_images(sample_point(space, rng), 2.0)
        base = unit_bundle_gram(MetricParams(m=1.0, r=0.0, c=2.0), images)
        for r in (1.0, 5.0):
            assert np.max(np.abs(unit_bundle_gram(MetricParams(m=1.0, r=r, c=2.0), images) - base)) <= 1e-15


# ---------- connection map ----------

def test_five_point_is_exact_on_quartics():
    h = 0.1
    values = [np.array([t ** 4 - 2.0 * t ** 3 + 3.0 * t]) for t in (-2 * h, -h, h, 2 * h)]
    assert five_point(values, h)[0] == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize("base", [sphere2(1.0), sphere2(4.0), hyperbolic_plane(1.0), hyperbolic_plane(2.0)])
def test_connection_split_of_horizontal_and_vertical_curves(base, rng):
    for _ in range(10):
        bp = sample_bundle_point(base, rng)
        X = _euclidean_unit(sample_tangent(base, bp.x, rng))
        Xs, Ys = connection_split(bp, horizontal_curve(bp, X))
        assert Xs.allclose(X, 1e-8) and Ys.allclose(base.zero(), 1e-8)

        Y = _euclidean_unit(sample_tangent(base, bp.x, rng))
        Xs, Ys = connection_split(bp, vertical_curve(bp, Y))
        assert Xs.allclose(base.zero(), 1e-8) and Ys.allclose(Y, 1e-8)


@pytest.mark.parametrize("base", [sphere2(1.0), hyperbolic_plane(1.0)])
def test_connection_split_matches_closed_form(base, rng):
    for _ in range(10):
        bp = sample_bundle_point(base, rng)
        datum = CurveDatum(
            _euclidean_unit(sample_tangent(base, bp.x, rng)), _euclidean_unit(base.vector(rng.standard_normal(3)))
        )
        X, Y = connection_split_datum(bp, datum)
        closed = lift_pair(bp, datum)
        assert X.allclose(closed.X, 1e-7) and Y.allclose(closed.Y, 1e-7)


def test_connection_split_rejects_foreign_curve(north):
    other = north.base.vector((1.0, 0.0, 0.0))
    with pytest.raises(InvalidInputError):
        connection_split(north, lambda t: (other, north.base.vector((0.0, 1.0, 0.0))))


# ---------- Berger metric ----------

def test_berger_metric_scales_the_fibre(s3, rng):
    eps = 0.5
    for _ in range(20):
        x = sample_point(s3, rng)
        X1, X2, X3 = frame_fields(s3, x).frame
        gram = np.array([[berger_metric(eps, x, V, W) for W in (X1, X2, X3)] for V in (X1, X2, X3)])
        assert np.allclose(gram, berger_frame_gram(eps), atol=1e-12)
        V, W = sample_tangent(s3, x, rng), sample_tangent(s3, x, rng)
        assert berger_metric(1.0, x, V, W) == pytest.approx(ambient_dot(V, W), abs=1e-12)


def test_berger_needs_positive_epsilon(s3):
    x = s3.vector((1.0, 0.0, 0.0, 0.0))
    with pytest.raises(InvalidInputError):
        berger_metric(0.0, x, x, x)
    with pytest.raises(InvalidInputError):
        berger_frame_gram(-1.0)
    assert np.array_equal(berger_frame_gram(0.5), np.diag([1.0, 1.0, 4.0]))

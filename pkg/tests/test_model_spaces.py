import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgmlab.core.model_spaces import (
    AmbientVector,
    Signature,
    ambient_dot,
    anti_de_sitter3,
    contains,
    exp_map,
    fiber_action,
    frame_fields,
    geodesic,
    geodesic_velocity,
    hopf_coordinates,
    hyperbolic_plane,
    parallel_transport,
    retract,
    sphere2,
    sphere3,
    stereographic_frame,
    stereographic_inverse,
    tangent_project,
    transport_between,
)
from cgmlab.core.sampling import make_rng, sample_point, sample_tangent, sample_unit_tangent
from cgmlab.errors import DomainError, InvalidInputError

seeds = st.integers(min_value=0, max_value=2**32 - 1)
two_dim = st.sampled_from([sphere2(1.0), sphere2(4.0), hyperbolic_plane(1.0), hyperbolic_plane(4.0)])


def _size(v: AmbientVector) -> float:
    return 1.0 + float(np.linalg.norm(v.components))


def test_signature_slot_count():
    assert Signature(2, 2).diag.tolist() == [1.0, 1.0, -1.0, -1.0]
    with pytest.raises(InvalidInputError):
        Signature(2, 3)


def test_ambient_vector_length_must_match_signature():
    with pytest.raises(InvalidInputError):
        AmbientVector((1.0, 0.0, 0.0), Signature(4, 0))


# ---------- ambient_dot ----------

def test_ambient_dot_euclidean_unit():
    e = AmbientVector((1.0, 0.0, 0.0, 0.0), Signature(4, 0))
    assert ambient_dot(e, e) == 1.0


def test_ambient_dot_timelike_slot():
    t = AmbientVector((0.0, 0.0, 0.0, 1.0), Signature(2, 2))
    assert ambient_dot(t, t) == -1.0


def test_ambient_dot_ads_frame_vector():
    space = anti_de_sitter3(1.0)
    X1, X2, X3 = frame_fields(space, space.vector((0.0, 0.0, 1.0, 0.0))).frame
    assert ambient_dot(X3, X3) == -1.0


def test_ambient_dot_signature_mismatch():
    u = AmbientVector((1.0, 0.0, 0.0, 0.0), Signature(4, 0))
    v = AmbientVector((1.0, 0.0, 0.0, 0.0), Signature(2, 2))
    with pytest.raises(InvalidInputError):
        ambient_dot(u, v)


# ---------- contains ----------

def test_contains_examples():
    assert contains(sphere2(4.0), sphere2(4.0).vector((0.0, 0.0, 0.5)))
    assert contains(hyperbolic_plane(4.0), hyperbolic_plane(4.0).vector((0.0, 0.0, 0.5)))
    assert contains(anti_de_sitter3(1.0), anti_de_sitter3(1.0).vector((0.0, 0.0, 1.0, 0.0)))


def test_contains_rejects_off_space_and_lower_sheet():
    assert not contains(sphere2(1.0), sphere2(1.0).vector((0.0, 0.0, 1.0 + 1e-9)))
    assert not contains(hyperbolic_plane(1.0), hyperbolic_plane(1.0).vector((0.0, 0.0, -1.0)))


def test_contains_signature_mismatch():
    with pytest.raises(InvalidInputError):
        contains(sphere3(1.0), sphere2(1.0).vector((0.0, 0.0, 1.0)))


# ---------- frame_fields ----------

def test_frame_fields_sphere_example():
    space = sphere3(1.0)
    X1, X2, X3 = frame_fields(space, space.vector((1.0, 0.0, 0.0, 0.0))).frame
    assert np.allclose(X3.components, (0, 1, 0, 0))
    assert np.allclose(X2.components, (0, 0, 1, 0))
    assert np.allclose(X1.components, (0, 0, 0, 1))


def test_frame_fields_ads_example():
    space = anti_de_sitter3(1.0)
    X1, X2, X3 = frame_fields(space, space.vector((0.0, 0.0, 1.0, 0.0))).frame
    assert np.allclose(X3.components, (0, 0, 0, 1))
    assert np.allclose(X2.components, (1, 0, 0, 0))
    assert np.allclose(X1.components, (0, 1, 0, 0))


def test_frame_fields_wrong_kind():
    with pytest.raises(InvalidInputError):
        frame_fields(sphere2(1.0), sphere2(1.0).vector((0.0, 0.0, 1.0)))


@pytest.mark.parametrize(
    "space, target",
    [
        (sphere3(1.0), np.eye(3)),
        (sphere3(0.25), np.eye(3)),
        (anti_de_sitter3(1.0), np.diag([1.0, 1.0, -1.0])),
        (anti_de_sitter3(2.25), np.diag([1.0, 1.0, -1.0])),
    ],
)
def test_frame_gram_at_random_points(space, target, rng):
    for _ in range(1000):
        x = sample_point(space, rng)
        fp = frame_fields(space, x)
        assert np.max(np.abs(fp.gram() - target)) <= 1e-12 * max(1.0, float(np.dot(x.components, x.components)) * space.c)
        for X in fp.frame:
            assert abs(ambient_dot(x, X)) <= 1e-12 * max(1.0, float(np.dot(x.components, x.components)))


# ---------- geodesic ----------

def test_geodesic_quarter_circle():
    space = sphere2(1.0)
    x, v = space.vector((0.0, 0.0, 1.0)), space.vector((1.0, 0.0, 0.0))
    assert geodesic(space, x, v, math.pi / 2).allclose(space.vector((1.0, 0.0, 0.0)), 1e-15)


def test_geodesic_hyperbolic_origin_and_scaled():
    unit = hyperbolic_plane(1.0)
    x = unit.vector((0.0, 0.0, 1.0))
    assert geodesic(unit, x, unit.vector((1.0, 0.0, 0.0)), 0.0).allclose(x)

    space = hyperbolic_plane(4.0)
    y = geodesic(space, space.vector((0.0, 0.0, 0.5)), space.vector((1.0, 0.0, 0.0)), 1.0)
    assert y.allclose(space.vector((math.sinh(2.0) / 2.0, 0.0, math.cosh(2.0) / 2.0)), 1e-14)


def test_geodesic_rejects_non_unit_or_non_tangent():
    space = sphere2(1.0)
    x = space.vector((0.0, 0.0, 1.0))
    with pytest.raises(InvalidInputError):
        geodesic(space, x, space.vector((2.0, 0.0, 0.0)), 1.0)
    with pytest.raises(InvalidInputError):
        geodesic(space, x, space.vector((0.0, 0.0, 1.0)), 1.0)


@given(seed=seeds, space=two_dim, t=st.floats(min_value=-2.0, max_value=2.0))
@settings(max_examples=200, deadline=None)
def test_geodesic_stays_on_space(seed, space, t):
    rng = make_rng(seed)
    x = sample_point(space, rng)
    v = sample_unit_tangent(space, x, rng)
    y = geodesic(space, x, v, t)
    assert abs(ambient_dot(y, y) - space.radius_sq) <= 1e-12 * max(1.0, float(np.dot(y.components, y.components)))


@given(seed=seeds, space=two_dim, s=st.floats(-1.0, 1.0), t=st.floats(-1.0, 1.0))
@settings(max_examples=200, deadline=None)
def test_geodesic_flow_property(seed, space, s, t):
    rng = make_rng(seed)
    x = sample_point(space, rng)
    v = sample_unit_tangent(space, x, rng)
    direct = geodesic(space, x, v, s + t)
    y = geodesic(space, x, v, s)
    w = geodesic_velocity(space, x, v, s)
    assert direct.allclose(geodesic(space, y, w, t), 1e-10 * max(1.0, float(np.max(np.abs(direct.components)))))


# ---------- exp_map ----------

def test_exp_map_zero_vector(s2, h2):
    for space in (s2, h2):
        x = space.vector((0.0, 0.0, 1.0))
        assert exp_map(space, x, space.zero()).allclose(x, 0.0)


def test_exp_map_antipode_and_hyperbolic_unit():
    s2 = sphere2(1.0)
    assert exp_map(s2, s2.vector((0, 0, 1)), s2.vector((math.pi, 0, 0))).allclose(s2.vector((0, 0, -1)), 1e-15)
    h2 = hyperbolic_plane(1.0)
    expected = h2.vector((math.sinh(1.0), 0.0, math.cosh(1.0)))
    assert exp_map(h2, h2.vector((0, 0, 1)), h2.vector((1, 0, 0))).allclose(expected, 1e-15)


def test_exp_map_series_branch_is_first_order_exact(s2):
    x = s2.vector((0.0, 0.0, 1.0))
    w = s2.vector((3e-9, -2e-9, 0.0))
    y = exp_map(s2, x, w)
    assert y.allclose(x + w, 1e-17)


@given(seed=seeds, space=two_dim, length=st.floats(min_value=1e-6, max_value=2.0))
@settings(max_examples=200, deadline=None)
def test_exp_map_matches_geodesic(seed, space, length):
    rng = make_rng(seed)
    x = sample_point(space, rng)
    v = sample_unit_tangent(space, x, rng)
    expected = geodesic(space, x, v, length)
    assert exp_map(space, x, v * length).allclose(expected, 1e-12 * max(1.0, float(np.max(np.abs(expected.components)))))


# ---------- parallel transport ----------

def test_parallel_transport_examples(s2):
    x, v = s2.vector((0.0, 0.0, 1.0)), s2.vector((1.0, 0.0, 0.0))
    w = s2.vector((0.0, 1.0, 0.0))
    assert parallel_transport(s2, x, v, w, 0.0).allclose(w, 0.0)
    assert parallel_transport(s2, x, v, w, math.pi / 2).allclose(w, 1e-15)
    assert parallel_transport(s2, x, v, v, 0.7).allclose(geodesic_velocity(s2, x, v, 0.7), 1e-15)


@given(seed=seeds, space=two_dim, t=st.floats(-1.5, 1.5))
@settings(max_examples=200, deadline=None)
def test_parallel_transport_preserves_scalar_products(seed, space, t):
    rng = make_rng(seed)
    x = sample_point(space, rng)
    v = sample_unit_tangent(space, x, rng)
    w1, w2 = sample_tangent(space, x, rng), sample_tangent(space, x, rng)
    y = geodesic(space, x, v, t)
    t1 = parallel_transport(space, x, v, w1, t)
    t2 = parallel_transport(space, x, v, w2, t)
    scale = _size(x) ** 2 * _size(w1) * _size(w2) * _size(y)
    assert abs(ambient_dot(t1, t2) - ambient_dot(w1, w2)) <= 1e-12 * scale
    assert abs(ambient_dot(t1, y)) <= 1e-12 * scale * _size(t1)


def test_transport_between_agrees_with_parallel_transport(rng):
    for space in (sphere2(1.0), sphere2(4.0), hyperbolic_plane(1.0), hyperbolic_plane(4.0)):
        for _ in range(50):
            x = sample_point(space, rng)
            v = sample_unit_tangent(space, x, rng)
            w = sample_tangent(space, x, rng)
            s = rng.uniform(-1.0, 1.0)
            y = geodesic(space, x, v, s)
            assert transport_between(space, x, y, w).allclose(parallel_transport(space, x, v, w, s), 1e-11)


# ---------- retraction, projection ----------

def test_retract_pulls_perturbed_points_back(rng):
    for space in (sphere3(0.5), anti_de_sitter3(2.0), sphere2(4.0), hyperbolic_plane(4.0)):
        x = sample_point(space, rng)
        y = retract(space, x * 1.001)
        assert abs(ambient_dot(y, y) - space.radius_sq) <= 1e-12 * max(1.0, float(np.dot(y.components, y.components)))


def test_retract_rejects_spacelike_on_hyperbolic():
    h2 = hyperbolic_plane(1.0)
    with pytest.raises(DomainError):
        retract(h2, h2.vector((1.0, 0.0, 0.0)))


def test_tangent_project_removes_normal_part(rng):
    space = anti_de_sitter3(1.0)
    x = sample_point(space, rng)
    w = tangent_project(space, x, space.vector(rng.standard_normal(4)))
    assert abs(ambient_dot(w, x)) <= 1e-12 * _size(x) ** 2 * _size(w)


# ---------- stereographic projection ----------

def test_stereographic_examples():
    assert stereographic_inverse(sphere2(1.0), 0j).allclose(sphere2(1.0).vector((0, 0, -1)), 0.0)
    assert stereographic_inverse(hyperbolic_plane(1.0), 0j).allclose(hyperbolic_plane(1.0).vector((0, 0, 1)), 0.0)
    y = stereographic_inverse(hyperbolic_plane(4.0), 0.5 + 0j)
    assert y.allclose(hyperbolic_plane(4.0).vector((2.0 / 3.0, 0.0, 5.0 / 6.0)), 1e-15)


def test_stereographic_hyperbolic_outside_disc():
    with pytest.raises(DomainError):
        stereographic_inverse(hyperbolic_plane(1.0), 1.0 + 0j)
    with pytest.raises(DomainError):
        stereographic_frame(hyperbolic_plane(1.0), 0.8 + 0.8j)


@pytest.mark.parametrize("space", [sphere2(1.0), sphere2(9.0), hyperbolic_plane(1.0), hyperbolic_plane(2.0)])
def test_stereographic_points_and_frames(space, rng):
    for _ in range(100):
        zeta = complex(*rng.uniform(-0.6, 0.6, size=2))
        x = stereographic_inverse(space, zeta)
        assert contains(space, x)
        E1, E2 = stereographic_frame(space, zeta)
        gram = np.array([[ambient_dot(a, b) for b in (E1, E2)] for a in (E1, E2)])
        assert np.allclose(gram, np.eye(2), atol=1e-14)
        assert abs(ambient_dot(E1, x)) < 1e-14 and abs(ambient_dot(E2, x)) < 1e-14


# ---------- Hopf fibres ----------

def test_fiber_action_moves_along_X3(s3, rng):
    for _ in range(20):
        x = sample_point(s3, rng)
        X3 = frame_fields(s3, x).frame[2]
        h = 1e-6
        derivative = (fiber_action(x, h) - fiber_action(x, -h)) / (2 * h)
        assert derivative.allclose(X3, 1e-9)
        assert contains(s3, fiber_action(x, 0.9))


def test_hopf_coordinates_on_sphere():
    space = sphere3(4.0)
    assert contains(space, hopf_coordinates(space, 0.3, 1.0, -2.0))
    with pytest.raises(InvalidInputError):
        hopf_coordinates(sphere2(1.0), 0.3, 1.0, -2.0)

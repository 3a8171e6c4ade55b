# -*- coding: utf-8 -*-

import numpy as np
import pytest

from scripts.rigid_body import (GravityModel, apply_force_at_point, apply_forces_at_points, ballistic_position,
                                discrete_ballistic_position, make_box, make_sphere, step_rigid_body)
from scripts.sim_core import IntegrationError


def test_sphere_requires_positive_mass_and_isotropic_inertia():
    with pytest.raises(ValueError):
        make_sphere(0.0, 0.1)
    with pytest.raises(ValueError):
        make_box(1.0, (0.1, 0.1, 0.1), inertia=(1.0, 0.0, 1.0))
    body = make_sphere(0.68, 0.12)
    assert body.isotropic
    assert body.inertia_diag[0] == pytest.approx(0.4 * 0.68 * 0.12 ** 2)


def test_free_flight_matches_discrete_oracle_exactly():
    x0 = np.array([-0.3, 0.5, 0.0])
    v0 = np.array([1.2, -1.5, 0.0])
    g = GravityModel()
    body = make_sphere(0.68, 0.12, position=x0, linear_velocity=v0)
    dt = 1e-3
    for _ in range(500):
        step_rigid_body(body, g, dt)

    t = 500 * dt
    np.testing.assert_allclose(body.position, discrete_ballistic_position(x0, v0, g.g, t, dt), rtol=1e-12, atol=1e-10)
    # Sai khác với parabol liên tục đúng bằng ½|g| t dt
    gap = np.linalg.norm(body.position - ballistic_position(x0, v0, g.g, t))
    assert gap == pytest.approx(0.5 * np.linalg.norm(g.g) * t * dt, rel=1e-6)


def test_ballistic_rejects_negative_time():
    with pytest.raises(ValueError):
        ballistic_position(np.zeros(3), np.zeros(3), np.zeros(3), -1.0)


def test_force_at_point_adds_torque():
    body = make_sphere(1.0, 0.5)
    apply_force_at_point(body, np.array([0.0, 1.0, 0.0]), np.array([0.5, 0.0, 0.0]))
    np.testing.assert_allclose(body.force_accum, [0.0, 1.0, 0.0])
    np.testing.assert_allclose(body.torque_accum, [0.0, 0.0, 0.5])


def test_batched_forces_match_single_point_calls():
    rng = np.random.default_rng(0)
    forces = rng.normal(size=(6, 3))
    points = rng.normal(size=(6, 3))
    one = make_box(2.0, (0.2, 0.1, 0.3), position=np.array([0.1, 0.2, 0.3]))
    many = make_box(2.0, (0.2, 0.1, 0.3), position=np.array([0.1, 0.2, 0.3]))
    for f, p in zip(forces, points):
        apply_force_at_point(one, f, p)
    apply_forces_at_points(many, forces, points)
    np.testing.assert_allclose(many.force_accum, one.force_accum, atol=1e-12)
    np.testing.assert_allclose(many.torque_accum, one.torque_accum, atol=1e-12)


def test_step_clears_accumulators_and_keeps_unit_quaternion():
    body = make_box(3.0, (0.3, 0.1, 0.2), angular_velocity=np.array([0.5, 4.0, 0.1]))
    g = GravityModel(np.zeros(3))
    for _ in range(2000):
        apply_force_at_point(body, np.array([0.0, 0.1, 0.0]), body.position + np.array([0.3, 0.0, 0.0]))
        step_rigid_body(body, g, 1e-3)
        assert not np.any(body.force_accum)
        assert not np.any(body.torque_accum)
    assert np.linalg.norm(body.orientation) == pytest.approx(1.0, abs=1e-12)


def test_spin_about_principal_axis_is_steady():
    body = make_box(3.0, (0.3, 0.1, 0.2), angular_velocity=np.array([0.0, 2.0, 0.0]))
    g = GravityModel(np.zeros(3))
    for _ in range(1000):
        step_rigid_body(body, g, 1e-3)
    np.testing.assert_allclose(body.angular_velocity, [0.0, 2.0, 0.0], atol=1e-9)
    np.testing.assert_allclose(body.position, np.zeros(3))


def test_non_finite_force_raises_integration_error():
    body = make_sphere(1.0, 0.1)
    body.force_accum = np.array([np.nan, 0.0, 0.0])
    with pytest.raises(IntegrationError) as excinfo:
        step_rigid_body(body, GravityModel(), 1e-3)
    assert excinfo.value.entity == "primary"


def _free_flight_error(dt: float, duration: float = 1.0) -> float:
    x0 = np.array([-0.3, 0.5, 0.0])
    v0 = np.array([1.2, -1.5, 0.0])
    g = GravityModel()
    body = make_sphere(0.68, 0.12, position=x0, linear_velocity=v0)
    steps = int(round(duration / dt))
    for _ in range(steps):
        step_rigid_body(body, g, dt)
    return float(np.linalg.norm(body.position - ballistic_position(x0, v0, g.g, steps * dt)))


@pytest.mark.parametrize("dt", [1e-2, 1e-3, 1e-4])
def test_free_flight_error_is_first_order_in_dt(dt):
    error = _free_flight_error(dt)
    # sai số toàn cục ½|g| t dt tại t = 1 s
    assert error / dt == pytest.approx(0.5 * 9.81, rel=1e-6)


def test_free_flight_converges_monotonically():
    errors = [_free_flight_error(dt) for dt in (1e-2, 1e-3, 1e-4)]
    assert errors[0] > errors[1] > errors[2]
    for coarse, fine in zip(errors, errors[1:]):
        assert coarse / fine == pytest.approx(10.0, rel=1e-3)


def test_torque_free_sphere_conserves_angular_momentum():
    body = make_sphere(0.68, 0.12, angular_velocity=np.array([3.0, -7.0, 5.0]),
                       orientation=np.array([np.cos(0.3), np.sin(0.3), 0.0, 0.0]))
    g = GravityModel(np.zeros(3))
    before = body.angular_momentum()
    for _ in range(1000):
        step_rigid_body(body, g, 1e-3)
    np.testing.assert_allclose(body.angular_momentum(), before, rtol=1e-9)
    assert np.linalg.norm(body.orientation) == pytest.approx(1.0, abs=1e-12)

# -*- coding: utf-8 -*-

import numpy as np
import pytest

from scripts.aero import (AeroModel, WindField, WindSource, aero_force_on_triangle, aero_forces,
                          flag_alignment_angle, wind_velocities, wind_velocity)
from scripts.mass_spring import build_grid

TRIANGLE = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


def test_triangle_force_is_normal_and_split_in_thirds():
    wind = WindField(uniform=(0.5, 0.0, 2.0))
    forces = aero_force_on_triangle(TRIANGLE, np.zeros((3, 3)), wind, AeroModel(1.0), 0.0)
    # diện tích 0.5, thành phần pháp tuyến 2
    np.testing.assert_allclose(forces, np.tile([0.0, 0.0, 1.0 / 3.0], (3, 1)))


def test_quadratic_model_scales_with_speed_squared():
    wind = WindField(uniform=(0.0, 0.0, -2.0))
    forces = aero_force_on_triangle(TRIANGLE, np.zeros((3, 3)), wind, AeroModel(1.0, quadratic=True), 0.0)
    np.testing.assert_allclose(forces.sum(axis=0), [0.0, 0.0, -2.0])


def test_moving_panel_feels_relative_wind():
    wind = WindField(uniform=(0.0, 0.0, 2.0))
    velocities = np.tile([0.0, 0.0, 2.0], (3, 1))
    np.testing.assert_allclose(aero_force_on_triangle(TRIANGLE, velocities, wind, AeroModel(1.0), 0.0), 0.0)


def test_degenerate_and_edge_on_triangles_give_no_force():
    collinear = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    wind = WindField(uniform=(0.0, 0.0, 3.0))
    np.testing.assert_array_equal(aero_force_on_triangle(collinear, np.zeros((3, 3)), wind, AeroModel(1.0), 0.0), 0.0)
    edge_on = WindField(uniform=(3.0, 1.0, 0.0))
    np.testing.assert_allclose(aero_force_on_triangle(TRIANGLE, np.zeros((3, 3)), edge_on, AeroModel(1.0), 0.0), 0.0)


def test_system_forces_match_per_triangle_sum():
    system = build_grid(4, 5, 1.0, 0.8, "cloth", "left")
    rng = np.random.default_rng(2)
    system.position += rng.normal(scale=0.05, size=system.position.shape)
    system.velocity = rng.normal(scale=0.3, size=system.velocity.shape)
    wind = WindField(uniform=(4.0, 0.0, 3.0))
    model = AeroModel(1.2)

    expected = np.zeros_like(system.position)
    for tri in system.triangles:
        expected[tri] += aero_force_on_triangle(system.position[tri], system.velocity[tri], wind, model, 0.0)
    np.testing.assert_allclose(aero_forces(system, wind, model, 0.0), expected, atol=1e-12)


def test_radial_source_decays_and_is_zero_at_its_center():
    source = WindSource(strength=2.0, falloff=1.0)
    wind = WindField(source=source)
    np.testing.assert_allclose(wind_velocity(wind, np.array([1.0, 0.0, 0.0]), 0.0), [2.0 * np.exp(-1.0), 0.0, 0.0])
    np.testing.assert_array_equal(wind_velocity(wind, np.zeros(3), 0.0), 0.0)

    suction = WindField(source=WindSource(strength=-2.0, falloff=1.0))
    assert wind_velocity(suction, np.array([0.0, 1.0, 0.0]), 0.0)[1] < 0.0


def test_source_moves_along_line_or_path():
    linear = WindSource(1.0, 1.0, start=(1.0, 0.0, 0.0), velocity=(2.0, 0.0, 0.0))
    np.testing.assert_allclose(linear.position_at(1.5), [4.0, 0.0, 0.0])

    following = WindSource(1.0, 1.0, offset=(0.0, -0.5, 0.0), path=lambda t: np.array([t, 1.0, 0.0]))
    np.testing.assert_allclose(following.position_at(3.0), [3.0, 0.5, 0.0])

    points = np.array([[3.0, 1.5, 0.0], [3.0, -0.5, 0.0]])
    v = wind_velocities(WindField(source=following), points, 3.0)
    assert v[0, 1] > 0.0 and v[1, 1] < 0.0


def test_invalid_parameters_are_rejected():
    with pytest.raises(ValueError):
        WindSource(1.0, 0.0)
    with pytest.raises(ValueError):
        AeroModel(-0.1)


def test_flag_alignment_angle():
    flag = build_grid(3, 4, 1.2, 0.8, "cloth", "left", plane="xy")
    assert flag_alignment_angle(flag, np.array([1.0, 0.0, 0.0])) == pytest.approx(0.0, abs=1e-9)
    assert flag_alignment_angle(flag, np.array([0.0, 0.0, 1.0])) == pytest.approx(90.0)

# -*- coding: utf-8 -*-

import dataclasses

import numpy as np
import pytest

from scripts.coupling import (BoxRegion, CoupledSetup, CylinderRegion, DampingFieldStandIn, MotionTrace,
                              PlaybackError, SpringGridStandIn, ViscousDragStandIn, box_bottom_corners,
                              cylinder_around, interpolate_trace, load_motion_trace, run_hybrid, run_one_way,
                              run_two_way, save_motion_trace, sphere_sample_points)
from scripts.interaction import ContactInteraction
from scripts.mass_spring import build_net
from scripts.metrics import CouplingMode
from scripts.rigid_body import BodyState, GravityModel, discrete_ballistic_position, make_box, make_sphere

DT = 1e-4
EVERYWHERE = BoxRegion((-10.0, -10.0, -10.0), (10.0, 10.0, 10.0))


@pytest.fixture
def ball_over_sheet(small_sheet, dropping_ball, soft_contact):
    return CoupledSetup(
        body=dropping_ball,
        system=small_sheet,
        interaction=ContactInteraction(soft_contact),
        gravity=GravityModel(),
        duration=0.2,
        dt_primary=DT,
        dt_secondary=DT,
        sample_interval=0.01,
    )


def _state(t, x):
    return BodyState(t, np.array([x, 0.0, 0.0]), np.array([1.0, 0.0, 0.0, 0.0]),
                     np.array([1.0, 0.0, 0.0]), np.zeros(3))


# =============================================================================
# Quỹ đạo chuyển động
# =============================================================================

def test_trace_requires_increasing_times():
    with pytest.raises(ValueError):
        MotionTrace([_state(0.0, 0.0), _state(0.0, 1.0)])
    with pytest.raises(ValueError):
        MotionTrace([])


def test_interpolation_and_range():
    trace = MotionTrace([_state(0.0, 0.0), _state(0.1, 1.0), _state(0.2, 4.0)])
    assert trace.sample_interval == pytest.approx(0.1)
    np.testing.assert_allclose(interpolate_trace(trace, 0.15).position, [2.5, 0.0, 0.0])
    np.testing.assert_array_equal(interpolate_trace(trace, 0.1).position, [1.0, 0.0, 0.0])
    with pytest.raises(PlaybackError):
        interpolate_trace(trace, 0.25)
    with pytest.raises(PlaybackError):
        interpolate_trace(trace, -0.01)


def test_trace_file_round_trip_is_exact(tmp_path):
    trace = MotionTrace([_state(k * DT, np.sin(k * 0.1)) for k in range(20)])
    save_motion_trace(tmp_path / "drive.csv", trace)
    loaded = load_motion_trace(tmp_path / "drive.csv")
    np.testing.assert_array_equal(loaded.positions(), trace.positions())
    np.testing.assert_array_equal(loaded.times, trace.times)


# =============================================================================
# Mô hình thế chỗ
# =============================================================================

def test_regions():
    box = BoxRegion((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
    assert box.contains(np.array([0.5, 0.5, 0.5]))
    assert not box.contains(np.array([1.5, 0.5, 0.5]))
    with pytest.raises(ValueError):
        BoxRegion((0.0, 0.0, 0.0), (1.0, 0.0, 1.0))

    region = cylinder_around(build_net(3, 4, 0.23, 0.4, 0.7))
    assert isinstance(region, CylinderRegion)
    assert region.radius == pytest.approx(0.23)
    assert region.y_min == pytest.approx(-0.42)
    assert region.contains(np.array([0.0, -0.2, 0.1]))
    assert not region.contains(np.array([0.0, 0.1, 0.0]))


def test_damping_field_opposes_motion_inside_region():
    field = DampingFieldStandIn(BoxRegion((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0)), c_linear=2.0, c_angular=0.5)
    state = BodyState(0.0, np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]), np.array([1.0, -2.0, 0.0]),
                      np.array([0.0, 0.0, 4.0]))
    force, torque = field.force_and_torque(state)
    np.testing.assert_allclose(force, [-2.0, 4.0, 0.0])
    np.testing.assert_allclose(torque, [0.0, 0.0, -2.0])

    state.position = np.array([5.0, 0.0, 0.0])
    force, torque = field.force_and_torque(state)
    assert not force.any() and not torque.any()


def test_damping_field_passivity_check():
    body = make_sphere(1.0, 0.1)
    DampingFieldStandIn(EVERYWHERE, c_linear=500.0).check_passivity(body, 1e-3)
    with pytest.raises(ValueError):
        DampingFieldStandIn(EVERYWHERE, c_linear=2000.0).check_passivity(body, 1e-3)


def test_spring_grid_pushes_up_only_below_plane():
    corners = box_bottom_corners((0.2, 0.1, 0.2))
    grid = SpringGridStandIn(plane_height=0.1, k_vertical=1000.0, c_vertical=0.0, contact_points=corners)
    above = BodyState(0.0, np.array([0.0, 0.3, 0.0]), np.array([1.0, 0.0, 0.0, 0.0]), np.zeros(3), np.zeros(3))
    force, _ = grid.force_and_torque(above)
    assert not force.any()

    pressed = BodyState(0.0, np.array([0.0, 0.15, 0.0]), np.array([1.0, 0.0, 0.0, 0.0]), np.zeros(3), np.zeros(3))
    force, torque = grid.force_and_torque(pressed)
    # bốn góc đáy ở y=0.05, lún 0.05
    np.testing.assert_allclose(force, [0.0, 4 * 1000.0 * 0.05, 0.0])
    np.testing.assert_allclose(torque, 0.0, atol=1e-12)


def test_viscous_drag_acts_on_submerged_points():
    points = sphere_sample_points(0.3)
    assert len(points) == 7
    drag = ViscousDragStandIn(surface_height=0.0, c_drag=10.0, contact_points=points)
    state = BodyState(0.0, np.array([0.0, 0.1, 0.0]), np.array([1.0, 0.0, 0.0, 0.0]),
                      np.array([0.0, -2.0, 0.0]), np.zeros(3))
    force, _ = drag.force_and_torque(state)
    # chỉ điểm thấp nhất (y = -0.2) ngập nước
    np.testing.assert_allclose(force, [0.0, 20.0, 0.0])


# =============================================================================
# Các kiểu ghép nối
# =============================================================================

def test_two_way_exchanges_equal_and_opposite_forces(ball_over_sheet):
    result = run_two_way(ball_over_sheet)
    assert result.mode == CouplingMode.TWO_WAY
    assert result.status.ok
    assert result.status.steps == 2000

    touching = [r for r in result.records if r.contact_count > 0]
    assert touching
    for record in touching:
        np.testing.assert_allclose(record.force, -record.particle_force_sum, atol=1e-12)
        assert record.cone_excess <= 1e-9

    # lưới đỡ bóng: rơi chậm hơn bay tự do
    free_fall_vy = -1.0 - 9.81 * 0.2
    assert result.body.linear_velocity[1] > free_fall_vy + 1e-3
    assert result.max_displacement > 0.0
    # nguyên mẫu trong setup không bị thay đổi
    np.testing.assert_array_equal(ball_over_sheet.body.position, [0.0, 0.3, 0.0])


def test_two_way_momentum_balances_gravity_and_anchor_impulse(ball_over_sheet):
    setup = ball_over_sheet
    before = setup.body.mass * setup.body.linear_velocity + setup.system.momentum()

    result = run_two_way(setup)
    assert result.status.ok
    assert any(r.contact_count > 0 for r in result.records)

    body, system = result.body, result.system
    moving_mass = body.mass + system.mass[system.free].sum()
    expected = (before + moving_mass * setup.gravity.g * setup.duration
                - system.pin_impulse + system.damping_impulse)
    after = body.mass * body.linear_velocity + system.momentum()
    np.testing.assert_allclose(after, expected, rtol=0.0, atol=1e-6 * setup.duration)
    assert np.linalg.norm(system.pin_impulse) > 0.0


def test_two_way_requires_interaction(ball_over_sheet):
    with pytest.raises(ValueError):
        run_two_way(dataclasses.replace(ball_over_sheet, interaction=None))


def test_one_way_primary_follows_ballistic_oracle(ball_over_sheet):
    result = run_one_way(ball_over_sheet)
    assert result.status.ok
    x0 = ball_over_sheet.body.position
    v0 = ball_over_sheet.body.linear_velocity
    g = ball_over_sheet.gravity.g
    for state in result.primary_trace.states:
        np.testing.assert_allclose(state.position, discrete_ballistic_position(x0, v0, g, state.t, DT),
                                   rtol=1e-9, atol=1e-12)
    assert len(result.primary_trace) == 21
    # lực lẽ ra tác dụng lên bóng vẫn được ghi lại
    assert np.any(result.interaction_log.contact_counts > 0)
    assert np.max(np.abs(result.interaction_log.forces[:, 1])) > 0.0


def test_drive_trace_is_recorded_at_secondary_resolution(ball_over_sheet):
    setup = dataclasses.replace(ball_over_sheet, dt_primary=1e-3, dt_secondary=DT, duration=0.05)
    result = run_one_way(setup)
    assert result.status.ok
    assert result.drive_trace.sample_interval == pytest.approx(DT)
    assert len(result.drive_trace) == 501
    np.testing.assert_allclose(np.diff(result.drive_trace.times), DT, rtol=1e-9)
    # quỹ đạo đầu ra vẫn lấy mẫu theo sample_interval
    assert len(result.primary_trace) == 6


def test_hybrid_with_zero_stand_in_matches_one_way(ball_over_sheet):
    one_way = run_one_way(ball_over_sheet)
    hybrid = run_hybrid(dataclasses.replace(ball_over_sheet, stand_in=DampingFieldStandIn(EVERYWHERE, 0.0, 0.0)))
    assert hybrid.mode == CouplingMode.HYBRID
    np.testing.assert_array_equal(hybrid.primary_trace.positions(), one_way.primary_trace.positions())
    assert len(hybrid.secondary_samples) == len(one_way.secondary_samples)
    for a, b in zip(hybrid.secondary_samples, one_way.secondary_samples):
        np.testing.assert_array_equal(a, b)


def test_hybrid_requires_stand_in(ball_over_sheet):
    with pytest.raises(ValueError):
        run_hybrid(ball_over_sheet)


def test_damping_field_slows_body_monotonically():
    body = make_sphere(1.0, 0.1, linear_velocity=np.array([1.0, 0.0, 0.0]))
    setup = CoupledSetup(body=body, system=None, interaction=None, gravity=GravityModel(), duration=1.0,
                         dt_primary=1e-3, dt_secondary=1e-3, sample_interval=0.1, primary_gravity=False,
                         stand_in=DampingFieldStandIn(EVERYWHERE, c_linear=0.5))
    result = run_hybrid(setup)
    vx = np.array([s.linear_velocity[0] for s in result.drive_trace.states])
    assert np.all(np.diff(vx) <= 0.0)
    assert vx[-1] > 0.0
    assert vx[-1] == pytest.approx(np.exp(-0.5), rel=1e-3)
    # không có hệ phụ: nhật ký là lực của mô hình thế chỗ
    assert len(result.interaction_log) == 1000
    assert result.interaction_log.forces[0, 0] == pytest.approx(-0.5)


def test_hybrid_rejects_overly_strong_damping_field():
    body = make_box(1.0, (0.1, 0.1, 0.1))
    setup = CoupledSetup(body=body, system=None, interaction=None, gravity=GravityModel(), duration=0.1,
                         dt_primary=1e-3, stand_in=DampingFieldStandIn(EVERYWHERE, c_linear=5000.0))
    with pytest.raises(ValueError):
        run_hybrid(setup)


def test_saved_drive_trace_reproduces_secondary_exactly(ball_over_sheet, tmp_path):
    first = run_one_way(ball_over_sheet)

    replayed = run_one_way(dataclasses.replace(ball_over_sheet, drive_trace=first.drive_trace))
    assert replayed.wall_clock["primary"] == 0.0
    for a, b in zip(replayed.secondary_samples, first.secondary_samples):
        np.testing.assert_array_equal(a, b)

    save_motion_trace(tmp_path / "drive.csv", first.drive_trace)
    loaded = run_one_way(dataclasses.replace(ball_over_sheet, drive_trace=load_motion_trace(tmp_path / "drive.csv")))
    assert len(loaded.secondary_samples) == len(first.secondary_samples)
    for a, b in zip(loaded.secondary_samples, first.secondary_samples):
        np.testing.assert_array_equal(a, b)

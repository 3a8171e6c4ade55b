# -*- coding: utf-8 -*-

import numpy as np
import pytest

from scripts.mass_spring import (DegenerateSpringError, Material, MassSpringSystem, Particle, Spring, build_cord,
                                 build_grid, build_leaf_pile, build_mat, build_net, resolve_material, spring_force,
                                 spring_forces, step_mass_spring)


def _pair(distance: float, stiffness: float = 100.0, damping: float = 0.0, compression_ratio: float = 1.0,
          global_damping: float = 0.0) -> MassSpringSystem:
    particles = [Particle(1.0, np.zeros(3), pinned=True), Particle(1.0, np.array([distance, 0.0, 0.0]))]
    return MassSpringSystem(particles, [Spring(0, 1, 1.0, stiffness, damping, compression_ratio)], global_damping)


# =============================================================================
# Dựng lưới
# =============================================================================

def test_grid_topology(small_sheet):
    assert small_sheet.n_particles == 25
    # cấu trúc 40, cắt 32, uốn 30
    assert small_sheet.n_springs == 102
    assert len(small_sheet.triangles) == 32
    assert np.count_nonzero(small_sheet.pinned) == 4
    assert small_sheet.total_mass == pytest.approx(0.2)


@pytest.mark.parametrize("edge, expected", [("none", 0), ("top", 4), ("left", 3), ("all-corners", 4)])
def test_grid_pinned_edges(edge, expected):
    grid = build_grid(3, 4, 1.0, 1.0, "cloth", edge)
    assert np.count_nonzero(grid.pinned) == expected


def test_grid_rejects_unknown_edge_and_material():
    with pytest.raises(ValueError):
        build_grid(3, 3, 1.0, 1.0, "cloth", "bottom")
    with pytest.raises(ValueError):
        resolve_material("rubber")


def test_net_topology():
    net = build_net(3, 4, 0.23, 0.4, 0.7, "nylon-net")
    assert net.n_particles == 16
    # vòng 12, nan 8, chéo 16, gắn vành 4
    assert net.n_springs == 40
    assert len(net.triangles) == 16
    assert np.count_nonzero(net.pinned) == 4
    # các điểm neo nằm trên vành
    np.testing.assert_allclose(net.position[net.pinned][:, 1], 0.0)


def test_cord_mat_and_leaves():
    cord = build_cord(4, 2.0, "bungee", mass=1.0)
    assert cord.n_particles == 5
    assert cord.handle_index == 4
    assert cord.pinned[0] and not cord.pinned[1:].any()
    np.testing.assert_allclose(cord.rest_length, 0.5)

    mat = build_mat(3, 3, 1.0, 1.0, 0.1, "mat", mass=4.0)
    assert mat.n_particles == 18
    assert mat.n_springs == 26 + 9
    assert np.count_nonzero(mat.pinned) == 9
    assert mat.total_mass == pytest.approx(4.0)

    leaves = build_leaf_pile(2, 0.1, 0.4)
    assert leaves.n_particles == 18
    assert leaves.n_springs == 52
    assert leaves.triangles.max() == 17


def test_systems_are_built_at_rest():
    for system in (build_net(4, 6, 0.23, 0.4, 0.7), build_grid(4, 5, 1.0, 0.5), build_mat(3, 4, 1.0, 1.0, 0.1)):
        np.testing.assert_allclose(spring_forces(system), 0.0, atol=1e-9)


def test_material_from_dict():
    material = resolve_material({"stiffness": 10.0, "damping": 0.1})
    assert material == Material(10.0, 0.1, 1.0)


# =============================================================================
# Lực lò xo
# =============================================================================

def test_spring_force_is_equal_and_opposite():
    a = Particle(1.0, np.zeros(3), velocity=np.array([0.0, 0.0, 0.0]))
    b = Particle(1.0, np.array([2.0, 0.0, 0.0]), velocity=np.array([1.0, 0.5, 0.0]))
    on_a, on_b = spring_force(Spring(0, 1, 1.0, 10.0, 2.0), a, b)
    # k*ext + c*(v_rel . d) = 10 + 2
    np.testing.assert_allclose(on_a, [12.0, 0.0, 0.0])
    np.testing.assert_allclose(on_a + on_b, 0.0)


def test_vectorized_forces_match_per_spring():
    system = build_grid(4, 4, 1.0, 1.0, "cloth", "none")
    rng = np.random.default_rng(1)
    system.position += rng.normal(scale=0.02, size=system.position.shape)
    system.velocity += rng.normal(scale=0.1, size=system.velocity.shape)

    expected = np.zeros_like(system.position)
    for j in range(system.n_springs):
        spring = system.spring(j)
        on_a, on_b = spring_force(spring, system.particle(spring.a), system.particle(spring.b))
        expected[spring.a] += on_a
        expected[spring.b] += on_b
    np.testing.assert_allclose(spring_forces(system), expected, atol=1e-10)


def test_compression_uses_reduced_stiffness():
    system = _pair(0.5, stiffness=100.0, compression_ratio=0.01)
    np.testing.assert_allclose(spring_forces(system)[1], [0.5, 0.0, 0.0])
    assert system.spring_energy() == pytest.approx(0.5 * 1.0 * 0.25)


def test_coincident_endpoints_raise():
    system = _pair(0.0)
    with pytest.raises(DegenerateSpringError) as excinfo:
        spring_forces(system)
    assert excinfo.value.spring_index == 0
    with pytest.raises(DegenerateSpringError):
        spring_force(system.spring(0), system.particle(0), system.particle(1))


# =============================================================================
# Tích phân
# =============================================================================

def test_pinned_particles_never_move(small_sheet):
    pinned_before = small_sheet.position[small_sheet.pinned].copy()
    for _ in range(200):
        step_mass_spring(small_sheet, np.array([0.0, -9.81, 0.0]), None, 1e-4)
    np.testing.assert_array_equal(small_sheet.position[small_sheet.pinned], pinned_before)
    np.testing.assert_array_equal(small_sheet.velocity[small_sheet.pinned], 0.0)
    # các điểm tự do đã võng xuống
    assert small_sheet.position[small_sheet.free][:, 1].min() < 0.0
    # điểm ghim gánh trọng lượng qua lò xo
    assert small_sheet.last_pin_force[1] < 0.0


def test_energy_never_increases_with_damping():
    system = _pair(1.5, stiffness=100.0, global_damping=60.0)
    energy = system.kinetic_energy() + system.spring_energy()
    for _ in range(2000):
        step_mass_spring(system, np.zeros(3), None, 1e-4)
        current = system.kinetic_energy() + system.spring_energy()
        assert current <= energy + 1e-12
        energy = current
    assert energy < 0.5 * 100.0 * 0.25


def test_free_system_conserves_momentum():
    system = build_grid(5, 5, 1.0, 1.0, "cloth", "none", global_damping=0.0)
    system.velocity = np.random.default_rng(0).normal(size=system.velocity.shape)
    momentum = system.momentum()
    for _ in range(1000):
        step_mass_spring(system, np.zeros(3), None, 1e-4)
    np.testing.assert_allclose(system.momentum(), momentum, atol=1e-9)


def test_hanging_mass_settles_at_static_stretch():
    cord = build_cord(1, 1.0, {"stiffness": 1000.0, "damping": 0.2}, mass=0.02, global_damping=3.0)
    cord.mass[cord.handle_index] += 1.0
    g = np.array([0.0, -9.81, 0.0])
    for _ in range(25000):
        step_mass_spring(cord, g, None, 2e-4)
    stretch = -cord.position[cord.handle_index, 1] - 1.0
    assert stretch == pytest.approx(1.01 * 9.81 / 1000.0, rel=0.01)


def test_external_forces_are_applied_once():
    system = _pair(1.0, stiffness=0.0)
    external = np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    step_mass_spring(system, np.zeros(3), external, 0.1)
    np.testing.assert_allclose(system.velocity[1], [0.2, 0.0, 0.0])
    np.testing.assert_allclose(system.force_accum, 0.0)

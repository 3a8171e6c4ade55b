#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Khí động học đơn giản cho hệ phụ: trường gió (đều + nguồn di động) và lực
pháp tuyến trên từng tam giác của lưới.
"""

import sys
import os
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import settings
from scripts.mass_spring import MassSpringSystem

# Thiết lập logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindSource:
    """
    Nguồn gió tỏa tròn; strength âm nghĩa là hút về phía nguồn.

    Vị trí tại thời điểm t là path(t) + offset nếu có path, ngược lại start + velocity * t + offset.
    """
    strength: float
    falloff: float
    start: tuple = (0.0, 0.0, 0.0)
    velocity: tuple = (0.0, 0.0, 0.0)
    offset: tuple = (0.0, 0.0, 0.0)
    path: Optional[Callable[[float], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.falloff > 0.0:
            raise ValueError(f"Bán kính suy giảm phải dương: {self.falloff}")

    def position_at(self, t: float) -> np.ndarray:
        base = self.path(t) if self.path is not None else np.asarray(self.start) + np.asarray(self.velocity) * t
        return np.asarray(base, dtype=float) + np.asarray(self.offset, dtype=float)


@dataclass(frozen=True)
class WindField:
    uniform: tuple = (0.0, 0.0, 0.0)
    source: Optional[WindSource] = None


@dataclass(frozen=True)
class AeroModel:
    c_normal: float
    quadratic: bool = False

    def __post_init__(self):
        if self.c_normal < 0.0:
            raise ValueError(f"c_normal không được âm: {self.c_normal}")


def wind_velocities(wind: WindField, points: np.ndarray, t: float) -> np.ndarray:
    """
    Vận tốc gió tại các điểm dạng (m, 3).
    """
    points = np.atleast_2d(points)
    velocity = np.tile(np.asarray(wind.uniform, dtype=float), (points.shape[0], 1))
    source = wind.source
    if source is None:
        return velocity

    offsets = points - source.position_at(t)
    r = np.sqrt(np.einsum("ij,ij->i", offsets, offsets))
    magnitude = source.strength / np.maximum(r, settings.WIND_CORE_RADIUS) * np.exp(-r / source.falloff)
    # Tại đúng vị trí nguồn hướng không xác định nên đóng góp bằng 0
    safe_r = np.where(r > 0.0, r, 1.0)
    direction = np.where((r > 0.0)[:, None], offsets / safe_r[:, None], 0.0)
    return velocity + magnitude[:, None] * direction


def wind_velocity(wind: WindField, point: np.ndarray, t: float) -> np.ndarray:
    return wind_velocities(wind, np.asarray(point, dtype=float), t)[0]


def aero_force_on_triangle(positions: np.ndarray, velocities: np.ndarray, wind: WindField,
                           model: AeroModel, t: float) -> np.ndarray:
    """
    Lực pháp tuyến trên một tam giác, chia đều cho ba đỉnh.

    F = c * A * (v_rel · n) * n với v_rel là gió tại trọng tâm trừ vận tốc trung bình
    của các đỉnh; tam giác suy biến cho lực bằng 0.

    Args:
        positions: Vị trí ba đỉnh (3, 3)
        velocities: Vận tốc ba đỉnh (3, 3)
        wind: Trường gió
        model: Tham số khí động học
        t: Thời điểm

    Returns:
        np.ndarray: Lực trên từng đỉnh (3, 3)
    """
    positions = np.asarray(positions, dtype=float)
    cross = np.cross(positions[1] - positions[0], positions[2] - positions[0])
    double_area = float(np.sqrt(np.dot(cross, cross)))
    area = 0.5 * double_area
    if area <= settings.MIN_TRIANGLE_AREA:
        return np.zeros((3, 3))
    normal = cross / double_area
    centroid = positions.mean(axis=0)
    v_rel = wind_velocity(wind, centroid, t) - np.asarray(velocities, dtype=float).mean(axis=0)
    v_normal = float(np.dot(v_rel, normal))
    scale = v_normal * abs(v_normal) if model.quadratic else v_normal
    total = model.c_normal * area * scale * normal
    return np.tile(total / 3.0, (3, 1))


def aero_forces(system: MassSpringSystem, wind: WindField, model: AeroModel, t: float) -> np.ndarray:
    """
    Lực khí động học trên mọi tam giác của hệ, cộng dồn theo chất điểm (n, 3).
    """
    n = system.n_particles
    forces = np.zeros((n, 3))
    tri = system.triangles
    if tri.shape[0] == 0:
        return forces

    p0, p1, p2 = (system.position[tri[:, k]] for k in range(3))
    cross = np.cross(p1 - p0, p2 - p0)
    double_area = np.sqrt(np.einsum("ij,ij->i", cross, cross))
    area = 0.5 * double_area
    valid = area > settings.MIN_TRIANGLE_AREA
    if not np.any(valid):
        return forces

    tri = tri[valid]
    p0, p1, p2 = p0[valid], p1[valid], p2[valid]
    normal = cross[valid] / double_area[valid][:, None]
    centroid = (p0 + p1 + p2) / 3.0
    mean_velocity = (system.velocity[tri[:, 0]] + system.velocity[tri[:, 1]] + system.velocity[tri[:, 2]]) / 3.0
    v_rel = wind_velocities(wind, centroid, t) - mean_velocity
    v_normal = np.einsum("ij,ij->i", v_rel, normal)
    scale = v_normal * np.abs(v_normal) if model.quadratic else v_normal
    per_vertex = (model.c_normal * area[valid] * scale / 3.0)[:, None] * normal

    for k in range(3):
        for axis in range(3):
            forces[:, axis] += np.bincount(tri[:, k], weights=per_vertex[:, axis], minlength=n)
    return forces


def flag_alignment_angle(system: MassSpringSystem, wind_direction: np.ndarray) -> float:
    """
    Góc (độ) giữa hướng vươn ngang trung bình của lá cờ (trọng tâm điểm tự do trừ
    trọng tâm điểm ghim, chiếu lên mặt phẳng ngang) và hướng gió ngang.
    """
    extension = system.position[system.free].mean(axis=0) - system.position[system.pinned].mean(axis=0)
    a = np.array([extension[0], extension[2]])
    b = np.array([wind_direction[0], wind_direction[2]])
    cosine = float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
    return float(np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0))))

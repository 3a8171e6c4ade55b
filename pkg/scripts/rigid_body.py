#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Hệ chính: vật rắn (cầu hoặc hộp) chịu trọng lực, tích lũy lực/mô-men và bay đạn đạo.
"""

import sys
import os
import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import settings
from scripts.sim_core import IntegrationError, step_semi_implicit
from utils.vector_math import (
    IDENTITY_QUATERNION,
    integrate_orientation,
    quat_rotate,
    quat_rotate_inverse,
)

# Thiết lập logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Sphere:
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError(f"Bán kính cầu phải dương: {self.radius}")


@dataclass(frozen=True)
class Box:
    half_extents: tuple

    def __post_init__(self):
        if len(self.half_extents) != 3 or any(not h > 0.0 for h in self.half_extents):
            raise ValueError(f"Nửa kích thước hộp phải là 3 số dương: {self.half_extents}")


Shape = Union[Sphere, Box]


@dataclass(frozen=True)
class GravityModel:
    g: np.ndarray = field(default_factory=lambda: settings.DEFAULT_GRAVITY.copy())


@dataclass
class BodyState:
    """
    Ảnh chụp trạng thái vật rắn tại thời điểm t (dùng cho quỹ đạo chuyển động).
    """
    t: float
    position: np.ndarray
    orientation: np.ndarray
    linear_velocity: np.ndarray
    angular_velocity: np.ndarray


@dataclass
class RigidBody:
    """
    Vật rắn với quán tính chéo trong khung vật; vận tốc góc lưu trong khung thế giới.
    """
    mass: float
    inertia_diag: np.ndarray
    shape: Shape
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=lambda: IDENTITY_QUATERNION.copy())
    linear_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angular_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    force_accum: np.ndarray = field(default_factory=lambda: np.zeros(3))
    torque_accum: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.inertia_diag = np.asarray(self.inertia_diag, dtype=float)
        for name in ("position", "orientation", "linear_velocity", "angular_velocity",
                     "force_accum", "torque_accum"):
            setattr(self, name, np.array(getattr(self, name), dtype=float))
        if not self.mass > 0.0:
            raise ValueError(f"Khối lượng phải dương: {self.mass}")
        if self.inertia_diag.shape != (3,) or np.any(self.inertia_diag <= 0.0):
            raise ValueError(f"Quán tính phải gồm 3 giá trị dương: {self.inertia_diag}")
        if isinstance(self.shape, Sphere) and not np.all(self.inertia_diag == self.inertia_diag[0]):
            raise ValueError("Quán tính của cầu phải đẳng hướng")

    @property
    def isotropic(self) -> bool:
        return bool(np.all(self.inertia_diag == self.inertia_diag[0]))

    def state(self, t: float) -> BodyState:
        return BodyState(t, self.position.copy(), self.orientation.copy(),
                         self.linear_velocity.copy(), self.angular_velocity.copy())

    def set_state(self, state: BodyState) -> None:
        self.position = state.position.copy()
        self.orientation = state.orientation.copy()
        self.linear_velocity = state.linear_velocity.copy()
        self.angular_velocity = state.angular_velocity.copy()

    def point_velocity(self, world_points: np.ndarray) -> np.ndarray:
        """
        Vận tốc của các điểm gắn với vật: v + ω × r.
        """
        return self.linear_velocity + np.cross(self.angular_velocity, world_points - self.position)

    def world_points(self, body_points: np.ndarray) -> np.ndarray:
        return self.position + quat_rotate(self.orientation, body_points)

    def momentum(self) -> np.ndarray:
        return self.mass * self.linear_velocity

    def angular_momentum(self) -> np.ndarray:
        """
        Mô-men động lượng quanh khối tâm, khung thế giới.
        """
        omega_body = quat_rotate_inverse(self.orientation, self.angular_velocity)
        return quat_rotate(self.orientation, self.inertia_diag * omega_body)

    def clear_accumulators(self) -> None:
        self.force_accum = np.zeros(3)
        self.torque_accum = np.zeros(3)


def sphere_inertia(mass: float, radius: float) -> np.ndarray:
    # Cầu đặc: 2/5 m r^2
    value = 0.4 * mass * radius * radius
    return np.array([value, value, value])


def box_inertia(mass: float, half_extents) -> np.ndarray:
    hx, hy, hz = half_extents
    return np.array([
        mass * (hy * hy + hz * hz) / 3.0,
        mass * (hx * hx + hz * hz) / 3.0,
        mass * (hx * hx + hy * hy) / 3.0,
    ])


def make_sphere(mass: float, radius: float, inertia: Optional[float] = None, **state) -> RigidBody:
    """
    Tạo vật rắn hình cầu; quán tính mặc định của cầu đặc nếu không chỉ định.
    """
    inertia_diag = sphere_inertia(mass, radius) if inertia is None else np.full(3, float(inertia))
    return RigidBody(mass=mass, inertia_diag=inertia_diag, shape=Sphere(radius), **state)


def make_box(mass: float, half_extents, inertia=None, **state) -> RigidBody:
    inertia_diag = box_inertia(mass, half_extents) if inertia is None else np.asarray(inertia, dtype=float)
    return RigidBody(mass=mass, inertia_diag=inertia_diag, shape=Box(tuple(half_extents)), **state)


def apply_force_at_point(body: RigidBody, force: np.ndarray, world_point: np.ndarray) -> None:
    """
    Cộng lực tại một điểm thế giới: force_accum += F, torque_accum += (p - x) × F.
    """
    body.force_accum = body.force_accum + force
    body.torque_accum = body.torque_accum + np.cross(world_point - body.position, force)


def apply_forces_at_points(body: RigidBody, forces: np.ndarray, world_points: np.ndarray) -> None:
    """
    Dạng vector hóa của apply_force_at_point cho n lực, forces và world_points dạng (n, 3).
    """
    if forces.shape[0] == 0:
        return
    body.force_accum = body.force_accum + np.sum(forces, axis=0)
    body.torque_accum = body.torque_accum + np.sum(np.cross(world_points - body.position, forces), axis=0)


def step_rigid_body(body: RigidBody, gravity: GravityModel, dt: float) -> None:
    """
    Tiến vật rắn một bước Euler bán ẩn rồi xóa bộ tích lũy.

    Phần tịnh tiến dùng step_semi_implicit; phần quay dùng phương trình Euler trong
    khung vật với quán tính chéo, hướng được tích phân và chuẩn hóa lại mỗi bước.

    Raises:
        IntegrationError: Nếu trạng thái hoặc bộ tích lũy không hữu hạn
    """
    for name, arr in (("lực", body.force_accum), ("mô-men", body.torque_accum),
                      ("vị trí", body.position), ("vận tốc góc", body.angular_velocity)):
        if not np.all(np.isfinite(arr)):
            raise IntegrationError(f"{name} của vật rắn không hữu hạn", index=0, entity="primary")

    acceleration = body.force_accum / body.mass + gravity.g
    try:
        body.position, body.linear_velocity = step_semi_implicit(
            body.position, body.linear_velocity, acceleration, dt)
    except IntegrationError as e:
        raise IntegrationError(str(e), index=0, entity="primary") from e

    if body.isotropic:
        # Quán tính đẳng hướng: số hạng con quay bằng 0, cập nhật trực tiếp trong khung thế giới
        body.angular_velocity = body.angular_velocity + body.torque_accum / body.inertia_diag[0] * dt
    else:
        omega_body = quat_rotate_inverse(body.orientation, body.angular_velocity)
        torque_body = quat_rotate_inverse(body.orientation, body.torque_accum)
        gyroscopic = np.cross(omega_body, body.inertia_diag * omega_body)
        omega_body = omega_body + (torque_body - gyroscopic) / body.inertia_diag * dt
        body.angular_velocity = quat_rotate(body.orientation, omega_body)

    body.orientation = integrate_orientation(body.orientation, body.angular_velocity, dt)
    body.clear_accumulators()


def ballistic_position(x0: np.ndarray, v0: np.ndarray, g: np.ndarray, t: float) -> np.ndarray:
    """
    Quỹ đạo đạn đạo liên tục: x0 + v0 t + ½ g t².
    """
    if t < 0.0:
        raise ValueError(f"t không được âm: {t}")
    return x0 + v0 * t + 0.5 * g * t * t


def discrete_ballistic_position(x0: np.ndarray, v0: np.ndarray, g: np.ndarray, t: float, dt: float) -> np.ndarray:
    """
    Nghiệm dạng đóng của bước Euler bán ẩn dưới trọng lực không đổi: x0 + v0 t + ½ g t (t + dt).
    """
    if t < 0.0:
        raise ValueError(f"t không được âm: {t}")
    return x0 + v0 * t + 0.5 * g * t * (t + dt)

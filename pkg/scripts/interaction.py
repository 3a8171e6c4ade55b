#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Phát hiện tiếp xúc và mô hình lực tiếp xúc phạt (penalty) giữa hệ chính và hệ phụ.
Lực pháp tuyến gồm thành phần phục hồi theo độ xuyên thấu và giảm chấn ổn định,
ma sát Coulomb dạng nhớt bị chặn bởi nón ma sát. Ghép hai chiều áp phản lực
bằng nhau và ngược chiều lên vật rắn; ghép một chiều chỉ ghi lại lực đó.
"""

import sys
import os
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import settings
from scripts.mass_spring import MassSpringSystem
from scripts.rigid_body import Box, RigidBody, Sphere, apply_forces_at_points
from scripts.sim_core import IntegrationError
from utils.vector_math import quat_rotate, quat_rotate_inverse

# Thiết lập logging
logger = logging.getLogger(__name__)


class DegenerateContactError(IntegrationError, ValueError):
    """
    Điểm trùng tâm cầu nên pháp tuyến tiếp xúc không xác định.
    """

    def __init__(self, message: str, particle_index: Optional[int] = None):
        super().__init__(message, index=particle_index, entity="secondary")


@dataclass(frozen=True)
class ContactForceModel:
    """
    Tham số tiếp xúc phạt.

    k_constraint: độ cứng ma sát nhớt theo vận tốc tiếp tuyến (N*s/m)
    c_damp: giảm chấn va chạm theo tốc độ tiếp cận (N*s/m)
    k_restore: độ cứng phục hồi theo độ xuyên thấu (N/m)
    mu: hệ số ma sát Coulomb
    """
    k_constraint: float = 0.0
    c_damp: float = 0.0
    k_restore: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        for name in ("k_constraint", "c_damp", "k_restore", "mu"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} không được âm: {getattr(self, name)}")


@dataclass
class Contact:
    particle_index: int
    normal: np.ndarray
    depth: float
    point: np.ndarray
    relative_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))


@dataclass
class ContactBatch:
    """
    Tập tiếp xúc dạng mảng, sắp theo chỉ số chất điểm tăng dần.
    """
    indices: np.ndarray
    normals: np.ndarray
    depths: np.ndarray
    points: np.ndarray
    relative_velocities: np.ndarray

    @classmethod
    def empty(cls) -> "ContactBatch":
        return cls(np.zeros(0, dtype=np.int64), np.zeros((0, 3)), np.zeros(0), np.zeros((0, 3)), np.zeros((0, 3)))

    @classmethod
    def from_contacts(cls, contacts: Sequence[Contact]) -> "ContactBatch":
        if not contacts:
            return cls.empty()
        ordered = sorted(contacts, key=lambda c: c.particle_index)
        return cls(
            np.array([c.particle_index for c in ordered], dtype=np.int64),
            np.array([c.normal for c in ordered], dtype=float),
            np.array([c.depth for c in ordered], dtype=float),
            np.array([c.point for c in ordered], dtype=float),
            np.array([c.relative_velocity for c in ordered], dtype=float),
        )

    def __len__(self) -> int:
        return int(self.indices.size)

    def contact(self, k: int) -> Contact:
        return Contact(int(self.indices[k]), self.normals[k].copy(), float(self.depths[k]),
                       self.points[k].copy(), self.relative_velocities[k].copy())


# =============================================================================
# Phát hiện tiếp xúc
# =============================================================================

def detect_point_sphere(point: np.ndarray, center: np.ndarray, radius: float,
                        particle_index: int = -1) -> Optional[Contact]:
    """
    Tiếp xúc điểm - cầu; chạm đúng mặt cầu (độ sâu 0) không tính là tiếp xúc.

    Raises:
        DegenerateContactError: Nếu điểm trùng tâm cầu
    """
    if not radius > 0.0:
        raise ValueError(f"Bán kính phải dương: {radius}")
    offset = np.asarray(point, dtype=float) - center
    distance = float(np.sqrt(np.dot(offset, offset)))
    if distance >= radius:
        return None
    if distance == 0.0:
        raise DegenerateContactError(f"Chất điểm #{particle_index} trùng tâm cầu", particle_index)
    normal = offset / distance
    return Contact(particle_index, normal, radius - distance, center + radius * normal)


def detect_point_halfspace(point: np.ndarray, plane_point: np.ndarray, plane_normal: np.ndarray,
                           particle_index: int = -1) -> Optional[Contact]:
    point = np.asarray(point, dtype=float)
    plane_normal = np.asarray(plane_normal, dtype=float)
    signed = float(np.dot(point - plane_point, plane_normal))
    if signed >= 0.0:
        return None
    return Contact(particle_index, plane_normal.copy(), -signed, point - signed * plane_normal)


def detect_point_box(point: np.ndarray, center: np.ndarray, orientation: np.ndarray,
                     half_extents: Sequence[float], particle_index: int = -1) -> Optional[Contact]:
    """
    Tiếp xúc điểm - hộp có hướng: chỉ khi điểm nằm hẳn bên trong hộp.
    Pháp tuyến là pháp tuyến ngoài của mặt có độ xuyên thấu nhỏ nhất.
    """
    h = np.asarray(half_extents, dtype=float)
    local = quat_rotate_inverse(orientation, np.asarray(point, dtype=float) - center)
    gaps = h - np.abs(local)
    if np.any(gaps <= 0.0):
        return None
    axis = int(np.argmin(gaps))
    sign = 1.0 if local[axis] >= 0.0 else -1.0
    normal_local = np.zeros(3)
    normal_local[axis] = sign
    surface_local = local.copy()
    surface_local[axis] = sign * h[axis]
    return Contact(particle_index, quat_rotate(orientation, normal_local), float(gaps[axis]),
                   center + quat_rotate(orientation, surface_local))


def detect_particles_sphere(positions: np.ndarray, velocities: np.ndarray, body: RigidBody) -> ContactBatch:
    """
    Dạng mảng của detect_point_sphere cho mọi chất điểm; vận tốc tương đối lấy
    theo điểm tiếp xúc trên mặt vật (v + ω × r) nên bóng xoay vẫn kéo lưới.

    Raises:
        DegenerateContactError: Nếu một chất điểm trùng tâm cầu
    """
    radius = body.shape.radius
    offsets = positions - body.position
    distances = np.sqrt(np.einsum("ij,ij->i", offsets, offsets))
    inside = distances < radius
    if not np.any(inside):
        return ContactBatch.empty()
    indices = np.nonzero(inside)[0]
    d = distances[indices]
    if np.any(d == 0.0):
        index = int(indices[np.argmax(d == 0.0)])
        raise DegenerateContactError(f"Chất điểm #{index} trùng tâm cầu", index)
    normals = offsets[indices] / d[:, None]
    points = body.position + radius * normals
    relative = velocities[indices] - body.point_velocity(points)
    return ContactBatch(indices.astype(np.int64), normals, radius - d, points, relative)


def detect_particles_box(positions: np.ndarray, velocities: np.ndarray, body: RigidBody) -> ContactBatch:
    """
    Dạng mảng của detect_point_box.
    """
    h = np.asarray(body.shape.half_extents, dtype=float)
    local = quat_rotate_inverse(body.orientation, positions - body.position)
    gaps = h - np.abs(local)
    inside = np.all(gaps > 0.0, axis=1)
    if not np.any(inside):
        return ContactBatch.empty()
    indices = np.nonzero(inside)[0]
    local = local[indices]
    gaps = gaps[indices]
    axes = np.argmin(gaps, axis=1)
    rows = np.arange(indices.size)
    signs = np.where(local[rows, axes] >= 0.0, 1.0, -1.0)
    normals_local = np.zeros((indices.size, 3))
    normals_local[rows, axes] = signs
    surface_local = local.copy()
    surface_local[rows, axes] = signs * h[axes]
    normals = quat_rotate(body.orientation, normals_local)
    points = body.position + quat_rotate(body.orientation, surface_local)
    relative = velocities[indices] - body.point_velocity(points)
    return ContactBatch(indices.astype(np.int64), normals, gaps[rows, axes], points, relative)


def detect_particles_halfspace(positions: np.ndarray, velocities: np.ndarray,
                               plane_point: np.ndarray, plane_normal: np.ndarray) -> ContactBatch:
    signed = (positions - plane_point) @ plane_normal
    below = signed < 0.0
    if not np.any(below):
        return ContactBatch.empty()
    indices = np.nonzero(below)[0]
    depth = -signed[indices]
    normals = np.tile(plane_normal, (indices.size, 1))
    points = positions[indices] + depth[:, None] * plane_normal
    return ContactBatch(indices.astype(np.int64), normals, depth, points, velocities[indices].copy())


def detect_contacts(system: MassSpringSystem, body: RigidBody) -> ContactBatch:
    if isinstance(body.shape, Sphere):
        return detect_particles_sphere(system.position, system.velocity, body)
    if isinstance(body.shape, Box):
        return detect_particles_box(system.position, system.velocity, body)
    raise TypeError(f"Không hỗ trợ hình dạng {type(body.shape).__name__}")


# =============================================================================
# Lực tiếp xúc
# =============================================================================

def coulomb_clamp(f_tangential: np.ndarray, f_normal_magnitude: float, mu: float) -> np.ndarray:
    """
    Thu nhỏ lực tiếp tuyến về biên nón ma sát, giữ nguyên hướng.

    Raises:
        ValueError: Nếu lực pháp tuyến âm
    """
    if f_normal_magnitude < 0.0:
        raise ValueError(f"Lực pháp tuyến không được âm: {f_normal_magnitude}")
    limit = mu * f_normal_magnitude
    magnitude = float(np.sqrt(np.dot(f_tangential, f_tangential)))
    if magnitude <= limit:
        return np.array(f_tangential, dtype=float)
    return f_tangential * (limit / magnitude)


def contact_force(contact: Contact, model: ContactForceModel) -> np.ndarray:
    """
    Lực lên chất điểm: f_n = max(0, k_restore*depth - c_damp*(v_rel·n)) theo n,
    cộng ma sát -k_constraint*v_t bị chặn ở mu*f_n.
    """
    n = contact.normal
    v_rel = contact.relative_velocity
    v_normal = float(np.dot(v_rel, n))
    f_n = max(0.0, model.k_restore * contact.depth - model.c_damp * v_normal)
    v_t = v_rel - v_normal * n
    friction = coulomb_clamp(-model.k_constraint * v_t, f_n, model.mu)
    return f_n * n + friction


def contact_forces(batch: ContactBatch, model: ContactForceModel) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Dạng mảng của contact_force.

    Returns:
        Tuple (lực lên chất điểm (m, 3), độ lớn pháp tuyến (m,), độ lớn tiếp tuyến (m,))
    """
    if len(batch) == 0:
        return np.zeros((0, 3)), np.zeros(0), np.zeros(0)
    n = batch.normals
    v_rel = batch.relative_velocities
    v_normal = np.einsum("ij,ij->i", v_rel, n)
    f_n = np.maximum(0.0, model.k_restore * batch.depths - model.c_damp * v_normal)
    v_t = v_rel - v_normal[:, None] * n
    friction = -model.k_constraint * v_t
    magnitude = np.sqrt(np.einsum("ij,ij->i", friction, friction))
    limit = model.mu * f_n
    over = magnitude > limit
    scale = np.ones_like(magnitude)
    scale[over] = limit[over] / magnitude[over]
    friction = friction * scale[:, None]
    tangential = np.where(over, limit, magnitude)
    return f_n[:, None] * n + friction, f_n, tangential


# =============================================================================
# Bản ghi tương tác
# =============================================================================

@dataclass
class InteractionRecord:
    """
    Một bước tương tác. force là lực (thực tế hoặc lẽ ra) tác dụng lên hệ chính.
    """
    t: float
    force: np.ndarray
    torque: np.ndarray
    contact_count: int
    particle_force_sum: np.ndarray
    max_depth: float = 0.0
    cone_excess: float = 0.0
    contact_indices: Optional[np.ndarray] = None
    contact_forces: Optional[np.ndarray] = None

    @classmethod
    def empty(cls, t: float) -> "InteractionRecord":
        return cls(t, np.zeros(3), np.zeros(3), 0, np.zeros(3), 0.0, -np.inf)


@dataclass
class InteractionLog:
    """
    Nhật ký tương tác dạng cột, đầu vào của summarize_interaction.
    """
    times: np.ndarray
    forces: np.ndarray
    contact_counts: np.ndarray

    @classmethod
    def from_records(cls, records: Sequence[InteractionRecord]) -> "InteractionLog":
        if not records:
            return cls(np.zeros(0), np.zeros((0, 3)), np.zeros(0, dtype=np.int64))
        return cls(
            np.array([r.t for r in records], dtype=float),
            np.array([r.force for r in records], dtype=float),
            np.array([r.contact_count for r in records], dtype=np.int64),
        )

    def __len__(self) -> int:
        return int(self.times.size)


def _build_record(t: float, batch: ContactBatch, forces: np.ndarray, f_n: np.ndarray,
                  tangential: np.ndarray, model: ContactForceModel,
                  body_center: Optional[np.ndarray]) -> InteractionRecord:
    if len(batch) == 0:
        return InteractionRecord.empty(t)
    on_body = -forces
    torque = (np.sum(np.cross(batch.points - body_center, on_body), axis=0)
              if body_center is not None else np.zeros(3))
    return InteractionRecord(
        t=t,
        force=np.sum(on_body, axis=0),
        torque=torque,
        contact_count=len(batch),
        particle_force_sum=np.sum(forces, axis=0),
        max_depth=float(np.max(batch.depths)),
        cone_excess=float(np.max(tangential - model.mu * f_n)),
        contact_indices=batch.indices.copy(),
        contact_forces=forces.copy(),
    )


def apply_two_way(body: RigidBody, system: MassSpringSystem, contacts: ContactBatch,
                  model: ContactForceModel, t: float = 0.0) -> InteractionRecord:
    """
    Cộng lực tiếp xúc vào chất điểm và lực đối vào vật rắn tại điểm tiếp xúc.
    """
    forces, f_n, tangential = contact_forces(contacts, model)
    record = _build_record(t, contacts, forces, f_n, tangential, model, body.position)
    if len(contacts):
        system.add_forces(contacts.indices, forces)
        apply_forces_at_points(body, -forces, contacts.points)
    return record


def apply_one_way(system: MassSpringSystem, contacts: ContactBatch, model: ContactForceModel,
                  t: float = 0.0, body_center: Optional[np.ndarray] = None) -> InteractionRecord:
    """
    Như apply_two_way nhưng vật rắn không nhận lực; bản ghi vẫn giữ lực lẽ ra tác dụng lên nó.
    """
    forces, f_n, tangential = contact_forces(contacts, model)
    record = _build_record(t, contacts, forces, f_n, tangential, model, body_center)
    if len(contacts):
        system.add_forces(contacts.indices, forces)
    return record


def ground_contact_forces(system: MassSpringSystem, plane_point: np.ndarray, plane_normal: np.ndarray,
                          model: ContactForceModel) -> np.ndarray:
    """
    Lực tiếp xúc của mặt đất tĩnh lên các chất điểm, dạng (n, 3).
    """
    forces = np.zeros_like(system.position)
    batch = detect_particles_halfspace(system.position, system.velocity, plane_point, plane_normal)
    if len(batch):
        forces[batch.indices] = contact_forces(batch, model)[0]
    return forces


# =============================================================================
# Mô hình tương tác dùng trong vòng song bước
# =============================================================================

class ContactInteraction:
    """
    Tiếp xúc giữa vật rắn (cầu hoặc hộp) và các chất điểm của hệ phụ.

    Ở chế độ một chiều, xuyên thấu sâu hơn violation_depth được ghi nhận là vi phạm
    ràng buộc va chạm nhưng không sửa.
    """

    def __init__(self, model: ContactForceModel, violation_depth: float = settings.CONTACT_VIOLATION_DEPTH):
        self.model = model
        self.violation_depth = violation_depth
        self.violation_steps = 0
        self.first_violation: Optional[float] = None

    def apply(self, body: Optional[RigidBody], system: MassSpringSystem, t: float, two_way: bool) -> InteractionRecord:
        if body is None:
            return InteractionRecord.empty(t)
        batch = detect_contacts(system, body)
        if two_way:
            return apply_two_way(body, system, batch, self.model, t)

        record = apply_one_way(system, batch, self.model, t, body.position)
        if record.max_depth > self.violation_depth:
            if self.violation_steps == 0:
                self.first_violation = t
                logger.warning(f"Vi phạm ràng buộc va chạm ở chế độ một chiều tại t={t:.6g} s: "
                               f"xuyên thấu {record.max_depth:.4g} m")
            self.violation_steps += 1
        return record


class TetherInteraction:
    """
    Lò xo - giảm chấn nối một điểm trong khung vật của hệ chính với chất điểm tay nắm
    của hệ phụ (dây bungee). Lực căng chỉ xuất hiện khi dây nối dài hơn rest_length.
    """

    def __init__(self, stiffness: float, damping: float = 0.0, body_point=(0.0, 0.0, 0.0),
                 rest_length: float = 0.0, handle_index: Optional[int] = None):
        if stiffness < 0.0 or damping < 0.0 or rest_length < 0.0:
            raise ValueError("Tham số dây nối không được âm")
        self.stiffness = stiffness
        self.damping = damping
        self.body_point = np.asarray(body_point, dtype=float)
        self.rest_length = rest_length
        self.handle_index = handle_index

    def force_on_handle(self, body: RigidBody, system: MassSpringSystem) -> Tuple[np.ndarray, np.ndarray]:
        """
        Returns:
            Tuple (lực lên chất điểm tay nắm, điểm gắn trên vật trong khung thế giới)
        """
        handle = self.handle_index if self.handle_index is not None else system.handle_index
        if handle is None:
            raise ValueError("Hệ phụ không có chất điểm tay nắm")
        attach = body.world_points(self.body_point)
        d = system.position[handle] - attach
        length = float(np.sqrt(np.dot(d, d)))
        if length <= self.rest_length or length <= settings.DEGENERATE_EPSILON:
            return np.zeros(3), attach
        direction = d / length
        v_rel = system.velocity[handle] - body.point_velocity(attach)
        magnitude = self.stiffness * (length - self.rest_length) + self.damping * float(np.dot(v_rel, direction))
        # Dây không đẩy
        magnitude = max(0.0, magnitude)
        return -magnitude * direction, attach

    def apply(self, body: Optional[RigidBody], system: MassSpringSystem, t: float, two_way: bool) -> InteractionRecord:
        if body is None:
            return InteractionRecord.empty(t)
        force, attach = self.force_on_handle(body, system)
        handle = self.handle_index if self.handle_index is not None else system.handle_index
        active = bool(np.any(force != 0.0))
        on_body = -force
        record = InteractionRecord(
            t=t,
            force=on_body,
            torque=np.cross(attach - body.position, on_body),
            contact_count=1 if active else 0,
            particle_force_sum=force.copy(),
            cone_excess=-np.inf,
        )
        if active:
            system.add_forces(np.array([handle], dtype=np.int64), force[None, :])
            if two_way:
                apply_forces_at_points(body, on_body[None, :], attach[None, :])
        return record

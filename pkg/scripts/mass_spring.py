#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Hệ phụ: mạng khối lượng - lò xo.
Gồm lò xo Hooke tuyến tính có giảm chấn dọc trục, các điểm ghim, trọng lực,
giảm chấn vận tốc toàn cục và các hàm dựng lưới cho rổ, cờ, dây bungee, thảm và lá.
"""

import sys
import os
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import settings
from scripts.sim_core import IntegrationError, step_semi_implicit

# Thiết lập logging
logger = logging.getLogger(__name__)

PINNED_EDGES = ("none", "top", "left", "all-corners")


class DegenerateSpringError(IntegrationError, ValueError):
    """
    Lò xo có hai đầu trùng nhau, hướng lực không xác định.
    Trong vòng song bước được xử lý như một dấu hiệu mất ổn định.
    """

    def __init__(self, message: str, spring_index: Optional[int] = None):
        super().__init__(message, index=spring_index, entity="secondary")
        self.spring_index = spring_index


@dataclass
class Particle:
    mass: float
    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    force_accum: np.ndarray = field(default_factory=lambda: np.zeros(3))
    pinned: bool = False

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError(f"Khối lượng chất điểm phải dương: {self.mass}")
        self.position = np.asarray(self.position, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)


@dataclass
class Spring:
    a: int
    b: int
    rest_length: float
    stiffness: float
    damping: float = 0.0
    compression_ratio: float = 1.0

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"Hai đầu lò xo phải khác nhau: {self.a}")
        if not self.rest_length > 0.0:
            raise ValueError(f"Chiều dài nghỉ phải dương: {self.rest_length}")
        if self.stiffness < 0.0 or self.damping < 0.0:
            raise ValueError("Độ cứng và hệ số giảm chấn không được âm")


@dataclass(frozen=True)
class Material:
    stiffness: float
    damping: float
    compression_ratio: float = 1.0


def resolve_material(material: Union[str, Dict[str, float], Material]) -> Material:
    """
    Lấy vật liệu theo tên preset trong settings.MATERIALS hoặc từ dict tham số.

    Raises:
        ValueError: Nếu tên preset không tồn tại
    """
    if isinstance(material, Material):
        return material
    if isinstance(material, str):
        if material not in settings.MATERIALS:
            raise ValueError(f"Không có vật liệu '{material}'; có: {', '.join(settings.MATERIALS)}")
        return Material(**settings.MATERIALS[material])
    return Material(**material)


class MassSpringSystem:
    """
    Mạng chất điểm - lò xo lưu dạng mảng numpy.

    Các chất điểm bị ghim không bao giờ đổi vị trí hay vận tốc. Sau mỗi bước,
    last_pin_force giữ tổng lực (không kể trọng lực) mà các điểm ghim đã hấp thụ
    và last_damping_force giữ tổng lực giảm chấn toàn cục lên các điểm tự do.
    pin_impulse và damping_impulse cộng dồn hai đại lượng đó nhân dt qua mọi bước.
    """

    def __init__(self, particles: Sequence[Particle], springs: Sequence[Spring],
                 global_damping: float = settings.GLOBAL_DAMPING,
                 triangles: Optional[Sequence[Tuple[int, int, int]]] = None,
                 handle_index: Optional[int] = None, name: str = ""):
        if len(particles) == 0:
            raise ValueError("Hệ cần ít nhất một chất điểm")
        if global_damping < 0.0:
            raise ValueError(f"Giảm chấn toàn cục không được âm: {global_damping}")

        n = len(particles)
        self.name = name
        self.global_damping = float(global_damping)
        self.mass = np.array([p.mass for p in particles], dtype=float)
        self.position = np.array([p.position for p in particles], dtype=float).reshape(n, 3)
        self.velocity = np.array([p.velocity for p in particles], dtype=float).reshape(n, 3)
        self.force_accum = np.array([p.force_accum for p in particles], dtype=float).reshape(n, 3)
        self.pinned = np.array([p.pinned for p in particles], dtype=bool)
        self.rest_position = self.position.copy()

        self.spring_a = np.array([s.a for s in springs], dtype=np.int64)
        self.spring_b = np.array([s.b for s in springs], dtype=np.int64)
        self.rest_length = np.array([s.rest_length for s in springs], dtype=float)
        self.stiffness = np.array([s.stiffness for s in springs], dtype=float)
        self.damping = np.array([s.damping for s in springs], dtype=float)
        self.compression_ratio = np.array([s.compression_ratio for s in springs], dtype=float)
        if self.spring_a.size and (self.spring_a.max() >= n or self.spring_b.max() >= n
                                   or min(self.spring_a.min(), self.spring_b.min()) < 0):
            raise ValueError("Chỉ số đầu lò xo nằm ngoài phạm vi")

        tri = np.array(triangles if triangles else [], dtype=np.int64).reshape(-1, 3)
        if tri.size and (tri.max() >= n or tri.min() < 0):
            raise ValueError("Tam giác tham chiếu chất điểm không tồn tại")
        self.triangles = tri
        self.handle_index = handle_index

        self.last_pin_force = np.zeros(3)
        self.last_damping_force = np.zeros(3)
        self.pin_impulse = np.zeros(3)
        self.damping_impulse = np.zeros(3)

    # ------------------------------------------------------------------
    # Truy cập
    # ------------------------------------------------------------------

    @property
    def n_particles(self) -> int:
        return int(self.mass.size)

    @property
    def n_springs(self) -> int:
        return int(self.rest_length.size)

    @property
    def free(self) -> np.ndarray:
        return ~self.pinned

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.mass))

    @property
    def anchors(self) -> Dict[int, np.ndarray]:
        """
        Danh sách gắn kết: chỉ số điểm ghim -> vị trí neo trong thế giới.
        """
        return {int(i): self.rest_position[i].copy() for i in np.nonzero(self.pinned)[0]}

    def particle(self, index: int) -> Particle:
        return Particle(float(self.mass[index]), self.position[index].copy(), self.velocity[index].copy(),
                        self.force_accum[index].copy(), bool(self.pinned[index]))

    def spring(self, index: int) -> Spring:
        return Spring(int(self.spring_a[index]), int(self.spring_b[index]), float(self.rest_length[index]),
                      float(self.stiffness[index]), float(self.damping[index]),
                      float(self.compression_ratio[index]))

    def momentum(self) -> np.ndarray:
        return np.sum(self.mass[:, None] * self.velocity, axis=0)

    def kinetic_energy(self) -> float:
        return 0.5 * float(np.sum(self.mass * np.einsum("ij,ij->i", self.velocity, self.velocity)))

    def spring_energy(self) -> float:
        """
        Thế năng đàn hồi, tính cả độ cứng giảm khi lò xo bị nén.
        """
        if self.n_springs == 0:
            return 0.0
        d = self.position[self.spring_b] - self.position[self.spring_a]
        extension = np.sqrt(np.einsum("ij,ij->i", d, d)) - self.rest_length
        k_eff = np.where(extension < 0.0, self.stiffness * self.compression_ratio, self.stiffness)
        return 0.5 * float(np.sum(k_eff * extension * extension))

    def gravity_energy(self, g: np.ndarray) -> float:
        return -float(np.sum(self.mass * (self.position @ g)))

    def max_displacement(self) -> float:
        """
        Độ dịch chuyển lớn nhất của một chất điểm so với cấu hình nghỉ.
        """
        delta = self.position - self.rest_position
        return float(np.sqrt(np.max(np.einsum("ij,ij->i", delta, delta))))

    def bounding_cylinder(self) -> Tuple[np.ndarray, float, float, float]:
        """
        Trụ đứng bao cấu hình nghỉ: (tâm trục xz, bán kính, y_min, y_max).
        """
        rest = self.rest_position
        center = np.array([0.5 * (rest[:, 0].min() + rest[:, 0].max()), 0.0,
                           0.5 * (rest[:, 2].min() + rest[:, 2].max())])
        radial = rest[:, [0, 2]] - center[[0, 2]]
        radius = float(np.sqrt(np.max(np.einsum("ij,ij->i", radial, radial))))
        return center, radius, float(rest[:, 1].min()), float(rest[:, 1].max())

    def clear_accumulators(self) -> None:
        self.force_accum = np.zeros_like(self.force_accum)

    def add_forces(self, indices: np.ndarray, forces: np.ndarray) -> None:
        """
        Cộng lực vào bộ tích lũy theo thứ tự chỉ số cố định.
        """
        if indices.size == 0:
            return
        n = self.n_particles
        for axis in range(3):
            self.force_accum[:, axis] += np.bincount(indices, weights=forces[:, axis], minlength=n)


# =============================================================================
# Lực lò xo
# =============================================================================

def spring_force(spring: Spring, pa: Particle, pb: Particle) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lực Hooke có giảm chấn dọc trục: f = [k(|d| - L0) + c (v_rel · d̂)] d̂ lên a, -f lên b.

    Raises:
        DegenerateSpringError: Nếu hai đầu trùng nhau
    """
    d = pb.position - pa.position
    length = float(np.sqrt(np.dot(d, d)))
    if length <= settings.DEGENERATE_EPSILON:
        raise DegenerateSpringError(f"Lò xo {spring.a}-{spring.b} có hai đầu trùng nhau")
    direction = d / length
    extension = length - spring.rest_length
    k = spring.stiffness if extension >= 0.0 else spring.stiffness * spring.compression_ratio
    v_rel = pb.velocity - pa.velocity
    magnitude = k * extension + spring.damping * float(np.dot(v_rel, direction))
    force = magnitude * direction
    return force, -force


def spring_forces(system: MassSpringSystem) -> np.ndarray:
    """
    Tổng lực lò xo lên từng chất điểm, dạng (n, 3).

    Raises:
        DegenerateSpringError: Nếu có lò xo suy biến
    """
    n = system.n_particles
    forces = np.zeros((n, 3))
    if system.n_springs == 0:
        return forces

    a, b = system.spring_a, system.spring_b
    d = system.position[b] - system.position[a]
    length = np.sqrt(np.einsum("ij,ij->i", d, d))
    degenerate = length <= settings.DEGENERATE_EPSILON
    if np.any(degenerate):
        index = int(np.argmax(degenerate))
        raise DegenerateSpringError(f"Lò xo #{index} có hai đầu trùng nhau", spring_index=index)

    direction = d / length[:, None]
    extension = length - system.rest_length
    k_eff = np.where(extension < 0.0, system.stiffness * system.compression_ratio, system.stiffness)
    v_rel = system.velocity[b] - system.velocity[a]
    magnitude = k_eff * extension + system.damping * np.einsum("ij,ij->i", v_rel, direction)
    f = magnitude[:, None] * direction

    for axis in range(3):
        forces[:, axis] = (np.bincount(a, weights=f[:, axis], minlength=n)
                           - np.bincount(b, weights=f[:, axis], minlength=n))
    return forces


def step_mass_spring(system: MassSpringSystem, gravity: np.ndarray,
                     external_forces: Optional[np.ndarray], dt: float) -> None:
    """
    Tiến hệ một bước: trọng lực + lò xo + giảm chấn toàn cục (-c m v) + lực ngoài,
    Euler bán ẩn cho các điểm tự do, rồi xóa bộ tích lũy.

    Args:
        system: Hệ khối lượng - lò xo
        gravity: Gia tốc trọng trường (3,)
        external_forces: Lực ngoài theo chỉ số chất điểm (n, 3) hoặc None
        dt: Bước thời gian

    Raises:
        IntegrationError: Nếu trạng thái không hữu hạn, kèm chỉ số chất điểm
    """
    forces = system.force_accum.copy()
    if external_forces is not None:
        forces += external_forces
    forces += spring_forces(system)

    damping_force = -system.global_damping * system.mass[:, None] * system.velocity
    forces += damping_force

    pinned = system.pinned
    free = ~pinned
    system.last_pin_force = np.sum(forces[pinned], axis=0) if np.any(pinned) else np.zeros(3)
    system.last_damping_force = np.sum(damping_force[free], axis=0)
    system.pin_impulse = system.pin_impulse + system.last_pin_force * dt
    system.damping_impulse = system.damping_impulse + system.last_damping_force * dt

    if np.any(free):
        acceleration = forces[free] / system.mass[free][:, None] + gravity
        try:
            new_position, new_velocity = step_semi_implicit(
                system.position[free], system.velocity[free], acceleration, dt)
        except IntegrationError as e:
            free_indices = np.nonzero(free)[0]
            index = int(free_indices[e.index]) if e.index is not None else None
            raise IntegrationError(f"Chất điểm #{index}: {e}", index=index, entity="secondary") from e
        system.position[free] = new_position
        system.velocity[free] = new_velocity

    system.clear_accumulators()


# =============================================================================
# Dựng lưới
# =============================================================================

class _SystemBuilder:
    """
    Gom chất điểm, lò xo, tam giác rồi tạo MassSpringSystem; lò xo dựng ở chiều dài nghỉ.
    """

    def __init__(self, material: Material):
        self.material = material
        self.positions: List[np.ndarray] = []
        self.pinned: List[bool] = []
        self.springs: List[Tuple[int, int, float]] = []
        self.triangles: List[Tuple[int, int, int]] = []

    def add_particle(self, position, pinned: bool = False) -> int:
        self.positions.append(np.asarray(position, dtype=float))
        self.pinned.append(pinned)
        return len(self.positions) - 1

    def add_spring(self, a: int, b: int, scale: float = 1.0) -> None:
        self.springs.append((a, b, scale))

    def add_triangle(self, a: int, b: int, c: int) -> None:
        self.triangles.append((a, b, c))

    def build(self, total_mass: float, global_damping: float, name: str,
              handle_index: Optional[int] = None) -> MassSpringSystem:
        if not total_mass > 0.0:
            raise ValueError(f"Tổng khối lượng phải dương: {total_mass}")
        particle_mass = total_mass / len(self.positions)
        particles = [Particle(particle_mass, p, pinned=pin) for p, pin in zip(self.positions, self.pinned)]
        springs = []
        for a, b, scale in self.springs:
            rest = float(np.linalg.norm(self.positions[b] - self.positions[a]))
            springs.append(Spring(a, b, rest, self.material.stiffness * scale,
                                  self.material.damping * scale, self.material.compression_ratio))
        system = MassSpringSystem(particles, springs, global_damping, self.triangles, handle_index, name)
        logger.debug(f"Đã dựng hệ '{name}': {system.n_particles} chất điểm, {system.n_springs} lò xo")
        return system


def build_net(rings: int, spokes: int, rim_radius: float, depth: float, taper: float,
              material: Union[str, Dict[str, float], Material] = "nylon-net",
              mass: float = 0.03, rim_center=(0.0, 0.0, 0.0), attachment_length: float = 0.02,
              global_damping: float = settings.GLOBAL_DAMPING) -> MassSpringSystem:
    """
    Dựng lưới rổ hình trụ thuôn: rings vòng x spokes nan, lò xo vòng, lò xo nan,
    lò xo chéo hai chiều mỗi ô, và vòng trên cùng nối bằng lò xo tới các điểm neo
    cố định trên vành rổ.

    Args:
        rings: Số vòng (>= 2)
        spokes: Số nan (>= 3)
        rim_radius: Bán kính vành (m)
        depth: Chiều sâu lưới từ vòng trên xuống vòng dưới (m)
        taper: Tỉ lệ bán kính vòng dưới / vòng trên, trong (0, 1]
        material: Vật liệu lò xo
        mass: Tổng khối lượng chia đều cho mọi chất điểm, kể cả điểm neo (kg)
        rim_center: Tâm vành rổ
        attachment_length: Khoảng cách dọc từ vành xuống vòng trên (m)

    Returns:
        MassSpringSystem: Lưới ở trạng thái nghỉ
    """
    if rings < 2 or spokes < 3:
        raise ValueError(f"Cần rings >= 2 và spokes >= 3, nhận được {rings}x{spokes}")
    if not (rim_radius > 0.0 and depth > 0.0 and 0.0 < taper <= 1.0 and attachment_length > 0.0):
        raise ValueError("Kích thước lưới không hợp lệ")

    cx, cy, cz = (float(v) for v in rim_center)
    builder = _SystemBuilder(resolve_material(material))
    angles = 2.0 * np.pi * np.arange(spokes) / spokes

    for r in range(rings):
        fraction = r / (rings - 1)
        radius = rim_radius * (1.0 - (1.0 - taper) * fraction)
        y = cy - attachment_length - depth * fraction
        for angle in angles:
            builder.add_particle((cx + radius * np.cos(angle), y, cz + radius * np.sin(angle)))
    anchor_start = rings * spokes
    for angle in angles:
        builder.add_particle((cx + rim_radius * np.cos(angle), cy, cz + rim_radius * np.sin(angle)), pinned=True)

    def idx(r: int, j: int) -> int:
        return r * spokes + (j % spokes)

    # Lò xo vòng
    for r in range(rings):
        for j in range(spokes):
            builder.add_spring(idx(r, j), idx(r, j + 1))
    # Lò xo nan
    for r in range(rings - 1):
        for j in range(spokes):
            builder.add_spring(idx(r, j), idx(r + 1, j))
    # Lò xo chéo
    for r in range(rings - 1):
        for j in range(spokes):
            builder.add_spring(idx(r, j), idx(r + 1, j + 1))
            builder.add_spring(idx(r, j + 1), idx(r + 1, j))
            builder.add_triangle(idx(r, j), idx(r + 1, j), idx(r + 1, j + 1))
            builder.add_triangle(idx(r, j), idx(r + 1, j + 1), idx(r, j + 1))
    # Lò xo gắn vành
    for j in range(spokes):
        builder.add_spring(anchor_start + j, idx(0, j))

    return builder.build(mass, global_damping, "net")


def _grid_position(origin: np.ndarray, plane: str, width: float, height: float,
                   rows: int, cols: int, i: int, j: int) -> np.ndarray:
    u = width * j / (cols - 1)
    w = height * i / (rows - 1)
    if plane == "xy":
        return origin + np.array([u, -w, 0.0])
    return origin + np.array([u, 0.0, w])


def build_grid(rows: int, cols: int, width: float, height: float,
               material: Union[str, Dict[str, float], Material] = "cloth",
               pinned_edge: str = "none", mass: float = 0.2, origin=(0.0, 0.0, 0.0),
               plane: str = "xy", bend_scale: float = 0.1,
               global_damping: float = settings.GLOBAL_DAMPING) -> MassSpringSystem:
    """
    Dựng lưới chữ nhật với lò xo cấu trúc, lò xo cắt (hai đường chéo mỗi ô) và lò xo
    uốn (nhảy qua một chất điểm); phát hai tam giác mỗi ô cho khí động học.

    Hàng 0 là cạnh trên, cột 0 là cạnh trái. plane="xy" treo đứng (hàng đi xuống
    theo -y), plane="xz" nằm ngang (hàng đi theo +z).
    """
    if rows < 2 or cols < 2:
        raise ValueError(f"Cần rows, cols >= 2, nhận được {rows}x{cols}")
    if not (width > 0.0 and height > 0.0):
        raise ValueError("Kích thước lưới phải dương")
    if pinned_edge not in PINNED_EDGES:
        raise ValueError(f"pinned_edge phải thuộc {PINNED_EDGES}: {pinned_edge}")
    if plane not in ("xy", "xz"):
        raise ValueError(f"plane phải là 'xy' hoặc 'xz': {plane}")

    origin = np.asarray(origin, dtype=float)
    builder = _SystemBuilder(resolve_material(material))
    corners = {(0, 0), (0, cols - 1), (rows - 1, 0), (rows - 1, cols - 1)}

    for i in range(rows):
        for j in range(cols):
            pinned = ((pinned_edge == "top" and i == 0)
                      or (pinned_edge == "left" and j == 0)
                      or (pinned_edge == "all-corners" and (i, j) in corners))
            builder.add_particle(_grid_position(origin, plane, width, height, rows, cols, i, j), pinned)

    def idx(i: int, j: int) -> int:
        return i * cols + j

    # Cấu trúc
    for i in range(rows):
        for j in range(cols - 1):
            builder.add_spring(idx(i, j), idx(i, j + 1))
    for i in range(rows - 1):
        for j in range(cols):
            builder.add_spring(idx(i, j), idx(i + 1, j))
    # Cắt
    for i in range(rows - 1):
        for j in range(cols - 1):
            builder.add_spring(idx(i, j), idx(i + 1, j + 1))
            builder.add_spring(idx(i, j + 1), idx(i + 1, j))
            builder.add_triangle(idx(i, j), idx(i + 1, j), idx(i + 1, j + 1))
            builder.add_triangle(idx(i, j), idx(i + 1, j + 1), idx(i, j + 1))
    # Uốn
    for i in range(rows):
        for j in range(cols - 2):
            builder.add_spring(idx(i, j), idx(i, j + 2), bend_scale)
    for i in range(rows - 2):
        for j in range(cols):
            builder.add_spring(idx(i, j), idx(i + 2, j), bend_scale)

    return builder.build(mass, global_damping, "grid")


def build_cord(segments: int, length: float,
               material: Union[str, Dict[str, float], Material] = "bungee",
               anchor=(0.0, 0.0, 0.0), mass: float = 2.0, direction=(0.0, -1.0, 0.0),
               initial_extent: Optional[float] = None,
               global_damping: float = settings.GLOBAL_DAMPING) -> MassSpringSystem:
    """
    Dựng dây nối tiếp: chất điểm đầu ghim tại điểm neo, chất điểm cuối là tay nắm
    (handle_index) để gắn vật rắn.

    Args:
        segments: Số đoạn (>= 1)
        length: Tổng chiều dài nghỉ (m)
        anchor: Điểm neo
        mass: Tổng khối lượng dây (kg)
        direction: Hướng trải dây ban đầu
        initial_extent: Chiều dài trải ban đầu; mặc định bằng length (dây ở trạng thái nghỉ),
            nhỏ hơn length nghĩa là dây đang chùng
    """
    if segments < 1:
        raise ValueError(f"Cần segments >= 1: {segments}")
    extent = length if initial_extent is None else initial_extent
    if not (length > 0.0 and extent > 0.0):
        raise ValueError("Chiều dài dây phải dương")
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    anchor = np.asarray(anchor, dtype=float)

    resolved = resolve_material(material)
    rest = length / segments
    particle_mass = mass / (segments + 1)
    particles = [Particle(particle_mass, anchor + direction * (extent * i / segments), pinned=(i == 0))
                 for i in range(segments + 1)]
    springs = [Spring(i, i + 1, rest, resolved.stiffness, resolved.damping, resolved.compression_ratio)
               for i in range(segments)]
    return MassSpringSystem(particles, springs, global_damping, None, handle_index=segments, name="cord")


def build_mat(rows: int, cols: int, width: float, depth: float, thickness: float,
              material: Union[str, Dict[str, float], Material] = "mat",
              mass: float = 4.0, origin=(0.0, 0.0, 0.0),
              global_damping: float = settings.GLOBAL_DAMPING) -> MassSpringSystem:
    """
    Dựng thảm: lưới nằm ngang ở độ cao origin_y + thickness, mỗi chất điểm được đỡ bởi
    một lò xo đứng nối tới điểm neo ghim trên sàn.
    """
    if not thickness > 0.0:
        raise ValueError(f"Độ dày thảm phải dương: {thickness}")
    origin = np.asarray(origin, dtype=float)
    top = build_grid(rows, cols, width, depth, material, "none", mass, origin + np.array([0.0, thickness, 0.0]),
                     plane="xz", global_damping=global_damping)
    resolved = resolve_material(material)
    n = top.n_particles
    particle_mass = mass / (2 * n)

    particles = [Particle(particle_mass, top.position[i]) for i in range(n)]
    particles += [Particle(particle_mass, top.position[i] - np.array([0.0, thickness, 0.0]), pinned=True)
                  for i in range(n)]
    springs = [top.spring(s) for s in range(top.n_springs)]
    springs += [Spring(i, n + i, thickness, resolved.stiffness, resolved.damping, resolved.compression_ratio)
                for i in range(n)]
    triangles = [tuple(int(v) for v in tri) for tri in top.triangles]
    return MassSpringSystem(particles, springs, global_damping, triangles, name="mat")


def build_leaf_pile(count: int, size: float, spacing: float,
                    material: Union[str, Dict[str, float], Material] = "leaf",
                    mass_per_leaf: float = 0.002, origin=(0.0, 0.0, 0.0),
                    global_damping: float = settings.GLOBAL_DAMPING) -> MassSpringSystem:
    """
    Dựng một hàng lá: count lưới 3x3 độc lập nằm ngang, cách nhau spacing theo trục x.
    """
    if count < 1 or not (size > 0.0 and spacing > 0.0):
        raise ValueError("Tham số đống lá không hợp lệ")
    origin = np.asarray(origin, dtype=float)
    particles: List[Particle] = []
    springs: List[Spring] = []
    triangles: List[Tuple[int, int, int]] = []
    for leaf in range(count):
        grid = build_grid(3, 3, size, size, material, "none", mass_per_leaf,
                          origin + np.array([leaf * spacing, 0.0, 0.0]), plane="xz",
                          global_damping=global_damping)
        offset = len(particles)
        particles += [grid.particle(i) for i in range(grid.n_particles)]
        for s in range(grid.n_springs):
            spring = grid.spring(s)
            springs.append(Spring(spring.a + offset, spring.b + offset, spring.rest_length,
                                  spring.stiffness, spring.damping, spring.compression_ratio))
        triangles += [tuple(int(v) + offset for v in tri) for tri in grid.triangles]
    return MassSpringSystem(particles, springs, global_damping, triangles, name="leaves")


BUILDERS = {
    "net": build_net,
    "grid": build_grid,
    "cord": build_cord,
    "mat": build_mat,
    "leaves": build_leaf_pile,
}

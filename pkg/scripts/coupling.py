#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Ba kiểu ghép nối hệ chính - hệ phụ:
- hai chiều: song bước, lực tương tác bằng nhau và ngược chiều;
- một chiều: mô phỏng hệ chính riêng, ghi quỹ đạo, rồi phát lại để điều khiển hệ phụ;
- lai: hệ chính tương tác với mô hình thế chỗ rẻ tiền, quỹ đạo thu được điều khiển hệ phụ.
Kèm các mô hình thế chỗ (trường giảm chấn, lưới lò xo đứng, trường cản nhớt)
và phát lại quỹ đạo chuyển động có nội suy.
"""

import sys
import os
import copy
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import settings
from scripts.aero import AeroModel, WindField, aero_forces
from scripts.interaction import ContactForceModel, InteractionLog, InteractionRecord, ground_contact_forces
from scripts.mass_spring import MassSpringSystem, step_mass_spring
from scripts.metrics import CouplingMode, InstabilityStatus, detect_instability
from scripts.rigid_body import BodyState, GravityModel, RigidBody, step_rigid_body
from scripts.sim_core import RunStatus, SimClock, run_lockstep, sample_stride
from utils.trace_io import TRACE_HEADER, read_table, write_table
from utils.vector_math import quat_rotate, quat_slerp

# Thiết lập logging
logger = logging.getLogger(__name__)


class PlaybackError(ValueError):
    """
    Thời điểm phát lại nằm ngoài khoảng của quỹ đạo.
    """
    pass


# =============================================================================
# Quỹ đạo chuyển động
# =============================================================================

@dataclass
class MotionTrace:
    """
    Chuỗi trạng thái hệ chính theo thời gian tăng dần.
    """
    states: List[BodyState]
    sample_interval: float = 0.0

    def __post_init__(self):
        if not self.states:
            raise ValueError("Quỹ đạo cần ít nhất một mẫu")
        self.times = np.array([s.t for s in self.states], dtype=float)
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("Thời điểm của quỹ đạo phải tăng ngặt")
        for s in self.states:
            if not all(np.all(np.isfinite(a)) for a in (s.position, s.orientation, s.linear_velocity, s.angular_velocity)):
                raise ValueError(f"Trạng thái không hữu hạn tại t={s.t}")
        if self.sample_interval <= 0.0 and self.times.size > 1:
            self.sample_interval = float(self.times[1] - self.times[0])

    def __len__(self) -> int:
        return len(self.states)

    @property
    def t_min(self) -> float:
        return float(self.times[0])

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def resample(self, stride: int) -> "MotionTrace":
        return MotionTrace(self.states[::stride], self.sample_interval * stride)

    def positions(self) -> np.ndarray:
        return np.array([s.position for s in self.states])

    def to_rows(self) -> List[List[float]]:
        return [[s.t, *s.position, *s.orientation, *s.linear_velocity, *s.angular_velocity] for s in self.states]

    @classmethod
    def from_array(cls, data: np.ndarray) -> "MotionTrace":
        states = [BodyState(float(row[0]), row[1:4].copy(), row[4:8].copy(), row[8:11].copy(), row[11:14].copy())
                  for row in data]
        return cls(states)


def save_motion_trace(path: Union[str, Path], trace: MotionTrace) -> None:
    write_table(path, TRACE_HEADER, trace.to_rows())
    logger.info(f"Đã lưu quỹ đạo {len(trace)} mẫu vào {path}")


def load_motion_trace(path: Union[str, Path]) -> MotionTrace:
    """
    Đọc quỹ đạo đã lưu (giai đoạn 1) để phát lại ở giai đoạn 2.
    """
    data = read_table(path, TRACE_HEADER)
    if data.shape[0] == 0:
        raise PlaybackError(f"Quỹ đạo rỗng: {path}")
    return MotionTrace.from_array(data)


def _copy_state(state: BodyState, t: float) -> BodyState:
    return BodyState(t, state.position.copy(), state.orientation.copy(),
                     state.linear_velocity.copy(), state.angular_velocity.copy())


def interpolate_trace(trace: MotionTrace, t: float) -> BodyState:
    """
    Trạng thái tại thời điểm t: trả đúng mẫu nếu t trùng mốc, ngược lại nội suy tuyến
    tính vị trí và vận tốc, nội suy cầu cho hướng.

    Raises:
        PlaybackError: Nếu t nằm ngoài [t_min, t_max]
    """
    times = trace.times
    tolerance = 1e-9 * max(1.0, abs(trace.t_max))
    if t < times[0] - tolerance or t > times[-1] + tolerance:
        raise PlaybackError(f"t={t} nằm ngoài quỹ đạo [{trace.t_min}, {trace.t_max}]")
    if t <= times[0]:
        return _copy_state(trace.states[0], t)
    if t >= times[-1]:
        return _copy_state(trace.states[-1], t)

    i = int(np.searchsorted(times, t, side="right")) - 1
    a = trace.states[i]
    if times[i] == t:
        return _copy_state(a, t)
    b = trace.states[i + 1]
    fraction = (t - times[i]) / (times[i + 1] - times[i])
    return BodyState(
        t,
        a.position + fraction * (b.position - a.position),
        quat_slerp(a.orientation, b.orientation, fraction),
        a.linear_velocity + fraction * (b.linear_velocity - a.linear_velocity),
        a.angular_velocity + fraction * (b.angular_velocity - a.angular_velocity),
    )


# =============================================================================
# Mô hình thế chỗ
# =============================================================================

@dataclass(frozen=True)
class BoxRegion:
    min_corner: tuple
    max_corner: tuple

    def __post_init__(self):
        if any(hi <= lo for lo, hi in zip(self.min_corner, self.max_corner)):
            raise ValueError(f"Vùng hộp suy biến: {self.min_corner} - {self.max_corner}")

    def contains(self, point: np.ndarray) -> bool:
        return bool(np.all(point >= self.min_corner) and np.all(point <= self.max_corner))


@dataclass(frozen=True)
class CylinderRegion:
    """
    Trụ đứng (trục song song y) tâm (center_x, center_z).
    """
    center_x: float
    center_z: float
    radius: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.radius > 0.0 and self.y_max > self.y_min):
            raise ValueError("Vùng trụ suy biến")

    def contains(self, point: np.ndarray) -> bool:
        dx = point[0] - self.center_x
        dz = point[2] - self.center_z
        return bool(dx * dx + dz * dz <= self.radius * self.radius and self.y_min <= point[1] <= self.y_max)


def cylinder_around(system: MassSpringSystem) -> CylinderRegion:
    """
    Trụ đứng bao cấu hình nghỉ của hệ phụ.
    """
    center, radius, y_min, y_max = system.bounding_cylinder()
    return CylinderRegion(float(center[0]), float(center[2]), radius, y_min, y_max)


def _body_points(state: BodyState, contact_points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    world = state.position + quat_rotate(state.orientation, contact_points)
    velocity = state.linear_velocity + np.cross(state.angular_velocity, world - state.position)
    return world, velocity


class StandIn(ABC):
    """
    Mô hình thế chỗ rẻ tiền thay cho hệ phụ khi tương tác với hệ chính.
    """

    kind = ""

    @abstractmethod
    def force_and_torque(self, state: BodyState) -> Tuple[np.ndarray, np.ndarray]:
        ...

    def check_passivity(self, body: RigidBody, dt: float) -> None:
        pass


@dataclass(frozen=True)
class DampingFieldStandIn(StandIn):
    """
    Trường giảm chấn: trong vùng, động lượng tịnh tiến và quay bị giảm chấn.
    """
    region: Union[BoxRegion, CylinderRegion]
    c_linear: float = 0.0
    c_angular: float = 0.0
    kind = "damping_field"

    def __post_init__(self):
        if self.c_linear < 0.0 or self.c_angular < 0.0:
            raise ValueError("Hệ số giảm chấn không được âm")

    def force_and_torque(self, state: BodyState) -> Tuple[np.ndarray, np.ndarray]:
        if not self.region.contains(state.position):
            return np.zeros(3), np.zeros(3)
        return -self.c_linear * state.linear_velocity, -self.c_angular * state.angular_velocity

    def check_passivity(self, body: RigidBody, dt: float) -> None:
        """
        Raises:
            ValueError: Nếu một bước có thể đảo chiều vận tốc (c*dt/m >= 1)
        """
        if self.c_linear * dt / body.mass >= 1.0 or self.c_angular * dt / float(np.min(body.inertia_diag)) >= 1.0:
            raise ValueError(f"Trường giảm chấn quá mạnh cho dt={dt}: c*dt/m phải < 1")


@dataclass(frozen=True)
class SpringGridStandIn(StandIn):
    """
    Lưới lò xo đứng dưới mặt phẳng plane_height, tác dụng lên các điểm mẫu trong khung vật.
    """
    plane_height: float
    k_vertical: float
    c_vertical: float
    contact_points: tuple
    kind = "spring_grid"

    def __post_init__(self):
        if self.k_vertical < 0.0 or self.c_vertical < 0.0:
            raise ValueError("k, c của lưới lò xo không được âm")

    def force_and_torque(self, state: BodyState) -> Tuple[np.ndarray, np.ndarray]:
        points = np.asarray(self.contact_points, dtype=float).reshape(-1, 3)
        world, velocity = _body_points(state, points)
        submerged = world[:, 1] < self.plane_height
        if not np.any(submerged):
            return np.zeros(3), np.zeros(3)
        f_y = self.k_vertical * (self.plane_height - world[submerged, 1]) - self.c_vertical * velocity[submerged, 1]
        forces = np.zeros((int(np.count_nonzero(submerged)), 3))
        forces[:, 1] = np.maximum(0.0, f_y)
        torque = np.sum(np.cross(world[submerged] - state.position, forces), axis=0)
        return np.sum(forces, axis=0), torque


@dataclass(frozen=True)
class ViscousDragStandIn(StandIn):
    """
    Trường cản nhớt dưới mặt nước surface_height, -c_drag * v trên mỗi điểm ngập.
    """
    surface_height: float
    c_drag: float
    contact_points: tuple
    kind = "viscous_drag"

    def __post_init__(self):
        if self.c_drag < 0.0:
            raise ValueError("c_drag không được âm")

    def force_and_torque(self, state: BodyState) -> Tuple[np.ndarray, np.ndarray]:
        points = np.asarray(self.contact_points, dtype=float).reshape(-1, 3)
        world, velocity = _body_points(state, points)
        submerged = world[:, 1] < self.surface_height
        if not np.any(submerged):
            return np.zeros(3), np.zeros(3)
        forces = -self.c_drag * velocity[submerged]
        torque = np.sum(np.cross(world[submerged] - state.position, forces), axis=0)
        return np.sum(forces, axis=0), torque


def stand_in_force(stand_in: StandIn, body_state: BodyState) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lực và mô-men (quanh khối tâm) mà mô hình thế chỗ tác dụng lên hệ chính.
    """
    return stand_in.force_and_torque(body_state)


def sphere_sample_points(radius: float) -> tuple:
    """
    Tâm và sáu điểm trên mặt cầu theo các trục, dùng làm điểm mẫu cho lực cản.
    """
    points = [(0.0, 0.0, 0.0)]
    for axis in range(3):
        for sign in (1.0, -1.0):
            p = [0.0, 0.0, 0.0]
            p[axis] = sign * radius
            points.append(tuple(p))
    return tuple(points)


def box_bottom_corners(half_extents: Sequence[float]) -> tuple:
    hx, hy, hz = half_extents
    return ((-hx, -hy, -hz), (hx, -hy, -hz), (-hx, -hy, hz), (hx, -hy, hz))


# =============================================================================
# Các hệ tham gia song bước
# =============================================================================

class DynamicPrimary:
    """
    Vật rắn được mô phỏng động lực học, có thể kèm mô hình thế chỗ.
    """

    def __init__(self, body: RigidBody, gravity: GravityModel, stand_in: Optional[StandIn] = None):
        self.body = body
        self.gravity = gravity
        self.stand_in = stand_in
        self.records: List[InteractionRecord] = []

    def current_body(self, t: float) -> RigidBody:
        return self.body

    def accumulate(self, t: float) -> None:
        if self.stand_in is None:
            return
        force, torque = stand_in_force(self.stand_in, self.body.state(t))
        self.body.force_accum = self.body.force_accum + force
        self.body.torque_accum = self.body.torque_accum + torque
        active = bool(np.any(force != 0.0) or np.any(torque != 0.0))
        self.records.append(InteractionRecord(t, force, torque, 1 if active else 0, -force, cone_excess=-np.inf))

    def advance(self, dt: float) -> None:
        step_rigid_body(self.body, self.gravity, dt)

    def snapshot(self, t: float) -> BodyState:
        return self.body.state(t)

    def stability(self, velocity_ceiling: float) -> InstabilityStatus:
        b = self.body
        status = detect_instability(np.vstack([b.position, b.position]),
                                    np.vstack([b.linear_velocity, b.angular_velocity]), velocity_ceiling)
        return status if status.stable else InstabilityStatus(False, 0, status.reason)


class PlaybackPrimary:
    """
    Vật rắn động học phát lại từ quỹ đạo; không nhận lực.
    """

    def __init__(self, trace: MotionTrace, template: RigidBody):
        self.trace = trace
        self.body = copy.deepcopy(template)

    def current_body(self, t: float) -> RigidBody:
        self.body.set_state(interpolate_trace(self.trace, t))
        self.body.clear_accumulators()
        return self.body

    def accumulate(self, t: float) -> None:
        pass

    def advance(self, dt: float) -> None:
        pass

    def snapshot(self, t: float) -> BodyState:
        return interpolate_trace(self.trace, t)

    def stability(self, velocity_ceiling: float) -> InstabilityStatus:
        return InstabilityStatus(True)


@dataclass(frozen=True)
class GroundPlane:
    point: tuple = (0.0, 0.0, 0.0)
    normal: tuple = (0.0, 1.0, 0.0)
    model: ContactForceModel = field(default_factory=ContactForceModel)


class SecondaryDriver:
    """
    Hệ khối lượng - lò xo cùng các lực môi trường (gió, mặt đất).
    """

    def __init__(self, system: MassSpringSystem, gravity: GravityModel,
                 wind: Optional[WindField] = None, aero: Optional[AeroModel] = None,
                 ground: Optional[GroundPlane] = None):
        self.system = system
        self.gravity = gravity
        self.wind = wind
        self.aero = aero
        self.ground = ground
        self.max_displacement = 0.0

    def external_forces(self, t: float) -> Optional[np.ndarray]:
        external = None
        if self.aero is not None and self.wind is not None:
            external = aero_forces(self.system, self.wind, self.aero, t)
        if self.ground is not None:
            grounded = ground_contact_forces(self.system, np.asarray(self.ground.point, dtype=float),
                                             np.asarray(self.ground.normal, dtype=float), self.ground.model)
            external = grounded if external is None else external + grounded
        return external

    def advance(self, t: float, dt: float) -> None:
        step_mass_spring(self.system, self.gravity.g, self.external_forces(t), dt)
        self.max_displacement = max(self.max_displacement, self.system.max_displacement())

    def positions(self) -> np.ndarray:
        return self.system.position

    def stability(self, velocity_ceiling: float) -> InstabilityStatus:
        return detect_instability(self.system.position, self.system.velocity, velocity_ceiling)


# =============================================================================
# Các đường ống ghép nối
# =============================================================================

@dataclass
class CoupledSetup:
    """
    Mọi thứ một lần chạy ghép nối cần; body/system/interaction là nguyên mẫu, mỗi lần
    chạy làm việc trên bản sao.
    """
    body: Optional[RigidBody]
    system: Optional[MassSpringSystem]
    interaction: Optional[object]
    gravity: GravityModel
    duration: float
    dt_primary: float = settings.DEFAULT_PRIMARY_DT
    dt_secondary: float = settings.DEFAULT_SECONDARY_DT
    sample_interval: float = settings.OUTPUT_SAMPLE_INTERVAL
    primary_gravity: bool = True
    stand_in: Optional[StandIn] = None
    wind: Optional[WindField] = None
    aero: Optional[AeroModel] = None
    ground: Optional[GroundPlane] = None
    wind_follows_primary: bool = False
    velocity_ceiling: float = settings.VELOCITY_CEILING
    drive_trace: Optional[MotionTrace] = None


@dataclass
class CouplingResult:
    mode: CouplingMode
    primary_trace: Optional[MotionTrace]
    drive_trace: Optional[MotionTrace]
    secondary_times: np.ndarray
    secondary_samples: List[np.ndarray]
    records: List[InteractionRecord]
    interaction_log: InteractionLog
    stand_in_log: Optional[InteractionLog]
    status: RunStatus
    wall_clock: Dict[str, float]
    body: Optional[RigidBody] = None
    system: Optional[MassSpringSystem] = None
    max_displacement: float = 0.0
    violation_steps: int = 0


def _primary_gravity(setup: CoupledSetup) -> GravityModel:
    return setup.gravity if setup.primary_gravity else GravityModel(np.zeros(3))


def _bound_wind(setup: CoupledSetup, follow) -> Optional[WindField]:
    wind = setup.wind
    if wind is None or wind.source is None or not setup.wind_follows_primary or follow is None:
        return wind
    return replace(wind, source=replace(wind.source, path=follow))


def _primary_trace(states: List[BodyState], sample_interval: float, dt: float) -> Optional[MotionTrace]:
    if not states:
        return None
    return MotionTrace(states, dt).resample(sample_stride(sample_interval, dt))


def run_two_way(setup: CoupledSetup) -> CouplingResult:
    """
    Ghép hai chiều: song bước trên một đồng hồ chung dt = min(dt_primary, dt_secondary).

    Raises:
        ValueError: Nếu thiếu hệ chính, hệ phụ hoặc mô hình tương tác
    """
    if setup.body is None or setup.system is None or setup.interaction is None:
        raise ValueError("Ghép hai chiều cần cả hệ chính, hệ phụ và mô hình tương tác")

    body = copy.deepcopy(setup.body)
    system = copy.deepcopy(setup.system)
    interaction = copy.deepcopy(setup.interaction)
    dt = min(setup.dt_primary, setup.dt_secondary)

    primary = DynamicPrimary(body, _primary_gravity(setup))
    wind = _bound_wind(setup, lambda t: body.position.copy())
    secondary = SecondaryDriver(system, setup.gravity, wind, setup.aero, setup.ground)

    logger.info(f"Bắt đầu ghép hai chiều: dt={dt}, thời lượng {setup.duration} s")
    result = run_lockstep(primary, secondary, interaction, SimClock(dt), setup.duration,
                          setup.sample_interval, two_way=True, velocity_ceiling=setup.velocity_ceiling)
    logger.info(f"Kết thúc ghép hai chiều sau {result.status.steps} bước, {result.wall_clock:.2f} s")

    return CouplingResult(
        mode=CouplingMode.TWO_WAY,
        primary_trace=MotionTrace(result.primary_samples, setup.sample_interval),
        drive_trace=None,
        secondary_times=np.array(result.secondary_times),
        secondary_samples=result.secondary_samples,
        records=result.records,
        interaction_log=InteractionLog.from_records(result.records),
        stand_in_log=None,
        status=result.status,
        wall_clock={"primary": 0.0, "secondary": 0.0, "total": result.wall_clock},
        body=body,
        system=system,
        max_displacement=secondary.max_displacement,
    )


def _record_then_drive(setup: CoupledSetup, stand_in: Optional[StandIn], mode: CouplingMode) -> CouplingResult:
    status = RunStatus()
    wall_primary = 0.0
    drive: Optional[MotionTrace] = None
    stand_in_log: Optional[InteractionLog] = None
    body: Optional[RigidBody] = None

    # Giai đoạn 1: hệ chính chạy riêng (hoặc với mô hình thế chỗ)
    if setup.drive_trace is not None:
        drive = setup.drive_trace
        logger.info(f"Dùng lại quỹ đạo điều khiển có sẵn ({len(drive)} mẫu)")
    elif setup.body is not None:
        body = copy.deepcopy(setup.body)
        primary = DynamicPrimary(body, _primary_gravity(setup), stand_in)
        # Quỹ đạo điều khiển phải mịn ít nhất bằng bước của hệ phụ
        record_dt = setup.dt_primary
        if setup.system is not None:
            record_dt = min(setup.dt_primary, setup.dt_secondary)
        logger.info(f"Giai đoạn 1 ({mode.value}): mô phỏng hệ chính với dt={record_dt}")
        phase1 = run_lockstep(primary, None, None, SimClock(record_dt), setup.duration,
                              setup.sample_interval, two_way=False,
                              velocity_ceiling=setup.velocity_ceiling, record_every_step=True)
        drive = MotionTrace(phase1.primary_samples, record_dt)
        status = phase1.status
        wall_primary = phase1.wall_clock
        if stand_in is not None:
            stand_in_log = InteractionLog.from_records(primary.records)
        logger.info(f"Giai đoạn 1 xong: {len(drive)} mẫu, {wall_primary:.2f} s")

    primary_trace = None
    if drive is not None:
        drive_dt = drive.sample_interval if drive.sample_interval > 0.0 else setup.dt_primary
        primary_trace = drive.resample(sample_stride(setup.sample_interval, drive_dt))

    # Giai đoạn 2: phát lại quỹ đạo để điều khiển hệ phụ
    records: List[InteractionRecord] = []
    secondary_times: List[float] = []
    secondary_samples: List[np.ndarray] = []
    wall_secondary = 0.0
    system = None
    max_displacement = 0.0
    violation_steps = 0

    if setup.system is not None:
        system = copy.deepcopy(setup.system)
        dt = setup.dt_secondary
        steps = int(round(setup.duration / dt))
        playback = None
        interaction = None
        follow = None
        if drive is not None and setup.body is not None:
            steps = min(steps, int(np.floor(drive.t_max / dt + 1e-9)))
            playback = PlaybackPrimary(drive, setup.body)
            interaction = copy.deepcopy(setup.interaction)
            follow = lambda t: interpolate_trace(drive, min(t, drive.t_max)).position
            if drive.sample_interval > 0.0 and abs(drive.sample_interval - dt) > 1e-12 * dt:
                logger.warning(f"Quỹ đạo điều khiển có bước {drive.sample_interval} khác dt={dt}; dùng nội suy")

        secondary = SecondaryDriver(system, setup.gravity, _bound_wind(setup, follow), setup.aero, setup.ground)
        logger.info(f"Giai đoạn 2 ({mode.value}): điều khiển hệ phụ với dt={dt}, {steps} bước")
        phase2 = run_lockstep(playback, secondary, interaction, SimClock(dt), steps * dt,
                              setup.sample_interval, two_way=False, velocity_ceiling=setup.velocity_ceiling)
        records = phase2.records
        secondary_times = phase2.secondary_times
        secondary_samples = phase2.secondary_samples
        wall_secondary = phase2.wall_clock
        max_displacement = secondary.max_displacement
        violation_steps = getattr(interaction, "violation_steps", 0)
        if status.ok:
            status = phase2.status
        logger.info(f"Giai đoạn 2 xong: {phase2.status.steps} bước, {wall_secondary:.2f} s")

    if setup.system is None and stand_in_log is not None:
        interaction_log = stand_in_log
    else:
        interaction_log = InteractionLog.from_records(records)

    return CouplingResult(
        mode=mode,
        primary_trace=primary_trace,
        drive_trace=drive,
        secondary_times=np.array(secondary_times),
        secondary_samples=secondary_samples,
        records=records,
        interaction_log=interaction_log,
        stand_in_log=stand_in_log,
        status=status,
        wall_clock={"primary": wall_primary, "secondary": wall_secondary, "total": wall_primary + wall_secondary},
        body=body,
        system=system,
        max_displacement=max_displacement,
        violation_steps=violation_steps,
    )


def run_one_way(setup: CoupledSetup) -> CouplingResult:
    """
    Ghép một chiều: hệ chính không nhận phản lực; lực lẽ ra tác dụng lên nó vẫn được ghi lại.
    """
    return _record_then_drive(setup, None, CouplingMode.ONE_WAY)


def run_hybrid(setup: CoupledSetup) -> CouplingResult:
    """
    Ghép lai: giai đoạn 1 hệ chính tương tác với mô hình thế chỗ, giai đoạn 2 như một chiều.

    Raises:
        ValueError: Nếu thiếu mô hình thế chỗ hoặc trường giảm chấn có thể đảo chiều vận tốc
    """
    if setup.stand_in is None:
        raise ValueError("Ghép lai cần đúng một mô hình thế chỗ")
    if setup.body is not None and setup.drive_trace is None:
        setup.stand_in.check_passivity(setup.body, setup.dt_primary)
    return _record_then_drive(setup, setup.stand_in, CouplingMode.HYBRID)


RUNNERS = {
    CouplingMode.TWO_WAY: run_two_way,
    CouplingMode.ONE_WAY: run_one_way,
    CouplingMode.HYBRID: run_hybrid,
}

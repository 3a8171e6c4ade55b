#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Lõi tích phân thời gian với bước cố định.
Cung cấp đồng hồ mô phỏng, bước Euler bán ẩn và bộ lập lịch chạy song bước
(lockstep) cho một hoặc hai hệ trên cùng một đồng hồ.
"""

import sys
import os
import time
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Protocol, Tuple

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import settings
from scripts.metrics import InstabilityStatus

# Thiết lập logging
logger = logging.getLogger(__name__)


class IntegrationError(ArithmeticError):
    """
    Trạng thái không hữu hạn trong bước tích phân (dấu hiệu mất ổn định).
    """

    def __init__(self, message: str, index: Optional[int] = None, entity: str = ""):
        super().__init__(message)
        self.index = index
        self.entity = entity


@dataclass
class SimClock:
    """
    Đồng hồ bước cố định; t luôn được dựng lại bằng step_index * dt.
    """
    dt: float
    step_index: int = 0

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt phải dương, nhận được {self.dt}")

    @property
    def t(self) -> float:
        return self.step_index * self.dt

    def tick(self) -> None:
        self.step_index += 1

    def steps_for(self, duration: float) -> int:
        """
        Số bước ứng với duration; duration phải là bội số của dt.

        Raises:
            ValueError: Nếu duration âm hoặc không phải bội số của dt
        """
        if duration < 0.0:
            raise ValueError(f"duration không được âm: {duration}")
        steps = int(round(duration / self.dt))
        if abs(steps * self.dt - duration) > 1e-9 * max(1.0, duration):
            raise ValueError(f"duration {duration} không phải bội số của dt {self.dt}")
        return steps


def step_semi_implicit(positions: np.ndarray, velocities: np.ndarray,
                       accelerations: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Một bước Euler bán ẩn: cập nhật vận tốc trước, rồi vị trí bằng vận tốc mới.

    Args:
        positions: Vị trí hiện tại
        velocities: Vận tốc hiện tại
        accelerations: Gia tốc trong bước này
        dt: Bước thời gian (giây)

    Returns:
        Tuple (vị trí mới, vận tốc mới)

    Raises:
        IntegrationError: Nếu đầu vào không hữu hạn
    """
    if not dt > 0.0:
        raise ValueError(f"dt phải dương, nhận được {dt}")
    for name, arr in (("vị trí", positions), ("vận tốc", velocities), ("gia tốc", accelerations)):
        finite = np.isfinite(arr)
        if not np.all(finite):
            flat = np.atleast_2d(finite)
            index = int(np.argmax(~np.all(flat, axis=1)))
            raise IntegrationError(f"{name} không hữu hạn", index=index)

    new_velocities = velocities + accelerations * dt
    new_positions = positions + new_velocities * dt
    return new_positions, new_velocities


# =============================================================================
# Giao diện các hệ tham gia song bước
# =============================================================================

class PrimarySystem(Protocol):
    def current_body(self, t: float) -> Any: ...

    def accumulate(self, t: float) -> None: ...

    def advance(self, dt: float) -> None: ...

    def snapshot(self, t: float) -> Any: ...

    def stability(self, velocity_ceiling: float) -> InstabilityStatus: ...


class SecondarySystem(Protocol):
    system: Any

    def advance(self, t: float, dt: float) -> None: ...

    def positions(self) -> np.ndarray: ...

    def stability(self, velocity_ceiling: float) -> InstabilityStatus: ...


class Interaction(Protocol):
    def apply(self, body: Any, system: Any, t: float, two_way: bool) -> Any: ...


# =============================================================================
# Kết quả song bước
# =============================================================================

@dataclass
class RunStatus:
    status: str = "completed"
    message: str = ""
    steps: int = 0
    t_end: float = 0.0
    entity: str = ""
    index: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.status == "completed"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "message": self.message,
            "steps": self.steps,
            "t_end": self.t_end,
            "entity": self.entity,
            "index": self.index,
        }


@dataclass
class LockstepResult:
    primary_samples: List[Any] = field(default_factory=list)
    secondary_times: List[float] = field(default_factory=list)
    secondary_samples: List[np.ndarray] = field(default_factory=list)
    records: List[Any] = field(default_factory=list)
    status: RunStatus = field(default_factory=RunStatus)
    wall_clock: float = 0.0


def sample_stride(sample_interval: float, dt: float) -> int:
    """
    Số bước giữa hai mẫu đầu ra (ít nhất 1).
    """
    stride = max(1, int(round(sample_interval / dt)))
    if abs(stride * dt - sample_interval) > 1e-9 * sample_interval:
        logger.warning(f"Khoảng lấy mẫu {sample_interval} s không là bội số của dt {dt}; dùng {stride * dt} s")
    return stride


def run_lockstep(primary: Optional[PrimarySystem], secondary: Optional[SecondarySystem],
                 interaction: Optional[Interaction], clock: SimClock, duration: float,
                 sample_interval: float = settings.OUTPUT_SAMPLE_INTERVAL,
                 two_way: bool = True,
                 velocity_ceiling: float = settings.VELOCITY_CEILING,
                 record_every_step: bool = False) -> LockstepResult:
    """
    Chạy song bước hai hệ trên cùng một đồng hồ.

    Mỗi bước: lực tương tác được tính đúng một lần từ trạng thái chung hiện tại và
    cộng vào bộ tích lũy của cả hai hệ, sau đó cả hai hệ tiến cùng một dt.

    Args:
        primary: Hệ chính (có thể None)
        secondary: Hệ phụ (có thể None)
        interaction: Mô hình tương tác (None nếu không có)
        clock: Đồng hồ bước cố định
        duration: Thời lượng (giây), bội số của dt
        sample_interval: Khoảng lấy mẫu quỹ đạo đầu ra
        two_way: Áp phản lực lên hệ chính hay không
        velocity_ceiling: Trần tốc độ cho bộ phát hiện mất ổn định
        record_every_step: Lấy mẫu hệ chính ở mọi bước (quỹ đạo điều khiển)

    Returns:
        LockstepResult: Quỹ đạo, nhật ký tương tác và trạng thái (kể cả khi bị hủy)
    """
    steps = clock.steps_for(duration)
    stride = 1 if record_every_step else sample_stride(sample_interval, clock.dt)
    secondary_stride = sample_stride(sample_interval, clock.dt)
    result = LockstepResult()

    def sample(step: int, t: float) -> None:
        if primary is not None and (step % stride == 0):
            result.primary_samples.append(primary.snapshot(t))
        if secondary is not None and (step % secondary_stride == 0):
            result.secondary_times.append(t)
            result.secondary_samples.append(secondary.positions().copy())

    started = time.perf_counter()
    sample(clock.step_index, clock.t)

    for _ in range(steps):
        t = clock.t
        try:
            body = primary.current_body(t) if primary is not None else None
            if interaction is not None and secondary is not None:
                record = interaction.apply(body, secondary.system, t, two_way)
                if record is not None:
                    result.records.append(record)
            if primary is not None:
                primary.accumulate(t)
                primary.advance(clock.dt)
            if secondary is not None:
                secondary.advance(t, clock.dt)
        except IntegrationError as e:
            clock.tick()
            result.status = RunStatus("unstable", str(e), clock.step_index, clock.t, e.entity, e.index)
            break

        clock.tick()

        status, entity = _check(primary, secondary, velocity_ceiling)
        if not status.stable:
            result.status = RunStatus("unstable", status.reason, clock.step_index, clock.t, entity, status.index)
            sample(0, clock.t)
            break

        sample(clock.step_index, clock.t)

    if result.status.ok:
        result.status.steps = clock.step_index
        result.status.t_end = clock.t
    else:
        logger.error(f"Mô phỏng mất ổn định tại t={result.status.t_end:.6g} s "
                     f"({result.status.entity} #{result.status.index}): {result.status.message}")

    result.wall_clock = time.perf_counter() - started
    return result


def _check(primary, secondary, velocity_ceiling: float) -> Tuple[InstabilityStatus, str]:
    if primary is not None:
        status = primary.stability(velocity_ceiling)
        if not status.stable:
            return status, "primary"
    if secondary is not None:
        status = secondary.stability(velocity_ceiling)
        if not status.stable:
            return status, "secondary"
    return InstabilityStatus(True), ""

#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Phân tích tương tác giữa hệ chính và hệ phụ.
Tính lực/gia tốc hiệu dụng (min/max/mean) trên một cửa sổ tiếp xúc, cây quyết định
chọn kiểu ghép nối, và bộ phát hiện mất ổn định dùng chung cho mọi lần chạy.
"""

import sys
import os
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import settings

# Thiết lập logging
logger = logging.getLogger(__name__)


class CouplingMode(str, Enum):
    """
    Kiểu ghép nối hai hệ mô phỏng.
    """
    TWO_WAY = "two_way"
    ONE_WAY = "one_way"
    HYBRID = "hybrid"


# =============================================================================
# Phát hiện mất ổn định
# =============================================================================

@dataclass(frozen=True)
class InstabilityStatus:
    stable: bool
    index: Optional[int] = None
    reason: str = ""


def detect_instability(positions: np.ndarray, velocities: np.ndarray,
                       velocity_ceiling: float = settings.VELOCITY_CEILING) -> InstabilityStatus:
    """
    Kiểm tra trạng thái có giá trị không hữu hạn hoặc tốc độ vượt trần.

    Args:
        positions: Mảng vị trí dạng (n, 3) hoặc (3,)
        velocities: Mảng vận tốc cùng dạng
        velocity_ceiling: Trần tốc độ (m/s)

    Returns:
        InstabilityStatus: stable=False kèm chỉ số thực thể vi phạm đầu tiên
    """
    pos = np.atleast_2d(positions)
    vel = np.atleast_2d(velocities)

    bad_pos = ~np.all(np.isfinite(pos), axis=1)
    bad_vel = ~np.all(np.isfinite(vel), axis=1)
    non_finite = bad_pos | bad_vel
    if np.any(non_finite):
        index = int(np.argmax(non_finite))
        return InstabilityStatus(False, index, "giá trị không hữu hạn")

    speed_sq = np.einsum("ij,ij->i", vel, vel)
    too_fast = speed_sq > velocity_ceiling * velocity_ceiling
    if np.any(too_fast):
        index = int(np.argmax(too_fast))
        return InstabilityStatus(False, index, f"tốc độ vượt trần {velocity_ceiling} m/s")

    return InstabilityStatus(True)


# =============================================================================
# Thống kê tương tác
# =============================================================================

@dataclass(frozen=True)
class WindowPolicy:
    sustained_duration: float = settings.SUSTAINED_CONTACT_DURATION
    sustained_fraction: float = settings.SUSTAINED_CONTACT_FRACTION


@dataclass(frozen=True)
class InteractionStats:
    """
    Lực tương tác (độ lớn lực tổng lên hệ chính) và gia tốc hiệu dụng tương ứng.
    Gia tốc luôn được suy ra bằng phép chia lực cho khối lượng, không tính độc lập.
    """
    primary_mass: float
    force_min: float
    force_max: float
    force_mean: float
    window: Tuple[float, float]
    contact_fraction: float
    sustained: bool = False
    sample_count: int = 0

    @property
    def accel_min(self) -> float:
        return self.force_min / self.primary_mass

    @property
    def accel_max(self) -> float:
        return self.force_max / self.primary_mass

    @property
    def accel_mean(self) -> float:
        return self.force_mean / self.primary_mass

    @property
    def has_contact(self) -> bool:
        return self.contact_fraction > 0.0

    @classmethod
    def empty(cls, primary_mass: float) -> "InteractionStats":
        return cls(primary_mass, 0.0, 0.0, 0.0, (0.0, 0.0), 0.0)

    def table_row(self, primary: str, secondary: str, secondary_mass: float) -> Dict[str, Any]:
        """
        Một dòng theo thứ tự cột của bảng lực/gia tốc.
        """
        values = [primary, self.primary_mass, secondary, secondary_mass,
                  self.force_min, self.force_max, self.force_mean,
                  self.accel_min, self.accel_max, self.accel_mean]
        return dict(zip(settings.STATS_TABLE_COLUMNS, values))

    def report_lines(self) -> List[str]:
        """
        Báo cáo dạng "khóa: giá trị".
        """
        return [
            f"primary_mass: {self.primary_mass!r}",
            f"force_min: {self.force_min!r}",
            f"force_max: {self.force_max!r}",
            f"force_mean: {self.force_mean!r}",
            f"accel_min: {self.accel_min!r}",
            f"accel_max: {self.accel_max!r}",
            f"accel_mean: {self.accel_mean!r}",
            f"window_start: {self.window[0]!r}",
            f"window_end: {self.window[1]!r}",
            f"contact_fraction: {self.contact_fraction!r}",
            f"sustained_contact: {str(self.sustained).lower()}",
            f"samples: {self.sample_count}",
        ]


def _find_sustained_start(in_contact: np.ndarray, window_steps: int, fraction: float) -> Optional[int]:
    """
    Chỉ số bước đầu tiên mà cửa sổ window_steps bước có ít nhất fraction số bước tiếp xúc.
    """
    if window_steps <= 0 or in_contact.size < window_steps:
        return None
    cumulative = np.concatenate(([0], np.cumsum(in_contact, dtype=np.int64)))
    counts = cumulative[window_steps:] - cumulative[:-window_steps]
    # Cửa sổ phải bắt đầu bằng một bước tiếp xúc
    candidates = np.nonzero((counts >= fraction * window_steps) & in_contact[:counts.size])[0]
    if candidates.size == 0:
        return None
    return int(candidates[0])


def summarize_interaction(interaction_log, primary_mass: float,
                          window_policy: Optional[WindowPolicy] = None) -> InteractionStats:
    """
    Tóm tắt nhật ký tương tác thành thống kê lực và gia tốc hiệu dụng.

    Cửa sổ phân tích là hợp các khoảng tiếp xúc; nếu tiếp xúc kéo dài (ít nhất
    sustained_fraction số bước trong sustained_duration giây) thì chỉ lấy
    sustained_duration giây đầu tiên của đoạn tiếp xúc đó.

    Args:
        interaction_log: Nhật ký có các cột times, forces (n, 3), contact_counts
        primary_mass: Khối lượng hệ chính (kg)
        window_policy: Chính sách chọn cửa sổ

    Returns:
        InteractionStats: Thống kê; rỗng (contact_fraction = 0) nếu không có tiếp xúc

    Raises:
        ValueError: Nếu nhật ký rỗng hoặc khối lượng không dương
    """
    if primary_mass <= 0.0:
        raise ValueError(f"Khối lượng hệ chính phải dương, nhận được {primary_mass}")

    times = np.asarray(interaction_log.times, dtype=float)
    if times.size == 0:
        raise ValueError("Nhật ký tương tác rỗng")

    policy = window_policy or WindowPolicy()
    forces = np.asarray(interaction_log.forces, dtype=float).reshape(-1, 3)
    counts = np.asarray(interaction_log.contact_counts)
    in_contact = counts > 0
    contact_fraction = float(np.count_nonzero(in_contact)) / float(times.size)

    if not np.any(in_contact):
        logger.info("Không phát hiện tương tác trong nhật ký")
        return InteractionStats.empty(primary_mass)

    magnitudes = np.sqrt(np.einsum("ij,ij->i", forces, forces))

    # Khoảng thời gian mỗi bước, lấy từ hai mốc đầu (lưới thời gian cố định)
    step = float(times[1] - times[0]) if times.size > 1 else 0.0
    window_steps = int(round(policy.sustained_duration / step)) if step > 0.0 else 0
    start = _find_sustained_start(in_contact, window_steps, policy.sustained_fraction)

    if start is not None:
        selected = slice(start, start + window_steps)
        samples = magnitudes[selected]
        window = (float(times[start]), float(times[start]) + policy.sustained_duration)
        sustained = True
    else:
        samples = magnitudes[in_contact]
        contact_times = times[in_contact]
        window = (float(contact_times[0]), float(contact_times[-1]))
        sustained = False

    return InteractionStats(
        primary_mass=primary_mass,
        force_min=float(np.min(samples)),
        force_max=float(np.max(samples)),
        force_mean=float(np.mean(samples)),
        window=window,
        contact_fraction=contact_fraction,
        sustained=sustained,
        sample_count=int(samples.size),
    )


# =============================================================================
# Tư vấn chọn kiểu ghép nối
# =============================================================================

@dataclass(frozen=True)
class AdvisorInput:
    stats: InteractionStats
    contextually_important: bool = True
    secondary_stable_under_one_way: bool = True
    stand_in_available: bool = False
    two_way_cost_acceptable: bool = True


@dataclass(frozen=True)
class Recommendation:
    mode: CouplingMode
    rationale: List[str] = field(default_factory=list)
    warning: Optional[str] = None

    @property
    def text(self) -> str:
        lines = list(self.rationale)
        if self.warning:
            lines.append(f"CẢNH BÁO: {self.warning}")
        return "\n".join(lines)


def recommend_coupling(advisor_input: AdvisorInput,
                       accel_threshold: float = settings.ACCEL_THRESHOLD) -> Tuple[CouplingMode, str]:
    """
    Cây quyết định chọn kiểu ghép nối (hàm thuần).

    Returns:
        Tuple[CouplingMode, str]: Kiểu ghép nối và lời giải thích từng nhánh đã đi qua
    """
    recommendation = advise(advisor_input, accel_threshold)
    return recommendation.mode, recommendation.text


def advise(advisor_input: AdvisorInput, accel_threshold: float = settings.ACCEL_THRESHOLD) -> Recommendation:
    stats = advisor_input.stats
    rationale: List[str] = []

    accel_mean = stats.accel_mean
    low_accel = accel_mean < accel_threshold
    if low_accel:
        rationale.append(f"gia tốc hiệu dụng trung bình {accel_mean:.4g} m/s^2 < ngưỡng {accel_threshold:.4g}: ảnh hưởng lên hệ chính nhỏ")
    else:
        rationale.append(f"gia tốc hiệu dụng trung bình {accel_mean:.4g} m/s^2 >= ngưỡng {accel_threshold:.4g}: ảnh hưởng lên hệ chính đáng kể")

    if not advisor_input.contextually_important:
        rationale.append("tương tác không quan trọng về ngữ cảnh")

    negligible = low_accel or not advisor_input.contextually_important
    if negligible:
        if advisor_input.secondary_stable_under_one_way:
            rationale.append("hệ phụ ổn định khi ghép một chiều -> chọn ghép một chiều")
            return Recommendation(CouplingMode.ONE_WAY, rationale)
        rationale.append("hệ phụ mất ổn định khi ghép một chiều -> loại ghép một chiều")

    if advisor_input.two_way_cost_acceptable:
        rationale.append("chi phí tính toán ghép hai chiều chấp nhận được -> chọn ghép hai chiều")
        return Recommendation(CouplingMode.TWO_WAY, rationale)
    rationale.append("chi phí ghép hai chiều quá lớn cho chu kỳ gỡ lỗi")

    if advisor_input.stand_in_available:
        rationale.append("có mô hình thế chỗ -> chọn ghép lai")
        return Recommendation(CouplingMode.HYBRID, rationale)

    rationale.append("không có mô hình thế chỗ -> đành ghép hai chiều")
    return Recommendation(CouplingMode.TWO_WAY, rationale,
                          warning="không có phương án dung hòa hợp lý; ghép hai chiều dù chi phí cao")

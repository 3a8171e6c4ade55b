#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Module tiện ích toán vector và quaternion cho bộ mô phỏng.
Vector là mảng numpy dạng (3,), quaternion là mảng (4,) theo thứ tự (w, x, y, z).
"""

import logging
from typing import Iterable

import numpy as np

# Thiết lập logging
logger = logging.getLogger(__name__)

IDENTITY_QUATERNION = np.array([1.0, 0.0, 0.0, 0.0])


def vec3(values: Iterable[float]) -> np.ndarray:
    """
    Tạo vector 3 chiều kiểu float từ một dãy số.

    Raises:
        ValueError: Nếu không đúng 3 thành phần
    """
    arr = np.array(list(values), dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"Vector cần đúng 3 thành phần, nhận được {arr.shape}")
    return arr


def is_finite(arr: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(arr)))


def norm(v: np.ndarray) -> float:
    return float(np.sqrt(np.dot(v, v)))


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Tích Hamilton a ⊗ b.
    """
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    """
    Chuẩn hóa quaternion về độ dài 1.

    Raises:
        ValueError: Nếu quaternion có độ dài bằng 0
    """
    length = float(np.sqrt(np.dot(q, q)))
    if length == 0.0:
        raise ValueError("Không thể chuẩn hóa quaternion có độ dài 0")
    return q / length


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """
    Ma trận quay 3x3 (khung vật -> khung thế giới) của quaternion đơn vị.
    """
    w, x, y, z = q
    return np.array([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """
    Quay vector (hoặc mảng vector dạng (n, 3)) từ khung vật sang khung thế giới.
    """
    return v @ quat_to_matrix(q).T


def quat_rotate_inverse(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """
    Quay vector từ khung thế giới về khung vật.
    """
    return v @ quat_to_matrix(q)


def quat_slerp(a: np.ndarray, b: np.ndarray, fraction: float) -> np.ndarray:
    """
    Nội suy cầu giữa hai quaternion đơn vị.

    Args:
        a: Quaternion tại fraction = 0
        b: Quaternion tại fraction = 1
        fraction: Tỉ lệ nội suy trong [0, 1]

    Returns:
        np.ndarray: Quaternion đơn vị nội suy
    """
    if fraction == 0.0:
        return a.copy()
    if fraction == 1.0:
        return b.copy()

    dot = float(np.dot(a, b))
    # Chọn đường ngắn hơn trên mặt cầu
    if dot < 0.0:
        b = -b
        dot = -dot

    if dot > 0.9995:
        # Hai quaternion gần trùng nhau: nội suy tuyến tính rồi chuẩn hóa
        return quat_normalize(a + fraction * (b - a))

    theta_0 = np.arccos(dot)
    theta = theta_0 * fraction
    sin_theta_0 = np.sin(theta_0)
    s0 = np.cos(theta) - dot * np.sin(theta) / sin_theta_0
    s1 = np.sin(theta) / sin_theta_0
    return quat_normalize(s0 * a + s1 * b)


def integrate_orientation(q: np.ndarray, omega_world: np.ndarray, dt: float) -> np.ndarray:
    """
    Tích phân hướng theo vận tốc góc khung thế giới: q' = q + ½·dt·(0, ω) ⊗ q, sau đó chuẩn hóa.
    """
    omega_quat = np.array([0.0, omega_world[0], omega_world[1], omega_world[2]])
    q_dot = 0.5 * quat_multiply(omega_quat, q)
    return quat_normalize(q + q_dot * dt)

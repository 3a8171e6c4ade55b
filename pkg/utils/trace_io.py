#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Module tiện ích đọc/ghi bảng số dạng CSV cho quỹ đạo và nhật ký tương tác.
Giá trị thực được ghi bằng repr() nên đọc lại cho đúng từng bit.
"""

import os
import csv
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

# Thiết lập logging
logger = logging.getLogger(__name__)

# Cột của quỹ đạo hệ chính
TRACE_HEADER = ["t", "px", "py", "pz", "qw", "qx", "qy", "qz", "vx", "vy", "vz", "wx", "wy", "wz"]

# Cột của nhật ký tương tác
INTERACTION_LOG_HEADER = ["t", "fx", "fy", "fz", "contact_count"]


class TraceFormatError(ValueError):
    """
    File CSV sai định dạng; line là số dòng (bắt đầu từ 1) gây lỗi nếu biết.
    """

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f"dòng {line}: {message}")
        self.line = line


def secondary_trace_header(n_particles: int) -> List[str]:
    """
    Header của quỹ đạo hệ phụ: t, p0x, p0y, p0z, p1x, ...
    """
    header = ["t"]
    for i in range(n_particles):
        header += [f"p{i}x", f"p{i}y", f"p{i}z"]
    return header


def format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_table(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence]) -> int:
    """
    Ghi bảng số ra file CSV có header.

    Args:
        path: Đường dẫn file
        header: Tên cột
        rows: Các dòng giá trị

    Returns:
        int: Số dòng dữ liệu đã ghi
    """
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        count = 0
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f)
            writer.writerow(header)
            for row in rows:
                if len(row) != len(header):
                    raise TraceFormatError(f"dòng có {len(row)} giá trị, cần {len(header)}")
                writer.writerow([format_value(v) for v in row])
                count += 1
        logger.debug(f"Đã ghi {count} dòng vào {path}")
        return count
    except Exception as e:
        logger.error(f"Lỗi khi ghi file {path}: {str(e)}")
        raise


def read_table(path: Union[str, Path], expected_header: Optional[Sequence[str]] = None) -> np.ndarray:
    """
    Đọc file CSV số thành mảng (n, số cột).

    Args:
        path: Đường dẫn file
        expected_header: Header bắt buộc; None để chấp nhận mọi header bắt đầu bằng "t"

    Returns:
        np.ndarray: Dữ liệu dạng float

    Raises:
        FileNotFoundError: Nếu file không tồn tại
        TraceFormatError: Nếu header hoặc giá trị không hợp lệ
    """
    try:
        with open(path, 'r', newline='', encoding='utf-8') as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None:
                raise TraceFormatError("file rỗng, thiếu header", line=1)
            header = [h.strip() for h in header]
            if expected_header is not None and header != list(expected_header):
                raise TraceFormatError(f"header không khớp: {','.join(header)}", line=1)
            if expected_header is None and (not header or header[0] != "t"):
                raise TraceFormatError("cột đầu tiên phải là t", line=1)

            rows = []
            for line_number, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise TraceFormatError(f"có {len(row)} giá trị, cần {len(header)}", line=line_number)
                try:
                    rows.append([float(v) for v in row])
                except ValueError:
                    raise TraceFormatError(f"giá trị không phải số: {row}", line=line_number)
        return np.array(rows, dtype=float).reshape(-1, len(header))
    except FileNotFoundError:
        logger.error(f"Không tìm thấy file: {path}")
        raise
    except Exception as e:
        logger.error(f"Lỗi khi đọc file {path}: {str(e)}")
        raise

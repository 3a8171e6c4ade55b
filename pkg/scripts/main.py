#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Script điều khiển chính của bộ mô phỏng ghép nối vật rắn - hệ khối lượng lò xo.
Các lệnh: run (chạy một kịch bản), compare (so sánh ba kiểu ghép nối),
advise (phân tích nhật ký tương tác và gợi ý kiểu ghép nối), dump-mesh (xuất lưới hệ phụ).
"""

import os
import sys
import argparse
import logging
from pathlib import Path
from typing import Any, List, Optional, Tuple

import numpy as np

# Thêm thư mục gốc của dự án vào sys.path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

# Import cấu hình
from config import settings

from scripts.coupling import PlaybackError, load_motion_trace
from scripts.interaction import InteractionLog
from scripts.metrics import AdvisorInput, CouplingMode, advise, summarize_interaction
from scripts.scenario_loader import (ScenarioParseError, ScenarioValidationError, load_scenario_file,
                                     parse_override)
from scripts.scenario_runner import build_secondary, compare_modes, run_scenario, write_bundle, write_mesh
from utils.trace_io import INTERACTION_LOG_HEADER, TraceFormatError, read_table

logger = logging.getLogger(__name__)


def setup_logging() -> None:
    """
    Thiết lập logging cho tiến trình: ghi file log và in ra màn hình.
    """
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format=settings.LOG_FORMAT,
        handlers=[
            logging.FileHandler(settings.LOG_FILE, encoding='utf-8'),
            logging.StreamHandler()
        ]
    )


def collect_overrides(args: argparse.Namespace) -> List[Tuple[str, Any]]:
    """
    Gom các ghi đè từ --set và các cờ tắt --dt, --duration, --seed.
    """
    overrides = [parse_override(text) for text in getattr(args, "set", None) or []]
    if getattr(args, "dt", None) is not None:
        overrides.append(("time.dt_primary", args.dt))
        overrides.append(("time.dt_secondary", args.dt))
    if getattr(args, "duration", None) is not None:
        overrides.append(("time.duration", args.duration))
    if getattr(args, "seed", None) is not None:
        overrides.append(("seed", args.seed))
    return overrides


def _output_dir(args: argparse.Namespace, name: str) -> Path:
    return Path(args.out) if args.out else settings.OUTPUT_DIR / name


# =============================================================================
# Các lệnh
# =============================================================================

def cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario_file(args.scenario, collect_overrides(args))

    drive_trace = None
    if args.trace:
        if scenario.mode == CouplingMode.TWO_WAY:
            raise ScenarioValidationError("mode", "--trace chỉ dùng cho ghép một chiều hoặc lai")
        drive_trace = load_motion_trace(args.trace)

    artifacts = run_scenario(scenario, drive_trace)
    output_dir = _output_dir(args, scenario.name)
    write_bundle(artifacts, output_dir, save_drive_trace=args.save_drive_trace)

    status = artifacts.status
    print(f"Kịch bản: {scenario.name} ({scenario.mode.value})")
    print(f"Trạng thái: {status.status}, {status.steps} bước, t = {status.t_end:.6g} s")
    print(f"Kết quả: {output_dir}")
    if not status.ok:
        print(f"Mất ổn định ({status.entity} #{status.index}): {status.message}", file=sys.stderr)
        return settings.EXIT_INSTABILITY
    return settings.EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    scenario = load_scenario_file(args.scenario, collect_overrides(args))
    output_dir = _output_dir(args, f"{scenario.name}_compare")
    summaries = compare_modes(scenario, output_dir)

    print(f"So sánh kiểu ghép nối: {scenario.name}")
    print("=" * 86)
    print(f"{'mode':<10}{'exit_speed':>14}{'max_disp':>14}{'wall_primary':>14}"
          f"{'wall_second':>14}{'wall_total':>12}{'status':>10}")
    for s in summaries.values():
        print(f"{s.mode.value:<10}{s.exit_speed:>14.6g}{s.max_displacement:>14.6g}{s.wall_primary:>14.3f}"
              f"{s.wall_secondary:>14.3f}{s.wall_total:>12.3f}{s.status:>10}")
    print("=" * 86)
    print(f"Kết quả: {output_dir}")

    if any(s.status != "completed" for s in summaries.values()):
        return settings.EXIT_INSTABILITY
    return settings.EXIT_OK


def load_interaction_log(path: str) -> InteractionLog:
    """
    Raises:
        ScenarioParseError: Nếu file thiếu, sai header hoặc không có dòng nào
    """
    try:
        data = read_table(path, INTERACTION_LOG_HEADER)
    except FileNotFoundError:
        raise ScenarioParseError(f"Không tìm thấy nhật ký tương tác: {path}")
    except TraceFormatError as e:
        raise ScenarioParseError(f"Nhật ký tương tác không hợp lệ: {e}", e.line)
    if data.shape[0] == 0:
        raise ScenarioParseError(f"Nhật ký tương tác rỗng: {path}")
    return InteractionLog(data[:, 0], data[:, 1:4], data[:, 4].astype(np.int64))


def cmd_advise(args: argparse.Namespace) -> int:
    if not args.mass > 0.0:
        raise ScenarioValidationError("--mass", "khối lượng hệ chính phải dương")
    stats = summarize_interaction(load_interaction_log(args.log), args.mass)

    print("Thống kê tương tác")
    print("=" * 48)
    for key, value in stats.table_row(args.primary_name, args.secondary_name, args.secondary_mass).items():
        print(f"  {key:<16}{value}")
    print(f"  {'window':<16}{stats.window[0]:.6g} - {stats.window[1]:.6g} s")
    print("=" * 48)

    if not stats.has_contact:
        print("Không phát hiện tương tác; ghép một chiều (one_way) là đủ.")
        return settings.EXIT_OK

    recommendation = advise(AdvisorInput(
        stats=stats,
        contextually_important=not args.not_important,
        secondary_stable_under_one_way=not args.unstable_one_way,
        stand_in_available=args.stand_in_available,
        two_way_cost_acceptable=not args.two_way_too_costly,
    ), args.accel_threshold)
    print(f"Gợi ý: {recommendation.mode.value}")
    for line in recommendation.text.splitlines():
        print(f"  - {line}")
    return settings.EXIT_OK


def cmd_dump_mesh(args: argparse.Namespace) -> int:
    scenario = load_scenario_file(args.scenario, collect_overrides(args))
    if scenario.secondary is None:
        raise ScenarioValidationError("secondary", "kịch bản không có hệ phụ")
    system = build_secondary(scenario.secondary)
    output_dir = _output_dir(args, f"{scenario.name}_mesh")
    write_mesh(system, output_dir)
    print(f"Lưới '{scenario.secondary.builder}': {system.n_particles} chất điểm, "
          f"{system.n_springs} lò xo, {len(system.triangles)} tam giác")
    print(f"Kết quả: {output_dir}")
    return settings.EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "advise": cmd_advise,
    "dump-mesh": cmd_dump_mesh,
}


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Phân tích tham số dòng lệnh.

    Returns:
        argparse.Namespace: Tham số đã phân tích
    """
    parser = argparse.ArgumentParser(description='Mô phỏng ghép nối vật rắn và hệ khối lượng - lò xo')
    subparsers = parser.add_subparsers(dest='command', required=True)

    def add_scenario_arguments(sub: argparse.ArgumentParser) -> None:
        sub.add_argument('--scenario', required=True, help='File kịch bản JSON')
        sub.add_argument('--out', help='Thư mục kết quả (mặc định: output/<tên kịch bản>)')
        sub.add_argument('--set', action='append', metavar='KEY=VALUE',
                         help='Ghi đè một giá trị, ví dụ --set time.duration=0.5')
        sub.add_argument('--dt', type=float, help='Bước thời gian cho cả hai hệ')
        sub.add_argument('--duration', type=float, help='Thời lượng mô phỏng (giây)')
        sub.add_argument('--seed', type=int, help='Dành sẵn; bộ mô phỏng không dùng số ngẫu nhiên')

    run_parser = subparsers.add_parser('run', help='Chạy một kịch bản')
    add_scenario_arguments(run_parser)
    run_parser.add_argument('--trace', help='Quỹ đạo điều khiển đã lưu, bỏ qua giai đoạn 1')
    run_parser.add_argument('--save-drive-trace', action='store_true',
                            help='Ghi quỹ đạo điều khiển của giai đoạn 1')

    compare_parser = subparsers.add_parser('compare', help='So sánh ba kiểu ghép nối')
    add_scenario_arguments(compare_parser)

    mesh_parser = subparsers.add_parser('dump-mesh', help='Xuất cấu hình nghỉ của hệ phụ')
    add_scenario_arguments(mesh_parser)

    advise_parser = subparsers.add_parser('advise', help='Phân tích nhật ký tương tác và gợi ý kiểu ghép nối')
    advise_parser.add_argument('log', help='File interaction_log.csv')
    advise_parser.add_argument('--mass', type=float, required=True, help='Khối lượng hệ chính (kg)')
    advise_parser.add_argument('--primary-name', default='primary')
    advise_parser.add_argument('--secondary-name', default='secondary')
    advise_parser.add_argument('--secondary-mass', type=float, default=0.0)
    advise_parser.add_argument('--accel-threshold', type=float, default=settings.ACCEL_THRESHOLD)
    advise_parser.add_argument('--not-important', action='store_true',
                               help='Tương tác không quan trọng về ngữ cảnh')
    advise_parser.add_argument('--unstable-one-way', action='store_true',
                               help='Hệ phụ mất ổn định khi ghép một chiều')
    advise_parser.add_argument('--stand-in-available', action='store_true',
                               help='Có mô hình thế chỗ cho hệ phụ')
    advise_parser.add_argument('--two-way-too-costly', action='store_true',
                               help='Chi phí ghép hai chiều không chấp nhận được')

    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Hàm chính; trả về mã thoát.
    """
    args = parse_arguments(argv)
    setup_logging()

    try:
        return COMMANDS[args.command](args)
    except ScenarioParseError as e:
        logger.error(f"Lỗi đọc dữ liệu: {str(e)}")
        print(f"Lỗi đọc dữ liệu: {e}", file=sys.stderr)
        return settings.EXIT_PARSE_ERROR
    except (TraceFormatError, PlaybackError, FileNotFoundError) as e:
        logger.error(f"Lỗi đọc quỹ đạo: {str(e)}")
        print(f"Lỗi đọc quỹ đạo: {e}", file=sys.stderr)
        return settings.EXIT_PARSE_ERROR
    except (ScenarioValidationError, ValueError) as e:
        logger.error(f"Cấu hình không hợp lệ: {str(e)}")
        print(f"Cấu hình không hợp lệ: {e}", file=sys.stderr)
        return settings.EXIT_VALIDATION_ERROR
    except Exception as e:
        logger.error(f"Lỗi không xử lý được: {str(e)}")
        print(f"Lỗi: {e}", file=sys.stderr)
        return settings.EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

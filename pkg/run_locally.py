#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Script chạy hàng loạt các kịch bản mô phỏng trên máy tính cục bộ.
Kiểm tra môi trường, rồi chạy mỗi kịch bản trong một tiến trình riêng
(python -m scripts.main run) với thư mục kết quả riêng.
"""

import os
import sys
import subprocess
import argparse
import importlib.util
import logging
import json
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import load_dotenv

sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

# Thiết lập đường dẫn cơ bản
BASE_DIR = Path(__file__).resolve().parent
LOGS_DIR = BASE_DIR / "logs"
ENV_FILE = BASE_DIR / ".env"

logger = logging.getLogger("run_locally")

REQUIRED_MODULES = ["numpy", "dotenv"]


def check_python_version() -> bool:
    """
    Kiểm tra phiên bản Python đã đạt yêu cầu chưa.
    """
    required_version = (3, 8)
    current_version = sys.version_info

    if current_version < required_version:
        logger.error(f"Cần Python phiên bản {required_version[0]}.{required_version[1]} trở lên. "
                     f"Phiên bản hiện tại: {current_version[0]}.{current_version[1]}")
        return False

    logger.info(f"Đang sử dụng Python {current_version[0]}.{current_version[1]}.{current_version[2]}")
    return True


def check_dependencies() -> bool:
    """
    Kiểm tra các thư viện Python cần thiết đã được cài đặt chưa.

    Returns:
        bool: True nếu đủ thư viện
    """
    missing = [name for name in REQUIRED_MODULES if importlib.util.find_spec(name) is None]
    if missing:
        logger.error(f"Thiếu thư viện: {', '.join(missing)}. Hãy chạy: pip install -r requirements.txt")
        return False
    logger.info("Đã có đủ thư viện cần thiết")
    return True


def setup_environment() -> bool:
    """
    Nạp .env (nếu có) và tạo các thư mục cần thiết.
    """
    try:
        LOGS_DIR.mkdir(exist_ok=True)
        if ENV_FILE.exists():
            load_dotenv(ENV_FILE)
            logger.info(f"Đã nạp biến môi trường từ {ENV_FILE}")
        return True
    except Exception as e:
        logger.error(f"Lỗi khi thiết lập môi trường: {str(e)}")
        return False


def find_scenarios(scenarios_dir: Path, only: Optional[List[str]] = None) -> List[Path]:
    paths = sorted(scenarios_dir.glob("*.json"))
    if only:
        paths = [p for p in paths if p.stem in only]
    return paths


def run_one(scenario_path: Path, output_root: Path, timeout: int, extra_args: List[str]) -> Dict:
    """
    Chạy một kịch bản trong tiến trình con.

    Returns:
        Dict: Tên kịch bản, mã thoát, thời gian chạy
    """
    output_dir = output_root / scenario_path.stem
    command = [sys.executable, "-m", "scripts.main", "run",
               "--scenario", str(scenario_path), "--out", str(output_dir), *extra_args]
    logger.info(f"Chạy lệnh: {' '.join(command)}")

    started = time.time()
    try:
        process = subprocess.run(command, cwd=BASE_DIR, check=False, timeout=timeout,
                                 stdout=subprocess.PIPE, stderr=subprocess.PIPE)
        returncode = process.returncode
        if returncode != 0:
            logger.error(f"Kịch bản {scenario_path.stem} kết thúc với mã {returncode}: "
                         f"{process.stderr.decode('utf-8', errors='replace').strip()}")
    except subprocess.TimeoutExpired:
        logger.error(f"Kịch bản {scenario_path.stem} quá thời gian {timeout} s")
        returncode = None

    duration = time.time() - started
    logger.info(f"Kịch bản {scenario_path.stem}: mã {returncode}, {duration:.1f} s")
    return {"scenario": scenario_path.stem, "returncode": returncode, "duration": duration,
            "output": str(output_dir)}


def run_batch(scenario_paths: List[Path], output_root: Path, parallel: int, timeout: int,
              extra_args: List[str]) -> List[Dict]:
    """
    Chạy các kịch bản, tối đa parallel tiến trình cùng lúc; mỗi kịch bản có thư mục riêng.
    """
    output_root.mkdir(parents=True, exist_ok=True)
    with ThreadPoolExecutor(max_workers=max(1, parallel)) as executor:
        results = list(executor.map(lambda p: run_one(p, output_root, timeout, extra_args), scenario_paths))

    summary_file = output_root / "batch_summary.json"
    with open(summary_file, 'w', encoding='utf-8') as f:
        json.dump(results, f, ensure_ascii=False, indent=2)
    logger.info(f"Đã lưu tóm tắt vào {summary_file}")
    return results


def parse_args() -> argparse.Namespace:
    """
    Phân tích tham số dòng lệnh.

    Returns:
        argparse.Namespace: Các tham số dòng lệnh
    """
    from config import settings

    parser = argparse.ArgumentParser(description="Chạy hàng loạt kịch bản mô phỏng ghép nối")
    parser.add_argument("--scenarios-dir", default=str(settings.SCENARIOS_DIR),
                        help="Thư mục chứa file kịch bản JSON")
    parser.add_argument("--only", nargs="*", help="Chỉ chạy các kịch bản có tên này")
    parser.add_argument("--out", default=str(settings.OUTPUT_DIR / "batch"), help="Thư mục kết quả gốc")
    parser.add_argument("--parallel", type=int, default=settings.MAX_PARALLEL_RUNS,
                        help="Số kịch bản chạy đồng thời")
    parser.add_argument("--timeout", type=int, default=settings.RUN_TIMEOUT,
                        help="Thời gian tối đa cho mỗi kịch bản (giây)")
    parser.add_argument("--check", action="store_true", help="Chỉ kiểm tra môi trường")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="Ghi đè áp cho mọi kịch bản")
    return parser.parse_args()


def main() -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.FileHandler(LOGS_DIR / "run_locally.log", encoding='utf-8') if LOGS_DIR.exists()
            else logging.StreamHandler(),
            logging.StreamHandler()
        ]
    )

    if not (check_python_version() and check_dependencies() and setup_environment()):
        return 1

    args = parse_args()
    if args.check:
        print("Môi trường đã sẵn sàng.")
        return 0

    scenario_paths = find_scenarios(Path(args.scenarios_dir), args.only)
    if not scenario_paths:
        logger.error(f"Không tìm thấy kịch bản nào trong {args.scenarios_dir}")
        return 1

    extra_args: List[str] = []
    for override in args.set:
        extra_args += ["--set", override]

    results = run_batch(scenario_paths, Path(args.out), args.parallel, args.timeout, extra_args)

    print("\nKẾT QUẢ CHẠY HÀNG LOẠT")
    print("================================================")
    for r in results:
        print(f"  {r['scenario']:<24} mã {str(r['returncode']):>4}   {r['duration']:8.1f} s")
    print("================================================")
    failed = [r for r in results if r["returncode"] != 0]
    print(f"{len(results) - len(failed)}/{len(results)} kịch bản thành công")
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())

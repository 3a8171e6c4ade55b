import os
import logging
import pathlib

import numpy as np
from dotenv import load_dotenv

# =============================================================================
# Cấu hình cơ bản
# =============================================================================

# Nạp biến môi trường (tùy chọn) từ file .env ở thư mục gốc
load_dotenv(dotenv_path=os.path.join(os.path.dirname(os.path.dirname(__file__)), '.env'))

# Đường dẫn cơ bản
BASE_DIR = pathlib.Path(__file__).parent.parent.absolute()
OUTPUT_DIR = pathlib.Path(os.getenv("SIM_OUTPUT_DIR", BASE_DIR / "output"))
LOGS_DIR = BASE_DIR / "logs"
SCENARIOS_DIR = BASE_DIR / "scenarios"

# Tạo các thư mục cần thiết
LOGS_DIR.mkdir(exist_ok=True)

# =============================================================================
# Cấu hình mô phỏng
# =============================================================================

# Gia tốc trọng trường mặc định (m/s^2), trục y hướng lên
DEFAULT_GRAVITY = np.array([0.0, -9.81, 0.0])

# Bước thời gian mặc định (giây), lưới nylon cần cỡ 1e-5 s
DEFAULT_SECONDARY_DT = 1e-5
DEFAULT_PRIMARY_DT = 1e-5

# Khoảng lấy mẫu đầu ra (giây), khớp với ảnh chụp 0.0833 s
OUTPUT_SAMPLE_INTERVAL = 0.0833

# Ngưỡng số học
DEGENERATE_EPSILON = 1e-12  # m, lò xo có hai đầu trùng nhau
ORIENTATION_TOLERANCE = 1e-9
WIND_CORE_RADIUS = 1e-6  # m
MIN_TRIANGLE_AREA = 1e-12  # m^2

# Phát hiện mất ổn định
VELOCITY_CEILING = 1e4  # m/s

# Giảm chấn vận tốc toàn cục (1/s)
GLOBAL_DAMPING = 0.1

# Độ sâu xuyên thấu coi là vi phạm ràng buộc va chạm (m)
CONTACT_VIOLATION_DEPTH = 0.05

# =============================================================================
# Vật liệu lò xo
# =============================================================================

# stiffness: N/m, damping: N*s/m, compression_ratio: tỉ lệ độ cứng khi bị nén
MATERIALS = {
    "nylon-net": {"stiffness": 2.0e4, "damping": 1.2, "compression_ratio": 1.0},
    "nylon-net-soft": {"stiffness": 1.5e3, "damping": 0.1, "compression_ratio": 1.0},
    "cloth": {"stiffness": 400.0, "damping": 0.5, "compression_ratio": 1.0},
    "bungee": {"stiffness": 4.0e3, "damping": 5.0, "compression_ratio": 0.01},
    "mat": {"stiffness": 3.0e3, "damping": 2.0, "compression_ratio": 1.0},
    "leaf": {"stiffness": 60.0, "damping": 0.05, "compression_ratio": 1.0},
}

# =============================================================================
# Phân tích tương tác
# =============================================================================

ACCEL_THRESHOLD = 1.0  # m/s^2
SUSTAINED_CONTACT_DURATION = 0.5  # s
SUSTAINED_CONTACT_FRACTION = 0.95

# Thứ tự cột giống bảng lực/gia tốc
STATS_TABLE_COLUMNS = [
    "primary", "primary_mass", "secondary", "secondary_mass",
    "force_min", "force_max", "force_mean",
    "accel_min", "accel_max", "accel_mean",
]

# =============================================================================
# File đầu ra
# =============================================================================

PRIMARY_TRACE_FILENAME = "primary_trace.csv"
SECONDARY_TRACE_FILENAME = "secondary_trace.csv"
INTERACTION_LOG_FILENAME = "interaction_log.csv"
DRIVE_TRACE_FILENAME = "drive_trace.csv"
STATS_REPORT_FILENAME = "stats.txt"
STATS_TABLE_FILENAME = "stats_table.csv"
STATUS_FILENAME = "status.json"
SCENARIO_RESOLVED_FILENAME = "scenario_resolved.json"
COMPARE_SUMMARY_FILENAME = "compare_summary.csv"

# Mã thoát ổn định của CLI
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE_ERROR = 3
EXIT_VALIDATION_ERROR = 4
EXIT_INSTABILITY = 5

# =============================================================================
# Cấu hình chung
# =============================================================================

# Logging
LOG_LEVEL = getattr(logging, os.getenv("SIM_LOG_LEVEL", "INFO").upper(), logging.INFO)
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_FILE = LOGS_DIR / "app.log"

# Số tiến trình tối đa khi chạy hàng loạt kịch bản
MAX_PARALLEL_RUNS = int(os.getenv("SIM_MAX_PARALLEL_RUNS", "2"))
RUN_TIMEOUT = 3600  # giây

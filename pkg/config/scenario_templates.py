# -*- coding: utf-8 -*-

"""
Cấu hình mặc định cho từng loại kịch bản.
File kịch bản chỉ cần ghi "kind" và các giá trị muốn ghi đè; phần còn lại lấy từ đây.
Các giá trị điều kiện ban đầu (vị trí, vận tốc, độ xoáy) và tham số mô hình thế chỗ
là giá trị tự chọn để tái hiện hành vi định tính, không phải số đo.
"""

from config import settings

_GRAVITY = [float(v) for v in settings.DEFAULT_GRAVITY]

_NO_CONTACT = {"k_constraint": 0.0, "c_damp": 0.0, "k_restore": 0.0, "mu": 0.0}

_ENVIRONMENT = {"gravity": _GRAVITY, "wind": None, "aero": None, "ground": None}


def _sphere(mass, radius, position, velocity, angular_velocity=(0.0, 0.0, 0.0), gravity=True):
    return {
        "shape": "sphere",
        "mass": mass,
        "radius": radius,
        "half_extents": None,
        "inertia": None,
        "position": list(position),
        "orientation": [1.0, 0.0, 0.0, 0.0],
        "velocity": list(velocity),
        "angular_velocity": list(angular_velocity),
        "gravity": gravity,
    }


# =============================================================================
# Bóng rổ rơi qua lưới
# =============================================================================

BASKETBALL = {
    "mode": "two_way",
    # Bóng vào lưới ở góc nông và xoáy theo chiều kim đồng hồ
    "primary": _sphere(0.68, 0.12, (-0.3, 0.5, 0.0), (1.2, -1.5, 0.0), (0.0, 0.0, -10.0)),
    "secondary": {
        "builder": "net",
        "material": "nylon-net",
        "global_damping": settings.GLOBAL_DAMPING,
        "params": {
            "rings": 12,
            "spokes": 16,
            "rim_radius": 0.23,
            "depth": 0.4,
            "taper": 0.7,
            "mass": 0.03,
            "rim_center": [0.0, 0.0, 0.0],
            "attachment_length": 0.02,
        },
    },
    "contact": {"k_constraint": 1.0, "c_damp": 1.0, "k_restore": 1.0e4, "mu": 0.5},
    "interaction": "contact",
    "tether": None,
    "stand_in": None,
    "environment": dict(_ENVIRONMENT),
    "time": {
        "dt_primary": settings.DEFAULT_PRIMARY_DT,
        "dt_secondary": settings.DEFAULT_SECONDARY_DT,
        "duration": 1.0,
        "sample_interval": settings.OUTPUT_SAMPLE_INTERVAL,
    },
}

# =============================================================================
# Cờ trong gió
# =============================================================================

FLAG = {
    "mode": "one_way",
    "primary": None,
    "secondary": {
        "builder": "grid",
        "material": "cloth",
        "global_damping": settings.GLOBAL_DAMPING,
        "params": {
            "rows": 8,
            "cols": 12,
            "width": 1.2,
            "height": 0.8,
            "pinned_edge": "left",
            "mass": 0.2,
            "origin": [0.0, 2.0, 0.0],
            "plane": "xy",
            "bend_scale": 0.1,
        },
    },
    "contact": dict(_NO_CONTACT),
    "interaction": "none",
    "tether": None,
    "stand_in": None,
    "environment": {
        "gravity": _GRAVITY,
        "wind": {"uniform": [4.0, 0.0, 3.0], "source": None},
        "aero": {"c_normal": 1.0, "quadratic": False},
        "ground": None,
    },
    "time": {"dt_primary": 2e-4, "dt_secondary": 2e-4, "duration": 5.0, "sample_interval": 0.1},
}

# =============================================================================
# Nhảy bungee (người nhảy gộp thành một vật rắn)
# =============================================================================

BUNGEE = {
    "mode": "two_way",
    "primary": _sphere(70.0, 0.3, (0.0, -1.0, 0.0), (1.0, 2.5, 0.0)),
    "secondary": {
        "builder": "cord",
        "material": "bungee",
        "global_damping": settings.GLOBAL_DAMPING,
        "params": {
            "segments": 20,
            "length": 10.0,
            "mass": 2.0,
            "anchor": [0.0, 0.0, 0.0],
            "direction": [0.0, -1.0, 0.0],
            "initial_extent": 1.0,
        },
    },
    "contact": dict(_NO_CONTACT),
    "interaction": "tether",
    "tether": {"stiffness": 4000.0, "damping": 20.0, "body_point": [0.0, 0.0, 0.0], "rest_length": 0.0},
    "stand_in": None,
    "environment": dict(_ENVIRONMENT),
    "time": {"dt_primary": 1e-3, "dt_secondary": 1e-3, "duration": 6.0, "sample_interval": 0.1},
}

# =============================================================================
# Tiếp đất trên thảm: lưới lò xo đứng thế chỗ, sau đó quỹ đạo điều khiển thảm
# =============================================================================

MAT = {
    "mode": "hybrid",
    "primary": {
        "shape": "box",
        "mass": 20.0,
        "radius": None,
        "half_extents": [0.2, 0.1, 0.2],
        "inertia": None,
        "position": [0.5, 0.7, 0.5],
        "orientation": [1.0, 0.0, 0.0, 0.0],
        "velocity": [0.0, 0.0, 0.0],
        "angular_velocity": [0.0, 0.0, 0.0],
        "gravity": True,
    },
    "secondary": {
        "builder": "mat",
        "material": "mat",
        "global_damping": settings.GLOBAL_DAMPING,
        "params": {
            "rows": 10,
            "cols": 10,
            "width": 1.0,
            "depth": 1.0,
            "thickness": 0.1,
            "mass": 4.0,
            "origin": [0.0, 0.0, 0.0],
        },
    },
    "contact": {"k_constraint": 5.0, "c_damp": 20.0, "k_restore": 5.0e4, "mu": 0.5},
    "interaction": "contact",
    "tether": None,
    "stand_in": {
        "type": "spring_grid",
        "plane_height": 0.1,
        "k_vertical": 2.0e4,
        "c_vertical": 200.0,
        "contact_points": "auto",
    },
    "environment": dict(_ENVIRONMENT),
    "time": {"dt_primary": 2e-4, "dt_secondary": 2e-4, "duration": 1.5, "sample_interval": 0.1},
}

# =============================================================================
# Rơi xuống nước: chỉ có trường cản nhớt, không có hệ phụ
# =============================================================================

WATER_ENTRY = {
    "mode": "hybrid",
    "primary": _sphere(70.0, 0.3, (0.0, 10.0, 0.0), (0.5, 0.0, 0.0)),
    "secondary": None,
    "contact": dict(_NO_CONTACT),
    "interaction": "none",
    "tether": None,
    "stand_in": {"type": "viscous_drag", "surface_height": 0.0, "c_drag": 60.0, "contact_points": "auto"},
    "environment": dict(_ENVIRONMENT),
    "time": {"dt_primary": 1e-3, "dt_secondary": 1e-3, "duration": 4.0, "sample_interval": 0.1},
}

# =============================================================================
# Lá bị cuốn bởi người đạp xe chạy qua
# =============================================================================

_LEAF_CONTACT = {"k_constraint": 0.05, "c_damp": 0.05, "k_restore": 50.0, "mu": 0.5}

LEAVES = {
    "mode": "one_way",
    "primary": _sphere(80.0, 0.5, (-2.0, 1.0, 0.0), (5.0, 0.0, 0.0), gravity=False),
    "secondary": {
        "builder": "leaves",
        "material": "leaf",
        "global_damping": settings.GLOBAL_DAMPING,
        "params": {
            "count": 6,
            "size": 0.1,
            "spacing": 0.4,
            "mass_per_leaf": 0.002,
            "origin": [0.0, 0.005, -0.05],
        },
    },
    "contact": dict(_LEAF_CONTACT),
    "interaction": "contact",
    "tether": None,
    "stand_in": None,
    "environment": {
        "gravity": _GRAVITY,
        "wind": {
            "uniform": [0.0, 0.0, 0.0],
            # Nguồn hút đi theo người đạp xe, thấp hơn tâm 0.5 m
            "source": {
                "strength": -4.0,
                "falloff": 1.0,
                "start": [0.0, 0.0, 0.0],
                "velocity": [0.0, 0.0, 0.0],
                "offset": [0.0, -0.5, 0.0],
                "follow_primary": True,
            },
        },
        "aero": {"c_normal": 0.5, "quadratic": False},
        "ground": {"point": [0.0, 0.0, 0.0], "normal": [0.0, 1.0, 0.0], "contact": dict(_LEAF_CONTACT)},
    },
    "time": {"dt_primary": 2e-4, "dt_secondary": 2e-4, "duration": 2.0, "sample_interval": 0.1},
}

TEMPLATES = {
    "basketball": BASKETBALL,
    "flag": FLAG,
    "bungee": BUNGEE,
    "mat": MAT,
    "water_entry": WATER_ENTRY,
    "leaves": LEAVES,
}

# Giá trị mặc định của từng loại mô hình thế chỗ
STAND_IN_DEFAULTS = {
    "damping_field": {"c_linear": 0.0, "c_angular": 0.0, "region": "auto"},
    "spring_grid": {"plane_height": 0.0, "k_vertical": 0.0, "c_vertical": 0.0, "contact_points": "auto"},
    "viscous_drag": {"surface_height": 0.0, "c_drag": 0.0, "contact_points": "auto"},
}

# Mặc định cấp cao nhất chung cho mọi loại
COMMON_DEFAULTS = {
    "name": "",
    "velocity_ceiling": settings.VELOCITY_CEILING,
    "seed": None,
}

#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Đọc, kiểm tra và ghi lại cấu hình kịch bản dạng JSON.

Một file kịch bản ghi "kind" (basketball, flag, bungee, mat, water_entry, leaves)
và các giá trị muốn ghi đè; phần còn lại lấy từ config/scenario_templates.py.
Khóa lạ bị từ chối; lỗi cú pháp kèm dòng/cột, lỗi kiểm tra kèm đường dẫn trường.
"""

import sys
import os
import copy
import json
import inspect
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import settings
from config.scenario_templates import COMMON_DEFAULTS, STAND_IN_DEFAULTS, TEMPLATES
from scripts.interaction import ContactForceModel
from scripts.mass_spring import BUILDERS
from scripts.metrics import CouplingMode

# Thiết lập logging
logger = logging.getLogger(__name__)

INTERACTIONS = ("contact", "tether", "none")
SHAPES = ("sphere", "box")


class ScenarioParseError(ValueError):
    """
    Cấu hình không đọc được; line/column bắt đầu từ 1 nếu biết.
    """

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        location = ""
        if line is not None:
            location = f" (dòng {line}, cột {column})" if column is not None else f" (dòng {line})"
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


class ScenarioValidationError(ValueError):
    """
    Cấu hình sai ý nghĩa; field là đường dẫn trường dạng "primary.mass".
    """

    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field = field_path


# =============================================================================
# Kiểu dữ liệu kịch bản
# =============================================================================

@dataclass(frozen=True)
class PrimarySpec:
    shape: str
    mass: float
    radius: Optional[float]
    half_extents: Optional[Tuple[float, float, float]]
    inertia: Optional[Union[float, Tuple[float, float, float]]]
    position: Tuple[float, float, float]
    orientation: Tuple[float, float, float, float]
    velocity: Tuple[float, float, float]
    angular_velocity: Tuple[float, float, float]
    gravity: bool = True


@dataclass(frozen=True)
class SecondarySpec:
    builder: str
    material: Union[str, Dict[str, float]]
    global_damping: float
    params: Dict[str, Any]


@dataclass(frozen=True)
class TetherSpec:
    stiffness: float
    damping: float
    body_point: Tuple[float, float, float]
    rest_length: float


@dataclass(frozen=True)
class StandInSpec:
    type: str
    values: Dict[str, Any]


@dataclass(frozen=True)
class WindSourceSpec:
    strength: float
    falloff: float
    start: Tuple[float, float, float]
    velocity: Tuple[float, float, float]
    offset: Tuple[float, float, float]
    follow_primary: bool


@dataclass(frozen=True)
class WindSpec:
    uniform: Tuple[float, float, float]
    source: Optional[WindSourceSpec]


@dataclass(frozen=True)
class AeroSpec:
    c_normal: float
    quadratic: bool


@dataclass(frozen=True)
class GroundSpec:
    point: Tuple[float, float, float]
    normal: Tuple[float, float, float]
    contact: ContactForceModel


@dataclass(frozen=True)
class EnvironmentSpec:
    gravity: Tuple[float, float, float]
    wind: Optional[WindSpec] = None
    aero: Optional[AeroSpec] = None
    ground: Optional[GroundSpec] = None


@dataclass(frozen=True)
class TimeSpec:
    dt_primary: float
    dt_secondary: float
    duration: float
    sample_interval: float


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    mode: CouplingMode
    primary: Optional[PrimarySpec]
    secondary: Optional[SecondarySpec]
    contact: ContactForceModel
    interaction: str
    tether: Optional[TetherSpec]
    stand_in: Optional[StandInSpec]
    environment: EnvironmentSpec
    time: TimeSpec
    velocity_ceiling: float = settings.VELOCITY_CEILING
    seed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        """
        Dạng dict đầy đủ (mọi giá trị mặc định đã điền), đọc lại cho đúng kịch bản này.
        """
        return {
            "name": self.name,
            "kind": self.kind,
            "mode": self.mode.value,
            "primary": _primary_to_dict(self.primary),
            "secondary": None if self.secondary is None else {
                "builder": self.secondary.builder,
                "material": copy.deepcopy(self.secondary.material),
                "global_damping": self.secondary.global_damping,
                "params": copy.deepcopy(self.secondary.params),
            },
            "contact": _contact_to_dict(self.contact),
            "interaction": self.interaction,
            "tether": None if self.tether is None else {
                "stiffness": self.tether.stiffness,
                "damping": self.tether.damping,
                "body_point": list(self.tether.body_point),
                "rest_length": self.tether.rest_length,
            },
            "stand_in": None if self.stand_in is None else {"type": self.stand_in.type,
                                                            **copy.deepcopy(self.stand_in.values)},
            "environment": _environment_to_dict(self.environment),
            "time": {
                "dt_primary": self.time.dt_primary,
                "dt_secondary": self.time.dt_secondary,
                "duration": self.time.duration,
                "sample_interval": self.time.sample_interval,
            },
            "velocity_ceiling": self.velocity_ceiling,
            "seed": self.seed,
        }


def _primary_to_dict(p: Optional[PrimarySpec]) -> Optional[Dict[str, Any]]:
    if p is None:
        return None
    return {
        "shape": p.shape,
        "mass": p.mass,
        "radius": p.radius,
        "half_extents": None if p.half_extents is None else list(p.half_extents),
        "inertia": list(p.inertia) if isinstance(p.inertia, tuple) else p.inertia,
        "position": list(p.position),
        "orientation": list(p.orientation),
        "velocity": list(p.velocity),
        "angular_velocity": list(p.angular_velocity),
        "gravity": p.gravity,
    }


def _contact_to_dict(model: ContactForceModel) -> Dict[str, float]:
    return {"k_constraint": model.k_constraint, "c_damp": model.c_damp,
            "k_restore": model.k_restore, "mu": model.mu}


def _environment_to_dict(env: EnvironmentSpec) -> Dict[str, Any]:
    wind = None
    if env.wind is not None:
        source = None
        if env.wind.source is not None:
            s = env.wind.source
            source = {"strength": s.strength, "falloff": s.falloff, "start": list(s.start),
                      "velocity": list(s.velocity), "offset": list(s.offset), "follow_primary": s.follow_primary}
        wind = {"uniform": list(env.wind.uniform), "source": source}
    return {
        "gravity": list(env.gravity),
        "wind": wind,
        "aero": None if env.aero is None else {"c_normal": env.aero.c_normal, "quadratic": env.aero.quadratic},
        "ground": None if env.ground is None else {
            "point": list(env.ground.point),
            "normal": list(env.ground.normal),
            "contact": _contact_to_dict(env.ground.contact),
        },
    }


# =============================================================================
# Trộn cấu hình và ghi đè
# =============================================================================

def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """
    Trộn đệ quy: dict gặp dict thì trộn tiếp, còn lại giá trị của override thắng.
    """
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def parse_override(text: str) -> Tuple[str, Any]:
    """
    Tách "a.b.c=value"; value được đọc như JSON nếu được, ngược lại giữ là chuỗi.

    Raises:
        ScenarioParseError: Nếu thiếu dấu "=" hoặc khóa rỗng
    """
    if "=" not in text:
        raise ScenarioParseError(f"Ghi đè phải có dạng khóa=giá_trị: '{text}'")
    key, raw = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ScenarioParseError(f"Khóa ghi đè rỗng: '{text}'")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def apply_override(raw: Dict[str, Any], dotted_key: str, value: Any) -> None:
    node = raw
    parts = dotted_key.split(".")
    for part in parts[:-1]:
        child = node.get(part)
        if child is None:
            child = {}
            node[part] = child
        if not isinstance(child, dict):
            raise ScenarioValidationError(dotted_key, f"'{part}' không phải một mục cấu hình")
        node = child
    node[parts[-1]] = value


# =============================================================================
# Kiểm tra
# =============================================================================

def _check_keys(section: Dict[str, Any], allowed: Iterable[str], path: str) -> None:
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        prefix = f"{path}." if path else ""
        raise ScenarioValidationError(f"{prefix}{unknown[0]}", "khóa không được hỗ trợ")


def _section(raw: Dict[str, Any], key: str, path: str, allowed: Iterable[str]) -> Dict[str, Any]:
    value = raw.get(key)
    if not isinstance(value, dict):
        raise ScenarioValidationError(path, "cần một đối tượng")
    _check_keys(value, allowed, path)
    return value


def _number(value: Any, path: str, minimum: Optional[float] = None, strict: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioValidationError(path, f"cần một số, nhận được {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ScenarioValidationError(path, "phải hữu hạn")
    if minimum is not None:
        if strict and not value > minimum:
            raise ScenarioValidationError(path, f"phải lớn hơn {minimum}")
        if not strict and value < minimum:
            raise ScenarioValidationError(path, f"không được nhỏ hơn {minimum}")
    return value


def _vector(value: Any, path: str, size: int = 3) -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != size:
        raise ScenarioValidationError(path, f"cần danh sách {size} số")
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))


def _boolean(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ScenarioValidationError(path, "cần true hoặc false")
    return value


def _contact(raw: Any, path: str) -> ContactForceModel:
    if not isinstance(raw, dict):
        raise ScenarioValidationError(path, "cần một đối tượng")
    keys = ("k_constraint", "c_damp", "k_restore", "mu")
    _check_keys(raw, keys, path)
    return ContactForceModel(**{k: _number(raw.get(k, 0.0), f"{path}.{k}", 0.0) for k in keys})


def _validate_primary(raw: Any) -> Optional[PrimarySpec]:
    if raw is None:
        return None
    path = "primary"
    if not isinstance(raw, dict):
        raise ScenarioValidationError(path, "cần một đối tượng hoặc null")
    _check_keys(raw, PrimarySpec.__dataclass_fields__, path)

    shape = raw.get("shape")
    if shape not in SHAPES:
        raise ScenarioValidationError(f"{path}.shape", f"phải thuộc {SHAPES}")
    radius = None
    half_extents = None
    if shape == "sphere":
        radius = _number(raw.get("radius"), f"{path}.radius", 0.0, strict=True)
    else:
        half_extents = _vector(raw.get("half_extents"), f"{path}.half_extents")
        if any(h <= 0.0 for h in half_extents):
            raise ScenarioValidationError(f"{path}.half_extents", "phải dương")

    inertia = raw.get("inertia")
    if inertia is not None:
        if isinstance(inertia, (list, tuple)):
            inertia = _vector(inertia, f"{path}.inertia")
            if any(i <= 0.0 for i in inertia):
                raise ScenarioValidationError(f"{path}.inertia", "phải dương")
            if shape == "sphere" and len(set(inertia)) != 1:
                raise ScenarioValidationError(f"{path}.inertia", "quán tính cầu phải đẳng hướng")
        else:
            inertia = _number(inertia, f"{path}.inertia", 0.0, strict=True)

    orientation = _vector(raw.get("orientation", [1.0, 0.0, 0.0, 0.0]), f"{path}.orientation", 4)
    if float(np.linalg.norm(orientation)) == 0.0:
        raise ScenarioValidationError(f"{path}.orientation", "quaternion có độ dài 0")

    return PrimarySpec(
        shape=shape,
        mass=_number(raw.get("mass"), f"{path}.mass", 0.0, strict=True),
        radius=radius,
        half_extents=half_extents,
        inertia=inertia,
        position=_vector(raw.get("position", [0.0, 0.0, 0.0]), f"{path}.position"),
        orientation=orientation,
        velocity=_vector(raw.get("velocity", [0.0, 0.0, 0.0]), f"{path}.velocity"),
        angular_velocity=_vector(raw.get("angular_velocity", [0.0, 0.0, 0.0]), f"{path}.angular_velocity"),
        gravity=_boolean(raw.get("gravity", True), f"{path}.gravity"),
    )


def _validate_secondary(raw: Any) -> Optional[SecondarySpec]:
    if raw is None:
        return None
    path = "secondary"
    if not isinstance(raw, dict):
        raise ScenarioValidationError(path, "cần một đối tượng hoặc null")
    _check_keys(raw, ("builder", "material", "global_damping", "params"), path)

    builder = raw.get("builder")
    if builder not in BUILDERS:
        raise ScenarioValidationError(f"{path}.builder", f"phải thuộc {tuple(BUILDERS)}")

    material = raw.get("material")
    if isinstance(material, str):
        if material not in settings.MATERIALS:
            raise ScenarioValidationError(f"{path}.material", f"không có vật liệu '{material}'")
    elif isinstance(material, dict):
        _check_keys(material, ("stiffness", "damping", "compression_ratio"), f"{path}.material")
        material = {
            "stiffness": _number(material.get("stiffness"), f"{path}.material.stiffness", 0.0),
            "damping": _number(material.get("damping", 0.0), f"{path}.material.damping", 0.0),
            "compression_ratio": _number(material.get("compression_ratio", 1.0),
                                         f"{path}.material.compression_ratio", 0.0),
        }
    else:
        raise ScenarioValidationError(f"{path}.material", "cần tên vật liệu hoặc đối tượng")

    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ScenarioValidationError(f"{path}.params", "cần một đối tượng")
    signature = inspect.signature(BUILDERS[builder])
    accepted = [name for name in signature.parameters if name not in ("material", "global_damping")]
    _check_keys(params, accepted, f"{path}.params")
    for name in accepted:
        if signature.parameters[name].default is inspect.Parameter.empty and name not in params:
            raise ScenarioValidationError(f"{path}.params.{name}", "thiếu tham số bắt buộc")

    return SecondarySpec(
        builder=builder,
        material=material,
        global_damping=_number(raw.get("global_damping", settings.GLOBAL_DAMPING), f"{path}.global_damping", 0.0),
        params=copy.deepcopy(params),
    )


def _validate_stand_in(raw: Any) -> Optional[StandInSpec]:
    if raw is None:
        return None
    path = "stand_in"
    if not isinstance(raw, dict):
        raise ScenarioValidationError(path, "cần một đối tượng hoặc null")
    kind = raw.get("type")
    if kind not in STAND_IN_DEFAULTS:
        raise ScenarioValidationError(f"{path}.type", f"phải thuộc {tuple(STAND_IN_DEFAULTS)}")
    values = deep_merge(STAND_IN_DEFAULTS[kind], {k: v for k, v in raw.items() if k != "type"})
    _check_keys(values, STAND_IN_DEFAULTS[kind], path)

    for key, value in values.items():
        key_path = f"{path}.{key}"
        if key == "region":
            values[key] = _validate_region(value, key_path)
        elif key == "contact_points":
            if value != "auto":
                if not isinstance(value, list) or not value:
                    raise ScenarioValidationError(key_path, "cần \"auto\" hoặc danh sách điểm")
                values[key] = [list(_vector(p, f"{key_path}[{i}]")) for i, p in enumerate(value)]
        elif key.endswith("height"):
            values[key] = _number(value, key_path)
        else:
            values[key] = _number(value, key_path, 0.0)
    return StandInSpec(kind, values)


def _validate_region(value: Any, path: str) -> Any:
    if value == "auto":
        return value
    if not isinstance(value, dict):
        raise ScenarioValidationError(path, "cần \"auto\" hoặc đối tượng vùng")
    kind = value.get("type")
    if kind == "box":
        _check_keys(value, ("type", "min", "max"), path)
        lo = _vector(value.get("min"), f"{path}.min")
        hi = _vector(value.get("max"), f"{path}.max")
        if any(h <= l for l, h in zip(lo, hi)):
            raise ScenarioValidationError(path, "vùng hộp suy biến")
        return {"type": "box", "min": list(lo), "max": list(hi)}
    if kind == "cylinder":
        keys = ("center_x", "center_z", "radius", "y_min", "y_max")
        _check_keys(value, ("type",) + keys, path)
        region = {"type": "cylinder"}
        for k in keys:
            region[k] = _number(value.get(k), f"{path}.{k}")
        if region["radius"] <= 0.0 or region["y_max"] <= region["y_min"]:
            raise ScenarioValidationError(path, "vùng trụ suy biến")
        return region
    raise ScenarioValidationError(f"{path}.type", "phải là box hoặc cylinder")


def _validate_environment(raw: Any) -> EnvironmentSpec:
    path = "environment"
    if not isinstance(raw, dict):
        raise ScenarioValidationError(path, "cần một đối tượng")
    _check_keys(raw, ("gravity", "wind", "aero", "ground"), path)

    wind = None
    if raw.get("wind") is not None:
        w = raw["wind"]
        if not isinstance(w, dict):
            raise ScenarioValidationError(f"{path}.wind", "cần một đối tượng hoặc null")
        _check_keys(w, ("uniform", "source"), f"{path}.wind")
        source = None
        if w.get("source") is not None:
            s = w["source"]
            sp = f"{path}.wind.source"
            if not isinstance(s, dict):
                raise ScenarioValidationError(sp, "cần một đối tượng hoặc null")
            _check_keys(s, WindSourceSpec.__dataclass_fields__, sp)
            source = WindSourceSpec(
                strength=_number(s.get("strength"), f"{sp}.strength"),
                falloff=_number(s.get("falloff"), f"{sp}.falloff", 0.0, strict=True),
                start=_vector(s.get("start", [0.0, 0.0, 0.0]), f"{sp}.start"),
                velocity=_vector(s.get("velocity", [0.0, 0.0, 0.0]), f"{sp}.velocity"),
                offset=_vector(s.get("offset", [0.0, 0.0, 0.0]), f"{sp}.offset"),
                follow_primary=_boolean(s.get("follow_primary", False), f"{sp}.follow_primary"),
            )
        wind = WindSpec(_vector(w.get("uniform", [0.0, 0.0, 0.0]), f"{path}.wind.uniform"), source)

    aero = None
    if raw.get("aero") is not None:
        a = raw["aero"]
        if not isinstance(a, dict):
            raise ScenarioValidationError(f"{path}.aero", "cần một đối tượng hoặc null")
        _check_keys(a, ("c_normal", "quadratic"), f"{path}.aero")
        aero = AeroSpec(_number(a.get("c_normal"), f"{path}.aero.c_normal", 0.0),
                        _boolean(a.get("quadratic", False), f"{path}.aero.quadratic"))

    ground = None
    if raw.get("ground") is not None:
        g = raw["ground"]
        if not isinstance(g, dict):
            raise ScenarioValidationError(f"{path}.ground", "cần một đối tượng hoặc null")
        _check_keys(g, ("point", "normal", "contact"), f"{path}.ground")
        normal = _vector(g.get("normal", [0.0, 1.0, 0.0]), f"{path}.ground.normal")
        if abs(float(np.linalg.norm(normal)) - 1.0) > 1e-9:
            raise ScenarioValidationError(f"{path}.ground.normal", "phải là vector đơn vị")
        ground = GroundSpec(_vector(g.get("point", [0.0, 0.0, 0.0]), f"{path}.ground.point"), normal,
                            _contact(g.get("contact", {}), f"{path}.ground.contact"))

    return EnvironmentSpec(
        gravity=_vector(raw.get("gravity", list(settings.DEFAULT_GRAVITY)), f"{path}.gravity"),
        wind=wind,
        aero=aero,
        ground=ground,
    )


def _validate_time(raw: Any) -> TimeSpec:
    path = "time"
    if not isinstance(raw, dict):
        raise ScenarioValidationError(path, "cần một đối tượng")
    _check_keys(raw, TimeSpec.__dataclass_fields__, path)
    spec = TimeSpec(
        dt_primary=_number(raw.get("dt_primary"), f"{path}.dt_primary", 0.0, strict=True),
        dt_secondary=_number(raw.get("dt_secondary"), f"{path}.dt_secondary", 0.0, strict=True),
        duration=_number(raw.get("duration"), f"{path}.duration", 0.0, strict=True),
        sample_interval=_number(raw.get("sample_interval", settings.OUTPUT_SAMPLE_INTERVAL),
                                f"{path}.sample_interval", 0.0, strict=True),
    )
    for name in ("dt_primary", "dt_secondary"):
        dt = getattr(spec, name)
        steps = round(spec.duration / dt)
        if abs(steps * dt - spec.duration) > 1e-9 * max(1.0, spec.duration):
            raise ScenarioValidationError(f"{path}.duration", f"phải là bội số của {name}={dt}")
    return spec


def validate_scenario(raw: Dict[str, Any]) -> Scenario:
    """
    Kiểm tra dict cấu hình đã trộn mặc định và dựng Scenario.

    Raises:
        ScenarioValidationError: Kèm đường dẫn trường sai
    """
    _check_keys(raw, Scenario.__dataclass_fields__, "")

    mode_value = raw.get("mode")
    try:
        mode = CouplingMode(mode_value)
    except ValueError:
        raise ScenarioValidationError("mode", f"phải thuộc {[m.value for m in CouplingMode]}")

    name = raw.get("name", "")
    if not isinstance(name, str):
        raise ScenarioValidationError("name", "cần một chuỗi")

    primary = _validate_primary(raw.get("primary"))
    secondary = _validate_secondary(raw.get("secondary"))
    contact = _contact(raw.get("contact", {}), "contact")

    interaction = raw.get("interaction", "none")
    if interaction not in INTERACTIONS:
        raise ScenarioValidationError("interaction", f"phải thuộc {INTERACTIONS}")

    tether = None
    if raw.get("tether") is not None:
        t = raw["tether"]
        if not isinstance(t, dict):
            raise ScenarioValidationError("tether", "cần một đối tượng hoặc null")
        _check_keys(t, TetherSpec.__dataclass_fields__, "tether")
        tether = TetherSpec(
            stiffness=_number(t.get("stiffness"), "tether.stiffness", 0.0),
            damping=_number(t.get("damping", 0.0), "tether.damping", 0.0),
            body_point=_vector(t.get("body_point", [0.0, 0.0, 0.0]), "tether.body_point"),
            rest_length=_number(t.get("rest_length", 0.0), "tether.rest_length", 0.0),
        )

    stand_in = _validate_stand_in(raw.get("stand_in"))
    environment = _validate_environment(raw.get("environment"))
    time_spec = _validate_time(raw.get("time"))

    # Ràng buộc giữa các mục
    if interaction != "none" and (primary is None or secondary is None):
        raise ScenarioValidationError("interaction", "tương tác cần cả hệ chính và hệ phụ")
    if interaction == "tether" and tether is None:
        raise ScenarioValidationError("tether", "interaction=tether cần mục tether")
    if mode == CouplingMode.TWO_WAY and interaction == "none":
        raise ScenarioValidationError("interaction", "ghép hai chiều cần mô hình tương tác")
    if mode == CouplingMode.HYBRID:
        if stand_in is None:
            raise ScenarioValidationError("stand_in", "ghép lai cần mục stand_in")
        if primary is None:
            raise ScenarioValidationError("primary", "ghép lai cần hệ chính")
    if primary is None and secondary is None:
        raise ScenarioValidationError("primary", "kịch bản cần ít nhất một hệ")

    seed = raw.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ScenarioValidationError("seed", "cần số nguyên hoặc null")

    return Scenario(
        name=name or str(raw.get("kind")),
        kind=str(raw.get("kind")),
        mode=mode,
        primary=primary,
        secondary=secondary,
        contact=contact,
        interaction=interaction,
        tether=tether,
        stand_in=stand_in,
        environment=environment,
        time=time_spec,
        velocity_ceiling=_number(raw.get("velocity_ceiling", settings.VELOCITY_CEILING),
                                 "velocity_ceiling", 0.0, strict=True),
        seed=seed,
    )


# =============================================================================
# Đọc / ghi
# =============================================================================

def resolve_config(config_text: str, overrides: Optional[List[Tuple[str, Any]]] = None) -> Dict[str, Any]:
    """
    Đọc JSON, trộn với mẫu theo "kind" rồi áp các ghi đè.

    Raises:
        ScenarioParseError: Nếu văn bản không phải JSON hợp lệ
        ScenarioValidationError: Nếu thiếu hoặc sai "kind"
    """
    try:
        raw = json.loads(config_text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(f"JSON không hợp lệ: {e.msg}", e.lineno, e.colno)
    if not isinstance(raw, dict):
        raise ScenarioValidationError("(gốc)", "cấu hình phải là một đối tượng JSON")

    kind = raw.get("kind")
    if kind not in TEMPLATES:
        raise ScenarioValidationError("kind", f"phải thuộc {tuple(TEMPLATES)}")

    resolved = deep_merge(deep_merge(COMMON_DEFAULTS, TEMPLATES[kind]), raw)
    for key, value in overrides or []:
        apply_override(resolved, key, value)
    return resolved


def load_scenario(config_text: str, overrides: Optional[List[Tuple[str, Any]]] = None) -> Scenario:
    """
    Dựng Scenario từ văn bản cấu hình JSON, điền mặc định và từ chối khóa lạ.

    Args:
        config_text: Nội dung JSON
        overrides: Danh sách (khóa dạng a.b.c, giá trị) áp sau khi trộn mặc định

    Returns:
        Scenario: Kịch bản đã giải quyết đầy đủ

    Raises:
        ScenarioParseError: Lỗi cú pháp, kèm dòng và cột
        ScenarioValidationError: Lỗi ý nghĩa, kèm đường dẫn trường
    """
    scenario = validate_scenario(resolve_config(config_text, overrides))
    logger.debug(f"Đã nạp kịch bản '{scenario.name}' ({scenario.kind}, {scenario.mode.value})")
    return scenario


def load_scenario_file(path: Union[str, Path], overrides: Optional[List[Tuple[str, Any]]] = None) -> Scenario:
    """
    Raises:
        ScenarioParseError: Nếu không đọc được file hoặc JSON sai
        ScenarioValidationError: Nếu cấu hình sai ý nghĩa
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        logger.error(f"Không đọc được file kịch bản {path}: {str(e)}")
        raise ScenarioParseError(f"Không đọc được file kịch bản {path}: {e.strerror}")
    return load_scenario(text, overrides)


def serialize_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario.to_dict(), indent=2, ensure_ascii=False)

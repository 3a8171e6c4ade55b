#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Chạy kịch bản: dựng hệ chính, hệ phụ, tương tác và môi trường từ Scenario,
gọi đường ống ghép nối tương ứng rồi ghi bộ kết quả (quỹ đạo, nhật ký, thống kê, trạng thái).
"""

import sys
import os
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import settings
from scripts.aero import AeroModel, WindField, WindSource
from scripts.coupling import (RUNNERS, BoxRegion, CoupledSetup, CouplingResult, CylinderRegion,
                              DampingFieldStandIn, GroundPlane, MotionTrace, SpringGridStandIn, StandIn,
                              ViscousDragStandIn, box_bottom_corners, cylinder_around, save_motion_trace,
                              sphere_sample_points)
from scripts.interaction import ContactInteraction, TetherInteraction
from scripts.mass_spring import BUILDERS, MassSpringSystem
from scripts.metrics import CouplingMode, InteractionStats, summarize_interaction
from scripts.rigid_body import GravityModel, RigidBody, make_box, make_sphere
from scripts.scenario_loader import (PrimarySpec, Scenario, ScenarioValidationError, SecondarySpec,
                                     serialize_scenario)
from utils.trace_io import (INTERACTION_LOG_HEADER, TRACE_HEADER, secondary_trace_header, write_table)

# Thiết lập logging
logger = logging.getLogger(__name__)

MESH_PARTICLES_FILENAME = "mesh_particles.csv"
MESH_SPRINGS_FILENAME = "mesh_springs.csv"
MESH_TRIANGLES_FILENAME = "mesh_triangles.csv"
TRAJECTORIES_FILENAME = "trajectories.csv"


# =============================================================================
# Dựng các thành phần từ kịch bản
# =============================================================================

def build_primary(spec: PrimarySpec) -> RigidBody:
    state = {
        "position": np.array(spec.position, dtype=float),
        "orientation": np.array(spec.orientation, dtype=float) / float(np.linalg.norm(spec.orientation)),
        "linear_velocity": np.array(spec.velocity, dtype=float),
        "angular_velocity": np.array(spec.angular_velocity, dtype=float),
    }
    if spec.shape == "sphere":
        inertia = spec.inertia[0] if isinstance(spec.inertia, tuple) else spec.inertia
        return make_sphere(spec.mass, spec.radius, inertia, **state)
    return make_box(spec.mass, spec.half_extents, spec.inertia, **state)


def build_secondary(spec: SecondarySpec) -> MassSpringSystem:
    params = {k: tuple(v) if isinstance(v, list) else v for k, v in spec.params.items()}
    try:
        return BUILDERS[spec.builder](material=spec.material, global_damping=spec.global_damping, **params)
    except ValueError as e:
        raise ScenarioValidationError("secondary.params", str(e))


def _auto_contact_points(primary: PrimarySpec) -> tuple:
    if primary.shape == "box":
        return box_bottom_corners(primary.half_extents)
    return sphere_sample_points(primary.radius)


def build_stand_in(scenario: Scenario, system: Optional[MassSpringSystem]) -> Optional[StandIn]:
    """
    Dựng mô hình thế chỗ; "auto" lấy vùng trụ bao hệ phụ hoặc điểm mẫu theo hình dạng vật.

    Raises:
        ScenarioValidationError: Nếu giá trị "auto" không giải quyết được hoặc tham số sai
    """
    spec = scenario.stand_in
    if spec is None:
        return None
    values = spec.values
    try:
        if spec.type == "damping_field":
            region = values["region"]
            if region == "auto":
                if system is None:
                    raise ScenarioValidationError("stand_in.region", "\"auto\" cần hệ phụ để bao quanh")
                region = cylinder_around(system)
            elif region["type"] == "box":
                region = BoxRegion(tuple(region["min"]), tuple(region["max"]))
            else:
                region = CylinderRegion(region["center_x"], region["center_z"], region["radius"],
                                        region["y_min"], region["y_max"])
            return DampingFieldStandIn(region, values["c_linear"], values["c_angular"])

        points = values["contact_points"]
        if points == "auto":
            points = _auto_contact_points(scenario.primary)
        else:
            points = tuple(tuple(p) for p in points)
        if spec.type == "spring_grid":
            return SpringGridStandIn(values["plane_height"], values["k_vertical"], values["c_vertical"], points)
        return ViscousDragStandIn(values["surface_height"], values["c_drag"], points)
    except ScenarioValidationError:
        raise
    except ValueError as e:
        raise ScenarioValidationError("stand_in", str(e))


def _build_wind(scenario: Scenario) -> Optional[WindField]:
    wind = scenario.environment.wind
    if wind is None:
        return None
    source = None
    if wind.source is not None:
        s = wind.source
        source = WindSource(s.strength, s.falloff, s.start, s.velocity, s.offset)
    return WindField(wind.uniform, source)


def build_setup(scenario: Scenario, drive_trace: Optional[MotionTrace] = None) -> CoupledSetup:
    """
    Chuyển Scenario đã kiểm tra thành CoupledSetup cho tầng ghép nối.

    Args:
        scenario: Kịch bản
        drive_trace: Quỹ đạo giai đoạn 1 đã lưu để phát lại (một chiều/lai)
    """
    body = build_primary(scenario.primary) if scenario.primary is not None else None
    system = build_secondary(scenario.secondary) if scenario.secondary is not None else None

    interaction = None
    if scenario.interaction == "contact":
        interaction = ContactInteraction(scenario.contact)
    elif scenario.interaction == "tether":
        t = scenario.tether
        interaction = TetherInteraction(t.stiffness, t.damping, t.body_point, t.rest_length)

    env = scenario.environment
    ground = None
    if env.ground is not None:
        ground = GroundPlane(env.ground.point, env.ground.normal, env.ground.contact)

    return CoupledSetup(
        body=body,
        system=system,
        interaction=interaction,
        gravity=GravityModel(np.array(env.gravity, dtype=float)),
        duration=scenario.time.duration,
        dt_primary=scenario.time.dt_primary,
        dt_secondary=scenario.time.dt_secondary,
        sample_interval=scenario.time.sample_interval,
        primary_gravity=scenario.primary.gravity if scenario.primary is not None else True,
        stand_in=build_stand_in(scenario, system),
        wind=_build_wind(scenario),
        aero=None if env.aero is None else AeroModel(env.aero.c_normal, env.aero.quadratic),
        ground=ground,
        wind_follows_primary=bool(env.wind and env.wind.source and env.wind.source.follow_primary),
        velocity_ceiling=scenario.velocity_ceiling,
        drive_trace=drive_trace,
    )


# =============================================================================
# Chạy kịch bản
# =============================================================================

@dataclass
class RunArtifacts:
    scenario: Scenario
    result: CouplingResult
    stats: Optional[InteractionStats]

    @property
    def status(self):
        return self.result.status


def run_scenario(scenario: Scenario, drive_trace: Optional[MotionTrace] = None) -> RunArtifacts:
    """
    Chạy kịch bản theo kiểu ghép nối đã chọn và tóm tắt tương tác.

    Thống kê là None khi kịch bản không có hệ chính (không có khối lượng để chia).
    Mất ổn định không sinh ngoại lệ: trạng thái nằm trong result.status.

    Raises:
        ValueError: Nếu cấu hình không chạy được (ví dụ trường giảm chấn quá mạnh)
    """
    setup = build_setup(scenario, drive_trace)
    logger.info(f"=== Bắt đầu kịch bản '{scenario.name}' ({scenario.mode.value}) ===")
    result = RUNNERS[scenario.mode](setup)

    stats = None
    if scenario.primary is not None:
        if len(result.interaction_log) > 0:
            stats = summarize_interaction(result.interaction_log, scenario.primary.mass)
        else:
            stats = InteractionStats.empty(scenario.primary.mass)

    if result.status.ok:
        logger.info(f"=== Kết thúc kịch bản '{scenario.name}': {result.status.steps} bước, "
                    f"{result.wall_clock['total']:.2f} s ===")
    else:
        logger.error(f"=== Kịch bản '{scenario.name}' bị hủy: {result.status.message} ===")
    return RunArtifacts(scenario, result, stats)


def final_primary_velocity(result: CouplingResult) -> Optional[np.ndarray]:
    if result.body is not None:
        return result.body.linear_velocity.copy()
    trace = result.drive_trace if result.drive_trace is not None else result.primary_trace
    if trace is None:
        return None
    return trace.states[-1].linear_velocity.copy()


def exit_speed(scenario: Scenario, result: CouplingResult) -> float:
    """
    Tốc độ ra: vận tốc cuối của hệ chính chiếu lên hướng ngang của vận tốc ban đầu.
    Nếu vận tốc ban đầu không có thành phần ngang thì lấy độ lớn vận tốc ngang.
    """
    velocity = final_primary_velocity(result)
    if velocity is None or scenario.primary is None:
        return 0.0
    initial = np.array([scenario.primary.velocity[0], 0.0, scenario.primary.velocity[2]])
    horizontal = np.array([velocity[0], 0.0, velocity[2]])
    length = float(np.linalg.norm(initial))
    if length == 0.0:
        return float(np.linalg.norm(horizontal))
    return float(np.dot(horizontal, initial / length))


# =============================================================================
# Ghi kết quả
# =============================================================================

def _status_payload(artifacts: RunArtifacts) -> Dict:
    result = artifacts.result
    payload = result.status.to_dict()
    payload.update({
        "scenario": artifacts.scenario.name,
        "mode": result.mode.value,
        "max_displacement": result.max_displacement,
        "violation_steps": result.violation_steps,
    })
    return payload


def write_bundle(artifacts: RunArtifacts, output_dir: Union[str, Path],
                 save_drive_trace: bool = False) -> Dict[str, Path]:
    """
    Ghi bộ kết quả của một lần chạy vào output_dir. status.json luôn được ghi,
    kể cả khi lần chạy bị hủy vì mất ổn định.

    Returns:
        Dict[str, Path]: Tên loại file -> đường dẫn đã ghi
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    result = artifacts.result
    paths: Dict[str, Path] = {}

    paths["primary_trace"] = output_dir / settings.PRIMARY_TRACE_FILENAME
    rows = result.primary_trace.to_rows() if result.primary_trace is not None else []
    write_table(paths["primary_trace"], TRACE_HEADER, rows)

    paths["secondary_trace"] = output_dir / settings.SECONDARY_TRACE_FILENAME
    n_particles = result.system.n_particles if result.system is not None else 0
    write_table(paths["secondary_trace"], secondary_trace_header(n_particles),
                ([t, *sample.ravel()] for t, sample in zip(result.secondary_times, result.secondary_samples)))

    paths["interaction_log"] = output_dir / settings.INTERACTION_LOG_FILENAME
    log = result.interaction_log
    write_table(paths["interaction_log"], INTERACTION_LOG_HEADER,
                ([log.times[i], *log.forces[i], int(log.contact_counts[i])] for i in range(len(log))))

    paths["stats"] = output_dir / settings.STATS_REPORT_FILENAME
    lines = [f"scenario: {artifacts.scenario.name}", f"mode: {result.mode.value}"]
    if artifacts.stats is None:
        lines.append("primary: none")
    else:
        lines += artifacts.stats.report_lines()
    with open(paths["stats"], 'w', encoding='utf-8') as f:
        f.write("\n".join(lines) + "\n")

    if artifacts.stats is not None:
        paths["stats_table"] = output_dir / settings.STATS_TABLE_FILENAME
        secondary_name = artifacts.scenario.secondary.builder if artifacts.scenario.secondary is not None else "none"
        secondary_mass = result.system.total_mass if result.system is not None else 0.0
        row = artifacts.stats.table_row(artifacts.scenario.primary.shape, secondary_name, secondary_mass)
        write_table(paths["stats_table"], settings.STATS_TABLE_COLUMNS, [list(row.values())])

    paths["scenario"] = output_dir / settings.SCENARIO_RESOLVED_FILENAME
    with open(paths["scenario"], 'w', encoding='utf-8') as f:
        f.write(serialize_scenario(artifacts.scenario))

    if save_drive_trace and result.drive_trace is not None:
        paths["drive_trace"] = output_dir / settings.DRIVE_TRACE_FILENAME
        save_motion_trace(paths["drive_trace"], result.drive_trace)

    paths["status"] = output_dir / settings.STATUS_FILENAME
    with open(paths["status"], 'w', encoding='utf-8') as f:
        json.dump(_status_payload(artifacts), f, ensure_ascii=False, indent=2)

    logger.info(f"Đã ghi bộ kết quả vào {output_dir}")
    return paths


def write_mesh(system: MassSpringSystem, output_dir: Union[str, Path]) -> Dict[str, Path]:
    """
    Ghi cấu hình nghỉ của hệ phụ: chất điểm, lò xo và tam giác.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "particles": output_dir / MESH_PARTICLES_FILENAME,
        "springs": output_dir / MESH_SPRINGS_FILENAME,
        "triangles": output_dir / MESH_TRIANGLES_FILENAME,
    }
    write_table(paths["particles"], ["i", "x", "y", "z", "mass", "pinned"],
                ([i, *system.position[i], system.mass[i], bool(system.pinned[i])] for i in range(system.n_particles)))
    write_table(paths["springs"], ["a", "b", "rest_length", "stiffness", "damping", "compression_ratio"],
                ([int(system.spring_a[j]), int(system.spring_b[j]), system.rest_length[j], system.stiffness[j],
                  system.damping[j], system.compression_ratio[j]] for j in range(system.n_springs)))
    write_table(paths["triangles"], ["i", "j", "k"], (list(map(int, tri)) for tri in system.triangles))
    return paths


# =============================================================================
# So sánh ba kiểu ghép nối
# =============================================================================

@dataclass
class ModeSummary:
    mode: CouplingMode
    exit_speed: float
    max_displacement: float
    wall_primary: float
    wall_secondary: float
    wall_total: float
    status: str

    def row(self) -> list:
        return [self.mode.value, self.exit_speed, self.max_displacement,
                self.wall_primary, self.wall_secondary, self.wall_total, self.status]


COMPARE_COLUMNS = ["mode", "exit_speed", "max_displacement", "wall_primary", "wall_secondary", "wall_total", "status"]


def compare_modes(scenario: Scenario, output_dir: Union[str, Path]) -> Dict[CouplingMode, ModeSummary]:
    """
    Chạy cùng kịch bản (cùng điều kiện ban đầu) với cả ba kiểu ghép nối.

    Mỗi kiểu ghi bộ kết quả riêng vào output_dir/<mode>; kèm bảng tóm tắt và
    quỹ đạo hệ chính của ba kiểu đặt cạnh nhau.

    Raises:
        ScenarioValidationError: Nếu kịch bản không hỗ trợ đủ ba kiểu
    """
    if scenario.primary is None or scenario.secondary is None or scenario.interaction == "none":
        raise ScenarioValidationError("interaction", "so sánh cần hệ chính, hệ phụ và mô hình tương tác")
    if scenario.stand_in is None:
        raise ScenarioValidationError("stand_in", "so sánh cần mô hình thế chỗ cho kiểu lai")

    output_dir = Path(output_dir)
    summaries: Dict[CouplingMode, ModeSummary] = {}
    traces: Dict[CouplingMode, Optional[MotionTrace]] = {}

    for mode in (CouplingMode.TWO_WAY, CouplingMode.ONE_WAY, CouplingMode.HYBRID):
        artifacts = run_scenario(replace(scenario, mode=mode))
        write_bundle(artifacts, output_dir / mode.value)
        result = artifacts.result
        summaries[mode] = ModeSummary(
            mode=mode,
            exit_speed=exit_speed(scenario, result),
            max_displacement=result.max_displacement,
            wall_primary=result.wall_clock["primary"],
            wall_secondary=result.wall_clock["secondary"],
            wall_total=result.wall_clock["total"],
            status=result.status.status,
        )
        traces[mode] = result.primary_trace

    write_table(output_dir / settings.COMPARE_SUMMARY_FILENAME, COMPARE_COLUMNS,
                [s.row() for s in summaries.values()])
    _write_trajectories(output_dir / TRAJECTORIES_FILENAME, traces)
    return summaries


def _write_trajectories(path: Path, traces: Dict[CouplingMode, Optional[MotionTrace]]) -> None:
    available = {mode: trace for mode, trace in traces.items() if trace is not None}
    if not available:
        return
    count = min(len(trace) for trace in available.values())
    reference = next(iter(available.values()))
    header = ["t"]
    for mode in available:
        header += [f"{mode.value}_x", f"{mode.value}_y", f"{mode.value}_z"]
    rows: List[list] = []
    for k in range(count):
        row = [reference.states[k].t]
        for trace in available.values():
            row += list(trace.states[k].position)
        rows.append(row)
    write_table(path, header, rows)

# -*- coding: utf-8 -*-

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import settings
from scripts.interaction import ContactForceModel
from scripts.mass_spring import build_grid
from scripts.rigid_body import make_sphere
from scripts.scenario_loader import load_scenario_file


@pytest.fixture
def scenario_path():
    def _path(name: str) -> str:
        return str(settings.SCENARIOS_DIR / f"{name}.json")
    return _path


@pytest.fixture
def load_shipped(scenario_path):
    """
    Nạp một kịch bản đi kèm, có thể ghi đè: load_shipped("bungee", {"time.duration": 1.0}).
    """
    def _load(name: str, overrides=None):
        return load_scenario_file(scenario_path(name), list((overrides or {}).items()))
    return _load


@pytest.fixture
def small_sheet():
    # Tấm vải nằm ngang 5x5, ghim bốn góc, tâm tại gốc tọa độ
    return build_grid(5, 5, 1.0, 1.0, "cloth", "all-corners", 0.2, (-0.5, 0.0, -0.5), plane="xz")


@pytest.fixture
def soft_contact():
    return ContactForceModel(k_constraint=0.5, c_damp=0.5, k_restore=1000.0, mu=0.5)


@pytest.fixture
def dropping_ball():
    return make_sphere(0.2, 0.15, position=np.array([0.0, 0.3, 0.0]),
                       linear_velocity=np.array([0.3, -1.0, 0.0]))

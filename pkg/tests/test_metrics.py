# -*- coding: utf-8 -*-

import numpy as np
import pytest

from config import settings
from scripts.interaction import InteractionLog
from scripts.metrics import (AdvisorInput, CouplingMode, InteractionStats, WindowPolicy, advise,
                             detect_instability, recommend_coupling, summarize_interaction)


def _log(magnitudes, contact=None, dt=0.01) -> InteractionLog:
    magnitudes = np.asarray(magnitudes, dtype=float)
    forces = np.zeros((magnitudes.size, 3))
    forces[:, 1] = magnitudes
    counts = np.ones(magnitudes.size, dtype=np.int64) if contact is None else np.asarray(contact, dtype=np.int64)
    return InteractionLog(np.arange(magnitudes.size) * dt, forces, counts)


def _short_contact(force_min, force_max, force_mean) -> InteractionLog:
    # 10 bước tiếp xúc cho đúng min/max/mean, ngắn hơn cửa sổ tiếp xúc kéo dài
    filler = (10.0 * force_mean - force_min - force_max) / 8.0
    return _log([force_min, force_max] + [filler] * 8)


# (tên, khối lượng hệ chính, lực min/max/mean, gia tốc max, gia tốc mean tham chiếu)
REFERENCE_CASES = [
    ("basketball", 0.68, (0.0, 59.9, 15.7), 88.08, 23.14),
    ("trampoline", 64.38, (60.4, 5298.8, 2215.2), 82.30, 34.41),
    ("vest", 46.56, (2.1, 31.9, 6.9), 0.69, 0.15),
    ("noose", 46.56, (137.9, 4055.3, 575.0), 87.10, 12.35),
]


@pytest.mark.parametrize("name, mass, forces, accel_max, accel_mean", REFERENCE_CASES)
def test_reference_force_and_acceleration_table(name, mass, forces, accel_max, accel_mean):
    stats = summarize_interaction(_short_contact(*forces), mass)
    assert stats.force_min == pytest.approx(forces[0])
    assert stats.force_max == pytest.approx(forces[1])
    assert stats.force_mean == pytest.approx(forces[2])
    assert stats.accel_mean == pytest.approx(forces[2] / mass)
    assert stats.accel_max == pytest.approx(accel_max, abs=0.1)
    assert stats.accel_mean == pytest.approx(accel_mean, abs=0.1)
    assert not stats.sustained


def test_acceleration_is_force_over_mass():
    stats = InteractionStats(2.0, 1.0, 8.0, 4.0, (0.0, 1.0), 1.0)
    assert (stats.accel_min, stats.accel_max, stats.accel_mean) == (0.5, 4.0, 2.0)


def test_sustained_contact_uses_first_half_second():
    contact = np.zeros(120, dtype=np.int64)
    contact[10:] = 1
    magnitudes = np.where(contact > 0, 5.0, 0.0)
    magnitudes[70:] = 100.0
    stats = summarize_interaction(_log(magnitudes, contact), 1.0)
    assert stats.sustained
    assert stats.window == pytest.approx((0.1, 0.6))
    assert stats.sample_count == 50
    assert stats.force_max == pytest.approx(5.0)


def test_sustained_window_tolerates_brief_gaps():
    contact = np.ones(100, dtype=np.int64)
    contact[20] = 0
    stats = summarize_interaction(_log(np.full(100, 3.0), contact), 1.0)
    assert stats.sustained
    assert stats.window[0] == pytest.approx(0.0)


def test_intermittent_contact_uses_contact_samples_only():
    contact = np.zeros(100, dtype=np.int64)
    contact[[5, 40, 80]] = 1
    magnitudes = np.zeros(100)
    magnitudes[[5, 40, 80]] = [1.0, 2.0, 6.0]
    stats = summarize_interaction(_log(magnitudes, contact), 2.0)
    assert not stats.sustained
    assert stats.window == pytest.approx((0.05, 0.8))
    assert stats.force_mean == pytest.approx(3.0)
    assert stats.contact_fraction == pytest.approx(0.03)


def test_custom_window_policy():
    stats = summarize_interaction(_log(np.full(30, 2.0)), 1.0, WindowPolicy(sustained_duration=0.1))
    assert stats.sustained
    assert stats.sample_count == 10


def test_no_contact_gives_empty_stats():
    stats = summarize_interaction(_log(np.zeros(5), np.zeros(5)), 1.0)
    assert not stats.has_contact
    assert stats.force_mean == 0.0


def test_bad_inputs_are_rejected():
    with pytest.raises(ValueError):
        summarize_interaction(_log([]), 1.0)
    with pytest.raises(ValueError):
        summarize_interaction(_log([1.0]), 0.0)


def test_table_row_follows_column_order():
    stats = summarize_interaction(_short_contact(0.0, 59.9, 15.7), 0.68)
    row = stats.table_row("ball", "net", 0.03)
    assert list(row) == list(settings.STATS_TABLE_COLUMNS)
    assert row["primary"] == "ball" and row["secondary_mass"] == 0.03


# =============================================================================
# Cây quyết định
# =============================================================================

def _stats(accel_mean: float) -> InteractionStats:
    return InteractionStats(1.0, 0.0, 2.0 * accel_mean, accel_mean, (0.0, 1.0), 1.0)


def test_negligible_interaction_picks_one_way():
    clothing = summarize_interaction(_short_contact(2.1, 31.9, 6.9), 46.56)
    recommendation = advise(AdvisorInput(clothing))
    assert recommendation.mode == CouplingMode.ONE_WAY
    assert recommendation.warning is None


def test_strong_interaction_picks_two_way():
    trampoline = summarize_interaction(_short_contact(60.4, 5298.8, 2215.2), 64.38)
    assert advise(AdvisorInput(trampoline)).mode == CouplingMode.TWO_WAY


def test_costly_two_way_with_stand_in_picks_hybrid():
    basketball = summarize_interaction(_short_contact(0.0, 59.9, 15.7), 0.68)
    recommendation = advise(AdvisorInput(basketball, stand_in_available=True, two_way_cost_acceptable=False))
    assert recommendation.mode == CouplingMode.HYBRID


def test_costly_two_way_without_stand_in_warns():
    recommendation = advise(AdvisorInput(_stats(20.0), two_way_cost_acceptable=False))
    assert recommendation.mode == CouplingMode.TWO_WAY
    assert recommendation.warning
    assert "CẢNH BÁO" in recommendation.text


def test_unimportant_interaction_is_negligible():
    assert advise(AdvisorInput(_stats(20.0), contextually_important=False)).mode == CouplingMode.ONE_WAY


def test_unstable_one_way_falls_through():
    advisor_input = AdvisorInput(_stats(0.1), secondary_stable_under_one_way=False)
    assert advise(advisor_input).mode == CouplingMode.TWO_WAY
    costly = AdvisorInput(_stats(0.1), secondary_stable_under_one_way=False,
                          stand_in_available=True, two_way_cost_acceptable=False)
    assert advise(costly).mode == CouplingMode.HYBRID


def test_threshold_is_configurable():
    assert advise(AdvisorInput(_stats(5.0)), accel_threshold=10.0).mode == CouplingMode.ONE_WAY
    mode, text = recommend_coupling(AdvisorInput(_stats(5.0)), accel_threshold=1.0)
    assert mode == CouplingMode.TWO_WAY
    assert text


# =============================================================================
# Phát hiện mất ổn định
# =============================================================================

def test_instability_detector():
    positions = np.zeros((4, 3))
    velocities = np.zeros((4, 3))
    assert detect_instability(positions, velocities).stable

    velocities[2] = [0.0, 2.0e4, 0.0]
    status = detect_instability(positions, velocities, velocity_ceiling=1.0e4)
    assert not status.stable and status.index == 2

    positions[1, 0] = np.nan
    status = detect_instability(positions, velocities)
    assert not status.stable and status.index == 1


@pytest.mark.parametrize("important", [True, False])
@pytest.mark.parametrize("stable", [True, False])
@pytest.mark.parametrize("stand_in", [True, False])
@pytest.mark.parametrize("cost_ok", [True, False])
@pytest.mark.parametrize("accel", [0.5, 5.0])
def test_advisor_truth_table(important, stable, stand_in, cost_ok, accel):
    recommendation = advise(AdvisorInput(_stats(accel), important, stable, stand_in, cost_ok))
    if (accel < 1.0 or not important) and stable:
        expected = CouplingMode.ONE_WAY
    elif cost_ok:
        expected = CouplingMode.TWO_WAY
    elif stand_in:
        expected = CouplingMode.HYBRID
    else:
        expected = CouplingMode.TWO_WAY
    assert recommendation.mode == expected
    assert (recommendation.warning is not None) == (not cost_ok and not stand_in and expected == CouplingMode.TWO_WAY)

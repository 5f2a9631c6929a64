"""Tests for the deterministic validation scenario."""

import pytest

from src.simulation.safety import dss_at, evaluate_batch
from src.simulation.validation import (
    TABLE_REFERENCE,
    run_validation,
    validation_config,
    validation_dataset,
    weak_follower_config,
)


def test_validation_config_is_degenerate():
    """All spreads are zero and the grid is 16 points at 0.2 s."""
    cfg = validation_config()
    assert cfg.n_series == 1
    assert cfg.n_points == 16
    assert cfg.dt == 0.2
    assert cfg.a_min == 8.829
    for spec in (cfg.accel_leader, cfg.accel_follower, cfg.pos_leader,
                 cfg.vel_leader, cfg.pos_follower, cfg.vel_follower):
        assert spec.sigma == 0.0
    assert weak_follower_config().accel_follower.mu == -4.5


def test_reference_table_shape():
    """The published table has one entry per grid point."""
    assert len(TABLE_REFERENCE) == 16
    assert TABLE_REFERENCE[0] == 17.86


def test_run_validation_passes():
    """Prefix, published sign pattern and weak-follower checks all pass."""
    report = run_validation()
    assert report.passed
    assert report.prefix_passed
    assert report.reference_scan_passed
    assert report.weak_follower_passed


def test_prefix_values():
    """DSS at 0.0-0.6 s matches the published values within 0.005 m."""
    report = run_validation()
    assert len(report.prefix_checks) == 4
    for check, expected in zip(report.prefix_checks, (17.86, 16.75, 15.64, 14.53)):
        assert check.computed == pytest.approx(expected, abs=0.005)
    assert report.dss.values[0] == dss_at(65.0, 0.0, 27.78, 33.33, 4.6, 0.7, 8.829)


def test_documented_divergence():
    """At 0.8 s the computed value is about 14.6 m, not the published 12.63 m."""
    report = run_validation()
    assert report.divergence.t == pytest.approx(0.8)
    assert report.divergence.computed == pytest.approx(14.598, abs=0.005)
    assert report.divergence.reference == 12.63
    assert not report.divergence.passed
    assert any('not reproducible' in note for note in report.notes)


def test_published_sign_pattern():
    """The published values turn critical at 2.0 s for six steps."""
    scan = run_validation().reference_scan
    assert scan.first_critical == pytest.approx(2.0)
    assert len(scan.critical_times) == 6


def test_weak_follower_criticality():
    """The weak-follower scenario shares the published sign pattern."""
    report = run_validation().weak_follower_report
    assert report.first_critical == pytest.approx(2.0)
    assert len(report.critical_times) == 6


def test_validation_dataset_fully_defined():
    """Both vehicles brake, so every DSS value is defined."""
    dataset = evaluate_batch(validation_dataset(), 8.829)
    dss, report = dataset.annotations[0]
    assert all(v is not None for v in dss.values)
    assert not report.is_critical


def test_format_table():
    """The printed table has a header and one row per grid point."""
    table = run_validation().format_table()
    lines = table.splitlines()
    assert len(lines) == 17
    assert '17.86' in lines[1]
    assert 'diverges' in lines[5]

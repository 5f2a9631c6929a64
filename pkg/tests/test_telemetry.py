"""Tests for telemetry logging."""

import json

import pytest

from src import __version__
from src.utils.telemetry import TelemetryLogger


def test_log_event_appends_jsonl(tmp_path, monkeypatch):
    """Events are appended as one JSON object per line."""
    monkeypatch.delenv(TelemetryLogger.ENV_FLAG, raising=False)
    logger = TelemetryLogger(tmp_path)
    logger.log_event('generate', {'n_series': 3})
    logger.log_event('evaluate', {'critical': 1})

    lines = (tmp_path / 'telemetry.log').read_text().splitlines()
    assert len(lines) == 2
    first = json.loads(lines[0])
    assert first['event'] == 'generate'
    assert first['payload'] == {'n_series': 3}
    assert 'timestamp' in first


def test_env_flag_disables(tmp_path, monkeypatch):
    """TAILGATE_TELEMETRY=off disables logging."""
    monkeypatch.setenv(TelemetryLogger.ENV_FLAG, 'off')
    logger = TelemetryLogger(tmp_path)
    logger.log_event('generate', {})
    assert not logger.enabled
    assert not (tmp_path / 'telemetry.log').exists()


def test_explicit_flag_wins_over_env(tmp_path, monkeypatch):
    """enabled=True overrides the environment."""
    monkeypatch.setenv(TelemetryLogger.ENV_FLAG, '0')
    assert TelemetryLogger(tmp_path, enabled=True).enabled


def test_no_directory_disables():
    """Without an output directory nothing is logged."""
    logger = TelemetryLogger(None)
    assert not logger.enabled
    assert logger.log_path is None
    logger.log_event('generate', {})


def test_for_output_uses_parent(tmp_path, monkeypatch):
    """for_output logs next to the output file."""
    monkeypatch.delenv(TelemetryLogger.ENV_FLAG, raising=False)
    logger = TelemetryLogger.for_output(tmp_path / 'plots' / 'scenario.svg')
    assert logger.log_path == (tmp_path / 'plots' / 'telemetry.log').resolve()


def test_write_failure_does_not_raise(tmp_path, monkeypatch, capsys):
    """A failed write is reported and swallowed."""
    monkeypatch.delenv(TelemetryLogger.ENV_FLAG, raising=False)
    blocker = tmp_path / 'not_a_dir'
    blocker.write_text('')
    logger = TelemetryLogger(blocker / 'sub')
    logger.log_event('generate', {})
    assert '[telemetry] Failed to write event' in capsys.readouterr().out


def test_events_share_run_id(tmp_path, monkeypatch):
    """Events of one logger carry the same run id and the tool version."""
    monkeypatch.delenv(TelemetryLogger.ENV_FLAG, raising=False)
    logger = TelemetryLogger(tmp_path)
    logger.log_event('a', {})
    logger.log_event('b', {})
    entries = [json.loads(line) for line in (tmp_path / 'telemetry.log').read_text().splitlines()]
    assert entries[0]['run_id'] == entries[1]['run_id'] == logger.run_id
    assert entries[0]['version'] == __version__
    assert logger.events_written == 2


def test_timed_adds_duration(tmp_path, monkeypatch):
    """timed() logs on exit with a duration and fields added in the block."""
    monkeypatch.delenv(TelemetryLogger.ENV_FLAG, raising=False)
    logger = TelemetryLogger(tmp_path)
    with logger.timed('evaluate', {'series': 3}) as event:
        event['critical'] = 1
    entry = json.loads((tmp_path / 'telemetry.log').read_text())
    assert entry['payload']['series'] == 3
    assert entry['payload']['critical'] == 1
    assert entry['payload']['duration_s'] >= 0


def test_timed_skips_failed_block(tmp_path, monkeypatch):
    """Nothing is logged when the block raises."""
    monkeypatch.delenv(TelemetryLogger.ENV_FLAG, raising=False)
    logger = TelemetryLogger(tmp_path)
    with pytest.raises(ValueError):
        with logger.timed('plot', {}):
            raise ValueError('boom')
    assert not (tmp_path / 'telemetry.log').exists()

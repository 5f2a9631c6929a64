"""Tests for batch generation."""

import json
import tempfile
from pathlib import Path

import pytest

from src.simulation.dataset import Dataset
from src.simulation.pipeline import BatchGenerationError, BatchGenerator, generate_batch
from src.simulation.sampling import NormalSpec
from src.simulation.scenario import GenerationConfig


@pytest.fixture
def temp_output():
    """Create temporary output directory."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


def test_generate_batch_basic():
    """A batch holds n_series series of n_points each, ordered by index."""
    dataset = generate_batch(GenerationConfig(n_series=10, seed=42))
    assert isinstance(dataset, Dataset)
    assert len(dataset) == 10
    assert [s.index for s in dataset.series] == list(range(10))
    assert all(len(s) == 16 for s in dataset.series)
    assert dataset.annotations is None
    assert dataset.provenance.seed == 42


def test_generate_batch_reproducible():
    """Same config and seed give equal datasets."""
    cfg = GenerationConfig(n_series=25, seed=42)
    assert generate_batch(cfg) == generate_batch(cfg)


def test_different_seeds_differ():
    """Changing the seed changes the scenarios."""
    a = generate_batch(GenerationConfig(n_series=3, seed=1))
    b = generate_batch(GenerationConfig(n_series=3, seed=2))
    assert a.series[0] != b.series[0]


def test_scenario_independent_of_batch_size():
    """Scenario i is the same whatever the number of scenarios generated."""
    small = generate_batch(GenerationConfig(n_series=5, seed=9))
    large = generate_batch(GenerationConfig(n_series=12, seed=9))
    assert small.series == large.series[:5]


def test_generate_one_matches_batch():
    """generate_one(i) equals the i-th series of the batch."""
    cfg = GenerationConfig(n_series=6, seed=3)
    generator = BatchGenerator(cfg)
    assert generator.generate_one(4) == generate_batch(cfg).series[4]


def test_parallel_equals_serial():
    """Parallel generation gives the same dataset as serial generation."""
    cfg = GenerationConfig(n_series=200, seed=11)
    assert generate_batch(cfg, parallel=True, max_workers=4) == generate_batch(cfg)


@pytest.mark.slow
def test_parallel_equals_serial_large():
    """Serial and parallel runs of 1000 scenarios are identical."""
    cfg = GenerationConfig(n_series=1000, seed=12345)
    assert generate_batch(cfg, parallel=True, max_workers=8) == generate_batch(cfg)


def test_generate_verbose_output(capsys):
    """Verbose runs print a summary."""
    generate_batch(GenerationConfig(n_series=3), verbose=True)
    captured = capsys.readouterr().out
    assert "Generating follow-up drive scenarios" in captured
    assert "Generated 3 series" in captured


def test_generate_writes_telemetry(temp_output, monkeypatch):
    """A generate event is logged when a telemetry directory is given."""
    monkeypatch.delenv('TAILGATE_TELEMETRY', raising=False)
    generate_batch(GenerationConfig(n_series=2), telemetry_dir=str(temp_output))
    lines = (temp_output / 'telemetry.log').read_text().strip().splitlines()
    entry = json.loads(lines[-1])
    assert entry['event'] == 'generate'
    assert entry['payload']['n_series'] == 2
    assert entry['payload']['failed'] == 0


def test_generate_without_telemetry_dir(temp_output):
    """No telemetry directory means no telemetry file."""
    generate_batch(GenerationConfig(n_series=2))
    assert not (temp_output / 'telemetry.log').exists()


def test_generation_failures_aggregated():
    """Every failing scenario is reported by index."""
    cfg = GenerationConfig(n_series=4, vel_leader=NormalSpec(-10.0, 0.0))
    with pytest.raises(BatchGenerationError) as exc_info:
        generate_batch(cfg, parallel=True, max_workers=2)
    assert sorted(exc_info.value.failures) == [0, 1, 2, 3]
    assert 'v0' in exc_info.value.failures[0]

"""Tests for seeded sampling."""

import math

import numpy as np
import pytest

from src.simulation.sampling import (
    DRAW_ORDER,
    UINT64_MAX,
    NormalSpec,
    RandomSource,
    ReactionTimeSamplingError,
    TruncationBounds,
    sample_normal,
    sample_reaction_time,
)
from src.simulation.special import GammaSpec, gamma_cdf

DEFAULT_SPEC = GammaSpec(shape=12.25, scale=0.04 / 0.7)
DEFAULT_BOUNDS = TruncationBounds(0.3, 1.7)


def test_random_source_reproducible():
    """Same seed and stream give the same variates."""
    a = RandomSource(42, 3)
    b = RandomSource(42, 3)
    assert [a.standard_normal() for _ in range(5)] == [b.standard_normal() for _ in range(5)]


def test_random_source_streams_independent():
    """Different streams or seeds give different variates."""
    base = [RandomSource(42, 0).uniform_open() for _ in range(1)]
    assert RandomSource(42, 1).uniform_open() != base[0]
    assert RandomSource(43, 0).uniform_open() != base[0]


def test_stream_sequences_ignore_consumption_order():
    """Interleaving streams in any order leaves each stream's sequence unchanged."""
    n_streams, n_draws = 8, 25
    expected = {
        s: [RandomSource(42, s).standard_normal() for _ in range(n_draws)]
        for s in range(n_streams)
    }

    sources = {s: RandomSource(42, s) for s in range(n_streams)}
    observed = {s: [] for s in range(n_streams)}
    schedule = np.repeat(np.arange(n_streams), n_draws)
    np.random.default_rng(5).shuffle(schedule)
    for s in schedule.tolist():
        observed[s].append(sources[s].standard_normal())

    assert observed == expected


def test_random_source_extreme_keys():
    """Seeds and stream ids use the full 64-bit range."""
    rng = RandomSource(UINT64_MAX, UINT64_MAX)
    assert 0.0 < rng.uniform_open() < 1.0


@pytest.mark.parametrize('seed, stream_id, error', [
    (-1, 0, ValueError),
    (0, UINT64_MAX + 1, ValueError),
    (True, 0, TypeError),
    (1.5, 0, TypeError),
])
def test_random_source_rejects_bad_keys(seed, stream_id, error):
    """Seeds must be 64-bit unsigned integers."""
    with pytest.raises(error):
        RandomSource(seed, stream_id)


def test_draw_count_tracks_consumption():
    """Every variate advances the draw counter."""
    rng = RandomSource(1, 0)
    rng.standard_normal()
    rng.uniform_open()
    assert rng.draw_count == 2


def test_uniform_open_interval():
    """Uniform variates lie strictly inside (0, 1)."""
    rng = RandomSource(5, 0)
    values = [rng.uniform_open() for _ in range(5000)]
    assert all(0.0 < u < 1.0 for u in values)


def test_normal_spec_validation():
    """sigma must be non-negative and mu finite."""
    with pytest.raises(ValueError):
        NormalSpec(0.0, -1.0)
    with pytest.raises(ValueError):
        NormalSpec(math.nan, 1.0)


def test_sample_normal_degenerate():
    """sigma = 0 returns mu exactly and still consumes one draw."""
    rng = RandomSource(9, 0)
    assert sample_normal(rng, NormalSpec(65.0, 0.0)) == 65.0
    assert rng.draw_count == 1


def test_sample_normal_moments():
    """10^5 draws: mean and sd within 0.01 of mu and sigma."""
    rng = RandomSource(123, 0)
    values = np.array([sample_normal(rng, NormalSpec(27.78, 1.0)) for _ in range(100_000)])
    assert values.mean() == pytest.approx(27.78, abs=0.01)
    assert values.std(ddof=1) == pytest.approx(1.0, abs=0.01)


def test_truncation_bounds_validation():
    """lo must be positive and hi above lo."""
    with pytest.raises(ValueError, match='lo'):
        TruncationBounds(0.0, 1.0)
    with pytest.raises(ValueError, match='hi'):
        TruncationBounds(1.0, 1.0)


def test_truncation_bounds_inclusive():
    """Both bounds are inside the interval."""
    assert DEFAULT_BOUNDS.contains(0.3)
    assert DEFAULT_BOUNDS.contains(1.7)
    assert not DEFAULT_BOUNDS.contains(1.7000001)


def test_probability_mass():
    """Mass inside the bounds is F(hi) - F(lo)."""
    expected = gamma_cdf(1.7, DEFAULT_SPEC) - gamma_cdf(0.3, DEFAULT_SPEC)
    assert DEFAULT_BOUNDS.probability_mass(DEFAULT_SPEC) == pytest.approx(expected)
    assert 0.99 < expected < 1.0


def test_reaction_times_within_bounds():
    """Every truncated draw lies in [lo, hi]."""
    rng = RandomSource(77, 0)
    samples = [sample_reaction_time(rng, DEFAULT_SPEC, DEFAULT_BOUNDS) for _ in range(2000)]
    assert all(0.3 <= t <= 1.7 for t in samples)


def test_reaction_time_narrow_bounds_keep_shape():
    """Tight bounds reject rather than clamp: no pile-up on the edges."""
    rng = RandomSource(3, 0)
    bounds = TruncationBounds(0.6, 0.8)
    samples = np.array([sample_reaction_time(rng, DEFAULT_SPEC, bounds) for _ in range(2000)])
    assert np.all((samples >= 0.6) & (samples <= 0.8))
    assert np.mean(samples == 0.6) == 0.0
    assert np.mean(samples == 0.8) == 0.0


def test_reaction_time_sampling_gives_up():
    """Bounds holding no probability mass raise after the rejection limit."""
    rng = RandomSource(0, 0)
    with pytest.raises(ReactionTimeSamplingError):
        sample_reaction_time(rng, DEFAULT_SPEC, TruncationBounds(50.0, 51.0), max_rejections=50)


def test_draw_order_names_every_parameter():
    """A scenario consumes eight named parameters."""
    assert len(DRAW_ORDER) == 8
    assert DRAW_ORDER[:2] == ('accel_leader', 'accel_follower')


@pytest.mark.slow
def test_reaction_time_statistics():
    """10^5 truncated samples: mean 0.70 ± 0.01 s, sd 0.20 ± 0.01 s, all in [0.3, 1.7]."""
    rng = RandomSource(2023, 0)
    samples = np.array([sample_reaction_time(rng, DEFAULT_SPEC, DEFAULT_BOUNDS) for _ in range(100_000)])
    assert samples.mean() == pytest.approx(0.70, abs=0.01)
    assert samples.std(ddof=1) == pytest.approx(0.20, abs=0.01)
    assert np.all((samples >= 0.3) & (samples <= 1.7))

"""Seeded random sampling for scenario parameters.

Every scenario owns its own random stream. A stream is a Philox counter-based
generator keyed by ``(seed, stream_id)``, so the variates of scenario ``i``
depend only on the seed and ``i``, not on draw order or worker count.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from .special import GammaSpec, gamma_cdf, gamma_inv_cdf

UINT64_MAX = 2 ** 64 - 1
MAX_CONSECUTIVE_REJECTIONS = 10_000

# Order in which a scenario consumes its stream. Changing it changes every dataset.
DRAW_ORDER: Tuple[str, ...] = (
    'accel_leader',
    'accel_follower',
    'reaction_leader',
    'reaction_follower',
    'pos_leader',
    'vel_leader',
    'pos_follower',
    'vel_follower',
)


class ReactionTimeSamplingError(RuntimeError):
    """Raised when truncated reaction-time sampling keeps rejecting."""


class RandomSource:
    """
    Independent random stream for one scenario.

    Args:
        seed: 64-bit unsigned run seed
        stream_id: 64-bit unsigned stream index (the scenario index)
    """

    def __init__(self, seed: int, stream_id: int):
        for name, value in (('seed', seed), ('stream_id', stream_id)):
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
            if not 0 <= int(value) <= UINT64_MAX:
                raise ValueError(f"{name} must fit in 64 unsigned bits, got {value}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.draw_count = 0
        key = (self.stream_id << 64) | self.seed
        self._generator = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, stream_id={self.stream_id}, draws={self.draw_count})"

    def uniform_open(self) -> float:
        """Uniform variate strictly inside (0, 1)."""
        while True:
            self.draw_count += 1
            u = float(self._generator.random())
            if u > 0.0:
                return u

    def standard_normal(self) -> float:
        """Standard normal variate."""
        self.draw_count += 1
        return float(self._generator.standard_normal())


@dataclass(frozen=True)
class NormalSpec:
    """Normal distribution N(mu, sigma²); ``sigma == 0`` is a point mass."""
    mu: float
    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class TruncationBounds:
    """Closed interval [lo, hi] (s) that reaction times are limited to."""
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and self.lo > 0):
            raise ValueError(f"truncation lo must be > 0, got {self.lo}")
        if not (math.isfinite(self.hi) and self.hi > self.lo):
            raise ValueError(f"truncation hi must be > lo, got [{self.lo}, {self.hi}]")

    def contains(self, t: float) -> bool:
        return self.lo <= t <= self.hi

    def probability_mass(self, spec: GammaSpec) -> float:
        """Probability that an untruncated draw lands inside the bounds."""
        p_lo, p_hi = _bounds_probabilities(spec, self)
        return p_hi - p_lo


@lru_cache(maxsize=64)
def _bounds_probabilities(spec: GammaSpec, bounds: TruncationBounds) -> Tuple[float, float]:
    return gamma_cdf(bounds.lo, spec), gamma_cdf(bounds.hi, spec)


def sample_normal(rng: RandomSource, spec: NormalSpec) -> float:
    """
    Draw from N(mu, sigma²).

    One standard normal is always consumed, even for ``sigma == 0``, so the
    position of every later draw in the stream does not depend on which
    distributions are degenerate.
    """
    z = rng.standard_normal()
    if spec.sigma == 0:
        return spec.mu
    return spec.mu + spec.sigma * z


def sample_reaction_time(
    rng: RandomSource,
    spec: GammaSpec,
    bounds: TruncationBounds,
    max_rejections: int = MAX_CONSECUTIVE_REJECTIONS,
) -> float:
    """
    Draw a gamma reaction time truncated to ``bounds`` by rejection.

    A uniform ``u`` is mapped through the inverse gamma CDF; draws outside
    [lo, hi] are discarded and redrawn, which keeps the interior shape of the
    distribution (clamping would pile probability onto the bounds).

    Args:
        rng: Scenario random stream
        spec: Gamma shape/scale
        bounds: Truncation interval
        max_rejections: Consecutive rejections tolerated before giving up

    Returns:
        Reaction time (s) inside ``bounds``
    """
    p_lo, p_hi = _bounds_probabilities(spec, bounds)
    for _ in range(max_rejections):
        u = rng.uniform_open()
        # Outside [F(lo), F(hi)] the quantile is outside [lo, hi]; skip the inversion
        if u < p_lo or u > p_hi:
            continue
        t = gamma_inv_cdf(u, spec)
        if bounds.contains(t):
            return t
    raise ReactionTimeSamplingError(
        f"{max_rejections} consecutive reaction-time draws fell outside "
        f"[{bounds.lo}, {bounds.hi}] s for gamma(a={spec.shape}, b={spec.scale}); "
        f"the bounds hold {p_hi - p_lo:.3g} of the probability mass"
    )

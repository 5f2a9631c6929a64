"""Follow-up drive scenarios: configuration, parameter draws and time series.

A scenario is one leader/follower pair. Its parameters are drawn from the
distributions in ``GenerationConfig`` and the closed-form kinematics are
evaluated on a uniform time grid shared by every scenario of a batch.
"""

import math
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Optional

import numpy as np

from .kinematics import (
    GapParams,
    VehicleParams,
    effective_distance,
    position_series,
    velocity_series,
)
from .sampling import (
    UINT64_MAX,
    NormalSpec,
    RandomSource,
    TruncationBounds,
    sample_normal,
    sample_reaction_time,
)
from .special import GammaSpec

# Default parameter set (mean reaction time 0.7 s, sd 0.2 s, a_min = mu * g)
A_MIN_DEFAULT = 8.829
REACTION_MEAN = 0.7
REACTION_STD = 0.2
# a = (mean/sd)², b = sd²/mean
DEFAULT_REACTION = GammaSpec(shape=12.25, scale=0.04 / REACTION_MEAN)


class ConfigError(ValueError):
    """Invalid generation configuration; names the key and/or file line."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if key is not None:
            prefix.append(f"'{key}'")
        super().__init__(f"{': '.join(prefix)}: {message}" if prefix else message)


# Flat key -> (field, sub-attribute) mapping used by config files and provenance
_NESTED_FIELDS = {
    'accel_leader': ('mu', 'sigma'),
    'accel_follower': ('mu', 'sigma'),
    'pos_leader': ('mu', 'sigma'),
    'vel_leader': ('mu', 'sigma'),
    'pos_follower': ('mu', 'sigma'),
    'vel_follower': ('mu', 'sigma'),
    'reaction': ('shape', 'scale'),
    'truncation': ('lo', 'hi'),
}
_NESTED_TYPES = {
    'accel_leader': NormalSpec,
    'accel_follower': NormalSpec,
    'pos_leader': NormalSpec,
    'vel_leader': NormalSpec,
    'pos_follower': NormalSpec,
    'vel_follower': NormalSpec,
    'reaction': GammaSpec,
    'truncation': TruncationBounds,
}
_INTEGER_FIELDS = ('n_series', 'n_points', 'seed')


@dataclass(frozen=True)
class GenerationConfig:
    """All inputs of a generation run; defaults reproduce the reference parameter set.

    Accelerations are signed: the defaults brake at -8.829 m/s² (the reference
    list gives the magnitude a_min).
    """
    n_series: int = 100
    n_points: int = 16
    t0: float = 0.0
    dt: float = 0.2
    vehicle_length: float = 4.6
    accel_leader: NormalSpec = NormalSpec(-A_MIN_DEFAULT, 1.0)
    accel_follower: NormalSpec = NormalSpec(-A_MIN_DEFAULT, 1.0)
    pos_leader: NormalSpec = NormalSpec(65.0, 3.0)
    vel_leader: NormalSpec = NormalSpec(27.78, 1.0)
    pos_follower: NormalSpec = NormalSpec(0.0, 3.0)
    vel_follower: NormalSpec = NormalSpec(33.33, 1.0)
    reaction: GammaSpec = DEFAULT_REACTION
    truncation: TruncationBounds = TruncationBounds(0.3, 1.7)
    a_min: float = A_MIN_DEFAULT
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """Check ranges; raises ``ConfigError`` naming the first bad key."""
        for name in _INTEGER_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigError(f"must be an integer, got {value!r}", key=name)
        if self.n_series < 1:
            raise ConfigError(f"must be >= 1, got {self.n_series}", key='n_series')
        if self.n_points < 2:
            raise ConfigError(f"must be >= 2, got {self.n_points}", key='n_points')
        if not 0 <= self.seed <= UINT64_MAX:
            raise ConfigError(f"must fit in 64 unsigned bits, got {self.seed}", key='seed')
        for name in ('t0', 'dt', 'vehicle_length', 'a_min'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"must be a finite number, got {value!r}", key=name)
        if self.t0 < 0:
            raise ConfigError(f"must be >= 0, got {self.t0}", key='t0')
        if self.dt <= 0:
            raise ConfigError(f"must be > 0, got {self.dt}", key='dt')
        if self.vehicle_length <= 0:
            raise ConfigError(f"must be > 0, got {self.vehicle_length}", key='vehicle_length')
        if self.a_min <= 0:
            raise ConfigError(f"must be > 0, got {self.a_min}", key='a_min')
        for name, spec_type in _NESTED_TYPES.items():
            if not isinstance(getattr(self, name), spec_type):
                raise ConfigError(f"must be a {spec_type.__name__}", key=name)

    @property
    def gap(self) -> GapParams:
        return GapParams(self.vehicle_length)

    def with_overrides(self, **overrides: Any) -> 'GenerationConfig':
        """Copy with selected fields replaced (``None`` values are ignored)."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_flat(self) -> Dict[str, Any]:
        """Flat ``{dotted key: value}`` mapping in declaration order."""
        flat: Dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in _NESTED_FIELDS:
                for attr in _NESTED_FIELDS[f.name]:
                    flat[f"{f.name}.{attr}"] = getattr(value, attr)
            else:
                flat[f.name] = value
        return flat

    @classmethod
    def flat_keys(cls) -> tuple:
        return tuple(cls().to_flat().keys())

    @classmethod
    def from_flat(cls, flat: Dict[str, Any]) -> 'GenerationConfig':
        """
        Build a config from a flat mapping; missing keys keep their defaults.

        Raises:
            ConfigError: unknown key or out-of-range value
        """
        known = set(cls.flat_keys())
        for key in flat:
            if key not in known:
                raise ConfigError("unknown configuration key", key=key)

        defaults = cls().to_flat()
        merged = {**defaults, **flat}
        kwargs: Dict[str, Any] = {}
        for f in fields(cls):
            if f.name in _NESTED_FIELDS:
                attrs = _NESTED_FIELDS[f.name]
                values = {attr: merged[f"{f.name}.{attr}"] for attr in attrs}
                for attr, value in values.items():
                    if isinstance(value, bool) or not isinstance(value, (int, float)):
                        raise ConfigError(f"must be a number, got {value!r}", key=f"{f.name}.{attr}")
                try:
                    kwargs[f.name] = _NESTED_TYPES[f.name](**{a: float(v) for a, v in values.items()})
                except ValueError as e:
                    culprit = next((a for a in reversed(attrs) if a in str(e)), attrs[0])
                    raise ConfigError(str(e), key=f"{f.name}.{culprit}") from e
            else:
                value = merged[f.name]
                if f.name not in _INTEGER_FIELDS and isinstance(value, int) and not isinstance(value, bool):
                    value = float(value)
                kwargs[f.name] = value
        return cls(**kwargs)


@dataclass(frozen=True)
class ScenarioParams:
    """Sampled parameters of one scenario."""
    leader: VehicleParams
    follower: VehicleParams
    index: int


class TimeVector:
    """
    Uniform time grid shared by every series of a batch.

    Values are ``t0 + j * dt`` (direct multiplication, no accumulated drift).
    """

    def __init__(self, values: np.ndarray):
        values = np.array(values, dtype=float)
        if values.ndim != 1 or len(values) < 2:
            raise ValueError("a time vector needs at least 2 points")
        values.setflags(write=False)
        self.values = values

    @property
    def t0(self) -> float:
        return float(self.values[0])

    @property
    def dt(self) -> float:
        return float(self.values[1] - self.values[0])

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values.tolist())

    def __getitem__(self, j):
        return self.values[j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"TimeVector(n={len(self)}, t0={self.t0}, dt={self.dt})"


def build_time_vector(n: int, t0: float, dt: float) -> TimeVector:
    """
    Build the uniform time grid t_j = t0 + j * dt, j = 0..n-1.

    Args:
        n: Number of points (>= 2)
        t0: Initial time (s)
        dt: Time step (s, > 0)
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be > 0, got {dt}")
    if not (math.isfinite(t0) and t0 >= 0):
        raise ValueError(f"t0 must be >= 0, got {t0}")
    return TimeVector(t0 + np.arange(n, dtype=float) * dt)


@dataclass(frozen=True)
class SeriesDiagnostics:
    """Flags for states where the kinematic model stops being physical."""
    negative_velocity: bool = False
    initial_overlap: bool = False

    @property
    def any(self) -> bool:
        return self.negative_velocity or self.initial_overlap


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ScenarioSeries:
    """
    One multivariate time series: time plus leader/follower position and velocity.

    ``params`` and ``gap`` are ``None`` for series ingested from CSV, which does
    not carry the sampled parameters. Such series keep their scenario id in
    ``scenario_id``.
    """
    params: Optional[ScenarioParams]
    times: TimeVector
    x_leader: np.ndarray
    v_leader: np.ndarray
    x_follower: np.ndarray
    v_follower: np.ndarray
    gap: Optional[GapParams] = None
    diagnostics: SeriesDiagnostics = field(default_factory=SeriesDiagnostics)
    scenario_id: Optional[int] = None

    def __post_init__(self):
        for name in ('x_leader', 'v_leader', 'x_follower', 'v_follower'):
            array = _frozen(getattr(self, name))
            if len(array) != len(self.times):
                raise ValueError(
                    f"{name} has {len(array)} points but the time vector has {len(self.times)}"
                )
            object.__setattr__(self, name, array)

    def __len__(self) -> int:
        return len(self.times)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScenarioSeries):
            return NotImplemented
        return (
            self.params == other.params
            and self.index == other.index
            and self.times == other.times
            and self.gap == other.gap
            and self.diagnostics == other.diagnostics
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in ('x_leader', 'v_leader', 'x_follower', 'v_follower')
            )
        )

    @property
    def index(self) -> Optional[int]:
        return self.params.index if self.params is not None else self.scenario_id

    @property
    def effective_distance(self) -> np.ndarray:
        """Bumper-to-bumper gap at every time step (m)."""
        if self.gap is None:
            raise ValueError("series has no vehicle length; effective distance unavailable")
        return self.x_leader - self.x_follower - self.gap.vehicle_length

    @property
    def relative_velocity(self) -> np.ndarray:
        """Follower speed excess over the leader, v_F - v_L (m/s)."""
        return self.v_follower - self.v_leader


def sample_scenario_params(
    rng: RandomSource,
    cfg: GenerationConfig,
    index: Optional[int] = None,
) -> ScenarioParams:
    """
    Draw the parameters of one scenario from its stream.

    Draw order: accelerations (L, F), reaction times (L, F), then initial
    position/velocity of L and of F (see ``sampling.DRAW_ORDER``).

    Args:
        rng: Random stream of this scenario
        cfg: Generation configuration
        index: Scenario id (defaults to the stream id)
    """
    a0_leader = sample_normal(rng, cfg.accel_leader)
    a0_follower = sample_normal(rng, cfg.accel_follower)
    tr_leader = sample_reaction_time(rng, cfg.reaction, cfg.truncation)
    tr_follower = sample_reaction_time(rng, cfg.reaction, cfg.truncation)
    x0_leader = sample_normal(rng, cfg.pos_leader)
    v0_leader = sample_normal(rng, cfg.vel_leader)
    x0_follower = sample_normal(rng, cfg.pos_follower)
    v0_follower = sample_normal(rng, cfg.vel_follower)

    # A negative initial speed (only reachable with very wide sigmas) is rejected by VehicleParams
    leader = VehicleParams(x0=x0_leader, v0=v0_leader, a0=a0_leader, t_reaction=tr_leader)
    follower = VehicleParams(x0=x0_follower, v0=v0_follower, a0=a0_follower, t_reaction=tr_follower)
    return ScenarioParams(
        leader=leader,
        follower=follower,
        index=rng.stream_id if index is None else index,
    )


def simulate_scenario(params: ScenarioParams, times: TimeVector, gap: GapParams) -> ScenarioSeries:
    """
    Evaluate both vehicles' kinematics at every point of ``times``.

    Sets ``negative_velocity`` when either vehicle's velocity drops below zero
    inside the window and ``initial_overlap`` when the effective distance at
    the first time step is <= 0.
    """
    x_leader = position_series(params.leader, times.values)
    v_leader = velocity_series(params.leader, times.values)
    x_follower = position_series(params.follower, times.values)
    v_follower = velocity_series(params.follower, times.values)

    diagnostics = SeriesDiagnostics(
        negative_velocity=bool((v_leader < 0).any() or (v_follower < 0).any()),
        initial_overlap=effective_distance(float(x_leader[0]), float(x_follower[0]), gap) <= 0,
    )
    return ScenarioSeries(
        params=params,
        times=times,
        x_leader=x_leader,
        v_leader=v_leader,
        x_follower=x_follower,
        v_follower=v_follower,
        gap=gap,
        diagnostics=diagnostics,
    )

"""Piecewise braking kinematics for a single vehicle and the effective gap.

Each vehicle keeps its initial velocity until the driver's reaction time has
elapsed and then decelerates at a constant rate. The equations are evaluated
literally: velocities are never clamped at zero, so a caller that needs to know
whether a vehicle "went backwards" inside its window has to check for it
(``simulate_scenario`` does and raises a diagnostic flag).
"""

import math
from dataclasses import dataclass

import numpy as np


def _require_finite(**values: float) -> None:
    """Reject NaN/inf inputs, naming the offending argument."""
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class VehicleParams:
    """Initial state and driver reaction time of one vehicle.

    Attributes:
        x0: Initial position (m)
        v0: Initial velocity (m/s)
        a0: Initial acceleration (m/s²), negative when braking
        t_reaction: Driver reaction time (s)
    """
    x0: float
    v0: float
    a0: float
    t_reaction: float

    def __post_init__(self):
        _require_finite(x0=self.x0, v0=self.v0, a0=self.a0, t_reaction=self.t_reaction)
        if self.t_reaction < 0:
            raise ValueError(f"t_reaction must be >= 0, got {self.t_reaction}")
        if self.v0 < 0:
            raise ValueError(f"v0 must be >= 0, got {self.v0}")

    @property
    def is_braking(self) -> bool:
        return self.a0 < 0


@dataclass(frozen=True)
class VehicleState:
    """Position and velocity of a vehicle at time ``t``."""
    t: float
    x: float
    v: float


@dataclass(frozen=True)
class GapParams:
    """Vehicle length shared by leader and follower (m)."""
    vehicle_length: float

    def __post_init__(self):
        _require_finite(vehicle_length=self.vehicle_length)
        if self.vehicle_length <= 0:
            raise ValueError(f"vehicle_length must be > 0, got {self.vehicle_length}")


def velocity_at(p: VehicleParams, t: float) -> float:
    """
    Velocity of a vehicle at time ``t``.

    ``t == t_reaction`` belongs to the constant-velocity branch.

    Args:
        p: Vehicle parameters
        t: Time (s), must be >= 0

    Returns:
        Velocity (m/s)
    """
    _require_finite(t=t)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t <= p.t_reaction:
        return p.v0
    return p.v0 + p.a0 * (t - p.t_reaction)


def position_at(p: VehicleParams, t: float) -> float:
    """
    Position of a vehicle at time ``t``.

    Args:
        p: Vehicle parameters
        t: Time (s), must be >= 0

    Returns:
        Position (m)
    """
    _require_finite(t=t)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t <= p.t_reaction:
        return p.x0 + p.v0 * t
    elapsed = t - p.t_reaction
    return p.x0 + p.v0 * t + 0.5 * p.a0 * elapsed * elapsed


def state_at(p: VehicleParams, t: float) -> VehicleState:
    """Position and velocity at ``t`` bundled together."""
    return VehicleState(t=t, x=position_at(p, t), v=velocity_at(p, t))


def effective_distance(x_leader: float, x_follower: float, gap: GapParams) -> float:
    """
    Free gap between the follower's front and the leader's rear bumper.

    Negative values mean the vehicles overlap (collision state).
    """
    return x_leader - x_follower - gap.vehicle_length


def velocity_series(p: VehicleParams, times: np.ndarray) -> np.ndarray:
    """Vectorised ``velocity_at``; identical values point by point."""
    times = np.asarray(times, dtype=float)
    elapsed = times - p.t_reaction
    return np.where(times <= p.t_reaction, p.v0, p.v0 + p.a0 * elapsed)


def position_series(p: VehicleParams, times: np.ndarray) -> np.ndarray:
    """Vectorised ``position_at``; identical values point by point."""
    times = np.asarray(times, dtype=float)
    elapsed = times - p.t_reaction
    linear = p.x0 + p.v0 * times
    return np.where(times <= p.t_reaction, linear, linear + 0.5 * p.a0 * elapsed * elapsed)

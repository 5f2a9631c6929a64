"""Difference Space Stopping (DSS) safety assessment.

DSS compares the room the follower has (effective gap plus the leader's
braking distance) with the room it needs (its reaction distance plus its own
braking distance), both braking distances taken at the worst-case deceleration
``a_min``. A negative value marks a safety-critical time step.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .dataset import Dataset
from .scenario import ScenarioSeries


class BatchEvaluationError(RuntimeError):
    """One or more series of a batch could not be evaluated."""

    def __init__(self, failures: Dict[int, str]):
        self.failures = dict(sorted(failures.items()))
        detail = '; '.join(f"series {i}: {msg}" for i, msg in self.failures.items())
        super().__init__(f"{len(self.failures)} series failed evaluation: {detail}")


@dataclass(frozen=True)
class DssSeries:
    """DSS value per time step (m); ``None`` where DSS is undefined (not braking)."""
    values: Tuple[Optional[float], ...]
    a_min: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'values', tuple(None if v is None else float(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def is_defined(self) -> bool:
        return any(v is not None for v in self.values)

    @property
    def defined_values(self) -> List[float]:
        return [v for v in self.values if v is not None]

    @property
    def minimum(self) -> Optional[float]:
        defined = self.defined_values
        return min(defined) if defined else None


@dataclass(frozen=True)
class CriticalityReport:
    """Safety-critical time steps of one series."""
    critical_times: Tuple[float, ...] = ()
    first_critical: Optional[float] = None
    is_critical: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'critical_times', tuple(float(t) for t in self.critical_times))
        if self.is_critical != bool(self.critical_times):
            raise ValueError("is_critical must be True exactly when critical_times is non-empty")
        expected_first = min(self.critical_times) if self.critical_times else None
        if self.first_critical != expected_first:
            raise ValueError("first_critical must be the earliest critical time")


def dss_at(
    x_leader: float,
    x_follower: float,
    v_leader: float,
    v_follower: float,
    vehicle_length: float,
    t_reaction_follower: float,
    a_min: float,
) -> float:
    """
    DSS at one instant.

    DSS = (x_L - x_F - l_V + v_L²/(2 a_min)) - (v_F t_R,F + v_F²/(2 a_min))

    Args:
        x_leader, x_follower: Positions (m)
        v_leader, v_follower: Velocities (m/s)
        vehicle_length: Vehicle length l_V (m)
        t_reaction_follower: The follower's reaction time (s)
        a_min: Worst-case deceleration magnitude (m/s², > 0)

    Returns:
        DSS (m); negative means safety-critical
    """
    if not (math.isfinite(a_min) and a_min > 0):
        raise ValueError(f"a_min must be > 0, got {a_min}")
    if not t_reaction_follower >= 0:
        raise ValueError(f"t_reaction_follower must be >= 0, got {t_reaction_follower}")
    spatial = (x_leader - x_follower - vehicle_length) + v_leader * v_leader / (2.0 * a_min)
    stopping = v_follower * t_reaction_follower + v_follower * v_follower / (2.0 * a_min)
    return spatial - stopping


def _dss_series(series: ScenarioSeries, a_min: float) -> np.ndarray:
    """Vectorised ``dss_at``; same operation order, so identical values."""
    t_reaction = series.params.follower.t_reaction
    spatial = (series.x_leader - series.x_follower - series.gap.vehicle_length) \
        + series.v_leader * series.v_leader / (2.0 * a_min)
    stopping = series.v_follower * t_reaction + series.v_follower * series.v_follower / (2.0 * a_min)
    return spatial - stopping


def scan_criticality(times: Iterable[float], dss_values: Sequence[Optional[float]]) -> CriticalityReport:
    """
    Record every time with DSS < 0 and the first such time.

    DSS exactly 0 is not critical; undefined values are skipped.
    """
    critical: List[float] = []
    first_critical = None
    first_found = False
    for t, value in zip(times, dss_values):
        if value is not None and value < 0:
            critical.append(float(t))
            if not first_found:
                first_critical = float(t)
                first_found = True
    return CriticalityReport(
        critical_times=tuple(critical),
        first_critical=first_critical,
        is_critical=first_found,
    )


def evaluate_series(series: ScenarioSeries, a_min: float) -> Tuple[DssSeries, CriticalityReport]:
    """
    DSS and criticality of one series.

    DSS is defined at every time step when both sampled initial accelerations
    are negative (both vehicles brake), and undefined at every step otherwise.
    The follower's sampled reaction time enters the reaction-distance term.

    Raises:
        ValueError: the series carries no sampled parameters or vehicle length
    """
    if not (math.isfinite(a_min) and a_min > 0):
        raise ValueError(f"a_min must be > 0, got {a_min}")
    if series.params is None or series.gap is None:
        raise ValueError(
            "series has no sampled parameters (CSV-ingested?); "
            "evaluate a dataset read from the structured .json format"
        )

    braking = series.params.leader.a0 < 0 and series.params.follower.a0 < 0
    if not braking:
        return DssSeries(values=(None,) * len(series), a_min=a_min), CriticalityReport()

    values = tuple(_dss_series(series, a_min).tolist())
    return DssSeries(values=values, a_min=a_min), scan_criticality(series.times, values)


def evaluate_batch(
    dataset: Dataset,
    a_min: float,
    parallel: bool = False,
    max_workers: Optional[int] = None,
) -> Dataset:
    """
    Annotate every series of ``dataset`` with its DSS series and criticality report.

    Re-evaluating replaces existing annotations, so the operation is idempotent.

    Raises:
        BatchEvaluationError: listing every series that failed, by position
    """
    results: Dict[int, Tuple[DssSeries, CriticalityReport]] = {}
    failures: Dict[int, str] = {}

    def _evaluate(position: int):
        try:
            results[position] = evaluate_series(dataset.series[position], a_min)
        except Exception as e:
            failures[position] = str(e)

    positions = range(len(dataset))
    if parallel and len(dataset) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            list(executor.map(_evaluate, positions))
    else:
        for position in positions:
            _evaluate(position)

    if failures:
        raise BatchEvaluationError(failures)
    return dataset.with_annotations(results[i] for i in positions)


def select_critical(dataset: Dataset) -> Dataset:
    """Keep only the safety-critical series of an evaluated dataset."""
    if dataset.annotations is None:
        raise ValueError("dataset has no safety annotations; evaluate it first")
    positions = [i for i, (_, report) in enumerate(dataset.annotations) if report.is_critical]
    return dataset.select(positions)

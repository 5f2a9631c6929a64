"""Summary statistics, reports and plots for evaluated datasets."""

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

try:
    import matplotlib
    matplotlib.use('Agg')  # Non-interactive backend
    import matplotlib.pyplot as plt
    MATPLOTLIB_AVAILABLE = True
except ImportError:
    MATPLOTLIB_AVAILABLE = False

from ..simulation.dataset import Dataset

REPORT_FORMATS = ('text', 'kv', 'json', 'markdown')
SVG_HASH_SALT = 'tailgate'
HISTOGRAM_KEY_DIGITS = 9


@dataclass(frozen=True)
class DistributionSummary:
    count: int
    mean: float
    sd: float
    min: float
    max: float


def describe(values: Sequence[float]) -> Optional[DistributionSummary]:
    """Mean, sample sd, min and max; sums use ``math.fsum`` so order never matters."""
    values = [float(v) for v in values]
    if not values:
        return None
    n = len(values)
    mean = math.fsum(values) / n
    sd = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - 1)) if n > 1 else 0.0
    return DistributionSummary(count=n, mean=mean, sd=sd, min=min(values), max=max(values))


@dataclass(frozen=True)
class SummaryStats:
    """Aggregates of an evaluated dataset.

    ``first_critical_histogram`` maps the first critical time (s), binned at the
    dataset's time step, to the number of series whose first critical time
    falls in that bin. Parameter summaries are ``None`` when the dataset holds
    no sampled parameters (CSV input).
    """
    n_series: int
    n_defined: int
    n_critical: int
    critical_fraction: float
    first_critical_histogram: Dict[float, int] = field(default_factory=dict)
    min_dss: Tuple[Optional[float], ...] = ()
    min_dss_summary: Optional[DistributionSummary] = None
    reaction_leader: Optional[DistributionSummary] = None
    reaction_follower: Optional[DistributionSummary] = None
    accel_leader: Optional[DistributionSummary] = None
    accel_follower: Optional[DistributionSummary] = None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['first_critical_histogram'] = {
            f"{t:g}": count for t, count in self.first_critical_histogram.items()
        }
        data['min_dss'] = list(self.min_dss)
        return data


def _histogram_key(t: float, t0: float, dt: float) -> float:
    return round(t0 + round((t - t0) / dt) * dt, HISTOGRAM_KEY_DIGITS)


def summarize(dataset: Dataset) -> SummaryStats:
    """
    Summarize an evaluated dataset.

    Raises:
        ValueError: the dataset has no safety annotations
    """
    if dataset.annotations is None:
        raise ValueError("dataset has no safety annotations; run evaluate first")

    n_series = len(dataset)
    histogram: Dict[float, int] = {}
    min_dss: List[Optional[float]] = []
    n_critical = 0
    n_defined = 0
    for series, (dss, report) in zip(dataset.series, dataset.annotations):
        min_dss.append(dss.minimum)
        n_defined += dss.is_defined
        if report.is_critical:
            n_critical += 1
            key = _histogram_key(report.first_critical, series.times.t0, series.times.dt)
            histogram[key] = histogram.get(key, 0) + 1

    params = [s.params for s in dataset.series if s.params is not None]
    return SummaryStats(
        n_series=n_series,
        n_defined=n_defined,
        n_critical=n_critical,
        critical_fraction=n_critical / n_series if n_series else 0.0,
        first_critical_histogram=dict(sorted(histogram.items())),
        min_dss=tuple(min_dss),
        min_dss_summary=describe([v for v in min_dss if v is not None]),
        reaction_leader=describe([p.leader.t_reaction for p in params]),
        reaction_follower=describe([p.follower.t_reaction for p in params]),
        accel_leader=describe([p.leader.a0 for p in params]),
        accel_follower=describe([p.follower.a0 for p in params]),
    )


_DISTRIBUTIONS = (
    ('reaction_leader', 'Reaction time, leader (s)'),
    ('reaction_follower', 'Reaction time, follower (s)'),
    ('accel_leader', 'Acceleration, leader (m/s²)'),
    ('accel_follower', 'Acceleration, follower (m/s²)'),
    ('min_dss_summary', 'Minimum DSS per series (m)'),
)


def generate_report(
    stats: SummaryStats,
    output_path: Optional[Path] = None,
    format: str = 'text',
) -> str:
    """
    Generate formatted report.

    Args:
        stats: Summary statistics
        output_path: Optional path to save report
        format: Report format ('text', 'kv', 'json', 'markdown')

    Returns:
        Report content as string
    """
    if format == 'text':
        content = _generate_text_report(stats)
    elif format == 'kv':
        content = _generate_kv_report(stats)
    elif format == 'json':
        content = json.dumps(stats.to_dict(), indent=2) + '\n'
    elif format == 'markdown':
        content = _generate_markdown_report(stats)
    else:
        raise ValueError(f"Unsupported format: {format}")

    if output_path:
        Path(output_path).write_text(content, encoding='utf-8')

    return content


def _generate_text_report(stats: SummaryStats) -> str:
    lines = [
        f"{'Series':<34}{stats.n_series:>12}",
        f"{'Series with defined DSS':<34}{stats.n_defined:>12}",
        f"{'Safety-critical series':<34}{stats.n_critical:>12}",
        f"{'Critical fraction':<34}{stats.critical_fraction:>12.4f}",
        "",
        "First critical time histogram",
    ]
    if stats.first_critical_histogram:
        lines.append(f"  {'t (s)':>8}  {'count':>8}")
        for t, count in stats.first_critical_histogram.items():
            lines.append(f"  {t:>8.2f}  {count:>8}")
    else:
        lines.append("  (no critical series)")

    lines.extend(["", f"{'':<34}{'n':>8}{'mean':>11}{'sd':>11}{'min':>11}{'max':>11}"])
    for attr, label in _DISTRIBUTIONS:
        summary = getattr(stats, attr)
        if summary is None:
            lines.append(f"{label:<34}{'-':>8}")
        else:
            lines.append(
                f"{label:<34}{summary.count:>8}{summary.mean:>11.4f}{summary.sd:>11.4f}"
                f"{summary.min:>11.4f}{summary.max:>11.4f}"
            )
    return "\n".join(lines) + "\n"


def _generate_kv_report(stats: SummaryStats) -> str:
    lines = [
        f"n_series = {stats.n_series}",
        f"n_defined = {stats.n_defined}",
        f"n_critical = {stats.n_critical}",
        f"critical_fraction = {stats.critical_fraction:.4f}",
    ]
    for t, count in stats.first_critical_histogram.items():
        lines.append(f"first_critical.{t:g} = {count}")
    for attr, _ in _DISTRIBUTIONS:
        summary = getattr(stats, attr)
        if summary is None:
            continue
        for name in ('count', 'mean', 'sd', 'min', 'max'):
            lines.append(f"{attr}.{name} = {getattr(summary, name)!r}")
    return "\n".join(lines) + "\n"


def _generate_markdown_report(stats: SummaryStats) -> str:
    lines = [
        "# DSS Safety Summary",
        "",
        "## Summary",
        "",
        f"- **Series**: {stats.n_series}",
        f"- **Series with defined DSS**: {stats.n_defined}",
        f"- **Safety-critical series**: {stats.n_critical}",
        f"- **Critical fraction**: {stats.critical_fraction:.4f}",
        "",
        "## First Critical Time",
        "",
    ]
    if stats.first_critical_histogram:
        lines.extend(["| t (s) | count |", "|---:|---:|"])
        lines.extend(f"| {t:.2f} | {count} |" for t, count in stats.first_critical_histogram.items())
    else:
        lines.append("No safety-critical series.")

    lines.extend(["", "## Distributions", "", "| quantity | n | mean | sd | min | max |", "|---|---:|---:|---:|---:|---:|"])
    for attr, label in _DISTRIBUTIONS:
        summary = getattr(stats, attr)
        if summary is not None:
            lines.append(
                f"| {label} | {summary.count} | {summary.mean:.4f} | {summary.sd:.4f} "
                f"| {summary.min:.4f} | {summary.max:.4f} |"
            )
    return "\n".join(lines) + "\n"


def emit_plot(
    dataset: Dataset,
    position: int,
    output_path: Union[str, Path],
    vehicle_length: Optional[float] = None,
) -> Path:
    """
    Write a two-panel SVG for one series.

    Top panel: positions and velocities of both vehicles. Bottom panel:
    effective distance and relative velocity, with every critical time step
    marked. Vertical lines mark each vehicle's reaction time when the series
    carries its sampled parameters.

    Args:
        dataset: Dataset (critical markers need annotations)
        position: Position of the series in the dataset
        output_path: Target ``.svg`` file
        vehicle_length: Used when the series has no vehicle length (CSV input)

    Raises:
        IndexError: position out of range
        ValueError: no vehicle length available
    """
    if not MATPLOTLIB_AVAILABLE:
        raise RuntimeError("matplotlib is required for plotting")
    if not 0 <= position < len(dataset):
        raise IndexError(f"scenario index {position} out of range (dataset has {len(dataset)} series)")

    series = dataset.series[position]
    if series.gap is not None:
        length = series.gap.vehicle_length
    elif vehicle_length is not None:
        length = vehicle_length
    elif dataset.provenance.config is not None:
        length = dataset.provenance.config.vehicle_length
    else:
        raise ValueError("series has no vehicle length; pass one explicitly")

    t = series.times.values
    distance = series.x_leader - series.x_follower - length
    relative = series.relative_velocity

    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)

    with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'none'}):
        fig, (top, bottom) = plt.subplots(2, 1, figsize=(9, 7), sharex=True)
        try:
            top.plot(t, series.x_leader, color='tab:blue', label='x leader', gid='x-leader')
            top.plot(t, series.x_follower, color='tab:orange', label='x follower', gid='x-follower')
            top.set_ylabel('Position (m)')
            top_v = top.twinx()
            top_v.plot(t, series.v_leader, color='tab:blue', linestyle='--', label='v leader', gid='v-leader')
            top_v.plot(t, series.v_follower, color='tab:orange', linestyle='--', label='v follower', gid='v-follower')
            top_v.set_ylabel('Velocity (m/s)')
            title = f"Scenario {series.index if series.index is not None else position}"
            top.set_title(title)

            bottom.plot(t, distance, color='tab:green', label='effective distance', gid='effective-distance')
            bottom.set_ylabel('Effective distance (m)')
            bottom.set_xlabel('Time (s)')
            bottom_v = bottom.twinx()
            bottom_v.plot(t, relative, color='tab:red', linestyle='--', label='v_F - v_L', gid='relative-velocity')
            bottom_v.set_ylabel('Relative velocity (m/s)')

            if series.params is not None:
                for who, vehicle, color in (
                    ('leader', series.params.leader, 'tab:blue'),
                    ('follower', series.params.follower, 'tab:orange'),
                ):
                    for panel, ax in (('top', top), ('bottom', bottom)):
                        ax.axvline(vehicle.t_reaction, color=color, linestyle=':', linewidth=1,
                                   gid=f'reaction-{who}-{panel}')

            if dataset.annotations is not None:
                _, report = dataset.annotations[position]
                critical = set(report.critical_times)
                for j, tj in enumerate(series.times):
                    if tj in critical:
                        bottom.plot([tj], [distance[j]], linestyle='none', marker='X', markersize=8,
                                    color='black', gid=f'critical-{j}')

            for ax in (top, bottom):
                ax.grid(alpha=0.3)
            handles = top.get_legend_handles_labels()[0] + top_v.get_legend_handles_labels()[0]
            top.legend(handles=handles, loc='upper left', fontsize=8)
            handles = bottom.get_legend_handles_labels()[0] + bottom_v.get_legend_handles_labels()[0]
            bottom.legend(handles=handles, loc='upper right', fontsize=8)

            fig.tight_layout()
            fig.savefig(output_path, format='svg', metadata={'Date': None})
        finally:
            plt.close(fig)
    return output_path

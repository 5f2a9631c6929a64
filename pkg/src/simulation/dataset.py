"""Dataset model: ordered scenario series, optional safety annotations, provenance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator, Optional, Sequence, Tuple

from .. import __version__

if TYPE_CHECKING:
    from .safety import CriticalityReport, DssSeries
    from .scenario import GenerationConfig, ScenarioSeries

    Annotation = Tuple[DssSeries, CriticalityReport]


@dataclass(frozen=True)
class Provenance:
    """Where a dataset came from: the full config (seed included) and tool version.

    No timestamps: a dataset must be a pure function of its configuration.
    """
    config: Optional[GenerationConfig] = None
    tool_version: str = __version__

    @property
    def seed(self) -> Optional[int]:
        return self.config.seed if self.config is not None else None


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of scenario series with optional per-series annotations."""
    provenance: Provenance
    series: Tuple[ScenarioSeries, ...] = ()
    annotations: Optional[Tuple[Annotation, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'series', tuple(self.series))
        if self.annotations is not None:
            object.__setattr__(self, 'annotations', tuple(tuple(a) for a in self.annotations))
            if len(self.annotations) != len(self.series):
                raise ValueError(
                    f"{len(self.annotations)} annotations for {len(self.series)} series; "
                    "annotations must align 1:1 with series"
                )

    def __len__(self) -> int:
        return len(self.series)

    def __iter__(self) -> Iterator[ScenarioSeries]:
        return iter(self.series)

    @property
    def is_evaluated(self) -> bool:
        return self.annotations is not None

    def with_annotations(self, annotations: Iterable[Annotation]) -> Dataset:
        """Copy of this dataset carrying ``annotations`` (replaces existing ones)."""
        return Dataset(provenance=self.provenance, series=self.series, annotations=tuple(annotations))

    def without_annotations(self) -> Dataset:
        return Dataset(provenance=self.provenance, series=self.series)

    def select(self, positions: Sequence[int]) -> Dataset:
        """Subset by position, keeping order, provenance and annotations."""
        series = tuple(self.series[i] for i in positions)
        annotations = None
        if self.annotations is not None:
            annotations = tuple(self.annotations[i] for i in positions)
        return Dataset(provenance=self.provenance, series=series, annotations=annotations)

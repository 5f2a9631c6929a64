"""File formats, reports and telemetry for Tailgate."""

from .config_io import read_config, write_config
from .dataset_io import DatasetFormatError, read_dataset, write_dataset
from .metrics import SummaryStats, emit_plot, generate_report, summarize
from .telemetry import TelemetryLogger

__all__ = [
    'read_config',
    'write_config',
    'DatasetFormatError',
    'read_dataset',
    'write_dataset',
    'SummaryStats',
    'emit_plot',
    'generate_report',
    'summarize',
    'TelemetryLogger',
]

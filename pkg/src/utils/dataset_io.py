"""Dataset files: long-form CSV and a structured JSON record.

The format is chosen by extension. CSV holds one row per (scenario, time step)
and is the interchange format; it cannot carry sampled parameters, so series
read from CSV have ``params = None``; a CSV with no defined DSS and no critical
row reads back unevaluated (``annotations = None``). JSON carries the full provenance,
parameters, diagnostics and annotations and reads back exactly.
"""

import json
import re
from io import StringIO
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..simulation.dataset import Dataset, Provenance
from ..simulation.kinematics import GapParams, VehicleParams
from ..simulation.safety import CriticalityReport, DssSeries
from ..simulation.scenario import (
    ConfigError,
    GenerationConfig,
    ScenarioParams,
    ScenarioSeries,
    SeriesDiagnostics,
    TimeVector,
)

CSV_COLUMNS = ['scenario', 't', 'x_l', 'v_l', 'x_f', 'v_f', 'dss', 'critical']
CSV_FLOAT_FORMAT = '%.9g'
NA_MARKER = 'NA'

JSON_FORMAT_NAME = 'tailgate-dataset'
JSON_FORMAT_VERSION = 1

SUPPORTED_EXTENSIONS = {'.csv': 'csv', '.json': 'json'}


class DatasetFormatError(ValueError):
    """Malformed dataset file; ``row`` is the 1-based file line when known."""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


def dataset_format(path: Union[str, Path]) -> str:
    suffix = Path(path).suffix.lower()
    if suffix not in SUPPORTED_EXTENSIONS:
        raise DatasetFormatError(
            f"unsupported dataset extension {suffix or '(none)'!r}; use one of "
            f"{', '.join(sorted(SUPPORTED_EXTENSIONS))}"
        )
    return SUPPORTED_EXTENSIONS[suffix]


def write_dataset(dataset: Dataset, path: Union[str, Path]) -> Path:
    """
    Write ``dataset`` in the format implied by the extension of ``path``.

    Output is a pure function of the dataset: the same dataset always gives
    byte-identical files.
    """
    path = Path(path)
    fmt = dataset_format(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == 'csv':
        path.write_text(dataset_to_csv(dataset), encoding='utf-8', newline='')
    else:
        path.write_text(dataset_to_json(dataset), encoding='utf-8', newline='')
    return path


def read_dataset(path: Union[str, Path]) -> Dataset:
    """
    Read a dataset written by ``write_dataset``.

    Raises:
        FileNotFoundError / OSError: the file cannot be read
        DatasetFormatError: malformed content (CSV errors carry the row number)
    """
    path = Path(path)
    fmt = dataset_format(path)
    text = path.read_text(encoding='utf-8')
    return dataset_from_csv(text) if fmt == 'csv' else dataset_from_json(text)


# --- CSV ---------------------------------------------------------------------

def _scenario_id(series: ScenarioSeries, position: int) -> int:
    return series.index if series.index is not None else position


def dataset_to_csv(dataset: Dataset) -> str:
    frames = []
    for position, series in enumerate(dataset.series):
        n = len(series)
        if dataset.annotations is not None:
            dss, report = dataset.annotations[position]
            dss_column = np.array([np.nan if v is None else v for v in dss.values], dtype=float)
            critical_set = set(report.critical_times)
            critical = np.array([1 if t in critical_set else 0 for t in series.times], dtype=int)
        else:
            dss_column = np.full(n, np.nan)
            critical = np.zeros(n, dtype=int)
        frames.append(pd.DataFrame({
            'scenario': np.full(n, _scenario_id(series, position), dtype=np.int64),
            't': series.times.values,
            'x_l': series.x_leader,
            'v_l': series.v_leader,
            'x_f': series.x_follower,
            'v_f': series.v_follower,
            'dss': dss_column,
            'critical': critical,
        }, columns=CSV_COLUMNS))

    df = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=CSV_COLUMNS)
    return df.to_csv(
        index=False,
        float_format=CSV_FLOAT_FORMAT,
        na_rep=NA_MARKER,
        lineterminator='\n',
    )


def _parser_error_row(message: str) -> Optional[int]:
    match = re.search(r'line (\d+)', message)
    return int(match.group(1)) if match else None


def _numeric_column(df: pd.DataFrame, column: str, allow_na: bool = False) -> np.ndarray:
    """Column as floats (NaN for the NA marker when allowed); bad cells raise with their row."""
    raw = df[column]
    na = (raw == NA_MARKER) if allow_na else pd.Series(False, index=raw.index)
    values = pd.to_numeric(raw.mask(na), errors="coerce").to_numpy(dtype=float)
    bad = (np.isnan(values) & ~na.to_numpy()) | np.isinf(values)
    if bad.any():
        position = int(np.flatnonzero(bad)[0])
        raise DatasetFormatError(
            f"column {column!r} has non-numeric value {raw.iloc[position]!r}", row=position + 2,
        )
    return values


def dataset_from_csv(text: str) -> Dataset:
    """Parse long-form CSV text (see ``CSV_COLUMNS``)."""
    if not text.strip():
        raise DatasetFormatError("empty file: header missing", row=1)
    try:
        df = pd.read_csv(StringIO(text), dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.ParserError as e:
        raise DatasetFormatError(f"malformed row: {e}", row=_parser_error_row(str(e))) from e

    if list(df.columns) != CSV_COLUMNS:
        raise DatasetFormatError(
            f"header must be {','.join(CSV_COLUMNS)}, got {','.join(map(str, df.columns))}", row=1,
        )
    if df.isna().to_numpy().any():
        position = int(np.flatnonzero(df.isna().any(axis=1).to_numpy())[0])
        raise DatasetFormatError("row has fewer than 8 fields", row=position + 2)
    empty = (df == '').any(axis=1).to_numpy()
    if empty.any():
        position = int(np.flatnonzero(empty)[0])
        raise DatasetFormatError("empty field", row=position + 2)

    scenario = _numeric_column(df, 'scenario')
    if not np.all(scenario == np.floor(scenario)) or (scenario < 0).any():
        position = int(np.flatnonzero((scenario != np.floor(scenario)) | (scenario < 0))[0])
        raise DatasetFormatError("scenario must be a non-negative integer", row=position + 2)
    t = _numeric_column(df, 't')
    columns = {name: _numeric_column(df, name) for name in ('x_l', 'v_l', 'x_f', 'v_f')}
    dss = _numeric_column(df, 'dss', allow_na=True)
    critical_raw = df['critical'].to_numpy()
    bad_flag = ~np.isin(critical_raw, ['0', '1'])
    if bad_flag.any():
        position = int(np.flatnonzero(bad_flag)[0])
        raise DatasetFormatError(
            f"critical must be 0 or 1, got {critical_raw[position]!r}", row=position + 2,
        )
    critical = critical_raw == '1'

    groups = _contiguous_groups(scenario.astype(np.int64))
    series: List[ScenarioSeries] = []
    annotations: List[Tuple[DssSeries, CriticalityReport]] = []
    times: Optional[TimeVector] = None
    for scenario_id, start, stop in groups:
        if times is None:
            if stop - start < 2:
                raise DatasetFormatError(
                    f"scenario {scenario_id} has {stop - start} rows; a series needs at least 2",
                    row=start + 2,
                )
            times = TimeVector(t[start:stop])
        elif stop - start != len(times):
            raise DatasetFormatError(
                f"scenario {scenario_id} has {stop - start} rows, expected {len(times)}",
                row=start + 2,
            )
        elif not np.array_equal(t[start:stop], times.values):
            mismatch = start + int(np.flatnonzero(t[start:stop] != times.values)[0])
            raise DatasetFormatError(
                f"scenario {scenario_id} time grid differs from the first scenario", row=mismatch + 2,
            )

        v_l = columns['v_l'][start:stop]
        v_f = columns['v_f'][start:stop]
        series.append(ScenarioSeries(
            params=None,
            times=times,
            x_leader=columns['x_l'][start:stop],
            v_leader=v_l,
            x_follower=columns['x_f'][start:stop],
            v_follower=v_f,
            diagnostics=SeriesDiagnostics(negative_velocity=bool((v_l < 0).any() or (v_f < 0).any())),
            scenario_id=int(scenario_id),
        ))
        values = tuple(None if np.isnan(v) else float(v) for v in dss[start:stop])
        critical_times = tuple(float(x) for x in times.values[critical[start:stop]])
        annotations.append((
            DssSeries(values=values),
            CriticalityReport(
                critical_times=critical_times,
                first_critical=min(critical_times) if critical_times else None,
                is_critical=bool(critical_times),
            ),
        ))

    # NA/0 everywhere is what an unevaluated dataset writes
    unevaluated = bool(series) and not critical.any() and bool(np.isnan(dss).all())
    return Dataset(
        provenance=Provenance(config=None),
        series=tuple(series),
        annotations=None if unevaluated else tuple(annotations),
    )


def _contiguous_groups(scenario: np.ndarray) -> List[Tuple[int, int, int]]:
    """(id, start, stop) per run of equal scenario ids; a repeated id is an error."""
    groups: List[Tuple[int, int, int]] = []
    seen = set()
    start = 0
    for position in range(1, len(scenario) + 1):
        if position == len(scenario) or scenario[position] != scenario[start]:
            scenario_id = int(scenario[start])
            if scenario_id in seen:
                raise DatasetFormatError(
                    f"scenario {scenario_id} rows are not contiguous", row=start + 2,
                )
            seen.add(scenario_id)
            groups.append((scenario_id, start, position))
            start = position
    return groups


# --- JSON --------------------------------------------------------------------

def _vehicle_to_dict(p: VehicleParams) -> Dict[str, float]:
    return {'x0': p.x0, 'v0': p.v0, 'a0': p.a0, 't_reaction': p.t_reaction}


def _series_to_dict(series: ScenarioSeries) -> Dict[str, Any]:
    params = None
    if series.params is not None:
        params = {
            'leader': _vehicle_to_dict(series.params.leader),
            'follower': _vehicle_to_dict(series.params.follower),
        }
    return {
        'index': series.index,
        'params': params,
        'vehicle_length': series.gap.vehicle_length if series.gap is not None else None,
        'diagnostics': {
            'negative_velocity': series.diagnostics.negative_velocity,
            'initial_overlap': series.diagnostics.initial_overlap,
        },
        'x_leader': series.x_leader.tolist(),
        'v_leader': series.v_leader.tolist(),
        'x_follower': series.x_follower.tolist(),
        'v_follower': series.v_follower.tolist(),
    }


def _annotation_to_dict(annotation: Tuple[DssSeries, CriticalityReport]) -> Dict[str, Any]:
    dss, report = annotation
    return {
        'a_min': dss.a_min,
        'dss': list(dss.values),
        'critical_times': list(report.critical_times),
        'first_critical': report.first_critical,
        'is_critical': report.is_critical,
    }


def dataset_to_json(dataset: Dataset) -> str:
    times = dataset.series[0].times.values.tolist() if dataset.series else None
    for series in dataset.series:
        if series.times.values.tolist() != times:
            raise ValueError("all series of a dataset must share one time grid")
    config = dataset.provenance.config
    payload = {
        'format': JSON_FORMAT_NAME,
        'format_version': JSON_FORMAT_VERSION,
        'provenance': {
            'tool_version': dataset.provenance.tool_version,
            'config': config.to_flat() if config is not None else None,
        },
        'times': times,
        'series': [_series_to_dict(s) for s in dataset.series],
        'annotations': (
            [_annotation_to_dict(a) for a in dataset.annotations]
            if dataset.annotations is not None else None
        ),
    }
    return json.dumps(payload, indent=2, allow_nan=False) + '\n'


def _require(record: Dict[str, Any], key: str, where: str) -> Any:
    if not isinstance(record, dict) or key not in record:
        raise DatasetFormatError(f"{where}: missing field {key!r}")
    return record[key]


def _vehicle_from_dict(record: Dict[str, Any], where: str) -> VehicleParams:
    return VehicleParams(**{k: float(_require(record, k, where)) for k in ('x0', 'v0', 'a0', 't_reaction')})


def dataset_from_json(text: str) -> Dataset:
    """Parse the structured JSON record written by ``dataset_to_json``."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise DatasetFormatError(f"invalid JSON: {e.msg}", row=e.lineno) from e
    if _require(payload, 'format', 'dataset') != JSON_FORMAT_NAME:
        raise DatasetFormatError(f"not a {JSON_FORMAT_NAME} file")
    version = _require(payload, 'format_version', 'dataset')
    if version != JSON_FORMAT_VERSION:
        raise DatasetFormatError(f"unsupported format_version {version!r}")

    provenance_record = _require(payload, 'provenance', 'dataset')
    flat_config = _require(provenance_record, 'config', 'provenance')
    try:
        config = GenerationConfig.from_flat(flat_config) if flat_config is not None else None
    except ConfigError as e:
        raise DatasetFormatError(f"provenance config: {e}") from e
    provenance = Provenance(
        config=config,
        tool_version=str(_require(provenance_record, 'tool_version', 'provenance')),
    )

    records = _require(payload, 'series', 'dataset')
    times = TimeVector(_require(payload, 'times', 'dataset')) if records else None
    series: List[ScenarioSeries] = []
    try:
        for position, record in enumerate(records):
            where = f"series {position}"
            params_record = _require(record, 'params', where)
            params = None
            if params_record is not None:
                params = ScenarioParams(
                    leader=_vehicle_from_dict(_require(params_record, 'leader', where), where),
                    follower=_vehicle_from_dict(_require(params_record, 'follower', where), where),
                    index=int(_require(record, 'index', where)),
                )
            vehicle_length = _require(record, 'vehicle_length', where)
            diagnostics = _require(record, 'diagnostics', where)
            index = _require(record, 'index', where)
            series.append(ScenarioSeries(
                params=params,
                times=times,
                x_leader=_require(record, 'x_leader', where),
                v_leader=_require(record, 'v_leader', where),
                x_follower=_require(record, 'x_follower', where),
                v_follower=_require(record, 'v_follower', where),
                gap=GapParams(float(vehicle_length)) if vehicle_length is not None else None,
                diagnostics=SeriesDiagnostics(
                    negative_velocity=bool(_require(diagnostics, 'negative_velocity', where)),
                    initial_overlap=bool(_require(diagnostics, 'initial_overlap', where)),
                ),
                scenario_id=None if params is not None or index is None else int(index),
            ))

        annotation_records = _require(payload, 'annotations', 'dataset')
        annotations = None
        if annotation_records is not None:
            annotations = []
            for position, record in enumerate(annotation_records):
                where = f"annotation {position}"
                a_min = _require(record, 'a_min', where)
                dss = DssSeries(values=tuple(_require(record, 'dss', where)), a_min=a_min)
                if len(dss) != len(series[position]):
                    raise DatasetFormatError(
                        f"{where}: {len(dss)} DSS values for {len(series[position])} time steps"
                    )
                annotations.append((dss, CriticalityReport(
                    critical_times=tuple(_require(record, 'critical_times', where)),
                    first_critical=_require(record, 'first_critical', where),
                    is_critical=bool(_require(record, 'is_critical', where)),
                )))
        return Dataset(provenance=provenance, series=tuple(series), annotations=annotations)
    except DatasetFormatError:
        raise
    except (TypeError, ValueError, IndexError) as e:
        raise DatasetFormatError(f"inconsistent dataset record: {e}") from e

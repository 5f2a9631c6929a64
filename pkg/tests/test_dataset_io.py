"""Tests for dataset files."""

import json

import numpy as np
import pytest

from src.simulation.dataset import Dataset, Provenance
from src.simulation.pipeline import generate_batch
from src.simulation.safety import BatchEvaluationError, evaluate_batch
from src.simulation.sampling import NormalSpec
from src.simulation.scenario import GenerationConfig
from src.simulation.validation import validation_dataset
from src.utils.dataset_io import (
    CSV_COLUMNS,
    DatasetFormatError,
    dataset_from_csv,
    read_dataset,
    write_dataset,
)

HEADER = ','.join(CSV_COLUMNS)


@pytest.fixture
def evaluated():
    """Evaluated 100-scenario dataset with some non-braking series."""
    cfg = GenerationConfig(n_series=100, seed=42, accel_leader=NormalSpec(-2.0, 3.0))
    return evaluate_batch(generate_batch(cfg), cfg.a_min)


def test_csv_shape(tmp_path):
    """One scenario of 16 points gives a header and 16 rows."""
    path = write_dataset(evaluate_batch(validation_dataset(), 8.829), tmp_path / 'one.csv')
    lines = path.read_text().splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 17
    assert lines[1].startswith('0,0,65,27.78,0,33.33,17.86')


def test_csv_undefined_marker(tmp_path):
    """Undefined DSS is written as the literal NA."""
    cfg = GenerationConfig(n_series=2, accel_leader=NormalSpec(1.0, 0.0))
    dataset = evaluate_batch(generate_batch(cfg), 8.829)
    text = write_dataset(dataset, tmp_path / 'na.csv').read_text()
    rows = [line.split(',') for line in text.splitlines()[1:]]
    assert all(row[6] == 'NA' and row[7] == '0' for row in rows)
    assert 'nan' not in text.lower()


def test_csv_round_trip(evaluated, tmp_path):
    """Numeric fields, ids and flags survive a CSV round trip to 9 significant digits."""
    path = write_dataset(evaluated, tmp_path / 'data.csv')
    loaded = read_dataset(path)
    assert len(loaded) == len(evaluated)
    for original, copy in zip(evaluated.series, loaded.series):
        assert copy.index == original.index
        assert copy.params is None
        np.testing.assert_allclose(copy.times.values, original.times.values, rtol=1e-8, atol=1e-12)
        for name in ('x_leader', 'v_leader', 'x_follower', 'v_follower'):
            np.testing.assert_allclose(getattr(copy, name), getattr(original, name), rtol=1e-8, atol=1e-9)
    for (dss, report), (dss_copy, report_copy) in zip(evaluated.annotations, loaded.annotations):
        assert [v is None for v in dss.values] == [v is None for v in dss_copy.values]
        for a, b in zip(dss.values, dss_copy.values):
            if a is not None:
                assert b == pytest.approx(a, rel=1e-8, abs=1e-9)
        assert report_copy.is_critical == report.is_critical
        assert len(report_copy.critical_times) == len(report.critical_times)


def test_csv_rewrite_is_stable(evaluated, tmp_path):
    """Writing a CSV that was read back gives the same bytes."""
    first = write_dataset(evaluated, tmp_path / 'a.csv')
    second = write_dataset(read_dataset(first), tmp_path / 'b.csv')
    assert first.read_bytes() == second.read_bytes()


def test_csv_selected_ids_preserved(evaluated, tmp_path):
    """Scenario ids of a subset are kept through CSV."""
    subset = evaluated.select([3, 17, 42])
    loaded = read_dataset(write_dataset(subset, tmp_path / 'subset.csv'))
    assert [s.index for s in loaded.series] == [3, 17, 42]


def test_unevaluated_csv(tmp_path):
    """An unevaluated dataset writes NA/0 and reads back without annotations."""
    dataset = generate_batch(GenerationConfig(n_series=2))
    loaded = read_dataset(write_dataset(dataset, tmp_path / 'raw.csv'))
    assert loaded.annotations is None
    assert len(loaded) == 2


def test_all_undefined_evaluated_csv_reads_as_unevaluated(tmp_path):
    """Evaluated non-braking series are indistinguishable from raw ones in CSV."""
    cfg = GenerationConfig(n_series=2, accel_follower=NormalSpec(0.5, 0.0))
    dataset = evaluate_batch(generate_batch(cfg), 8.829)
    loaded = read_dataset(write_dataset(dataset, tmp_path / 'na.csv'))
    assert loaded.annotations is None


def test_partly_defined_csv_keeps_annotations():
    """One defined DSS value is enough to read the file as evaluated."""
    loaded = dataset_from_csv(_csv(
        '0,0,65,27.78,0,33.33,NA,0',
        '0,0.2,70,27.78,6,33.33,16.75,0',
    ))
    assert loaded.annotations is not None
    assert loaded.annotations[0][0].values == (None, 16.75)


def test_csv_series_cannot_be_evaluated(tmp_path):
    """CSV input carries no parameters, so evaluation reports every series."""
    dataset = generate_batch(GenerationConfig(n_series=3))
    loaded = read_dataset(write_dataset(dataset, tmp_path / 'raw.csv'))
    with pytest.raises(BatchEvaluationError) as exc_info:
        evaluate_batch(loaded, 8.829)
    assert sorted(exc_info.value.failures) == [0, 1, 2]


def test_json_round_trip_exact(evaluated, tmp_path):
    """JSON reads back equal to the in-memory dataset."""
    loaded = read_dataset(write_dataset(evaluated, tmp_path / 'data.json'))
    assert loaded == evaluated
    assert loaded.provenance.config == evaluated.provenance.config


def test_json_round_trip_unevaluated(tmp_path):
    """Unevaluated datasets keep annotations = None through JSON."""
    dataset = generate_batch(GenerationConfig(n_series=5, seed=3))
    loaded = read_dataset(write_dataset(dataset, tmp_path / 'raw.json'))
    assert loaded == dataset
    assert loaded.annotations is None


def test_json_null_for_undefined(tmp_path):
    """Undefined DSS is null in JSON."""
    cfg = GenerationConfig(n_series=1, accel_follower=NormalSpec(0.5, 0.0))
    dataset = evaluate_batch(generate_batch(cfg), 8.829)
    payload = json.loads(write_dataset(dataset, tmp_path / 'na.json').read_text())
    assert payload['annotations'][0]['dss'] == [None] * 16
    assert payload['provenance']['config']['seed'] == 0


def test_serialization_deterministic(evaluated, tmp_path):
    """The same dataset always gives byte-identical files."""
    for suffix in ('.csv', '.json'):
        a = write_dataset(evaluated, tmp_path / f'a{suffix}')
        b = write_dataset(evaluated, tmp_path / f'b{suffix}')
        assert a.read_bytes() == b.read_bytes()


def test_generate_twice_byte_identical(tmp_path):
    """Generating with the same seed twice gives identical files."""
    cfg = GenerationConfig(n_series=50, seed=99)
    a = write_dataset(generate_batch(cfg), tmp_path / 'a.json')
    b = write_dataset(generate_batch(cfg, parallel=True, max_workers=3), tmp_path / 'b.json')
    assert a.read_bytes() == b.read_bytes()


def test_empty_dataset_csv(tmp_path):
    """An empty dataset is just the header."""
    path = write_dataset(Dataset(provenance=Provenance(), annotations=()), tmp_path / 'empty.csv')
    assert path.read_text() == HEADER + '\n'
    assert len(read_dataset(path)) == 0


def test_unsupported_extension(tmp_path):
    """Only .csv and .json are accepted."""
    with pytest.raises(DatasetFormatError):
        write_dataset(validation_dataset(), tmp_path / 'data.parquet')


def _csv(*rows):
    return '\n'.join((HEADER,) + rows) + '\n'


GOOD_ROWS = (
    '0,0,65,27.78,0,33.33,17.86,0',
    '0,0.2,70.5,27.78,6.6,33.33,16.75,0',
)


def test_read_minimal_csv():
    """A hand-written two-point CSV parses into one series."""
    dataset = dataset_from_csv(_csv(*GOOD_ROWS))
    assert len(dataset) == 1
    assert dataset.series[0].x_leader.tolist() == [65.0, 70.5]
    assert dataset.annotations[0][0].values == (17.86, 16.75)


@pytest.mark.parametrize('rows, row', [
    ((GOOD_ROWS[0], '0,0.2,abc,27.78,6.6,33.33,16.75,0'), 3),
    ((GOOD_ROWS[0], '0,0.2,70.5,27.78,6.6,33.33,16.75,2'), 3),
    ((GOOD_ROWS[0], '0,0.2,70.5,27.78'), 3),
    (('0,0,65,27.78,0,33.33,NaN,0', GOOD_ROWS[1]), 2),
    ((GOOD_ROWS[0], '0,0.2,70.5,27.78,6.6,33.33,,0'), 3),
])
def test_malformed_rows_report_row_number(rows, row):
    """Bad cells are reported with their file line."""
    with pytest.raises(DatasetFormatError) as exc_info:
        dataset_from_csv(_csv(*rows))
    assert exc_info.value.row == row


def test_wrong_header_rejected():
    """The header must match exactly."""
    with pytest.raises(DatasetFormatError) as exc_info:
        dataset_from_csv('scenario,t,x,v\n0,0,1,2\n')
    assert exc_info.value.row == 1


def test_too_many_fields_rejected():
    """Rows with extra fields are malformed."""
    with pytest.raises(DatasetFormatError):
        dataset_from_csv(_csv(GOOD_ROWS[0], GOOD_ROWS[1] + ',9'))


def test_misaligned_series_rejected():
    """Every scenario must have as many rows as the first."""
    rows = GOOD_ROWS + ('1,0,65,27.78,0,33.33,17.86,0',)
    with pytest.raises(DatasetFormatError) as exc_info:
        dataset_from_csv(_csv(*rows))
    assert exc_info.value.row == 4
    assert 'expected 2' in str(exc_info.value)


def test_non_contiguous_scenario_rejected():
    """Rows of one scenario must be contiguous."""
    rows = (
        GOOD_ROWS[0], GOOD_ROWS[1],
        '1,0,65,27.78,0,33.33,17.86,0', '1,0.2,70.5,27.78,6.6,33.33,16.75,0',
        GOOD_ROWS[0], GOOD_ROWS[1],
    )
    with pytest.raises(DatasetFormatError):
        dataset_from_csv(_csv(*rows))


def test_malformed_json(tmp_path):
    """Broken or foreign JSON is rejected."""
    path = tmp_path / 'bad.json'
    path.write_text('{"format": "something-else"}')
    with pytest.raises(DatasetFormatError):
        read_dataset(path)
    path.write_text('{not json')
    with pytest.raises(DatasetFormatError):
        read_dataset(path)

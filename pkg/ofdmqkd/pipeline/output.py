import csv
import io
import logging
from typing import Any, Dict, Iterable, List, Optional

from ofdmqkd.exceptions import OutputError
from ofdmqkd.models.enums import OutputFormat
from ofdmqkd.pipeline.studies import SweepResult
from ofdmqkd.pipeline.sweep import SweepSpec
from ofdmqkd.utils.format import custom_json_dumps
from ofdmqkd.version import __version__

LOG = logging.getLogger('ofdmqkd.pipeline')


def format_cell(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(columns: List[str], rows: Iterable[Dict[str, Any]]) -> str:
    buffer = io.StringIO(newline='')
    writer = csv.writer(buffer, lineterminator='\r\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(c)) for c in columns])
    return buffer.getvalue()


def to_json(result: SweepResult) -> str:
    return custom_json_dumps(result.serialize, indent=2) + '\n'


def manifest(spec: SweepSpec, result: SweepResult, settings: Dict[str, Any] = None) -> Dict[str, Any]:
    """Everything needed to regenerate an output file. Holds no wall-clock data."""
    settings = settings or {}
    return {
        'schemaVersion': settings.get('OUTPUT_SCHEMA_VERSION', 1),
        'version': __version__,
        'runId': spec.run_id,
        'study': spec.study.value,
        'config': spec.serialize,
        'backend': result.backend.value if result.backend else None,
        'seed': spec.seed,
        'tuples': spec.modulator.tuples.value,
        'distinctness': spec.modulator.distinctness.value,
        'mixingVariance': spec.modulator.mixing_variance.value,
        'moments': spec.constellation.moments()._asdict(),
        'assumptions': spec.assumptions,
        'columns': result.columns,
        'rows': len(result.rows),
        'optimalN': result.serialize['optimalN'],
        'nullKeyN': result.serialize['nullKeyN']
    }


def render(result: SweepResult, fmt: OutputFormat) -> str:
    if fmt == OutputFormat.JSON:
        return to_json(result)
    return to_csv(result.columns, result.rows)


def _write(path: str, text: str) -> None:
    try:
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
    except OSError as e:
        raise OutputError(f'could not write {path}', errors=[str(e)])


def write_result(spec: SweepSpec, result: SweepResult, path: Optional[str] = None,
                 settings: Dict[str, Any] = None) -> Optional[str]:
    """Write the result and its manifest; returns the text instead when no path is given."""
    path = path or spec.output_path
    text = render(result, spec.output_format)
    if not path:
        return text

    _write(path, text)
    _write(f'{path}.manifest.json', custom_json_dumps(manifest(spec, result, settings), indent=2) + '\n')
    LOG.info('Wrote %d %s rows to %s', len(result.rows), spec.output_format.value, path)
    return None

"""Чтение и запись наборов интервалов (CSV) и файлов экспериментов"""
import csv
import logging
from pathlib import Path
from typing import Dict, Optional, Union

from dotenv import dotenv_values

from ..core.errors import DatasetParseError, InvalidInputError
from ..core.interval import Interval, Sample
from ..services.simulation import Contamination, ExperimentSpec, IntervalDistribution, Law
from ..utils.validators import validate_decimal

logger = logging.getLogger(__name__)

HEADERS = ('inf,sup', 'mid,spr')

SPEC_KEYS = {
    'mid_law', 'spr_law', 'contamination.fraction', 'contamination.mid_shift',
    'contamination.spr_shift', 'theta', 'sample_sizes', 'replications', 'seed',
    'tol', 'max_iter', 'workers',
}

PathLike = Union[str, Path]


def parse_dataset(text: str) -> Sample:
    """Разбор CSV: заголовок `inf,sup` или `mid,spr`, строки из двух чисел"""
    fmt = None
    items = []
    # splitlines() понимает и LF, и CRLF
    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        if fmt is None:
            # заголовок сравнивается с исходной строкой, без пробелов
            if line not in HEADERS:
                raise DatasetParseError(f"header must be exactly 'inf,sup' or 'mid,spr', got {line!r}", line_number)
            fmt = line
            continue
        fields = next(csv.reader([stripped]))
        if len(fields) != 2:
            raise DatasetParseError(f"expected 2 fields, got {len(fields)}", line_number)
        if not all(validate_decimal(f) for f in fields):
            raise DatasetParseError(f"fields must be finite decimal numbers: {stripped!r}", line_number)
        a, b = (float(f) for f in fields)
        try:
            items.append(Interval(a, b) if fmt == 'inf,sup' else Interval.from_mid_spr(a, b))
        except InvalidInputError as e:
            raise DatasetParseError(str(e), line_number) from e
        except ArithmeticError as e:
            raise DatasetParseError(f"endpoint overflow: {e}", line_number) from e

    if fmt is None:
        raise DatasetParseError("missing header", 1)
    if not items:
        raise DatasetParseError("dataset contains no rows", line_number)
    return Sample(items)


def read_dataset(path: PathLike) -> Sample:
    """Прочитать набор интервалов из файла"""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except UnicodeDecodeError as e:
        raise DatasetParseError(f"file is not valid UTF-8: {e}", 1) from e
    sample = parse_dataset(text)
    logger.info(f"Dataset loaded: {path} ({len(sample)} intervals)")
    return sample


def write_dataset(sample: Sample, path: PathLike, fmt: str = 'inf,sup'):
    """Записать набор в формате `inf,sup` или `mid,spr`"""
    if fmt == 'inf,sup':
        columns = (sample.infs, sample.sups)
    elif fmt == 'mid,spr':
        columns = (sample.mids, sample.sprs)
    else:
        raise InvalidInputError(f"Unknown dataset format: {fmt!r}")
    lines = [fmt] + [f"{a!r},{b!r}" for a, b in zip(columns[0].tolist(), columns[1].tolist())]
    Path(path).write_text('\n'.join(lines) + '\n', encoding='utf-8')


def _number(values: Dict[str, Optional[str]], key: str, cast=float, default=None):
    raw = values.get(key)
    if raw is None or raw.strip() == '':
        if default is None:
            raise InvalidInputError(f"Spec file is missing required key '{key}'")
        return default
    try:
        return cast(raw.strip())
    except ValueError:
        raise InvalidInputError(f"Spec key '{key}' has an invalid value: {raw!r}")


def read_spec_file(path: PathLike, seed_override: Optional[int] = None,
                   workers_override: Optional[int] = None) -> ExperimentSpec:
    """Плоский key=value файл эксперимента -> ExperimentSpec"""
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"Spec file not found: {path}")
    values = dotenv_values(path, interpolate=False)

    unknown = set(values) - SPEC_KEYS
    if unknown:
        raise InvalidInputError(f"Unknown spec keys: {', '.join(sorted(unknown))}")

    for key in ('mid_law', 'spr_law', 'sample_sizes'):
        if not values.get(key):
            raise InvalidInputError(f"Spec file is missing required key '{key}'")

    contamination = None
    if any(key.startswith('contamination.') for key in values):
        contamination = Contamination(
            fraction=_number(values, 'contamination.fraction'),
            mid_shift=_number(values, 'contamination.mid_shift', default=0.0),
            spr_shift=_number(values, 'contamination.spr_shift', default=0.0),
        )

    distribution = IntervalDistribution(
        mid_law=Law.parse(values['mid_law']),
        spr_law=Law.parse(values['spr_law']),
        contamination=contamination,
    )
    try:
        sizes = tuple(int(token) for token in values['sample_sizes'].split(',') if token.strip())
    except ValueError:
        raise InvalidInputError(f"sample_sizes must be a comma-separated list of integers: {values['sample_sizes']!r}")

    seed = seed_override if seed_override is not None else _number(values, 'seed', int)
    defaults = ExperimentSpec.__dataclass_fields__
    spec = ExperimentSpec(
        distribution=distribution,
        theta=_number(values, 'theta', default=defaults['theta'].default),
        sample_sizes=sizes,
        replications=_number(values, 'replications', int),
        seed=seed,
        tol=_number(values, 'tol', default=defaults['tol'].default),
        max_iter=_number(values, 'max_iter', int, default=defaults['max_iter'].default),
        workers=workers_override or _number(values, 'workers', int, default=defaults['workers'].default),
    )
    logger.info(f"Spec loaded: {path} (seed={spec.seed}, sizes={spec.sample_sizes})")
    return spec

import argparse
import logging
import logging.config
import os
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

from config.settings import EXIT_CODES, LOGGING_CONFIG, SEED_ENV_VAR, SOLVER_CONFIG, TOOL_NAME, TOOL_VERSION
from .core.errors import DatasetParseError, InvalidInputError, InvalidParameterError, NumericFailureError
from .core.interval import ThetaConfig
from .database.datasets import read_dataset, read_spec_file
from .services.estimators import dtheta_median
from .services.report_gen import report_generator
from .services.simulation import breakdown_experiment, consistency_experiment
from .utils.formatters import format_estimate, format_truth
from .utils.validators import validate_ascending, validate_finite, validate_seed

logger = logging.getLogger(__name__)


class UsageError(Exception):
    """Ошибка использования (код 64)"""


class CommandParser(argparse.ArgumentParser):
    """argparse с кодом 64 для ошибок использования"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CODES['usage_error'], f"{self.prog}: error: {message}\n")


def setup_logging(verbose: bool = False):
    """Настройка логирования из LOGGING_CONFIG"""
    logging.config.dictConfig(LOGGING_CONFIG)
    if verbose:
        for handler in logging.getLogger('interval_median').handlers:
            if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
                handler.setLevel(logging.INFO)


def _float_list(text: str) -> List[float]:
    try:
        return [float(token) for token in text.split(',') if token.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(token) for token in text.split(',') if token.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _solver_config(args) -> ThetaConfig:
    try:
        return ThetaConfig(theta=args.theta, tol=args.tol, max_iter=args.max_iter)
    except InvalidParameterError as e:
        raise UsageError(str(e)) from e


def _emit(text: str, output: Optional[str]):
    if output:
        Path(output).write_text(text, encoding='utf-8')
        logger.info(f"Output written: {output}")
    else:
        sys.stdout.write(text)


class IntervalMedianCLI:
    """Команды estimate / simulate / breakdown"""

    def __init__(self):
        self.reports = report_generator

    def estimate(self, args) -> int:
        """Среднее Ауманна и d_θ-медиана набора"""
        cfg = _solver_config(args)
        sample = read_dataset(args.input)
        report = dtheta_median(sample, cfg)
        if not report.unique:
            logger.warning("Median may be non-unique: transformed points are collinear (unique=false)")

        document = self.reports.estimate_document(sample, report, cfg, source=str(args.input))
        logger.info(format_estimate(document))
        if args.format == 'json':
            _emit(self.reports.to_json(document), args.output)
        else:
            table = self.reports.estimate_table(document)
            _emit(self.reports.to_csv(table, self.reports.metadata(document)), args.output)
        return EXIT_CODES['ok']

    def simulate(self, args) -> int:
        """Эксперимент Монте-Карло на состоятельность"""
        seed = args.seed
        if seed is None and os.environ.get(SEED_ENV_VAR):
            try:
                seed = int(os.environ[SEED_ENV_VAR])
            except ValueError:
                raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {os.environ[SEED_ENV_VAR]!r}")
        if seed is not None and not validate_seed(seed):
            raise UsageError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if args.workers is not None and args.workers < 1:
            raise UsageError(f"--workers must be >= 1, got {args.workers}")

        try:
            spec = read_spec_file(args.spec, seed_override=seed, workers_override=args.workers)
        except (InvalidInputError, InvalidParameterError) as e:
            raise UsageError(f"invalid spec file: {e}") from e

        result = consistency_experiment(spec)
        document = self.reports.simulation_document(result)
        summary_json = self.reports.to_json(document)

        if args.output:
            out_dir = Path(args.output)
            out_dir.mkdir(parents=True, exist_ok=True)
            rows_csv = self.reports.to_csv(result.rows, self.reports.metadata(document))
            (out_dir / 'rows.csv').write_text(rows_csv, encoding='utf-8')
            (out_dir / 'summary.json').write_text(summary_json, encoding='utf-8')
            logger.info(f"Simulation written to {out_dir}")

        print(format_truth(result.truth, result.truth_provenance), file=sys.stderr)
        sys.stdout.write(summary_json)
        return EXIT_CODES['ok']

    def breakdown(self, args) -> int:
        """Таблица сдвигов при засорении последних k наблюдений"""
        cfg = _solver_config(args)
        magnitudes = args.magnitudes
        if not magnitudes or not all(validate_finite(m) and m > 0 for m in magnitudes) or not validate_ascending(magnitudes):
            raise UsageError(f"--magnitudes must be finite, positive and strictly ascending, got {args.magnitudes}")
        if not args.k or any(k < 0 for k in args.k):
            raise UsageError(f"--k must list nonnegative integers, got {args.k}")

        sample = read_dataset(args.input)
        n = len(sample)
        too_many = [k for k in args.k if k > n]
        if too_many:
            raise UsageError(f"k={too_many[0]} exceeds the sample size n={n}")

        table = pd.concat(
            [breakdown_experiment(sample, cfg, args.magnitudes, k) for k in args.k],
            ignore_index=True,
        )
        document = self.reports.breakdown_document(table, n, cfg, source=str(args.input))
        print(f"fsbp(n={n}) = {document['fsbp']['text']}", file=sys.stderr)
        if args.format == 'json':
            _emit(self.reports.to_json(document), args.output)
        else:
            _emit(self.reports.to_csv(table, self.reports.metadata(document)), args.output)
        return EXIT_CODES['ok']


def _add_solver_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--theta', type=float, default=SOLVER_CONFIG['theta'], help='вес разброса θ > 0')
    parser.add_argument('--tol', type=float, default=SOLVER_CONFIG['tol'], help='порог сходимости шага')
    parser.add_argument('--max-iter', type=int, default=SOLVER_CONFIG['max_iter'], help='максимум итераций')


def build_parser(cli: IntervalMedianCLI) -> CommandParser:
    parser = CommandParser(prog=TOOL_NAME, description='Робастное положение для интервальных данных (d_θ-медиана)')
    parser.add_argument('--version', action='version', version=f"{TOOL_NAME} {TOOL_VERSION}")
    parser.add_argument('-v', '--verbose', action='store_true', help='подробный лог в stderr')
    commands = parser.add_subparsers(dest='command', required=True)

    estimate = commands.add_parser('estimate', help='оценки среднего и медианы по CSV')
    estimate.add_argument('input', help='CSV с заголовком inf,sup или mid,spr')
    _add_solver_flags(estimate)
    estimate.add_argument('--format', choices=('json', 'csv'), default='json')
    estimate.add_argument('--output', help='файл отчета (по умолчанию stdout)')
    estimate.set_defaults(handler=cli.estimate)

    simulate = commands.add_parser('simulate', help='эксперимент Монте-Карло на состоятельность')
    simulate.add_argument('spec', help='файл эксперимента key=value')
    simulate.add_argument('--output', help='каталог для rows.csv и summary.json')
    simulate.add_argument('--seed', type=int, help=f'seed (важнее {SEED_ENV_VAR} и файла)')
    simulate.add_argument('--workers', type=int, help='число потоков для повторов')
    simulate.set_defaults(handler=cli.simulate)

    breakdown = commands.add_parser('breakdown', help='эмпирическая точка срыва')
    breakdown.add_argument('input', help='CSV с заголовком inf,sup или mid,spr')
    _add_solver_flags(breakdown)
    breakdown.add_argument('--magnitudes', type=_float_list, required=True, help='например 1e4,1e8')
    breakdown.add_argument('--k', type=_int_list, required=True, help='например 0,1,2,3')
    breakdown.add_argument('--format', choices=('json', 'csv'), default='csv')
    breakdown.add_argument('--output', help='файл таблицы (по умолчанию stdout)')
    breakdown.set_defaults(handler=cli.breakdown)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Точка входа CLI; возвращает код выхода"""
    cli = IntervalMedianCLI()
    parser = build_parser(cli)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help, --version и ошибки разбора аргументов
        return int(e.code or 0)
    setup_logging(args.verbose)
    logger.info(f"Command: {args.command}")

    try:
        return args.handler(args)
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        return EXIT_CODES['usage_error']
    except InvalidParameterError as e:
        logger.error(f"Invalid parameter: {e}")
        return EXIT_CODES['usage_error']
    except DatasetParseError as e:
        logger.error(f"Parse error: {e}")
        return EXIT_CODES['data_error']
    except (InvalidInputError, NumericFailureError, OSError) as e:
        logger.error(f"Data error: {e}")
        return EXIT_CODES['data_error']


def run():
    sys.exit(main())


if __name__ == '__main__':
    run()

# interval_median/services/report_gen.py
import io
import json
from typing import Optional

import pandas as pd

from config.settings import TOOL_NAME, TOOL_VERSION
from ..core.interval import Interval, Sample, ThetaConfig
from ..utils.formatters import format_fraction
from .estimators import EstimateReport, aumann_mean, fsbp, objective
from .simulation import ExperimentResult


def _interval_fields(K: Interval) -> dict:
    return {'inf': K.inf, 'sup': K.sup, 'mid': K.mid, 'spr': K.spr}


def _fsbp_fields(n: int) -> dict:
    value = fsbp(n)
    return {'value': float(value), 'fraction': f"{value.numerator}/{value.denominator}", 'text': format_fraction(value)}


class ReportGenerator:
    """Самоописывающие документы для вывода CLI"""

    def __init__(self, tool: str = TOOL_NAME, version: str = TOOL_VERSION):
        self.tool = tool
        self.version = version

    def _header(self, cfg: ThetaConfig, seed: Optional[int] = None) -> dict:
        return {
            'tool': {'name': self.tool, 'version': self.version},
            'params': {'theta': cfg.theta, 'tol': cfg.tol, 'max_iter': cfg.max_iter, 'seed': seed},
        }

    def estimate_document(self, sample: Sample, report: EstimateReport, cfg: ThetaConfig, source: str = '') -> dict:
        """Документ команды estimate: среднее и медиана"""
        mean = aumann_mean(sample)
        document = self._header(cfg)
        document.update({
            'input': source,
            'n': len(sample),
            'fsbp': _fsbp_fields(len(sample)),
            'mean': {**_interval_fields(mean), 'objective': objective(sample, mean, cfg.theta)},
            'median': {
                **_interval_fields(report.estimate),
                'objective': report.objective,
                'iterations': report.iterations,
                'converged': report.converged,
                'unique': report.unique,
                'final_step': report.final_step,
            },
        })
        return document

    def breakdown_document(self, rows: pd.DataFrame, n: int, cfg: ThetaConfig, source: str = '') -> dict:
        document = self._header(cfg)
        document.update({
            'input': source,
            'n': n,
            'fsbp': _fsbp_fields(n),
            'rows': rows.to_dict(orient='records'),
        })
        return document

    def simulation_document(self, result: ExperimentResult) -> dict:
        """JSON-сводка эксперимента Монте-Карло"""
        spec = result.spec
        document = self._header(spec.solver, seed=spec.seed)
        contamination = spec.distribution.contamination
        document.update({
            'distribution': {
                'mid_law': str(spec.distribution.mid_law),
                'spr_law': str(spec.distribution.spr_law),
                'contamination': None if contamination is None else {
                    'fraction': contamination.fraction,
                    'mid_shift': contamination.mid_shift,
                    'spr_shift': contamination.spr_shift,
                },
            },
            'sample_sizes': list(spec.sample_sizes),
            'replications': spec.replications,
            'truth': _interval_fields(result.truth),
            'truth_provenance': str(result.truth_provenance),
            'summary': result.summary.to_dict(orient='records'),
        })
        return document

    @staticmethod
    def to_json(document: dict) -> str:
        # repr float в json -- кратчайшая обратимая запись
        return json.dumps(document, indent=2, ensure_ascii=False, default=_plain) + '\n'

    def to_csv(self, table: pd.DataFrame, metadata: dict) -> str:
        """Таблица с метаданными в строках-комментариях `# key=value`"""
        buffer = io.StringIO()
        for key, value in metadata.items():
            buffer.write(f"# {key}={value}\n")
        table.to_csv(buffer, index=False, lineterminator='\n', float_format=lambda v: repr(float(v)))
        return buffer.getvalue()

    def estimate_table(self, document: dict) -> pd.DataFrame:
        columns = ['estimator', 'inf', 'sup', 'mid', 'spr', 'objective', 'iterations', 'converged', 'unique', 'final_step']
        mean = {'estimator': 'aumann_mean', **document['mean']}
        median = {'estimator': 'dtheta_median', **document['median']}
        table = pd.DataFrame([mean, median], columns=columns)
        table['iterations'] = table['iterations'].astype('Int64')
        return table

    def metadata(self, document: dict) -> dict:
        params = document['params']
        metadata = {
            'tool': document['tool']['name'],
            'version': document['tool']['version'],
            'theta': repr(params['theta']),
            'tol': repr(params['tol']),
            'max_iter': params['max_iter'],
            'seed': params['seed'],
        }
        if 'n' in document:
            metadata['n'] = document['n']
        if 'fsbp' in document:
            metadata['fsbp'] = document['fsbp']['text']
        return metadata


def _plain(value):
    """numpy-скаляры -> встроенные типы для json"""
    if hasattr(value, 'item'):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


report_generator = ReportGenerator()

import logging
import math
import numbers
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import cachetools.keys
import numpy as np
import pandas as pd

from config.settings import SIMULATION_CONFIG, SOLVER_CONFIG
from ..core.errors import InvalidInputError, InvalidParameterError, NumericFailureError
from ..core.interval import Interval, Sample, ThetaConfig, d_theta
from ..database.cache import cache_manager
from ..utils.validators import (
    validate_ascending, validate_finite, validate_positive_int, validate_seed, validate_theta,
)
from .estimators import aumann_mean, dtheta_median

logger = logging.getLogger(__name__)

# Законы распределения: имя -> число параметров
MID_LAWS = {'normal': 2, 'uniform': 2, 'cauchy': 2}
SPR_LAWS = {'uniform': 2, 'half_normal': 1, 'lognormal': 2}

LAW_PATTERN = re.compile(r'^\s*([a-z_]+)\s*\(([^()]*)\)\s*$')


@dataclass(frozen=True)
class Law:
    """Одномерный закон для mid или spr"""

    kind: str
    params: Tuple[float, ...]

    @classmethod
    def parse(cls, text: str) -> 'Law':
        """Разбор записи вида `normal(0, 1)`"""
        match = LAW_PATTERN.match(text)
        if not match:
            raise InvalidInputError(f"Cannot parse distribution law: {text!r}")
        kind, args = match.groups()
        try:
            params = tuple(float(arg) for arg in args.split(',')) if args.strip() else ()
        except ValueError:
            raise InvalidInputError(f"Non-numeric parameter in distribution law: {text!r}")
        return cls(kind, params)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        a = self.params[0]
        if self.kind == 'normal':
            return rng.normal(a, self.params[1], size)
        if self.kind == 'uniform':
            return rng.uniform(a, self.params[1], size)
        if self.kind == 'cauchy':
            return a + self.params[1] * rng.standard_cauchy(size)
        if self.kind == 'half_normal':
            return np.abs(rng.normal(0.0, a, size))
        if self.kind == 'lognormal':
            return rng.lognormal(a, self.params[1], size)
        raise InvalidInputError(f"Unknown distribution law: {self.kind}")

    @property
    def symmetry_center(self) -> Optional[float]:
        """Центр симметрии закона или None"""
        if self.kind in ('normal', 'cauchy'):
            return self.params[0]
        if self.kind == 'uniform':
            return (self.params[0] + self.params[1]) / 2
        if self.kind == 'half_normal' and self.params[0] == 0:
            return 0.0
        if self.kind == 'lognormal' and self.params[1] == 0:
            return math.exp(self.params[0])
        return None

    def __str__(self) -> str:
        return f"{self.kind}({', '.join(repr(p) for p in self.params)})"


@dataclass(frozen=True)
class Contamination:
    """Доля ε наблюдений, сдвинутых на (Δm, Δs)"""

    fraction: float
    mid_shift: float = 0.0
    spr_shift: float = 0.0

    def __post_init__(self):
        if not (validate_finite(self.fraction) and 0 <= self.fraction < 1):
            raise InvalidInputError(f"Contamination fraction must lie in [0, 1), got {self.fraction!r}")
        if not validate_finite(self.mid_shift):
            raise InvalidInputError(f"Contamination mid_shift must be finite, got {self.mid_shift!r}")
        if not (validate_finite(self.spr_shift) and self.spr_shift >= 0):
            raise InvalidInputError(f"Contamination spr_shift must be finite and >= 0, got {self.spr_shift!r}")


def _validate_law(law: Law, registry: dict, role: str):
    if law.kind not in registry:
        raise InvalidInputError(f"{role} law must be one of {sorted(registry)}, got {law.kind!r}")
    if len(law.params) != registry[law.kind]:
        raise InvalidInputError(f"{role} law {law.kind} takes {registry[law.kind]} parameter(s), got {len(law.params)}")
    if not all(validate_finite(p) for p in law.params):
        raise InvalidInputError(f"{role} law parameters must be finite: {law}")
    kind, p = law.kind, law.params
    if kind in ('normal', 'cauchy', 'lognormal') and p[1] < 0:
        raise InvalidInputError(f"{role} law {law} has a negative scale")
    if kind == 'uniform' and p[0] > p[1]:
        raise InvalidInputError(f"{role} law {law} requires a <= b")
    if kind == 'half_normal' and p[0] < 0:
        raise InvalidInputError(f"{role} law {law} has a negative scale")
    if role == 'spr' and kind == 'uniform' and p[0] < 0:
        raise InvalidInputError(f"spr law {law} must be supported on [0, inf)")


@dataclass(frozen=True)
class IntervalDistribution:
    """Случайный интервал: независимые законы mid и spr плюс засорение"""

    mid_law: Law
    spr_law: Law
    contamination: Optional[Contamination] = None

    def __post_init__(self):
        _validate_law(self.mid_law, MID_LAWS, 'mid')
        _validate_law(self.spr_law, SPR_LAWS, 'spr')

    @property
    def is_clean(self) -> bool:
        return self.contamination is None or self.contamination.fraction == 0


@dataclass(frozen=True)
class ExperimentSpec:
    """Декларативная конфигурация эксперимента Монте-Карло"""

    distribution: IntervalDistribution
    theta: float = SOLVER_CONFIG['theta']
    sample_sizes: Tuple[int, ...] = (100, 1000, 10000)
    replications: int = 200
    seed: int = 0
    tol: float = SOLVER_CONFIG['tol']
    max_iter: int = SOLVER_CONFIG['max_iter']
    workers: int = SIMULATION_CONFIG['max_workers']

    def __post_init__(self):
        if not validate_theta(self.theta):
            raise InvalidParameterError(f"theta must be a finite positive number, got {self.theta!r}")
        sizes = tuple(self.sample_sizes)
        if not sizes or not all(validate_positive_int(n) for n in sizes):
            raise InvalidInputError(f"sample_sizes must be positive integers, got {self.sample_sizes!r}")
        if not validate_ascending(sizes):
            raise InvalidInputError(f"sample_sizes must be strictly ascending, got {sizes}")
        object.__setattr__(self, 'sample_sizes', tuple(int(n) for n in sizes))
        if not validate_positive_int(self.replications):
            raise InvalidInputError(f"replications must be >= 1, got {self.replications!r}")
        if not validate_seed(self.seed):
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not validate_positive_int(self.workers):
            raise InvalidInputError(f"workers must be >= 1, got {self.workers!r}")

    @property
    def solver(self) -> ThetaConfig:
        return ThetaConfig(self.theta, self.tol, self.max_iter)


@dataclass(frozen=True)
class TruthProvenance:
    """Откуда взята эталонная медиана"""

    kind: str  # 'symmetry' | 'large_sample'
    size: Optional[int] = None

    def __str__(self) -> str:
        return self.kind if self.size is None else f"{self.kind}({self.size})"


@dataclass(eq=False)
class ExperimentResult:
    """Строки (n, повтор, ошибка) и сводка по n"""

    spec: ExperimentSpec
    truth: Interval
    truth_provenance: TruthProvenance
    rows: pd.DataFrame = field(repr=False)

    @property
    def summary(self) -> pd.DataFrame:
        """Сводка пересчитывается из строк"""
        grouped = self.rows.groupby('n', sort=True)
        summary = pd.DataFrame({
            'mean': grouped['error'].mean(),
            'median': grouped['error'].median(),
            'q90': grouped['error'].quantile(0.9),
            'mean_error_median': grouped['mean_error'].median(),
            'replications': grouped['error'].size(),
        })
        return summary.reset_index()


def substream(seed: int, n: int, replication: int) -> np.random.Generator:
    """Независимый поток PCG64 для пары (n, повтор)"""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(n, replication))
    return np.random.Generator(np.random.PCG64(sequence))


def sample_intervals(dist: IntervalDistribution, n: int, stream: np.random.Generator) -> Sample:
    """n независимых интервалов; с вероятностью ε наблюдение засоряется"""
    if not validate_positive_int(n):
        raise InvalidInputError(f"Sample size must be a positive integer, got {n!r}")
    mids = dist.mid_law.sample(stream, n)
    sprs = dist.spr_law.sample(stream, n)
    if dist.contamination is not None:
        hit = stream.random(n) < dist.contamination.fraction
        mids = np.where(hit, mids + dist.contamination.mid_shift, mids)
        sprs = np.where(hit, sprs + dist.contamination.spr_shift, sprs)
    return Sample.from_mid_spr(mids, sprs)


def _truth_key(dist, theta, seed=None, size=None):
    return cachetools.keys.hashkey(dist, float(theta), seed, size)


@cache_manager.memoize('truth', key=_truth_key)
def population_median_truth(dist: IntervalDistribution, theta: float, seed: Optional[int] = None,
                            size: Optional[int] = None) -> Tuple[Interval, TruthProvenance]:
    """Эталонная d_θ-медиана: по симметрии или по большой выборке"""
    if not dist.is_clean:
        raise InvalidInputError("Population median truth is defined for uncontaminated models only")
    if not validate_theta(theta):
        raise InvalidParameterError(f"theta must be a finite positive number, got {theta!r}")

    c_m = dist.mid_law.symmetry_center
    c_s = dist.spr_law.symmetry_center
    if c_m is not None and c_s is not None:
        truth = Interval.from_mid_spr(c_m, c_s)
        logger.info(f"Truth by symmetry: {truth}")
        return truth, TruthProvenance('symmetry')

    size = size or SIMULATION_CONFIG['large_sample_size']
    seed = SIMULATION_CONFIG['truth_seed'] if seed is None else seed
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    logger.info(f"Truth by large-sample plug-in, N={size}, seed={seed}")
    report = dtheta_median(sample_intervals(dist, size, rng), ThetaConfig(theta=theta))
    return report.estimate, TruthProvenance('large_sample', size)


def _replicate(spec: ExperimentSpec, truth: Interval, n: int, replication: int) -> dict:
    sample = sample_intervals(spec.distribution, n, substream(spec.seed, n, replication))
    try:
        report = dtheta_median(sample, spec.solver)
    except NumericFailureError as e:
        raise e.with_context(n, replication) from e
    return {
        'n': n,
        'replication': replication,
        'error': d_theta(report.estimate, truth, spec.theta),
        'mean_error': d_theta(aumann_mean(sample), truth, spec.theta),
        'iterations': report.iterations,
        'converged': report.converged,
    }


def consistency_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Ошибка d_θ(оценка, эталон) по размерам выборки и повторам"""
    # засоренная модель сравнивается с медианой чистой модели
    truth, provenance = population_median_truth(replace(spec.distribution, contamination=None), spec.theta)
    tasks = [(n, r) for n in spec.sample_sizes for r in range(spec.replications)]
    logger.info(f"Consistency experiment: {len(tasks)} runs, truth {truth} ({provenance}), workers={spec.workers}")

    if spec.workers == 1:
        records = [_replicate(spec, truth, n, r) for n, r in tasks]
    else:
        with ThreadPoolExecutor(max_workers=spec.workers) as executor:
            futures = [executor.submit(_replicate, spec, truth, n, r) for n, r in tasks]
            records = [future.result() for future in futures]

    rows = pd.DataFrame.from_records(records).sort_values(['n', 'replication'], kind='stable')
    rows = rows.reset_index(drop=True)
    not_converged = int((~rows['converged']).sum())
    if not_converged:
        logger.warning(f"{not_converged} runs did not converge within max_iter={spec.max_iter}")
    return ExperimentResult(spec, truth, provenance, rows)


def breakdown_experiment(base: Sample, cfg: ThetaConfig, magnitudes: Sequence[float], replaced: int) -> pd.DataFrame:
    """Сдвиг медианы и среднего при замене последних k наблюдений на [M, M]"""
    n = len(base)
    if not isinstance(replaced, numbers.Integral) or isinstance(replaced, bool) or replaced < 0:
        raise InvalidInputError(f"Number of replaced observations must be >= 0, got {replaced!r}")
    if replaced > n:
        raise InvalidInputError(f"Cannot replace {replaced} observations in a sample of size {n}")
    magnitudes = [float(m) for m in magnitudes]
    if not magnitudes or not all(validate_finite(m) and m > 0 for m in magnitudes):
        raise InvalidInputError(f"Magnitudes must be finite and positive, got {magnitudes}")
    if not validate_ascending(magnitudes):
        raise InvalidInputError(f"Magnitudes must be ascending, got {magnitudes}")

    clean_median = dtheta_median(base, cfg).estimate
    clean_mean = aumann_mean(base)

    records: List[dict] = []
    for magnitude in magnitudes:
        contaminated = base.replace_tail(replaced, Interval.degenerate(magnitude))
        median = dtheta_median(contaminated, cfg).estimate
        records.append({
            'k': replaced,
            'magnitude': magnitude,
            'median_drift': d_theta(median, clean_median, cfg.theta),
            'mean_drift': d_theta(aumann_mean(contaminated), clean_mean, cfg.theta),
        })
    return pd.DataFrame.from_records(records, columns=['k', 'magnitude', 'median_drift', 'mean_drift'])

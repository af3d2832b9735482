import logging
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from config.settings import GRID_CONFIG, SOLVER_CONFIG
from ..core.errors import InvalidInputError, InvalidParameterError, NumericFailureError
from ..core.interval import Interval, Sample, ThetaConfig, from_plane
from ..utils.validators import validate_finite, validate_theta

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EstimateReport:
    """Результат оценки d_θ-медианы с диагностикой итерации"""

    estimate: Interval
    objective: float
    iterations: int
    converged: bool
    unique: bool
    final_step: float
    theta: float
    objective_trace: Tuple[float, ...] = ()


@dataclass(frozen=True)
class GridBounds:
    """Прямоугольник (y, z) = (mid, spr) для перебора по сетке"""

    y_min: float
    y_max: float
    z_min: float
    z_max: float


def _check_theta(theta: float):
    if not validate_theta(theta):
        raise InvalidParameterError(f"theta must be a finite positive number, got {theta!r}")


def _distances(sample: Sample, K: Interval, theta: float) -> np.ndarray:
    return np.hypot(sample.mids - K.mid, math.sqrt(theta) * (sample.sprs - K.spr))


def aumann_mean(sample: Sample) -> Interval:
    """Среднее типа Ауманна: [E inf, E sup]"""
    if len(sample) == 0:
        raise InvalidInputError("Aumann mean of an empty sample")
    inf = float(np.mean(sample.infs))
    sup = float(np.mean(sample.sups))
    # среднее монотонно, но округление может дать inf > sup на одном ulp
    return Interval(min(inf, sup), sup)


def objective(sample: Sample, K: Interval, theta: float) -> float:
    """Средняя d_θ-дистанция от выборки до K"""
    _check_theta(theta)
    return float(np.mean(_distances(sample, K, theta)))


def squared_objective(sample: Sample, K: Interval, theta: float) -> float:
    """Средний квадрат d_θ; минимизируется средним Ауманна"""
    _check_theta(theta)
    return float(np.mean(_distances(sample, K, theta) ** 2))


def centered_objective(sample: Sample, K: Interval, theta: float) -> float:
    """Средняя d_θ(x, K) − d_θ(x, [0,0]); конечна и без первого момента"""
    _check_theta(theta)
    origin = np.hypot(sample.mids, math.sqrt(theta) * sample.sprs)
    return float(np.mean(_distances(sample, K, theta) - origin))


def collinearity_check(sample: Sample, theta: float) -> bool:
    """True, если образы выборки НЕ лежат на одной прямой (медиана единственна)"""
    _check_theta(theta)
    if len(sample) <= 2:
        return False
    points = sample.to_plane(theta)
    centered = points - points.mean(axis=0)
    # R из QR имеет те же сингулярные числа, что и центрированная матрица
    r = np.linalg.qr(centered, mode='r')
    singular = np.linalg.svd(r, compute_uv=False)
    if singular[0] == 0:
        return False
    return bool(singular[-1] > SOLVER_CONFIG['collinearity_rtol'] * singular[0])


def fsbp(n: int) -> Fraction:
    """Точка срыва медианы на конечной выборке: ⌊(n+1)/2⌋ / n"""
    if not isinstance(n, numbers.Integral) or isinstance(n, bool) or n < 1:
        raise InvalidInputError(f"fsbp requires a positive integer sample size, got {n!r}")
    n = int(n)
    return Fraction((n + 1) // 2, n)


def _objective_gap(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Σ|a−x_i| − Σ|b−x_i| через разность квадратов: не теряет точность при a ≈ b"""
    da = np.hypot(points[:, 0] - a[0], points[:, 1] - a[1])
    db = np.hypot(points[:, 0] - b[0], points[:, 1] - b[1])
    num = ((a + b) - 2.0 * points) @ (a - b)
    den = da + db
    return float(np.sum(np.divide(num, den, out=np.zeros_like(num), where=den > 0)))


def _newton_point(y: np.ndarray, diff: np.ndarray, dist: np.ndarray, diameter: float) -> Optional[np.ndarray]:
    # гессиан суммы расстояний в долях диаметра; вырожден на коллинеарных данных
    unit = diff / dist[:, None]
    scale = diameter / dist
    hessian = scale.sum() * np.eye(2) - (unit * scale[:, None]).T @ unit
    try:
        shift = np.linalg.solve(hessian, unit.sum(axis=0))
    except np.linalg.LinAlgError:
        return None
    target = y + diameter * shift
    return target if np.isfinite(target).all() else None


def _accelerate(points: np.ndarray, y: np.ndarray, diff: np.ndarray, dist: np.ndarray,
                diameter: float, fallback: np.ndarray) -> np.ndarray:
    """Ньютоновский шаг с дроблением; берется, только если он лучше шага Вейсфельда"""
    best = fallback
    target = _newton_point(y, diff, dist, diameter)
    if target is not None:
        direction = target - y
        for _ in range(SOLVER_CONFIG['newton_backtracks']):
            candidate = y + direction
            if _objective_gap(points, candidate, fallback) < 0:
                best = candidate
                break
            direction = direction / 2
    # оптимум в точке данных: прыжок туда, дальше ее заверит тест Варди-Чжана
    nearest = points[int(np.argmin(dist))]
    if _objective_gap(points, nearest, best) < 0:
        best = nearest
    return best


def _weiszfeld(points: np.ndarray, tol: float, max_iter: int, diameter: float):
    """Итерация Вейсфельда с поправкой Варди-Чжана в точках данных и ньютоновским ускорением"""
    coincide = SOLVER_CONFIG['coincidence_rtol'] * diameter
    y = np.median(points, axis=0)
    trace = []
    step = 0.0
    converged = False
    iterations = 0

    for iteration in range(1, max_iter + 1):
        iterations = iteration
        diff = points - y
        dist = np.hypot(diff[:, 0], diff[:, 1])
        trace.append(float(np.mean(dist)))

        at_point = dist <= coincide
        eta = int(np.count_nonzero(at_point))
        free = ~at_point
        if not free.any():
            step, converged = 0.0, True
            break

        # веса в долях диаметра: 1/dist не переполняется на крошечных данных
        weights = diameter / dist[free]
        T = y + weights @ diff[free] / weights.sum()
        if eta == 0:
            y_new = _accelerate(points, y, diff, dist, diameter, T)
        else:
            R = (diff[free] / dist[free, None]).sum(axis=0)
            r = float(np.hypot(R[0], R[1]))
            if r <= eta:
                # субградиентный тест: точка данных и есть медиана
                step, converged = 0.0, True
                y = points[int(np.argmin(dist))]
                logger.debug(f"Data point certified optimal at iteration {iteration} (r={r:.3g}, eta={eta})")
                break
            gamma = eta / r
            y_new = (1.0 - gamma) * T + gamma * y

        if not np.isfinite(y_new).all():
            raise NumericFailureError("Non-finite Weiszfeld iterate", iteration)

        step = float(np.hypot(*(y_new - y)))
        y = y_new
        if step <= tol * (1.0 + float(np.hypot(y[0], y[1]))):
            converged = True
            break

    return y, iterations, converged, step, tuple(trace)


def dtheta_median(sample: Sample, cfg: Optional[ThetaConfig] = None) -> EstimateReport:
    """Выборочная d_θ-медиана: геометрическая медиана образов на полуплоскости"""
    cfg = cfg or ThetaConfig()
    theta = cfg.theta
    unique = collinearity_check(sample, theta)

    if len(sample) == 1:
        estimate = sample[0]
        return EstimateReport(estimate, 0.0, 0, True, unique, 0.0, theta, (0.0,))

    points = sample.to_plane(theta)
    extent = points.max(axis=0) - points.min(axis=0)
    diameter = float(np.hypot(extent[0], extent[1]))
    if diameter == 0:
        estimate = sample[0]
        return EstimateReport(estimate, 0.0, 0, True, unique, 0.0, theta, (0.0,))

    y, iterations, converged, step, trace = _weiszfeld(points, cfg.tol, cfg.max_iter, diameter)

    u, v = float(y[0]), float(y[1])
    if v < 0:
        bound = SOLVER_CONFIG['clamp_rtol'] * diameter
        if -v > bound:
            logger.warning(f"Spread clamp {v:.3e} exceeds round-off bound {bound:.3e}")
        v = 0.0
    estimate = from_plane(u, v, theta)

    if not converged:
        logger.warning(f"Weiszfeld iteration did not converge in {cfg.max_iter} iterations (last step {step:.3e})")
    if not unique:
        logger.info("Transformed sample is collinear: the d_theta-median may not be unique")
    logger.debug(f"d_theta-median of n={len(sample)}: {estimate} after {iterations} iterations")

    return EstimateReport(
        estimate=estimate,
        objective=objective(sample, estimate, theta),
        iterations=iterations,
        converged=converged,
        unique=unique,
        final_step=step,
        theta=theta,
        objective_trace=trace,
    )


def default_bounds(sample: Sample) -> GridBounds:
    """Рамка (mid, spr) данных, расширенная на ее диаметр"""
    mids, sprs = sample.mids, sample.sprs
    y_lo, y_hi = float(mids.min()), float(mids.max())
    z_lo, z_hi = float(sprs.min()), float(sprs.max())
    diameter = math.hypot(y_hi - y_lo, z_hi - z_lo)
    return GridBounds(y_lo - diameter, y_hi + diameter, max(0.0, z_lo - diameter), z_hi + diameter)


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def _grid_argmin(sample: Sample, theta: float, bounds: GridBounds, step: float, power: int) -> Tuple[float, float]:
    if not (validate_finite(step) and step > 0):
        raise InvalidParameterError(f"Grid step must be a finite positive number, got {step!r}")
    z_min = max(bounds.z_min, 0.0)
    if bounds.y_max < bounds.y_min or bounds.z_max < z_min:
        raise InvalidInputError(f"Empty search grid for bounds {bounds}")
    ys = _axis(bounds.y_min, bounds.y_max, step)
    zs = _axis(z_min, bounds.z_max, step)

    mids = sample.mids[:, None, None]
    sprs = sample.sprs[:, None, None]
    root = math.sqrt(theta)
    rows = GRID_CONFIG['chunk_rows']

    def values(chunk: np.ndarray) -> np.ndarray:
        d = np.hypot(mids - chunk[None, :, None], root * (sprs - zs[None, None, :]))
        return np.mean(d ** power, axis=0)

    best = math.inf
    for start in range(0, ys.size, rows):
        best = min(best, float(values(ys[start:start + rows]).min()))

    # первое (наименьшие y, затем z) значение в пределах допуска от минимума
    tie = best + GRID_CONFIG['tie_rtol'] * max(1.0, abs(best))
    for start in range(0, ys.size, rows):
        chunk = ys[start:start + rows]
        hits = np.flatnonzero(values(chunk).ravel() <= tie)
        if hits.size:
            i, j = divmod(int(hits[0]), zs.size)
            return float(chunk[i]), float(zs[j])
    raise NumericFailureError("Grid search produced no finite objective value", 0)


def _grid_search(sample: Sample, theta: float, bounds: GridBounds, step: float,
                 refine_step: Optional[float], power: int) -> Interval:
    _check_theta(theta)
    y, z = _grid_argmin(sample, theta, bounds, step, power)
    if refine_step is not None:
        cell = GridBounds(y - step, y + step, max(0.0, z - step), z + step)
        y, z = _grid_argmin(sample, theta, cell, refine_step, power)
    return Interval.from_mid_spr(y, max(z, 0.0))


def brute_force_median(sample: Sample, theta: float, bounds: Optional[GridBounds] = None,
                       step: float = 1e-3, refine_step: Optional[float] = None) -> Interval:
    """Оракул: минимум средней d_θ по сетке (y, z)"""
    return _grid_search(sample, theta, bounds or default_bounds(sample), step, refine_step, power=1)


def brute_force_frechet_mean(sample: Sample, theta: float, bounds: Optional[GridBounds] = None,
                             step: float = 1e-3, refine_step: Optional[float] = None) -> Interval:
    """Оракул: минимум среднего квадрата d_θ по сетке (y, z)"""
    return _grid_search(sample, theta, bounds or default_bounds(sample), step, refine_step, power=2)

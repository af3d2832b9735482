"""Компактные интервалы, полулинейная арифметика и метрика d_θ.

Интервал хранится как (inf, sup); (mid, spr) вычисляются. Отображение
K -> (mid K, √θ·spr K) переводит d_θ в евклидово расстояние на полуплоскости
ℝ × [0, ∞), на этом держится решатель медианы.
"""
import math
import numbers
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Tuple, Union, overload

import numpy as np

from config.settings import SOLVER_CONFIG
from .errors import ArithmeticOverflowError, InvalidInputError, InvalidParameterError
from ..utils.validators import (
    is_real, validate_finite, validate_positive_int, validate_theta, validate_tol,
)

Point = Tuple[float, float]


@dataclass(frozen=True)
class Interval:
    """Непустой компактный интервал [inf, sup]"""

    inf: float
    sup: float

    def __post_init__(self):
        if not (is_real(self.inf) and is_real(self.sup)):
            raise InvalidInputError(f"Interval endpoints must be real numbers: {self.inf!r}, {self.sup!r}")
        inf, sup = float(self.inf), float(self.sup)
        if not (math.isfinite(inf) and math.isfinite(sup)):
            raise InvalidInputError(f"Interval endpoints must be finite: [{inf}, {sup}]")
        if inf > sup:
            raise InvalidInputError(f"Interval requires inf <= sup: [{inf}, {sup}]")
        object.__setattr__(self, 'inf', inf)
        object.__setattr__(self, 'sup', sup)

    @classmethod
    def from_mid_spr(cls, mid: float, spr: float) -> 'Interval':
        """Интервал по центру и радиусу"""
        if not (validate_finite(mid) and validate_finite(spr)):
            raise InvalidInputError(f"mid/spr must be finite: {mid!r}, {spr!r}")
        if spr < 0:
            raise InvalidInputError(f"spr must be nonnegative: {spr}")
        inf, sup = mid - spr, mid + spr
        if not (math.isfinite(inf) and math.isfinite(sup)):
            raise ArithmeticOverflowError(f"Endpoint overflow for mid={mid}, spr={spr}")
        return cls(inf, sup)

    @classmethod
    def degenerate(cls, value: float) -> 'Interval':
        return cls(value, value)

    @property
    def mid(self) -> float:
        mid = (self.inf + self.sup) / 2
        if not math.isfinite(mid):
            mid = self.inf / 2 + self.sup / 2
        return mid

    @property
    def spr(self) -> float:
        spr = (self.sup - self.inf) / 2
        if not math.isfinite(spr):
            spr = self.sup / 2 - self.inf / 2
        return spr

    def __add__(self, other: 'Interval') -> 'Interval':
        if not isinstance(other, Interval):
            return NotImplemented
        return add(self, other)

    def __rmul__(self, gamma: float) -> 'Interval':
        if not is_real(gamma):
            return NotImplemented
        return scale(gamma, self)

    def __str__(self) -> str:
        return f"[{self.inf!r}, {self.sup!r}]"


@dataclass(frozen=True)
class ThetaConfig:
    """Параметр метрики θ и допуски решателя"""

    theta: float = SOLVER_CONFIG['theta']
    tol: float = SOLVER_CONFIG['tol']
    max_iter: int = SOLVER_CONFIG['max_iter']

    def __post_init__(self):
        if not validate_theta(self.theta):
            raise InvalidParameterError(f"theta must be a finite positive number, got {self.theta!r}")
        if not validate_tol(self.tol):
            raise InvalidParameterError(f"tol must be a finite positive number, got {self.tol!r}")
        if not validate_positive_int(self.max_iter):
            raise InvalidParameterError(f"max_iter must be an integer >= 1, got {self.max_iter!r}")
        object.__setattr__(self, 'theta', float(self.theta))
        object.__setattr__(self, 'tol', float(self.tol))
        object.__setattr__(self, 'max_iter', int(self.max_iter))


class Sample:
    """Упорядоченная выборка интервалов (n ≥ 1) поверх массивов numpy"""

    __slots__ = ('_infs', '_sups', '_items')

    def __init__(self, items: Iterable[Interval]):
        items = tuple(items)
        for item in items:
            if not isinstance(item, Interval):
                raise InvalidInputError(f"Sample items must be Interval, got {type(item).__name__}")
        infs = np.array([item.inf for item in items], dtype=float)
        sups = np.array([item.sup for item in items], dtype=float)
        self._init_arrays(infs, sups)
        self._items = items

    def _init_arrays(self, infs: np.ndarray, sups: np.ndarray):
        if infs.ndim != 1 or infs.shape != sups.shape:
            raise InvalidInputError("inf and sup arrays must be one-dimensional and of equal length")
        if infs.size == 0:
            raise InvalidInputError("Sample must contain at least one interval")
        if not (np.isfinite(infs).all() and np.isfinite(sups).all()):
            bad = int(np.flatnonzero(~(np.isfinite(infs) & np.isfinite(sups)))[0])
            raise InvalidInputError(f"Interval {bad} has a non-finite endpoint")
        if (infs > sups).any():
            bad = int(np.flatnonzero(infs > sups)[0])
            raise InvalidInputError(f"Interval {bad} violates inf <= sup: [{infs[bad]}, {sups[bad]}]")
        infs.setflags(write=False)
        sups.setflags(write=False)
        self._infs = infs
        self._sups = sups

    @classmethod
    def from_bounds(cls, infs: Sequence[float], sups: Sequence[float]) -> 'Sample':
        """Выборка по массивам нижних и верхних концов"""
        sample = cls.__new__(cls)
        sample._init_arrays(np.array(infs, dtype=float), np.array(sups, dtype=float))
        sample._items = None
        return sample

    @classmethod
    def from_mid_spr(cls, mids: Sequence[float], sprs: Sequence[float]) -> 'Sample':
        """Выборка по центрам и радиусам"""
        mids = np.asarray(mids, dtype=float)
        sprs = np.asarray(sprs, dtype=float)
        if mids.shape != sprs.shape:
            raise InvalidInputError("mid and spr arrays must have equal length")
        if (sprs < 0).any():
            bad = int(np.flatnonzero(sprs < 0)[0])
            raise InvalidInputError(f"Interval {bad} has a negative spread: {sprs[bad]}")
        with np.errstate(over='ignore', invalid='ignore'):
            return cls.from_bounds(mids - sprs, mids + sprs)

    @property
    def items(self) -> Tuple[Interval, ...]:
        if self._items is None:
            self._items = tuple(Interval(a, b) for a, b in zip(self._infs.tolist(), self._sups.tolist()))
        return self._items

    @property
    def infs(self) -> np.ndarray:
        return self._infs

    @property
    def sups(self) -> np.ndarray:
        return self._sups

    @property
    def mids(self) -> np.ndarray:
        with np.errstate(over='ignore'):
            mids = (self._infs + self._sups) / 2
        if not np.isfinite(mids).all():
            mids = self._infs / 2 + self._sups / 2
        return mids

    @property
    def sprs(self) -> np.ndarray:
        with np.errstate(over='ignore'):
            sprs = (self._sups - self._infs) / 2
        if not np.isfinite(sprs).all():
            sprs = self._sups / 2 - self._infs / 2
        return sprs

    def to_plane(self, theta: float) -> np.ndarray:
        """Образы интервалов на полуплоскости, массив n×2"""
        _check_theta(theta)
        return np.column_stack((self.mids, math.sqrt(theta) * self.sprs))

    def replace_tail(self, k: int, replacement: Interval) -> 'Sample':
        """Заменить последние k наблюдений одним и тем же интервалом"""
        if not isinstance(k, numbers.Integral) or k < 0 or k > len(self):
            raise InvalidInputError(f"Cannot replace {k!r} of {len(self)} observations")
        infs = self._infs.copy()
        sups = self._sups.copy()
        if k:
            infs[-k:] = replacement.inf
            sups[-k:] = replacement.sup
        return Sample.from_bounds(infs, sups)

    def translate(self, shift: Interval) -> 'Sample':
        """Прибавить интервал к каждому наблюдению"""
        with np.errstate(over='ignore'):
            infs, sups = self._infs + shift.inf, self._sups + shift.sup
        if not (np.isfinite(infs).all() and np.isfinite(sups).all()):
            raise ArithmeticOverflowError("Endpoint overflow while translating the sample")
        return Sample.from_bounds(infs, sups)

    def scale(self, gamma: float) -> 'Sample':
        """Умножить каждое наблюдение на скаляр"""
        if not validate_finite(gamma):
            raise InvalidParameterError(f"gamma must be finite, got {gamma!r}")
        with np.errstate(over='ignore'):
            a, b = gamma * self._infs, gamma * self._sups
        if not (np.isfinite(a).all() and np.isfinite(b).all()):
            raise ArithmeticOverflowError(f"Endpoint overflow while scaling the sample by {gamma}")
        return Sample.from_bounds(a, b) if gamma >= 0 else Sample.from_bounds(b, a)

    def __len__(self) -> int:
        return int(self._infs.size)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.items)

    @overload
    def __getitem__(self, index: int) -> Interval: ...

    @overload
    def __getitem__(self, index: slice) -> 'Sample': ...

    def __getitem__(self, index: Union[int, slice]):
        if isinstance(index, slice):
            return Sample.from_bounds(self._infs[index], self._sups[index])
        return Interval(float(self._infs[index]), float(self._sups[index]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sample):
            return NotImplemented
        return np.array_equal(self._infs, other._infs) and np.array_equal(self._sups, other._sups)

    def __hash__(self) -> int:
        return hash((self._infs.tobytes(), self._sups.tobytes()))

    def __repr__(self) -> str:
        preview = ', '.join(str(item) for item in self.items[:3])
        tail = ', ...' if len(self) > 3 else ''
        return f"Sample(n={len(self)}: {preview}{tail})"


def _check_theta(theta: float):
    if not validate_theta(theta):
        raise InvalidParameterError(f"theta must be a finite positive number, got {theta!r}")


def add(K: Interval, K2: Interval) -> Interval:
    """Сумма интервалов [inf K + inf K2, sup K + sup K2]"""
    inf, sup = K.inf + K2.inf, K.sup + K2.sup
    if not (math.isfinite(inf) and math.isfinite(sup)):
        raise ArithmeticOverflowError(f"Endpoint overflow in {K} + {K2}")
    return Interval(inf, sup)


def scale(gamma: float, K: Interval) -> Interval:
    """Произведение на скаляр: mid -> γ·mid, spr -> |γ|·spr"""
    if not validate_finite(gamma):
        raise InvalidParameterError(f"gamma must be finite, got {gamma!r}")
    a, b = gamma * K.inf, gamma * K.sup
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ArithmeticOverflowError(f"Endpoint overflow in {gamma} * {K}")
    # при γ < 0 концы меняются местами
    return Interval(a, b) if gamma >= 0 else Interval(b, a)


def d_theta(K: Interval, K2: Interval, theta: float) -> float:
    """Метрика d_θ = √((Δmid)² + θ·(Δspr)²)"""
    _check_theta(theta)
    return math.hypot(K.mid - K2.mid, math.sqrt(theta) * (K.spr - K2.spr))


def to_plane(K: Interval, theta: float) -> Point:
    """Изометрия (K, d_θ) -> (ℝ × [0, ∞), евклидово расстояние)"""
    _check_theta(theta)
    return K.mid, math.sqrt(theta) * K.spr


def from_plane(u: float, v: float, theta: float) -> Interval:
    """Обратное отображение; отрицательный v обнуляется"""
    _check_theta(theta)
    if v <= 0:
        v = 0.0
    return Interval.from_mid_spr(float(u), float(v) / math.sqrt(theta))

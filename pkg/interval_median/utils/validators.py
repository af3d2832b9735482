# interval_median/utils/validators.py
import math
import numbers
import re

# Десятичная запись без локали: только точка, без nan/inf и подчеркиваний
DECIMAL_PATTERN = re.compile(r'^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$')

MAX_SEED = 2**64 - 1


def is_real(value) -> bool:
    """Вещественное число (bool не считается)"""
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def validate_finite(value) -> bool:
    """Конечное вещественное число"""
    return is_real(value) and math.isfinite(value)


def validate_theta(theta) -> bool:
    """Проверка параметра метрики θ ∈ (0, ∞)"""
    return validate_finite(theta) and theta > 0


def validate_tol(tol) -> bool:
    """Проверка порога сходимости"""
    return validate_finite(tol) and tol > 0


def validate_positive_int(value) -> bool:
    """Целое число ≥ 1"""
    return isinstance(value, numbers.Integral) and not isinstance(value, bool) and value >= 1


def validate_seed(seed) -> bool:
    """64-битный беззнаковый seed"""
    return isinstance(seed, numbers.Integral) and not isinstance(seed, bool) and 0 <= seed <= MAX_SEED


def validate_decimal(text: str) -> bool:
    """Проверка десятичной записи числа"""
    return bool(DECIMAL_PATTERN.match(text.strip()))


def validate_ascending(values, strict: bool = True) -> bool:
    """Проверка возрастания последовательности"""
    pairs = zip(values, values[1:])
    if strict:
        return all(a < b for a, b in pairs)
    return all(a <= b for a, b in pairs)

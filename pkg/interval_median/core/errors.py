# interval_median/core/errors.py
from typing import Optional, Tuple


class IntervalMedianError(Exception):
    """Базовая ошибка пакета"""


class InvalidParameterError(IntervalMedianError, ValueError):
    """Недопустимый параметр (θ, tol, max_iter, γ)"""


class InvalidInputError(IntervalMedianError, ValueError):
    """Недопустимые входные данные (интервал, выборка, спецификация)"""


class ArithmeticOverflowError(IntervalMedianError, ArithmeticError):
    """Переполнение: конец интервала перестал быть конечным"""


class NumericFailureError(IntervalMedianError, ArithmeticError):
    """Нечисловое промежуточное значение в итерации"""

    def __init__(self, message: str, iteration: int, context: Optional[Tuple[int, int]] = None):
        self.iteration = iteration
        self.context = context
        if context is not None:
            message = f"{message} (n={context[0]}, replication={context[1]})"
        super().__init__(message)

    def with_context(self, n: int, replication: int) -> 'NumericFailureError':
        base = str(self).split(' (n=')[0]
        return NumericFailureError(base, self.iteration, (n, replication))


class DatasetParseError(InvalidInputError):
    """Ошибка разбора файла с данными"""

    def __init__(self, message: str, line_number: int):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")

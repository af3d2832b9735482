# interval_median/utils/formatters.py
from fractions import Fraction


def format_fraction(value: Fraction) -> str:
    """Дробь как `0.6 (3/5)`"""
    return f"{float(value)!r} ({value.numerator}/{value.denominator})"


def format_interval(K) -> str:
    """Интервал как `[inf, sup]` с кратчайшей записью чисел"""
    return f"[{K.inf!r}, {K.sup!r}]"


def format_estimate(document: dict) -> str:
    """Краткий текстовый отчет по оценкам"""
    if not document:
        return "Нет данных для отчета"

    median = document['median']
    mean = document['mean']
    report = "📊 ОЦЕНКИ ПОЛОЖЕНИЯ\n"
    report += "────────────────────\n"
    report += f"n = {document['n']}, θ = {document['params']['theta']!r}\n"
    report += f"Среднее Ауманна: [{mean['inf']!r}, {mean['sup']!r}]\n"
    report += f"d_θ-медиана:     [{median['inf']!r}, {median['sup']!r}]\n"
    report += f"Итераций: {median['iterations']}, сходимость: {'да' if median['converged'] else 'нет'}\n"
    if not median['unique']:
        report += "⚠️ Точки коллинеарны: медиана может быть не единственной\n"
    report += f"fsbp = {document['fsbp']['text']}\n"
    return report


def format_truth(truth, provenance) -> str:
    """Строка с эталоном и его происхождением"""
    return f"truth = {format_interval(truth)} ({provenance})"

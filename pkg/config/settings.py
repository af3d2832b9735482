import os
from pathlib import Path

from dotenv import load_dotenv

# Базовые пути
BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(BASE_DIR / '.env')

LOG_DIR = Path(os.getenv('INTERVAL_MEDIAN_LOG_DIR', BASE_DIR / 'logs'))

# Создаем директории
LOG_DIR.mkdir(parents=True, exist_ok=True)

TOOL_NAME = 'interval-median'
TOOL_VERSION = '1.0.0'

# Переменная окружения, переопределяющая seed из файла эксперимента
SEED_ENV_VAR = 'INTERVAL_ROBUST_SEED'

# Параметры решателя (Вейсфельд / Варди-Чжан)
SOLVER_CONFIG = {
    'theta': 1.0,
    'tol': 1e-10,
    'max_iter': 1000,
    'coincidence_rtol': 1e-13,  # "совпадение" с точкой данных, доля диаметра
    'collinearity_rtol': 1e-12,  # отношение сингулярных чисел
    'clamp_rtol': 1e-12,  # допустимый отрицательный spr от округления
    'newton_backtracks': 20,  # дроблений ньютоновского шага до отказа
}

# Монте-Карло
SIMULATION_CONFIG = {
    'large_sample_size': 1_000_000,
    'truth_seed': 20140101,
    'max_workers': int(os.getenv('INTERVAL_MEDIAN_WORKERS', '4')),
}

# Перебор по сетке (оракул для тестов)
GRID_CONFIG = {
    'tie_rtol': 1e-12,
    'chunk_rows': 256,
}

# Настройки кэша
CACHE_CONFIG = {
    'ttl': 3600,  # 1 час
    'max_size': 128,
}

# Коды выхода CLI
EXIT_CODES = {
    'ok': 0,
    'data_error': 2,
    'usage_error': 64,
}

# Логирование
LOGGING_CONFIG = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'DEBUG',
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': LOG_DIR / 'interval_median.log',
            'maxBytes': 10485760,  # 10MB
            'backupCount': 5,
            'formatter': 'verbose',
            'encoding': 'utf-8',
        },
        'console': {
            'level': 'WARNING',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'interval_median': {
            'handlers': ['file', 'console'],
            'level': 'DEBUG',
            'propagate': True,
        },
    },
}

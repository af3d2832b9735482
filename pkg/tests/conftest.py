import os
import tempfile

# Логи тестов не должны попадать в logs/ репозитория
os.environ.setdefault('INTERVAL_MEDIAN_LOG_DIR', tempfile.mkdtemp(prefix='interval-median-logs-'))

import numpy as np
import pytest

from interval_median import Interval, Sample, ThetaConfig
from interval_median.database.cache import cache_manager


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def cfg():
    return ThetaConfig()


@pytest.fixture
def breakdown_sample():
    """Чистая выборка n=5 в [0, 10]; ее d_θ-медиана (θ=1) равна [1, 3]"""
    return Sample([Interval(0, 2), Interval(2, 4), Interval(2, 2), Interval(0, 4), Interval(1, 3)])


@pytest.fixture
def write_file(tmp_path):
    def _write(name: str, text: str, newline: str = '\n'):
        path = tmp_path / name
        with open(path, 'w', encoding='utf-8', newline='') as fh:
            fh.write(text.replace('\n', newline))
        return path
    return _write


@pytest.fixture(autouse=True)
def clean_truth_cache():
    yield
    cache_manager.clear_cache('truth')

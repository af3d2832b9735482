# interval_median/database/cache.py
import logging
import threading
from typing import Callable, Dict

import cachetools
import cachetools.keys

from config.settings import CACHE_CONFIG

logger = logging.getLogger(__name__)


class CacheManager:
    """Именованные TTL-кэши для дорогих расчетов (эталонные медианы и т.п.)"""

    def __init__(self, ttl: int = CACHE_CONFIG['ttl'], maxsize: int = CACHE_CONFIG['max_size']):
        self.ttl = ttl
        self.maxsize = maxsize
        self._caches: Dict[str, cachetools.TTLCache] = {}
        self._locks: Dict[str, threading.RLock] = {}
        self._guard = threading.Lock()

    def get_cache(self, name: str) -> cachetools.TTLCache:
        with self._guard:
            if name not in self._caches:
                self._caches[name] = cachetools.TTLCache(maxsize=self.maxsize, ttl=self.ttl)
                self._locks[name] = threading.RLock()
            return self._caches[name]

    def memoize(self, name: str, key: Callable = cachetools.keys.hashkey):
        """Декоратор: результат функции кэшируется в кэше `name`"""
        cache = self.get_cache(name)
        return cachetools.cached(cache=cache, key=key, lock=self._locks[name])

    def clear_cache(self, name: str):
        if name in self._caches:
            with self._locks[name]:
                self._caches[name].clear()
            logger.debug(f"Cache cleared: {name}")

    def size(self, name: str) -> int:
        return len(self._caches[name]) if name in self._caches else 0


# Глобальный экземпляр
cache_manager = CacheManager()

"""
TabulationCache - Caches expensive kernel matrices and inner-level tables.
The recursion reuses the same c-function matrices and E_{N-1} tables for
every outer evaluation that shares (b, grid, y_hat).
"""

import logging
import os
import threading
from collections import OrderedDict
from typing import Any, Callable

logger = logging.getLogger(__name__)

CACHE_SIZE_ENV = "RCM_CACHE_SIZE"
DEFAULT_CACHE_SIZE = 128


def configured_cache_size() -> int:
    """Cache capacity, overridable through the environment"""
    raw = os.environ.get(CACHE_SIZE_ENV)
    if raw is None:
        return DEFAULT_CACHE_SIZE
    try:
        size = int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", CACHE_SIZE_ENV, raw)
        return DEFAULT_CACHE_SIZE
    return max(size, 0)


class TabulationCache:
    """Bounded LRU map with linearizable access"""

    def __init__(self, max_entries: int = None):
        self.max_entries = configured_cache_size() if max_entries is None else max_entries
        self._lock = threading.Lock()
        self.clear()

    def clear(self):
        """Clear all cached data"""
        with getattr(self, "_lock", threading.Lock()):
            self._entries = OrderedDict()
            self.hits = 0
            self.misses = 0

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        return key in self._entries

    def get_or_compute(self, key: str, factory: Callable[[], Any]) -> Any:
        """Return the cached value for key, computing and storing it on a miss

        Concurrent misses on one key may compute twice; the first stored
        value wins so every caller sees the same object afterwards.
        """
        with self._lock:
            if key in self._entries:
                self._entries.move_to_end(key)
                self.hits += 1
                logger.debug("Cache hit %s", key)
                return self._entries[key]
            self.misses += 1
        value = factory()
        with self._lock:
            if key in self._entries:
                return self._entries[key]
            if self.max_entries > 0:
                self._entries[key] = value
                while len(self._entries) > self.max_entries:
                    evicted, _ = self._entries.popitem(last=False)
                    logger.debug("Evicted %s", evicted)
        return value

    def stats(self):
        return {'hits': self.hits, 'misses': self.misses, 'entries': len(self._entries)}


_tabulation_cache = TabulationCache()


def get_tabulation_cache():
    """Get the global tabulation cache instance"""
    return _tabulation_cache


def clear_tabulation_cache():
    """Clear the global tabulation cache"""
    _tabulation_cache.clear()

"""
Cache utility module.
This module provides an in-memory memo store for quadrature rules and
per-dimension constants such as unit heatball volumes.
"""
from typing import Any, Callable, Dict, Optional, TypeVar

T = TypeVar("T")

# In-memory cache storage
# Structure: {cache_key: data}
_cache: Dict[str, Any] = {}

def set_cache(key: str, data: Any) -> None:
    """
    Set a value in the cache.

    Args:
        key (str): The cache key.
        data (Any): The data to cache.
    """
    _cache[key] = data

def get_cache(key: str) -> Optional[Any]:
    """
    Get a value from the cache.

    Args:
        key (str): The cache key.

    Returns:
        Optional[Any]: The cached data if found, None otherwise.
    """
    return _cache.get(key)

def get_or_compute(key: str, compute: Callable[[], T]) -> T:
    """
    Return the cached value for a key, computing and storing it on a miss.

    Args:
        key (str): The cache key.
        compute (Callable[[], T]): Producer called only on a miss.

    Returns:
        T: The cached or freshly computed value.
    """
    cached = get_cache(key)
    if cached is not None:
        return cached
    value = compute()
    set_cache(key, value)
    return value

def clear_cache(key: str) -> None:
    """
    Remove a value from the cache.

    Args:
        key (str): The cache key.
    """
    if key in _cache:
        del _cache[key]

def clear_all_cache() -> None:
    """
    Clear all cached data.
    """
    _cache.clear()

def generate_rule_cache_key(kind: str, *params: Any) -> str:
    """
    Generate a cache key for a quadrature rule or derived constant.

    Args:
        kind (str): The rule family, e.g. "sphere" or "laguerre".
        *params: The parameters identifying the rule.

    Returns:
        str: The cache key.
    """
    return f"{kind}_" + "_".join(repr(p) for p in params)

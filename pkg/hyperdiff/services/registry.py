from functools import lru_cache

from .catalog import default_catalog
from .differential import default_config


@lru_cache(maxsize=1)
def _services():
    """Builds the shared differential configuration and identity catalog once"""
    return default_config(), default_catalog()


diff_config, catalog = _services()

"""
Configuration lookup with fallbacks for library modules.

Educational Note: Library code must keep working when imported outside the
project tree (no ``config`` package on the path). Every lookup therefore names
its own fallback value.
"""

import logging
import sys
from pathlib import Path
from typing import Any

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from config import get_project_config
except ImportError:
    get_project_config = None

logger = logging.getLogger(__name__)


def get_setting(section: str, path: str, default: Any) -> Any:
    """
    Read ``<section>.<path>`` from the project configuration.

    Args:
        section: Top-level section, e.g. ``'dirac'``
        path: Dotted path inside the section, e.g. ``'core.zero_tol'``
        default: Value used when the config system or the key is unavailable

    Example:
        >>> get_setting('dirac', 'core.zero_tol', 5e-2)
        0.05
    """
    if get_project_config is None:
        return default
    try:
        section_config = getattr(get_project_config(), section)
        value = section_config.get_nested(path, default)
    except Exception as e:
        logger.debug(f"Config lookup failed for {section}.{path}: {e}")
        return default
    return default if value is None else value

"""
Utilities Package for Spinwright

Shared logging and configuration lookup used by every component.
"""

from .logger_factory import get_component_logger, log_system_info
from .settings import get_setting

__all__ = [
    'get_component_logger',
    'log_system_info',
    'get_setting'
]

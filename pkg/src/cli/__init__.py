"""
CLI Package for Spinwright

The ``spinwright`` click group: generate, transform, diagnose, compare and
kernel, each writing a schema-versioned JSON report.
"""

from .main import cli
from .run_config import RunConfig, report_envelope
from .rho_spec import RhoSpec, RhoSpecError, parse_rho_spec

__all__ = [
    'cli',
    'RunConfig',
    'report_envelope',
    'RhoSpec',
    'RhoSpecError',
    'parse_rho_spec'
]

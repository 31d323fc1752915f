"""
CLI Module - Run Configuration

Everything a run depends on, embedded verbatim in every JSON report so a
report can be reproduced from itself.
"""

from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Dict, List, Optional
import logging
import sys

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger
    from src.utils.settings import get_setting
    logger = get_component_logger('cli')
except ImportError:
    logger = logging.getLogger(__name__)

    def get_setting(section, path, default):
        return default

_TOLERANCES = ('tol', 'zero_tol', 'iso_tol', 'umbilic_tol')


@dataclass
class RunConfig:
    """
    Parameters of one CLI invocation.

    Attributes:
        subcommand: generate, transform, diagnose, compare or kernel
        inputs: input OBJ paths
        output: output OBJ path, if any
        report: JSON report path (None prints to stdout)
        seed: eigensolver seed, fixed by default for reproducibility
        tol, zero_tol, iso_tol, umbilic_tol: optional positive tolerances;
            None defers to the library configuration
        params: subcommand-specific values (generator parameters, rho spec, ...)
    """
    subcommand: str
    inputs: List[str] = field(default_factory=list)
    output: Optional[str] = None
    report: Optional[str] = None
    seed: int = 0
    tol: Optional[float] = None
    zero_tol: Optional[float] = None
    iso_tol: Optional[float] = None
    umbilic_tol: Optional[float] = None
    allow_reflection: bool = False
    count: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name in _TOLERANCES:
            value = getattr(self, name)
            if value is not None and not value > 0:
                error_msg = f"--{name.replace('_', '-')} must be positive, got {value}"
                logger.error(error_msg)
                raise ValueError(error_msg)
        if self.count is not None and self.count < 1:
            error_msg = f"--count must be at least 1, got {self.count}"
            logger.error(error_msg)
            raise ValueError(error_msg)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def report_envelope(config: RunConfig, result: Dict[str, Any]) -> Dict[str, Any]:
    """Wrap a result with the schema version, library version and run configuration."""
    return {
        'schema': int(get_setting('application', 'core.report_schema', 1)),
        'version': str(get_setting('application', 'core.version', '0.1.0')),
        'command': config.subcommand,
        'run_config': config.to_dict(),
        'result': result,
    }

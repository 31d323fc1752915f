"""
Centralized Logging System for Spinwright

Educational Focus: One logger per library component (quatnum, mesh, dirac,
integrate, bonnet, cli), each writing to its own rotating log file and sharing a
console handler. Levels come from the hierarchical configuration system.

Console output goes to stderr: the CLI prints JSON reports on stdout and those
must stay machine-readable.
"""

import logging
import logging.handlers
import sys
from pathlib import Path
from typing import Dict, Optional, Any
from datetime import datetime

import numpy
import scipy
import yaml

# Import hierarchical configuration system
try:
    sys.path.append(str(Path(__file__).parent.parent.parent))
    from config import get_infrastructure_config
except ImportError:
    # Fallback for testing or standalone usage
    get_infrastructure_config = None

try:
    from src.utils.settings import get_setting
except ImportError:
    def get_setting(section, path, default):
        return default

LOGGER_PREFIX = "spinwright"


class LoggerFactory:
    """
    Context-aware logger factory for Spinwright.

    Educational Note: The factory is a singleton so every component sees the
    same logs directory and the same configuration, and a component asking
    twice for its logger gets the cached instance instead of duplicate handlers.
    """

    _instance: Optional['LoggerFactory'] = None
    _loggers: Dict[str, logging.Logger] = {}
    _initialized: bool = False

    def __new__(cls) -> 'LoggerFactory':
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not self._initialized:
            self._setup_logging_system()
            LoggerFactory._initialized = True

    def _setup_logging_system(self):
        """Create the logs directory, load configuration and build formatters."""
        self.logs_dir = self._logs_directory()
        self.logs_dir.mkdir(parents=True, exist_ok=True)

        self.config = self._load_logging_config()

        self.file_formatter = logging.Formatter(
            fmt='%(asctime)s | %(name)s | %(levelname)-8s | %(funcName)s:%(lineno)d | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        self.console_formatter = logging.Formatter(
            fmt='%(name)s | %(levelname)-5s | %(message)s'
        )

    @staticmethod
    def _logs_directory() -> Path:
        """``application.directories.logs``, relative to the project root unless absolute."""
        logs = Path(str(get_setting('application', 'directories.logs', 'logs')))
        return logs if logs.is_absolute() else Path(__file__).parent.parent.parent / logs

    @staticmethod
    def _default_config() -> Dict[str, Any]:
        return {
            'default_level': 'INFO',
            'component_levels': {
                'quatnum': 'INFO',
                'mesh': 'INFO',
                'dirac': 'INFO',
                'integrate': 'INFO',
                'bonnet': 'INFO',
                'cli': 'INFO',
                'main': 'INFO'
            },
            'console_level': 'WARNING',
            'enable_console': True,
            'rotation_when': 'midnight',
            'backup_count': 30
        }

    def _load_logging_config(self) -> Dict[str, Any]:
        """
        Load logging configuration from the hierarchical config system.

        Educational Note: Missing keys are filled from defaults, so a partial
        ``20_logging.yaml`` is still a valid configuration.
        """
        default_config = self._default_config()
        try:
            if get_infrastructure_config is not None:
                infra_config = get_infrastructure_config()
                if infra_config.logging and hasattr(infra_config.logging, 'items'):
                    return self._with_defaults(dict(infra_config.logging), default_config)
                print("Warning: No logging configuration found in infrastructure config", file=sys.stderr)
                return default_config
            return self._load_yaml_config(default_config)
        except Exception as e:
            print(f"Warning: Error loading logging config from hierarchy: {e}", file=sys.stderr)
            return self._load_yaml_config(default_config)

    @staticmethod
    def _with_defaults(config: Dict[str, Any], default_config: Dict[str, Any]) -> Dict[str, Any]:
        for key, value in default_config.items():
            config.setdefault(key, value)
        return config

    def _load_yaml_config(self, default_config: Dict[str, Any]) -> Dict[str, Any]:
        """Fallback: read ``config/20_logging.yaml`` directly."""
        config_path = Path(__file__).parent.parent.parent / "config" / "20_logging.yaml"
        try:
            if config_path.exists():
                with open(config_path, 'r', encoding='utf-8') as f:
                    config_data = yaml.safe_load(f) or {}
                config = config_data.get('logging', config_data)
                return self._with_defaults(dict(config), default_config)
            return default_config
        except Exception as e:
            print(f"Warning: Could not load YAML logging config: {e}", file=sys.stderr)
            return default_config

    def _create_file_handler(self, component_name: str, log_level: str) -> logging.Handler:
        """Rotating per-component log file under ``logs/``."""
        handler = logging.handlers.TimedRotatingFileHandler(
            filename=self.logs_dir / f"{component_name}.log",
            when=self.config['rotation_when'],
            backupCount=self.config['backup_count'],
            encoding='utf-8'
        )
        handler.setLevel(getattr(logging, str(log_level).upper()))
        handler.setFormatter(self.file_formatter)
        return handler

    def _create_console_handler(self) -> Optional[logging.Handler]:
        if not self.config['enable_console']:
            return None
        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(getattr(logging, str(self.config['console_level']).upper()))
        handler.setFormatter(self.console_formatter)
        return handler

    def get_component_logger(self, component_name: str) -> logging.Logger:
        """
        Get or create a logger for a specific component.

        Args:
            component_name: Name of component (e.g., 'dirac', 'bonnet')

        Returns:
            Configured logger named ``spinwright.<component_name>``

        Example:
            >>> logger = get_component_logger('dirac')
            >>> logger.info("Assembling Dirac operator")
            # Logs to: logs/dirac.log and stderr (WARNING and above)
        """
        if component_name in self._loggers:
            return self._loggers[component_name]

        logger = logging.getLogger(f"{LOGGER_PREFIX}.{component_name}")
        logger.setLevel(logging.DEBUG)  # handlers do the filtering
        logger.propagate = False
        logger.handlers.clear()

        component_level = self.config['component_levels'].get(component_name, self.config['default_level'])
        logger.addHandler(self._create_file_handler(component_name, component_level))

        console_handler = self._create_console_handler()
        if console_handler:
            logger.addHandler(console_handler)

        self._loggers[component_name] = logger
        logger.debug(f"Logger initialized for component '{component_name}' with level '{component_level}'")
        return logger


_factory = LoggerFactory()


def get_component_logger(component_name: str) -> logging.Logger:
    """
    Convenience function to get a component logger.

    Educational Note: Components import only this function:
    ``from src.utils.logger_factory import get_component_logger``
    """
    return _factory.get_component_logger(component_name)


def log_system_info():
    """Log start-up information once per CLI run."""
    main_logger = get_component_logger('main')
    main_logger.info("=" * 60)
    main_logger.info("Spinwright run started")
    main_logger.info(f"Timestamp: {datetime.now().isoformat()}")
    main_logger.info(f"Python {sys.version.split()[0]}, numpy {numpy.__version__}, scipy {scipy.__version__}")
    main_logger.info(f"Logs directory: {_factory.logs_dir}")
    main_logger.info(f"Logging config: {_factory.config}")
    main_logger.info("=" * 60)

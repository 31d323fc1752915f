"""
Configuration Management for Spinwright - Hierarchical Merging System

Provides consolidated access to configuration settings using hierarchical merging
from numbered YAML files. Files numbered 10-19 hold project (numerical) settings,
files numbered 20-29 hold infrastructure settings such as logging.

Educational Focus: Numerical libraries carry many tolerances. Keeping them in one
merged configuration tree means a tolerance is changed in exactly one place, while
every library function still accepts an explicit override.
"""

import yaml
from pathlib import Path
from typing import Dict, Any, List, Optional
from dataclasses import dataclass, fields
import logging


logger = logging.getLogger(__name__)

PROJECT_SECTIONS = ('quatnum', 'mesh', 'dirac', 'integrate', 'bonnet', 'application')


class ConfigDict(dict):
    """
    Dictionary with dot notation access.

    Educational Note: Allows ``config.dirac.core.zero_tol`` instead of
    ``config['dirac']['core']['zero_tol']``.
    """

    def __init__(self, data: Dict[str, Any]):
        super().__init__()
        for key, value in data.items():
            if isinstance(value, dict):
                self[key] = ConfigDict(value)
            else:
                self[key] = value

    def __getattr__(self, key: str) -> Any:
        try:
            return self[key]
        except KeyError:
            raise AttributeError(f"Configuration key '{key}' not found")

    def __setattr__(self, key: str, value: Any) -> None:
        self[key] = value

    def get_nested(self, path: str, default: Any = None) -> Any:
        """
        Get nested value using dot notation path.

        Example: config.dirac.get_nested('core.zero_tol', 5e-2)
        """
        current = self
        for key in path.split('.'):
            if isinstance(current, ConfigDict) and key in current:
                current = current[key]
            else:
                return default
        return current


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """
    Deep merge two dictionaries, with override taking precedence.

    Educational Note: Later files can extend a section (``dirac.solver``) without
    restating its siblings (``dirac.core``).
    """
    result = base.copy()
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = value
    return result


def load_yaml_files(config_files: List[Path]) -> Dict[str, Any]:
    """Load and merge YAML files in the given order."""
    consolidated: Dict[str, Any] = {}
    for config_file in config_files:
        try:
            logger.debug(f"Loading config: {config_file.name}")
            with open(config_file, 'r', encoding='utf-8') as file:
                file_data = yaml.safe_load(file)
            if file_data:
                consolidated = deep_merge(consolidated, file_data)
        except yaml.YAMLError as e:
            logger.error(f"Error parsing {config_file.name}: {e}")
            raise ValueError(f"Invalid YAML in {config_file.name}: {e}")
    return consolidated


@dataclass
class ProjectConfig:
    """
    Consolidated project-level configuration (files 10-19).

    One section per library component plus the application metadata used in
    JSON reports.
    """
    quatnum: ConfigDict
    mesh: ConfigDict
    dirac: ConfigDict
    integrate: ConfigDict
    bonnet: ConfigDict
    application: ConfigDict

    def __post_init__(self):
        for field_info in fields(self):
            value = getattr(self, field_info.name)
            if isinstance(value, dict) and not isinstance(value, ConfigDict):
                setattr(self, field_info.name, ConfigDict(value))


@dataclass
class InfrastructureConfig:
    """Consolidated infrastructure configuration (files 20-29)."""
    logging: ConfigDict

    def __post_init__(self):
        if self.logging and isinstance(self.logging, dict) and not isinstance(self.logging, ConfigDict):
            self.logging = ConfigDict(self.logging)


class ProjectConfigManager:
    """
    Manages project-level configuration (files 10-19).

    Educational Note: Files are merged in numerical order so a later file can
    override a single tolerance of an earlier one.
    """

    def __init__(self, config_dir: Optional[Path] = None):
        self.config_dir = Path(config_dir) if config_dir else Path(__file__).parent
        self._consolidated_config: Optional[ProjectConfig] = None

    def _load_project_files(self) -> Dict[str, Any]:
        project_files = sorted(f for f in self.config_dir.glob("1[0-9]_*.yaml") if f.is_file())
        if not project_files:
            raise FileNotFoundError("No project configuration files found (10-19 range)")
        return load_yaml_files(project_files)

    def get_project_config(self) -> ProjectConfig:
        """
        Get consolidated project configuration.

        Returns:
            ProjectConfig: Unified configuration object with dot notation access
        """
        if self._consolidated_config is None:
            data = self._load_project_files()
            self._consolidated_config = ProjectConfig(
                **{section: ConfigDict(data.get(section, {})) for section in PROJECT_SECTIONS}
            )
        return self._consolidated_config

    def reload_config(self) -> ProjectConfig:
        """Reload configuration from files."""
        self._consolidated_config = None
        return self.get_project_config()


class InfrastructureConfigManager:
    """Manages infrastructure configuration (files 20-29)."""

    def __init__(self, config_dir: Optional[Path] = None):
        self.config_dir = Path(config_dir) if config_dir else Path(__file__).parent
        self._consolidated_config: Optional[InfrastructureConfig] = None

    def _load_infrastructure_files(self) -> Dict[str, Any]:
        infrastructure_files = sorted(f for f in self.config_dir.glob("2[0-9]_*.yaml") if f.is_file())
        if not infrastructure_files:
            logger.warning("No infrastructure configuration files found (20-29 range)")
            return {}
        return load_yaml_files(infrastructure_files)

    def get_infrastructure_config(self) -> InfrastructureConfig:
        """Get consolidated infrastructure configuration."""
        if self._consolidated_config is None:
            data = self._load_infrastructure_files()
            self._consolidated_config = InfrastructureConfig(logging=ConfigDict(data.get('logging', {})))
        return self._consolidated_config


_project_manager = ProjectConfigManager()
_infrastructure_manager = InfrastructureConfigManager()


def get_project_config() -> ProjectConfig:
    """Get project configuration - convenience function."""
    return _project_manager.get_project_config()


def get_infrastructure_config() -> InfrastructureConfig:
    """Get infrastructure configuration - convenience function."""
    return _infrastructure_manager.get_infrastructure_config()


if __name__ == "__main__":
    """
    Print the merged configuration tree.

    Educational Note: Dynamic introspection shows exactly what the library
    modules will read, without hardcoding any value here.
    """

    def print_config_dict(config_dict, indent=0):
        for key, value in config_dict.items():
            prefix = "  " * indent + f"📄 {key}:"
            if isinstance(value, dict):
                print(prefix)
                print_config_dict(value, indent + 1)
            else:
                print(f"{prefix} {value} ({type(value).__name__})")

    print("🌀 SPINWRIGHT CONFIG FACTORY TEST 🌀")
    print("=" * 50)
    project = get_project_config()
    for section in PROJECT_SECTIONS:
        print(f"\n📂 {section.upper()}:")
        print_config_dict(getattr(project, section), indent=1)
    print("\n📂 LOGGING:")
    print_config_dict(get_infrastructure_config().logging, indent=1)

"""
Test suite for the hierarchical configuration system

Educational Focus: Numbered YAML files merge in order; library modules read
their tolerances through ``get_setting`` with a fallback value.
"""

import sys
from pathlib import Path

import pytest
import yaml

# Add project root to Python path for proper imports
project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from config.config_manager import (
    ConfigDict, ProjectConfigManager, InfrastructureConfigManager, deep_merge, get_project_config,
    get_infrastructure_config
)
from src.utils.settings import get_setting


class TestConfigDict:

    def test_dot_access(self):
        config = ConfigDict({'dirac': {'core': {'zero_tol': 0.05}}})
        assert config.dirac.core.zero_tol == 0.05

    def test_missing_key_raises_attribute_error(self):
        with pytest.raises(AttributeError):
            ConfigDict({}).missing

    def test_get_nested_with_default(self):
        config = ConfigDict({'core': {'tol': 1e-10}})
        assert config.get_nested('core.tol') == 1e-10
        assert config.get_nested('core.absent', 7) == 7
        assert config.get_nested('core.tol.deeper', 'x') == 'x'


def test_deep_merge_keeps_siblings():
    base = {'dirac': {'core': {'zero_tol': 0.05}, 'solver': {'tol': 1e-10}}}
    merged = deep_merge(base, {'dirac': {'solver': {'tol': 1e-8}}})
    assert merged['dirac']['core']['zero_tol'] == 0.05
    assert merged['dirac']['solver']['tol'] == 1e-8
    assert base['dirac']['solver']['tol'] == 1e-10


class TestProjectConfig:
    """
    Educational Note: The shipped configuration is part of the numerical
    contract; these values are the documented defaults.
    """

    def test_shipped_defaults(self):
        config = get_project_config()
        assert config.dirac.core.zero_tol == 0.05
        assert config.quatnum.eigensolver.tol == 1e-10
        assert config.quatnum.eigensolver.seed == 0
        assert config.mesh.io.obj_precision == 9
        assert config.bonnet.core.iso_tol == 1e-6
        assert config.bonnet.core.congruence_rms_ratio == 1e-6
        assert config.application.core.report_schema == 1

    def test_later_files_override(self, tmp_path):
        (tmp_path / "10_base.yaml").write_text(yaml.safe_dump({'dirac': {'core': {'zero_tol': 0.05, 'spectrum_count': 8}}}))
        (tmp_path / "11_local.yaml").write_text(yaml.safe_dump({'dirac': {'core': {'zero_tol': 0.01}}}))
        config = ProjectConfigManager(tmp_path).get_project_config()
        assert config.dirac.core.zero_tol == 0.01
        assert config.dirac.core.spectrum_count == 8
        assert config.bonnet == {}

    def test_missing_project_files(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ProjectConfigManager(tmp_path).get_project_config()

    def test_invalid_yaml(self, tmp_path):
        (tmp_path / "10_broken.yaml").write_text("dirac: [unclosed\n")
        with pytest.raises(ValueError):
            ProjectConfigManager(tmp_path).get_project_config()

    def test_reload(self, tmp_path):
        path = tmp_path / "10_base.yaml"
        path.write_text(yaml.safe_dump({'mesh': {'io': {'obj_precision': 9}}}))
        manager = ProjectConfigManager(tmp_path)
        assert manager.get_project_config().mesh.io.obj_precision == 9
        path.write_text(yaml.safe_dump({'mesh': {'io': {'obj_precision': 12}}}))
        assert manager.reload_config().mesh.io.obj_precision == 12


def test_infrastructure_logging_section():
    logging_config = get_infrastructure_config().logging
    assert logging_config.default_level in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')
    assert 'dirac' in logging_config.component_levels


def test_infrastructure_without_files(tmp_path):
    assert InfrastructureConfigManager(tmp_path).get_infrastructure_config().logging == {}


class TestGetSetting:

    def test_reads_configured_value(self):
        assert get_setting('dirac', 'core.spectrum_count', 99) == 8

    def test_falls_back_on_missing_key(self):
        assert get_setting('dirac', 'core.not_a_key', 3.5) == 3.5

    def test_falls_back_on_missing_section(self):
        assert get_setting('not_a_section', 'core.tol', 'fallback') == 'fallback'
